"""Command-line front end.

Exit codes are a stable contract for CI: 0 success, 2 usage error,
3 invariant violation inside the reduction pipeline, 4 golden-data or
expectation mismatch.  All output is deterministic for a given
invocation; worker count never changes result bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import charsum, linkreduce, onefact, spectrum, variety
from .latin import (
    conjugate,
    from_orthomorphism,
    is_row_hamiltonian,
    is_row_hamiltonian_quadratic,
    is_symbol_hamiltonian_quadratic,
    named_square,
    nu_quadratic,
    transpose_pair,
)
from .linkreduce import ReductionInvariantError
from .orthomorphism import QuadraticMap, format_map, parse_map
from .spectrum import KnownExampleError
from .zp_core import PrimeContext, _is_prime

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVARIANT = 3
EXIT_MISMATCH = 4


class UsageError(Exception):
    pass


class GoldenMismatch(Exception):
    pass


def parse_primes(text: str) -> list[int]:
    """A range 'lo..hi' or a comma list; non-primes are dropped."""
    text = text.strip()
    if ".." in text:
        lo_s, hi_s = text.split("..", 1)
        lo, hi = int(lo_s), int(hi_s)
        if hi < lo:
            raise UsageError(f"empty prime range {text!r}")
        return [p for p in range(max(lo, 2), hi + 1) if _is_prime(p)]
    values = sorted({int(v) for v in text.split(",")})
    out = [p for p in values if _is_prime(p)]
    if not out:
        raise UsageError(f"no primes in {text!r}")
    return out


def _write(out_path, text: str):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _map_over(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# construct / pf
# ---------------------------------------------------------------------------


def cmd_construct(args) -> int:
    if args.spec.startswith("phi["):
        mapping = parse_map(args.spec)
        square = from_orthomorphism(mapping)
        spec = f"Q:{mapping.ctx.p}:{mapping.a},{mapping.b}" if isinstance(mapping, QuadraticMap) else args.spec
    else:
        square = named_square(args.spec)
        spec = args.spec
    _write(args.out, square.to_text())
    parts = spec.split(":")
    generating = _generating_map(spec)
    if generating is not None:
        print(f"map: {format_map(generating)}")
    if parts[0] in ("Lp", "Q") and square.n > 100:
        # large quadratic squares get the exact O(p) per-line-type tests
        ctx = PrimeContext(square.n)
        a, b = (-1, 2) if parts[0] == "Lp" else tuple(int(v) for v in parts[2].split(","))
        flags = {
            "row_hamiltonian": is_row_hamiltonian_quadratic(ctx, a, b),
            "column_hamiltonian": is_row_hamiltonian_quadratic(ctx, *transpose_pair(ctx, a, b)),
            "symbol_hamiltonian": is_symbol_hamiltonian_quadratic(ctx, a, b),
        }
        value = nu_quadratic(ctx, a, b)
    else:
        flags = {
            "row_hamiltonian": is_row_hamiltonian(square),
            "column_hamiltonian": is_row_hamiltonian(conjugate(square, (2, 1, 3))),
            "symbol_hamiltonian": is_row_hamiltonian(conjugate(square, (3, 2, 1))),
        }
        value = 2 * sum(flags.values())
    line = "nu=%d %s" % (value, " ".join(f"{k}={str(v).lower()}" for k, v in flags.items()))
    print(line)
    return EXIT_OK


def _generating_map(spec: str):
    parts = spec.split(":")
    if parts[0] == "Lp":
        return QuadraticMap(PrimeContext(int(parts[1])), -1, 2)
    if parts[0] == "Q":
        a, b = (int(v) for v in parts[2].split(","))
        return QuadraticMap(PrimeContext(int(parts[1])), a, b)
    if parts[0].startswith("C") and len(parts) == 4:
        from .orthomorphism import CyclotomicMap

        return CyclotomicMap(
            PrimeContext(int(parts[1])),
            [int(v) for v in parts[3].split(",")],
            int(parts[2]),
        )
    return None


def cmd_pf(args) -> int:
    square = named_square(args.spec)
    fact = onefact.to_factorisation(square)
    _write(args.out, fact.to_text())
    print(f"perfect={str(onefact.is_perfect(fact)).lower()}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


def _pipeline_one(job):
    p, case, audit = job
    result = linkreduce.run_pipeline(PrimeContext(p), case, audit=audit)
    return (p, case, result.nonsingular, result.steps)


def cmd_pipeline(args) -> int:
    primes = parse_primes(args.primes)
    cases = [int(c) for c in args.cases.split(",")] if args.cases else None
    jobs = []
    notices = []
    for p in primes:
        if p <= 3 or p % 8 not in (1, 3):
            notices.append(f"p={p} skipped (p mod 8 = {p % 8} is outside the construction)")
            continue
        applicable = [1] if p % 8 == 3 else [2, 3]
        for case in applicable:
            if cases and case not in cases:
                continue
            jobs.append((p, case, args.audit and p <= args.audit_limit))
    if args.dump_after is not None:
        if len(jobs) != 1:
            raise UsageError("--dump-after needs exactly one prime and one case")
        p, case, audit = jobs[0]
        result = linkreduce.run_pipeline(PrimeContext(p), case, audit=audit)
        labels = (
            list(range(1, p))
            if args.dump_after == 0
            else _active_after(result.state, args.dump_after)
        )
        sub = linkreduce.principal_submatrix(result.state.family.matrix(), labels)
        print(sub.grid())
    lines = []
    for p, case, nonsingular, steps in _map_over(_pipeline_one, jobs, args.threads):
        lines.append(f"p={p} case={case} nonsingular={str(nonsingular).lower()} steps={steps}")
    text = "\n".join(notices + lines)
    _write(args.out, text + "\n" if text else "")
    return EXIT_OK


def _active_after(state, step: int) -> list[int]:
    if step > len(state.trace):
        raise UsageError(f"pipeline has only {len(state.trace)} steps")
    labels = set(range(1, state.family.ctx.p))
    for rec in state.trace[:step]:
        labels -= set(rec.deleted)
    return sorted(labels)


# ---------------------------------------------------------------------------
# census
# ---------------------------------------------------------------------------

_FAMILY_FUNCS = {
    "valid-pairs": spectrum.valid_pairs,
    "self-inverse": spectrum.self_inverse_census,
    "a-1ma": spectrum.a_one_minus_a_search,
}


def _census_one(job):
    family, p, materialise, slow = job
    row = _FAMILY_FUNCS[family](PrimeContext(p), materialise=materialise, slow=slow)
    return (row.p, row.family, row.count, row.witnesses)


def cmd_census(args) -> int:
    family = args.family
    if family not in _FAMILY_FUNCS:
        raise UsageError(f"unknown family {family!r}; pick from {sorted(_FAMILY_FUNCS)}")
    primes = parse_primes(args.primes)
    if family == "self-inverse":
        primes = [p for p in primes if p % 4 == 3]
    else:
        primes = [p for p in primes if p >= 3]
    materialise = True if args.witnesses else None
    rows = _map_over(_census_one, [(family, p, materialise, args.slow) for p in primes], args.threads)
    rows.sort()
    if args.format == "json":
        payload = [
            {"p": p, "family": fam, "count": count, "witnesses": wit if wit is None else list(wit)}
            for p, fam, count, wit in rows
        ]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = ["p,family,count"]
        lines += [f"{p},{fam},{count}" for p, fam, count, _ in rows]
        text = "\n".join(lines) + "\n"
    _write(args.out, text)
    if args.check_golden:
        try:
            golden = spectrum.load_golden(family)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        bad = [
            (p, count, golden[p])
            for p, _, count, _ in rows
            if p in golden and golden[p] != count
        ]
        missing = [p for p, *_ in rows if p not in golden]
        if bad or missing:
            for p, got, want in bad:
                print(f"golden mismatch at p={p}: got {got}, expected {want}", file=sys.stderr)
            if missing:
                print(f"no golden data for primes {missing}", file=sys.stderr)
            raise GoldenMismatch(f"{len(bad)} mismatches")
        print(f"golden check passed for {len(rows)} primes", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# witness tables
# ---------------------------------------------------------------------------

WITNESS_A_WINDOW = (20, 1696)
WITNESS_S0C_WINDOW = (41, 1657)


def cmd_witness(args) -> int:
    primes = parse_primes(args.primes)
    lines = ["p,c,x,present"]
    failures = []
    if args.kind == "A":
        for p in primes:
            if p % 8 not in (1, 3):
                continue
            x = charsum.witness_A(PrimeContext(p))
            present = x is not None
            lines.append(f"{p},,{'' if x is None else x},{int(present)}")
            in_window = p == 11 or WITNESS_A_WINDOW[0] <= p <= WITNESS_A_WINDOW[1]
            if in_window and not present:
                failures.append(f"p={p} lacks a witness inside the verified window")
    elif args.kind == "s0c":
        for p in primes:
            if p % 8 != 1:
                continue
            table = charsum.witness_s0c_table(PrimeContext(p))
            for c in sorted(table):
                x = table[c]
                lines.append(f"{p},{c},{'' if x is None else x},{int(x is not None)}")
            in_window = WITNESS_S0C_WINDOW[0] <= p <= WITNESS_S0C_WINDOW[1]
            if in_window:
                gaps = [c for c, x in table.items() if x is None]
                if gaps:
                    failures.append(f"p={p} lacks witnesses for c={gaps} inside the verified window")
    else:
        raise UsageError(f"unknown witness kind {args.kind!r}; pick A or s0c")
    _write(args.out, "\n".join(lines) + "\n")
    if failures:
        for f in failures:
            print(f, file=sys.stderr)
        raise GoldenMismatch(f"{len(failures)} missing expected witnesses")
    return EXIT_OK


# ---------------------------------------------------------------------------
# variety / examples
# ---------------------------------------------------------------------------


def cmd_variety(args) -> int:
    report = variety.anti_associativity_probe(args.p, args.max_order, samples=args.samples)
    print(f"p={report.p}")
    print(f"groups_checked={len(report.groups_checked)} all_fail={str(report.groups_all_fail).lower()}")
    print(
        f"loops_exhausted_orders={report.loops_exhausted_orders} "
        f"count={report.loops_exhausted_count} sampled_orders={report.loops_sampled_orders} "
        f"all_fail={str(report.small_loops_all_fail).lower()}"
    )
    print(f"witness_order={report.witness_order} satisfies_identities={str(report.witness_passes).lower()}")
    ok = report.groups_all_fail and report.small_loops_all_fail and report.witness_passes
    if not ok:
        raise GoldenMismatch("variety probe expectations not met")
    return EXIT_OK


def cmd_examples(args) -> int:
    report = spectrum.verify_known_examples(slow=args.slow)
    for name, desc, ok in report:
        print(f"{'ok  ' if ok else 'FAIL'} {name}: {desc}")
    if args.order15:
        tried, hits = spectrum.sweep_order15()
        print(f"order-15 sweep: {tried} diagonally cyclic squares, nu=4 hits: {hits}")
        if hits:
            raise GoldenMismatch("unexpected nu=4 square of order 15")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rowham",
        description="Latin squares from quadratic orthomorphisms: Hamiltonicity, "
        "GF(2) reduction pipeline, censuses, witnesses, loop varieties.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, threads=False):
        p.add_argument("--out", metavar="PATH", help="write primary output to PATH instead of stdout")
        if threads:
            p.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker processes")

    c = sub.add_parser("construct", help="build a named square, print nu and Hamiltonicity flags")
    c.add_argument("spec", help="Lp:<p> | Q:<p>:<a>,<b> | C<n>:<p>:<gamma>:<c0,..> | order21 | phi[a,b,..]@p,gamma")
    add_common(c)
    c.set_defaults(func=cmd_construct)

    c = sub.add_parser("pipeline", help="run the reduction pipeline over a prime range")
    c.add_argument("--primes", required=True, help="range lo..hi or comma list")
    c.add_argument("--cases", help="restrict to case labels, e.g. 1,3")
    c.add_argument("--audit", action="store_true", help="recheck determinant and row patterns per step")
    c.add_argument("--audit-limit", type=int, default=101, help="largest p audited (audit is O(p^3) per step)")
    c.add_argument("--dump-after", type=int, metavar="STEP", help="print the active matrix after STEP deletions")
    add_common(c, threads=True)
    c.set_defaults(func=cmd_pipeline)

    c = sub.add_parser("census", help="run a family census, optionally against golden data")
    c.add_argument("family", help="valid-pairs | self-inverse | a-1ma")
    c.add_argument("--primes", required=True)
    c.add_argument("--check-golden", action="store_true")
    c.add_argument("--witnesses", action="store_true", help="materialise witness lists regardless of p")
    c.add_argument("--slow", action="store_true", help="audit route: definition-level O(p^3) checks")
    c.add_argument("--format", choices=("csv", "json"), default="csv")
    add_common(c, threads=True)
    c.set_defaults(func=cmd_census)

    c = sub.add_parser("witness", help="emit witness tables for the symbol-permutation arguments")
    c.add_argument("kind", help="A | s0c")
    c.add_argument("--primes", required=True)
    add_common(c)
    c.set_defaults(func=cmd_witness)

    c = sub.add_parser("pf", help="export the bipartite 1-factorisation of a named square")
    c.add_argument("spec")
    add_common(c)
    c.set_defaults(func=cmd_pf)

    c = sub.add_parser("variety", help="probe the order-p loop variety for anti-associativity")
    c.add_argument("p", type=int)
    c.add_argument("--max-order", type=int, default=10)
    c.add_argument("--samples", type=int, default=5)
    add_common(c)
    c.set_defaults(func=cmd_variety)

    c = sub.add_parser("examples", help="verify the published named-square invariants")
    c.add_argument("--slow", action="store_true", help="include the large named squares")
    c.add_argument("--order15", action="store_true", help="exhaust diagonally cyclic squares of order 15")
    add_common(c)
    c.set_defaults(func=cmd_examples)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ReductionInvariantError as exc:
        dump = f"rowham_trace_step{exc.step_index}.txt"
        with open(dump, "w") as fh:
            fh.write(str(exc) + "\n" + exc.trace_text() + "\n")
        print(f"invariant violation: {exc} (trace dumped to {dump})", file=sys.stderr)
        return EXIT_INVARIANT
    except (GoldenMismatch, KnownExampleError) as exc:
        print(f"mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
