"""Character sums over Z_p and the witness searches they underwrite.

The quadratic-character sums here are always computed exactly by
summation; the square-root bounds are checked in integer arithmetic by
comparing squares, never through floats, because the interesting primes
sit right at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import NamedTuple

import numpy as np

from .latin import nu_four_square, symbol_permutation
from .zp_core import PrimeContext

__all__ = [
    "ZpPolynomial",
    "character_sum",
    "WeilCheck",
    "check_weil_bound",
    "check_quadratic_identity",
    "witness_A",
    "witness_s0c",
    "witness_s0c_table",
    "QSumBound",
    "q_sum_lower_bound",
]


@dataclass(frozen=True)
class ZpPolynomial:
    """Polynomial over Z_p; coefficients ascending, leading one non-zero."""

    ctx: PrimeContext
    coefficients: tuple[int, ...]

    def __init__(self, ctx: PrimeContext, coefficients):
        coeffs = tuple(c % ctx.p for c in coefficients)
        if not coeffs or coeffs[-1] == 0:
            raise ValueError("leading coefficient must be non-zero")
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def values(self) -> np.ndarray:
        """Evaluations over all of Z_p (Horner, vectorised)."""
        p = self.ctx.p
        xs = np.arange(p, dtype=np.int64)
        acc = np.zeros(p, dtype=np.int64)
        for c in reversed(self.coefficients):
            acc = (acc * xs + c) % p
        return acc

    def root_count(self) -> int:
        return int((self.values() == 0).sum())


def character_sum(f: ZpPolynomial) -> int:
    """Exact value of the sum of the quadratic character over f's values."""
    return int(f.ctx.residue_table[f.values()].sum())


class WeilCheck(NamedTuple):
    ok: bool
    total: int
    slack: int  # (d-1)^2 p - total^2, non-negative iff the bound holds


def check_weil_bound(f: ZpPolynomial) -> WeilCheck:
    """Square-root bound for a split polynomial with distinct roots.

    Requires f to have exactly deg(f) distinct roots in Z_p; a degree-d
    polynomial with d roots is automatically squarefree.
    """
    d = f.degree
    if d < 1:
        raise ValueError("degree must be positive")
    if f.root_count() != d:
        raise ValueError(f"polynomial must have {d} distinct roots in Z_p, found {f.root_count()}")
    total = character_sum(f)
    slack = (d - 1) ** 2 * f.ctx.p - total * total
    return WeilCheck(slack >= 0, total, slack)


def check_quadratic_identity(ctx: PrimeContext, a2: int, a1: int, a0: int) -> bool:
    """The full character sum of a non-degenerate quadratic equals the
    negated character of its leading coefficient."""
    a2, a1, a0 = a2 % ctx.p, a1 % ctx.p, a0 % ctx.p
    if a2 == 0:
        raise ValueError("leading coefficient is zero")
    if (a1 * a1 - 4 * a0 * a2) % ctx.p == 0:
        raise ValueError("discriminant is zero")
    total = character_sum(ZpPolynomial(ctx, (a0, a1, a2)))
    return total == -ctx.character(a2)


# ---------------------------------------------------------------------------
# witnesses for non-Hamiltonian symbol permutations of the family square
# ---------------------------------------------------------------------------


def _witness_A_mask(ctx: PrimeContext) -> np.ndarray:
    p = ctx.p
    res = ctx.residue_table
    xs = np.arange(p, dtype=np.int64)
    inv2 = ctx.inv(2)
    inv4 = ctx.inv(4)
    return (
        (res[xs] == 1)
        & (res[(xs + 1) % p] == 1)
        & (res[(xs + inv2) % p] == 1)
        & (res[(-inv2 * xs - 3 * inv4) % p] == -1)
        & (res[(inv4 - inv2 * xs) % p] == -1)
    )


def witness_A(ctx: PrimeContext):
    """Smallest x whose five character conditions force a 3-cycle in the
    symbol permutation between symbols 0 and 1 of the family square.

    Returns None when no witness exists (possible below the proven
    window).  A returned witness is validated against the square itself:
    the six forced cells are checked and the 3-cycle is located.
    """
    if ctx.p % 8 not in (1, 3):
        raise ValueError(f"family square needs p = 1 or 3 mod 8, got {ctx.p}")
    mask = _witness_A_mask(ctx)
    hits = np.nonzero(mask)[0]
    if len(hits) == 0:
        return None
    x = int(hits[0])
    _validate_witness_A(ctx, x)
    return x


def _validate_witness_A(ctx: PrimeContext, x: int):
    p = ctx.p
    inv2 = ctx.inv(2)
    inv4 = ctx.inv(4)
    square = nu_four_square(ctx)
    cells = square.cells
    triples = (
        (x + 1, 2 * x + 1, 1),
        (x + 3 * inv2, 2 * x + 2, 1),
        (x + inv2, inv2 * x + 3 * inv4, 1),
        (x + 1, 2 * x + 2, 0),
        (x + 3 * inv2, inv2 * x + 3 * inv4, 0),
        (x + inv2, 2 * x + 1, 0),
    )
    for r, c, s in triples:
        if cells[r % p, c % p] != s % p:
            raise AssertionError(f"witness {x} mod {p}: cell ({r % p},{c % p}) is not {s % p}")
    perm = symbol_permutation(square, 0, 1)
    a, b, c = (x + 1) % p, (x + 3 * inv2) % p, (x + inv2) % p
    if not (perm[a] == b and perm[b] == c and perm[c] == a):
        raise AssertionError(f"witness {x} mod {p}: expected 3-cycle ({a},{b},{c}) missing")


def witness_s0c_table(ctx: PrimeContext) -> dict[int, int | None]:
    """For every non-residue c: the least witness x making the symbol
    permutation between 0 and c of the family square a non-full-cycle,
    or None.  Present witnesses are validated on the square."""
    p = ctx.p
    if p % 8 != 1:
        raise ValueError(f"symbol witnesses need p = 1 mod 8, got {p}")
    res = ctx.residue_table
    xs = np.arange(p, dtype=np.int64)
    inv2 = ctx.inv(2)
    cs = np.asarray(ctx.non_residues(), dtype=np.int64)
    cond = (
        (res[xs][None, :] == 1)
        & (res[(xs[None, :] - cs[:, None]) % p] == 1)
        & (res[(cs[:, None] - 2 * xs[None, :]) % p] == -1)
        & (res[(inv2 * cs[:, None] - 2 * xs[None, :]) % p] == -1)
        & (res[(3 * inv2 * cs[:, None] - 2 * xs[None, :]) % p] == -1)
    )
    square = nu_four_square(ctx)
    cells = square.cells
    # column of each symbol per row, and row of each symbol per column
    col_of = np.empty((p, p), dtype=np.int64)
    row_of = np.empty((p, p), dtype=np.int64)
    grid = np.broadcast_to(np.arange(p, dtype=np.int64), (p, p))
    np.put_along_axis(col_of, cells, grid, axis=1)
    np.put_along_axis(row_of, cells, grid.T, axis=0)
    out: dict[int, int | None] = {}
    for row_idx, c in enumerate(cs.tolist()):
        hits = np.nonzero(cond[row_idx])[0]
        if len(hits) == 0:
            out[c] = None
            continue
        x = int(hits[0])
        expect = {x: (4 * x - c) % p, (4 * x - c) % p: (4 * x - 2 * c) % p, (4 * x - 2 * c) % p: x}
        for r0, r1 in expect.items():
            k = col_of[r0, 0]
            if row_of[c, k] != r1:
                raise AssertionError(f"witness {x} for c={c} mod {p}: 3-cycle step {r0}->{r1} absent")
        out[c] = x
    return out


def witness_s0c(ctx: PrimeContext, c: int):
    """Single-c variant of witness_s0c_table."""
    p = ctx.p
    if p % 8 != 1:
        raise ValueError(f"symbol witnesses need p = 1 mod 8, got {p}")
    c = c % p
    if ctx.character(c) != -1:
        raise ValueError(f"{c} is not a non-residue mod {p}")
    return witness_s0c_table(ctx)[c]


@dataclass(frozen=True)
class QSumBound:
    total: int
    weil_floor: int
    witness_count: int
    boundary: dict[int, int]

    def __iter__(self):
        return iter((self.total, self.weil_floor))


def q_sum_lower_bound(ctx: PrimeContext) -> QSumBound:
    """Exact total of the five-factor indicator product and its bound.

    The product is 32 exactly on the witness set, 0 off it except at the
    (at most five) zeros of the linear factors; the decomposition
    total = 32 * |witnesses| + boundary corrections is asserted exactly,
    as is the square-root lower bound total >= p - 39*sqrt(p) - 10.
    """
    p = ctx.p
    if p % 8 not in (1, 3):
        raise ValueError(f"family square needs p = 1 or 3 mod 8, got {p}")
    res = ctx.residue_table.astype(np.int64)
    xs = np.arange(p, dtype=np.int64)
    inv2 = ctx.inv(2)
    inv4 = ctx.inv(4)
    factors = (
        1 + res[xs],
        1 + res[(xs + 1) % p],
        1 + res[(xs + inv2) % p],
        1 - res[(-inv2 * xs - 3 * inv4) % p],
        1 - res[(inv4 - inv2 * xs) % p],
    )
    q_vals = factors[0] * factors[1] * factors[2] * factors[3] * factors[4]
    total = int(q_vals.sum())
    witness_count = int(_witness_A_mask(ctx).sum())
    boundary_pts = sorted({0, (-1) % p, (-inv2) % p, (-3 * inv2) % p, inv2 % p})
    boundary = {int(x): int(q_vals[x]) for x in boundary_pts}
    if any(v > 16 for v in boundary.values()):
        raise AssertionError(f"boundary value above 16 at p={p}")
    if total != 32 * witness_count + sum(boundary.values()):
        raise AssertionError(f"exact decomposition failed at p={p}")
    if total > 32 * witness_count + 80:
        raise AssertionError(f"upper sandwich failed at p={p}")
    # total >= p - 39 sqrt(p) - 10, compared via squares
    deficit = p - 10 - total
    if deficit > 0 and deficit * deficit > 39 * 39 * p:
        raise AssertionError(f"square-root lower bound failed at p={p}")
    s = isqrt(39 * 39 * p)
    ceil_sqrt_term = s if s * s == 39 * 39 * p else s + 1
    return QSumBound(total, p - 10 - ceil_sqrt_term, witness_count, boundary)
