"""Quasigroups, loop isotopes, and the two-identity loop varieties.

The varieties of interest are cut out by two identities on a loop: left
translation quotients have order dividing p, right translation quotients
have order dividing lcm(1, ..., p-1).  Both are decided through cycle
lengths; the lcm itself is never materialised.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .latin import LatinSquare, conjugate, nu_four_square, from_orthomorphism
from .orthomorphism import QuadraticMap
from .zp_core import PrimeContext

__all__ = [
    "Quasigroup",
    "Loop",
    "from_square",
    "principal_loop_isotope",
    "divides_lcm_below",
    "satisfies_variety_identities",
    "variety_loop",
    "anti_associativity_probe",
    "ProbeReport",
    "cyclic_group_square",
    "abelian_group_square",
    "random_loop_square",
]

AXIOM_CHECK_LIMIT = 64


class Quasigroup:
    """Multiplication plus the derived left and right division tables."""

    __slots__ = ("n", "mult", "left_div", "right_div")

    def __init__(self, square: LatinSquare, check_axioms: bool | None = None):
        self.n = square.n
        self.mult = square
        cells = square.cells
        n = self.n
        grid = np.broadcast_to(np.arange(n, dtype=np.int64), (n, n))
        # a \ b: the y with mult[a, y] = b
        ld = np.empty((n, n), dtype=np.int64)
        np.put_along_axis(ld, cells, grid, axis=1)
        # a / b: the x with mult[x, b] = a
        rd = np.empty((n, n), dtype=np.int64)
        np.put_along_axis(rd, cells, grid.T, axis=0)
        self.left_div = ld
        self.right_div = rd
        if check_axioms is None:
            check_axioms = n <= AXIOM_CHECK_LIMIT
        if check_axioms:
            self._assert_axioms()

    def _assert_axioms(self):
        n = self.n
        m = self.mult.cells
        rows = np.arange(n)[:, None]
        cols = np.arange(n)[None, :]
        ok = (
            np.array_equal(m[rows, self.left_div], np.broadcast_to(cols, (n, n)))
            and np.array_equal(self.left_div[rows, m], np.broadcast_to(cols, (n, n)))
            # (y / x) * x = y and (y * x) / x = y, for all rows y, columns x
            and np.array_equal(m[self.right_div, cols], np.broadcast_to(rows, (n, n)))
            and np.array_equal(self.right_div[m[rows, cols], cols], np.broadcast_to(rows, (n, n)))
        )
        if not ok:
            raise AssertionError("division tables violate the quasigroup axioms")

    def mul(self, a: int, b: int) -> int:
        return int(self.mult.cells[a, b])

    def ldiv(self, a: int, b: int) -> int:
        return int(self.left_div[a, b])

    def rdiv(self, a: int, b: int) -> int:
        return int(self.right_div[a, b])


class Loop(Quasigroup):
    """Quasigroup with a two-sided identity element."""

    __slots__ = ("identity",)

    def __init__(self, square: LatinSquare, identity: int, check_axioms: bool | None = None):
        super().__init__(square, check_axioms)
        e = identity
        cells = square.cells
        if not (np.array_equal(cells[e], np.arange(self.n)) and np.array_equal(cells[:, e], np.arange(self.n))):
            raise ValueError(f"{e} is not a two-sided identity")
        self.identity = e


def from_square(square: LatinSquare, check_axioms: bool | None = None) -> Quasigroup:
    return Quasigroup(square, check_axioms)


def principal_loop_isotope(q: Quasigroup, a: int = 0, b: int = 0) -> Loop:
    """The loop x o y = (x / b) * (a \\ y) with identity a * b.

    Isotopy preserves the cycle lengths of all row and column
    permutations, which is all the variety identities see.
    """
    table = q.mult.cells[np.ix_(q.right_div[:, b], q.left_div[a, :])]
    return Loop(LatinSquare(table, validate=False), q.mul(a, b))


def divides_lcm_below(length: int, p: int) -> bool:
    """Whether length divides lcm(1, ..., p-1), by prime powers.

    length divides the lcm iff every maximal prime power in it is at
    most p-1, so the astronomically large lcm never gets built.
    """
    if length < 1:
        raise ValueError("cycle length must be positive")
    rest = length
    d = 2
    while d * d <= rest:
        if rest % d == 0:
            q = 1
            while rest % d == 0:
                rest //= d
                q *= d
            if q > p - 1:
                return False
        d += 1
    if rest > 1 and rest > p - 1:
        return False
    return True


def _cycle_lengths(images: list[int]) -> list[int]:
    n = len(images)
    seen = bytearray(n)
    out = []
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = 1
            x = images[x]
            length += 1
        out.append(length)
    return out


def satisfies_variety_identities(loop: Loop, p: int) -> bool:
    """Both identities, decided through cycle-length divisibility.

    The left-translation quotient between x and y is exactly the row
    permutation between rows x and y of the multiplication table, and
    the right quotient is the column permutation; so the identities say
    every row-cycle length divides p and every column-cycle length
    divides lcm(1, ..., p-1).
    """
    rows = loop.mult.row_lists()
    invs = loop.mult.inverse_rows()
    n = loop.n
    cols = loop.mult.cells.T.tolist()
    inv_cols = [list(np.argsort(c)) for c in cols]
    for x in range(n):
        for y in range(n):
            if x == y:
                continue
            row_perm = [rows[y][invs[x][s]] for s in range(n)]
            if any(p % length for length in _cycle_lengths(row_perm)):
                return False
            col_perm = [cols[y][inv_cols[x][s]] for s in range(n)]
            if not all(divides_lcm_below(length, p) for length in _cycle_lengths(col_perm)):
                return False
    return True


def variety_loop(p: int) -> Loop:
    """The order-p loop witnessing that the variety is non-trivial.

    Needs a table whose rows are all full cycles while no column is one.
    The (2,3,1)-conjugate of the order-p family square has exactly that
    shape, since its column permutations are the family square's symbol
    permutations.  At p = 19 the family square is atomic, so the (3, 13)
    square is used instead; it is row-Hamiltonian with no full-cycle
    column permutation already, without conjugating.
    """
    ctx = PrimeContext(p)
    if p == 19:
        return principal_loop_isotope(from_square(from_orthomorphism(QuadraticMap(ctx, 3, 13))))
    base = nu_four_square(ctx)
    return principal_loop_isotope(from_square(conjugate(base, (2, 3, 1))))


# ---------------------------------------------------------------------------
# anti-associativity probe
# ---------------------------------------------------------------------------


def cyclic_group_square(n: int) -> LatinSquare:
    i = np.arange(n, dtype=np.int64)
    return LatinSquare((i[:, None] + i[None, :]) % n, validate=False)


def abelian_group_square(factors: tuple[int, ...]) -> LatinSquare:
    """Addition table of the direct product of cyclic groups; element
    (x1, x2) is encoded as x1 * |G2| + x2."""
    tables = [cyclic_group_square(m).cells for m in factors]
    table = tables[0]
    for t in tables[1:]:
        k = t.shape[0]
        m = table.shape[0]
        table = (table[:, None, :, None] * k + t[None, :, None, :]).reshape(m * k, m * k)
    return LatinSquare(table)


def _factorizations(n: int, smallest: int = 2) -> list[tuple[int, ...]]:
    out = []
    d = smallest
    while d * d <= n:
        if n % d == 0:
            for rest in _factorizations(n // d, d):
                out.append((d,) + rest)
        d += 1
    out.append((n,))
    return out


def random_loop_square(n: int, seed: int) -> LatinSquare:
    """A reduced Latin square (identity row and column) by randomised
    backtracking; deterministic per seed."""
    rng = random.Random(seed)
    grid = [[-1] * n for _ in range(n)]
    grid[0] = list(range(n))
    for i in range(1, n):
        grid[i][0] = i
    col_used = [sum(1 << grid[r][c] for r in range(n) if grid[r][c] >= 0) for c in range(n)]

    def fill(r: int, c: int, row_used: int) -> bool:
        if c == n:
            return fill(r + 1, 1, 1 << (r + 1)) if r + 1 < n else True
        options = [v for v in range(n) if not (row_used >> v) & 1 and not (col_used[c] >> v) & 1]
        rng.shuffle(options)
        for v in options:
            grid[r][c] = v
            col_used[c] |= 1 << v
            if fill(r, c + 1, row_used | (1 << v)):
                return True
            col_used[c] ^= 1 << v
            grid[r][c] = -1
        return False

    if n > 1 and not fill(1, 1, 1 << 1):
        raise AssertionError(f"backtracking failed to complete a reduced square of order {n}")
    return LatinSquare(grid)


def _reduced_squares(n: int):
    """All reduced Latin squares of order n (identity first row/column)."""
    grid = [[-1] * n for _ in range(n)]
    grid[0] = list(range(n))
    for i in range(n):
        grid[i][0] = i
    col_used = [sum(1 << grid[r][c] for r in range(n) if grid[r][c] >= 0) for c in range(n)]

    def fill(r: int, c: int, row_used: int):
        if c == n:
            if r + 1 == n:
                yield [row[:] for row in grid]
            else:
                yield from fill(r + 1, 1, 1 << (r + 1))
            return
        for v in range(n):
            if not (row_used >> v) & 1 and not (col_used[c] >> v) & 1:
                grid[r][c] = v
                col_used[c] |= 1 << v
                yield from fill(r, c + 1, row_used | (1 << v))
                col_used[c] ^= 1 << v
                grid[r][c] = -1

    if n == 1:
        yield [[0]]
    else:
        yield from fill(1, 1, 1 << 1)


@dataclass(frozen=True)
class ProbeReport:
    p: int
    groups_checked: list[tuple[int, ...]]
    groups_all_fail: bool
    loops_exhausted_orders: list[int]
    loops_exhausted_count: int
    loops_sampled_orders: list[int]
    small_loops_all_fail: bool
    witness_order: int
    witness_passes: bool


def anti_associativity_probe(p: int, max_order: int, sample_orders=(7, 8, 9, 10), samples: int = 5) -> ProbeReport:
    """Check that no small group or loop lands in the order-p variety.

    Groups of order 2..max_order (all abelian types via cyclic-factor
    products) must fail; loops are exhausted up to order 6 and sampled
    above.  The order-p loop isotope is the witness that the variety is
    nonetheless non-trivial.
    """
    if p % 8 not in (1, 3) or p <= 3:
        raise ValueError(f"probe needs a prime p > 3 with p = 1 or 3 mod 8, got {p}")
    groups: list[tuple[int, ...]] = []
    groups_fail = True
    for n in range(2, max_order + 1):
        for factors in _factorizations(n):
            groups.append(factors)
            loop = Loop(abelian_group_square(factors), 0)
            if satisfies_variety_identities(loop, p):
                groups_fail = False
    exhausted = [n for n in range(2, min(p - 1, 6) + 1)]
    loops_fail = True
    exhausted_count = 0
    for n in exhausted:
        for rows in _reduced_squares(n):
            exhausted_count += 1
            if satisfies_variety_identities(Loop(LatinSquare(rows), 0), p):
                loops_fail = False
    sampled = [n for n in sample_orders if n < p]
    for n in sampled:
        for seed in range(samples):
            sq = random_loop_square(n, seed)
            if satisfies_variety_identities(Loop(sq, 0), p):
                loops_fail = False
    witness = variety_loop(p)
    witness_ok = satisfies_variety_identities(witness, p)
    return ProbeReport(
        p=p,
        groups_checked=groups,
        groups_all_fail=groups_fail,
        loops_exhausted_orders=exhausted,
        loops_exhausted_count=exhausted_count,
        loops_sampled_orders=sampled,
        small_loops_all_fail=loops_fail,
        witness_order=witness.n,
        witness_passes=witness_ok,
    )
