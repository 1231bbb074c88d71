"""Arithmetic in Z_p: quadratic characters, canonical representatives, orderings.

Everything downstream works over a fixed odd prime p.  A ``PrimeContext``
precomputes the character and inverse tables once, since character lookups
and inversions sit in the innermost loops of the censuses.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "PrimeContext",
    "canonical_rep",
    "precedes",
    "precedes_eq",
    "follows",
    "follows_eq",
    "quadratic_character",
    "anchor_element",
    "case_residue_ok",
]


def _is_prime(n: int) -> bool:
    """Deterministic trial division; contexts are built rarely."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class PrimeContext:
    """A fixed odd prime with precomputed residue and inverse tables.

    Immutable after construction and safe to share across workers.
    """

    __slots__ = ("p", "residue_table", "inverse_table")

    def __init__(self, p: int):
        if not _is_prime(p) or p < 3:
            raise ValueError(f"p must be an odd prime >= 3, got {p}")
        self.p = p
        tbl = np.full(p, -1, dtype=np.int8)
        tbl[0] = 0
        sq = (np.arange(1, p, dtype=np.int64) ** 2) % p
        tbl[sq] = 1
        tbl.setflags(write=False)
        self.residue_table = tbl
        inv = np.zeros(p, dtype=np.int64)
        inv[1] = 1
        for i in range(2, p):
            inv[i] = (-(p // i) * inv[p % i]) % p
        inv.setflags(write=False)
        self.inverse_table = inv

    def __repr__(self):
        return f"PrimeContext({self.p})"

    @property
    def residue_class(self) -> int:
        return self.p % 8

    @property
    def half(self) -> int:
        """(p-1)/2, the midpoint separating the canonical range."""
        return (self.p - 1) // 2

    def character(self, x: int) -> int:
        """Quadratic character: +1 on squares, -1 on non-squares, 0 at 0."""
        return int(self.residue_table[x % self.p])

    def inv(self, x: int) -> int:
        x = x % self.p
        if x == 0:
            raise ZeroDivisionError("0 has no inverse mod p")
        return int(self.inverse_table[x])

    def canonical(self, k: int) -> int:
        return k % self.p

    def residues(self) -> list[int]:
        """Quadratic residues in {1, ..., p-1}, ascending."""
        return [x for x in range(1, self.p) if self.residue_table[x] == 1]

    def non_residues(self) -> list[int]:
        return [x for x in range(1, self.p) if self.residue_table[x] == -1]

    def __hash__(self):
        return hash(self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeContext) and other.p == self.p


def canonical_rep(ctx: PrimeContext, k: int) -> int:
    """Least non-negative integer congruent to k mod p."""
    return k % ctx.p


def precedes(ctx: PrimeContext, a: int, b: int) -> bool:
    """Strict order on Z_p induced by canonical representatives."""
    return a % ctx.p < b % ctx.p


def precedes_eq(ctx: PrimeContext, a: int, b: int) -> bool:
    return a % ctx.p <= b % ctx.p


def follows(ctx: PrimeContext, a: int, b: int) -> bool:
    return a % ctx.p > b % ctx.p


def follows_eq(ctx: PrimeContext, a: int, b: int) -> bool:
    return a % ctx.p >= b % ctx.p


def quadratic_character(ctx: PrimeContext, x: int) -> int:
    return ctx.character(x)


def case_residue_ok(ctx: PrimeContext, case: int) -> bool:
    """Whether the reduction case label is consistent with p mod 8.

    Case 1 applies when p = 3 mod 8; cases 2 and 3 when p = 1 mod 8.
    Cases 2 and 3 differ only in which residue class gets the -2 scaling,
    so the label is always an explicit input, never inferred.
    """
    if case == 1:
        return ctx.p % 8 == 3
    if case in (2, 3):
        return ctx.p % 8 == 1
    return False


def anchor_element(ctx: PrimeContext, case: int) -> int:
    """Smallest element of the scaled class for the given reduction case.

    This is 1 in cases 1 and 2, and the least quadratic non-residue in
    case 3 (where it is odd and provably below p/5).  It anchors the final
    stage of the reduction pipeline: it is never deleted.
    """
    if not case_residue_ok(ctx, case):
        raise ValueError(f"case {case} inconsistent with p={ctx.p} (p mod 8 = {ctx.p % 8})")
    if case in (1, 2):
        return 1
    least = next(x for x in range(2, ctx.p) if ctx.residue_table[x] == -1)
    assert least % 2 == 1, f"least non-residue {least} not odd for p={ctx.p}"
    assert 5 * least < ctx.p, f"least non-residue {least} >= p/5 for p={ctx.p}"
    return least
