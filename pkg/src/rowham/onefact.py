"""1-factorisations of the complete bipartite graph from Latin squares.

Each symbol of an n x n square names a perfect matching between row
vertices and column vertices; together the n matchings partition the
edge set.  The factorisation is perfect when every union of two
matchings is a single Hamiltonian cycle, which is the symbol-side
analogue of row-Hamiltonicity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .latin import LatinSquare

__all__ = ["BipartiteFactorisation", "to_factorisation", "is_perfect"]


@dataclass(frozen=True)
class BipartiteFactorisation:
    """n perfect matchings; factors[s][i] is the column matched to row i."""

    n: int
    factors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        full = set(range(self.n))
        if len(self.factors) != self.n:
            raise ValueError("need exactly n factors")
        for s, factor in enumerate(self.factors):
            if set(factor) != full:
                raise ValueError(f"factor {s} is not a perfect matching")
        for i in range(self.n):
            if {factor[i] for factor in self.factors} != full:
                raise ValueError(f"factors overlap at row vertex {i}")

    def to_text(self) -> str:
        lines = [
            "factor %d: %s" % (s, " ".join(str(j) for j in factor))
            for s, factor in enumerate(self.factors)
        ]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BipartiteFactorisation":
        factors = []
        for line in text.splitlines():
            if not line.strip():
                continue
            head, _, body = line.partition(":")
            if not head.startswith("factor"):
                raise ValueError(f"bad factor line: {line!r}")
            factors.append(tuple(int(v) for v in body.split()))
        return cls(len(factors), tuple(factors))


def to_factorisation(square: LatinSquare) -> BipartiteFactorisation:
    """Factor-per-symbol encoding: symbol s matches row i to the column
    where s sits in row i."""
    inv = square.inverse_rows()
    factors = tuple(tuple(inv[i][s] for i in range(square.n)) for s in range(square.n))
    return BipartiteFactorisation(square.n, factors)


def is_perfect(fact: BipartiteFactorisation) -> bool:
    """Walk the union of every factor pair; perfect iff each walk closes
    after visiting all 2n vertices."""
    n = fact.n
    inverses = []
    for factor in fact.factors:
        inv = [0] * n
        for i, j in enumerate(factor):
            inv[j] = i
        inverses.append(inv)
    for s in range(n):
        match_s = fact.factors[s]
        for t in range(s + 1, n):
            inv_t = inverses[t]
            row = inv_t[match_s[0]]
            length = 2
            while row != 0:
                row = inv_t[match_s[row]]
                length += 2
            if length != 2 * n:
                return False
    return True
