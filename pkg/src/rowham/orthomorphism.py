"""Cyclotomic and quadratic maps over Z_p, and orthomorphism predicates.

A cyclotomic map of index n scales each coset of the index-n subgroup of
Z_p^* by its own coefficient and fixes 0.  Index 2 splits Z_p^* by
quadratic residuosity, in which case the choice of primitive element is
immaterial and the map is determined by the coefficient pair alone.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .zp_core import PrimeContext

__all__ = [
    "QuadraticMap",
    "CyclotomicMap",
    "is_orthomorphism",
    "is_quadratic_orthomorphism_pair",
    "smallest_primitive_root",
    "format_map",
    "parse_map",
]


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_primitive_root(ctx: PrimeContext, g: int) -> bool:
    g = g % ctx.p
    if g == 0:
        return False
    return all(pow(g, (ctx.p - 1) // q, ctx.p) != 1 for q in _prime_factors(ctx.p - 1))


def smallest_primitive_root(ctx: PrimeContext) -> int:
    for g in range(2, ctx.p):
        if is_primitive_root(ctx, g):
            return g
    raise AssertionError("unreachable: every prime has a primitive root")


@dataclass(frozen=True)
class QuadraticMap:
    """x -> a*x on quadratic residues, b*x on non-residues, 0 -> 0."""

    ctx: PrimeContext
    a: int
    b: int

    def __post_init__(self):
        object.__setattr__(self, "a", self.a % self.ctx.p)
        object.__setattr__(self, "b", self.b % self.ctx.p)

    def __call__(self, x: int) -> int:
        p = self.ctx.p
        x = x % p
        if x == 0:
            return 0
        c = self.a if self.ctx.residue_table[x] == 1 else self.b
        return (c * x) % p

    def as_array(self) -> np.ndarray:
        """Image table over all of Z_p."""
        p = self.ctx.p
        xs = np.arange(p, dtype=np.int64)
        coeff = np.where(self.ctx.residue_table == 1, self.a, self.b)
        coeff[0] = 0
        return (coeff * xs) % p


@dataclass(frozen=True)
class CyclotomicMap:
    """Index-n map scaling coset C_j = {gamma^(n*i+j)} by coefficient j.

    For n > 2 the cosets depend on the primitive element, so gamma is
    pinned (smallest primitive root unless supplied) and reported in the
    textual form of the map.
    """

    ctx: PrimeContext
    coefficients: tuple[int, ...]
    gamma: int

    def __init__(self, ctx: PrimeContext, coefficients, gamma: int | None = None):
        n = len(coefficients)
        if n == 0 or (ctx.p - 1) % n != 0:
            raise ValueError(f"index {n} does not divide p-1 = {ctx.p - 1}")
        if gamma is None:
            gamma = smallest_primitive_root(ctx)
        elif not is_primitive_root(ctx, gamma):
            raise ValueError(f"{gamma} is not a primitive root mod {ctx.p}")
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coefficients", tuple(c % ctx.p for c in coefficients))
        object.__setattr__(self, "gamma", gamma % ctx.p)

    @property
    def index(self) -> int:
        return len(self.coefficients)

    def coset_indices(self) -> np.ndarray:
        """coset_indices()[x] = j for x in C_j; entry 0 is unused."""
        p, n = self.ctx.p, self.index
        idx = np.zeros(p, dtype=np.int64)
        x = 1
        for e in range(p - 1):
            idx[x] = e % n
            x = (x * self.gamma) % p
        return idx

    def as_array(self) -> np.ndarray:
        p = self.ctx.p
        coeff = np.asarray(self.coefficients, dtype=np.int64)[self.coset_indices()]
        coeff[0] = 0
        return (coeff * np.arange(p, dtype=np.int64)) % p

    def __call__(self, x: int) -> int:
        return int(self.as_array()[x % self.ctx.p])


def is_orthomorphism(mapping) -> bool:
    """Direct check: both x -> m(x) and x -> m(x) - x must be bijections."""
    images = np.asarray(mapping.as_array())
    p = len(images)
    if len(np.unique(images)) != p:
        return False
    diffs = (images - np.arange(p)) % p
    return len(np.unique(diffs)) == p


def is_quadratic_orthomorphism_pair(ctx: PrimeContext, a: int, b: int) -> bool:
    """Closed-form criterion: a*b and (a-1)(b-1) are both quadratic residues."""
    return (
        ctx.character(a * b) == 1
        and ctx.character((a - 1) * (b - 1)) == 1
    )


_MAP_RE = re.compile(r"^phi\[([-0-9,]+)\]@(\d+)(?:,(\d+))?$")


def format_map(m) -> str:
    """Textual form phi[a0,a1,...]@p,gamma used for CLI input/output."""
    if isinstance(m, QuadraticMap):
        coeffs = (m.a, m.b)
        gamma = smallest_primitive_root(m.ctx)
    else:
        coeffs = m.coefficients
        gamma = m.gamma
    return "phi[%s]@%d,%d" % (",".join(str(c) for c in coeffs), m.ctx.p, gamma)


def parse_map(text: str):
    """Inverse of format_map; index-2 maps come back as QuadraticMap."""
    m = _MAP_RE.match(text.strip())
    if not m:
        raise ValueError(f"bad map syntax: {text!r}")
    coeffs = [int(c) for c in m.group(1).split(",")]
    ctx = PrimeContext(int(m.group(2)))
    gamma = int(m.group(3)) if m.group(3) else None
    if len(coeffs) == 2:
        return QuadraticMap(ctx, coeffs[0], coeffs[1])
    return CyclotomicMap(ctx, coeffs, gamma)
