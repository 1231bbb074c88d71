"""Latin squares: construction, conjugates, permutations between lines, nu.

Squares are stored as contiguous numpy arrays of symbols 0..n-1, with rows
and columns indexed the same way.  Diagonally cyclic squares are built
from orthomorphisms; the permutation between two rows (or columns, or
symbols) is the object whose cycle structure everything else cares about.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .orthomorphism import CyclotomicMap, QuadraticMap, is_orthomorphism
from .zp_core import PrimeContext

__all__ = [
    "LatinSquare",
    "CONJUGATE_LABELS",
    "from_orthomorphism",
    "from_first_row",
    "named_square",
    "nu_four_square",
    "conjugate",
    "compose_labels",
    "row_permutation",
    "column_permutation",
    "symbol_permutation",
    "cycle_structure",
    "is_full_cycle",
    "is_row_hamiltonian",
    "is_row_hamiltonian_quadratic",
    "is_symbol_hamiltonian_quadratic",
    "transpose_pair",
    "nu",
    "nu_quadratic",
    "ORDER21_FIRST_ROW",
]

CONJUGATE_LABELS = (
    (1, 2, 3),
    (1, 3, 2),
    (2, 1, 3),
    (2, 3, 1),
    (3, 1, 2),
    (3, 2, 1),
)

# Smallest known composite order with exactly four row-Hamiltonian
# conjugates; diagonally cyclic, determined by this first row.
ORDER21_FIRST_ROW = (0, 8, 15, 18, 13, 11, 14, 4, 12, 2, 9, 7, 17, 3, 5, 10, 19, 6, 16, 20, 1)


class LatinSquare:
    """An n x n array in which every row and column holds each symbol once."""

    __slots__ = ("cells", "n", "_row_lists", "_inv_rows")

    def __init__(self, cells, validate: bool = True):
        arr = np.ascontiguousarray(np.asarray(cells, dtype=np.int64))
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("cells must be a square matrix")
        self.n = int(arr.shape[0])
        if validate:
            full = np.arange(self.n)
            rows_ok = np.array_equal(np.sort(arr, axis=1), np.broadcast_to(full, arr.shape))
            cols_ok = np.array_equal(np.sort(arr, axis=0), np.broadcast_to(full[:, None], arr.shape))
            if not (rows_ok and cols_ok):
                raise ValueError("not a Latin square: a row or column repeats a symbol")
        arr.setflags(write=False)
        self.cells = arr
        self._row_lists = None
        self._inv_rows = None

    def __getitem__(self, idx):
        return self.cells[idx]

    def __eq__(self, other):
        return isinstance(other, LatinSquare) and np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash(self.cells.tobytes())

    def __repr__(self):
        return f"LatinSquare(order={self.n})"

    def row_lists(self) -> list[list[int]]:
        """Rows as plain lists; cached for hot pairwise loops."""
        if self._row_lists is None:
            self._row_lists = self.cells.tolist()
        return self._row_lists

    def inverse_rows(self) -> list[list[int]]:
        """inverse_rows()[i][s] = column of symbol s in row i; cached."""
        if self._inv_rows is None:
            inv = np.empty_like(self.cells)
            np.put_along_axis(inv, self.cells, np.broadcast_to(np.arange(self.n), self.cells.shape), axis=1)
            self._inv_rows = inv.tolist()
        return self._inv_rows

    def to_text(self) -> str:
        lines = [f"order {self.n}"]
        lines.extend(" ".join(str(v) for v in row) for row in self.row_lists())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LatinSquare":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        if len(head) != 2 or head[0] != "order":
            raise ValueError("square file must start with 'order n'")
        n = int(head[1])
        rows = [[int(v) for v in ln.split()] for ln in lines[1 : n + 1]]
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError("square file does not contain n rows of n entries")
        return cls(rows)


def from_orthomorphism(mapping) -> LatinSquare:
    """Diagonally cyclic square L[i, j] = i + m(j - i) generated by m."""
    if not is_orthomorphism(mapping):
        raise ValueError("map is not an orthomorphism; the array would not be Latin")
    images = np.asarray(mapping.as_array(), dtype=np.int64)
    return _diagonally_cyclic(images)


def from_first_row(first_row: Sequence[int]) -> LatinSquare:
    """Diagonally cyclic square with the given first row.

    The first row must itself be an orthomorphism image table (as a map
    j -> row[j]), otherwise the result is not Latin and this rejects it.
    """
    row = np.asarray(first_row, dtype=np.int64)
    n = len(row)
    if sorted(row.tolist()) != list(range(n)):
        raise ValueError("first row is not a permutation")
    if sorted(((row - np.arange(n)) % n).tolist()) != list(range(n)):
        raise ValueError("first row is not an orthomorphism image table")
    return _diagonally_cyclic(row)


def _diagonally_cyclic(first_row: np.ndarray) -> LatinSquare:
    n = len(first_row)
    i = np.arange(n, dtype=np.int64)
    cells = (first_row[(i[None, :] - i[:, None]) % n] + i[:, None]) % n
    return LatinSquare(cells)


def nu_four_square(ctx: PrimeContext) -> LatinSquare:
    """The order-p square from the quadratic map (-1, 2).

    Defined whenever -2 is a quadratic residue, i.e. p = 1 or 3 mod 8.
    It is row- and column-Hamiltonian but not symbol-Hamiltonian (so has
    exactly four row-Hamiltonian conjugates), except at p = 3 and p = 19
    where all six conjugates qualify.
    """
    if ctx.p % 8 not in (1, 3):
        raise ValueError(f"order-{ctx.p} family square needs p = 1 or 3 mod 8")
    return from_orthomorphism(QuadraticMap(ctx, -1, 2))


def named_square(spec: str) -> LatinSquare:
    """Build a square from a textual spec.

    Accepted forms:
      Lp:<p>                      family square of order p
      Q:<p>:<a>,<b>               quadratic square from coefficients (a, b)
      C<n>:<p>:<gamma>:<c0,...>   index-n cyclotomic square, pinned gamma
      order21                     the composite order-21 square
    """
    spec = spec.strip()
    if spec == "order21":
        return from_first_row(ORDER21_FIRST_ROW)
    parts = spec.split(":")
    kind = parts[0]
    if kind == "Lp" and len(parts) == 2:
        return nu_four_square(PrimeContext(int(parts[1])))
    if kind == "Q" and len(parts) == 3:
        ctx = PrimeContext(int(parts[1]))
        a, b = (int(v) for v in parts[2].split(","))
        return from_orthomorphism(QuadraticMap(ctx, a, b))
    if kind.startswith("C") and len(parts) == 4:
        index = int(kind[1:])
        ctx = PrimeContext(int(parts[1]))
        gamma = int(parts[2])
        coeffs = [int(v) for v in parts[3].split(",")]
        if len(coeffs) != index:
            raise ValueError(f"expected {index} coefficients, got {len(coeffs)}")
        return from_orthomorphism(CyclotomicMap(ctx, coeffs, gamma))
    raise ValueError(f"unrecognised square spec: {spec!r}")


def _validate_label(label) -> tuple[int, int, int]:
    lab = tuple(label)
    if sorted(lab) != [1, 2, 3]:
        raise ValueError(f"conjugate label must permute (1,2,3), got {label!r}")
    return lab


def compose_labels(first, second) -> tuple[int, int, int]:
    """Label of conjugate(conjugate(L, first), second)."""
    a = _validate_label(first)
    b = _validate_label(second)
    return (a[b[0] - 1], a[b[1] - 1], a[b[2] - 1])


def conjugate(square: LatinSquare, label) -> LatinSquare:
    """Square whose triples are the label-reordered triples of the input."""
    lab = _validate_label(label)
    if lab == (1, 2, 3):
        return square
    n = square.n
    r = np.repeat(np.arange(n, dtype=np.int64), n)
    c = np.tile(np.arange(n, dtype=np.int64), n)
    s = square.cells.ravel()
    coords = (r, c, s)
    out = np.empty((n, n), dtype=np.int64)
    out[coords[lab[0] - 1], coords[lab[1] - 1]] = coords[lab[2] - 1]
    return LatinSquare(out, validate=False)


def row_permutation(square: LatinSquare, i: int, j: int) -> np.ndarray:
    """Permutation of symbols sending row i's entry to row j's per column."""
    if i == j:
        raise ValueError("row permutation needs two distinct rows")
    perm = np.empty(square.n, dtype=np.int64)
    perm[square.cells[i]] = square.cells[j]
    return perm


def column_permutation(square: LatinSquare, i: int, j: int) -> np.ndarray:
    """Permutation of symbols sending column i's entry to column j's per row."""
    if i == j:
        raise ValueError("column permutation needs two distinct columns")
    perm = np.empty(square.n, dtype=np.int64)
    perm[square.cells[:, i]] = square.cells[:, j]
    return perm


def symbol_permutation(square: LatinSquare, i: int, j: int) -> np.ndarray:
    """Permutation of rows sending symbol i's row to symbol j's per column."""
    if i == j:
        raise ValueError("symbol permutation needs two distinct symbols")
    perm = np.empty(square.n, dtype=np.int64)
    ri, ci = np.nonzero(square.cells == i)
    rj, cj = np.nonzero(square.cells == j)
    where_i = np.empty(square.n, dtype=np.int64)
    where_j = np.empty(square.n, dtype=np.int64)
    where_i[ci] = ri
    where_j[cj] = rj
    perm[where_i] = where_j
    return perm


def cycle_structure(perm) -> tuple[int, ...]:
    """Sorted lengths of the disjoint cycles of a permutation of 0..n-1."""
    images = list(perm)
    n = len(images)
    if sorted(images) != list(range(n)):
        raise ValueError("not a permutation of 0..n-1")
    seen = bytearray(n)
    lengths = []
    for start in range(n):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = 1
            x = images[x]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths))


def is_full_cycle(perm) -> bool:
    """True iff the permutation is a single n-cycle."""
    images = perm if isinstance(perm, list) else list(perm)
    n = len(images)
    x = images[0]
    count = 1
    while x != 0:
        x = images[x]
        count += 1
        if count > n:
            raise ValueError("not a permutation")
    return count == n


def is_row_hamiltonian(square: LatinSquare) -> bool:
    """Every pair of rows induces a single n-cycle; bails on first failure.

    Pairs (i, j) are visited in lexicographic order so timing is
    reproducible; r(j,i) is the inverse of r(i,j) and is skipped.
    """
    rows = square.row_lists()
    invs = square.inverse_rows()
    n = square.n
    for i in range(n):
        inv_i = invs[i]
        for j in range(i + 1, n):
            row_j = rows[j]
            # walk r = row_j o inverse(row_i) starting at symbol 0
            x = row_j[inv_i[0]]
            count = 1
            while x != 0:
                x = row_j[inv_i[x]]
                count += 1
            if count != n:
                return False
    return True


def nu(square: LatinSquare, fast: bool = True) -> int:
    """Number of the six conjugates that are row-Hamiltonian.

    A square is row-Hamiltonian iff its (1,3,2)-conjugate is, which pairs
    the six labels; the fast path tests one label per pair and doubles.
    The count is over labels, so coincident conjugates count separately.
    """
    if fast:
        reps = ((1, 2, 3), (2, 1, 3), (3, 2, 1))
        return 2 * sum(is_row_hamiltonian(conjugate(square, lab)) for lab in reps)
    return sum(is_row_hamiltonian(conjugate(square, lab)) for lab in CONJUGATE_LABELS)


# ---------------------------------------------------------------------------
# Fast exact predicates for squares generated by quadratic maps.
#
# The translation x -> x+1 and the scalings x -> dx are automorphisms or
# isomorphisms between quadratic squares, so every row permutation of
# L[a,b] shares its cycle structure with r(0,1) of L[a,b] (differences in
# the residue class) or with r(0,1) of L[b,a] (non-residue differences;
# only distinct when p = 1 mod 4).  The same holds per line type, which
# turns each Hamiltonicity test into O(p) work instead of O(p^3).
# ---------------------------------------------------------------------------


def _require_valid_pair(ctx: PrimeContext, a: int, b: int):
    from .orthomorphism import is_quadratic_orthomorphism_pair

    if not is_quadratic_orthomorphism_pair(ctx, a, b):
        raise ValueError(f"({a},{b}) is not an orthomorphism pair mod {ctx.p}")


def _r01_perm(ctx: PrimeContext, a: int, b: int) -> np.ndarray:
    """r(0,1) of the quadratic square for (a, b): j -> m(m^-1(j) - 1) + 1."""
    p = ctx.p
    f = QuadraticMap(ctx, a, b).as_array()
    finv = np.empty(p, dtype=np.int64)
    finv[f] = np.arange(p)
    return (f[(finv - 1) % p] + 1) % p


def _s01_perm(ctx: PrimeContext, a: int, b: int, c: int = 1) -> np.ndarray:
    """Symbol permutation between symbols 0 and c of the (a, b) square.

    Row of symbol s in column k is k - g^-1(s - k) where g(x) = m(x) - x,
    which is a bijection exactly because m is an orthomorphism.
    """
    p = ctx.p
    f = QuadraticMap(ctx, a, b).as_array()
    k = np.arange(p, dtype=np.int64)
    g = (f - k) % p
    ginv = np.empty(p, dtype=np.int64)
    ginv[g] = k
    rows0 = (k - ginv[(-k) % p]) % p
    rowsc = (k - ginv[(c - k) % p]) % p
    perm = np.empty(p, dtype=np.int64)
    perm[rows0] = rowsc
    return perm


def is_row_hamiltonian_quadratic(ctx: PrimeContext, a: int, b: int) -> bool:
    """Exact O(p) row-Hamiltonicity test for the quadratic square (a, b)."""
    _require_valid_pair(ctx, a, b)
    if not is_full_cycle(_r01_perm(ctx, a, b).tolist()):
        return False
    if ctx.p % 4 == 1:
        return is_full_cycle(_r01_perm(ctx, b, a).tolist())
    return True


def is_symbol_hamiltonian_quadratic(ctx: PrimeContext, a: int, b: int) -> bool:
    """Exact O(p) symbol-Hamiltonicity test for the quadratic square (a, b)."""
    _require_valid_pair(ctx, a, b)
    if not is_full_cycle(_s01_perm(ctx, a, b).tolist()):
        return False
    if ctx.p % 4 == 1:
        return is_full_cycle(_s01_perm(ctx, b, a).tolist())
    return True


def transpose_pair(ctx: PrimeContext, a: int, b: int) -> tuple[int, int]:
    """Coefficients generating the transpose of the (a, b) square."""
    p = ctx.p
    if p % 4 == 1:
        return ((1 - a) % p, (1 - b) % p)
    return ((1 - b) % p, (1 - a) % p)


def nu_quadratic(ctx: PrimeContext, a: int, b: int) -> int:
    """nu of the quadratic square (a, b) via the O(p) per-line-type tests."""
    _require_valid_pair(ctx, a, b)
    ta, tb = transpose_pair(ctx, a, b)
    rh = is_row_hamiltonian_quadratic(ctx, a, b)
    ch = is_row_hamiltonian_quadratic(ctx, ta, tb)
    sh = is_symbol_hamiltonian_quadratic(ctx, a, b)
    return 2 * (rh + ch + sh)
