"""Link relation matrices over GF(2) and the three-stage index reduction.

A product of transpositions followed by the rotation x -> x+1 is a full
cycle exactly when the associated link relation matrix is non-singular
over GF(2).  For the families built here the matrix entries collapse to
comparisons of canonical representatives, and a sequence of
determinant-preserving deletions shrinks the index set from Z_p^* down
to two elements whose 2x2 matrix is visibly non-singular.

Every structural fact the reduction relies on is asserted at run time;
a violation raises ReductionInvariantError carrying the step index and
the full trace, since silent divergence is the failure mode that
matters.  Cheap assertions are always on; audit mode additionally
recomputes the GF(2) determinant and the row-agreement patterns after
every step, which costs O(p^3) per step and is meant for small p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .latin import is_full_cycle
from .orthomorphism import QuadraticMap
from .zp_core import PrimeContext, anchor_element, case_residue_ok

__all__ = [
    "wedge",
    "LinkMatrix",
    "build_link_matrix",
    "build_link_matrix_generic",
    "principal_submatrix",
    "gf2_determinant",
    "ncycle_by_determinant",
    "product_of_transpositions",
    "product_with_rotation",
    "base_row_permutation",
    "TranspositionFamily",
    "StepRecord",
    "ReductionState",
    "ReductionInvariantError",
    "stage_one",
    "stage_two",
    "stage_three",
    "run_pipeline",
    "PipelineResult",
    "between_count",
]


# ---------------------------------------------------------------------------
# transposition products and the wedge map
# ---------------------------------------------------------------------------


def _check_transposition(t, n: int) -> tuple[int, int]:
    a, b = t
    if not (0 <= a < n and 0 <= b < n) or a == b:
        raise ValueError(f"{t!r} is not a transposition in S_{n}")
    return (a, b)


def product_of_transpositions(transpositions, n: int) -> list[int]:
    """Left-to-right product: result(x) = t_m(...t_2(t_1(x))...)."""
    img = list(range(n))
    pos = list(range(n))
    for t in transpositions:
        a, b = _check_transposition(t, n)
        ia, ib = pos[a], pos[b]
        img[ia], img[ib] = b, a
        pos[a], pos[b] = ib, ia
    return img


def product_with_rotation(transpositions, n: int) -> list[int]:
    """The same product followed by the rotation x -> x+1 mod n."""
    return [(v + 1) % n for v in product_of_transpositions(transpositions, n)]


def wedge(alpha, beta, n: int) -> int:
    """1 if alpha * beta * rotation is an n-cycle, else 0 (literal test)."""
    return 1 if is_full_cycle(product_with_rotation([alpha, beta], n)) else 0


# ---------------------------------------------------------------------------
# packed GF(2) matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinkMatrix:
    """Symmetric hollow GF(2) matrix with bit-packed rows.

    Bit c of rows[r] is the entry in row r, column c; labels name the
    rows/columns (the surviving index set, in ascending order).
    """

    labels: tuple[int, ...]
    rows: tuple[int, ...]

    @property
    def dimension(self) -> int:
        return len(self.labels)

    def entry(self, r: int, c: int) -> int:
        return (self.rows[r] >> c) & 1

    def to_lists(self) -> list[list[int]]:
        m = self.dimension
        return [[(row >> c) & 1 for c in range(m)] for row in self.rows]

    def grid(self) -> str:
        return "\n".join(" ".join(str(v) for v in row) for row in self.to_lists())

    def determinant(self) -> int:
        return _det_packed(list(self.rows), self.dimension)


def _pack_bool_rows(mat: np.ndarray) -> tuple[int, ...]:
    if mat.size == 0:
        return ()
    packed = np.packbits(mat.astype(np.uint8), axis=1, bitorder="little")
    return tuple(int.from_bytes(row.tobytes(), "little") for row in packed)


def _matrix_from_targets(targets: np.ndarray, labels: Sequence[int]) -> LinkMatrix:
    """Comparator form: entry (r, c) with r < c is [t_labels[r] < t_labels[c]]."""
    lab = np.asarray(sorted(labels), dtype=np.int64)
    av = targets[lab]
    cmp = av[:, None] < av[None, :]
    upper = np.triu(cmp, 1)
    full = upper | upper.T
    return LinkMatrix(tuple(int(x) for x in lab), _pack_bool_rows(full))


def build_link_matrix_generic(transpositions, n: int, labels=None) -> LinkMatrix:
    """Link relation matrix straight from the definition of the wedge map.

    The diagonal is pinned to 0 by definition; off-diagonal entries come
    from pairwise wedge evaluations.
    """
    ts = [_check_transposition(t, n) for t in transpositions]
    m = len(ts)
    mat = np.zeros((m, m), dtype=bool)
    for i in range(m):
        for j in range(i + 1, m):
            mat[i, j] = mat[j, i] = bool(wedge(ts[i], ts[j], n))
    if labels is None:
        labels = tuple(range(1, m + 1))
    return LinkMatrix(tuple(labels), _pack_bool_rows(mat))


def principal_submatrix(matrix: LinkMatrix, labels) -> LinkMatrix:
    """Rows and columns restricted to the given labels, order preserved."""
    wanted = sorted(set(labels))
    index = {lab: pos for pos, lab in enumerate(matrix.labels)}
    try:
        positions = [index[lab] for lab in wanted]
    except KeyError as exc:
        raise ValueError(f"label {exc.args[0]} not present in matrix") from None
    rows = []
    for rp in positions:
        packed = 0
        src = matrix.rows[rp]
        for out_c, cp in enumerate(positions):
            packed |= ((src >> cp) & 1) << out_c
        rows.append(packed)
    return LinkMatrix(tuple(wanted), tuple(rows))


def _det_packed(rows: list[int], m: int) -> int:
    """Determinant over GF(2) by column-pivot elimination on packed rows."""
    for col in range(m):
        pivot = None
        for r in range(col, m):
            if (rows[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            return 0
        rows[col], rows[pivot] = rows[pivot], rows[col]
        piv_row = rows[col]
        for r in range(col + 1, m):
            if (rows[r] >> col) & 1:
                rows[r] ^= piv_row
    return 1


def gf2_determinant(matrix: LinkMatrix) -> int:
    """Determinant over GF(2); the empty matrix has determinant 1."""
    return matrix.determinant()


def ncycle_by_determinant(transpositions, n: int) -> bool:
    """Decide whether the product with the rotation is an n-cycle via the
    non-singularity of the link relation matrix."""
    return build_link_matrix_generic(transpositions, n).determinant() == 1


# ---------------------------------------------------------------------------
# the reduction families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TranspositionFamily:
    """The indexed transpositions (0, t_i) whose product-with-rotation is a
    row permutation of a quadratic square.

    ``scaled`` marks the class whose targets are -2i (the residues in
    cases 1 and 2, the non-residues in case 3); everything else keeps
    target i.  Entry 0 of both arrays is unused padding.
    """

    ctx: PrimeContext
    case: int
    scaled: np.ndarray
    targets: np.ndarray

    @classmethod
    def for_case(cls, ctx: PrimeContext, case: int) -> "TranspositionFamily":
        if not case_residue_ok(ctx, case):
            raise ValueError(f"case {case} inconsistent with p={ctx.p} (p mod 8 = {ctx.p % 8})")
        p = ctx.p
        if case in (1, 2):
            scaled = ctx.residue_table == 1
        else:
            scaled = ctx.residue_table == -1
        i = np.arange(p, dtype=np.int64)
        targets = np.where(scaled, (-2 * i) % p, i)
        targets[0] = 0
        scaled = scaled.copy()
        scaled[0] = False
        scaled.setflags(write=False)
        targets.setflags(write=False)
        return cls(ctx, case, scaled, targets)

    @property
    def anchor(self) -> int:
        """Least element of the scaled class; survives the whole pipeline."""
        return anchor_element(self.ctx, self.case)

    def transpositions(self) -> list[tuple[int, int]]:
        return [(0, int(self.targets[i])) for i in range(1, self.ctx.p)]

    def matrix(self) -> LinkMatrix:
        return _matrix_from_targets(self.targets, range(1, self.ctx.p))

    def unscaled_runs(self) -> list[tuple[int, int]]:
        """Maximal runs of consecutive unscaled elements as (start, length)."""
        runs = []
        z = 1
        p = self.ctx.p
        while z < p:
            if not self.scaled[z]:
                start = z
                while z < p and not self.scaled[z]:
                    z += 1
                runs.append((start, z - start))
            else:
                z += 1
        return runs

    def run_lengths(self) -> np.ndarray:
        """run_lengths()[z] = length of the unscaled run containing z, else 0."""
        out = np.zeros(self.ctx.p, dtype=np.int64)
        for start, length in self.unscaled_runs():
            out[start : start + length] = length
        return out


def build_link_matrix(family: TranspositionFamily) -> LinkMatrix:
    """The full (p-1) x (p-1) matrix in comparator form.

    Agrees entry-for-entry with the generic wedge construction on the
    family's transpositions; the comparator form is O(p^2) bit work.
    """
    return family.matrix()


def base_row_permutation(ctx: PrimeContext) -> np.ndarray:
    """The permutation between rows 0 and 1 of the order-p family square,
    assembled from the generating map m as j -> m(m^-1(j) - 1) + 1."""
    if ctx.p % 8 not in (1, 3):
        raise ValueError(f"family square needs p = 1 or 3 mod 8, got p = {ctx.p}")
    p = ctx.p
    f = QuadraticMap(ctx, -1, 2).as_array()
    finv = np.empty(p, dtype=np.int64)
    finv[f] = np.arange(p)
    return (f[(finv - 1) % p] + 1) % p


# ---------------------------------------------------------------------------
# reduction state and the two deletion moves
# ---------------------------------------------------------------------------


class ReductionInvariantError(RuntimeError):
    """A structural fact the reduction relies on failed to hold.

    Carries the offending step index and the full trace so the failure
    can be replayed offline.
    """

    def __init__(self, message: str, step_index: int, trace: list["StepRecord"]):
        super().__init__(message)
        self.step_index = step_index
        self.trace = list(trace)

    def trace_text(self) -> str:
        return "\n".join(rec.line() for rec in self.trace)


class StepRecord(NamedTuple):
    index: int
    rtype: int
    on: tuple[int, int]
    deleted: tuple[int, int]
    size_after: int

    def line(self) -> str:
        return "step=%d type=%d on=(%d,%d) deleted=(%d,%d) |I|=%d" % (
            self.index,
            self.rtype,
            self.on[0],
            self.on[1],
            self.deleted[0],
            self.deleted[1],
            self.size_after,
        )


class ReductionState:
    """Active index set plus an append-only trace of performed reductions.

    Both deletion moves check their definitional preconditions before
    touching the set, so any trace this object accumulates is a genuine
    chain of determinant-preserving reductions.
    """

    def __init__(self, family: TranspositionFamily, audit: bool = False):
        self.family = family
        p = family.ctx.p
        self.active = np.ones(p, dtype=bool)
        self.active[0] = False
        self.size = p - 1
        self.trace: list[StepRecord] = []
        self.stage_sets: dict[int, list[int]] = {}
        self.stage_steps: dict[int, int] = {}
        self.audit = audit
        self._audit_det = self.determinant() if audit else None

    # -- queries ------------------------------------------------------------

    def members(self) -> list[int]:
        return np.nonzero(self.active)[0].tolist()

    def __contains__(self, i: int) -> bool:
        return bool(self.active[i])

    def min_member(self) -> int:
        return int(np.argmax(self.active))

    def max_member(self) -> int:
        return int(len(self.active) - 1 - np.argmax(self.active[::-1]))

    def next_member(self, i: int):
        """Smallest active element > i, or None."""
        tail = self.active[i + 1 :]
        if not tail.any():
            return None
        return int(i + 1 + np.argmax(tail))

    def snap_down(self, v: int):
        """Largest active element <= v, or None."""
        head = self.active[: v + 1]
        if not head.any():
            return None
        return int(v - np.argmax(head[::-1]))

    def snap_up(self, v: int):
        tail = self.active[v:]
        if not tail.any():
            return None
        return int(v + np.argmax(tail))

    def between_set(self, i: int, j: int) -> list[int]:
        """Active k whose target lies strictly between the targets of i, j."""
        t = self.family.targets
        lo, hi = sorted((int(t[i]), int(t[j])))
        mask = self.active & (t > lo) & (t < hi)
        return np.nonzero(mask)[0].tolist()

    def matrix(self) -> LinkMatrix:
        return _matrix_from_targets(self.family.targets, self.members())

    def determinant(self) -> int:
        return self.matrix().determinant()

    def trace_text(self) -> str:
        return "\n".join(rec.line() for rec in self.trace)

    def mark_stage(self, stage: int):
        self.stage_sets[stage] = self.members()
        self.stage_steps[stage] = len(self.trace)

    def stage_matrix(self, stage: int) -> LinkMatrix:
        return _matrix_from_targets(self.family.targets, self.stage_sets[stage])

    # -- invariant plumbing ---------------------------------------------------

    def _require(self, cond: bool, message: str):
        if not cond:
            raise ReductionInvariantError(
                f"{message} [p={self.family.ctx.p} case={self.family.case} "
                f"step={len(self.trace) + 1}]",
                len(self.trace) + 1,
                self.trace,
            )

    def _row_bits(self, i: int, labels: np.ndarray) -> np.ndarray:
        """Row of the current matrix for label i, as bools over ``labels``."""
        t = self.family.targets
        ti = int(t[i])
        av = t[labels]
        bits = np.where(labels < i, av < ti, ti < av)
        bits[labels == i] = False
        return bits

    def _audit_pre_type_one(self, i: int):
        labels = np.asarray(self.members())
        ri = self._row_bits(i, labels)
        rj = self._row_bits(i + 1, labels)
        off = (labels != i) & (labels != i + 1)
        self._require(bool(np.array_equal(ri[off], rj[off])), f"type-one rows {i},{i + 1} differ off the pair")
        self._require(bool(ri[labels == i + 1][0]), f"type-one entry ({i},{i + 1}) is not 1")

    def _audit_pre_type_two(self, i: int, j: int, k: int):
        labels = np.asarray(self.members())
        ri = self._row_bits(i, labels)
        rj = self._row_bits(j, labels)
        off = labels != k
        self._require(bool(np.array_equal(ri[off], rj[off])), f"type-two rows {i},{j} differ off column {k}")
        self._require(not bool(ri[labels == j][0]), f"type-two entry ({i},{j}) is not 0")
        ik = bool(ri[labels == k][0])
        jk = bool(rj[labels == k][0])
        if k < i:
            self._require(ik and not jk, f"type-two column {k} pattern wrong for k < {i} < {j}")
        else:
            self._require(jk and not ik, f"type-two column {k} pattern wrong for k > {j} > {i}")

    def _audit_post(self):
        det = self.determinant()
        self._require(det == self._audit_det, f"determinant changed to {det} after step {len(self.trace)}")

    def _delete(self, rtype: int, on: tuple[int, int], dead: tuple[int, int]):
        u, v = sorted(dead)
        self.active[u] = False
        self.active[v] = False
        self.size -= 2
        self.trace.append(StepRecord(len(self.trace) + 1, rtype, on, (u, v), self.size))
        if self.audit:
            self._audit_post()

    # -- the two moves --------------------------------------------------------

    def apply_type_one(self, i: int) -> tuple[int, int]:
        """Delete the consecutive unscaled pair {i, i+1}."""
        fam = self.family
        self._require(bool(self.active[i]) and bool(self.active[i + 1]), f"type-one pair {i},{i + 1} not active")
        self._require(not fam.scaled[i] and not fam.scaled[i + 1], f"type-one pair {i},{i + 1} not both unscaled")
        if self.audit:
            self._audit_pre_type_one(i)
        self._delete(1, (i, i + 1), (i, i + 1))
        return (i, i + 1)

    def apply_type_two(self, i: int, j: int) -> tuple[int, int]:
        """Delete one endpoint of the adjacent scaled pair (i, j) together
        with the unique element lying between their targets."""
        fam = self.family
        h = fam.ctx.half
        self._require(i < j, f"type-two needs i < j, got ({i},{j})")
        self._require(bool(self.active[i]) and bool(self.active[j]), f"type-two pair {i},{j} not active")
        self._require(bool(fam.scaled[i]) and bool(fam.scaled[j]), f"type-two pair {i},{j} not both scaled")
        self._require(j <= h or i > h, f"type-two pair {i},{j} straddles the midpoint {h}")
        gap = self.active[i + 1 : j]
        self._require(not gap.any(), f"type-two pair {i},{j} not adjacent in the active set")
        between = self.between_set(i, j)
        self._require(len(between) == 1, f"between-set of ({i},{j}) is {between}, expected a single element")
        k = between[0]
        if self.audit:
            self._audit_pre_type_two(i, j, k)
        dead = (i, k) if k < i else (j, k)
        self._delete(2, (i, j), dead)
        return tuple(sorted(dead))


def between_count(state: ReductionState, i: int, j: int) -> int:
    """Size of the between-set of an eligible scaled pair; always odd on
    states reachable by the pipeline's reductions."""
    fam = state.family
    h = fam.ctx.half
    if not (state.active[i] and state.active[j]):
        raise ValueError(f"{i} and {j} must both be active")
    if not (fam.scaled[i] and fam.scaled[j]):
        raise ValueError(f"{i} and {j} must both be in the scaled class")
    lo, hi = min(i, j), max(i, j)
    if not (hi <= h or lo > h):
        raise ValueError(f"pair ({i},{j}) must lie on one side of the midpoint {h}")
    count = len(state.between_set(i, j))
    state._require(count % 2 == 1, f"between-set of ({i},{j}) has even size {count}")
    return count


# ---------------------------------------------------------------------------
# the three stages
# ---------------------------------------------------------------------------


def stage_one(state: ReductionState) -> ReductionState:
    """Delete consecutive unscaled pairs from the top of each run.

    Runs of even length vanish entirely; odd runs keep their first
    element.  Afterwards the extremes of the active set are the anchor
    and its mirror p - anchor.
    """
    fam = state.family
    state._require(len(state.trace) == 0, "stage one must start from the full index set")
    for start, length in fam.unscaled_runs():
        lam = length - 1
        for theta in range(1, lam + 1, 2):
            state.apply_type_one(start + lam - theta)
    state.mark_stage(1)
    p, anchor = fam.ctx.p, fam.anchor
    state._require(state.min_member() == anchor, f"min after stage one is {state.min_member()}, expected {anchor}")
    state._require(
        state.max_member() == p - anchor,
        f"max after stage one is {state.max_member()}, expected {p - anchor}",
    )
    for start, length in fam.unscaled_runs():
        for z in range(start, start + length):
            should_survive = (length % 2 == 1) and z == start
            state._require(
                bool(state.active[z]) == should_survive,
                f"run membership rule violated at {z} (run start {start}, length {length})",
            )
    return state


def stage_two(state: ReductionState) -> ReductionState:
    """Clear the remaining unscaled elements (except p-1 in case 1).

    Each surviving unscaled element is the first member of an odd run;
    processing them by increasing run length, its two scaled shadows
    -(run edges)/2 snap to active neighbours forming an adjacent scaled
    pair whose between-set is exactly the element being removed.
    """
    fam = state.family
    ctx = fam.ctx
    p, h, anchor = ctx.p, ctx.half, fam.anchor
    state._require(1 in state.stage_steps, "stage two requires stage one output")
    lengths = fam.run_lengths()
    ell = int(lengths.max()) if lengths.size else 0
    runs = fam.unscaled_runs()
    for alpha in range(1, ell + 1, 2):
        for beta, length in runs:
            if length != alpha or beta == p - 1:
                continue
            state._require(bool(state.active[beta]), f"odd-run head {beta} inactive before its own step")
            state._require(bool(state.active[anchor]), "anchor deleted during stage two")
            state._require(bool(state.active[p - anchor]), "mirror anchor deleted during stage two")
            g1 = (h * (beta - 1)) % p
            g2 = (h * (beta + alpha)) % p
            gamma1, gamma2 = min(g1, g2), max(g1, g2)
            state._require(
                bool(fam.scaled[gamma1]) and bool(fam.scaled[gamma2]),
                f"shadows {gamma1},{gamma2} of {beta} not both scaled",
            )
            state._require(
                gamma2 <= h or gamma1 > h,
                f"shadows {gamma1},{gamma2} of {beta} straddle the midpoint",
            )
            for k in range(gamma1 + 1, gamma2):
                state._require(not fam.scaled[k], f"gap element {k} is scaled")
                state._require(int(lengths[k]) < alpha, f"gap element {k} has run length {lengths[k]} >= {alpha}")
                state._require(not state.active[k], f"gap element {k} still active")
            gamma0 = state.snap_down(gamma1)
            gamma3 = state.snap_up(gamma2)
            state._require(gamma0 is not None, f"no active element <= {gamma1}")
            state._require(gamma3 is not None, f"no active element >= {gamma2}")
            between = state.between_set(gamma0, gamma3)
            state._require(between == [beta], f"between-set of ({gamma0},{gamma3}) is {between}, expected [{beta}]")
            expected = (beta, gamma0) if beta < gamma0 else (beta, gamma3)
            deleted = state.apply_type_two(gamma0, gamma3)
            state._require(
                deleted == tuple(sorted(expected)),
                f"deleted {deleted}, expected {tuple(sorted(expected))}",
            )
    state.mark_stage(2)
    for z in state.members():
        if z != p - 1:
            state._require(bool(fam.scaled[z]), f"unscaled element {z} survived stage two")
    if fam.case in (2, 3):
        state._require(bool(state.active[(p + anchor) // 2]), "half-anchor deleted before stage three")
    return state


def stage_three(state: ReductionState) -> ReductionState:
    """Collapse the active set to two elements.

    Repeatedly removes the neighbour of the anchor together with the
    single element between their targets; terminates at {1, p-1} in
    case 1 and {anchor, (p+anchor)/2} in cases 2 and 3, whose matrix is
    the non-singular [[0,1],[1,0]].
    """
    fam = state.family
    ctx = fam.ctx
    p, h, anchor = ctx.p, ctx.half, fam.anchor
    state._require(2 in state.stage_steps, "stage three requires stage two output")
    while state.size > 2:
        state._require(state.min_member() == anchor, "anchor is no longer the minimum")
        delta = state.next_member(anchor)
        state._require(delta is not None, "active set exhausted early")
        state._require(delta <= h, f"anchor neighbour {delta} exceeds the midpoint {h}")
        between = state.between_set(anchor, delta)
        state._require(len(between) == 1, f"between-set of ({anchor},{delta}) is {between}")
        omega = between[0]
        deleted = state.apply_type_two(anchor, delta)
        state._require(deleted == tuple(sorted((delta, omega))), f"stage three deleted {deleted}")
    state.mark_stage(3)
    final = state.members()
    if fam.case == 1:
        state._require(final == [1, p - 1], f"terminal set {final}, expected [1, {p - 1}]")
    else:
        expect = sorted((anchor, (p + anchor) // 2))
        state._require(final == expect, f"terminal set {final}, expected {expect}")
    state._require(
        state.matrix().to_lists() == [[0, 1], [1, 0]],
        "terminal matrix is not [[0,1],[1,0]]",
    )
    state._require(
        len(state.trace) == h - 1,
        f"pipeline performed {len(state.trace)} steps, expected {h - 1}",
    )
    return state


@dataclass(frozen=True)
class PipelineResult:
    nonsingular: bool
    state: ReductionState

    @property
    def steps(self) -> int:
        return len(self.state.trace)


def run_pipeline(ctx: PrimeContext, case: int, audit: bool = False) -> PipelineResult:
    """Run the three reduction stages and report non-singularity.

    With ``audit`` on, the GF(2) determinant of the active principal
    submatrix is recomputed after every deletion and must never change,
    and the row-agreement pattern justifying each deletion is checked
    first.  That costs O(p^3) per step, so gate it to small p.
    """
    if ctx.p <= 3:
        raise ValueError("pipeline requires p > 3")
    family = TranspositionFamily.for_case(ctx, case)
    state = ReductionState(family, audit=audit)
    stage_one(state)
    stage_two(state)
    stage_three(state)
    nonsingular = state.matrix().determinant() == 1
    state._require(nonsingular, "terminal matrix is singular")
    return PipelineResult(nonsingular=nonsingular, state=state)
