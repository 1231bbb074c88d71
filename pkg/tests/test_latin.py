import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_square
from rowham.latin import (
    CONJUGATE_LABELS,
    LatinSquare,
    column_permutation,
    compose_labels,
    conjugate,
    cycle_structure,
    from_first_row,
    from_orthomorphism,
    is_full_cycle,
    is_row_hamiltonian,
    is_row_hamiltonian_quadratic,
    is_symbol_hamiltonian_quadratic,
    named_square,
    nu,
    nu_four_square,
    nu_quadratic,
    row_permutation,
    symbol_permutation,
    transpose_pair,
)
from rowham.orthomorphism import QuadraticMap, is_quadratic_orthomorphism_pair
from rowham.zp_core import PrimeContext, _is_prime


def cyclic_square(n):
    i = np.arange(n)
    return LatinSquare((i[:, None] + i[None, :]) % n)


def valid_pairs_list(ctx):
    return [
        (a, b)
        for a in range(1, ctx.p)
        for b in range(1, ctx.p)
        if is_quadratic_orthomorphism_pair(ctx, a, b)
    ]


# --- construction ---------------------------------------------------------


def test_family_square_first_row():
    sq = nu_four_square(PrimeContext(11))
    assert sq.cells[0].tolist() == [0, 10, 4, 8, 7, 6, 1, 3, 5, 2, 9]
    assert sq[1, 2] == 0  # diagonal shift of the 10 at (0, 1)


def test_from_orthomorphism_rejects_non_orthomorphism():
    with pytest.raises(ValueError):
        from_orthomorphism(QuadraticMap(PrimeContext(11), 1, 1))


def test_family_square_needs_right_residue_class():
    with pytest.raises(ValueError):
        nu_four_square(PrimeContext(13))
    with pytest.raises(ValueError):
        named_square("Lp:13")


def test_from_first_row_validation():
    with pytest.raises(ValueError):
        from_first_row([0, 1, 2])  # identity is no orthomorphism image
    with pytest.raises(ValueError):
        from_first_row([0, 0, 1])


def test_named_square_specs():
    assert named_square("Lp:11") == from_orthomorphism(QuadraticMap(PrimeContext(11), -1, 2))
    assert named_square("Q:17:14,10").n == 17
    assert named_square("C6:19:2:3,14,8,7,11,14").n == 19
    assert named_square("order21").n == 21
    for bad in ("Lp", "Q:11", "C6:19:2:3,14", "what:3", "order22"):
        with pytest.raises(ValueError):
            named_square(bad)


def test_latin_invariant_enforced():
    with pytest.raises(ValueError):
        LatinSquare([[0, 1], [0, 1]])
    with pytest.raises(ValueError):
        LatinSquare([[0, 1, 2], [1, 2, 0]])


def test_square_file_roundtrip():
    sq = nu_four_square(PrimeContext(11))
    assert LatinSquare.from_text(sq.to_text()) == sq
    assert sq.to_text().splitlines()[0] == "order 11"
    with pytest.raises(ValueError):
        LatinSquare.from_text("size 3\n0 1 2\n1 2 0\n2 0 1\n")


# --- conjugates -----------------------------------------------------------


def test_conjugate_examples():
    sq = nu_four_square(PrimeContext(11))
    assert conjugate(sq, (1, 2, 3)) == sq
    assert conjugate(sq, (2, 1, 3)) == LatinSquare(sq.cells.T)
    third = conjugate(conjugate(conjugate(sq, (2, 3, 1)), (2, 3, 1)), (2, 3, 1))
    assert third == sq
    with pytest.raises(ValueError):
        conjugate(sq, (1, 1, 3))


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 9), st.integers(0, 10**6), st.sampled_from(CONJUGATE_LABELS), st.sampled_from(CONJUGATE_LABELS))
def test_conjugate_composition_law(n, seed, first, second):
    sq = random_square(n, seed)
    assert conjugate(conjugate(sq, first), second) == conjugate(sq, compose_labels(first, second))


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 12), st.integers(0, 10**6))
def test_line_permutations_match_conjugates(n, seed):
    sq = random_square(n, seed)
    transpose = conjugate(sq, (2, 1, 3))
    sym_conj = conjugate(sq, (3, 2, 1))
    for i, j in ((0, 1), (1, 3), (n - 1, 0)):
        assert np.array_equal(column_permutation(sq, i, j), row_permutation(transpose, i, j))
        assert np.array_equal(symbol_permutation(sq, i, j), row_permutation(sym_conj, i, j))


def test_permutation_examples():
    sq17 = nu_four_square(PrimeContext(17))
    s03 = symbol_permutation(sq17, 0, 3)
    assert s03[1] == 11 and s03[11] == 8 and s03[8] == 1
    anomaly = from_orthomorphism(QuadraticMap(PrimeContext(17), 14, 10))
    assert cycle_structure(row_permutation(anomaly, 0, 1)) == (17,)
    assert not is_row_hamiltonian(anomaly)
    for fn in (row_permutation, column_permutation, symbol_permutation):
        with pytest.raises(ValueError):
            fn(sq17, 4, 4)


# --- cycle structure ------------------------------------------------------


def test_cycle_structure_examples():
    assert cycle_structure(range(5)) == (1, 1, 1, 1, 1)
    assert cycle_structure([1, 2, 3, 4, 0]) == (5,)
    sq = nu_four_square(PrimeContext(11))
    assert cycle_structure(row_permutation(sq, 0, 1)) == (11,)
    with pytest.raises(ValueError):
        cycle_structure([0, 0, 1])
    assert is_full_cycle([1, 2, 3, 4, 0])
    assert not is_full_cycle([1, 0, 3, 4, 2])


# --- Hamiltonicity and nu -------------------------------------------------


def test_row_hamiltonian_examples():
    assert is_row_hamiltonian(nu_four_square(PrimeContext(11)))
    assert not is_row_hamiltonian(cyclic_square(9))
    assert not is_row_hamiltonian(from_orthomorphism(QuadraticMap(PrimeContext(17), 14, 10)))


def test_nu_examples():
    assert nu(nu_four_square(PrimeContext(3))) == 6
    assert nu(nu_four_square(PrimeContext(11))) == 4
    assert nu(cyclic_square(9)) == 0


@settings(max_examples=20, deadline=None)
@given(st.integers(4, 9), st.integers(0, 10**6))
def test_nu_fast_equals_all_six_labels(n, seed):
    sq = random_square(n, seed)
    assert nu(sq, fast=True) == nu(sq, fast=False)


@pytest.mark.parametrize("p", [p for p in range(3, 32) if _is_prime(p) and p % 8 in (1, 3)])
def test_nu_fast_equals_slow_on_family_squares(p):
    sq = nu_four_square(PrimeContext(p))
    assert nu(sq, fast=True) == nu(sq, fast=False)


def test_fast_quadratic_predicates_examples():
    assert is_row_hamiltonian_quadratic(PrimeContext(11), -1, 2)
    assert not is_row_hamiltonian_quadratic(PrimeContext(17), 14, 10)
    assert is_row_hamiltonian_quadratic(PrimeContext(29), 3, 27)
    with pytest.raises(ValueError):
        is_row_hamiltonian_quadratic(PrimeContext(11), 0, 5)


@pytest.mark.parametrize("p", [p for p in range(3, 32) if _is_prime(p)])
def test_fast_slow_agreement_exhaustive_small(p):
    ctx = PrimeContext(p)
    for a, b in valid_pairs_list(ctx):
        sq = from_orthomorphism(QuadraticMap(ctx, a, b))
        assert is_row_hamiltonian_quadratic(ctx, a, b) == is_row_hamiltonian(sq), (p, a, b)
        sym = all(
            is_full_cycle(symbol_permutation(sq, i, j).tolist())
            for i in range(p)
            for j in range(i + 1, p)
        )
        assert is_symbol_hamiltonian_quadratic(ctx, a, b) == sym, (p, a, b)


@pytest.mark.parametrize("p", [11, 13, 17, 19, 23, 29])
def test_nu_quadratic_agrees_with_generic(p):
    ctx = PrimeContext(p)
    for a, b in valid_pairs_list(ctx):
        sq = from_orthomorphism(QuadraticMap(ctx, a, b))
        assert nu_quadratic(ctx, a, b) == nu(sq), (p, a, b)


def test_transpose_pair_matches_transpose():
    for p in (11, 13, 17, 19):
        ctx = PrimeContext(p)
        for a, b in valid_pairs_list(ctx)[:20]:
            ta, tb = transpose_pair(ctx, a, b)
            lhs = conjugate(from_orthomorphism(QuadraticMap(ctx, a, b)), (2, 1, 3))
            assert lhs == from_orthomorphism(QuadraticMap(ctx, ta, tb)), (p, a, b)


# --- structural laws for diagonally cyclic squares -------------------------


@pytest.mark.parametrize("p", [p for p in range(3, 24) if _is_prime(p)])
def test_odd_cycle_count_exhaustive_small(p):
    ctx = PrimeContext(p)
    for a, b in valid_pairs_list(ctx):
        sq = from_orthomorphism(QuadraticMap(ctx, a, b))
        for i in range(p):
            for j in range(i + 1, p):
                assert len(cycle_structure(row_permutation(sq, i, j))) % 2 == 1


@pytest.mark.parametrize("p", [29, 37, 43, 53, 61])
def test_odd_cycle_count_sampled(p):
    ctx = PrimeContext(p)
    pairs = valid_pairs_list(ctx)
    rng = np.random.default_rng(p)
    for k in rng.choice(len(pairs), size=8, replace=False):
        a, b = pairs[int(k)]
        sq = from_orthomorphism(QuadraticMap(ctx, a, b))
        for i, j in ((0, d) for d in range(1, p)):
            assert len(cycle_structure(row_permutation(sq, i, j))) % 2 == 1


def test_odd_cycle_count_other_constructions():
    for spec in ("order21", "C6:19:2:3,14,8,7,11,14"):
        sq = named_square(spec)
        for j in range(1, sq.n):
            assert len(cycle_structure(row_permutation(sq, 0, j))) % 2 == 1


@pytest.mark.parametrize("p", [p for p in range(5, 44) if _is_prime(p) and p % 4 == 3])
def test_single_structure_when_p_is_3_mod_4(p):
    ctx = PrimeContext(p)
    pairs = valid_pairs_list(ctx)
    sample = pairs if p <= 23 else pairs[:: max(1, len(pairs) // 12)]
    for a, b in sample:
        sq = from_orthomorphism(QuadraticMap(ctx, a, b))
        reference = cycle_structure(row_permutation(sq, 0, 1))
        for i in range(p):
            for j in range(i + 1, p):
                assert cycle_structure(row_permutation(sq, i, j)) == reference


@pytest.mark.parametrize("p", [p for p in range(5, 42) if _is_prime(p) and p % 4 == 1])
def test_at_most_two_structures_when_p_is_1_mod_4(p):
    ctx = PrimeContext(p)
    pairs = valid_pairs_list(ctx)
    sample = pairs if p <= 17 else pairs[:: max(1, len(pairs) // 10)]
    c = next(x for x in range(2, p) if ctx.character(x) == -1)
    for a, b in sample:
        sq = from_orthomorphism(QuadraticMap(ctx, a, b))
        allowed = {
            cycle_structure(row_permutation(sq, 0, 1)),
            cycle_structure(row_permutation(sq, 0, c)),
        }
        structures = {
            cycle_structure(row_permutation(sq, i, j))
            for i in range(p)
            for j in range(i + 1, p)
        }
        assert structures <= allowed, (p, a, b)
