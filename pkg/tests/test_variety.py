import math

import pytest

from conftest import random_square
from rowham.latin import (
    LatinSquare,
    column_permutation,
    conjugate,
    cycle_structure,
    nu_four_square,
    row_permutation,
)
from rowham.variety import (
    Loop,
    Quasigroup,
    abelian_group_square,
    anti_associativity_probe,
    cyclic_group_square,
    divides_lcm_below,
    from_square,
    principal_loop_isotope,
    random_loop_square,
    satisfies_variety_identities,
    variety_loop,
)
from rowham.zp_core import PrimeContext, _is_prime


def test_division_tables_for_cyclic_group():
    q = from_square(cyclic_group_square(5))
    for a in range(5):
        for b in range(5):
            assert q.ldiv(a, b) == (b - a) % 5
            assert q.rdiv(a, b) == (a - b) % 5


def test_axioms_hold_for_random_squares():
    for seed in range(5):
        q = from_square(random_square(7, seed))  # constructor asserts the axioms
        q._assert_axioms()


def test_malformed_square_rejected():
    with pytest.raises(ValueError):
        from_square(LatinSquare([[0, 1], [1, 1]]))


def test_loop_identity_validation():
    with pytest.raises(ValueError):
        Loop(cyclic_group_square(5), 2)
    loop = Loop(cyclic_group_square(5), 0)
    assert loop.identity == 0


def test_principal_isotope_identity():
    sq = conjugate(nu_four_square(PrimeContext(11)), (2, 3, 1))
    q = from_square(sq)
    for a, b in ((0, 0), (3, 7), (10, 2)):
        loop = principal_loop_isotope(q, a, b)
        e = loop.identity
        assert e == q.mul(a, b)
        assert all(loop.mul(e, x) == x and loop.mul(x, e) == x for x in range(11))


def test_group_isotope_stays_associative():
    q = from_square(cyclic_group_square(7))
    loop = principal_loop_isotope(q, 2, 5)
    t = loop.mult.cells
    assert all(
        t[t[x, y], z] == t[x, t[y, z]] for x in range(7) for y in range(7) for z in range(7)
    )


def test_translation_quotients_are_line_permutations():
    for seed in (0, 1):
        sq = random_square(8, seed)
        q = from_square(sq)
        for x in range(8):
            for y in range(8):
                if x == y:
                    continue
                left = [q.mul(y, q.ldiv(x, z)) for z in range(8)]
                assert left == row_permutation(sq, x, y).tolist()
                right = [q.mul(q.rdiv(z, x), y) for z in range(8)]
                assert right == column_permutation(sq, x, y).tolist()


def test_divides_lcm_below_examples():
    assert divides_lcm_below(12, 5)
    assert not divides_lcm_below(11, 11)
    assert not divides_lcm_below(8, 7)
    assert divides_lcm_below(1, 3)
    with pytest.raises(ValueError):
        divides_lcm_below(0, 5)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_divides_lcm_below_against_real_lcm(p):
    m = math.lcm(*range(1, p))
    for length in range(1, 200):
        assert divides_lcm_below(length, p) == (m % length == 0), (p, length)


def test_identities_examples():
    assert satisfies_variety_identities(variety_loop(11), 11)
    assert not satisfies_variety_identities(Loop(cyclic_group_square(11), 0), 11)
    assert satisfies_variety_identities(Loop(LatinSquare([[0]]), 0), 11)  # trivial loop
    for k in range(2, 11):
        assert not satisfies_variety_identities(Loop(cyclic_group_square(k), 0), 11)


def test_p19_needs_the_3_13_square():
    assert satisfies_variety_identities(variety_loop(19), 19)
    atomic_based = principal_loop_isotope(
        from_square(conjugate(nu_four_square(PrimeContext(19)), (2, 3, 1)))
    )
    assert not satisfies_variety_identities(atomic_based, 19)


def test_isotopes_share_row_cycle_structures():
    sq = conjugate(nu_four_square(PrimeContext(11)), (2, 3, 1))
    q = from_square(sq)
    def structures(table):
        return sorted(
            cycle_structure(row_permutation(table, i, j))
            for i in range(table.n)
            for j in range(table.n)
            if i != j
        )
    reference = structures(principal_loop_isotope(q, 0, 0).mult)
    for a, b in ((1, 4), (6, 2)):
        assert structures(principal_loop_isotope(q, a, b).mult) == reference


def test_abelian_group_square_shapes():
    sq = abelian_group_square((2, 3))
    assert sq.n == 6
    # isomorphic to Z_6: element (x1, x2) -> x1*3 + x2; order of (1,1) is 6
    loop = Loop(sq, 0)
    x = 1 * 3 + 1
    y, order = x, 1
    while y != 0:
        y = loop.mul(y, x)
        order += 1
    assert order == 6
    klein = abelian_group_square((2, 2))
    assert all(klein.cells[x, x] == 0 for x in range(4))


def test_random_loop_square_is_reduced():
    for n in (5, 7, 10):
        sq = random_loop_square(n, seed=3)
        assert sq.cells[0].tolist() == list(range(n))
        assert sq.cells[:, 0].tolist() == list(range(n))
    assert random_loop_square(7, 1) == random_loop_square(7, 1)


def test_probe_p11():
    report = anti_associativity_probe(11, 10, samples=3)
    assert report.groups_all_fail
    assert report.small_loops_all_fail
    assert report.loops_exhausted_count == 1 + 1 + 4 + 56 + 9408
    assert report.witness_order == 11 and report.witness_passes
    with pytest.raises(ValueError):
        anti_associativity_probe(13, 10)


@pytest.mark.parametrize("p", [p for p in range(5, 44) if _is_prime(p) and p % 8 in (1, 3)])
def test_variety_membership_small(p):
    assert satisfies_variety_identities(variety_loop(p), p)


@pytest.mark.slow
@pytest.mark.parametrize("p", [p for p in range(44, 102) if _is_prime(p) and p % 8 in (1, 3)])
def test_variety_membership_to_101(p):
    assert satisfies_variety_identities(variety_loop(p), p)
