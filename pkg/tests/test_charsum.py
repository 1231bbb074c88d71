import random

import pytest

from rowham.charsum import (
    ZpPolynomial,
    character_sum,
    check_quadratic_identity,
    check_weil_bound,
    q_sum_lower_bound,
    witness_A,
    witness_s0c,
    witness_s0c_table,
)
from rowham.latin import is_full_cycle, nu_four_square, symbol_permutation
from rowham.zp_core import PrimeContext, _is_prime


def test_polynomial_validation():
    ctx = PrimeContext(11)
    with pytest.raises(ValueError):
        ZpPolynomial(ctx, ())
    with pytest.raises(ValueError):
        ZpPolynomial(ctx, (1, 11))  # leading coefficient 0 mod 11
    f = ZpPolynomial(ctx, (0, 1))
    assert f.degree == 1 and f.root_count() == 1


def test_character_sum_examples():
    assert character_sum(ZpPolynomial(PrimeContext(7), (0, 1, 1))) == -1
    ctx = PrimeContext(11)
    assert character_sum(ZpPolynomial(ctx, (3,))) == 11  # 3 is a residue mod 11
    assert character_sum(ZpPolynomial(ctx, (2,))) == -11
    assert character_sum(ZpPolynomial(ctx, (0, 1))) == 0


def test_weil_bound_examples():
    ctx = PrimeContext(11)
    ok, total, slack = check_weil_bound(ZpPolynomial(ctx, (0, 2, -3, 1)))  # x(x-1)(x-2)
    assert ok and slack >= 0
    check = check_weil_bound(ZpPolynomial(PrimeContext(13), (0, -1, 1)))  # x(x-1)
    assert check.ok and check.total == -1
    with pytest.raises(ValueError):
        check_weil_bound(ZpPolynomial(ctx, (0, 0, 1)))  # repeated root
    with pytest.raises(ValueError):
        check_weil_bound(ZpPolynomial(ctx, (5,)))  # degree 0


def test_quadratic_identity_examples():
    assert check_quadratic_identity(PrimeContext(7), 1, 1, 0)
    ctx = PrimeContext(11)
    for a2 in ctx.non_residues():
        assert character_sum(ZpPolynomial(ctx, (3, 1, a2))) in (1, -1)
        if (1 - 12 * a2) % 11:
            assert check_quadratic_identity(ctx, a2, 1, 3)
    with pytest.raises(ValueError):
        check_quadratic_identity(ctx, 0, 1, 1)
    with pytest.raises(ValueError):
        check_quadratic_identity(ctx, 1, 2, 1)  # discriminant 0


@pytest.mark.parametrize("p", [p for p in range(3, 32) if _is_prime(p)])
def test_quadratic_identity_exhaustive_small(p):
    ctx = PrimeContext(p)
    for a2 in range(1, p):
        expected = -ctx.character(a2)
        for a1 in range(p):
            for a0 in range(p):
                if (a1 * a1 - 4 * a0 * a2) % p == 0:
                    continue
                assert character_sum(ZpPolynomial(ctx, (a0, a1, a2))) == expected


def _random_split_poly(rng, ctx, degree):
    """Expand lead * (x - r1)...(x - rd) for distinct random roots.

    Coefficients are kept ascending: multiplying by (x - r) shifts the
    current coefficients up one slot and subtracts r times them.
    """
    roots = rng.sample(range(ctx.p), degree)
    lead = rng.randrange(1, ctx.p)
    poly = [lead]
    for r in roots:
        nxt = [0] * (len(poly) + 1)
        for i, c in enumerate(poly):
            nxt[i + 1] = (nxt[i + 1] + c) % ctx.p
            nxt[i] = (nxt[i] - r * c) % ctx.p
        poly = nxt
    return ZpPolynomial(ctx, poly)


def test_weil_bound_random_sample():
    rng = random.Random(2024)
    primes = [p for p in range(7, 500) if _is_prime(p)]
    for _ in range(500):
        ctx = PrimeContext(rng.choice(primes))
        degree = rng.randint(1, min(5, ctx.p - 1))
        f = _random_split_poly(rng, ctx, degree)
        assert f.degree == degree
        assert check_weil_bound(f).ok


# --- witnesses --------------------------------------------------------------


def test_witness_A_examples():
    assert witness_A(PrimeContext(11)) == 3
    assert witness_A(PrimeContext(19)) is None  # that square is atomic
    assert witness_A(PrimeContext(17)) is None  # below the proven window
    assert witness_A(PrimeContext(41)) is not None
    with pytest.raises(ValueError):
        witness_A(PrimeContext(13))


def test_witness_A_breaks_symbol_permutation():
    ctx = PrimeContext(43)
    x = witness_A(ctx)
    perm = symbol_permutation(nu_four_square(ctx), 0, 1)
    inv2 = ctx.inv(2)
    a, b, c = (x + 1) % 43, (x + 3 * inv2) % 43, (x + inv2) % 43
    assert perm[a] == b and perm[b] == c and perm[c] == a
    assert not is_full_cycle(perm.tolist())


def test_witness_s0c_examples():
    tab = witness_s0c_table(PrimeContext(41))
    assert set(tab) == set(PrimeContext(41).non_residues())
    assert all(x is not None for x in tab.values())
    assert witness_s0c(PrimeContext(41), 3) == tab[3]
    with pytest.raises(ValueError):
        witness_s0c(PrimeContext(11), 2)
    with pytest.raises(ValueError):
        witness_s0c(PrimeContext(41), 4)  # 4 is a residue


def test_witness_s0c_breaks_symbol_permutation():
    ctx = PrimeContext(73)
    tab = witness_s0c_table(ctx)
    sq = nu_four_square(ctx)
    for c in list(tab)[:5]:
        x = tab[c]
        perm = symbol_permutation(sq, 0, c)
        assert perm[x] == (4 * x - c) % 73
        assert not is_full_cycle(perm.tolist())


def test_qsum_examples():
    q11 = q_sum_lower_bound(PrimeContext(11))
    assert (q11.total, q11.witness_count) == (32, 1)
    total, floor = q11
    assert total == 32 and floor == q11.weil_floor
    q1697 = q_sum_lower_bound(PrimeContext(1697))
    assert q1697.weil_floor == 80  # exactly the threshold that forces a witness
    assert q1697.total > 80 and q1697.witness_count >= 1
    with pytest.raises(ValueError):
        q_sum_lower_bound(PrimeContext(13))


@pytest.mark.parametrize("p", [p for p in range(5, 200) if _is_prime(p) and p % 8 in (1, 3)])
def test_qsum_decomposition_holds(p):
    q = q_sum_lower_bound(PrimeContext(p))
    assert q.total == 32 * q.witness_count + sum(q.boundary.values())
    assert len(q.boundary) <= 5


@pytest.mark.slow
def test_witness_A_window():
    present = {11}
    for p in range(20, 1697):
        if _is_prime(p) and p % 8 in (1, 3):
            present.add(p)
    for p in sorted(present):
        assert witness_A(PrimeContext(p)) is not None, p


@pytest.mark.slow
def test_witness_s0c_window():
    for p in range(41, 1658):
        if _is_prime(p) and p % 8 == 1:
            tab = witness_s0c_table(PrimeContext(p))
            missing = [c for c, x in tab.items() if x is None]
            assert not missing, (p, missing)
