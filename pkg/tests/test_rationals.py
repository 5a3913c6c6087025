from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from sympy import isprime, primerange

from kloc.errors import EffortExceeded, EvenIndex, OutOfTheoremScope
from kloc.rationals import (bernoulli_mod_p, eigenspace_nontrivial, irregular_indices, splits_q,
                            splits_q_detail)

from oracles import bernoulli_exact, irregular_indices_power_sums

ODD_PRIMES = list(primerange(3, 200))


def test_examples():
    assert all(splits_q(p, i) for p in (3, 5, 7, 11, 13) for i in range(1, p))
    assert [i for i in range(1, 37) if not splits_q(37, i)] == [31]
    d = splits_q_detail(37, 31)
    assert d.eigen_index == 5 and d.bernoulli_index == 32 and d.route == "herbrand-ribet"


def test_691_has_two_irregular_indices():
    assert irregular_indices(691) == {12, 200}
    assert [i for i in range(1, 691) if not splits_q(691, i)] == [11, 199]


def test_errors():
    with pytest.raises(OutOfTheoremScope):
        splits_q(2, 1)
    with pytest.raises(ValueError):
        splits_q(5, 0)
    with pytest.raises(ValueError):
        bernoulli_mod_p(9)
    with pytest.raises(EvenIndex):
        eigenspace_nontrivial(37, 4)


def test_beyond_vandiver_range_is_effort_error(monkeypatch):
    import kloc.rationals as r
    monkeypatch.setattr(r, "VANDIVER_VERIFIED_BELOW", 30)
    # i = 4: j = 32 is even and reflects to the irregular odd index 1 - j = 5
    with pytest.raises(EffortExceeded):
        r.splits_q_detail(37, 4)
    # no effort error when the reflected eigenspace is trivial
    assert r.splits_q_detail(37, 2).splits


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_bernoulli_table_matches_exact(p):
    t = bernoulli_mod_p(p)
    for k, v in t.values.items():
        b = bernoulli_exact(k)
        assert (b.numerator * pow(b.denominator, -1, p) - v) % p == 0


def test_bernoulli_exact_small_oracle_values():
    assert bernoulli_exact(2) == Fraction(1, 6)
    assert bernoulli_exact(12) == Fraction(-691, 2730)


def test_irregular_indices_match_power_sum_oracle():
    for p in ODD_PRIMES:
        assert irregular_indices(p) == irregular_indices_power_sums(p), p


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(ODD_PRIMES), st.integers(1, 10 ** 6))
def test_periodic_in_i(p, i):
    assert splits_q(p, i) == splits_q(p, (i - 1) % (p - 1) + 1)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(ODD_PRIMES), st.integers(1, 10 ** 6))
def test_nonsplit_iff_irregular_index(p, i):
    d = splits_q_detail(p, i)
    if not d.splits:
        assert d.eigen_index % 2 == 1
        assert d.bernoulli_index == p - d.eigen_index in irregular_indices(p)
    if not irregular_indices(p):
        assert d.splits


def test_regular_primes_split_everywhere():
    for p in ODD_PRIMES:
        if not irregular_indices(p):
            assert all(splits_q(p, i) for i in range(1, p)), p
    assert isprime(37) and irregular_indices(37) == {32}


def test_table_examples():
    assert bernoulli_mod_p(5)[2] == 1
    assert bernoulli_mod_p(7)[4] == 3
    assert bernoulli_mod_p(691)[12] == 0
    assert irregular_indices(13) == set()
    assert irregular_indices(157) == {62, 110}
    assert eigenspace_nontrivial(37, 5)
    assert eigenspace_nontrivial(691, 679)
    assert not any(eigenspace_nontrivial(5, j) for j in (1, 3))
    assert splits_q(37, 1)
    t = bernoulli_mod_p(101)
    assert all(k % 2 == 0 and 2 <= k <= 98 and 0 <= v < 101 for k, v in t.values.items())
