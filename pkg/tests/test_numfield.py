import random
from fractions import Fraction
from functools import reduce

import pytest
from flint import fmpq_poly, fmpz_mat, fmpz_poly
from hypothesis import given, settings, strategies as st

from kloc.errors import DegreeZero, FieldMismatch, NotMonic, PolynomialSyntaxError, Reducible
from kloc.numfield import (
    automorphisms,
    compose_mod,
    factor_rational_prime,
    format_poly,
    ideal_from_generators,
    ideal_mul,
    ideal_norm,
    ideal_pow,
    is_principal,
    new_field,
    parse_poly,
    principal_ideal,
    unit_ideal,
)

CE = "x^6-793*x^3+226981"
SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]


# --- polynomial text ------------------------------------------------------

def test_parse_examples():
    assert parse_poly("x^6-793*x^3+226981") == [226981, 0, 0, -793, 0, 0, 1]
    assert parse_poly(" x ^ 2 + 1 ") == [1, 0, 1]
    assert parse_poly("x") == [0, 1]
    assert parse_poly("3x^2-x+4") == [4, -1, 3]
    assert parse_poly("-x^2+2*x") == [0, 2, -1]
    assert parse_poly("7") == [7]


@pytest.mark.parametrize("bad", ["", "x^", "2**x", "*x", "x+", "x^2+y", "x^-1", "2x3", "++x"])
def test_parse_errors(bad):
    with pytest.raises(PolynomialSyntaxError):
        parse_poly(bad)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=8).filter(lambda c: c[-1] != 0))
def test_format_parse_roundtrip(coeffs):
    assert parse_poly(format_poly(coeffs)) == coeffs


# --- fields ---------------------------------------------------------------

def test_new_field_examples():
    K = new_field("x^2+1")
    assert (K.degree, K.discriminant, K.signature) == (2, -4, (0, 1))
    K = new_field(CE)
    assert (K.degree, K.signature) == (6, (0, 3))
    K = new_field("x^2-x-1")
    assert (K.degree, K.discriminant, K.signature) == (2, 5, (2, 0))


def test_new_field_errors():
    with pytest.raises(NotMonic):
        new_field("2*x^2+1")
    with pytest.raises(Reducible):
        new_field("x^2-1")
    with pytest.raises(Reducible):
        new_field("x^4+2*x^2+1")
    with pytest.raises(DegreeZero):
        new_field("5")


def test_maximal_order_examples():
    K = new_field("x^2+3")
    assert K.integral_basis == [[1, 0], [Fraction(1, 2), Fraction(1, 2)]]
    assert K.index == 2 and K.discriminant == -3
    K = new_field("x^2+1")
    assert K.integral_basis == [[1, 0], [0, 1]] and K.index == 1
    K = new_field("x^2-x-1")
    assert K.index == 1


def test_example_ce_discriminant():
    K = new_field(CE)
    # field discriminant -3^9 61^4, index 5^3 61^4
    assert K.discriminant == -(3 ** 9) * 61 ** 4
    assert K.index == 5 ** 3 * 61 ** 4


def random_irreducible(rng, max_deg=5, bound=12):
    while True:
        n = rng.randint(2, max_deg)
        c = [rng.randint(-bound, bound) for _ in range(n)] + [1]
        f = fmpz_poly(c)
        _, facs = f.factor()
        if len(facs) == 1 and facs[0][1] == 1:
            return c


def closure_holds(K):
    o = K.order
    for k in range(o.n):
        for l in range(o.n):
            assert o.contains_poly(o.basis_poly(k) * o.basis_poly(l))
    return True


def test_order_invariants_random():
    rng = random.Random(11)
    for _ in range(100):
        K = new_field(random_irreducible(rng))
        assert K.index ** 2 * K.discriminant == K.poly_discriminant
        r1, r2 = K.signature
        assert r1 + 2 * r2 == K.degree
        assert closure_holds(K)
        # trace form determinant is the discriminant
        o = K.order
        tr = [[o.trace(o.mul(tuple(int(i == a) for i in range(o.n)), tuple(int(i == b) for i in range(o.n))))
               for b in range(o.n)] for a in range(o.n)]
        assert int(fmpz_mat(tr).det()) == K.discriminant


# --- prime factorization --------------------------------------------------

def test_factor_examples():
    K = new_field("x^2+1")
    assert [(P.e, P.f) for P in factor_rational_prime(K, 5)] == [(1, 1), (1, 1)]
    assert [(P.e, P.f) for P in factor_rational_prime(K, 2)] == [(2, 1)]
    K = new_field(CE)
    assert [(P.e, P.f) for P in factor_rational_prime(K, 3)] == [(6, 1)]


def test_factor_index_divisors_example_ce():
    K = new_field(CE)
    # 5 and 61 divide the index, so Dedekind does not apply
    assert sorted((P.e, P.f) for P in factor_rational_prime(K, 5)) == [(1, 2)] * 3
    assert sorted((P.e, P.f) for P in factor_rational_prime(K, 61)) == [(3, 1)] * 2


def test_factorization_invariants_random():
    rng = random.Random(5)
    cases = 0
    while cases < 120:
        K = new_field(random_irreducible(rng, max_deg=4, bound=20))
        q = rng.choice(SMALL_PRIMES[:8])
        F = factor_rational_prime(K, q)
        assert sum(P.e * P.f for P in F) == K.degree
        for P in F:
            assert ideal_norm(P.ideal) == q ** P.f
            assert P.ideal.contains(K.order.scalar(q))
        prod_ideal = reduce(ideal_mul, [ideal_pow(P.ideal, P.e) for P in F])
        assert prod_ideal == principal_ideal(K, K.order.scalar(q))
        cases += 1


# --- ideal arithmetic -----------------------------------------------------

def test_ideal_mul_examples():
    K = new_field("x^2+5")
    P2 = ideal_from_generators(K, [(2, 0), (1, 1)])
    assert ideal_mul(P2, unit_ideal(K)) == P2
    P2bar = ideal_from_generators(K, [(2, 0), (1, -1)])
    assert ideal_mul(P2, P2bar) == principal_ideal(K, (2, 0))
    assert ideal_norm(P2) * ideal_norm(P2bar) == 4
    K6 = new_field(CE)
    assert ideal_norm(principal_ideal(K6, K6.order.scalar(3))) == 729


def test_field_mismatch():
    a = unit_ideal(new_field("x^2+1"))
    b = unit_ideal(new_field("x^2+5"))
    with pytest.raises(FieldMismatch):
        ideal_mul(a, b)


def random_ideal(K, rng):
    o = K.order
    gens = [tuple(rng.randint(-9, 9) for _ in range(o.n)) for _ in range(2)]
    gens = [g for g in gens if any(g)] or [o.one]
    return ideal_from_generators(K, gens)


def test_norm_multiplicative_random():
    rng = random.Random(17)
    fields = [new_field(f) for f in ["x^2+5", "x^3-2", "x^2-x-1", "x^4+x^3+x^2+x+1", CE]]
    for _ in range(100):
        K = rng.choice(fields)
        I, J = random_ideal(K, rng), random_ideal(K, rng)
        assert ideal_norm(ideal_mul(I, J)) == ideal_norm(I) * ideal_norm(J)


# --- principality -----------------------------------------------------------

def test_is_principal_examples():
    K = new_field("x^2+5")
    five = principal_ideal(K, (5, 0))
    assert principal_ideal(K, is_principal(five)) == five
    P2 = ideal_from_generators(K, [(2, 0), (1, 1)])
    assert is_principal(P2) is None
    r5 = principal_ideal(K, (0, 1))
    assert is_principal(r5) in {(0, 1), (0, -1)}


def norm_form_represents(a, b, c, n):
    """Oracle: does a x^2 + b x y + c y^2 = n have an integer solution (definite form)?"""
    disc = 4 * a * c - b * b
    ymax = int((4 * a * n / disc) ** 0.5) + 1
    for y in range(-ymax, ymax + 1):
        for x in range(-int((n / a) ** 0.5) - abs(b * y) - 1, int((n / a) ** 0.5) + abs(b * y) + 2):
            if a * x * x + b * x * y + c * y * y == n:
                return True
    return False


def test_is_principal_against_norm_form_oracle():
    # Q(sqrt(-d)) with d = 1, 2 mod 4: O = Z[t], N(x + y t) = x^2 + d y^2
    for d in [5, 6, 10, 13, 14, 17, 21, 22, 26, 29, 30, 33, 34]:
        K = new_field(f"x^2+{d}")
        for q in [2, 3, 5, 7, 11, 13]:
            for P in factor_rational_prime(K, q):
                got = is_principal(P.ideal)
                expect = norm_form_represents(1, 0, d, P.norm)
                assert (got is not None) == expect, (d, q)


def test_is_principal_generator_invariant_random():
    rng = random.Random(23)
    fields = [new_field(f) for f in ["x^2+5", "x^2-10", "x^3-2", "x^2+23", CE]]
    for _ in range(100):
        K = rng.choice(fields)
        I = random_ideal(K, rng)
        a = is_principal(I)
        if a is not None:
            assert principal_ideal(K, a) == I


# --- automorphisms ----------------------------------------------------------

def test_automorphism_examples():
    assert len(automorphisms(new_field("x^2+1"))) == 2
    assert len(automorphisms(new_field("x^3-2"))) == 1
    assert len(automorphisms(new_field(CE))) == 6


def test_automorphism_group_closure_random():
    rng = random.Random(29)
    bases = [new_field(f) for f in ["x^2+1", "x^4+x^3+x^2+x+1", "x^3-3*x+1", "x^4-10*x^2+1"]]
    done = 0
    while done < 100:
        B = rng.choice(bases)
        o = B.order
        a = tuple(rng.randint(-3, 3) for _ in range(o.n))
        cp = o.charpoly(a)
        _, facs = cp.factor()
        if len(facs) != 1 or facs[0][1] != 1:
            continue
        K = new_field(cp)
        auts = automorphisms(K)
        assert len(auts) == K.degree   # Galois fields stay Galois
        f = K.fpoly
        for s in auts:
            # f(sigma(t)) = 0 exactly
            assert compose_mod(fmpq_poly(f), K.order.to_poly(s.image), K.order.fq) == 0
        images = {s.image for s in auts}
        for s in auts:
            for t in auts:
                assert s.compose(t).image in images
        done += 1


# --- Minkowski bound ----------------------------------------------------------

def test_minkowski_bound_examples():
    b = new_field("x^2+5").minkowski_bound()
    assert 2.847 <= b <= 2.8471
    assert new_field("x").minkowski_bound() == 1
    b = new_field("x^2+23").minkowski_bound()
    assert 3.053 <= b <= 3.0532
