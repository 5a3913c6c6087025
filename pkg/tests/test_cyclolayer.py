import math
from functools import lru_cache

import pytest
from flint import fmpq_poly
from hypothesis import given, settings, strategies as st

from kloc.cyclolayer import (build_layer, char_image, is_nonexceptional, layer_s_primes, local_k_order,
                             multiplicative_order, residue_extension_degree, unit_group)
from kloc.errors import OutOfTheoremScope
from kloc.numfield import compose_mod, new_field, rational_field

CE = "x^6-793*x^3+226981"


@lru_cache(maxsize=None)
def field(poly):
    return rational_field() if poly == "x" else new_field(poly)


# --- examples -----------------------------------------------------------------

def test_char_image_examples():
    assert char_image(field("x"), 5, 1).elements == (1, 2, 3, 4)
    assert char_image(field("x^2-x-1"), 5, 1).elements == (1, 4)
    assert char_image(field("x^2+1"), 2, 2).elements == (1,)


def test_char_image_rejects_level_zero():
    with pytest.raises(ValueError):
        char_image(field("x"), 5, 0)


def test_build_layer_examples():
    L = build_layer(field("x"), 5, 1, 2)
    assert L.layer_field.degree == 2 and L.layer_field.discriminant == 5
    assert sorted(L.kappa_values) == [1, 4]
    L = build_layer(field("x"), 3, 1, 2)
    assert L.layer_field.degree == 1 and L.degree == 1
    F = field(CE)
    L = build_layer(F, 3, 0, 5)
    assert L.layer_field is F and L.degree == 1


def test_build_layer_exceptional_p2():
    with pytest.raises(OutOfTheoremScope):
        build_layer(field("x"), 2, 2, 1)
    L = build_layer(field("x^2+1"), 2, 3, 1)
    assert L.degree == 2


def test_layer_s_primes_examples():
    F = field(CE)
    S = layer_s_primes(build_layer(F, 3, 1, 1))
    assert [(P.e, P.f) for P in S.layer_primes] == [(6, 1)]
    S = layer_s_primes(build_layer(field("x"), 5, 1, 1))
    assert [(P.e, P.f) for P in S.layer_primes] == [(4, 1)]
    S = layer_s_primes(build_layer(F, 3, 2, 1))
    assert len(S.splitting) == 1 and S.splitting[0].totally_split
    assert len(S.layer_primes) == 3


def test_residue_degree_examples():
    assert residue_extension_degree(2, 3, 1, 1) == 2
    assert residue_extension_degree(2, 3, 1, 2) == 1
    assert residue_extension_degree(3, 61, 1, 1) == 10
    with pytest.raises(ValueError):
        residue_extension_degree(3, 3, 1, 1)


def test_nonexceptional_examples():
    assert not is_nonexceptional(field("x"))
    assert is_nonexceptional(field("x^2+1"))
    assert is_nonexceptional(field("x^2+2"))
    assert not is_nonexceptional(field("x^2-2"))   # real field


def test_local_k_order_examples():
    assert local_k_order(3, 1) == 2
    assert local_k_order(4, 2) == 15
    assert local_k_order(2, 3) == 7


# --- oracles and invariants -----------------------------------------------------

def squarefree(m):
    return all(m % (q * q) for q in range(2, int(abs(m) ** 0.5) + 1))


def quadratic(m):
    return new_field([(1 - m) // 4, -1, 1] if m % 4 == 1 else [-m, 0, 1])


def test_char_image_quadratic_oracle():
    # Q(sqrt m) lies in Q(mu_p) iff m = p* = (-1)^((p-1)/2) p; then the image is the squares
    for p in [3, 5, 7, 11, 13]:
        pstar = p if p % 4 == 1 else -p
        squares = sorted({a * a % p for a in range(1, p)})
        for m in [-1, 2, -2, 3, -3, 5, -5, 6, -7, 7, 11, -11, 13, -13]:
            if not squarefree(m):
                continue
            H = char_image(quadratic(m), p, 1).elements
            assert list(H) == (squares if m == pstar else list(range(1, p))), (p, m)


def test_char_image_reduction_surjective():
    for poly, p in [("x^2+1", 2), ("x^2+3", 3), (CE, 3), ("x^2-x-1", 5), ("x^2+2", 2)]:
        F = field(poly)
        for n in [1, 2] if p > 2 else [2, 3]:
            Hn = char_image(F, p, n).elements
            Hn1 = char_image(F, p, n + 1).elements
            assert sorted({h % p ** n for h in Hn1}) == list(Hn)
            # closed under multiplication
            assert all(a * b % p ** n in Hn for a in Hn for b in Hn)


LAYER_CASES = [("x", 3, 1, 1), ("x", 5, 1, 1), ("x", 5, 1, 2), ("x", 7, 1, 2), ("x", 7, 1, 3),
               ("x", 3, 2, 1), ("x", 3, 2, 2), ("x^2+1", 5, 1, 1), ("x^2+3", 3, 2, 1),
               ("x^2+1", 2, 3, 1), (CE, 3, 2, 1), (CE, 3, 2, 2), ("x^2-x-1", 5, 1, 3)]


@pytest.mark.parametrize("poly,p,n,i", LAYER_CASES)
def test_layer_invariants(poly, p, n, i):
    F = field(poly)
    L = build_layer(F, p, n, i)
    m = p ** n
    H = char_image(F, p, n).elements
    Ki = [h for h in H if pow(h, i, m) == 1]
    assert L.degree * len(Ki) == len(H)
    assert len(set(L.kappa_values)) == L.degree                  # kappa injective
    assert (p - 1) * p ** (n - 1) % L.degree == 0
    assert L.layer_field.degree == F.degree * L.degree
    fL = fmpq_poly(L.layer_field.fpoly)
    assert compose_mod(fmpq_poly(F.fpoly), L.embedding, fL) == 0   # F embeds
    images = {k: img for img, k in L.gamma_images}
    for img_s, ks in L.gamma_images:
        assert compose_mod(fL, img_s, fL) == 0
        for img_t, kt in L.gamma_images:
            # sigma(tau(theta)) = tau_poly(sigma(theta))
            comp = compose_mod(img_t, img_s, fL)
            assert images[ks * kt % m] == comp                    # kappa is a homomorphism


def test_full_cyclotomic_layer_degree():
    for poly, p in [("x", 5), ("x", 7), ("x^2+1", 3), ("x^2-x-1", 5)]:
        F = field(poly)
        L = build_layer(F, p, 1, 1)
        assert L.layer_field.degree == F.degree * len(char_image(F, p, 1))


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([3, 5, 7, 11, 13, 2]), st.integers(1, 3), st.integers(1, 12), st.integers(2, 500))
def test_residue_degree_formula(p, n, i, q):
    if math.gcd(q, p) != 1:
        return
    o = residue_extension_degree(q, p, n, 1)
    assert residue_extension_degree(q, p, n, i) == o // math.gcd(o, i)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([3, 5, 7, 2]), st.integers(1, 3))
def test_unit_group_order(p, n):
    assert len(unit_group(p, n)) == (p - 1) * p ** (n - 1)
    for a in unit_group(p, n):
        assert ((p - 1) * p ** (n - 1)) % multiplicative_order(a, p ** n) == 0
