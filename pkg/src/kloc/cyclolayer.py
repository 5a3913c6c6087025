"""Cyclotomic character images and the layer fields F_{i,n}.

All subfields of Q(mu_{p^n}) are reached through Gaussian periods: for a
subgroup U of (Z/p^n)^x the element

    beta = sum_a c_a sum_{u in U} zeta^{a u}

(small integer c_a, chosen so the [G:U] conjugates are distinct) generates
the fixed field of U.  Its minimal polynomial is the product over the cosets
gU of (x - sigma_g beta), rounded with certified ball arithmetic.

The layer F_{i,n} is the compositum F.M with M the fixed field of the kernel
K_i of h -> h^i on the character image H.  A primitive element is
theta_F + c*beta; its minimal polynomial is the irreducible factor of the
numerically rounded resultant that vanishes at the pair of chosen
embeddings.  Elements of the layer with known values at every embedding
(the image of theta_F and the Galois conjugates of beta) are recovered by
interpolation of x*f'(theta) (integral coordinates) and checked exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Sequence

import flint
from flint import acb, acb_mat, acb_poly, arb, fmpq_poly, fmpz_poly

from .errors import OutOfTheoremScope, PrecisionExhausted
from .numfield import (FieldAutomorphism, NumberField, PrimeIdealFactor, compose_mod,
                       factor_rational_prime, new_field, roots_in_field)
from .numfield.field import LOCAL_ORDER_DEGREE, Element


# ---------------------------------------------------------------------------
# groups of units mod p^n
# ---------------------------------------------------------------------------

def unit_group(p: int, n: int) -> list[int]:
    m = p ** n
    return [a for a in range(1, m) if math.gcd(a, p) == 1] if m > 1 else [0]


def closure(gens: Sequence[int], m: int) -> frozenset[int]:
    out = {1 % m}
    frontier = [1 % m]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = x * g % m
            if y not in out:
                out.add(y)
                frontier.append(y)
    return frozenset(out)


def subgroups(p: int, n: int) -> list[frozenset[int]]:
    """All subgroups of (Z/p^n)^x (generated by at most two elements)."""
    m = p ** n
    G = unit_group(p, n)
    if m <= 2:
        return [frozenset({1 % m})]
    seen: set[frozenset[int]] = set()
    cyclic = {closure([a], m) for a in G}
    seen |= cyclic
    if p == 2:
        cyc = list(cyclic)
        for A in cyc:
            for B in cyc:
                seen.add(closure(list(A | B), m))
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


def multiplicative_order(a: int, m: int) -> int:
    if m == 1:
        return 1
    k, x = 1, a % m
    while x != 1:
        x = x * a % m
        k += 1
    return k


# ---------------------------------------------------------------------------
# Gaussian periods
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Period:
    """beta = sum_a c_a sum_{u in U} zeta^{a u} for a subgroup U mod m = p^n."""

    m: int
    subgroup: frozenset[int]
    terms: tuple[tuple[int, int], ...]   # (a, c_a)

    def value(self, g: int, zetas: list[acb]) -> acb:
        """sigma_g(beta) with zeta = exp(2 pi i / m)."""
        acc = acb(0)
        for a, c in self.terms:
            s = acb(0)
            for u in self.subgroup:
                s += zetas[(g * a * u) % self.m]
            acc += c * s
        return acc


def _zetas(m: int, prec: int) -> list[acb]:
    with flint.ctx.workprec(prec):
        return [acb(arb(2 * k) / m).exp_pi_i() for k in range(m)]


def coset_reps(G: Sequence[int], U: frozenset[int], m: int) -> list[int]:
    reps, covered = [], set()
    for g in sorted(G):
        if g in covered:
            continue
        reps.append(g)
        covered |= {g * u % m for u in U}
    return reps


def _separated(vals: list[acb]) -> bool:
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if (vals[i] - vals[j]).contains(0):
                return False
    return True


def period_for(p: int, n: int, U: frozenset[int], prec: int = 256) -> tuple[Period, fmpz_poly]:
    """A generating period of the fixed field of U and its minimal polynomial."""
    m = p ** n
    G = unit_group(p, n)
    reps = coset_reps(G, U, m)
    if len(reps) == 1:
        return Period(m, U, ((1, 0),)), fmpz_poly([0, 1])
    for attempt in range(4):
        zs = _zetas(m, prec)
        with flint.ctx.workprec(prec):
            # periods of zeta^{p^k} cover the subfields of smaller conductor
            levels = [p ** k for k in range(n)]
            candidates = [((1, 1),), tuple((a, 1) for a in levels)]
            extra = [a for a in range(2, m) if a not in levels]
            for t in range(1, 12):
                terms = [(a, 1 + k) for k, a in enumerate(levels)]
                terms += [(a, 1 + (t + k) % 3) for k, a in enumerate(extra[:t])]
                candidates.append(tuple(terms))
            for terms in candidates:
                per = Period(m, U, terms)
                vals = [per.value(g, zs) for g in reps]
                if not _separated(vals):
                    continue
                poly = acb_poly.from_roots(vals).unique_fmpz_poly()
                if poly is None:
                    break
                return per, poly
        prec *= 2
    raise PrecisionExhausted(f"no separated period for a subgroup of index {len(reps)} mod {m}")


# ---------------------------------------------------------------------------
# character image
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CharacterImage:
    p: int
    n: int
    elements: tuple[int, ...]

    @property
    def modulus(self) -> int:
        return self.p ** self.n

    def __len__(self):
        return len(self.elements)


def _subfield_in(F: NumberField, poly: fmpz_poly) -> bool:
    if poly.degree() == 1:
        return True
    if F.degree % poly.degree():
        return False
    return bool(roots_in_field(F, poly))


def char_image(F: NumberField, p: int, n: int) -> CharacterImage:
    """chi(G_F) mod p^n = Gal(Q(mu_{p^n}) / F cap Q(mu_{p^n}))."""
    if n < 1:
        raise ValueError("level must be >= 1")
    m = p ** n
    G = frozenset(unit_group(p, n))
    H = G
    for U in subgroups(p, n):
        if U >= H:
            continue
        index = len(G) // len(U)
        if F.degree % index:
            continue
        if H <= U:
            continue
        _, poly = period_for(p, n, U)
        if _subfield_in(F, poly):
            H = H & U
    return CharacterImage(p, n, tuple(sorted(H)))


def is_nonexceptional(F: NumberField) -> bool:
    """True iff -1 is not in the 2-adic cyclotomic character image of G_F.

    F cap Q(mu_{2^infinity}) has 2-power degree 2^k dividing [F:Q] and
    conductor dividing 2^{k+2}, so the image is decided at level v_2([F:Q]) + 3.
    """
    v = 0
    d = F.degree
    while d % 2 == 0:
        d //= 2
        v += 1
    n = v + 3
    H = char_image(F, 2, n)
    return (2 ** n - 1) not in H.elements


def residue_extension_degree(q: int, p: int, n: int, i: int) -> int:
    """[k_v(mu_{p^n}^{(x) i}) : k_v] = multiplicative order of q^i mod p^n."""
    if math.gcd(q, p) != 1:
        raise ValueError("q must be prime to p")
    return multiplicative_order(pow(q, i, p ** n), p ** n)


def local_k_order(q: int, i: int) -> int:
    """|K_{2i-1}(k_v)| = q^i - 1 for a residue field of size q."""
    if q < 2 or i < 1:
        raise ValueError("need q >= 2 and i >= 1")
    return q ** i - 1


# ---------------------------------------------------------------------------
# layers
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Layer:
    """F_{i,n} with Gamma_{i,n} = Gal(F_{i,n}/F) and kappa = chi^i mod p^n.

    ``embedding`` is the image of the generator of F in the layer (polynomial
    in the layer generator); ``gamma_images`` pairs the image of the layer
    generator under each element of Gamma with its kappa value.
    """

    base: NumberField
    p: int
    n: int
    i: int
    layer_field: NumberField
    embedding: fmpq_poly
    gamma_images: tuple[tuple[fmpq_poly, int], ...]
    character: CharacterImage | None = None

    @property
    def degree(self) -> int:
        return len(self.gamma_images)

    @property
    def kappa_values(self) -> list[int]:
        return [k for _, k in self.gamma_images]

    @cached_property
    def gamma(self) -> list[tuple[FieldAutomorphism, int]]:
        """Gamma as automorphisms on the maximal order with their kappa values."""
        L = self.layer_field
        o = L.order
        return [(FieldAutomorphism(L, o, o.from_poly(img)), k) for img, k in self.gamma_images]

    def embed_base_element(self, x: Sequence[int], order=None) -> Element:
        """Image in the layer (coordinates in ``order``) of an element of the base maximal order."""
        o = order or self.layer_field.order
        g = compose_mod(self.base.order.to_poly(x), self.embedding, fmpq_poly(self.layer_field.fpoly))
        return o.from_poly(g)

    def embed_base_rational(self, x: Sequence[int], order) -> list:
        g = compose_mod(self.base.order.to_poly(x), self.embedding, fmpq_poly(self.layer_field.fpoly))
        return order.rational_coords(g)


def _trivial_layer(F: NumberField, p: int, n: int, i: int, H=None) -> Layer:
    one = 1 % (p ** n) if n else 1
    return Layer(F, p, n, i, F, fmpq_poly([0, 1]), ((fmpq_poly([0, 1]), one),), H)


def build_layer(F: NumberField, p: int, n: int, i: int) -> Layer:
    if i < 1 or n < 0:
        raise ValueError("need i >= 1 and n >= 0")
    if n == 0:
        return _trivial_layer(F, p, 0, i)
    if p == 2 and not is_nonexceptional(F):
        raise OutOfTheoremScope("p = 2 and the base field is exceptional")
    m = p ** n
    H = char_image(F, p, n)
    Ki = frozenset(h for h in H.elements if pow(h, i, m) == 1)
    if len(Ki) == len(H.elements):
        return _trivial_layer(F, p, n, i, H)
    per, mpoly = period_for(p, n, Ki)
    Gamma = coset_reps(H.elements, Ki, m)
    for attempt in range(4):
        try:
            return _compositum(F, p, n, i, H, Ki, per, mpoly, Gamma, 128 * 2 ** attempt)
        except PrecisionExhausted:
            continue
    raise PrecisionExhausted("layer construction failed to certify")


def _compositum(F, p, n, i, H, Ki, per, mpoly, Gamma, extra_prec) -> Layer:
    m = p ** n
    G = unit_group(p, n)
    reps = coset_reps(G, Ki, m)
    rep = {r * u % m: r for r in reps for u in Ki}
    d_layer = F.degree * len(Gamma)
    fq = fmpq_poly(F.fpoly)
    height = sum(abs(int(c)) for c in F.fpoly.coeffs()) + sum(abs(int(c)) for c in mpoly.coeffs())
    prec = extra_prec + 8 * d_layer * max(1, height.bit_length()) + 64
    with flint.ctx.workprec(prec):
        thetas = [r for r, _ in F.fpoly.complex_roots()]
        zs = _zetas(m, prec)
        betas = {g: per.value(g, zs) for g in reps}
        for c in range(1, 40):
            pairs = [(j, g) for j in range(len(thetas)) for g in reps]
            vals = [thetas[j] + c * betas[g] for j, g in pairs]
            if not _separated(vals):
                continue
            R = acb_poly.from_roots(vals).unique_fmpz_poly()
            if R is None:
                raise PrecisionExhausted("resultant not rounded")
            _, facs = R.factor()
            target = None
            for gpoly, e in facs:
                if gpoly.degree() == d_layer and e == 1:
                    v = acb_poly([acb(int(x)) for x in gpoly.coeffs()])(vals[0])
                    if v.contains(0):
                        target = gpoly
                        break
            if target is None:
                continue
            # embeddings of the layer: pairs (j, g) that are roots of target
            tp = acb_poly([acb(int(x)) for x in target.coeffs()])
            roots = [(j, g) for (j, g), v in zip(pairs, vals) if tp(v).contains(0)]
            if len(roots) != d_layer:
                continue
            L = new_field(target)
            break
        else:
            raise PrecisionExhausted("no primitive element for the compositum")
        rvals = [thetas[j] + c * betas[g] for j, g in roots]
        interp = _Interpolator(target, rvals, prec)
        emb = interp.element([thetas[j] for j, _ in roots])
        images = []
        for h in Gamma:
            img = interp.element([thetas[j] + c * betas[rep[g * h % m]] for j, g in roots])
            images.append((img, pow(h, i, m)))
    Lq = fmpq_poly(target)
    # exact checks: the embedding is a root of f_F, each image is a root of the layer
    # polynomial fixing the embedded base field
    if compose_mod(fq, emb, Lq) != 0:
        raise PrecisionExhausted("embedding of the base field failed exact check")
    for img, _ in images:
        if compose_mod(Lq, img, Lq) != 0 or compose_mod(emb, img, Lq) != emb:
            raise PrecisionExhausted("Galois element failed exact check")
    return Layer(F, p, n, i, L, emb, tuple(images), H)


class _Interpolator:
    """Recover x in Q(theta) from its values at all embeddings.

    For an algebraic integer x, y = x * f'(theta) lies in Z[theta], so the
    power-basis coordinates of y are integers; they are solved for from the
    Vandermonde system and rounded with certified balls.
    """

    def __init__(self, f: fmpz_poly, roots: list[acb], prec: int):
        self.f = f
        self.fq = fmpq_poly(f)
        self.roots = roots
        self.prec = prec
        d = f.degree()
        self.V = acb_mat([[r ** k for k in range(d)] for r in roots])
        df = acb_poly([acb(int(x)) for x in f.derivative().coeffs()])
        self.dvals = [df(r) for r in roots]
        g, s, _ = fmpq_poly(f.derivative()).xgcd(self.fq)
        self.inv_df = s / g

    def element(self, values: list[acb]) -> fmpq_poly:
        with flint.ctx.workprec(self.prec):
            rhs = acb_mat([[v * dv] for v, dv in zip(values, self.dvals)])
            sol = self.V.solve(rhs)
            coeffs = []
            for k in range(sol.nrows()):
                z = sol[k, 0]
                if not z.imag.contains(0):
                    raise PrecisionExhausted("interpolation not precise enough")
                r = z.real.unique_fmpz()
                if r is None:
                    raise PrecisionExhausted("interpolated coordinate is not certified integral")
                coeffs.append(int(r))
        return (fmpq_poly(coeffs) * self.inv_df) % self.fq


# ---------------------------------------------------------------------------
# primes above p
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimeSplitting:
    """How one prime of the base field above p decomposes in the layer."""

    base_prime: PrimeIdealFactor
    above: tuple[PrimeIdealFactor, ...]

    @property
    def relative(self) -> list[tuple[int, int]]:
        return [(Q.e // self.base_prime.e, Q.f // self.base_prime.f) for Q in self.above]

    @property
    def totally_split(self) -> bool:
        return all(ef == (1, 1) for ef in self.relative)

    @property
    def totally_ramified(self) -> bool:
        return len(self.above) == 1


@dataclass(frozen=True)
class LayerPrimes:
    layer_primes: tuple[PrimeIdealFactor, ...]
    splitting: tuple[PrimeSplitting, ...]


def layer_s_primes(L: Layer) -> LayerPrimes:
    """Primes of the layer above p, grouped by the base prime below them."""
    K, F, p = L.layer_field, L.base, L.p
    oK = K.local_order(p)
    ups = factor_rational_prime(K, p, oK)
    downs = factor_rational_prime(F, p, F.local_order(p))
    oF = F.local_order(p)
    out = []
    for P in downs:
        gens = []
        for r in P.ideal.matrix:
            g = compose_mod(oF.to_poly(r), L.embedding, fmpq_poly(K.fpoly))
            coords = oK.rational_coords(g)
            den = math.lcm(*[c.denominator for c in coords])
            assert den % p, "embedded element not p-integral"
            gens.append([int(c * den) for c in coords])
        above = tuple(Q for Q in ups if all(Q.ideal.contains(v) for v in gens))
        out.append(PrimeSplitting(P, above))
    assert sum(len(s.above) for s in out) == len(ups)
    return LayerPrimes(tuple(ups), tuple(out))
