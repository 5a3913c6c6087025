"""Class groups, S-class groups and the Galois action on ideal classes.

The class group is presented on a factor base FB of all prime ideals above
the rational primes up to a smoothness bound (plus any requested extra
primes).  Relations are valuation vectors of FB-smooth elements found by
weighted LLL reduction of random FB products.  Every prime ideal of norm up
to the Minkowski bound that is not in FB is shown to lie in the span of FB by
an explicit smooth element (one prime per Galois orbit).  The upper bound
G = Z^FB / relations is then certified to be exact: for each prime l dividing
|G|, a representative ideal for each line of G[l] is tested with the
certified principality test, and principal ones feed back as new relations.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from flint import fmpz_mat
from sympy import primerange

from .errors import EffortExceeded, InfiniteCokernel
from .intlinalg import (Cokernel, FiniteAbelianGroup, IntMatrix, cokernel, induced_action, quotient)
from .numfield import (FieldAutomorphism, IdealHNF, NumberField, PrimeIdealFactor, apply_map,
                       automorphisms, element_valuation, factor_rational_prime, ideal_inverse,
                       ideal_mul, ideal_norm, ideal_valuation, is_principal, log_vector,
                       p_times_inverse, principal_ideal, unit_ideal)
from .numfield.field import Element
from .numfield.lattice import lll_reduce, place_degrees
from .numfield.principal import UnitLattice, _absorb, unit_lattice

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClassGroupConfig:
    """Caps and knobs for :func:`class_group`."""

    max_degree: int = 12
    max_disc: int = 10 ** 12
    seed: int = 0
    fb_bound: int | None = None          # smoothness bound; default from log|disc|
    extra_primes: tuple[int, ...] = ()   # rational primes whose ideals join the factor base
    max_relation_rounds: int = 20000
    stable_checks: int = 4
    max_lines: int = 2000
    principal_cap: int = 2_000_000


@dataclass(frozen=True)
class Elimination:
    """Certificate that a prime P outside FB has a FB-smooth cofactor alpha/P."""

    p: int
    ideal: tuple[tuple[int, ...], ...]
    alpha: Element


@dataclass(frozen=True, eq=False)
class ClassGroupData:
    field: NumberField
    generators: tuple[PrimeIdealFactor, ...]
    relations: tuple[tuple[int, ...], ...]          # aligned with relation_elements
    structure: FiniteAbelianGroup
    presentation: Cokernel
    relation_elements: tuple[Element, ...] = ()
    eliminations: tuple[Elimination, ...] = ()
    minkowski: int = 1
    seed: int = 0

    def discrete_log(self, I: IdealHNF) -> tuple[int, ...]:
        """Class of the integral ideal I in invariant-factor coordinates."""
        return self.presentation.project(_ideal_exponents(self, I))

    def generator_class(self, k: int) -> tuple[int, ...]:
        return self.presentation.project([int(j == k) for j in range(len(self.generators))])

    def class_order(self, c: Sequence[int]) -> int:
        o = 1
        for x, d in zip(c, self.structure.invariants):
            o = math.lcm(o, d // math.gcd(x, d))
        return o

    def representative(self, c: Sequence[int]) -> tuple[IdealHNF, int]:
        """An integral ideal J and a sign s with [J] = s * c (small norm)."""
        return _ideal_for_vector(self, self.presentation.lift(c))


@dataclass(frozen=True, eq=False)
class SClassGroup:
    base: ClassGroupData
    p: int
    s_primes: tuple[PrimeIdealFactor, ...]
    structure: FiniteAbelianGroup
    quotient_map: Cokernel

    def project(self, c: Sequence[int]) -> tuple[int, ...]:
        return self.quotient_map.project(c)

    def discrete_log(self, I: IdealHNF) -> tuple[int, ...]:
        return self.project(self.base.discrete_log(I))


# ---------------------------------------------------------------------------
# smoothness
# ---------------------------------------------------------------------------

class _FactorBase:
    def __init__(self, K: NumberField, primes: Sequence[int]):
        self.K = K
        self.o = K.order
        self.primes = sorted(set(primes))
        self.gens: list[PrimeIdealFactor] = []
        self.by_p: dict[int, list[int]] = {}
        for q in self.primes:
            idx = []
            for P in factor_rational_prime(K, q, self.o):
                idx.append(len(self.gens))
                self.gens.append(P)
            self.by_p[q] = idx
        self.index = {P.ideal.matrix: k for k, P in enumerate(self.gens)}

    def __len__(self):
        return len(self.gens)

    def smooth_part(self, N: int) -> int:
        """The FB-cofactor of N (1 when N is FB-smooth)."""
        for q in self.primes:
            while N % q == 0:
                N //= q
        return N

    def element_vector(self, x: Element, N: int | None = None) -> list[int] | None:
        """Valuation vector of (x) over FB, or None if x is not FB-smooth."""
        if N is None:
            N = abs(self.o.norm(x))
        if N == 0 or self.smooth_part(N) != 1:
            return None
        v = [0] * len(self.gens)
        for q in self.primes:
            if N % q:
                continue
            for k in self.by_p[q]:
                v[k] = element_valuation(self.gens[k], x)
        return v

    def ideal_vector(self, I: IdealHNF, N: int) -> list[int]:
        """Valuations of I at the FB primes dividing N."""
        v = [0] * len(self.gens)
        for q in self.primes:
            if N % q == 0:
                for k in self.by_p[q]:
                    v[k] = ideal_valuation(self.gens[k], I)
        return v


def _random_weights(rng: random.Random, degs: list[int], width: float) -> list[float]:
    w = [rng.uniform(-width, width) for _ in degs]
    n = sum(degs)
    mean = math.fsum(d * x for d, x in zip(degs, w)) / n
    return [math.exp(x - mean) for x in w]


def _short_elements(K, o, I: IdealHNF, weights, prec) -> list[Element]:
    red = lll_reduce(K, o, I.rows(), prec, weights)
    out = [tuple(r) for r in red[:3]]
    if len(red) > 1:
        out.append(tuple(a + b for a, b in zip(red[0], red[1])))
        out.append(tuple(a - b for a, b in zip(red[0], red[1])))
    return [x for x in out if any(x)]


def _cofactor_vector(fb: _FactorBase, I: IdealHNF, rng: random.Random, prec: int,
                     attempts: int = 400) -> tuple[list[int], Element]:
    """(v, alpha) with alpha in I and (alpha) I^{-1} FB-smooth with valuation vector v."""
    K, o = fb.K, fb.o
    NI = int(ideal_norm(I))
    degs = place_degrees(K)
    vI = None
    for t in range(attempts):
        weights = _random_weights(rng, degs, 0.3 + t / 25) if t else [1.0] * len(degs)
        for a in _short_elements(K, o, I, weights, prec):
            Na = abs(o.norm(a))
            if fb.smooth_part(Na // NI) != 1:
                continue
            va = fb.element_vector(a, Na) if fb.smooth_part(Na) == 1 else _partial_vector(fb, a, Na)
            if vI is None:
                vI = fb.ideal_vector(I, NI)
            return [x - y for x, y in zip(va, vI)], a
    raise EffortExceeded(f"no smooth cofactor found for an ideal of norm {NI}")


def _partial_vector(fb: _FactorBase, a: Element, Na: int) -> list[int]:
    v = [0] * len(fb.gens)
    for q in fb.primes:
        if Na % q == 0:
            for k in fb.by_p[q]:
                v[k] = element_valuation(fb.gens[k], a)
    return v


# ---------------------------------------------------------------------------
# the main computation
# ---------------------------------------------------------------------------

def _default_fb_bound(K: NumberField, mink: int) -> int:
    L = math.log(abs(K.discriminant) + 2)
    return max(2, min(mink, max(30, int(0.25 * L * L))))


def _lattice_det(rows: list[list[int]], k: int) -> int | None:
    """Index of the row lattice in Z^k (None if not of full rank)."""
    if len(rows) < k:
        return None
    h = fmpz_mat(rows).hnf()
    d = 1
    for i in range(k):
        x = int(h[i, i])
        if x == 0:
            return None
        d *= x
    return abs(d)


def _reduced_rows(rows: list[list[int]], k: int) -> list[list[int]]:
    h = fmpz_mat(rows).hnf().tolist()
    return [[int(x) for x in r] for r in h[:k] if any(r)]


def class_group(K: NumberField, config: ClassGroupConfig | None = None) -> ClassGroupData:
    """Certified class group of the maximal order of K."""
    cfg = config or ClassGroupConfig()
    n = K.degree
    if n > cfg.max_degree:
        raise EffortExceeded(f"degree {n} exceeds the class group cap {cfg.max_degree}")
    if abs(K.discriminant) > cfg.max_disc:
        raise EffortExceeded(f"|disc| = {abs(K.discriminant)} exceeds the cap {cfg.max_disc}")
    o = K.order
    mink = int(math.floor(float(K.minkowski_bound()) + 1e-9))
    rng = random.Random(cfg.seed)
    B = min(mink, cfg.fb_bound) if cfg.fb_bound else _default_fb_bound(K, mink)
    fb = _FactorBase(K, list(primerange(2, B + 1)) + [q for q in cfg.extra_primes])
    k = len(fb)
    prec = 128 + 8 * n + 2 * max(abs(int(c)) for c in K.fpoly.coeffs()).bit_length()
    degs = place_degrees(K)

    rows: list[list[int]] = []
    elems: list[Element] = []
    seen: set[tuple[int, ...]] = set()

    def add(v, a) -> bool:
        t = tuple(v)
        if not any(t) and a is not None and abs(o.norm(a)) != 1:
            return False
        if t in seen or tuple(-x for x in t) in seen:
            return False
        seen.add(t)
        rows.append(list(v))
        elems.append(a)
        return True

    # (q) = prod P^e
    for q in fb.primes:
        v = [0] * k
        for j in fb.by_p[q]:
            v[j] = fb.gens[j].e
        add(v, o.scalar(q))

    if k:
        _collect_relations(fb, rows, add, rng, prec, degs, cfg)

    eliminations = _eliminate_large_primes(fb, B, mink, rng, prec)

    # unit logs from relation kernels help fields whose units the LLL search misses
    _seed_units_from_relations(K, rows, elems, prec)

    pres, _ = _certify(fb, rows, elems, add, rng, prec, cfg)
    return ClassGroupData(K, tuple(fb.gens), tuple(tuple(r) for r in rows), pres.group, pres,
                          tuple(elems), tuple(eliminations), mink, cfg.seed)


def _collect_relations(fb, rows, add, rng, prec, degs, cfg) -> None:
    K, o = fb.K, fb.o
    k = len(fb)
    last, stable = None, 0
    every = max(20, k)
    for rnd in range(cfg.max_relation_rounds):
        size = rng.randint(0, min(3, k))
        I = unit_ideal(K, o)
        for j in rng.sample(range(k), size):
            I = ideal_mul(I, fb.gens[j].ideal)
        weights = _random_weights(rng, degs, 0.2 + 0.02 * (rnd % 100))
        for a in _short_elements(K, o, I, weights, prec):
            v = fb.element_vector(a)
            if v is not None:
                add(v, a)
        if rnd % every == every - 1:
            det = _lattice_det(rows, k)
            if det is not None:
                stable = stable + 1 if det == last else 0
                last = det
                if stable >= cfg.stable_checks:
                    log.debug("relations: %d rows, det %d after %d rounds", len(rows), det, rnd)
                    return
    raise EffortExceeded(f"relation search did not stabilise after {cfg.max_relation_rounds} rounds")


def _orbit_representatives(K: NumberField, primes: list[PrimeIdealFactor],
                           auts: list[FieldAutomorphism]) -> list[PrimeIdealFactor]:
    if len(auts) == K.degree and len({(P.e, P.f) for P in primes}) == 1:
        return primes[:1]                # Galois: one orbit
    left = {P.ideal.matrix: P for P in primes}
    reps = []
    for P in primes:
        if P.ideal.matrix not in left:
            continue
        reps.append(P)
        for s in auts:
            left.pop(apply_map(P.ideal, s.basis_images).matrix, None)
    return reps


def _eliminate_large_primes(fb: _FactorBase, B: int, mink: int, rng, prec) -> list[Elimination]:
    K, o = fb.K, fb.o
    out: list[Elimination] = []
    if mink <= B:
        return out
    auts = automorphisms(K, o) if K.degree > 1 else []
    for q in primerange(B + 1, mink + 1):
        if q in fb.by_p:
            continue
        small = [P for P in factor_rational_prime(K, q, o) if P.norm <= mink]
        if not small:
            continue
        for P in _orbit_representatives(K, small, auts):
            _, a = _cofactor_vector(fb, P.ideal, rng, prec)
            out.append(Elimination(q, P.ideal.matrix, a))
    return out


def _seed_units_from_relations(K, rows, elems, prec) -> None:
    o = K.order
    if "_units" in o.__dict__:
        return
    r1, r2 = K.signature
    r = r1 + r2 - 1
    if r == 0:
        return
    try:
        unit_lattice(K, o, max_rounds=150)
        return
    except EffortExceeded:
        pass
    # integer left kernel of the relation matrix: products of relation elements that are units
    ker, nullity = fmpz_mat(rows).transpose().nullspace()
    logs_el = [log_vector(K, o, a, prec) for a in elems]
    places = len(place_degrees(K))
    basis: list[list[float]] = []
    for c in range(nullity):
        coeffs = [int(ker[i, c]) for i in range(ker.nrows())]
        u = [math.fsum(cf * lv[j] for cf, lv in zip(coeffs, logs_el) if cf) for j in range(places)]
        basis = _absorb(basis, u, r)
    if len(basis) < r:
        raise EffortExceeded("unit rank not reached from relations")
    o.__dict__["_units"] = UnitLattice(tuple(tuple(v) for v in basis))


# ---------------------------------------------------------------------------
# certification of the upper bound
# ---------------------------------------------------------------------------

def _presentation(rows: list[list[int]], k: int) -> tuple[Cokernel, list[list[int]]]:
    red = _reduced_rows(rows, k)
    if len(red) < k:
        raise InfiniteCokernel("relation lattice not of full rank")
    return cokernel(red, k), red


def _line_vectors(group: FiniteAbelianGroup, ell: int):
    """One nonzero element of order ell per line of G[ell], in group coordinates."""
    idx = [j for j, d in enumerate(group.invariants) if d % ell == 0]
    r = len(idx)
    for code in range(ell ** r):
        c = [(code // ell ** t) % ell for t in range(r)]
        nz = [x for x in c if x]
        if not nz or nz[-1] != 1:
            continue
        v = [0] * group.rank
        for x, j in zip(c, idx):
            v[j] = x * (group.invariants[j] // ell)
        yield v


def _prime_divisors(m: int) -> list[int]:
    out, d = [], 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


def _certify(fb, rows, elems, add, rng, prec, cfg) -> tuple[Cokernel, list[list[int]]]:
    k = len(fb)
    if k == 0:
        return Cokernel(FiniteAbelianGroup(), [], []), []
    while True:
        pres, red = _presentation(rows, k)
        G = pres.group
        changed = False
        for ell in _prime_divisors(G.order):
            lines = 0
            for c in _line_vectors(G, ell):
                lines += 1
                if lines > cfg.max_lines:
                    raise EffortExceeded(f"too many lines in G[{ell}]")
                v = _symmetric(pres.lift(c), G.exponent)
                J, _ = _ideal_from_exponents(fb, v)
                if is_principal(J, cap=cfg.principal_cap) is not None:
                    # the class of v is trivial: v is a relation
                    add(v, None)
                    changed = True
                    break
            if changed:
                break
        if not changed:
            return pres, red


def _symmetric(v: Sequence[int], m: int) -> list[int]:
    out = []
    for x in v:
        x %= m
        out.append(x - m if 2 * x > m else x)
    return out


def _reduce_ideal(I: IdealHNF) -> IdealHNF:
    """An integral ideal in the class of I^{-1} with norm about sqrt|disc|."""
    K, o = I.field, I.order
    a = tuple(lll_reduce(K, o, I.rows())[0])
    return ideal_mul(principal_ideal(K, a, o), ideal_inverse(I))


def _ideal_from_exponents(fb: _FactorBase, v: Sequence[int]) -> tuple[IdealHNF, int]:
    """(J, s) with J integral and [J] = s * sum v_k [P_k]."""
    K, o = fb.K, fb.o
    limit = max(10 ** 6, int(math.sqrt(abs(K.discriminant))) * 4)
    J = unit_ideal(K, o)
    s = 1
    for j, e in enumerate(v):
        for _ in range(abs(e)):
            positive = (e > 0) == (s > 0)
            P = fb.gens[j]
            J = ideal_mul(J, P.ideal if positive else p_times_inverse(P))
            if ideal_norm(J) > limit:
                J, s = _reduce_ideal(J), -s
    return J, s


def _ideal_for_vector(Cl: ClassGroupData, v: Sequence[int]) -> tuple[IdealHNF, int]:
    fb = _fb_of(Cl)
    return _ideal_from_exponents(fb, _symmetric(v, max(Cl.structure.exponent, 1)))


# ---------------------------------------------------------------------------
# discrete logarithms
# ---------------------------------------------------------------------------

def _fb_of(Cl: ClassGroupData) -> _FactorBase:
    fb = Cl.__dict__.get("_fb")
    if fb is None:
        fb = _FactorBase.__new__(_FactorBase)
        fb.K, fb.o = Cl.field, Cl.field.order
        fb.gens = list(Cl.generators)
        fb.primes = sorted({P.p for P in fb.gens})
        fb.by_p = {}
        for j, P in enumerate(fb.gens):
            fb.by_p.setdefault(P.p, []).append(j)
        fb.index = {P.ideal.matrix: j for j, P in enumerate(fb.gens)}
        Cl.__dict__["_fb"] = fb
    return fb


def _ideal_exponents(Cl: ClassGroupData, I: IdealHNF) -> list[int]:
    """An exponent vector over the generators in the class of I."""
    if I.order != Cl.field.order:
        from .errors import FieldMismatch
        raise FieldMismatch("ideal of a different order")
    if not I.is_integral:
        raise ValueError("discrete_log expects an integral ideal")
    fb = _fb_of(Cl)
    if not fb.gens:
        return []
    N = int(ideal_norm(I))
    if fb.smooth_part(N) == 1:
        return fb.ideal_vector(I, N)
    rng = random.Random(Cl.seed + N)
    prec = 128 + 8 * fb.o.n
    vJ, _ = _cofactor_vector(fb, I, rng, prec)
    return [-x for x in vJ]


# ---------------------------------------------------------------------------
# S-quotients and Galois action
# ---------------------------------------------------------------------------

def s_quotient(Cl: ClassGroupData, p: int) -> SClassGroup:
    """Cl / <classes of the primes above p>."""
    K = Cl.field
    primes = tuple(factor_rational_prime(K, p, K.order))
    gens = [Cl.discrete_log(P.ideal) for P in primes]
    q = quotient(Cl.structure, gens)
    return SClassGroup(Cl, p, primes, q.group, q)


def galois_action_on_classes(Cl: ClassGroupData, sigma: FieldAutomorphism) -> IntMatrix:
    """Matrix (row convention, x -> x A) of [a] -> [sigma a] on Cl.structure."""
    fb = _fb_of(Cl)
    k = len(fb.gens)
    if Cl.structure.rank == 0:
        return []
    perm: list[list[int]] = []
    for P in fb.gens:
        img = apply_map(P.ideal, sigma.basis_images)
        j = fb.index.get(img.matrix)
        if j is not None:
            perm.append([int(t == j) for t in range(k)])
        else:
            perm.append(_ideal_exponents(Cl, img))
    return induced_action(Cl.presentation, perm)


def verify_generator_orders(Cl: ClassGroupData, indices: Sequence[int] | None = None) -> bool:
    """P^m principal and P^{m/l} not, for the class order m of each chosen generator."""
    fb = _fb_of(Cl)
    for j in indices if indices is not None else range(len(fb.gens)):
        c = Cl.generator_class(j)
        m = Cl.class_order(c)
        P = fb.gens[j]
        v = [0] * len(fb.gens)
        v[j] = m
        J, _ = _ideal_from_exponents(fb, v)
        if is_principal(J) is None:
            return False
        for ell in _prime_divisors(m):
            v[j] = m // ell
            J, _ = _ideal_from_exponents(fb, v)
            if is_principal(J) is not None:
                return False
    return True
