"""Ideals as HNF Z-modules and the decomposition of rational primes."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

from flint import fmpz_mat, nmod_mat, nmod_poly

from ..errors import FieldMismatch
from ._linalg import lattice_hnf, left_kernel_mod
from .field import Element, NumberField, Order, radical_mod


@dataclass(frozen=True, eq=False)
class IdealHNF:
    """Fractional ideal ``(1/denominator) * rowspan(matrix)`` of an order.

    ``matrix`` is the upper triangular row HNF in the order's basis coordinates.
    """

    field: NumberField
    order: Order
    matrix: tuple[tuple[int, ...], ...]
    denominator: int = 1

    def __eq__(self, other):
        return (isinstance(other, IdealHNF) and self.order == other.order
                and self.matrix == other.matrix and self.denominator == other.denominator)

    def __hash__(self):
        return hash((self.matrix, self.denominator))

    @property
    def n(self) -> int:
        return self.order.n

    @property
    def is_integral(self) -> bool:
        return self.denominator == 1

    def rows(self) -> list[list[int]]:
        return [list(r) for r in self.matrix]

    def contains(self, x: Sequence[int]) -> bool:
        """Membership test for an element of the order (integral ideals)."""
        v = [int(c) * self.denominator for c in x]
        # back substitution in the upper triangular basis
        for i in range(self.n):
            piv = self.matrix[i][i]
            if v[i] % piv:
                return False
            q = v[i] // piv
            if q:
                v = [a - q * b for a, b in zip(v, self.matrix[i])]
        return all(a == 0 for a in v)


def _make(K: NumberField, order: Order, rows, modulus=None, den: int = 1) -> IdealHNF:
    h = lattice_hnf(rows, order.n, modulus)
    g = den
    for r in h:
        for x in r:
            g = gcd(g, x)
    if g > 1:
        h = [[x // g for x in r] for r in h]
        den //= g
    return IdealHNF(K, order, tuple(tuple(r) for r in h), den)


def _check(I: IdealHNF, J: IdealHNF) -> None:
    if I.order != J.order:
        raise FieldMismatch(f"ideals of {I.field!r} and {J.field!r}")


def unit_ideal(K: NumberField, order: Order | None = None) -> IdealHNF:
    o = order or K.order
    return IdealHNF(K, o, tuple(tuple(int(i == j) for j in range(o.n)) for i in range(o.n)))


def principal_ideal(K: NumberField, alpha: Sequence[int], order: Order | None = None) -> IdealHNF:
    o = order or K.order
    nrm = abs(o.norm(alpha))
    if nrm == 0:
        raise ValueError("zero element")
    return _make(K, o, o.mul_matrix(alpha).tolist(), nrm)


def ideal_from_generators(K: NumberField, gens: Sequence[Sequence[int]],
                          order: Order | None = None, modulus: int | None = None) -> IdealHNF:
    """Integral ideal generated over the order by ``gens`` (a multiple of some
    nonzero rational integer contained in the ideal may be passed as ``modulus``)."""
    o = order or K.order
    rows = []
    for g in gens:
        rows.extend(o.mul_matrix(g).tolist())
    if modulus is None:
        m = 0
        for g in gens:
            if any(g):
                m = gcd(m, abs(o.norm(g)))
        modulus = m or None
    return _make(K, o, rows, modulus)


def ideal_norm(I: IdealHNF) -> Fraction:
    d = 1
    for i in range(I.n):
        d *= I.matrix[i][i]
    return Fraction(abs(d), I.denominator ** I.n)


def ideal_mul(I: IdealHNF, J: IdealHNF) -> IdealHNF:
    _check(I, J)
    o = I.order
    HJ = fmpz_mat(J.rows())
    rows = []
    for a in I.matrix:
        rows.extend((HJ * o.mul_matrix(a)).tolist())
    nI, nJ = ideal_norm(I), ideal_norm(J)
    modulus = int(nI * I.denominator ** I.n) * int(nJ * J.denominator ** J.n)
    return _make(I.field, o, rows, modulus, I.denominator * J.denominator)


def ideal_add(I: IdealHNF, J: IdealHNF) -> IdealHNF:
    _check(I, J)
    d = I.denominator * J.denominator // gcd(I.denominator, J.denominator)
    rows = [[x * (d // I.denominator) for x in r] for r in I.matrix]
    rows += [[x * (d // J.denominator) for x in r] for r in J.matrix]
    return _make(I.field, I.order, rows, None, d)


def ideal_pow(I: IdealHNF, e: int) -> IdealHNF:
    if e < 0:
        raise ValueError("use ideal_inverse for negative powers")
    result = unit_ideal(I.field, I.order)
    base = I
    while e:
        if e & 1:
            result = ideal_mul(result, base)
        e >>= 1
        if e:
            base = ideal_mul(base, base)
    return result


def ideal_scale(I: IdealHNF, a: int) -> IdealHNF:
    return _make(I.field, I.order, [[x * a for x in r] for r in I.matrix], None, I.denominator)


def ideal_inverse(I: IdealHNF) -> IdealHNF:
    """Inverse of an invertible fractional ideal.

    For integral I of norm N, N*I^{-1} = {x in O : x*I in N*O} is computed as
    the kernel of x -> (x*g_t mod N)_t via one HNF of a stacked matrix.
    """
    o = I.order
    n = o.n
    num = IdealHNF(I.field, o, I.matrix, 1)
    N = int(ideal_norm(num))
    if N == 1:
        return ideal_scale(unit_ideal(I.field, o), I.denominator) if I.denominator > 1 else num
    blocks = [o.mul_matrix(g).tolist() for g in num.matrix]
    nn = n * n
    stacked = []
    for k in range(n):
        left = [blocks[t][k][j] for t in range(n) for j in range(n)]
        stacked.append(left + [int(k == j) for j in range(n)])
    for i in range(nn):
        stacked.append([N if j == i else 0 for j in range(nn)] + [0] * n)
    h = fmpz_mat(stacked).hnf().tolist()
    ker = [[int(x) for x in r[nn:]] for r in h[nn:nn + n]]
    res = _make(I.field, o, ker, N, N)
    if I.denominator > 1:
        res = ideal_scale(res, I.denominator)
    return res


def apply_map(I: IdealHNF, images: Sequence[Element]) -> IdealHNF:
    """Image of I under the ring map sending basis element k to ``images[k]``."""
    o = I.order
    rows = []
    for r in I.matrix:
        x = [0] * o.n
        for c, img in zip(r, images):
            if c:
                x = [a + c * b for a, b in zip(x, img)]
        rows.append(x)
    N = int(ideal_norm(IdealHNF(I.field, o, I.matrix, 1)))
    return _make(I.field, o, [r for g in rows for r in o.mul_matrix(g).tolist()], N, I.denominator)


# ---------------------------------------------------------------------------
# prime ideals
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PrimeIdealFactor:
    ideal: IdealHNF
    p: int
    e: int
    f: int
    anti: Element = field(repr=False, default=())  # beta with beta*P in pO, beta not in pO

    @property
    def norm(self) -> int:
        return self.p ** self.f

    def __eq__(self, other):
        return isinstance(other, PrimeIdealFactor) and self.ideal == other.ideal

    def __hash__(self):
        return hash(self.ideal)


def _anti_uniformizer(o: Order, P: IdealHNF, p: int) -> Element:
    cols = [o.mul_matrix(g).tolist() for g in P.matrix]
    rows = [[cols[t][k][j] for t in range(o.n) for j in range(o.n)] for k in range(o.n)]
    ker = left_kernel_mod(rows, p)
    for v in ker:
        if any(x % p for x in v):
            return tuple(v)
    raise AssertionError("no anti-uniformizer found")


def element_valuation(P: PrimeIdealFactor, x: Sequence[int]) -> int:
    """v_P(x) for a nonzero element of the order."""
    o = P.ideal.order
    if not any(x):
        raise ValueError("valuation of zero")
    p = P.p
    mb = o.mul_matrix(P.anti)
    v = 0
    x = [int(c) for c in x]
    while True:
        y = (fmpz_mat(1, o.n, x) * mb).tolist()[0]
        if any(int(c) % p for c in y):
            return v
        x = [int(c) // p for c in y]
        v += 1


def ideal_valuation(P: PrimeIdealFactor, I: IdealHNF) -> int:
    v = min(element_valuation(P, r) for r in I.matrix if any(r))
    d = I.denominator
    k = 0
    while d % P.p == 0:
        d //= P.p
        k += 1
    return v - P.e * k


def _p_log(N: int, p: int) -> int:
    f = 0
    while N > 1:
        assert N % p == 0
        N //= p
        f += 1
    return f


def _split_maximal(o: Order, p: int, J: list[list[int]], frob: list[list[int]]) -> list[list[list[int]]]:
    """Maximal ideals containing the ideal J (which contains the p-radical)."""
    n = o.n
    Jmod = [[x % p for x in r] for r in J]
    a = [[(frob[k][j] - int(k == j)) % p for j in range(n)] for k in range(n)] + Jmod
    sol = [v[:n] for v in left_kernel_mod(a, p)]
    rank_j = nmod_mat(Jmod, p).rank() if any(any(r) for r in Jmod) else 0
    one = [int(j == 0) for j in range(n)]
    base = Jmod + [one]
    rank_base = nmod_mat(base, p).rank()
    if nmod_mat(Jmod + sol, p).rank() - rank_j <= 1:
        return [J]
    x = next(v for v in sol if nmod_mat(base + [v], p).rank() > rank_base)
    # minimal polynomial of x modulo J
    powers = [one]
    while True:
        powers.append(list(o.mul_mod(x, powers[-1], p)))
        ker = left_kernel_mod(powers + Jmod, p)
        k = len(powers) - 1
        good = [v for v in ker if v[k] % p]
        if good:
            v = good[0]
            inv = pow(v[k], -1, p)
            mpoly = nmod_poly([c * inv % p for c in v[: k + 1]], p)
            break
    lin = mpoly.factor()[1]
    assert all(g.degree() == 1 for g, _ in lin)
    roots = [(-int(g[0])) % p for g, _ in lin]
    out = []
    for c in roots:
        xc = list(x)
        xc[0] = (xc[0] - c) % p
        rows = J + o.mul_matrix(xc).tolist()
        Jc = lattice_hnf(rows, n, p)
        out.extend(_split_maximal(o, p, Jc, frob))
    return out


def _sort_key(P: PrimeIdealFactor):
    return (P.f, P.e, P.ideal.matrix)


def factor_rational_prime(K: NumberField, q: int, order: Order | None = None) -> list[PrimeIdealFactor]:
    """Prime ideals above q with their ramification indices and residue degrees."""
    o = order or K.local_order(q)
    n = o.n
    factors: list[PrimeIdealFactor] = []
    if o.index % q:
        # Dedekind: Z[t] is q-maximal
        fq = nmod_poly([int(c) for c in K.fpoly.coeffs()], q)
        for g, e in fq.factor()[1]:
            gz = [int(c) for c in g.coeffs()]
            elt = o.from_poly(gz)
            rows = o.mul_matrix(elt).tolist()
            P = _make(K, o, rows, q)
            factors.append(PrimeIdealFactor(P, q, int(e), g.degree(), _anti_uniformizer(o, P, q)))
    else:
        rad = radical_mod(o, q)
        frob = [list(r) for r in (o.pow_mod(tuple(int(i == k) for i in range(n)), q, q) for k in range(n))]
        for M in _split_maximal(o, q, rad, frob):
            P = IdealHNF(K, o, tuple(tuple(r) for r in M), 1)
            f = _p_log(int(ideal_norm(P)), q)
            pf = PrimeIdealFactor(P, q, 0, f, _anti_uniformizer(o, P, q))
            e = element_valuation(pf, o.scalar(q))
            factors.append(PrimeIdealFactor(P, q, e, f, pf.anti))
    factors.sort(key=_sort_key)
    assert sum(P.e * P.f for P in factors) == n
    return factors


def p_times_inverse(P: PrimeIdealFactor) -> IdealHNF:
    """The integral ideal p*P^{-1} = pO + beta*O (same class as P^{-1})."""
    o = P.ideal.order
    return ideal_from_generators(P.ideal.field, [o.scalar(P.p), P.anti], o, modulus=P.p)
