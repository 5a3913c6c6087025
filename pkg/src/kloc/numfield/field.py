"""Orders and number fields Q[x]/(f).

An :class:`Order` stores a Z-basis ``omega_k = (num[k] . (1, t, ..., t^{n-1})) / den``
of a subring of Q(t) in lower triangular form (``omega_0 = 1``) together with
its multiplication table.  Elements are integer coordinate tuples.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from math import factorial, gcd, isqrt
from typing import Sequence

import flint
from flint import acb, arb, fmpq, fmpq_mat, fmpq_poly, fmpz, fmpz_mat, fmpz_poly, nmod_mat

from ..errors import DegreeZero, NotMonic, PrecisionExhausted, Reducible
from ._linalg import hnf_lower, lattice_hnf, left_kernel_mod
from .poly import format_poly, parse_poly

Element = tuple[int, ...]

# above this degree, primes are factored in a q-maximal order only
LOCAL_ORDER_DEGREE = 12


def eval_at(g: fmpq_poly, z):
    """Evaluate a rational polynomial at a ball ``z`` (acb) by Horner's rule."""
    num = g.numer()
    acc = 0 * z
    for c in reversed(num.coeffs()):
        acc = acc * z + int(c)
    return acc / int(g.denom())


def _fmpq_to_fraction(x) -> Fraction:
    return Fraction(int(x.p), int(x.q))


class Order:
    """A full-rank subring of Q[x]/(f) containing Z[t]."""

    def __init__(self, f: fmpz_poly, num: Sequence[Sequence[int]], den: int):
        self.f = f
        self.fq = fmpq_poly(f)
        self.n = f.degree()
        self.num = [list(map(int, r)) for r in num]
        self.den = int(den)
        self._B = fmpq_mat(self.num) * fmpq(1, self.den)
        self._Binv = self._B.inv()

    def __eq__(self, other):
        return (isinstance(other, Order) and self.f == other.f
                and self.den == other.den and self.num == other.num)

    def __hash__(self):
        return hash((self.den, tuple(map(tuple, self.num))))

    # -- conversions ------------------------------------------------------
    def basis_poly(self, k: int) -> fmpq_poly:
        return fmpq_poly(self.num[k]) / self.den

    def to_poly(self, x: Sequence[int]) -> fmpq_poly:
        row = fmpq_mat(1, self.n, [int(c) for c in x]) * self._B
        return fmpq_poly([row[0, j] for j in range(self.n)])

    def rational_coords(self, g) -> list[Fraction]:
        """Coordinates of a polynomial (reduced mod f) in this basis."""
        g = fmpq_poly(g) % self.fq
        c = g.coeffs() + [0] * (self.n - g.degree() - 1)
        row = fmpq_mat(1, self.n, c[: self.n]) * self._Binv
        return [_fmpq_to_fraction(row[0, j]) for j in range(self.n)]

    def from_poly(self, g) -> Element:
        rc = self.rational_coords(g)
        if any(v.denominator != 1 for v in rc):
            raise ValueError("element is not in the order")
        return tuple(int(v) for v in rc)

    def contains_poly(self, g) -> bool:
        return all(v.denominator == 1 for v in self.rational_coords(g))

    def scalar(self, a: int) -> Element:
        return (int(a),) + (0,) * (self.n - 1)

    @property
    def one(self) -> Element:
        return self.scalar(1)

    # -- multiplication ---------------------------------------------------
    @cached_property
    def tables(self) -> list[fmpz_mat]:
        """``tables[k]`` has row l equal to the coordinates of omega_k*omega_l."""
        n = self.n
        polys = [self.basis_poly(k) for k in range(n)]
        entries = [[None] * n for _ in range(n)]
        for k in range(n):
            for l in range(k, n):
                c = self.from_poly(polys[k] * polys[l])
                entries[k][l] = entries[l][k] = c
        return [fmpz_mat([list(entries[k][l]) for l in range(n)]) for k in range(n)]

    def mul_matrix(self, x: Sequence[int]) -> fmpz_mat:
        """Matrix of y -> y*x: row l holds the coordinates of omega_l*x."""
        m = fmpz_mat(self.n, self.n)
        for k, c in enumerate(x):
            if c:
                m += self.tables[k] * int(c)
        return m

    def mul(self, x: Sequence[int], y: Sequence[int]) -> Element:
        r = fmpz_mat(1, self.n, [int(c) for c in y]) * self.mul_matrix(x)
        return tuple(int(r[0, j]) for j in range(self.n))

    def pow(self, x: Sequence[int], e: int) -> Element:
        result = self.one
        base = tuple(x)
        while e:
            if e & 1:
                result = self.mul(result, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return result

    def norm(self, x: Sequence[int]) -> int:
        return int(self.mul_matrix(x).det())

    def trace(self, x: Sequence[int]) -> int:
        m = self.mul_matrix(x)
        return int(sum(m[i, i] for i in range(self.n)))

    def charpoly(self, x: Sequence[int]) -> fmpz_poly:
        return self.mul_matrix(x).charpoly()

    def tables_mod(self, q: int) -> list[nmod_mat]:
        cache = self.__dict__.setdefault("_tables_mod", {})
        if q not in cache:
            cache[q] = [nmod_mat(t.tolist(), q) for t in self.tables]
        return cache[q]

    def mul_matrix_mod(self, x: Sequence[int], q: int) -> nmod_mat:
        m = nmod_mat(self.n, self.n, q)
        for k, c in enumerate(x):
            c = int(c) % q
            if c:
                m += self.tables_mod(q)[k] * c
        return m

    def mul_mod(self, x, y, q: int) -> Element:
        r = nmod_mat(1, self.n, [int(c) % q for c in y], q) * self.mul_matrix_mod(x, q)
        return tuple(int(r[0, j]) for j in range(self.n))

    def pow_mod(self, x, e: int, q: int) -> Element:
        result = self.scalar(1)
        base = tuple(int(c) % q for c in x)
        while e:
            if e & 1:
                result = self.mul_mod(result, base, q)
            e >>= 1
            if e:
                base = self.mul_mod(base, base, q)
        return result

    # -- invariants -------------------------------------------------------
    @cached_property
    def index(self) -> int:
        """[O : Z[t]]."""
        d = 1
        for k in range(self.n):
            d *= self.num[k][k]
        idx = Fraction(self.den ** self.n, abs(d))
        assert idx.denominator == 1
        return int(idx)

    @cached_property
    def discriminant(self) -> int:
        d = int(self.f.discriminant())
        q, r = divmod(d, self.index ** 2)
        assert r == 0
        return q


def _normalized_order(f: fmpz_poly, num, den: int) -> Order:
    num = hnf_lower(num)
    g = den
    for r in num:
        for x in r:
            g = gcd(g, x)
    num = [[x // g for x in r] for r in num]
    return Order(f, num, den // g)


def _frobenius_rows(order: Order, q: int, exponent: int) -> list[Element]:
    return [order.pow_mod(tuple(int(i == k) for i in range(order.n)), exponent, q)
            for k in range(order.n)]


def radical_mod(order: Order, q: int) -> list[list[int]]:
    """HNF basis of the q-radical {x : x^m in qO for some m} of the order."""
    n = order.n
    e = q
    while e < n:
        e *= q
    phi = _frobenius_rows(order, q, e)
    ker = left_kernel_mod(phi, q)
    return lattice_hnf(ker, n, q)


def _ring_of_multipliers(order: Order, ideal: list[list[int]], q: int):
    """Basis of U = {x in O : x I in qI}, or None when U = qO."""
    n = order.n
    H = fmpz_mat(ideal)
    Hinv = fmpq_mat(H).inv()
    rows = []
    for k in range(n):
        c = fmpq_mat(H * order.tables[k]) * Hinv
        flat = []
        for i in range(n):
            for j in range(n):
                v = c[i, j]
                assert v.q == 1
                flat.append(int(v.p) % q)
        rows.append(flat)
    ker = left_kernel_mod(rows, q)
    if not ker:
        return None
    return lattice_hnf(ker, n, q)


def p_maximal_order(order: Order, q: int) -> Order:
    """Round 2 enlargement of ``order`` at the prime q."""
    while True:
        rad = radical_mod(order, q)
        u = _ring_of_multipliers(order, rad, q)
        if u is None:
            return order
        new_num = (fmpz_mat(u) * fmpz_mat(order.num)).tolist()
        order = _normalized_order(order.f, [[int(x) for x in r] for r in new_num], order.den * q)


def equation_order(f: fmpz_poly) -> Order:
    n = f.degree()
    return Order(f, [[int(i == j) for j in range(n)] for i in range(n)], 1)


def _coerce_poly(f) -> fmpz_poly:
    if isinstance(f, str):
        return fmpz_poly(parse_poly(f))
    if isinstance(f, fmpz_poly):
        return f
    return fmpz_poly([int(c) for c in f])


class NumberField:
    """Q[x]/(f) for a monic irreducible integer polynomial f."""

    def __init__(self, f: fmpz_poly):
        self.fpoly = f
        self.degree = f.degree()
        self._local: dict[int, Order] = {}

    # identity is the defining polynomial
    def __eq__(self, other):
        return isinstance(other, NumberField) and self.fpoly == other.fpoly

    def __hash__(self):
        return hash(tuple(int(c) for c in self.fpoly.coeffs()))

    def __repr__(self):
        return f"NumberField({self.poly_text!r})"

    @property
    def poly(self) -> tuple[int, ...]:
        return tuple(int(c) for c in self.fpoly.coeffs())

    @property
    def poly_text(self) -> str:
        return format_poly(self.poly)

    @cached_property
    def poly_discriminant(self) -> int:
        return int(self.fpoly.discriminant())

    @cached_property
    def order(self) -> Order:
        """The maximal order."""
        o = self._local.get(0) or equation_order(self.fpoly)
        d = abs(self.poly_discriminant)
        for q, e in fmpz(d).factor() if d > 1 else []:
            q = int(q)
            if e >= 2:
                o = p_maximal_order(o, q)
        return o

    def local_order(self, q: int) -> Order:
        """An order that is maximal at q.

        This is the maximal order when it is already known or the degree is
        small enough for the full discriminant factorization to be cheap.
        """
        if "order" in self.__dict__ or self.degree <= LOCAL_ORDER_DEGREE:
            return self.order
        if q not in self._local:
            o = equation_order(self.fpoly)
            if self.poly_discriminant % (q * q) == 0:
                o = p_maximal_order(o, q)
            self._local[q] = o
        return self._local[q]

    @property
    def integral_basis(self) -> list[list[Fraction]]:
        o = self.order
        return [[Fraction(x, o.den) for x in r] for r in o.num]

    @property
    def index(self) -> int:
        return self.order.index

    @property
    def discriminant(self) -> int:
        return self.order.discriminant

    @cached_property
    def signature(self) -> tuple[int, int]:
        # flint isolates real roots with an exactly zero imaginary part
        r1 = sum(1 for r, _ in self.fpoly.complex_roots() if r.imag.is_zero())
        return r1, (self.degree - r1) // 2

    def roots(self, prec: int = 128) -> list[acb]:
        """Roots of f: r1 real ones (ascending) then one of each complex pair."""
        cache = self.__dict__.setdefault("_roots", {})
        if prec not in cache:
            with flint.ctx.workprec(prec):
                raw = [r for r, _ in self.fpoly.complex_roots()]
                real = [r for r in raw if r.imag.is_zero()]
                upper = [r for r in raw if not r.imag.is_zero() and r.imag > 0]
                if len(real) != self.signature[0] or len(upper) != self.signature[1]:
                    raise PrecisionExhausted("could not separate real and complex roots")
                real = sorted(real, key=lambda r: float(r.real.mid()))
                cplx = sorted(upper, key=lambda r: (float(r.real.mid()), float(r.imag.mid())))
                cache[prec] = [acb(r.real) for r in real] + cplx
        return cache[prec]

    def embed(self, x: Sequence[int], prec: int = 128, order: Order | None = None) -> list[acb]:
        """Values of the element x at the r1 + r2 embeddings."""
        o = order or self.order
        g = o.to_poly(x)
        with flint.ctx.workprec(prec):
            return [eval_at(g, r) for r in self.roots(prec)]

    def minkowski_bound(self) -> Fraction:
        n = self.degree
        r1, r2 = self.signature
        d = abs(self.discriminant)
        s = isqrt(d)
        if r2 == 0 and s * s == d:
            return Fraction(factorial(n), n ** n) * s
        with flint.ctx.workprec(128):
            b = arb(factorial(n)) / arb(n) ** n * (4 / arb.pi()) ** r2 * arb(d).sqrt()
            up = (b * 10 ** 9).upper().ceil().unique_fmpz()
        return Fraction(int(up), 10 ** 9)


def new_field(f) -> NumberField:
    """Validate f (text, coefficient list low-first, or fmpz_poly) and build Q[x]/(f)."""
    fp = _coerce_poly(f)
    if fp.degree() < 1:
        raise DegreeZero(f"polynomial {format_poly(fp.coeffs())} has degree < 1")
    if int(fp.leading_coefficient()) != 1:
        raise NotMonic(format_poly(fp.coeffs()))
    _, facs = fp.factor()
    if len(facs) != 1 or facs[0][1] != 1:
        raise Reducible(format_poly(fp.coeffs()))
    return NumberField(fp)


def rational_field() -> NumberField:
    return new_field([0, 1])
