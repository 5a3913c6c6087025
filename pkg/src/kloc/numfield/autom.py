"""Roots of polynomials inside a field and field automorphisms.

A root beta in O_K of a monic g is located from its value r at the first
embedding by a closest vector search (Kannan embedding): the lattice spanned
by (W*sigma_1(w_k), T2-coordinates of w_k, 0) and the target (W*r, 0, M) is
LLL-reduced and candidate rows are verified exactly, g(beta) = 0 in Q[x]/(f).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import flint
from flint import arb, fmpq_poly, fmpz_mat, fmpz_poly

from ..errors import PrecisionExhausted
from .field import Element, NumberField, Order, eval_at
from .lattice import _to_int_matrix, basis_embeddings, place_degrees


def compose_mod(g: fmpq_poly, h: fmpq_poly, f: fmpq_poly) -> fmpq_poly:
    """g(h) mod f by Horner's rule."""
    acc = fmpq_poly([0])
    for c in reversed(g.coeffs()):
        acc = (acc * h + c) % f
    return acc


def _is_root(order: Order, g: fmpq_poly, beta: Element) -> bool:
    return compose_mod(g, order.to_poly(beta), order.fq) == 0


def roots_in_field(K: NumberField, g, order: Order | None = None, prec: int | None = None) -> list[Element]:
    """All roots in K of the monic integer polynomial g (each verified exactly)."""
    o = order or K.order
    gz = g if isinstance(g, fmpz_poly) else fmpz_poly([int(c) for c in g])
    gq = fmpq_poly(gz)
    n = o.n
    if gz.degree() < 1:
        return []
    height = max(abs(int(c)) for c in gz.coeffs()) + 1
    T = n * (height + 1) ** 2           # Cauchy bound squared, times n
    d1 = place_degrees(K)[0]
    logX = (n + 4) + math.log2(8 * T)
    wbits = int(math.ceil(n / (2 * d1) * logX)) + 20
    prec = prec or (wbits + 128 + 4 * int(math.log2(max(abs(int(c)) for c in K.fpoly.coeffs()) + 2)))
    for _ in range(3):
        try:
            return _roots_cvp(K, o, gz, gq, T, wbits, prec)
        except PrecisionExhausted:
            prec *= 2
    raise PrecisionExhausted("root search failed to certify")


def _roots_cvp(K, o, gz, gq, T, wbits, prec) -> list[Element]:
    n = o.n
    emb = basis_embeddings(K, o, prec)
    r1, r2 = K.signature
    first_real = r1 > 0
    with flint.ctx.workprec(prec):
        g_roots = [r for r, _ in gz.complex_roots()]
        W = arb(2) ** wbits
        s2 = arb(2).sqrt()
        M = arb(T).sqrt()

        def coords(vals):
            out = []
            for j in range(r1 + r2):
                v = vals[j]
                if j < r1:
                    out.append(v.real)
                else:
                    out.append(v.real * s2)
                    out.append(v.imag * s2)
            return out

        basis_rows = []
        for k in range(n):
            head = [emb[k][0].real * W] + ([] if first_real else [emb[k][0].imag * W])
            basis_rows.append(head + coords(emb[k]) + [arb(0)])
        found: list[Element] = []
        for r in g_roots:
            if first_real and not r.imag.contains(0):
                continue
            head = [r.real * W] + ([] if first_real else [r.imag * W])
            target = head + [arb(0)] * n + [M]
            rows = basis_rows + [target]
            m = _to_int_matrix(rows, 10)
            _, U = m.lll(transform=True)
            for i in range(n + 1):
                c = int(U[i, n])
                if c not in (1, -1):
                    continue
                beta = tuple(-c * int(U[i, k]) for k in range(n))
                if beta not in found and _is_root(o, gq, beta):
                    found.append(beta)
                    break
    return found


@dataclass(frozen=True, eq=False)
class FieldAutomorphism:
    """sigma with sigma(t) = ``image`` (coordinates in the order's basis)."""

    field: NumberField
    order: Order
    image: Element

    def __eq__(self, other):
        return isinstance(other, FieldAutomorphism) and self.image == other.image

    def __hash__(self):
        return hash(self.image)

    @cached_property
    def basis_images(self) -> list[Element]:
        h = self.order.to_poly(self.image)
        return [self.order.from_poly(compose_mod(self.order.basis_poly(k), h, self.order.fq))
                for k in range(self.order.n)]

    def apply(self, x: Sequence[int]) -> Element:
        out = [0] * self.order.n
        for c, img in zip(x, self.basis_images):
            if c:
                out = [a + c * b for a, b in zip(out, img)]
        return tuple(out)

    def compose(self, other: "FieldAutomorphism") -> "FieldAutomorphism":
        """self o other."""
        return FieldAutomorphism(self.field, self.order, self.apply(other.image))

    @property
    def is_identity(self) -> bool:
        return self.order.to_poly(self.image) == fmpq_poly([0, 1])


def automorphisms(K: NumberField, order: Order | None = None) -> list[FieldAutomorphism]:
    """All automorphisms of K, the identity first."""
    o = order or K.order
    imgs = roots_in_field(K, K.fpoly, o)
    auts = [FieldAutomorphism(K, o, b) for b in imgs]
    auts.sort(key=lambda s: (not s.is_identity, s.image))
    assert auts and auts[0].is_identity and K.degree % len(auts) == 0
    return auts
