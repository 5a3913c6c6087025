"""Minkowski embeddings, LLL reduction and Fincke-Pohst enumeration."""

from __future__ import annotations

import math
from typing import Iterator, Sequence

import flint
from flint import arb, fmpz_mat

from ..errors import EffortExceeded, PrecisionExhausted
from .field import NumberField, Order, eval_at

SQRT2 = math.sqrt(2.0)


def place_degrees(K: NumberField) -> list[int]:
    r1, r2 = K.signature
    return [1] * r1 + [2] * r2


def basis_embeddings(K: NumberField, order: Order, prec: int) -> list[list]:
    """``emb[k][j]`` = value (acb) of basis element k at place j."""
    cache = order.__dict__.setdefault("_emb", {})
    if prec not in cache:
        roots = K.roots(prec)
        with flint.ctx.workprec(prec):
            cache[prec] = [[eval_at(order.basis_poly(k), r) for r in roots] for k in range(order.n)]
    return cache[prec]


def t2_coordinates(K: NumberField, order: Order, rows: Sequence[Sequence[int]], prec: int,
                   weights: Sequence[float] | None = None) -> list[list[arb]]:
    """Real coordinates whose squared length is the (weighted) T2 norm.

    Complex places contribute sqrt(2)*Re and sqrt(2)*Im so that
    sum_j d_j w_j^2 |sigma_j(x)|^2 is the squared Euclidean length.
    """
    emb = basis_embeddings(K, order, prec)
    r1, r2 = K.signature
    out = []
    with flint.ctx.workprec(prec):
        s2 = arb(2).sqrt()
        for row in rows:
            vals = []
            for j in range(r1 + r2):
                acc = 0
                for k, c in enumerate(row):
                    if c:
                        acc += emb[k][j] * int(c)
                w = arb(weights[j]) if weights is not None else arb(1)
                if j < r1:
                    vals.append(acc.real * w)
                else:
                    vals.append(acc.real * s2 * w)
                    vals.append(acc.imag * s2 * w)
            out.append(vals)
    return out


def _to_int_matrix(vals: list[list[arb]], shift: int) -> fmpz_mat:
    rows = []
    for r in vals:
        row = []
        for v in r:
            m, e = v.mid().man_exp()
            m, e = int(m), int(e) + shift
            row.append(m << e if e >= 0 else (m >> -e))
        rows.append(row)
    return fmpz_mat(rows)


def _check_precision(vals: list[list[arb]], rel_bits: int = 40) -> None:
    for r in vals:
        for v in r:
            if not v.is_finite() or (not v.is_zero() and v.rel_accuracy_bits() < rel_bits
                                     and float(v.rad()) > 1e-12):
                raise PrecisionExhausted("embedding precision too low")


def lll_reduce(K: NumberField, order: Order, rows: Sequence[Sequence[int]], prec: int = 128,
               weights: Sequence[float] | None = None, shift: int = 50) -> list[list[int]]:
    """LLL-reduce the Z-span of ``rows`` (order coordinates) for the weighted T2 form."""
    vals = t2_coordinates(K, order, rows, prec, weights)
    _check_precision(vals)
    m = _to_int_matrix(vals, shift)
    _, T = m.lll(transform=True)
    red = (T * fmpz_mat([list(map(int, r)) for r in rows])).tolist()
    return [[int(x) for x in r] for r in red]


def gram_matrix(vals: list[list[arb]]) -> list[list[float]]:
    fl = [[float(v.mid()) for v in r] for r in vals]
    n = len(fl)
    return [[math.fsum(a * b for a, b in zip(fl[i], fl[j])) for j in range(n)] for i in range(n)]


def _cohen_form(G: list[list[float]]) -> list[list[float]]:
    """Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2 (Cholesky in Cohen's layout)."""
    n = len(G)
    q = [row[:] for row in G]
    for i in range(n):
        if q[i][i] <= 0:
            raise PrecisionExhausted("Gram matrix not positive definite in floating point")
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def fincke_pohst(G: list[list[float]], bound: float, cap: int | None = None) -> Iterator[tuple[int, ...]]:
    """All nonzero x (up to sign) with x G x^T <= bound."""
    q = _cohen_form(G)
    n = len(G)
    x = [0] * n
    count = 0

    def rec(i: int, remaining: float, top_zero: bool):
        nonlocal count
        c = -sum(q[i][j] * x[j] for j in range(i + 1, n))
        r = math.sqrt(max(remaining, 0.0) / q[i][i])
        lo = math.ceil(c - r - 1e-9)
        hi = math.floor(c + r + 1e-9)
        if top_zero:
            lo = max(lo, 0)
        for v in range(lo, hi + 1):
            x[i] = v
            rem = remaining - q[i][i] * (v - c) ** 2
            if rem < -1e-9 * bound:
                continue
            if i == 0:
                if top_zero and v == 0:
                    continue
                count += 1
                if cap is not None and count > cap:
                    raise EffortExceeded(f"more than {cap} lattice points in enumeration")
                yield tuple(x)
            else:
                yield from rec(i - 1, rem, top_zero and v == 0)
        x[i] = 0

    yield from rec(n - 1, bound, True)


def ball_volume(dim: int, radius_sq: float) -> float:
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1) * radius_sq ** (dim / 2)
