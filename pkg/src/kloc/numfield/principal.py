"""Unit sublattices and certified principality testing.

A generator alpha of an integral ideal I of norm N can be multiplied by a
unit from any full rank unit subgroup E so that, with Log_j = d_j log|sigma_j|,

    |Log_j(alpha) - d_j log(N)/n| <= M_j = 1/2 sum_k |Log_j(eps_k)|

for a basis eps_k of E.  Hence |sigma_j(alpha)| <= R_j with
R_j = N^{1/n} exp(M_j/d_j), and sum_j d_j |sigma_j(alpha)|^2 / R_j^2 <= n.
Enumerating that ellipsoid exhaustively certifies a negative answer.
"""

from __future__ import annotations

import math
import random
from itertools import product
from dataclasses import dataclass
from typing import Sequence

import flint
from flint import fmpq_poly, fmpz_mat

from ..errors import EffortExceeded, PrecisionExhausted
from .field import Element, NumberField, Order
from .ideals import IdealHNF, ideal_norm, principal_ideal
from .lattice import (ball_volume, basis_embeddings, fincke_pohst, gram_matrix, lll_reduce,
                      place_degrees, t2_coordinates)

SAFETY = 1.2


@dataclass(frozen=True)
class UnitLattice:
    """Log vectors (one float per infinite place) of a basis of a full rank unit subgroup."""

    logs: tuple[tuple[float, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.logs)

    def half_sums(self, places: int) -> list[float]:
        return [0.5 * math.fsum(abs(v[j]) for v in self.logs) for j in range(places)]

    def covolume(self) -> float:
        """Regulator of the subgroup (absolute determinant after dropping one place)."""
        if not self.logs:
            return 1.0
        r = len(self.logs)
        m = [list(v[:r]) for v in self.logs]
        # plain Gaussian elimination in floats
        det = 1.0
        for i in range(r):
            piv = max(range(i, r), key=lambda k: abs(m[k][i]))
            if abs(m[piv][i]) < 1e-300:
                return 0.0
            m[i], m[piv] = m[piv], m[i]
            det *= m[i][i]
            for k in range(i + 1, r):
                f = m[k][i] / m[i][i]
                m[k] = [a - f * b for a, b in zip(m[k], m[i])]
        return abs(det)


def log_vector(K: NumberField, order: Order, x: Sequence[int], prec: int = 128) -> list[float]:
    emb = basis_embeddings(K, order, prec)
    degs = place_degrees(K)
    out = []
    with flint.ctx.workprec(prec):
        for j, d in enumerate(degs):
            acc = 0
            for k, c in enumerate(x):
                if c:
                    acc += emb[k][j] * int(c)
            a = abs(acc)
            if a.contains(0):
                raise PrecisionExhausted("embedding of a nonzero element not separated from 0")
            out.append(d * float(a.log().mid()))
    return out


def _solve(basis: list[list[float]], u: list[float]) -> list[float] | None:
    """Real t with u = sum t_k basis_k on the first r coordinates (None if singular)."""
    r = len(basis)
    m = [[basis[k][j] for k in range(r)] + [u[j]] for j in range(r)]
    for i in range(r):
        piv = max(range(i, r), key=lambda k: abs(m[k][i]))
        if abs(m[piv][i]) < 1e-9:
            return None
        m[i], m[piv] = m[piv], m[i]
        for k in range(r):
            if k != i:
                f = m[k][i] / m[i][i]
                m[k] = [a - f * b for a, b in zip(m[k], m[i])]
    return [m[i][r] / m[i][i] for i in range(r)]


def _residual(basis: list[list[float]], u: list[float]) -> float:
    """Distance from u to the real span of the basis (Gram-Schmidt)."""
    ortho: list[list[float]] = []
    for b in basis + [u]:
        v = list(b)
        for o in ortho:
            c = math.fsum(x * y for x, y in zip(v, o)) / math.fsum(y * y for y in o)
            v = [x - c * y for x, y in zip(v, o)]
        ortho.append(v)
    return math.sqrt(math.fsum(x * x for x in ortho[-1]))


def _lll_logs(basis: list[list[float]]) -> list[list[float]]:
    r = len(basis)
    rows = [[round(v[j] * 2 ** 40) for j in range(r)] for v in basis]
    _, T = fmpz_mat(rows).lll(transform=True)
    return [[math.fsum(int(T[i, k]) * basis[k][j] for k in range(r)) for j in range(len(basis[0]))]
            for i in range(r)]


def _absorb(basis: list[list[float]], u: list[float], rank: int, max_den: int = 10 ** 4) -> list[list[float]]:
    """Basis of the lattice generated by ``basis`` and the log vector u."""
    if max(abs(x) for x in u) < 1e-6:
        return basis
    if len(basis) < rank:
        if _residual(basis, u) > 1e-6:
            return basis + [u]
        if not basis:
            return basis
    t = _solve(basis, u)
    if t is None:
        return basis
    for D in range(1, max_den + 1):
        if all(abs(D * x - round(D * x)) < 1e-6 * D for x in t):
            break
    else:
        return basis
    if D == 1:
        return basis
    r = len(basis)
    rows = [[D * int(i == k) for k in range(r)] for i in range(r)] + [[round(D * x) for x in t]]
    h = fmpz_mat(rows).hnf().tolist()[:r]
    new = [[math.fsum(int(h[i][k]) * basis[k][j] for k in range(r)) / D for j in range(len(u))]
           for i in range(r)]
    return _lll_logs(new)


def _quotient_if_unit(order: Order, a: Element, b: Element) -> Element | None:
    pa, pb = order.to_poly(a), order.to_poly(b)
    g, s, _ = pb.xgcd(order.fq)
    q = (pa * s / g) % order.fq
    if order.contains_poly(q):
        return order.from_poly(q)
    return None


def unit_lattice(K: NumberField, order: Order | None = None, seed: int = 0,
                 max_rounds: int = 400, extra_rounds: int = 12) -> UnitLattice:
    """A full rank unit subgroup found by weighted LLL searches (cached per order)."""
    o = order or K.order
    cached = o.__dict__.get("_units")
    if cached is not None:
        return cached
    r1, r2 = K.signature
    r = r1 + r2 - 1
    if r == 0:
        o.__dict__["_units"] = UnitLattice(())
        return o.__dict__["_units"]
    degs = place_degrees(K)
    rng = random.Random(seed)
    n = o.n
    prec = 128 + 8 * n
    basis = [[int(i == j) for j in range(n)] for i in range(n)]
    spread = 1.0 + math.log(abs(K.discriminant) + 1) / n
    logs: list[list[float]] = []
    by_norm: dict[int, list[Element]] = {}
    stable = 0
    for rnd in range(max_rounds):
        width = spread * (1 + rnd / 10)
        w = [rng.uniform(-width, width) for _ in degs] if rnd else [0.0] * len(degs)
        mean = math.fsum(d * x for d, x in zip(degs, w)) / n
        weights = [math.exp(x - mean) for x in w]
        try:
            red = lll_reduce(K, o, basis, prec, weights)
        except PrecisionExhausted:
            prec *= 2
            continue
        cands = list(red[: min(n, 6)])
        for i in range(min(n, 4)):
            for j in range(i + 1, min(n, 4)):
                cands.append([a + b for a, b in zip(red[i], red[j])])
                cands.append([a - b for a, b in zip(red[i], red[j])])
        new, fresh = [], []
        for c in cands:
            c = tuple(c)
            if not any(c):
                continue
            N = abs(o.norm(c))
            if N == 1:
                new.append(c)
                continue
            bucket = by_norm.setdefault(N, [])
            for other in bucket:
                u = _quotient_if_unit(o, c, other)
                if u is not None:
                    new.append(u)
                    break
            else:
                if len(bucket) < 8:
                    bucket.append(c)
        for u in new:
            try:
                lv = log_vector(K, o, u, prec)
            except PrecisionExhausted:
                continue
            if max(abs(v) for v in lv) > 1e-6:
                fresh.append(lv)
        before = len(logs), UnitLattice(tuple(map(tuple, logs))).covolume()
        for lv in fresh:
            logs = _absorb(logs, lv, r)
        if len(logs) == r:
            cov = UnitLattice(tuple(map(tuple, logs))).covolume()
            stable = stable + 1 if before == (r, cov) else 0
            if stable >= extra_rounds:
                break
    if len(logs) != r:
        raise EffortExceeded(f"unit search found rank {len(logs)} < {r}")
    res = UnitLattice(tuple(tuple(v) for v in logs))
    o.__dict__["_units"] = res
    return res


def _default_prec(K: NumberField, N: int) -> int:
    height = max(abs(int(c)) for c in K.fpoly.coeffs()).bit_length()
    return 128 + 2 * N.bit_length() + 4 * K.degree + 2 * height


def is_principal(I: IdealHNF, safety: float = SAFETY, prec: int | None = None,
                 cap: int = 2_000_000) -> Element | None:
    """A generator of the integral ideal I, or None when provably none exists."""
    if not I.is_integral:
        raise ValueError("is_principal expects an integral ideal")
    K, o = I.field, I.order
    N = int(ideal_norm(I))
    if N == 1:
        return o.one
    prec = prec or _default_prec(K, N)
    for _ in range(4):
        try:
            return _principal_search(I, N, safety, prec, cap)
        except PrecisionExhausted:
            prec *= 2
    raise PrecisionExhausted(f"could not certify principality at {prec} bits")


def _subdivision(M: list[float], r: int, n: int, sqrt_disc: float, bound: float) -> int:
    """Number of slices per unit direction minimising the expected enumeration work."""
    if r == 0:
        return 1
    best_k, best_cost = 1, math.inf
    for k in range(1, 65):
        cost = k ** r * (ball_volume(n, bound) * math.exp(sum(M) / k) / sqrt_disc + 5)
        if cost < best_cost:
            best_k, best_cost = k, cost
    return best_k


def _principal_search(I: IdealHNF, N: int, safety: float, prec: int, cap: int) -> Element | None:
    K, o = I.field, I.order
    n = o.n
    degs = place_degrees(K)
    units = unit_lattice(K, o)
    M = units.half_sums(len(degs))
    logN = math.log(N)
    bound = safety * n
    slices = _subdivision(M, units.rank, n, math.sqrt(abs(K.discriminant)), bound)
    centers = [-0.5 + (a + 0.5) / slices for a in range(slices)]
    for t in product(centers, repeat=units.rank):
        z = [math.fsum(tk * u[j] for tk, u in zip(t, units.logs)) for j in range(len(degs))]
        R = [math.exp((d * logN / n + z[j] + M[j] / slices) / d) for j, d in enumerate(degs)]
        found = _ellipsoid_search(I, N, [1.0 / x for x in R], bound, prec, cap)
        if found is not None:
            return found
    return None


def _ellipsoid_search(I: IdealHNF, N: int, weights: list[float], bound: float, prec: int,
                      cap: int) -> Element | None:
    """Search x in I with sum_j d_j w_j^2 |sigma_j(x)|^2 <= bound and |N(x)| = N."""
    K, o = I.field, I.order
    n = o.n
    degs = place_degrees(K)
    logN = math.log(N)
    red = lll_reduce(K, o, I.rows(), prec, weights)
    for row in red:
        if abs(o.norm(row)) == N:
            return _verified(I, tuple(row))
    vals = t2_coordinates(K, o, red, prec, weights)
    G = gram_matrix(vals)
    # Gaussian heuristic for the number of points to visit
    det = abs(float(fmpz_mat([[round(x * 2 ** 20) for x in r] for r in G]).det())) / 2 ** (20 * n)
    if det <= 0:
        raise PrecisionExhausted("degenerate Gram matrix")
    expected = ball_volume(n, bound) / math.sqrt(det)
    if expected > cap:
        raise EffortExceeded(f"principality enumeration needs about {expected:.3g} points")
    fl = [[float(v.mid()) for v in r] for r in vals]
    for x in fincke_pohst(G, bound, cap=10 * cap + 1000):
        y = [math.fsum(c * fl[k][j] for k, c in enumerate(x) if c) for j in range(len(fl[0]))]
        # approximate log norm from the weighted coordinates
        lg = 0.0
        pos = 0
        ok = True
        for j, d in enumerate(degs):
            if d == 1:
                a2 = y[pos] ** 2
                pos += 1
            else:
                a2 = (y[pos] ** 2 + y[pos + 1] ** 2) / 2
                pos += 2
            if a2 <= 0:
                ok = False
                break
            lg += d * (0.5 * math.log(a2) - math.log(weights[j]))
        if not ok or abs(lg - logN) > 1e-3:
            continue
        alpha = tuple(sum(c * red[k][j] for k, c in enumerate(x)) for j in range(n))
        if abs(o.norm(alpha)) == N:
            return _verified(I, alpha)
    return None


def _verified(I: IdealHNF, alpha: Element) -> Element:
    assert principal_ideal(I.field, alpha, I.order) == I
    return alpha
