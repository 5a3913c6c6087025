"""Independent brute-force oracles used by the test-suite.

Nothing here imports the code under test beyond plain data containers.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import comb, gcd


def subgroup_closure(mods, gens):
    """All elements of prod Z/mods generated by ``gens`` (BFS closure)."""
    zero = tuple(0 for _ in mods)
    seen = {zero}
    frontier = [zero]
    gens = [tuple(g % m for g, m in zip(v, mods)) for v in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple((a + b) % m for a, b, m in zip(x, g, mods))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def p_group_invariants_from_counts(mods, subgroup, p):
    """Invariant factors of the p-group ``prod Z/mods / subgroup``.

    Uses |Q[p^k]| for k = 1, 2, ... which determines a finite abelian p-group.
    """
    total = 1
    for m in mods:
        total *= m
    order = total // len(subgroup)
    if order == 1:
        return ()
    sizes = [1]
    k = 1
    while sizes[-1] < order:
        pk = p ** k
        cnt = 0
        for x in product(*[range(m) for m in mods]):
            y = tuple((pk * a) % m for a, m in zip(x, mods))
            if y in subgroup:
                cnt += 1
        sizes.append(cnt // len(subgroup))
        k += 1
    # r_k = #{j : a_j >= k}
    logs = []
    for s in sizes:
        e = 0
        while s > 1:
            s //= p
            e += 1
        logs.append(e)
    r = [logs[k] - logs[k - 1] for k in range(1, len(logs))]
    exps = []
    for k in range(1, len(r) + 1):
        count_eq = r[k - 1] - (r[k] if k < len(r) else 0)
        exps += [k] * count_eq
    return tuple(sorted(p ** e for e in exps))


def brute_twisted_coinvariants(invariants, actors, kappas, p, n):
    """Quotient of A/p^nA by <kappa*g(a) - a> computed by enumeration."""
    pn = p ** n
    mods = [gcd(d, pn) for d in invariants]
    gens = []
    for m, kappa in zip(actors, kappas):
        for j in range(len(invariants)):
            gens.append(tuple((kappa * m[j][s] - (s == j)) for s in range(len(invariants))))
    # the full relation subgroup is generated by images of all elements,
    # enumerate them to stay independent of the generator shortcut
    all_rel = []
    for x in product(*[range(mm) for mm in mods]):
        for m, kappa in zip(actors, kappas):
            img = [sum(x[j] * m[j][s] for j in range(len(x))) for s in range(len(x))]
            all_rel.append(tuple(kappa * img[s] - x[s] for s in range(len(x))))
    sub = subgroup_closure(mods, all_rel + gens)
    return p_group_invariants_from_counts(mods, sub, p)


def bernoulli_exact(k):
    """Exact Bernoulli number B_k (B_1 = -1/2) from the defining recurrence."""
    b = [Fraction(1)]
    for m in range(1, k + 1):
        s = sum(comb(m + 1, j) * b[j] for j in range(m))
        b.append(-s / (m + 1))
    return b[k]


def reduced_forms(d):
    """Reduced primitive positive definite binary quadratic forms of disc d<0."""
    forms = []
    a = 1
    while 3 * a * a <= -d:
        for b in range(-a + 1, a + 1):
            if (b * b - d) % (4 * a):
                continue
            c = (b * b - d) // (4 * a)
            if c < a:
                continue
            if c == a and b < 0:
                continue
            if gcd(gcd(a, abs(b)), c) != 1:
                continue
            forms.append((a, b, c))
        a += 1
    return forms


def _egcd(x, y):
    """(g, u, v) with u*x + v*y = g = gcd(x, y) >= 0."""
    u0, v0, u1, v1 = 1, 0, 0, 1
    while y:
        q, r = divmod(x, y)
        x, y = y, r
        u0, u1 = u1, u0 - q * u1
        v0, v1 = v1, v0 - q * v1
    if x < 0:
        return -x, -u0, -v0
    return x, u0, v0


def compose_forms(f, g, d):
    """Gauss composition of primitive forms (textbook algorithm), reduced."""
    (a1, b1, c1), (a2, b2, c2) = f, g
    if a1 > a2:
        (a1, b1, c1), (a2, b2, c2) = (a2, b2, c2), (a1, b1, c1)
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, dd = 0, a1
    else:
        dd, u, v = _egcd(a2, a1)
        y1 = u
    if s % dd == 0:
        y2, x2, d1 = -1, 0, dd
    else:
        d1, u, v = _egcd(s, dd)
        x2, y2 = u, -v
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (b3 * b3 - d) // (4 * a3)
    return reduce_form((a3, b3, c3))


def reduce_form(f):
    a, b, c = f
    d = b * b - 4 * a * c
    while True:
        if b > a or b <= -a:
            b = b % (2 * a)
            if b > a:
                b -= 2 * a
            c = (b * b - d) // (4 * a)
            continue
        if c < a:
            a, b, c = c, -b, a
            continue
        if c == a and b < 0:
            b = -b
        return (a, b, c)


def form_group_structure(d):
    """Order, 2-rank and 3-rank of the form class group of discriminant d."""
    forms = reduced_forms(d)
    h = len(forms)
    # 2-rank by genus theory count of ambiguous forms: |G[2]| = #ambiguous
    amb = [f for f in forms if f[1] == 0 or f[0] == f[1] or f[0] == f[2]]
    two_rank = len(amb).bit_length() - 1
    # 3-rank: count elements of order dividing 3 via composition powers
    ident = reduce_form((1, d % 2, (d % 2 - d) // 4))
    cnt = 0
    for f in forms:
        f3 = compose_forms(compose_forms(f, f, d), f, d)
        if f3 == ident:
            cnt += 1
    three_rank = 0
    while 3 ** (three_rank + 1) <= cnt:
        three_rank += 1
    return h, two_rank, three_rank


def irregular_indices_power_sums(p):
    """Even k in [2, p-3] with p | B_k, via sum_{a<p} a^k = p B_k (mod p^2)."""
    m = p * p
    return {k for k in range(2, p - 2, 2) if sum(pow(a, k, m) for a in range(1, p)) % m == 0}
