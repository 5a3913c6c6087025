"""Exact integer linear algebra and finite abelian group algebra.

Matrices are plain ``list[list[int]]`` in row-major order.  Group elements
are row vectors and a homomorphism is a matrix whose j-th row is the image
of the j-th generator, so ``phi(x) = x @ M``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, prod
from typing import Iterator, Sequence

from kloc.errors import InfiniteCokernel, MissingCharacter, NotPGroup

IntMatrix = list[list[int]]


# ---------------------------------------------------------------------------
# small helpers
# ---------------------------------------------------------------------------

def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    if not a:
        return []
    cols = len(b[0]) if b else 0
    bt = list(zip(*b)) if b else []
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] if cols else [] for row in a]


def vecmat(v: Sequence[int], m: IntMatrix) -> list[int]:
    if not m:
        return []
    out = [0] * len(m[0])
    for x, row in zip(v, m):
        if x:
            for j, y in enumerate(row):
                out[j] += x * y
    return out


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, u, v)`` with ``u*a + v*b = g = gcd(a, b) >= 0``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def det(m: IntMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Hermite normal form
# ---------------------------------------------------------------------------

def hnf(m: IntMatrix) -> IntMatrix:
    """Row Hermite normal form of ``m``.

    The result has the same shape as ``m``: upper echelon, positive pivots,
    entries above each pivot reduced into ``[0, pivot)``, zero rows last.
    """
    rows = [list(r) for r in m]
    if not rows:
        return []
    ncols = len(rows[0])
    r = 0
    pivots: list[tuple[int, int]] = []
    for j in range(ncols):
        if r == len(rows):
            break
        while True:
            best = None
            for i in range(r, len(rows)):
                v = rows[i][j]
                if v and (best is None or abs(v) < abs(rows[best][j])):
                    best = i
            if best is None:
                break
            rows[r], rows[best] = rows[best], rows[r]
            piv = rows[r]
            done = True
            for i in range(r + 1, len(rows)):
                v = rows[i][j]
                if v:
                    q = v // piv[j]
                    if q:
                        row = rows[i]
                        for t in range(j, ncols):
                            row[t] -= q * piv[t]
                    if rows[i][j]:
                        done = False
            if done:
                break
        if rows[r][j] == 0:
            continue
        if rows[r][j] < 0:
            rows[r] = [-x for x in rows[r]]
        pivots.append((r, j))
        r += 1
    _reduce_above(rows, pivots)
    return rows


def _reduce_above(rows: IntMatrix, pivots: list[tuple[int, int]]) -> None:
    for r, j in pivots:
        p = rows[r][j]
        for i in range(r):
            q = rows[i][j] // p
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]


def hnf_mod(m: IntMatrix, modulus: int) -> IntMatrix:
    """HNF of the lattice spanned by the rows of ``m`` together with
    ``modulus * Z^n``.  Returns the square upper triangular basis.

    All intermediate entries stay below ``modulus``; each pivot column adds
    its annihilator row back into the pool, which keeps the result exact.
    """
    if modulus <= 0:
        raise ValueError("modulus must be positive")
    n = len(m[0]) if m else 0
    pool = [[x % modulus for x in row] for row in m]
    pool = [row for row in pool if any(row)]
    basis: IntMatrix = []
    for j in range(n):
        cur = None
        rest = []
        for row in pool:
            if row[j] % modulus == 0:
                rest.append(row)
                continue
            if cur is None:
                cur = row
                continue
            g, u, v = xgcd(cur[j], row[j])
            a, b = cur[j] // g, row[j] // g
            new_cur = [(u * x + v * y) % modulus for x, y in zip(cur, row)]
            other = [(b * x - a * y) % modulus for x, y in zip(cur, row)]
            cur = new_cur
            if any(other):
                rest.append(other)
        if cur is None:
            h = [0] * n
            h[j] = modulus
        else:
            g, u, _ = xgcd(cur[j], modulus)
            h = [(u * x) % modulus for x in cur]
            h[j] = g
            q = cur[j] // g
            other = [(x - q * y) % modulus for x, y in zip(cur, h)]
            if any(other):
                rest.append(other)
            ann = [((modulus // g) * x) % modulus for x in h]
            if any(ann):
                rest.append(ann)
        basis.append(h)
        pool = rest
    _reduce_above(basis, [(j, j) for j in range(n)])
    return basis


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def snf(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: returns ``(U, D, V)`` with ``U @ m @ V == D``."""
    u, d, v, _ = _snf_full(m)
    return u, d, v


def _snf_full(m: IntMatrix):
    """SNF that also tracks ``V^{-1}``; returns ``(U, D, V, Vinv)``."""
    a = [list(r) for r in m]
    nr = len(a)
    nc = len(a[0]) if nr else 0
    U = identity(nr)
    V = identity(nc)
    Vi = identity(nc)

    def row_op(i, k, q):  # row_i -= q * row_k
        a[i] = [x - q * y for x, y in zip(a[i], a[k])]
        U[i] = [x - q * y for x, y in zip(U[i], U[k])]

    def col_op(j, k, q):  # col_j -= q * col_k ; V^-1: row_k += q * row_j
        for row in a:
            row[j] -= q * row[k]
        for row in V:
            row[j] -= q * row[k]
        Vi[k] = [x + q * y for x, y in zip(Vi[k], Vi[j])]

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for row in a:
            row[j], row[k] = row[k], row[j]
        for row in V:
            row[j], row[k] = row[k], row[j]
        Vi[j], Vi[k] = Vi[k], Vi[j]

    t = 0
    while t < min(nr, nc):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            p = a[t][t]
            clean = True
            for i in range(t + 1, nr):
                if a[i][t]:
                    row_op(i, t, a[i][t] // p)
                    if a[i][t]:
                        clean = False
            for j in range(t + 1, nc):
                if a[t][j]:
                    col_op(j, t, a[t][j] // p)
                    if a[t][j]:
                        clean = False
            if not clean:
                best = None
                for i in range(t, nr):
                    if a[i][t] and (best is None or abs(a[i][t]) < abs(best[1])):
                        best = (("r", i), a[i][t])
                for j in range(t, nc):
                    if a[t][j] and (best is None or abs(a[t][j]) < abs(best[1])):
                        best = (("c", j), a[t][j])
                kind, idx = best[0]
                if kind == "r":
                    swap_rows(t, idx)
                else:
                    swap_cols(t, idx)
                continue
            bad = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            # fold the offending row into the pivot row and redo
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
            U[t] = [x + y for x, y in zip(U[t], U[bad])]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, a, V, Vi


def snf_diagonal(m: IntMatrix) -> list[int]:
    _, d, _ = snf(m)
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


# ---------------------------------------------------------------------------
# finite abelian groups
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteAbelianGroup:
    """``Z/d_1 + ... + Z/d_k`` with ``d_1 | d_2 | ... | d_k`` and all ``d_j >= 2``."""

    invariants: tuple[int, ...] = ()

    def __post_init__(self):
        inv = tuple(int(d) for d in self.invariants)
        object.__setattr__(self, "invariants", inv)
        for d in inv:
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
        for a, b in zip(inv, inv[1:]):
            if b % a:
                raise ValueError(f"divisibility chain broken: {inv}")

    @property
    def order(self) -> int:
        return prod(self.invariants)

    @property
    def rank(self) -> int:
        return len(self.invariants)

    @property
    def exponent(self) -> int:
        return self.invariants[-1] if self.invariants else 1

    def is_trivial(self) -> bool:
        return not self.invariants

    def p_rank(self, p: int) -> int:
        return sum(1 for d in self.invariants if d % p == 0)

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(x % d for x, d in zip(v, self.invariants))

    def elements(self) -> Iterator[tuple[int, ...]]:
        def rec(j):
            if j == len(self.invariants):
                yield ()
                return
            for x in range(self.invariants[j]):
                for rest in rec(j + 1):
                    yield (x,) + rest
        return rec(0)

    def __str__(self) -> str:
        if not self.invariants:
            return "0"
        return " + ".join(f"Z/{d}" for d in self.invariants)


@dataclass(frozen=True)
class Cokernel:
    """Presentation data for ``Z^k / rowspan(relations)``.

    ``to_group`` (k x r) sends an exponent vector to group coordinates;
    ``from_group`` (r x k) sends the t-th cyclic generator to an exponent
    vector representing it.
    """

    group: FiniteAbelianGroup
    to_group: IntMatrix
    from_group: IntMatrix

    def project(self, x: Sequence[int]) -> tuple[int, ...]:
        return self.group.reduce(vecmat(x, self.to_group))

    def lift(self, c: Sequence[int]) -> list[int]:
        return vecmat(c, self.from_group)


def cokernel(relations: IntMatrix, ncols: int, modulus: int | None = None) -> Cokernel:
    """Cokernel of the row lattice of ``relations`` inside ``Z^ncols``.

    If ``modulus`` is given it must be a multiple of the cokernel order;
    the computation is then done modulo it (HNF mod D).
    """
    if ncols == 0:
        return Cokernel(FiniteAbelianGroup(), [], [])
    rels = [list(r) for r in relations if any(r)]
    if modulus is not None:
        h = hnf_mod(rels, modulus)
    else:
        if len(rels) < ncols:
            raise InfiniteCokernel(f"{len(rels)} relations for {ncols} generators")
        h = hnf(rels)[:ncols]
    for j in range(ncols):
        if h[j][j] == 0:
            raise InfiniteCokernel(f"relation lattice has rank < {ncols}")
    # columns with pivot 1 are eliminated by back substitution
    keep = [j for j in range(ncols) if h[j][j] != 1]
    pos = {j: t for t, j in enumerate(keep)}
    r = len(keep)
    phi: list[list[int] | None] = [None] * ncols
    for j in reversed(range(ncols)):
        if h[j][j] != 1:
            e = [0] * r
            e[pos[j]] = 1
            phi[j] = e
        else:
            acc = [0] * r
            for l in range(j + 1, ncols):
                c = h[j][l]
                if c:
                    acc = [x - c * y for x, y in zip(acc, phi[l])]
            phi[j] = acc
    small = []
    for j in keep:
        row = [h[j][j] * x for x in phi[j]]
        for l in range(j + 1, ncols):
            c = h[j][l]
            if c:
                row = [x + c * y for x, y in zip(row, phi[l])]
        small.append(row)
    U, D, V, Vi = _snf_full(small) if r else ([], [], [], [])
    diag = [D[t][t] for t in range(r)]
    nontriv = [t for t in range(r) if diag[t] != 1]
    group = FiniteAbelianGroup(tuple(diag[t] for t in nontriv))
    phiV = matmul([row for row in phi], V) if r else [[] for _ in range(ncols)]
    to_group = [[row[t] % diag[t] for t in nontriv] for row in phiV]
    from_group = []
    for t in nontriv:
        x = [0] * ncols
        for s, j in enumerate(keep):
            x[j] = Vi[t][s]
        from_group.append(x)
    return Cokernel(group, to_group, from_group)


def group_from_relations(generator_count: int, relations: IntMatrix) -> FiniteAbelianGroup:
    """Invariant-factor form of ``Z^generator_count / rowspan(relations)``."""
    return cokernel(relations, generator_count).group


def group_relations(g: FiniteAbelianGroup) -> IntMatrix:
    k = g.rank
    return [[d if i == j else 0 for j in range(k)] for i, d in enumerate(g.invariants)]


def quotient(g: FiniteAbelianGroup, subgroup_gens: Sequence[Sequence[int]]) -> Cokernel:
    """``g / <subgroup_gens>`` with coordinate maps from/to ``g``."""
    rels = group_relations(g) + [list(v) for v in subgroup_gens]
    if g.rank == 0:
        return Cokernel(FiniteAbelianGroup(), [], [])
    return cokernel(rels, g.rank, modulus=g.order)


def induced_action(src: Cokernel, action: IntMatrix) -> IntMatrix:
    """Transport an endomorphism of the ambient group to the quotient."""
    out = []
    for t in range(src.group.rank):
        x = src.lift([int(s == t) for s in range(src.group.rank)])
        out.append(list(src.project(vecmat(x, action))))
    return out


def _factor_out(d: int, p: int) -> tuple[int, int]:
    q = 1
    while d % p == 0:
        d //= p
        q *= p
    return q, d


@dataclass(frozen=True)
class PrimaryPart:
    group: FiniteAbelianGroup
    projection: IntMatrix  # rows: images of the ambient generators
    section: IntMatrix     # rows: ambient images of the p-part generators


def p_primary_part(g: FiniteAbelianGroup, p: int) -> PrimaryPart:
    """p-Sylow subgroup of ``g`` with projection and section in coordinates.

    Coordinate j of the ambient group maps to the ``Z/p^v`` CRT component
    of ``Z/d_j`` (reduction mod ``p^v``); the section is the corresponding
    idempotent lift.
    """
    idx, inv = [], []
    for j, d in enumerate(g.invariants):
        q, _ = _factor_out(d, p)
        if q > 1:
            idx.append(j)
            inv.append(q)
    part = FiniteAbelianGroup(tuple(inv))
    proj = [[int(j == idx[t]) for t in range(len(idx))] for j in range(g.rank)]
    sect = []
    for t, j in enumerate(idx):
        d = g.invariants[j]
        q, m = inv[t], d // inv[t]
        e = (m * pow(m, -1, q)) % d if q > 1 else 0
        row = [0] * g.rank
        row[j] = e
        sect.append(row)
    return PrimaryPart(part, proj, sect)


def restrict_action(pp: PrimaryPart, action: IntMatrix) -> IntMatrix:
    """Action of an ambient endomorphism on the p-primary part."""
    out = []
    for row in pp.section:
        img = vecmat(row, action)
        out.append(list(pp.group.reduce(vecmat(img, pp.projection))))
    return out


# ---------------------------------------------------------------------------
# Galois modules and twisted coinvariants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaloisModule:
    """A finite abelian group with automorphisms and character values.

    ``actors`` holds ``(label, matrix)`` pairs; ``character`` maps a label to
    the unit ``kappa(gamma) = chi(gamma)^i`` modulo ``p^n``.
    """

    group: FiniteAbelianGroup
    actors: tuple[tuple[str, tuple[tuple[int, ...], ...]], ...] = ()
    character: dict = field(default_factory=dict)

    @staticmethod
    def build(group, actors=(), character=None) -> "GaloisModule":
        acts = tuple((str(lbl), tuple(tuple(int(x) for x in row) for row in m)) for lbl, m in actors)
        return GaloisModule(group, acts, dict(character or {}))

    def apply(self, label: str, x: Sequence[int]) -> tuple[int, ...]:
        m = dict(self.actors)[label]
        return self.group.reduce(vecmat(x, [list(r) for r in m]))


def twisted_coinvariants(module: GaloisModule, p: int, n: int) -> FiniteAbelianGroup:
    """``(A (x) mu_{p^n}^{(x) i})_Gamma`` for a p-group ``A``.

    After fixing a generator of the twist this is ``A/p^n A`` modulo the
    subgroup generated by ``kappa(g) * g(a) - a`` over actors ``g`` and
    generators ``a``.
    """
    g = module.group
    for d in g.invariants:
        q, m = _factor_out(d, p)
        if m != 1:
            raise NotPGroup(f"invariant {d} is not a power of {p}")
    for label, _ in module.actors:
        if label not in module.character:
            raise MissingCharacter(label)
    pn = p ** n
    mods = [gcd(d, pn) for d in g.invariants]
    keep = [j for j, d in enumerate(mods) if d > 1]
    if not keep:
        return FiniteAbelianGroup()
    rels = []
    for t, j in enumerate(keep):
        row = [0] * len(keep)
        row[t] = mods[j]
        rels.append(row)
    for label, m in module.actors:
        kappa = module.character[label] % pn
        if gcd(kappa, p) != 1:
            raise ValueError(f"kappa({label}) = {kappa} is not a unit mod {pn}")
        for j in keep:
            img = m[j]
            rels.append([kappa * img[s] - int(s == j) for s in keep])
    bound = 1
    for j in keep:
        bound *= mods[j]
    return cokernel(rels, len(keep), modulus=bound).group
