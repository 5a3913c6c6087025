"""Small flint-backed helpers shared by the number field code."""

from __future__ import annotations

from flint import fmpz_mat, nmod_mat


def lattice_hnf(rows, n: int, modulus: int | None = None) -> list[list[int]]:
    """Row HNF basis (n x n) of the lattice spanned by ``rows`` plus ``modulus*Z^n``."""
    rows = [list(map(int, r)) for r in rows]
    if modulus is not None:
        rows = rows + [[modulus if i == j else 0 for j in range(n)] for i in range(n)]
    h = fmpz_mat(len(rows), n, [x for r in rows for x in r]).hnf().tolist()
    out = [[int(x) for x in r] for r in h[:n]]
    if any(out[i][i] == 0 for i in range(n)):
        raise ValueError("lattice is not of full rank")
    return out


def hnf_lower(rows) -> list[list[int]]:
    """Canonical lower triangular basis: row k has its pivot in column k."""
    n = len(rows[0])
    rev = [list(reversed(r)) for r in rows]
    h = fmpz_mat(rev).hnf().tolist()[:n]
    return [[int(x) for x in reversed(r)] for r in reversed(h)]


def left_kernel_mod(rows, q: int) -> list[list[int]]:
    """Basis of {x : x A = 0 mod q} for the m x k matrix A given by rows (q prime)."""
    m = len(rows)
    k = len(rows[0])
    at = nmod_mat(k, m, [int(rows[i][j]) % q for j in range(k) for i in range(m)], q)
    x, r = at.nullspace()
    return [[int(x[i, c]) for i in range(m)] for c in range(r)]


def det_int(rows) -> int:
    return int(fmpz_mat(rows).det())
