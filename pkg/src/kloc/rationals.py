"""The base field Q: Bernoulli numbers mod p and the splitting table.

For Q the obstruction at p is the eigenspace A^{(omega^{-i})} of the p-part
of the class group of Q(mu_p), which depends on i only modulo p-1.  Odd
eigenspaces are read off Bernoulli numbers (Herbrand-Ribet):
A^{(omega^j)} != 0 iff p | B_{p-j} for odd j in [3, p-2].  Even eigenspaces
are bounded by the reflection theorem, rk A^{(omega^j)} <= rk A^{(omega^{1-j})},
and vanish for every p below 2^31 by the published verification of
Vandiver's conjecture in that range.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from sympy import isprime

from .errors import EffortExceeded, EvenIndex, OutOfTheoremScope

VANDIVER_VERIFIED_BELOW = 2 ** 31


@dataclass(frozen=True)
class BernoulliTable:
    p: int
    values: dict

    def __getitem__(self, k: int) -> int:
        return self.values[k]


@lru_cache(maxsize=64)
def bernoulli_mod_p(p: int) -> BernoulliTable:
    """B_k mod p for even k in [2, p-3] from sum_{j<=m} C(m+1, j) B_j = 0."""
    if p < 3 or not isprime(p):
        raise ValueError(f"{p} is not an odd prime")
    top = p - 3
    B = [1] + [0] * top
    row = [1, 1]                         # binomial row C(m+1, .) mod p, starting at m = 0
    for m in range(1, top + 1):
        row = [1] + [(row[j - 1] + row[j]) % p for j in range(1, len(row))] + [1]
        if m > 1 and m % 2:
            continue                     # odd Bernoulli numbers past B_1 vanish
        s = sum(row[j] * B[j] for j in range(m)) % p
        B[m] = (-s * pow(row[m], -1, p)) % p
    return BernoulliTable(p, {k: B[k] for k in range(2, top + 1, 2)})


def irregular_indices(p: int) -> set[int]:
    t = bernoulli_mod_p(p)
    return {k for k, v in t.values.items() if v == 0}


def eigenspace_nontrivial(p: int, j: int) -> bool:
    """A^{(omega^j)} != 0 for odd j (Herbrand-Ribet: p | B_{p-j})."""
    j %= p - 1
    if j % 2 == 0:
        raise EvenIndex(f"j = {j} is even")
    if j == 1:
        return False                     # A^{(omega)} = 0 (Herbrand)
    return (p - j) in irregular_indices(p)


@dataclass(frozen=True)
class QSplitting:
    p: int
    i: int
    splits: bool
    eigen_index: int                     # j = -i mod (p-1)
    bernoulli_index: int | None          # responsible k with p | B_k, if any
    route: str


def splits_q_detail(p: int, i: int) -> QSplitting:
    if p == 2:
        raise OutOfTheoremScope("Q is exceptional at p = 2")
    if i < 1:
        raise ValueError("i must be >= 1")
    j = (-i) % (p - 1)
    if j % 2:
        bad = eigenspace_nontrivial(p, j)
        k = (p - j) if bad else None
        return QSplitting(p, i, not bad, j, k, "herbrand-ribet")
    # even eigenspace: reflection against the odd index 1 - j
    jj = (1 - j) % (p - 1)
    if not eigenspace_nontrivial(p, jj):
        return QSplitting(p, i, True, j, None, "reflection")
    if p < VANDIVER_VERIFIED_BELOW:
        return QSplitting(p, i, True, j, None, "vandiver-verified-range")
    raise EffortExceeded(f"even eigenspace for p = {p} beyond the verified Vandiver range")


def splits_q(p: int, i: int) -> bool:
    """Does the localization sequence for K_{2i}(Q) split at p?"""
    return splits_q_detail(p, i).splits
