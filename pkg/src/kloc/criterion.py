"""Obstruction groups, verdicts, tower certification and the Jaulent check.

The obstruction at level n is the twisted coinvariant group
(Cl^S(F_{i,n})_p (x) mu_{p^n}^{(x) i})_{Gamma_{i,n}}; the sequence splits iff
it vanishes at every level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol

from .classgrp import ClassGroupConfig, ClassGroupData, class_group, galois_action_on_classes, s_quotient
from .cyclolayer import Layer, build_layer, char_image, is_nonexceptional, layer_s_primes, subgroups
from .errors import OutOfTheoremScope
from .intlinalg import (FiniteAbelianGroup, GaloisModule, induced_action, p_primary_part,
                        restrict_action, twisted_coinvariants)
from .numfield import NumberField, factor_rational_prime

P2_CAVEAT = ("p = 2: the coinvariant group is identified with the obstruction only for large n; "
             "a nontrivial group at any level still rules out splitting")


class ClassGroupProvider(Protocol):
    def __call__(self, K: NumberField, p: int, config: ClassGroupConfig) -> ClassGroupData: ...


class MemoryProvider:
    """In-process memo of class groups keyed by (polynomial, p)."""

    def __init__(self):
        self.store: dict = {}
        self.hits = 0

    def __call__(self, K: NumberField, p: int, config: ClassGroupConfig) -> ClassGroupData:
        key = (K.poly, p, config)
        if key in self.store:
            self.hits += 1
        else:
            cfg = ClassGroupConfig(**{**config.__dict__, "extra_primes": (p,)})
            self.store[key] = class_group(K, cfg)
        return self.store[key]


@dataclass
class CriterionConfig:
    class_groups: ClassGroupConfig = field(default_factory=ClassGroupConfig)
    provider: Callable = field(default_factory=MemoryProvider)
    max_tower_degree: int = 36      # largest layer built for the total ramification check

    def class_group(self, K: NumberField, p: int) -> ClassGroupData:
        return self.provider(K, p, self.class_groups)


_DEFAULT = None


def _cfg(config: CriterionConfig | None) -> CriterionConfig:
    global _DEFAULT
    if config is not None:
        return config
    if _DEFAULT is None:
        _DEFAULT = CriterionConfig()
    return _DEFAULT


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LayerSummary:
    degree: int                     # [F_{i,n} : Q]
    gamma_order: int
    s_primes: tuple[tuple[int, int], ...]   # (e, f) over Q of the primes above p
    class_group: tuple[int, ...]
    s_class_group_p: tuple[int, ...]


@dataclass(frozen=True)
class ObstructionReport:
    p: int
    i: int
    n: int
    group: FiniteAbelianGroup
    layer: LayerSummary | None
    route: str                      # "level-zero" | "coinvariants" | "nakayama"
    caveat: str | None = None

    @property
    def trivial(self) -> bool:
        return self.group.is_trivial()


@dataclass(frozen=True)
class SplittingVerdict:
    kind: str                       # "does_not_split" | "splits_certified" | "no_obstruction_up_to"
    level: int
    reports: tuple[ObstructionReport, ...] = ()
    certificate: dict | None = None
    for_all_i: bool = False


@dataclass(frozen=True)
class Hypothesis:
    holds: bool
    evidence: str


@dataclass(frozen=True)
class JaulentReport:
    hypotheses: tuple[Hypothesis, Hypothesis, Hypothesis, Hypothesis]
    conclusion: dict | None

    @property
    def flags(self) -> list[bool]:
        return [h.holds for h in self.hypotheses]


# ---------------------------------------------------------------------------
# obstruction groups
# ---------------------------------------------------------------------------

def _check_scope(F: NumberField, p: int) -> None:
    if p == 2 and not is_nonexceptional(F):
        raise OutOfTheoremScope("p = 2 requires a nonexceptional base field")


def mu_p_in(F: NumberField, p: int) -> bool:
    return len(char_image(F, p, 1)) == 1


def s_class_p_part(F: NumberField, p: int, config: CriterionConfig | None = None):
    """(Cl, Cl^S, p-primary part of Cl^S) for the field F."""
    cfg = _cfg(config)
    Cl = cfg.class_group(F, p)
    S = s_quotient(Cl, p)
    return Cl, S, p_primary_part(S.structure, p)


def obstruction(F: NumberField, p: int, i: int, n: int,
                config: CriterionConfig | None = None) -> ObstructionReport:
    if i < 1 or n < 0:
        raise ValueError("need i >= 1 and n >= 0")
    _check_scope(F, p)
    caveat = P2_CAVEAT if p == 2 else None
    if n == 0:
        return ObstructionReport(p, i, 0, FiniteAbelianGroup(), None, "level-zero", caveat)
    cfg = _cfg(config)
    L = build_layer(F, p, n, i)
    K = L.layer_field
    Cl, S, A = s_class_p_part(K, p, cfg)
    primes = factor_rational_prime(K, p, K.order)
    summary = LayerSummary(K.degree, L.degree, tuple((P.e, P.f) for P in primes),
                           Cl.structure.invariants, A.group.invariants)
    if A.group.is_trivial():
        route = "nakayama" if mu_p_in(F, p) else "coinvariants"
        return ObstructionReport(p, i, n, FiniteAbelianGroup(), summary, route, caveat)
    actors, chars = [], {}
    for t, (sigma, kappa) in enumerate(L.gamma):
        if sigma.is_identity:
            continue
        M = galois_action_on_classes(Cl, sigma)
        MS = induced_action(S.quotient_map, M)
        actors.append((f"g{t}", restrict_action(A, MS)))
        chars[f"g{t}"] = kappa
    module = GaloisModule.build(A.group, actors, chars)
    group = twisted_coinvariants(module, p, n)
    return ObstructionReport(p, i, n, group, summary, "coinvariants", caveat)


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

def trieste_shortcut(F: NumberField, p: int, config: CriterionConfig | None = None) -> SplittingVerdict | None:
    """mu_p in F and (Cl^S_F)_p != 0 force non-splitting for every i >= 1."""
    if p == 2 and not is_nonexceptional(F):
        return None
    if not mu_p_in(F, p):
        return None
    _, _, A = s_class_p_part(F, p, config)
    if A.group.is_trivial():
        return None
    return SplittingVerdict("does_not_split", 1, for_all_i=True)


def _cyclotomic_subfield(F: NumberField, p: int, n0: int) -> bool:
    """Is F contained in Q(mu_{p^k}) for some k <= n0 + 1?"""
    for k in range(1, n0 + 2):
        H = char_image(F, p, k)
        if (p - 1) * p ** (k - 1) // len(H) == F.degree:
            return True
    return F.degree == 1


def _gamma_order(F: NumberField, p: int, n: int, i: int) -> int:
    H = char_image(F, p, n).elements
    m = p ** n
    return len(H) // sum(1 for h in H if pow(h, i, m) == 1)


def certify_split_tower(F: NumberField, p: int, i: int, n0: int,
                        config: CriterionConfig | None = None) -> dict | None:
    """Certificate that Cl^S(F_{i,n})_p = 0 for every n >= n0, or None.

    Sufficient condition: a unique prime above p in F_{i,n0}, totally ramified
    in F_{i,infinity}/F_{i,n0}, and (Cl^S(F_{i,n0}))_p = 0.  The tower above
    level n0 is a procyclic pro-p extension unramified outside p, so
    A_n / (sigma - 1) A_n injects into A_{n0} = 0 and A_n = 0 by Nakayama.
    """
    if n0 < 1:
        return None
    cfg = _cfg(config)
    _check_scope(F, p)
    L0 = build_layer(F, p, n0, i)
    K0 = L0.layer_field
    above = factor_rational_prime(K0, p, K0.order)
    if len(above) != 1:
        return None
    _, _, A = s_class_p_part(K0, p, cfg)
    if not A.group.is_trivial():
        return None
    if _cyclotomic_subfield(F, p, n0):
        ram = "cyclotomic: p is totally ramified in Q(mu_{p^infinity})"
    else:
        g0 = _gamma_order(F, p, n0, i)
        n1 = next((n for n in range(n0 + 1, n0 + 6) if _gamma_order(F, p, n, i) > g0), None)
        if n1 is None:
            return None
        if F.degree * _gamma_order(F, p, n1, i) > cfg.max_tower_degree:
            return None
        L1 = build_layer(F, p, n1, i)
        sp = layer_s_primes(L1).layer_primes
        if len(sp) != 1 or sp[0].e != above[0].e * (L1.layer_field.degree // K0.degree):
            return None
        ram = f"checked: the prime above {p} is totally ramified at level {n1}"
    return {"n0": n0, "layer_degree": K0.degree, "unique_prime": True,
            "s_class_group_p": [], "ramification": ram}


def analyze_splitting(F: NumberField, p: int, i: int, max_level: int = 2,
                      config: CriterionConfig | None = None) -> SplittingVerdict:
    if max_level < 1:
        raise ValueError("max_level must be >= 1")
    cfg = _cfg(config)
    _check_scope(F, p)
    shortcut = trieste_shortcut(F, p, cfg)
    reports: list[ObstructionReport] = []
    for n in range(1, max_level + 1):
        rep = obstruction(F, p, i, n, cfg)
        reports.append(rep)
        if not rep.trivial:
            return SplittingVerdict("does_not_split", n, tuple(reports),
                                    for_all_i=shortcut is not None)
        if shortcut is not None:
            raise AssertionError("trivial obstruction contradicts the shortcut")
        cert = certify_split_tower(F, p, i, n, cfg)
        if cert is not None:
            return SplittingVerdict("splits_certified", n, tuple(reports), cert)
    return SplittingVerdict("no_obstruction_up_to", max_level, tuple(reports))


# ---------------------------------------------------------------------------
# Jaulent's criterion
# ---------------------------------------------------------------------------

def jaulent_check(F: NumberField, p: int, config: CriterionConfig | None = None) -> JaulentReport:
    if p == 2:
        raise ValueError("jaulent_check needs an odd prime")
    cfg = _cfg(config)
    h1 = mu_p_in(F, p)
    H1 = Hypothesis(h1, f"chi(G_F) mod {p} = {list(char_image(F, p, 1).elements)}")
    _, S, A = s_class_p_part(F, p, cfg)
    h2 = A.group.invariants == (p,)
    H2 = Hypothesis(h2, f"(Cl^S)_{p} = {A.group} (Cl^S = {S.structure})")
    primes = factor_rational_prime(F, p, F.order)
    h3 = len(primes) == 1
    H3 = Hypothesis(h3, f"{len(primes)} prime(s) above {p}: (e, f) = {[(P.e, P.f) for P in primes]}")
    L = build_layer(F, p, 2, 1)
    if L.degree == 1:
        H4 = Hypothesis(False, f"F(mu_{p * p}) = F")
    else:
        sp = layer_s_primes(L)
        split = all(s.totally_split and len(s.above) == L.degree for s in sp.splitting)
        H4 = Hypothesis(split, f"[F(mu_{p * p}):F] = {L.degree}; relative (e, f) above p: "
                               f"{[s.relative for s in sp.splitting]}")
    hyps = (H1, H2, H3, H4)
    conclusion = None
    if all(h.holds for h in hyps):
        conclusion = {"wild_kernel_trivial": True, "splits": False, "for_all_i": True}
    return JaulentReport(hyps, conclusion)
