"""On-disk cache of class groups, one JSON file per (polynomial SHA-256, p).

Entries are re-verified when loaded: the factor base is recomputed, every
relation with a stored element is checked against the element's valuations,
the presentation is rebuilt from the relations, and the class orders of a
few generators are certified with the principality test.  Anything that
fails falls back to recomputation.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path

from ..classgrp import (ClassGroupConfig, ClassGroupData, Elimination, _FactorBase, _presentation,
                        class_group, verify_generator_orders)
from ..numfield import IdealHNF, NumberField, PrimeIdealFactor

FORMAT_VERSION = 1
SPOT_CHECKS = 3
log = logging.getLogger(__name__)


def cache_key(K: NumberField, p: int) -> str:
    digest = hashlib.sha256(K.poly_text.encode()).hexdigest()
    return f"{digest}-p{p}.json"


def to_dict(Cl: ClassGroupData, p: int) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "poly": Cl.field.poly_text,
        "p": p,
        "seed": Cl.seed,
        "minkowski": Cl.minkowski,
        "generators": [{"p": P.p, "e": P.e, "f": P.f, "matrix": [list(r) for r in P.ideal.matrix],
                        "anti": list(P.anti)} for P in Cl.generators],
        "relations": [list(r) for r in Cl.relations],
        "relation_elements": [list(a) if a is not None else None for a in Cl.relation_elements],
        "eliminations": [{"p": e.p, "ideal": [list(r) for r in e.ideal], "alpha": list(e.alpha)}
                         for e in Cl.eliminations],
        "structure": list(Cl.structure.invariants),
    }


def from_dict(K: NumberField, p: int, d: dict) -> ClassGroupData:
    """Rebuild and re-verify a cached class group (ValueError on any mismatch)."""
    if d.get("format_version") != FORMAT_VERSION:
        raise ValueError("cache format version mismatch")
    if d["poly"] != K.poly_text or d["p"] != p:
        raise ValueError("cache entry for another field")
    o = K.order
    primes = sorted({g["p"] for g in d["generators"]})
    fb = _FactorBase(K, primes)
    gens = tuple(PrimeIdealFactor(IdealHNF(K, o, tuple(tuple(r) for r in g["matrix"])), g["p"], g["e"],
                                  g["f"], tuple(g["anti"])) for g in d["generators"])
    if [P.ideal.matrix for P in gens] != [P.ideal.matrix for P in fb.gens]:
        raise ValueError("factor base mismatch")
    rows = [list(r) for r in d["relations"]]
    elems = [tuple(a) if a is not None else None for a in d["relation_elements"]]
    for a, row in zip(elems, rows):
        if a is not None and fb.element_vector(a) != row:
            # certification rows carry no element; element rows must match exactly
            raise ValueError("relation does not match its element")
    pres, red = _presentation(rows, len(fb.gens))
    if list(pres.group.invariants) != d["structure"]:
        raise ValueError("structure does not match relations")
    elims = tuple(Elimination(e["p"], tuple(tuple(r) for r in e["ideal"]), tuple(e["alpha"]))
                  for e in d["eliminations"])
    Cl = ClassGroupData(K, tuple(fb.gens), tuple(tuple(r) for r in rows), pres.group, pres,
                        tuple(elems), elims, d["minkowski"], d["seed"])
    step = max(1, len(fb.gens) // SPOT_CHECKS)
    if not verify_generator_orders(Cl, range(0, len(fb.gens), step)[:SPOT_CHECKS]):
        raise ValueError("generator order spot check failed")
    return Cl


def write_atomic(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class DiskProvider:
    """Class group provider backed by a cache directory."""

    def __init__(self, directory: str | os.PathLike):
        self.dir = Path(directory)
        self.hits = 0
        self.misses = 0
        self.memory: dict = {}

    def __call__(self, K: NumberField, p: int, config: ClassGroupConfig) -> ClassGroupData:
        key = (K.poly, p)
        if key in self.memory:
            return self.memory[key]
        path = self.dir / cache_key(K, p)
        Cl = None
        if path.exists():
            try:
                Cl = from_dict(K, p, json.loads(path.read_text()))
                self.hits += 1
            except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
                log.warning("discarding cache entry %s: %s", path.name, exc)
        if Cl is None:
            self.misses += 1
            cfg = ClassGroupConfig(**{**config.__dict__, "extra_primes": (p,)})
            Cl = class_group(K, cfg)
            write_atomic(path, to_dict(Cl, p))
        self.memory[key] = Cl
        return Cl
