"""JSON analysis reports."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

VERDICT_KINDS = ("does_not_split", "splits_certified", "no_obstruction_up_to")


@dataclass(frozen=True)
class ObstructionSummary:
    n: int
    invariants: tuple[int, ...]
    route: str


@dataclass(frozen=True)
class AnalysisReport:
    field: str
    p: int
    i: int
    verdict_kind: str
    verdict_level: int
    obstructions: tuple[ObstructionSummary, ...]
    jaulent_hypotheses: tuple[bool, bool, bool, bool]
    jaulent_conclusion: bool
    caveats: tuple[str, ...] = ()
    timing_ms: int = 0

    def to_json(self) -> dict:
        return {
            "field": self.field,
            "p": self.p,
            "i": self.i,
            "verdict": {"kind": self.verdict_kind, "level": self.verdict_level},
            "obstructions": [{"n": o.n, "invariants": list(o.invariants), "route": o.route}
                             for o in self.obstructions],
            "jaulent": {"hypotheses": list(self.jaulent_hypotheses), "conclusion": self.jaulent_conclusion},
            "caveats": list(self.caveats),
            "timing_ms": self.timing_ms,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    @staticmethod
    def from_json(d: dict) -> "AnalysisReport":
        if d["verdict"]["kind"] not in VERDICT_KINDS:
            raise ValueError(f"unknown verdict kind {d['verdict']['kind']!r}")
        return AnalysisReport(
            field=d["field"], p=int(d["p"]), i=int(d["i"]),
            verdict_kind=d["verdict"]["kind"], verdict_level=int(d["verdict"]["level"]),
            obstructions=tuple(ObstructionSummary(int(o["n"]), tuple(int(x) for x in o["invariants"]),
                                                  o["route"]) for o in d["obstructions"]),
            jaulent_hypotheses=tuple(bool(x) for x in d["jaulent"]["hypotheses"]),
            jaulent_conclusion=bool(d["jaulent"]["conclusion"]),
            caveats=tuple(d["caveats"]),
            timing_ms=int(d["timing_ms"]),
        )

    @staticmethod
    def loads(text: str) -> "AnalysisReport":
        return AnalysisReport.from_json(json.loads(text))
