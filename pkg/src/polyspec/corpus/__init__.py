"""Shipped example polytopes with the diagnostics each one is expected to reproduce."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from ..geometry import Polytope, PolytopeError, direction_report, load_polytope
from ..tolerances import DEFAULT, Tolerances

_DATA = resources.files(__package__) / "data"


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    file: str
    directions: tuple
    flags: dict

    def document(self) -> dict:
        return json.loads((_DATA / self.file).read_text())

    def load(self, tol: Tolerances = DEFAULT) -> Polytope:
        return load_polytope(self.document(), tol)


def _index() -> dict:
    return json.loads((_DATA / "index.json").read_text())


def corpus_list() -> list[CorpusEntry]:
    return [
        CorpusEntry(e["name"], e["file"], tuple(e["directions"]), dict(e["flags"]))
        for e in _index()["entries"]
    ]


def corpus_entry(name: str) -> CorpusEntry:
    for e in corpus_list():
        if e.name == name:
            return e
    raise KeyError(f"no corpus entry {name!r}; available: {[e.name for e in corpus_list()]}")


def load_entry(name: str, tol: Tolerances = DEFAULT) -> Polytope:
    return corpus_entry(name).load(tol)


def corpus_path(name: str):
    """Filesystem path of an entry's polytope document."""
    return _DATA / corpus_entry(name).file


def verify_entry(entry: CorpusEntry, tol: Tolerances = DEFAULT) -> dict:
    out = {"name": entry.name, "passed": False, "checks": []}
    try:
        p = entry.load(tol)
    except PolytopeError as exc:
        out["error"] = f"{type(exc).__name__}: {exc}"
        return out
    checks = out["checks"]
    closure = float(np.abs(p.closure_vector()).max())
    checks.append({"name": "closure", "value": closure, "passed": closure <= tol.closure})
    applicable_any = False
    for dspec in entry.directions:
        rep = direction_report(p, dspec["xi"], tol)
        expected = float(dspec["imbalance"])
        applicable = abs(rep.imbalance) > tol.imbalance
        applicable_any |= applicable
        checks.append({
            "name": f"imbalance {dspec['xi']}",
            "value": rep.imbalance,
            "expected": expected,
            "applicable": applicable,
            "passed": abs(rep.imbalance - expected) <= tol.imbalance,
        })
    flag = bool(entry.flags.get("criterion_applicable"))
    checks.append({"name": "criterion_applicable flag", "value": applicable_any, "expected": flag,
                   "passed": applicable_any == flag})
    if p.explicit_simplices:
        gap = abs(p.divergence_volume() - p.volume)
        checks.append({"name": "volume cross-check", "value": gap, "passed": gap <= 1e-9 * max(1.0, p.volume)})
    out["volume"] = p.volume
    out["passed"] = all(c["passed"] for c in checks)
    return out


def corpus_verify(tol: Tolerances = DEFAULT) -> list[dict]:
    return [verify_entry(e, tol) for e in corpus_list()]


__all__ = ["CorpusEntry", "corpus_list", "corpus_entry", "corpus_path", "corpus_verify", "load_entry",
           "verify_entry"]
