"""Run the sieve over configurations and turn common X-coordinates into solutions."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from ..runge_bounds import ieq_holds
from ..exact_arith import factorize
from .cases import CASE3_DESK_LOG_HMAX, DEFAULT_LOG_HMAX, CaseFailure, case1, case2, case3
from .configs import Configuration, curves_for
from .db import GeneratorDB
from .solutions import eps_dk, witness


@dataclass(frozen=True)
class FoundSolution:
    x: int
    d: int
    k: int
    gammas: tuple[int, ...]
    b: int
    y: int
    case: str
    config: str

    def to_json(self) -> dict:
        out = asdict(self)
        out["gammas"] = list(self.gammas)
        out["b"], out["y"] = str(self.b), str(self.y)
        return out


@dataclass
class ConfigOutcome:
    config: Configuration
    status: str  # "ok", "skipped" or "failed"
    case: str | None = None
    candidates: list[Fraction] = field(default_factory=list)
    assumptions: list[str] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "config": self.config.to_json(),
            "status": self.status,
            "case": self.case,
            "candidates": [str(X) for X in self.candidates],
            "assumptions": self.assumptions,
            "failures": self.failures,
            "stats": self.stats,
        }


@dataclass
class RunReport:
    k: int
    psi: int
    log_hmax: str
    case3_log_hmax: str
    solutions: list[FoundSolution]
    outcomes: list[ConfigOutcome]
    discarded: list[dict]

    @property
    def r(self) -> int:
        return self.k - self.psi

    @property
    def assumptions(self) -> list[str]:
        return sorted({a for o in self.outcomes for a in o.assumptions})

    @property
    def skipped(self) -> list[ConfigOutcome]:
        return [o for o in self.outcomes if o.status != "ok"]

    @property
    def complete(self) -> bool:
        return not self.skipped

    def pairs(self) -> set[tuple[int, int]]:
        return {(s.d, s.x) for s in self.solutions}

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "psi": self.psi,
            "r": self.r,
            "log_hmax": self.log_hmax,
            "case3_log_hmax": self.case3_log_hmax,
            "complete": self.complete,
            "solutions": [s.to_json() for s in self.solutions],
            "assumptions": self.assumptions,
            "skipped": [o.to_json() for o in self.skipped],
            "discarded": self.discarded,
            "configs": [o.to_json() for o in self.outcomes],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "d", "k", "gammas", "b", "y", "case", "config"])
        for s in self.solutions:
            w.writerow([s.x, s.d, s.k, " ".join(map(str, s.gammas)), s.b, s.y, s.case, s.config])
        return buf.getvalue()


def _config_label(c: Configuration) -> str:
    return f"k={c.k} gammas={list(c.gammas)} a={list(c.a)}"


def solve_config(
    config: Configuration,
    db: GeneratorDB,
    log_hmax=DEFAULT_LOG_HMAX,
    case3_log_hmax=CASE3_DESK_LOG_HMAX,
    image_mode: str = "mw",
) -> ConfigOutcome:
    """Every common X-coordinate of the fifteen quartics up to the cutoff.

    Cases are tried in the order I, II, III; a case that fails is recorded
    and the next available one is tried.
    """
    curves = curves_for(config)
    recs = [db.get(cd.key) for cd in curves]
    rank0 = [i for i, r in enumerate(recs) if r is not None and r.rank == 0]
    rank1 = [i for i, r in enumerate(recs) if r is not None and r.rank == 1]
    rank2 = [i for i, r in enumerate(recs) if r is not None and r.rank == 2]
    failures = []
    if rank0:
        i = rank0[0]
        res = case1(curves[i], recs[i])
        return ConfigOutcome(config, "ok", "I", res.candidates, res.assumptions, failures, res.stats)
    if len(rank1) >= 2:
        i, j = rank1[:2]
        others = [cd for n, cd in enumerate(curves) if n not in (i, j)]
        try:
            res = case2(curves[i], recs[i], curves[j], recs[j], log_hmax, screen_curves=others, image_mode=image_mode)
            return ConfigOutcome(config, "ok", "II", res.candidates, res.assumptions, failures, res.stats)
        except CaseFailure as exc:
            failures.append(f"II: {exc}")
    if rank2:
        i = rank2[0]
        others = [cd for n, cd in enumerate(curves) if n != i]
        try:
            res = case3(curves[i], recs[i], others, case3_log_hmax)
            return ConfigOutcome(config, "ok", "III", res.candidates, res.assumptions, failures, res.stats)
        except CaseFailure as exc:
            failures.append(f"III: {exc}")
    if not failures:
        failures.append("no curve of rank 0, two of rank 1, or one of rank 2 in the database")
        return ConfigOutcome(config, "skipped", None, failures=failures)
    return ConfigOutcome(config, "failed", None, failures=failures)


def solutions_from_candidates(
    outcome: ConfigOutcome, k: int, r: int
) -> tuple[list[FoundSolution], list[dict]]:
    """Shift each common X back to ``(x, d)`` and keep those with a witness of ``r`` terms."""
    config = outcome.config
    label = _config_label(config)
    found, discarded = [], []
    for X in outcome.candidates:
        if X <= 0:
            discarded.append({"X": str(X), "config": label, "reason": "not positive"})
            continue
        xp, d = X.numerator, X.denominator
        for s in range(0, k - config.gammas[-1]):
            x = xp - s * d
            if x <= 0:
                break
            if not ieq_holds(k, r, len(factorize(d).factors), eps_dk(d, k)):
                discarded.append({"X": str(X), "x": x, "d": d, "config": label, "reason": f"inequality fails for r={r}"})
                continue
            sol = witness(x, d, k, r)
            if sol is None:
                discarded.append({"X": str(X), "x": x, "d": d, "config": label, "reason": f"fewer than {r} usable terms"})
                continue
            found.append(FoundSolution(x, d, k, sol.gammas, sol.b, sol.y, outcome.case, label))
    return found, discarded


_WORKER_DB: GeneratorDB | None = None


def _init_worker(db: GeneratorDB) -> None:
    global _WORKER_DB
    _WORKER_DB = db


def _solve_in_worker(args) -> ConfigOutcome:
    config, log_hmax, case3_log_hmax, image_mode = args
    return solve_config(config, _WORKER_DB, log_hmax, case3_log_hmax, image_mode)


def run(
    k: int,
    psi: int,
    db: GeneratorDB,
    configs: Iterable[Configuration],
    log_hmax=DEFAULT_LOG_HMAX,
    case3_log_hmax=CASE3_DESK_LOG_HMAX,
    jobs: int = 1,
    image_mode: str = "mw",
) -> RunReport:
    """Sieve every configuration; the output is independent of ``jobs``."""
    r = k - psi
    if r < 6:
        raise ValueError("need k - psi >= 6")
    configs = list(configs)
    if any(c.k != k for c in configs):
        raise ValueError("every configuration must have the requested k")
    tasks = [(c, log_hmax, case3_log_hmax, image_mode) for c in configs]
    if jobs > 1:
        with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(db,)) as pool:
            outcomes = list(pool.map(_solve_in_worker, tasks))
    else:
        outcomes = [solve_config(c, db, log_hmax, case3_log_hmax, image_mode) for c in configs]
    solutions: set[FoundSolution] = set()
    discarded: list[dict] = []
    for o in outcomes:
        if o.status != "ok":
            continue
        f, dsc = solutions_from_candidates(o, k, r)
        solutions.update(f)
        discarded.extend(dsc)
    # one line per (x, d): keep the record from the first configuration in sorted order
    best: dict[tuple[int, int], FoundSolution] = {}
    for s in sorted(solutions, key=lambda s: (s.d, s.x, s.config)):
        best.setdefault((s.d, s.x), s)
    discarded.sort(key=lambda e: json.dumps(e, sort_keys=True))
    return RunReport(
        k, psi, str(log_hmax), str(case3_log_hmax), sorted(best.values(), key=lambda s: (s.d, s.x)), outcomes, discarded
    )


def check_against_table(report: RunReport, table: Sequence[tuple[int, int]] | set) -> dict:
    """Compare found ``(d, x)`` pairs with a reference table."""
    table = set(table)
    found = report.pairs()
    return {"extra": sorted(found - table), "found_in_table": sorted(found & table)}
