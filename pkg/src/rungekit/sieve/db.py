"""Line-delimited JSON database of externally computed ranks and generators.

One object per curve, keyed by the quartic's gammas (translated so the first
is 0) and its squarefree ``aJ``.  Generators are points on the Weierstrass
model ``Y^2 = X(X+A)(X+B)`` with coordinates as decimal numerator/denominator
strings.  Each generator is re-checked on load; rank claims are recorded as
assumptions, not verified.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from ..ec import CurvePoint, curve_from_quadruple, is_torsion

Key = tuple[tuple[int, ...], int]


class DBError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class GeneratorRecord:
    gammas: tuple[int, int, int, int]
    aJ: int
    rank: int
    gens: tuple[CurvePoint, ...]
    torsion_order: int | None = None
    provenance: str = ""

    @property
    def key(self) -> Key:
        return self.gammas, self.aJ

    def assumption(self) -> str:
        return f"rank {self.rank} for gammas={list(self.gammas)} aJ={self.aJ} ({self.provenance})"

    def to_json(self) -> dict:
        return {
            "gammas": list(self.gammas),
            "aJ": self.aJ,
            "rank": self.rank,
            "gens": [
                [str(P.x.numerator), str(P.x.denominator), str(P.y.numerator), str(P.y.denominator)]
                for P in self.gens
            ],
            "torsion_order": self.torsion_order,
            "provenance": self.provenance,
        }


def parse_record(obj: dict, line: int = 0) -> GeneratorRecord:
    try:
        gammas = tuple(int(g) for g in obj["gammas"])
        aJ = int(obj["aJ"])
        rank = int(obj["rank"])
        raw = obj["gens"]
        torsion = obj.get("torsion_order")
        provenance = str(obj.get("provenance", ""))
    except (KeyError, TypeError, ValueError) as exc:
        raise DBError(line, f"malformed record: {exc}") from exc
    if len(gammas) != 4 or gammas[0] != 0:
        raise DBError(line, "gammas must be four integers starting at 0")
    if rank < 0 or rank > 2:
        raise DBError(line, f"rank {rank} outside 0..2")
    try:
        _, curve = curve_from_quadruple(gammas, aJ)
    except ValueError as exc:
        raise DBError(line, str(exc)) from exc
    gens = []
    for g in raw:
        try:
            xn, xd, yn, yd = (int(s) for s in g)
            P = CurvePoint(Fraction(xn, xd), Fraction(yn, yd))
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise DBError(line, f"bad generator {g!r}: {exc}") from exc
        if not curve.contains(P):
            raise DBError(line, f"generator {g!r} is not on Y^2 = X(X+{curve.A})(X+{curve.B})")
        if is_torsion(P, curve):
            raise DBError(line, f"generator {g!r} is a torsion point")
        gens.append(P)
    if len(gens) != rank:
        raise DBError(line, f"{len(gens)} generators listed for claimed rank {rank}")
    return GeneratorRecord(gammas, aJ, rank, tuple(gens), None if torsion is None else int(torsion), provenance)


@dataclass
class GeneratorDB:
    records: dict[Key, GeneratorRecord] = field(default_factory=dict)
    source: str = ""

    def get(self, key: Key) -> GeneratorRecord | None:
        return self.records.get(key)

    def __len__(self):
        return len(self.records)

    def __contains__(self, key):
        return key in self.records

    def add(self, rec: GeneratorRecord) -> None:
        self.records[rec.key] = rec

    def dumps(self) -> str:
        lines = [json.dumps(self.records[k].to_json(), sort_keys=True) for k in sorted(self.records)]
        return "\n".join(lines) + ("\n" if lines else "")


def load_db_lines(lines: Iterable[str], source: str = "") -> GeneratorDB:
    db = GeneratorDB(source=source)
    for n, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DBError(n, f"invalid JSON: {exc.msg}") from exc
        rec = parse_record(obj, n)
        if rec.key in db.records and db.records[rec.key] != rec:
            raise DBError(n, f"conflicting duplicate record for {rec.key}")
        db.add(rec)
    return db


def load_db(path: str | Path) -> GeneratorDB:
    with open(path) as fh:
        return load_db_lines(fh, str(path))
