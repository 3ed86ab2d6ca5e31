"""Build the generator database and the sampled k=11 configurations (development tool).

Ranks and generators come from PARI/GP through cypari2 (``ellrank``, then
``ellsaturation``).  A record is written only when the lower and upper rank
bounds agree and the rank is at most 2.  This script is not needed at run
time; its output lives in tests/data.

    python3 tools/build_generator_db.py --out tests/data
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

import cypari2  # noqa: E402

from rungekit.ec import CurvePoint  # noqa: E402
from rungekit.sieve.configs import (  # noqa: E402
    Configuration,
    _prime_choices,
    curves_for,
    config_from_solution,
    gamma_tuples,
    max_a_prime,
)
from rungekit.exact_arith import primes_upto  # noqa: E402
from rungekit.sieve.db import GeneratorDB, GeneratorRecord  # noqa: E402
from rungekit.sieve.fixtures import table_pairs  # noqa: E402
from rungekit.sieve.solutions import smooth_offsets, witness  # noqa: E402

SATURATION_BOUND = 500
EXCEPTIONAL = Configuration(17, (0, 1, 2, 10, 13, 14), (1, 15, 14, 6, 3, 2))

pari = cypari2.Pari()
pari.allocatemem(10**9)
PROVENANCE = f"PARI/GP {'.'.join(str(v) for v in pari.version()[:3])} ellrank+ellsaturation({SATURATION_BOUND}) via cypari2"


def _frac(z) -> Fraction:
    return Fraction(int(pari.numerator(z)), int(pari.denominator(z)))


def rank_record(cd) -> GeneratorRecord | None:
    A, B = cd.curve.A, cd.curve.B
    e = pari.ellinit([0, A + B, 0, A * B, 0])
    lo, hi, _, pts = pari.ellrank(e)
    lo, hi = int(lo), int(hi)
    if lo != hi or lo > 2:
        return None
    if lo:
        pts = pari.ellsaturation(e, pts, SATURATION_BOUND)
    gens = tuple(CurvePoint(_frac(P[0]), _frac(P[1])) for P in pts)
    tors = int(pari.elltors(e)[0])
    gammas, aJ = cd.key
    return GeneratorRecord(gammas, aJ, lo, gens, tors, PROVENANCE)


def coverable(config: Configuration, db: GeneratorDB) -> str | None:
    ranks = []
    for cd in curves_for(config):
        rec = db.get(cd.key)
        ranks.append(None if rec is None else rec.rank)
    if 0 in ranks:
        return "I"
    if ranks.count(1) >= 2:
        return "II"
    if 2 in ranks:
        return "III"
    return None


def add_config(config: Configuration, db: GeneratorDB, missing: set) -> str | None:
    for cd in curves_for(config):
        if cd.key in db or cd.key in missing:
            continue
        rec = rank_record(cd)
        if rec is None:
            missing.add(cd.key)
        else:
            db.add(rec)
    return coverable(config, db)


def random_a(gammas, k, rng: random.Random) -> tuple[int, ...]:
    a = [1] * 6
    for q in primes_upto(max_a_prime(k)):
        choices = _prime_choices(gammas, q)
        # favour leaving a prime out so that curves stay small
        pick = choices[0] if rng.random() < 0.5 else rng.choice(choices)
        for i in pick:
            a[i] *= q
    return tuple(a)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="tests/data")
    ap.add_argument("--seed", type=int, default=20240611)
    ap.add_argument("--planted", type=int, default=10)
    ap.add_argument("--random", type=int, default=10)
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    db = GeneratorDB()
    missing: set = set()
    chosen: list[dict] = []
    seen = set()

    k = 11
    planted_sources = sorted((d, x) for d, x in table_pairs() if witness(x, d, k))
    rng.shuffle(planted_sources)
    for d, x in planted_sources:
        if sum(c["origin"].startswith("planted") for c in chosen) >= args.planted:
            break
        good = smooth_offsets(x, d, k)
        for _ in range(10):
            six = sorted(rng.sample(good, 6))
            config, shift = config_from_solution(x, d, six, k)
            if config in seen:
                continue
            case = add_config(config, db, missing)
            if case:
                seen.add(config)
                chosen.append({**config.to_json(), "origin": f"planted d={d} x={x} shift={shift}", "case": case})
                break

    gts = list(gamma_tuples(k))
    tries = 0
    while sum(c["origin"] == "random" for c in chosen) < args.random and tries < 500:
        tries += 1
        g = rng.choice(gts)
        config = Configuration(k, g, random_a(g, k, rng))
        if config in seen:
            continue
        case = add_config(config, db, missing)
        if case:
            seen.add(config)
            chosen.append({**config.to_json(), "origin": "random", "case": case})

    case = add_config(EXCEPTIONAL, db, missing)
    (out / "generators.jsonl").write_text(db.dumps())
    (out / "configs_k11.json").write_text(json.dumps(chosen, indent=1, sort_keys=True) + "\n")
    (out / "config_exceptional.json").write_text(
        json.dumps({**EXCEPTIONAL.to_json(), "origin": "exceptional", "case": case}, indent=1, sort_keys=True) + "\n"
    )
    print(f"{len(db)} curves, {len(missing)} without a proven rank <= 2, {len(chosen)} configurations")
    for c in chosen:
        print(c["case"], c["gammas"], c["a"], c["origin"])
    print("exceptional:", case)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
