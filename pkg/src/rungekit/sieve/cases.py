"""The three ways of finding every common X-coordinate up to a height cutoff.

X-coordinates are those of the quartic models ``a_J Y^2 = prod (X + gamma)``
with the configuration's own gammas.  Modulo q they live in the projective
line, encoded as ``0..q-1`` with ``q`` standing for infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from ..ec import (
    CurvePoint,
    ModCurve,
    add,
    canonical_height_interval,
    group_order,
    index_cutoff,
    mod_add,
    mod_mul,
    order_from_multiple,
    pair_heights,
    reduce_mod,
    scalar_mul,
    torsion_subgroup,
    x_E_to_F,
    x_F_to_E,
    x_set,
)
from ..exact_arith import primes_upto
from .configs import CurveData
from .db import GeneratorRecord

DEFAULT_LOG_HMAX = 10**14
CASE3_DESK_LOG_HMAX = 400
MAX_SIEVE_PRIME = 10**4
EXACT_LOG_HEIGHT_LIMIT = 50_000  # largest canonical height (nats) evaluated exactly


class CaseFailure(RuntimeError):
    """The sieve could not certify its output (never a silent truncation)."""


# ---------------------------------------------------------------------------
# reductions
# ---------------------------------------------------------------------------


def x_E_mod(R, cd: CurveData, q: int) -> int:
    """Quartic X-coordinate of a point of the Weierstrass model mod q (``q`` = infinity)."""
    g1 = cd.model.gammas[0]
    if R is None:
        return -g1 % q
    shift = (R[0] - cd.model.pole) % q
    if shift == 0:
        return q
    return (cd.model.numerator * pow(shift, -1, q) - g1) % q


def image_x_set(cd: CurveData, q: int) -> frozenset[int]:
    """``X(E_J(F_q))`` in the projective line over ``F_q``."""
    C = ModCurve(cd.curve.A, cd.curve.B, q)
    out = {x_E_mod(None, cd, q)}
    for x in x_set(C):
        out.add(x_E_mod((x, 0), cd, q))
    return frozenset(out)


def is_good_prime(q: int, curves: Iterable[CurveData]) -> bool:
    """Odd prime of good reduction where every quartic-to-Weierstrass map stays invertible."""
    if q == 2:
        return False
    for cd in curves:
        if cd.curve.discriminant % q == 0 or cd.model.numerator % q == 0:
            return False
    return True


def exact_X(P: CurvePoint, cd: CurveData) -> Fraction | None:
    return x_F_to_E(P.x, cd.model)


def on_curve_X(X: Fraction, cd: CurveData) -> bool:
    """``X`` is the X-coordinate of a rational point of the quartic (exact)."""
    x = x_E_to_F(X, cd.model)
    if x is None:
        return True
    return bool(cd.curve.lift_x(x))


def _orbit(P, C: ModCurve, limit: int) -> list | None:
    """``[0 P, 1 P, ...]`` up to the order of ``P``; None if the order exceeds ``limit``."""
    out = [None]
    R = P
    while R is not None:
        if len(out) > limit:
            return None
        out.append(R)
        R = mod_add(R, P, C)
    return out


def _mod_torsion(tors: Sequence[CurvePoint], q: int) -> list:
    return [reduce_mod(T, q) for T in tors]


# ---------------------------------------------------------------------------
# Case I
# ---------------------------------------------------------------------------


@dataclass
class CaseResult:
    case: str
    candidates: list[Fraction]
    assumptions: list[str]
    stats: dict = field(default_factory=dict)


def case1(cd: CurveData, record: GeneratorRecord) -> CaseResult:
    """Rank-0 curve: the X-coordinates of its torsion points."""
    if record.rank != 0:
        raise ValueError("Case I needs a rank-0 curve")
    xs = set()
    for T in torsion_subgroup(cd.curve):
        X = exact_X(T, cd)
        if X is not None:
            xs.add(X)
    return CaseResult("I", sorted(xs), [record.assumption()], {"curve": list(cd.key[0]), "aJ": cd.key[1]})


# ---------------------------------------------------------------------------
# Case II
# ---------------------------------------------------------------------------


@dataclass
class SievePrime:
    q: int
    order_A: int
    order_B: int
    image: frozenset[int]
    allowed: list[frozenset[int]]  # per torsion point of curve B

    def selectivity(self, t: int) -> float:
        return len(self.allowed[t]) / self.order_B


def case2_prime(
    q: int,
    cdA: CurveData,
    genA: CurvePoint,
    torsA: Sequence[CurvePoint],
    cdB: CurveData,
    genB: CurvePoint,
    torsB: Sequence[CurvePoint],
    order_limit: int | None = None,
    image_mode: str = "mw",
) -> SievePrime | None:
    """Residues of ``n`` modulo the order of ``genB`` allowed at ``q``.

    ``image_mode="mw"`` compares with the image of ``<genA> + torsion`` (uses the
    rank claim); ``"full"`` with all of ``X(E_A(F_q))``.
    """
    CA = ModCurve(cdA.curve.A, cdA.curve.B, q)
    CB = ModCurve(cdB.curve.A, cdB.curve.B, q)
    if image_mode == "mw":
        limit = order_limit if order_limit is not None else q + 1 + 2 * math.isqrt(q) + 2
        orbit = _orbit(reduce_mod(genA, q), CA, limit)
        if orbit is None:
            return None
        tA = _mod_torsion(torsA, q)
        image = frozenset(x_E_mod(mod_add(R, T, CA), cdA, q) for R in orbit for T in tA)
        order_A = len(orbit)
    elif image_mode == "full":
        image = image_x_set(cdA, q)
        order_A = 0
    else:
        raise ValueError("image_mode is 'mw' or 'full'")
    PB = reduce_mod(genB, q)
    order_B = order_from_multiple(PB, group_order(CB.A, CB.B, q), CB)
    tB = _mod_torsion(torsB, q)
    allowed: list[set[int]] = [set() for _ in tB]
    R = None
    for n in range(order_B):
        for i, T in enumerate(tB):
            if x_E_mod(mod_add(R, T, CB), cdB, q) in image:
                allowed[i].add(n)
        R = mod_add(R, PB, CB)
    return SievePrime(q, order_A, order_B, image, [frozenset(a) for a in allowed])


def _crt_combine(classes: list[int], mod: int, residues: Iterable[int], m2: int) -> tuple[list[int], int]:
    g = math.gcd(mod, m2)
    L = mod // g * m2
    by_rem: dict[int, list[int]] = {}
    for r in residues:
        by_rem.setdefault(r % g, []).append(r)
    inv = pow(mod // g, -1, m2 // g) if m2 // g > 1 else 0
    out = []
    for c in classes:
        for r in by_rem.get(c % g, ()):
            # c + mod * t == r  (mod m2)
            t = ((r - c) // g * inv) % (m2 // g) if m2 // g > 1 else 0
            out.append((c + mod * t) % L)
    return sorted(out), L


def combine_residues(filters: Sequence[tuple[int, frozenset[int]]], max_classes: int = 200_000):
    """Greedy CRT combination of ``(modulus, allowed residues)`` filters.

    Returns ``(classes, modulus, remaining_filters)``; the remaining filters are
    applied one candidate at a time.
    """
    order = sorted(filters, key=lambda f: len(f[1]) / f[0])
    classes, L = [0], 1
    rest = []
    for m, res in order:
        if L % m == 0:
            classes = [c for c in classes if c % m in res]
            continue
        est = len(classes) * len(res) * math.gcd(L, m) // m
        if est > max_classes:
            rest.append((m, res))
            continue
        classes, L = _crt_combine(classes, L, res, m)
    return classes, L, rest


def enumerate_candidates(
    filters: Sequence[tuple[int, frozenset[int]]], bound: int, max_count: int = 5_000_000
) -> list[int]:
    """Integers ``|n| < bound`` satisfying every filter ``n mod m in allowed``."""
    if any(not res for _, res in filters):
        return []
    classes, L, rest = combine_residues(filters)
    per_class = (2 * bound) // L + 2
    if len(classes) * per_class > max_count:
        raise CaseFailure(
            f"{len(classes)} residue classes modulo {L} leave too many n below {bound}; more sieve primes needed"
        )
    out = []
    for c in classes:
        start = c - ((c + bound - 1) // L) * L  # smallest n = c (mod L) with n > -bound
        for n in range(start, bound, L):
            if all(n % m in res for m, res in rest):
                out.append(n)
    return sorted(out)


def case2(
    cdA: CurveData,
    recA: GeneratorRecord,
    cdB: CurveData,
    recB: GeneratorRecord,
    log_hmax=DEFAULT_LOG_HMAX,
    *,
    n_bound: int | None = None,
    screen_curves: Sequence[CurveData] = (),
    image_mode: str = "mw",
    max_prime: int = MAX_SIEVE_PRIME,
    extra_primes: int = 8,
) -> CaseResult:
    """Common X-coordinates of two rank-1 curves below the height cutoff.

    ``n_bound`` replaces the canonical-height cutoff on ``|n|`` (for toy runs).
    ``screen_curves`` are further curves whose full ``X(E(F_q))`` sets are
    used as extra filters.
    """
    if recA.rank != 1 or recB.rank != 1:
        raise ValueError("Case II needs two rank-1 curves")
    genA, genB = recA.gens[0], recB.gens[0]
    torsA = torsion_subgroup(cdA.curve)
    torsB = torsion_subgroup(cdB.curve)
    hB = canonical_height_interval(genB, cdB.curve)
    N = n_bound if n_bound is not None else index_cutoff([genB], cdB.curve, log_hmax, cdB.model, heights=hB)
    curves = [cdA, cdB, *screen_curves]
    primes: list[SievePrime] = []
    L = 1
    reached_at = None
    for q in primes_upto(max_prime):
        if not is_good_prime(q, curves):
            continue
        limit = max(12, q // 20) if image_mode == "mw" else None
        sp = case2_prime(q, cdA, genA, torsA, cdB, genB, torsB, limit, image_mode)
        if sp is None:
            continue
        primes.append(sp)
        L = math.lcm(L, sp.order_B)
        if reached_at is None and L > 2 * N:
            reached_at = len(primes)
        if reached_at is not None and len(primes) >= reached_at + extra_primes:
            est = sum(
                2 * N * math.prod(sp.selectivity(t) for sp in primes) for t in range(len(torsB))
            )
            if est < 0.05:
                break
    if reached_at is None:
        raise CaseFailure(f"Case II: lcm of orders {L} never exceeded 2N = {2 * N} below q = {max_prime}")
    survivors: list[tuple[int, int]] = []
    for t in range(len(torsB)):
        filters = [(sp.order_B, sp.allowed[t]) for sp in primes]
        for n in enumerate_candidates(filters, N):
            survivors.append((n, t))
    if screen_curves:
        survivors = _screen_other_curves(survivors, cdB, genB, torsB, screen_curves, max_prime)
    candidates = set()
    assumptions = [recA.assumption(), recB.assumption()]
    for n, t in survivors:
        if n * n * hB.hi > EXACT_LOG_HEIGHT_LIMIT:
            raise CaseFailure(f"Case II: survivor n={n} too large to evaluate exactly")
        P = add(scalar_mul(n, genB, cdB.curve), torsB[t], cdB.curve)
        X = exact_X(P, cdB)
        if X is not None and on_curve_X(X, cdA):
            candidates.add(X)
    stats = {
        "N": N,
        "primes": [sp.q for sp in primes],
        "orders_B": [sp.order_B for sp in primes],
        "survivors": len(survivors),
    }
    return CaseResult("II", sorted(candidates), assumptions, stats)


def _screen_other_curves(survivors, cdB, genB, torsB, others, max_prime, n_primes: int = 12):
    """Drop ``(n, t)`` whose X reduces outside ``X(E(F_q))`` of another curve."""
    used = 0
    for q in primes_upto(max_prime):
        if used >= n_primes or not survivors:
            break
        if q < 50 or not is_good_prime(q, [cdB, *others]):
            continue
        used += 1
        CB = ModCurve(cdB.curve.A, cdB.curve.B, q)
        inter = frozenset.intersection(*[image_x_set(cd, q) for cd in others])
        PB = reduce_mod(genB, q)
        tB = _mod_torsion(torsB, q)
        keep = []
        for n, t in survivors:
            R = mod_add(mod_mul(n, PB, CB), tB[t], CB)
            if x_E_mod(R, cdB, q) in inter:
                keep.append((n, t))
        survivors = keep
    return survivors


# ---------------------------------------------------------------------------
# Case III
# ---------------------------------------------------------------------------


def common_x_set(curves: Sequence[CurveData], q: int) -> frozenset[int]:
    return frozenset.intersection(*[image_x_set(cd, q) for cd in curves])


def I_qT(
    q: int,
    cd: CurveData,
    P1: CurvePoint,
    P2: CurvePoint,
    T: CurvePoint,
    orders: tuple[int, int],
    target: frozenset[int],
) -> frozenset[tuple[int, int]]:
    """``{(m, n) mod (o1, o2) : X(m P1 + n P2 + T) mod q in target}``."""
    C = ModCurve(cd.curve.A, cd.curve.B, q)
    p1, p2, t = reduce_mod(P1, q), reduce_mod(P2, q), reduce_mod(T, q)
    o1, o2 = orders
    out = set()
    row = t
    for m in range(o1):
        R = row
        for n in range(o2):
            if x_E_mod(R, cd, q) in target:
                out.add((m, n))
            R = mod_add(R, p2, C)
        row = mod_add(row, p1, C)
    return frozenset(out)


@dataclass
class PrimeSet:
    orders: tuple[int, int]
    primes: tuple[int, ...]


def find_prime_sets(
    cd: CurveData,
    P1: CurvePoint,
    P2: CurvePoint,
    curves: Sequence[CurveData],
    order_limit: int = 60,
    max_prime: int = MAX_SIEVE_PRIME,
    min_size: int = 2,
) -> list[PrimeSet]:
    """Group good primes by the order pair ``(o_q(P1), o_q(P2))``, both at most ``order_limit``."""
    groups: dict[tuple[int, int], list[int]] = {}
    for q in primes_upto(max_prime):
        if not is_good_prime(q, curves):
            continue
        C = ModCurve(cd.curve.A, cd.curve.B, q)
        o1 = _orbit(reduce_mod(P1, q), C, order_limit)
        if o1 is None:
            continue
        o2 = _orbit(reduce_mod(P2, q), C, order_limit)
        if o2 is None:
            continue
        groups.setdefault((len(o1), len(o2)), []).append(q)
    sets = [PrimeSet(k, tuple(v)) for k, v in groups.items() if len(v) >= min_size and k[0] * k[1] > 1]
    sets.sort(key=lambda s: (-(s.orders[0] * s.orders[1]), s.orders))
    return sets


def _combine_2d(classes, mods, new_classes, new_mods):
    """Pairs of classes compatible in both coordinates, modulo the lcms."""
    (L1, L2), (m1, m2) = mods, new_mods
    g1, g2 = math.gcd(L1, m1), math.gcd(L2, m2)
    out = set()
    for a, b in classes:
        for c, d in new_classes:
            if (a - c) % g1 or (b - d) % g2:
                continue
            x, M1 = _crt_pair(a, L1, c, m1)
            y, M2 = _crt_pair(b, L2, d, m2)
            out.add((x, y))
    return out, (math.lcm(L1, m1), math.lcm(L2, m2))


def _crt_pair(a: int, m: int, b: int, n: int) -> tuple[int, int]:
    classes, L = _crt_combine([a], m, [b], n)
    return classes[0], L


def case3(
    cd: CurveData,
    rec: GeneratorRecord,
    others: Sequence[CurveData],
    log_hmax=CASE3_DESK_LOG_HMAX,
    *,
    n_sets: int = 2,
    order_limit: int = 60,
    screen_primes: int = 12,
    max_prime: int = MAX_SIEVE_PRIME,
    box: tuple[int, int] | None = None,
) -> CaseResult:
    """Rank-2 curve: congruence sieve on ``(m, n)`` with the other curves' X-sets."""
    if rec.rank != 2:
        raise ValueError("Case III needs a rank-2 curve")
    P1, P2 = rec.gens
    E = cd.curve
    curves = [cd, *others]
    tors = torsion_subgroup(E)
    heights = pair_heights(P1, P2, E)
    M, N = box if box is not None else index_cutoff([P1, P2], E, log_hmax, cd.model, heights=heights)
    sets = find_prime_sets(cd, P1, P2, curves, order_limit, max_prime)
    if len(sets) < 1:
        raise CaseFailure("Case III: no usable prime sets")
    chosen = sets[:n_sets]
    survivors: list[tuple[int, int, int]] = []
    for ti, T in enumerate(tors):
        classes = {(0, 0)}
        mods = (1, 1)
        for ps in chosen:
            I = None
            for q in ps.primes:
                target = common_x_set(curves, q)
                Iq = I_qT(q, cd, P1, P2, T, ps.orders, target)
                I = Iq if I is None else I & Iq
            classes, mods = _combine_2d(classes, mods, I, ps.orders)
        L1, L2 = mods
        for a, b in classes:
            for m in range(a - ((a + M - 1) // L1) * L1, M, L1):
                for n in range(b - ((b + N - 1) // L2) * L2, N, L2):
                    survivors.append((m, n, ti))
    survivors = _screen_case3(survivors, cd, P1, P2, tors, curves, screen_primes, max_prime, {q for s in chosen for q in s.primes})
    candidates = set()
    for m, n, ti in survivors:
        P = add(add(scalar_mul(m, P1, E), scalar_mul(n, P2, E), E), tors[ti], E)
        X = exact_X(P, cd)
        if X is not None and all(on_curve_X(X, other) for other in others):
            candidates.add(X)
    stats = {
        "M": M,
        "N": N,
        "prime_sets": [{"orders": list(s.orders), "primes": list(s.primes)} for s in chosen],
        "survivors": len(survivors),
        "log_hmax": str(log_hmax),
    }
    return CaseResult("III", sorted(candidates), [rec.assumption()], stats)


def _screen_case3(survivors, cd, P1, P2, tors, curves, n_primes, max_prime, skip):
    used = 0
    for q in primes_upto(max_prime):
        if used >= n_primes or not survivors:
            break
        if q in skip or q < 50 or not is_good_prime(q, curves):
            continue
        used += 1
        C = ModCurve(cd.curve.A, cd.curve.B, q)
        target = common_x_set(curves, q)
        p1, p2 = reduce_mod(P1, q), reduce_mod(P2, q)
        tq = _mod_torsion(tors, q)
        keep = []
        for m, n, ti in survivors:
            R = mod_add(mod_add(mod_mul(m, p1, C), mod_mul(n, p2, C), C), tq[ti], C)
            if x_E_mod(R, cd, q) in target:
                keep.append((m, n, ti))
        survivors = keep
    return survivors
