"""Elliptic curves ``Y^2 = X(X+A)(X+B)`` over Q and F_q, and the quartics ``a Y^2 = prod (X + g)``.

Points over Q use exact Fractions.  Points modulo q are ``(x, y)`` integer
tuples or ``None`` for the point at infinity.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath
from mpmath import iv

from .exact_arith import (
    factorize,
    is_prime,
    is_squarefree,
    primes_upto,
    rational_nth_root,
    RationalPoly,
)
from .runge_bounds import _ivprec, working_precision

MAX_COUNT_PRIME = 10**4


# ---------------------------------------------------------------------------
# curves and points over Q
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CurvePoint:
    """Affine rational point, or the point at infinity when ``x is None``."""

    x: Fraction | None = None
    y: Fraction | None = None
    tag: str = ""

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self):
        if self.is_infinity:
            return "CurvePoint(inf)"
        return f"CurvePoint({self.x}, {self.y})"


INFINITY = CurvePoint()


def point(x, y) -> CurvePoint:
    return CurvePoint(Fraction(x), Fraction(y))


@dataclass(frozen=True)
class WeierstrassCurve:
    """``Y^2 = X(X+A)(X+B) = X^3 + a2 X^2 + a4 X``."""

    A: int
    B: int

    def __post_init__(self):
        if self.A == 0 or self.B == 0 or self.A == self.B:
            raise ValueError("singular curve: need A, B nonzero and distinct")

    @property
    def a2(self) -> int:
        return self.A + self.B

    @property
    def a4(self) -> int:
        return self.A * self.B

    @property
    def discriminant(self) -> int:
        return 16 * self.A**2 * self.B**2 * (self.A - self.B) ** 2

    def rhs(self, x):
        return x * (x + self.A) * (x + self.B)

    def contains(self, P: CurvePoint) -> bool:
        return P.is_infinity or P.y * P.y == self.rhs(P.x)

    def two_torsion(self) -> list[CurvePoint]:
        return [INFINITY, point(0, 0), point(-self.A, 0), point(-self.B, 0)]

    def lift_x(self, x) -> list[CurvePoint]:
        """Rational points with the given x-coordinate."""
        x = Fraction(x)
        y = rational_nth_root(self.rhs(x), 2) if self.rhs(x) >= 0 else None
        if y is None:
            return []
        return [CurvePoint(x, y)] if y == 0 else [CurvePoint(x, y), CurvePoint(x, -y)]


def _check(P: CurvePoint, E: WeierstrassCurve) -> None:
    if not E.contains(P):
        raise ValueError(f"{P} is not on {E}")


def neg(P: CurvePoint) -> CurvePoint:
    return P if P.is_infinity else CurvePoint(P.x, -P.y)


def _add_unchecked(P: CurvePoint, Q: CurvePoint, E: WeierstrassCurve) -> CurvePoint:
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    if P.x == Q.x:
        if P.y != Q.y or P.y == 0:
            return INFINITY
        lam = (3 * P.x * P.x + 2 * E.a2 * P.x + E.a4) / (2 * P.y)
    else:
        lam = (Q.y - P.y) / (Q.x - P.x)
    x3 = lam * lam - E.a2 - P.x - Q.x
    y3 = lam * (P.x - x3) - P.y
    return CurvePoint(x3, y3)


def add(P: CurvePoint, Q: CurvePoint, E: WeierstrassCurve) -> CurvePoint:
    _check(P, E)
    _check(Q, E)
    return _add_unchecked(P, Q, E)


def scalar_mul(n: int, P: CurvePoint, E: WeierstrassCurve) -> CurvePoint:
    _check(P, E)
    if n < 0:
        return scalar_mul(-n, neg(P), E)
    result = INFINITY
    base = P
    while n:
        if n & 1:
            result = _add_unchecked(result, base, E)
        n >>= 1
        if n:
            base = _add_unchecked(base, base, E)
    return result


def double_x(x: Fraction, E: WeierstrassCurve) -> Fraction | None:
    """x-coordinate of ``2P`` from that of ``P`` (None when ``2P`` is infinity)."""
    den = 4 * E.rhs(x)
    if den == 0:
        return None
    return (x * x - E.a4) ** 2 / den


# ---------------------------------------------------------------------------
# the quartic models and the birational map
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuarticModel:
    """``aJ Y^2 = prod_j (X + gammas[j])``."""

    gammas: tuple[int, int, int, int]
    aJ: int

    def contains(self, X, Y) -> bool:
        X, Y = Fraction(X), Fraction(Y)
        return self.aJ * Y * Y == math.prod(X + g for g in self.gammas)

    def weierstrass(self) -> WeierstrassCurve:
        g1, g2, g3, g4 = self.gammas
        return WeierstrassCurve(self.aJ * (g2 - g1) * (g4 - g3), self.aJ * (g3 - g1) * (g4 - g2))

    @property
    def pole(self) -> int:
        """The X-coordinate on the Weierstrass model sent to infinity."""
        g1, g2, g3, _ = self.gammas
        return self.aJ * (g2 - g1) * (g3 - g1)

    @property
    def numerator(self) -> int:
        g1, g2, g3, g4 = self.gammas
        return self.aJ * (g2 - g1) * (g3 - g1) * (g4 - g1)

    def mobius(self) -> tuple[int, int, int, int]:
        """``(a, b, c, d)`` with ``X_E = (a X_F + b) / (c X_F + d)``."""
        g1 = self.gammas[0]
        return (-g1, self.numerator + g1 * self.pole, 1, -self.pole)

    def mobius_height(self) -> int:
        return max(abs(v) for v in self.mobius())


def curve_from_quadruple(gammas4: Sequence[int], aJ: int) -> tuple[QuarticModel, WeierstrassCurve]:
    g = tuple(int(v) for v in gammas4)
    if len(g) != 4 or len(set(g)) != 4:
        raise ValueError("need four distinct gammas")
    if list(g) != sorted(g):
        raise ValueError("gammas must be sorted ascending")
    if aJ < 1 or not is_squarefree(aJ):
        raise ValueError("aJ must be a positive squarefree integer")
    model = QuarticModel(g, int(aJ))
    return model, model.weierstrass()


@dataclass(frozen=True)
class QuarticPoint:
    """Image on the quartic model; ``at_infinity`` marks the exceptional locus."""

    X: Fraction | None
    Y: Fraction | None
    at_infinity: bool = False


def map_F_to_E(P: CurvePoint, model: QuarticModel) -> QuarticPoint:
    """Birational map from the Weierstrass model to the quartic model."""
    g1, g2, g3, g4 = model.gammas
    if P.is_infinity:
        return QuarticPoint(Fraction(-g1), Fraction(0))
    _check(P, model.weierstrass())
    shift = P.x - model.pole
    if shift == 0:
        return QuarticPoint(None, None, at_infinity=True)
    X = model.numerator / shift - g1
    Y = (g2 - g1) * (g3 - g1) * (g4 - g1) * P.y / (shift * shift)
    return QuarticPoint(X, Y)


def x_F_to_E(x: Fraction | None, model: QuarticModel) -> Fraction | None:
    """X-coordinate on the quartic model (infinity maps to ``-g1``); None on the exceptional locus."""
    if x is None:
        return Fraction(-model.gammas[0])
    shift = x - model.pole
    if shift == 0:
        return None
    return model.numerator / shift - model.gammas[0]


def x_E_to_F(X: Fraction, model: QuarticModel) -> Fraction | None:
    """Inverse of :func:`x_F_to_E`; None means the point at infinity of the Weierstrass model."""
    X = Fraction(X)
    s = X + model.gammas[0]
    if s == 0:
        return None
    return model.pole + model.numerator / s


# ---------------------------------------------------------------------------
# arithmetic modulo q
# ---------------------------------------------------------------------------

ModPoint = tuple[int, int] | None


@dataclass(frozen=True)
class ModCurve:
    A: int
    B: int
    q: int

    def __post_init__(self):
        if self.q == 2 or not is_prime(self.q):
            raise ValueError("need an odd prime")
        if WeierstrassCurve(self.A, self.B).discriminant % self.q == 0:
            raise ValueError(f"bad reduction at {self.q}")

    @property
    def a2(self) -> int:
        return (self.A + self.B) % self.q

    @property
    def a4(self) -> int:
        return (self.A * self.B) % self.q

    def rhs(self, x: int) -> int:
        return x * (x + self.A) * (x + self.B) % self.q

    def contains(self, P: ModPoint) -> bool:
        return P is None or (P[1] * P[1] - self.rhs(P[0])) % self.q == 0


def reduce_curve(E: WeierstrassCurve, q: int) -> ModCurve:
    return ModCurve(E.A, E.B, q)


def reduce_mod(P: CurvePoint, q: int) -> ModPoint:
    if P.is_infinity or P.x.denominator % q == 0:
        return None
    return (P.x.numerator * pow(P.x.denominator, -1, q) % q, P.y.numerator * pow(P.y.denominator, -1, q) % q)


def reduce_x(x: Fraction | None, q: int) -> int | None:
    """x modulo q, with None for infinity (including denominators divisible by q)."""
    if x is None or x.denominator % q == 0:
        return None
    return x.numerator * pow(x.denominator, -1, q) % q


def mod_neg(P: ModPoint, C: ModCurve) -> ModPoint:
    return None if P is None else (P[0], (-P[1]) % C.q)


def mod_add(P: ModPoint, Q: ModPoint, C: ModCurve) -> ModPoint:
    if P is None:
        return Q
    if Q is None:
        return P
    q = C.q
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if (y1 + y2) % q == 0:
            return None
        lam = (3 * x1 * x1 + 2 * C.a2 * x1 + C.a4) * pow(2 * y1, -1, q) % q
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, q) % q
    x3 = (lam * lam - C.a2 - x1 - x2) % q
    return (x3, (lam * (x1 - x3) - y1) % q)


def mod_mul(n: int, P: ModPoint, C: ModCurve) -> ModPoint:
    if n < 0:
        return mod_mul(-n, mod_neg(P, C), C)
    result = None
    while n:
        if n & 1:
            result = mod_add(result, P, C)
        n >>= 1
        if n:
            P = mod_add(P, P, C)
    return result


@lru_cache(maxsize=None)
def _squares(q: int) -> tuple[bool, ...]:
    sq = [False] * q
    for y in range(q):
        sq[y * y % q] = True
    return tuple(sq)


@lru_cache(maxsize=None)
def _sqrt_table(q: int) -> dict[int, int]:
    table = {}
    for y in range(q // 2 + 1):
        table.setdefault(y * y % q, y)
    return table


@lru_cache(maxsize=4096)
def group_order(A: int, B: int, q: int) -> int:
    """``#E(F_q)`` by scanning x with a table of squares."""
    if q >= MAX_COUNT_PRIME:
        raise ValueError(f"point counting is limited to q < {MAX_COUNT_PRIME}")
    C = ModCurve(A, B, q)
    sq = _squares(q)
    total = 1
    for x in range(q):
        v = C.rhs(x)
        total += 1 if v == 0 else (2 if sq[v] else 0)
    return total


def all_points(C: ModCurve) -> list[ModPoint]:
    """Every point of ``E(F_q)`` (exhaustive, for small q)."""
    pts: list[ModPoint] = [None]
    roots = _sqrt_table(C.q)
    for x in range(C.q):
        v = C.rhs(x)
        if v in roots:
            y = roots[v]
            pts.append((x, y))
            if y:
                pts.append((x, C.q - y))
    return pts


def x_set(C: ModCurve) -> frozenset[int]:
    """X-coordinates of the affine points of ``E(F_q)``."""
    sq = _squares(C.q)
    return frozenset(x for x in range(C.q) if sq[C.rhs(x)])


def order_from_multiple(P: ModPoint, multiple: int, C: ModCurve) -> int:
    """Exact order of ``P`` given any multiple of it."""
    if P is None:
        return 1
    order = multiple
    for ell, _ in factorize(multiple):
        while order % ell == 0 and mod_mul(order // ell, P, C) is None:
            order //= ell
    return order


def point_order_mod(P: ModPoint, C: ModCurve) -> int:
    n = group_order(C.A, C.B, C.q)
    if mod_mul(n, P, C) is not None:
        raise ArithmeticError("point order does not divide the group order")
    return order_from_multiple(P, n, C)


# ---------------------------------------------------------------------------
# torsion
# ---------------------------------------------------------------------------


def good_primes(E: WeierstrassCurve, count: int, start: int = 3) -> list[int]:
    out = []
    disc = E.discriminant
    for q in primes_upto(MAX_COUNT_PRIME - 1):
        if q >= start and q != 2 and disc % q:
            out.append(q)
            if len(out) == count:
                break
    return out


def torsion_order_bound(E: WeierstrassCurve, n_primes: int = 8) -> int:
    """``gcd #E(F_q)`` over good odd primes; the torsion order divides it."""
    g = 0
    for q in good_primes(E, n_primes):
        g = math.gcd(g, group_order(E.A, E.B, q))
    return g


def _integer_roots(coeffs: Sequence[int]) -> list[int]:
    """Integer roots of a squarefree integer polynomial with ``coeffs`` (lowest degree first)."""
    while coeffs and coeffs[-1] == 0:
        coeffs = coeffs[:-1]
    if len(coeffs) <= 1:
        return []
    poly = RationalPoly(coeffs)
    roots = set()
    if coeffs[0] == 0:
        roots.add(0)
        k = 0
        while coeffs[k] == 0:
            k += 1
        coeffs = coeffs[k:]
        if len(coeffs) <= 1:
            return sorted(roots)
    with mpmath.workdps(60):
        approx = mpmath.polyroots(list(reversed([int(c) for c in coeffs])), maxsteps=2000, extraprec=400)
    for z in approx:
        if abs(mpmath.im(z)) < 0.5:
            for cand in (int(mpmath.floor(mpmath.re(z))), int(mpmath.ceil(mpmath.re(z)))):
                if poly(cand) == 0:
                    roots.add(cand)
    return sorted(roots)


def halve(P: CurvePoint, E: WeierstrassCurve) -> list[CurvePoint]:
    """Rational ``Q`` with ``2Q = P``.

    ``P`` is divisible by 2 exactly when ``x``, ``x + A`` and ``x + B`` are all
    squares ``r_i^2``; the halves have ``x = x0 + r1 r2 + r1 r3 + r2 r3`` over
    the sign choices of the ``r_i``.
    """
    if P.is_infinity:
        return list(E.two_torsion())
    roots = [rational_nth_root(P.x + e, 2) if P.x + e >= 0 else None for e in (0, E.A, E.B)]
    if any(r is None for r in roots):
        return []
    r1, r2, r3 = roots
    out = []
    for s2 in (1, -1):
        for s3 in (1, -1):
            x = P.x + r1 * s2 * r2 + r1 * s3 * r3 + s2 * r2 * s3 * r3
            for Q in E.lift_x(x):
                if Q not in out and scalar_mul(2, Q, E) == P:
                    out.append(Q)
    return out


def three_torsion_candidates(E: WeierstrassCurve) -> list[CurvePoint]:
    a2, a4 = E.a2, E.a4
    coeffs = [-a4 * a4, 0, 6 * a4, 4 * a2, 3]
    out = []
    for x in _integer_roots(coeffs):
        for Q in E.lift_x(x):
            if scalar_mul(3, Q, E).is_infinity:
                out.append(Q)
    return out


def _closure(gens: Iterable[CurvePoint], E: WeierstrassCurve, limit: int = 64) -> set[CurvePoint]:
    group = {INFINITY}
    for g in gens:
        if g in group:
            continue
        frontier = set(group)
        multiples = [g]
        while True:
            nxt = _add_unchecked(multiples[-1], g, E)
            if nxt.is_infinity or nxt in multiples:
                break
            multiples.append(nxt)
        group = {_add_unchecked(a, m, E) for a in frontier for m in [INFINITY] + multiples}
        if len(group) > limit:
            raise ArithmeticError("torsion closure exceeded the Mazur bound")
    return group


def _sort_key(P: CurvePoint):
    return (0, 0, 0) if P.is_infinity else (1, P.x, P.y)


def torsion_subgroup(E: WeierstrassCurve) -> list[CurvePoint]:
    """All rational torsion points.

    With full rational 2-torsion the group is ``Z/2 x Z/2N`` with ``N`` in
    1..4, so only 2-power and 3-torsion need to be searched.
    """
    bound = torsion_order_bound(E)
    found = set(E.two_torsion())
    frontier = [T for T in E.two_torsion() if not T.is_infinity]
    while frontier:
        nxt = []
        for T in frontier:
            for Q in halve(T, E):
                if Q not in found:
                    found.add(Q)
                    nxt.append(Q)
        frontier = nxt
    if bound % 3 == 0:
        found.update(three_torsion_candidates(E))
    group = _closure(sorted(found, key=_sort_key), E)
    if bound % len(group):
        raise ArithmeticError("torsion subgroup order does not divide the reduction bound")
    return sorted(group, key=_sort_key)


def is_torsion(P: CurvePoint, E: WeierstrassCurve) -> bool:
    _check(P, E)
    Q = P
    for _ in range(16):
        if Q.is_infinity:
            return True
        if Q.x.denominator != 1:
            return False  # torsion points are integral here
        Q = _add_unchecked(Q, P, E)
    return Q.is_infinity


# ---------------------------------------------------------------------------
# heights
# ---------------------------------------------------------------------------


def naive_log_height(x: Fraction) -> mpmath.mpf:
    x = Fraction(x)
    return mpmath.log(max(abs(x.numerator), abs(x.denominator), 1))


def _iv_log_height(x: Fraction):
    x = Fraction(x)
    return iv.log(iv.mpf(max(abs(x.numerator), abs(x.denominator), 1)))


def _scaled_lower(coeffs: Sequence[int], a: int, b: int, e: int) -> tuple[int, int, int]:
    """Bounds for ``|p|`` on ``[a/2^e, b/2^e]``, all scaled by ``D^n`` with ``D = 2^(e+1)``.

    Returns ``(lower, centre, D^n)``: a lower bound for ``|p|`` on the interval
    and ``|p|`` at the midpoint.  Centred form: with ``t = (M + w) / D``,
    ``|D^n p(t)| >= |q_0| - sum |q_i| R^i``.
    """
    n = len(coeffs) - 1
    D = 1 << (e + 1)
    M, R = a + b, b - a
    q = [c * D ** (n - j) for j, c in enumerate(coeffs)]
    for i in range(n):
        for j in range(n - 1, i - 1, -1):
            q[j] += M * q[j + 1]
    slack = sum(abs(qi) * R**i for i, qi in enumerate(q) if i)
    return max(abs(q[0]) - slack, 0), abs(q[0]), D**n


def _min_max_abs(fc: Sequence[int], gc: Sequence[int], budget: int = 200_000) -> Fraction:
    """Certified positive lower bound for ``min_{t in [-1,1]} max(|F(t)|, |G(t)|)``.

    Best-first bisection: the piece with the weakest certified bound is split
    until that bound is within a factor 4 of the smallest value seen.
    """

    def piece(a, b, e):
        lf, cf, scale = _scaled_lower(fc, a, b, e)
        lg, cg, _ = _scaled_lower(gc, a, b, e)
        return Fraction(max(lf, lg), scale), Fraction(max(cf, cg), scale)

    low, seen = piece(-1, 1, 0)
    heap = [(low, -1, 1, 0)]
    for _ in range(budget):
        low, a, b, e = heap[0]
        if low > 0 and 4 * low >= seen:
            return low
        if e > 400:
            break
        heapq.heappop(heap)
        for lo_end, hi_end in ((2 * a, a + b), (a + b, 2 * b)):
            low_i, mid_i = piece(lo_end, hi_end, e + 1)
            seen = min(seen, mid_i)
            heapq.heappush(heap, (low_i, lo_end, hi_end, e + 1))
    raise ArithmeticError("the two forms (nearly) share a root in [-1, 1]")


@dataclass(frozen=True)
class HeightConstants:
    """``|h(x(2P)) - 4 h(x(P))| <= C`` and hence ``|hhat - h(x)/2| <= C / 6``."""

    log_upper: mpmath.mpf  # log of the coefficient-sum constant
    log_lower: mpmath.mpf  # log(|Res| / c)
    C: mpmath.mpf


@lru_cache(maxsize=None)
def height_constants(A: int, B: int) -> HeightConstants:
    E = WeierstrassCurve(A, B)
    a2, a4 = E.a2, E.a4
    # x(2P) = F(x) / G(x); homogeneous in (x, 1) of degree 4
    F = [a4 * a4, 0, -2 * a4, 0, 1]
    G = [0, 4 * a4, 4 * a2, 4, 0]
    F_rev = list(reversed(F))
    G_rev = list(reversed(G))
    c = min(_min_max_abs(F, G), _min_max_abs(F_rev, G_rev))
    if c <= 0:
        raise ArithmeticError("failed to certify the lower constant")
    res = abs(_homogeneous_resultant(F, G))
    c1 = max((1 + abs(a4)) ** 2, 4 * (1 + abs(A)) * (1 + abs(B)))
    prec = working_precision()
    with mpmath.workprec(prec):
        lu = mpmath.log(c1)
        ll = mpmath.log(res) - mpmath.log(mpmath.mpf(c.numerator) / c.denominator)
        # round outward by a few ulps
        eps = mpmath.mpf(2) ** (-prec + 8)
        C = max(lu, ll) * (1 + eps) + eps
    return HeightConstants(lu, ll, C)


def _homogeneous_resultant(F: Sequence[int], G: Sequence[int]) -> int:
    """Resultant of two binary forms of degree ``len - 1`` (Sylvester determinant)."""
    m = len(F) - 1
    n = len(G) - 1
    size = m + n
    rows = []
    for i in range(n):
        rows.append([Fraction(0)] * i + [Fraction(c) for c in reversed(F)] + [Fraction(0)] * (size - m - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + [Fraction(c) for c in reversed(G)] + [Fraction(0)] * (size - n - 1 - i))
    det = Fraction(1)
    for col in range(size):
        piv = next((r for r in range(col, size) if rows[r][col]), None)
        if piv is None:
            return 0
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            det = -det
        det *= rows[col][col]
        for r in range(col + 1, size):
            f = rows[r][col] / rows[col][col]
            if f:
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    return int(det)


@dataclass(frozen=True)
class HeightInterval:
    lo: mpmath.mpf
    hi: mpmath.mpf
    doublings: int
    torsion: bool = False

    def contains(self, value) -> bool:
        return self.lo <= value <= self.hi

    @property
    def center(self):
        return (self.lo + self.hi) / 2


def canonical_height_interval(
    P: CurvePoint, E: WeierstrassCurve, doublings: int | None = None, rel_width: float = 1e-3
) -> HeightInterval:
    """Certified enclosure of the canonical height (normalised so ``hhat ~ h(x)/2``).

    Uses ``|hhat(P) - h(x(2^k P)) / (2 * 4^k)| <= C / (6 * 4^k)``.
    """
    _check(P, E)
    if is_torsion(P, E):
        return HeightInterval(mpmath.mpf(0), mpmath.mpf(0), 0, torsion=True)
    hc = height_constants(E.A, E.B)
    prec = working_precision()
    x = P.x
    k = 0
    with _ivprec(prec):
        C = iv.mpf(hc.C)
        while True:
            center = _iv_log_height(x) / (2 * 4**k)
            err = C / (6 * 4**k)
            lo = center - err
            hi = center + err
            done = doublings is not None and k >= doublings
            if doublings is None and lo.a > 0 and (hi.b - lo.a) <= rel_width * lo.a:
                done = True
            if doublings is None and k >= 10:
                done = True
            if done:
                return HeightInterval(max(mpmath.mpf(lo.a), mpmath.mpf(0)), mpmath.mpf(hi.b), k)
            x = double_x(x, E)
            k += 1


def pair_heights(P1: CurvePoint, P2: CurvePoint, E: WeierstrassCurve, doublings: int | None = None):
    """Intervals for ``h11, h12, h22`` of the height pairing."""
    h11 = canonical_height_interval(P1, E, doublings)
    h22 = canonical_height_interval(P2, E, doublings)
    hs = canonical_height_interval(add(P1, P2, E), E, doublings)
    h12_lo = (hs.lo - h11.hi - h22.hi) / 2
    h12_hi = (hs.hi - h11.lo - h22.lo) / 2
    return h11, (h12_lo, h12_hi), h22


def _threshold(E: WeierstrassCurve, model: QuarticModel | None, log_hmax) -> mpmath.mpf:
    """``T`` such that ``hhat(Q) > T`` forces ``h(X) > log_hmax`` on the quartic model."""
    hc = height_constants(E.A, E.B)
    loss = mpmath.log(2 * model.mobius_height()) if model is not None else 0
    return (mpmath.mpf(log_hmax) + hc.C / 3 + loss) / 2


def index_cutoff(
    gens: Sequence[CurvePoint],
    E: WeierstrassCurve,
    log_hmax,
    model: QuarticModel | None = None,
    heights=None,
) -> int | tuple[int, int]:
    """Cutoffs beyond which every ``X(nP + T)`` (or ``X(mP1 + nP2 + T)``) has height above ``log_hmax``.

    One generator: smallest ``N`` with ``N^2 hhat_lo > T``; any ``|n| >= N`` is out of range.
    Two generators: ``(M, N)`` with ``M^2 det_lo / h22_hi > T`` and ``N^2 det_lo / h11_hi > T``.
    """
    with mpmath.workprec(working_precision()):
        T = _threshold(E, model, log_hmax)
        if len(gens) == 1:
            h = heights or canonical_height_interval(gens[0], E)
            if h.lo <= 0:
                raise ValueError("canonical height lower bound is not positive")
            return _smallest_n(T / h.lo)
        if len(gens) == 2:
            h11, (h12_lo, h12_hi), h22 = heights or pair_heights(gens[0], gens[1], E)
            h12_sq = max(h12_lo * h12_lo, h12_hi * h12_hi)
            det_lo = h11.lo * h22.lo - h12_sq
            if det_lo <= 0 or h11.lo <= 0 or h22.lo <= 0:
                raise ValueError("height pairing not certified positive definite")
            return _smallest_n(T * h22.hi / det_lo), _smallest_n(T * h11.hi / det_lo)
    raise ValueError("need one or two generators")


def _smallest_n(ratio) -> int:
    """Smallest positive integer ``n`` with ``n^2 > ratio``."""
    if ratio < 0:
        return 1
    n = int(mpmath.floor(mpmath.sqrt(ratio)))
    while n * n <= ratio:
        n += 1
    return max(n, 1)
