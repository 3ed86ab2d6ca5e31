"""Puiseux expansions at infinity of p-th roots of monic integer polynomials.

A series ``x^(e/p) * sum_k a_k x^(-k)`` is stored as the pair ``(e, [a_0, ..., a_N])``
with coefficients in ``Q(zeta_p)``.  The branch of ``x^(1/p)`` is never fixed
numerically; branch ``j`` differs from the principal one by the factor ``zeta_p^j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact_arith import CycloElement, RationalPoly, sup_norm

# ---------------------------------------------------------------------------
# truncated power series over Q (in t = 1/x)
# ---------------------------------------------------------------------------


def series_mul(a: Sequence[Fraction], b: Sequence[Fraction], n: int) -> list[Fraction]:
    """Product truncated to ``n`` coefficients."""
    out = [Fraction(0)] * n
    for i, ai in enumerate(a[:n]):
        if ai:
            for j, bj in enumerate(b[: n - i]):
                if bj:
                    out[i + j] += ai * bj
    return out


def series_pow(a: Sequence[Fraction], e: int, n: int) -> list[Fraction]:
    out = [Fraction(1)] + [Fraction(0)] * (n - 1)
    base = list(a[:n]) + [Fraction(0)] * (n - len(a[:n]))
    while e:
        if e & 1:
            out = series_mul(out, base, n)
        e >>= 1
        if e:
            base = series_mul(base, base, n)
    return out


def series_inverse_root(u: Sequence[Fraction], p: int, n: int) -> list[Fraction]:
    """``u^(-1/p)`` to ``n`` coefficients for ``u_0 = 1``, by Newton iteration.

    The update ``h <- h + h (1 - u h^p) / p`` doubles the number of correct
    coefficients per step and needs no series division.
    """
    if not u or u[0] != 1:
        raise ValueError("series must start with constant term 1")
    h = [Fraction(1)]
    prec = 1
    while prec < n:
        prec = min(2 * prec, n)
        hp = series_pow(h, p, prec)
        err = series_mul(u, hp, prec)
        err = [-c for c in err]
        err[0] += 1
        corr = series_mul(h, err, prec)
        h = [(h[i] if i < len(h) else Fraction(0)) + corr[i] / p for i in range(prec)]
    return h[:n]


def series_root(u: Sequence[Fraction], p: int, n: int) -> list[Fraction]:
    """``u^(1/p)`` with constant term 1, to ``n`` coefficients."""
    h = series_inverse_root(u, p, n)
    return series_mul(u, series_pow(h, p - 1, n), n)


# ---------------------------------------------------------------------------
# Puiseux series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PuiseuxSeries:
    p: int
    lead_num: int
    coeffs: tuple[CycloElement, ...]

    def __post_init__(self):
        for c in self.coeffs:
            if c.p != self.p:
                raise ValueError("coefficient field does not match p")

    @property
    def order(self) -> int:
        """Truncation order N: coefficients ``a_0..a_N`` are known."""
        return len(self.coeffs) - 1

    def exponent(self, k: int) -> Fraction:
        return Fraction(self.lead_num - self.p * k, self.p)

    def terms(self) -> list[tuple[Fraction, CycloElement]]:
        return [(self.exponent(k), c) for k, c in enumerate(self.coeffs)]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def rational_coeffs(self) -> list[Fraction]:
        if not all(c.is_rational() for c in self.coeffs):
            raise ValueError("series has non-rational coefficients")
        return [c.coords[0] for c in self.coeffs]

    def scaled(self, factor: CycloElement) -> PuiseuxSeries:
        return PuiseuxSeries(self.p, self.lead_num, tuple(factor * c for c in self.coeffs))


def _reversed_ratio(f: RationalPoly, n: int) -> list[Fraction]:
    """Coefficients of ``x^(-d) f(x)`` as a series in ``t = 1/x``."""
    d = f.degree
    u = [f.coeffs[d - k] if k <= d else Fraction(0) for k in range(n)]
    return u


def _check_monic_integer(f: RationalPoly) -> None:
    if f.degree < 1:
        raise ValueError("expansion needs a nonconstant polynomial")
    if not f.is_monic():
        raise ValueError("expansion needs a monic polynomial")
    if not f.has_integer_coeffs():
        raise ValueError("expansion needs integer coefficients")


def principal_coeffs(f: RationalPoly, p: int, n_terms: int) -> list[Fraction]:
    """Rational coefficients ``a_0..a_N`` of the principal branch of ``f^(1/p)``."""
    _check_monic_integer(f)
    n = n_terms + 1
    return series_root(_reversed_ratio(f, n), p, n)


def expand_pth_root(f: RationalPoly, p: int, n_terms: int) -> PuiseuxSeries:
    """Principal branch of ``f(x)^(1/p)`` at infinity, through ``x^(d/p - n_terms)``."""
    if n_terms < 0:
        raise ValueError("n_terms must be nonnegative")
    coeffs = principal_coeffs(f, p, n_terms)
    return PuiseuxSeries(p, f.degree, tuple(CycloElement.from_rational(p, c) for c in coeffs))


def branch(s: PuiseuxSeries, j: int) -> PuiseuxSeries:
    """Branch ``j``: every coefficient multiplied by ``zeta_p^j``."""
    if not 0 <= j < s.p:
        raise ValueError(f"branch index {j} outside 0..{s.p - 1}")
    if j == 0:
        return s
    return s.scaled(CycloElement.zeta_power(s.p, j))


def monomial_series(
    i0: int,
    exps: Sequence[int],
    fs: Sequence[RationalPoly],
    branches: Sequence[int],
    p: int,
    n_terms: int,
    _cache: dict | None = None,
) -> PuiseuxSeries:
    """Expansion of ``x^i0 * prod_l y_{l, j_l}^{i_l}`` for branch choice ``branches``.

    Each ``y_{l,j}`` is ``zeta^j`` times the principal root of ``fs[l]``, so the
    product is ``zeta^(sum j_l i_l)`` times a series with rational coefficients.
    """
    if len(exps) != len(fs) or len(branches) != len(fs):
        raise ValueError("exps, fs and branches must have equal length")
    if any(not 0 <= e < p for e in exps):
        raise ValueError("exponents of the y_l must lie in 0..p-1")
    if any(not 0 <= j < p for j in branches):
        raise ValueError("branch indices must lie in 0..p-1")
    n = n_terms + 1
    prod = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for l, (f, e) in enumerate(zip(fs, exps)):
        if not e:
            continue
        key = (l, e, n)
        if _cache is not None and key in _cache:
            part = _cache[key]
        else:
            part = series_pow(principal_coeffs(f, p, n_terms), e, n)
            if _cache is not None:
                _cache[key] = part
        prod = series_mul(prod, part, n)
    lead = p * i0 + sum(e * f.degree for e, f in zip(exps, fs))
    zeta = CycloElement.zeta_power(p, sum(j * e for j, e in zip(branches, exps)))
    return PuiseuxSeries(p, lead, tuple(zeta * c for c in prod))


def check_integrality(s: PuiseuxSeries) -> bool:
    """``p^(2k-1) a_k`` has integer coordinates for every ``k >= 1``."""
    p = s.p
    for k, c in enumerate(s.coeffs):
        if k == 0:
            continue
        if not (c * p ** (2 * k - 1)).is_integral():
            return False
    return True


@dataclass(frozen=True)
class ConvergenceThreshold:
    """Region ``|x|_v >= bound`` (archimedean) or ``|x|_q > bound`` (q-adic) of convergence.

    At a prime ``q`` the bound is ``1/|p|_q^2 = q^(2 v_q(p))`` and the test is
    equivalent to ``v_q(x) < -2 v_q(p)``.
    """

    place: str | int
    bound: Fraction
    max_valuation: int | None = None

    @property
    def archimedean(self) -> bool:
        return self.place == "inf"

    def holds(self, x) -> bool:
        x = Fraction(x)
        if self.archimedean:
            return abs(x) >= self.bound
        if x == 0:
            return False
        return _valuation(x, int(self.place)) <= self.max_valuation


def _valuation(x: Fraction, q: int) -> int:
    v = 0
    num, den = x.numerator, x.denominator
    while num % q == 0:
        num //= q
        v += 1
    while den % q == 0:
        den //= q
        v -= 1
    return v


def convergence_threshold(f: RationalPoly, p: int, place: str | int = "inf") -> ConvergenceThreshold:
    """Where the expansion of ``f^(1/p)`` converges: ``|f|+1`` at infinity, ``1/|p|_q^2`` at ``q``."""
    _check_monic_integer(f)
    if place in ("inf", "archimedean", None):
        return ConvergenceThreshold("inf", sup_norm(f) + 1)
    q = int(place)
    vp = 1 if q == p else 0
    return ConvergenceThreshold(q, Fraction(q) ** (2 * vp), -2 * vp - 1)


def evaluate_real(s: PuiseuxSeries, x: float) -> float:
    """Float value of a rational-coefficient series at real ``x > 0`` (test harness only)."""
    t = 1.0 / x
    total = sum(float(c) * t**k for k, c in enumerate(s.rational_coeffs()))
    return total * x ** (s.lead_num / s.p)


def coefficient_bound_holds(s: PuiseuxSeries, delta: int, h: Fraction) -> bool:
    """``|a_k| < 2^(delta/p) (H+1)^k`` for every stored coefficient."""
    base = math.log(2) * delta / s.p
    for k, c in enumerate(s.coeffs):
        m = c.max_abs_coord()
        if m and math.log(m) >= base + k * math.log(h + 1):
            return False
    return True
