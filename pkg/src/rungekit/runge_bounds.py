"""Explicit constants, thresholds and height bounds for superelliptic Runge estimates.

Astronomical bounds are never formed as integers.  Every bound is the natural
logarithm of its right-hand side, evaluated in outward-rounded interval
arithmetic; :class:`LogBound` keeps the upper end (the valid bound) and the
lower end (for bracketing checks).
"""

from __future__ import annotations

import itertools
import math
import os
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import iv

from .exact_arith import (
    RationalPoly,
    euler_phi,
    factorize,
    omega,
    pairwise_coprime,
    poly_discriminant,
    poly_height,
    prime_pi,
)

DEFAULT_PRECISION = 256


def working_precision() -> int:
    return int(os.environ.get("RUNGEKIT_PRECISION", DEFAULT_PRECISION))


# ---------------------------------------------------------------------------
# log-bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogBound:
    """Upper bound ``log_value`` on a natural logarithm, plus the lower bracket end."""

    log_value: mpmath.mpf
    lower: mpmath.mpf
    provenance: str
    precision: int = DEFAULT_PRECISION

    @classmethod
    def from_interval(cls, x, provenance: str, precision: int) -> LogBound:
        lo, hi = x._mpi_
        with mpmath.workprec(precision):
            return cls(mpmath.mpf(hi), mpmath.mpf(lo), provenance, precision)

    @property
    def relative_width(self) -> float:
        if self.log_value == 0:
            return float(self.log_value - self.lower)
        return float((self.log_value - self.lower) / abs(self.log_value))

    def __float__(self):
        return float(self.log_value)

    def log10(self) -> mpmath.mpf:
        """Upper bound on ``log10`` of the bounded quantity."""
        with mpmath.workprec(self.precision):
            return mpmath.mpf(self.log_value) / mpmath.log(10)

    def to_json(self, digits: int = 30) -> dict:
        return {
            "log_upper": mpmath.nstr(self.log_value, digits),
            "log_lower": mpmath.nstr(self.lower, digits),
            "provenance": self.provenance,
            "precision_bits": self.precision,
        }


@contextmanager
def _ivprec(prec: int):
    saved = iv.prec
    iv.prec = prec
    try:
        yield
    finally:
        iv.prec = saved


def _ivlog(x, prec: int):
    """Interval log of an exact positive rational/integer."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log of a nonpositive number")
    return iv.log(iv.mpf(x.numerator)) - iv.log(iv.mpf(x.denominator))


def _evaluate(terms: Sequence[tuple[Fraction, object]], provenance: str, prec: int | None = None) -> LogBound:
    """``sum coeff * log(arg)`` with exact ``coeff`` and exact positive ``arg``.

    An ``arg`` may instead be a ready-made interval (tagged ``("iv", value)``).
    """
    prec = prec or working_precision()
    with _ivprec(prec):
        total = iv.mpf(0)
        for coeff, arg in terms:
            coeff = Fraction(coeff)
            if coeff == 0:
                continue
            if isinstance(arg, tuple) and arg[0] == "iv":
                value = arg[1]
            else:
                value = _ivlog(arg, prec)
            total += iv.mpf(coeff.numerator) / coeff.denominator * value
        return LogBound.from_interval(total, provenance, prec)


# ---------------------------------------------------------------------------
# parameters of the main height theorem
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MainthParams:
    p: int
    degs: tuple[int, ...]
    t: int
    B: Fraction = Fraction(2)
    disc_log: Fraction | float | int = 0
    field_degree: int | None = None
    case: str = field(default="")

    def __post_init__(self):
        degs = tuple(int(x) for x in self.degs)
        object.__setattr__(self, "degs", degs)
        object.__setattr__(self, "B", Fraction(self.B))
        if not degs or any(x < 1 for x in degs):
            raise ValueError("degrees must be positive and nonempty")
        if self.t < 1:
            raise ValueError("t must be at least 1")
        case = "all_divisible" if all(x % self.p == 0 for x in degs) else "generic"
        if self.case and self.case != case:
            raise ValueError(f"case {self.case!r} inconsistent with degrees {degs}")
        object.__setattr__(self, "case", case)
        if self.field_degree is None:
            object.__setattr__(self, "field_degree", self.p - 1)
        limit = self.p ** (self.r - 1) if case == "generic" else self.p**self.r
        if self.t >= limit:
            raise ValueError(f"need t < {limit} for case {case}, got t={self.t}")

    @property
    def r(self) -> int:
        return len(self.degs)

    @property
    def d(self) -> int:
        return sum(self.degs)


def monomials(delta: int, p: int, degs: Sequence[int]) -> list[tuple[int, ...]]:
    """All ``(i0, i1..ir)`` with ``0 <= i_l < p`` and ``p*i0 + sum i_l d_l <= delta``."""
    out = []
    for exps in itertools.product(range(p), repeat=len(degs)):
        used = sum(e * d for e, d in zip(exps, degs))
        if used > delta:
            continue
        for i0 in range((delta - used) // p + 1):
            out.append((i0,) + exps)
    out.sort()
    return out


def monomial_count_generating(p: int, degs: Sequence[int], upto: int) -> list[int]:
    """Coefficients of ``prod_i sum_{j<p} x^(j d_i) / ((1-x)(1-x^p))`` up to ``x^upto``."""
    num = [0] * (upto + 1)
    num[0] = 1
    for d in degs:
        new = [0] * (upto + 1)
        for i, c in enumerate(num):
            if c:
                for j in range(p):
                    if i + j * d <= upto:
                        new[i + j * d] += c
        num = new
    # divide by (1 - x): prefix sums; by (1 - x^p): strided prefix sums
    for i in range(1, upto + 1):
        num[i] += num[i - 1]
    for i in range(p, upto + 1):
        num[i] += num[i - p]
    return num


def _case(p: int, degs: Sequence[int]) -> str:
    return "all_divisible" if all(d % p == 0 for d in degs) else "generic"


def closed_form_valid(delta: int, p: int, degs: Sequence[int]) -> bool:
    d = sum(degs)
    if _case(p, degs) == "generic":
        return delta >= (p - 1) * (d - 1) - 1
    return p * (delta // p) >= (p - 1) * (d - 2) - 1


def monomial_count_closed(delta: int, p: int, degs: Sequence[int]) -> int:
    """Closed form for ``m(delta)`` on its range of validity."""
    if not closed_form_valid(delta, p, degs):
        raise ValueError(f"delta={delta} below the validity range for p={p}, degs={tuple(degs)}")
    r, d = len(degs), sum(degs)
    if _case(p, degs) == "generic":
        val = Fraction(p ** (r - 1)) * (delta + 1 - Fraction((p - 1) * (d - 1), 2))
    else:
        val = Fraction(p ** (r - 1)) * (p * (delta // p) + 1 - Fraction((p - 1) * (d - 2), 2))
    if val.denominator != 1:
        raise ArithmeticError("closed form produced a non-integer count")
    return int(val)


def genus(p: int, degs: Sequence[int], case: str | None = None) -> int:
    """Genus of the smooth model of ``y_i^p = f_i(x)``, ``deg f_i = degs[i]``."""
    actual = _case(p, degs)
    if case and case != actual:
        raise ValueError(f"case {case!r} inconsistent with degrees {tuple(degs)}")
    r, d = len(degs), sum(degs)
    shift = 1 if actual == "generic" else 2
    g = Fraction(p ** (r - 1)) * (Fraction((p - 1) * (d - shift), 2) - 1) + 1
    if g.denominator != 1 or g < 0:
        raise ValueError(f"genus formula gives {g}: inconsistent (p, degs)")
    return int(g)


def riemann_hurwitz_genus(p: int, degs: Sequence[int]) -> Fraction:
    """Genus from ``2g - 2 = -2p^r + d(p-1)p^(r-1) + p^r - n`` with ``n = p^(r-1)`` points above infinity."""
    r, d = len(degs), sum(degs)
    n = p ** (r - 1)
    return Fraction(-2 * p**r + d * (p - 1) * p ** (r - 1) + p**r - n + 2, 2)


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def delta_choice(params: MainthParams) -> int:
    """The degree ``delta`` (generic) or ``delta'`` (all degrees divisible by p)."""
    p, r, d, t = params.p, params.r, params.d, params.t
    if params.case == "generic":
        delta = _ceil_div(p ** (r - 1) * ((p - 1) * (d - 1) - 2) + t + 2, p ** (r - 1) - t)
        delta = max(delta, 0)
        if delta < (p - 1) * (d - 1) - 1:
            raise ArithmeticError("delta below the closed-form range")
        if not (delta + 1) * t < monomial_count_closed(delta, p, params.degs):
            raise ArithmeticError("(delta+1) t < m(delta) fails")
        return delta
    delta1 = _ceil_div(p ** (r - 1) * ((p - 1) * (d - 2) - 2) + t + 2, p**r - t)
    delta1 = max(delta1, 0)
    if p * delta1 < (p - 1) * (d - 2) - 1:
        raise ArithmeticError("delta' below the closed-form range")
    if not (delta1 + 1) * t < monomial_count_closed(p * delta1, p, params.degs):
        raise ArithmeticError("(delta'+1) t < m'(delta') fails")
    return delta1


def count_m(params: MainthParams, delta: int) -> Fraction:
    """``m`` (generic) or ``m'`` (all-divisible) of the main theorem for the given degree."""
    p, r, d = params.p, params.r, params.d
    if params.case == "generic":
        return Fraction(p ** (r - 1)) * (delta + 1 - Fraction((p - 1) * (d - 1), 2))
    return Fraction(p ** (r - 1)) * (p * delta + 1 - Fraction((p - 1) * (d - 2), 2))


@dataclass(frozen=True)
class MainBound:
    delta: int
    m: Fraction
    sharp: LogBound
    simplified: LogBound


def height_bound_main(params: MainthParams, prec: int | None = None) -> MainBound:
    """Sharp and simplified log-bounds on ``H(alpha)``."""
    p, t, B, d, r = params.p, params.t, params.B, params.d, params.r
    n = params.field_degree
    delta = delta_choice(params)
    m = count_m(params, delta)
    disc = ("iv", _disc_interval(params.disc_log, prec))
    if params.case == "generic":
        terms = [
            (m * p / (2 * n), disc),
            ((delta + 1) * (delta * t + 1) + 2 * p, 2),
            ((delta + 1) * (t * (2 * delta - p) + 2), p),
            (p * (Fraction((delta + 1) * t, 2) + 1), m),
            (delta * (delta + 1) * t + 2 * delta + 1, B),
        ]
        tag = "main:generic"
    else:
        terms = [
            (m / (2 * n), disc),
            ((delta + 1) * (delta * t + 1) + 1, 2),
            ((delta + 1) * (t * (2 * delta - 1) + 2), p),
            (Fraction((delta + 1) * t, 2) + 1, m),
            (delta * (delta + 1) * t + 2 * delta + 1, B),
        ]
        tag = "main:divisible"
    sharp = _evaluate(terms, tag, prec)
    simple = _evaluate(
        [(d * p ** (2 * r), disc), (d * d * p ** (3 * r), 2 * d * p**3 * B)],
        "main:simplified",
        prec,
    )
    return MainBound(delta, m, sharp, simple)


def _disc_interval(disc_log, prec):
    prec = prec or working_precision()
    with _ivprec(prec):
        if isinstance(disc_log, LogBound):
            return iv.mpf([disc_log.lower, disc_log.log_value])
        if isinstance(disc_log, (int, Fraction)):
            v = Fraction(disc_log)
            return iv.mpf(v.numerator) / v.denominator
        return iv.mpf(disc_log)


def cyclotomic_disc_log(p: int, prec: int | None = None) -> LogBound:
    """``log |D_{Q(zeta_p)}| = (p-2) log p``."""
    return _evaluate([(p - 2, p)], "disc:Q(zeta_p)", prec)


# ---------------------------------------------------------------------------
# consequences for superelliptic curves
# ---------------------------------------------------------------------------


def exact_log_less(value: Fraction, base: int, bound: Fraction | int) -> bool:
    """Decide ``log_base(value) < bound`` exactly; ``bound`` must be an integer."""
    value = Fraction(value)
    bound = Fraction(bound)
    if bound.denominator != 1:
        raise ValueError("exact comparison needs an integral right-hand side")
    if value <= 0:
        raise ValueError("log of a nonpositive number")
    return value < Fraction(base) ** int(bound)


@dataclass(frozen=True)
class SrResult:
    epsilon: int
    condition: bool
    bound: LogBound


def sr_epsilon(p: int, degs: Sequence[int]) -> int:
    d = sum(degs)
    if all(x % p == 0 for x in degs):
        return 0
    if d % p:
        return 1
    return 2


def thm_sr(
    p: int,
    gs: Sequence[RationalPoly],
    n: int = 1,
    a: int = 1,
    s_size: int = 1,
    disc_log=None,
    prec: int | None = None,
) -> SrResult:
    """Finiteness condition and height bound for ``a y^p = prod g_i^n`` over Q.

    Specialised to K' = Q: one archimedean place, trivial class group.  The
    prime count uses the discriminant of ``prod g_i`` (nonzero even when n > 1).
    """
    if any(not g.is_monic() or not g.has_integer_coeffs() for g in gs):
        raise ValueError("g_i must be monic with integer coefficients")
    if not pairwise_coprime(gs):
        raise ValueError("g_i must be squarefree and pairwise coprime")
    if math.gcd(n, p) != 1 or n < 1:
        raise ValueError("n must be a positive integer prime to p")
    if a == 0:
        raise ValueError("a must be nonzero")
    r = len(gs)
    epsilon = sr_epsilon(p, [n * g.degree for g in gs])
    g_prod = RationalPoly((1,))
    for g in gs:
        g_prod = g_prod * g
    disc = poly_discriminant(g_prod)
    w = omega(int(a * disc))
    rhs = r - (w + 1 + epsilon)
    condition = rhs > 0 and exact_log_less(Fraction(s_size), p, rhs)
    d1 = g_prod.degree
    h_prod = math.prod(poly_height(g)[0] for g in gs)
    if disc_log is None:
        disc_log = cyclotomic_disc_log(p, prec)
    bound = _evaluate(
        [
            (d1 * p ** (2 * r), ("iv", _disc_interval(disc_log, prec))),
            (d1 * d1 * p ** (3 * r), 4 * d1 * p**3 * h_prod),
        ],
        "sr:height",
        prec,
    )
    return SrResult(epsilon, condition, bound)


def thm_wth(p: int, fs: Sequence[RationalPoly], prec: int | None = None) -> tuple[int, LogBound]:
    """Guaranteed ``omega`` of the product of p-free parts, and the log of the ``|x|`` cutoff."""
    if any(not f.is_monic() or not f.has_integer_coeffs() for f in fs):
        raise ValueError("polynomials must be monic with integer coefficients")
    if not pairwise_coprime(fs):
        raise ValueError("polynomials must be squarefree and pairwise coprime")
    r = len(fs)
    d = sum(f.degree for f in fs)
    h = max(poly_height(f)[0] for f in fs)
    target = r if all(f.degree % p == 0 for f in fs) else r - 1
    cutoff = _evaluate([(2 * d * d * p ** (r + 1), 8 * d * p**3 * h)], "wth:cutoff", prec)
    return target, cutoff


def factorial(n: int) -> int:
    return math.factorial(n)


def thm_par(k: int, r: int, p: int, b: int, omega_d: int, prec: int | None = None) -> tuple[bool, LogBound]:
    """Condition on ``omega((k-1)! b)`` and the log of the bound on ``max(|x|, |d|)``."""
    if k < 2 or not 1 <= r <= k or b == 0:
        raise ValueError("need k >= 2, 1 <= r <= k, b != 0")
    w0 = omega(math.factorial(k - 1) * b)
    arg = euler_phi(2 * p) * (Fraction(p, 2) + omega_d)
    rhs = r - w0 - 1
    condition = exact_log_less(arg, p, rhs)
    bound = _evaluate([(p ** (3 * r) * r * r, 2 * k * p**4 * r)], "par:bound", prec)
    return condition, bound


def split_count(q: int, m: int) -> int:
    """Number of primes of ``Q(sqrt m)`` above the rational prime ``q``."""
    disc = m if m % 4 == 1 else 4 * m
    if disc % q == 0:
        return 1
    if q == 2:
        return 2 if m % 8 == 1 else 1
    return 2 if pow(m % q, (q - 1) // 2, q) == 1 else 1


def omega_quadratic(n: int, m: int) -> int:
    """Number of distinct prime ideals of ``Q(sqrt m)`` dividing the rational integer ``n``."""
    return sum(split_count(q, m) for q, _ in factorize(n))


def thm_par2(
    k: int,
    r: int,
    m: int,
    b: int,
    omega_L_d: int,
    omega_L_kb: int | None = None,
    prec: int | None = None,
) -> tuple[bool, LogBound]:
    """Quadratic-field variant: condition and the log of the bound on ``H(x/d)``.

    ``b`` is a rational integer here; pass ``omega_L_kb`` directly for a general
    element of the ring of integers.
    """
    if m in (0, 1) or any(e > 1 for _, e in factorize(m)):
        raise ValueError("m must be squarefree and different from 0, 1")
    if omega_L_kb is None:
        omega_L_kb = omega_quadratic(math.factorial(k - 1) * b, m)
    rhs = r - 4 - omega_L_kb - omega(m)
    condition = exact_log_less(Fraction(omega_L_d + 2), 2, rhs)
    bound = _evaluate([(2 ** (3 * r) * r * r, 16 * k * r)], "par2:bound", prec)
    return condition, bound


# ---------------------------------------------------------------------------
# arithmetic progressions
# ---------------------------------------------------------------------------

CUTOFF_LOG_HEIGHT = 10**14  # natural-log cutoff used for the k <= 17 search


def ieq_max_omega(k: int, r: int, eps: int) -> int:
    """Largest ``omega(d)`` with ``omega(d) < 2^(r - pi(k-1) - eps) - 2``; -1 if none."""
    if not 8 <= k <= 17:
        raise ValueError("k must satisfy 8 <= k <= 17")
    if not 1 <= r <= k:
        raise ValueError("need 1 <= r <= k")
    if eps not in (0, 1):
        raise ValueError("eps is 0 or 1")
    e = r - prime_pi(k - 1) - eps
    if e <= 0:
        return -1
    return max(2**e - 3, -1)


def ieq_holds(k: int, r: int, omega_d: int, eps: int) -> bool:
    return omega_d <= ieq_max_omega(k, r, eps)


def table_entry(k: int, r: int) -> int:
    """Largest ``w`` such that every ``d`` with ``omega(d) <= w`` meets the admissibility inequality.

    ``omega(d) = 0`` forces ``d = 1`` and hence ``eps = 0``; a positive
    ``omega(d)`` may come with ``eps = 1``.
    """
    worst = ieq_max_omega(k, r, 1)
    if worst >= 1:
        return worst
    return 0 if ieq_max_omega(k, r, 0) >= 0 else -1


TABLE1_KS = (11, 13, 17)


def table1() -> list[tuple[int, int, int]]:
    """Rows ``(psi, k, max omega(d))`` for prime ``k`` in 11, 13, 17."""
    rows = []
    for k in TABLE1_KS:
        psi = 0
        while True:
            v = table_entry(k, k - psi)
            if v < 0:
                break
            rows.append((psi, k, v))
            psi += 1
    return rows


def table1_grid() -> list[list[int | None]]:
    """The table as a 10 x 3 grid (rows psi = 0..9), blank cells as None."""
    entries = {(psi, k): v for psi, k, v in table1()}
    return [[entries.get((psi, k)) for k in TABLE1_KS] for psi in range(10)]


def corollary_prime_count(k: int, omega_d: int, eps: int) -> int:
    """Guaranteed number of primes above ``k-1`` dividing the progression product to an odd power."""
    if not 8 <= k <= 17:
        raise ValueError("k must satisfy 8 <= k <= 17")
    return k - prime_pi(k - 1) - eps - int(math.floor(math.log2(omega_d + 2)))


def bv_bound(
    n_rows: int,
    n_cols: int,
    rank: int,
    log_height_A,
    disc_log=0,
    field_degree: int = 1,
    prec: int | None = None,
) -> LogBound:
    """Log of ``|D_L|^((n-r)/(2[L:Q])) (sqrt(n) H(A))^r`` for an ``n_rows x n_cols`` matrix of rank ``r``."""
    if rank > min(n_rows, n_cols) or rank < 0:
        raise ValueError("rank exceeds matrix dimensions")
    n = n_cols
    prec = prec or working_precision()
    with _ivprec(prec):
        hA = _disc_interval(log_height_A, prec)
    terms = [
        (Fraction(n - rank, 2 * field_degree), ("iv", _disc_interval(disc_log, prec))),
        (Fraction(rank, 2), n),
        (rank, ("iv", hA)),
    ]
    return _evaluate(terms, "bombieri-vaaler", prec)
