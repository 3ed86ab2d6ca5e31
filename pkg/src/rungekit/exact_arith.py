"""Exact integer, rational, cyclotomic and polynomial arithmetic.

Nothing in this module rounds.  Rationals are :class:`fractions.Fraction`,
cyclotomic numbers are coordinate vectors over the power basis of
``Q(zeta_p)`` and polynomials are coefficient tuples, lowest degree first.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

# ---------------------------------------------------------------------------
# primes and factorization
# ---------------------------------------------------------------------------

_TRIAL_LIMIT = 10**6
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


@lru_cache(maxsize=8)
def _sieve(limit: int) -> tuple[int, ...]:
    if limit < 2:
        return ()
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return tuple(i for i, f in enumerate(flags) if f)


def primes_below(k: int) -> list[int]:
    """Primes strictly smaller than ``k``."""
    if k <= 2:
        return []
    return list(_sieve(k - 1))


def primes_upto(n: int) -> list[int]:
    return list(_sieve(n)) if n >= 2 else []


def prime_pi(x: int) -> int:
    """Number of primes ``<= x``."""
    if x < 2:
        return 0
    return len(_sieve(int(x)))


def is_prime(n: int) -> bool:
    """Miller-Rabin with the first 13 prime bases.

    Deterministic for ``n < 3.3 * 10**24``, which covers every 64-bit input.
    """
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent(n: int) -> int:
    # returns a nontrivial factor of the odd composite n
    for c in range(1, 200):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"Pollard-Brent failed on {n}")


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = math.isqrt(n)
    if r * r == n:
        _split(r, out)
        _split(r, out)
        return
    f = _brent(n)
    _split(f, out)
    _split(n // f, out)


@dataclass(frozen=True)
class FactoredInteger:
    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.value < 1:
            raise ValueError("FactoredInteger needs a positive value")
        if math.prod(p**e for p, e in self.factors) != self.value:
            raise ValueError("factors do not multiply to value")

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def __iter__(self):
        return iter(self.factors)


def factorize(n: int) -> FactoredInteger:
    """Complete factorization of ``|n|`` by trial division to 10**6 then Pollard-Brent."""
    if n == 0:
        raise ValueError("cannot factor 0")
    n = abs(n)
    rest = n
    found: dict[int, int] = {}
    for p in _sieve(min(_TRIAL_LIMIT, math.isqrt(n) + 1)):
        if p * p > rest:
            break
        if rest % p == 0:
            e = 0
            while rest % p == 0:
                rest //= p
                e += 1
            found[p] = e
    if rest > 1:
        if rest < _TRIAL_LIMIT**2 or is_prime(rest):
            found[rest] = found.get(rest, 0) + 1
        else:
            _split(rest, found)
    return FactoredInteger(n, tuple(sorted(found.items())))


def pfree_part(n: int, p: int) -> int:
    """The ``p``-th-power-free part of ``|n|``: exponents reduced mod ``p``."""
    if n == 0:
        raise ValueError("pfree_part of 0 is undefined")
    return math.prod(q ** (e % p) for q, e in factorize(n))


def squarefree_part(n: int) -> int:
    return pfree_part(n, 2)


def omega(n: int) -> int:
    """Number of distinct prime divisors of ``|n|``."""
    return len(factorize(n).factors)


def largest_prime_factor(n: int) -> int:
    """P(n), with the convention P(1) = 1."""
    f = factorize(n).factors
    return f[-1][0] if f else 1


def euler_phi(n: int) -> int:
    result = n
    for p, _ in factorize(n):
        result = result // p * (p - 1)
    return result


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(n))


def is_smooth(n: int, bound: int) -> bool:
    """True if every prime factor of ``|n|`` is at most ``bound``."""
    n = abs(n)
    for p in _sieve(max(bound, 1)):
        while n % p == 0:
            n //= p
    return n == 1


def integer_nth_root(n: int, k: int) -> int | None:
    """Exact ``k``-th root of ``n`` if it is a perfect power, else None."""
    if n < 0:
        if k % 2 == 0:
            return None
        r = integer_nth_root(-n, k)
        return None if r is None else -r
    if n < 2:
        return n
    if k == 2:
        r = math.isqrt(n)
        return r if r * r == n else None
    # Newton from above: the start value exceeds the true root
    r = 1 << (n.bit_length() // k + 1)
    while r**k > n:
        r = ((k - 1) * r + n // r ** (k - 1)) // k
    while (r + 1) ** k <= n:
        r += 1
    return r if r**k == n else None


def rational_nth_root(q: Fraction, k: int) -> Fraction | None:
    q = Fraction(q)
    num = integer_nth_root(q.numerator, k)
    den = integer_nth_root(q.denominator, k)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def is_square(q: Fraction | int) -> bool:
    q = Fraction(q)
    return q >= 0 and rational_nth_root(q, 2) is not None


def lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * x // math.gcd(out, x)
    return out


# ---------------------------------------------------------------------------
# cyclotomic field Q(zeta_p)
# ---------------------------------------------------------------------------


def _as_fraction_tuple(xs: Iterable) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) for x in xs)


class CycloElement:
    """Element of ``Q(zeta_p)`` in the basis ``1, zeta, ..., zeta^(p-2)``.

    For ``p = 2`` the field is ``Q`` and ``zeta = -1``.
    """

    __slots__ = ("p", "coords")

    def __init__(self, p: int, coords: Sequence):
        coords = _as_fraction_tuple(coords)
        if len(coords) != p - 1:
            raise ValueError(f"need {p - 1} coordinates for p={p}, got {len(coords)}")
        self.p = p
        self.coords = coords

    @classmethod
    def from_rational(cls, p: int, q) -> CycloElement:
        return cls(p, (Fraction(q),) + (Fraction(0),) * (p - 2))

    @classmethod
    def zero(cls, p: int) -> CycloElement:
        return cls(p, (Fraction(0),) * (p - 1))

    @classmethod
    def one(cls, p: int) -> CycloElement:
        return cls.from_rational(p, 1)

    @classmethod
    def zeta_power(cls, p: int, j: int) -> CycloElement:
        """``zeta_p ** j`` for any integer ``j``."""
        j %= p
        if p == 2:
            return cls.from_rational(2, -1 if j else 1)
        if j == p - 1:
            return cls(p, (Fraction(-1),) * (p - 1))
        c = [Fraction(0)] * (p - 1)
        c[j] = Fraction(1)
        return cls(p, c)

    @classmethod
    def _from_long(cls, p: int, long: Sequence[Fraction]) -> CycloElement:
        # long: coefficients of 1..zeta^(p-1) (indices mod p already folded)
        top = long[p - 1] if len(long) >= p else Fraction(0)
        return cls(p, tuple(long[i] - top for i in range(p - 1)))

    def _check(self, other: CycloElement) -> None:
        if self.p != other.p:
            raise ValueError("mixing different cyclotomic fields")

    def _coerce(self, other) -> CycloElement:
        if isinstance(other, CycloElement):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return CycloElement.from_rational(self.p, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloElement(self.p, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return CycloElement(self.p, tuple(-a for a in self.coords))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycloElement(self.p, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloElement(self.p, tuple(a * other for a in self.coords))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.p
        if p == 2:
            return CycloElement(2, (self.coords[0] * other.coords[0],))
        long = [Fraction(0)] * p
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    if b:
                        long[(i + j) % p] += a * b
        return CycloElement._from_long(p, long)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycloElement(self.p, tuple(a / other for a in self.coords))
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = CycloElement.one(self.p)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CycloElement.from_rational(self.p, other)
        if not isinstance(other, CycloElement):
            return NotImplemented
        return self.p == other.p and self.coords == other.coords

    def __hash__(self):
        return hash((self.p, self.coords))

    def __bool__(self):
        return any(self.coords)

    def __repr__(self):
        return f"CycloElement({self.p}, {[str(c) for c in self.coords]})"

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def is_integral(self) -> bool:
        """Integer coordinates, i.e. membership in ``Z[zeta_p]``."""
        return all(c.denominator == 1 for c in self.coords)

    def conjugate(self, a: int) -> CycloElement:
        """Image under the automorphism ``zeta -> zeta**a``."""
        if a % self.p == 0:
            raise ValueError("a must be prime to p")
        out = CycloElement.zero(self.p)
        for i, c in enumerate(self.coords):
            if c:
                out = out + CycloElement.zeta_power(self.p, i * a) * c
        return out

    def norm(self) -> Fraction:
        prod = self
        for a in range(2, self.p):
            prod = prod * self.conjugate(a)
        return prod.coords[0]

    def inverse(self) -> CycloElement:
        if not self:
            raise ZeroDivisionError("inverse of zero")
        if self.p == 2:
            return CycloElement(2, (1 / self.coords[0],))
        others = CycloElement.one(self.p)
        for a in range(2, self.p):
            others = others * self.conjugate(a)
        n = (self * others).coords[0]
        return others / n

    def denominator(self) -> int:
        return lcm(*(c.denominator for c in self.coords))

    def content(self) -> Fraction:
        """Positive rational ``c`` with ``self / c`` integral and primitive."""
        if not self:
            return Fraction(0)
        den = self.denominator()
        g = 0
        for c in self.coords:
            g = math.gcd(g, int(c * den))
        return Fraction(g, den)

    def max_abs_coord(self) -> Fraction:
        return max(abs(c) for c in self.coords)

    def embeddings(self) -> list[complex]:
        """Float values under the ``p - 1`` complex embeddings (diagnostics only)."""
        if self.p == 2:
            return [complex(self.coords[0])]
        out = []
        for a in range(1, self.p):
            z = complex(math.cos(2 * math.pi * a / self.p), math.sin(2 * math.pi * a / self.p))
            out.append(sum(float(c) * z**i for i, c in enumerate(self.coords)))
        return out


# ---------------------------------------------------------------------------
# polynomials over Q
# ---------------------------------------------------------------------------


def _strip(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


class RationalPoly:
    """Univariate polynomial over Q, coefficients lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        self.coeffs = _strip(_as_fraction_tuple(coeffs))

    @classmethod
    def x(cls) -> RationalPoly:
        return cls((0, 1))

    @classmethod
    def constant(cls, c) -> RationalPoly:
        return cls((c,))

    @classmethod
    def from_roots(cls, roots: Iterable) -> RationalPoly:
        out = cls((1,))
        for r in roots:
            out = out * cls((-Fraction(r), 1))
        return out

    @classmethod
    def parse(cls, text: str) -> RationalPoly:
        return _PolyParser(text).parse()

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_monic(self) -> bool:
        return self.lc == 1

    def has_integer_coeffs(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def int_coeffs(self) -> list[int]:
        if not self.has_integer_coeffs():
            raise ValueError("polynomial has non-integer coefficients")
        return [int(c) for c in self.coeffs]

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RationalPoly((other,))
        if not isinstance(other, RationalPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = _poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return RationalPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_poly(other))

    def __rsub__(self, other):
        return _poly(other) - self

    def __mul__(self, other):
        other = _poly(other)
        if self.is_zero() or other.is_zero():
            return RationalPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RationalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = RationalPoly((1,))
        for _ in range(n):
            out = out * self
        return out

    def divmod(self, other: RationalPoly) -> tuple[RationalPoly, RationalPoly]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        lc = other.lc
        dg = other.degree
        for i in range(len(rem) - 1, dg - 1, -1):
            c = rem[i] / lc
            if c:
                q[i - dg] = c
                for j, b in enumerate(other.coeffs):
                    rem[i - dg + j] -= c * b
        return RationalPoly(q), RationalPoly(rem[:dg] if dg > 0 else [])

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def derivative(self) -> RationalPoly:
        return RationalPoly(i * c for i, c in enumerate(self.coeffs) if i)

    def monic(self) -> RationalPoly:
        if self.is_zero():
            return self
        return RationalPoly(c / self.lc for c in self.coeffs)

    def gcd(self, other: RationalPoly) -> RationalPoly:
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def primitive(self) -> tuple[int, ...]:
        """Coefficients scaled to coprime integers with positive leading term."""
        if self.is_zero():
            raise ValueError("zero polynomial has no primitive form")
        den = lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = math.gcd(g, v)
        sign = -1 if ints[-1] < 0 else 1
        return tuple(sign * v // g for v in ints)

    def __repr__(self):
        return f"RationalPoly({self})"

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if mono and abs(c) == 1:
                term = mono
            elif mono:
                term = f"{abs(c)}*{mono}"
            else:
                term = str(abs(c))
            parts.append(("-" if c < 0 else "+", term))
        s = "".join(f" {sgn} {t}" for sgn, t in parts).strip()
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def _poly(obj) -> RationalPoly:
    if isinstance(obj, RationalPoly):
        return obj
    if isinstance(obj, (int, Fraction)):
        return RationalPoly((obj,))
    raise TypeError(f"cannot treat {obj!r} as a polynomial")


class _PolyParser:
    """Recursive descent over ``+ - * ^ ** ( )``, integers, rationals and ``x``."""

    _token = re.compile(r"\s*(\*\*|\d+/\d+|\d+|[x+\-*^()/])")

    def __init__(self, text: str):
        self.tokens = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = self._token.match(text, pos)
            if not m:
                raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
            self.tokens.append(m.group(1))
            pos = m.end()
        self.i = 0

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _next(self):
        tok = self._peek()
        self.i += 1
        return tok

    def parse(self) -> RationalPoly:
        out = self._sum()
        if self._peek() is not None:
            raise ValueError(f"unexpected token {self._peek()!r}")
        return out

    def _sum(self):
        sign = 1
        if self._peek() in ("+", "-"):
            sign = -1 if self._next() == "-" else 1
        out = self._product() * sign
        while self._peek() in ("+", "-"):
            op = self._next()
            term = self._product()
            out = out + term if op == "+" else out - term
        return out

    def _product(self):
        out = self._power()
        while True:
            tok = self._peek()
            if tok == "*":
                self._next()
                out = out * self._power()
            elif tok in ("x", "(") or (tok and tok[0].isdigit()):
                out = out * self._power()
            else:
                return out

    def _power(self):
        base = self._atom()
        if self._peek() in ("^", "**"):
            self._next()
            exp = self._next()
            if exp is None or not exp.isdigit():
                raise ValueError("exponent must be a nonnegative integer")
            return base ** int(exp)
        return base

    def _atom(self):
        tok = self._next()
        if tok == "x":
            return RationalPoly.x()
        if tok == "(":
            out = self._sum()
            if self._next() != ")":
                raise ValueError("unbalanced parentheses")
            return out
        if tok and tok[0].isdigit():
            return RationalPoly.constant(Fraction(tok))
        raise ValueError(f"unexpected token {tok!r}")


def resultant(f: RationalPoly, g: RationalPoly) -> Fraction:
    """Resultant by the Euclidean remainder sequence over Q."""
    if f.is_zero() or g.is_zero():
        return Fraction(0)
    m, n = f.degree, g.degree
    if n == 0:
        return g.lc**m
    if m == 0:
        return f.lc**n
    r = f % g
    if r.is_zero():
        return Fraction(0)
    sign = -1 if (m * n) % 2 else 1
    return sign * g.lc ** (m - r.degree) * resultant(g, r)


def poly_discriminant(f: RationalPoly) -> Fraction:
    """``(-1)^(n(n-1)/2) Res(f, f') / lc(f)``."""
    n = f.degree
    if n < 1:
        raise ValueError("discriminant needs a nonconstant polynomial")
    if n == 1:
        return Fraction(1)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * resultant(f, f.derivative()) / f.lc


def poly_height(f: RationalPoly) -> tuple[int, int]:
    """Projective height H(f) over Q and the archimedean sup-norm of the primitive form.

    Over Q both are ``max |c|`` of the primitive integer coefficient vector.
    """
    if f.is_zero():
        raise ValueError("height of the zero polynomial is undefined")
    prim = f.primitive()
    h = max(abs(c) for c in prim)
    return h, h


def sup_norm(f: RationalPoly) -> Fraction:
    """``|f|_v`` at the real place: largest absolute coefficient, unscaled."""
    return max(abs(c) for c in f.coeffs)


def pairwise_coprime(fs: Sequence[RationalPoly]) -> bool:
    """True iff every ``f`` is squarefree and every pair has constant gcd."""
    for f in fs:
        if f.degree < 1:
            raise ValueError("pairwise_coprime expects nonconstant polynomials")
        if f.gcd(f.derivative()).degree > 0:
            return False
    for i in range(len(fs)):
        for j in range(i + 1, len(fs)):
            if fs[i].gcd(fs[j]).degree > 0:
                return False
    return True
