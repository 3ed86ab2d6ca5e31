"""Six-term configurations ``(gammas, a)`` and their fifteen quartic curves."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

from ..ec import QuarticModel, WeierstrassCurve, curve_from_quadruple
from ..exact_arith import is_squarefree, largest_prime_factor, primes_upto, squarefree_part


def max_a_prime(k: int) -> int:
    """Largest prime allowed in the ``a_i``: ``P(a_i) < k`` and at most 11."""
    return min(11, k - 1)


@dataclass(frozen=True)
class Configuration:
    k: int
    gammas: tuple[int, ...]
    a: tuple[int, ...]

    def __post_init__(self):
        g = tuple(int(v) for v in self.gammas)
        a = tuple(int(v) for v in self.a)
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "a", a)
        if not 8 <= self.k <= 17:
            raise ValueError("k must satisfy 8 <= k <= 17")
        if len(g) != 6 or len(a) != 6:
            raise ValueError("a configuration has six gammas and six a's")
        if list(g) != sorted(set(g)) or g[0] != 0 or g[-1] >= self.k:
            raise ValueError("gammas must be distinct, increasing, start at 0 and stay below k")
        bound = max_a_prime(self.k)
        for ai in a:
            if ai < 1 or not is_squarefree(ai) or largest_prime_factor(ai) > bound:
                raise ValueError(f"a_i = {ai} is not a positive squarefree {bound}-smooth integer")
        if not compatible(g, a):
            raise ValueError("a prime divides two a_i whose gammas differ by a non-multiple")

    def to_json(self) -> dict:
        return {"k": self.k, "gammas": list(self.gammas), "a": list(self.a)}

    @classmethod
    def from_json(cls, obj: dict) -> Configuration:
        return cls(int(obj["k"]), tuple(obj["gammas"]), tuple(obj["a"]))


def compatible(gammas: Sequence[int], a: Sequence[int]) -> bool:
    """If a prime divides ``a_i`` and ``a_j`` it divides ``gamma_i - gamma_j``."""
    for i, j in itertools.combinations(range(len(a)), 2):
        g = math.gcd(a[i], a[j])
        if g > 1 and (gammas[i] - gammas[j]) % g:
            return False
    return True


def gamma_tuples(k: int) -> Iterator[tuple[int, ...]]:
    """Six distinct gammas in ``[0, k)`` with minimum 0, in lexicographic order."""
    for rest in itertools.combinations(range(1, k), 5):
        yield (0,) + rest


def _prime_choices(gammas: Sequence[int], q: int) -> list[frozenset[int]]:
    """Index sets that ``q`` may divide: empty, or any nonempty subset of one residue class."""
    classes: dict[int, list[int]] = {}
    for i, g in enumerate(gammas):
        classes.setdefault(g % q, []).append(i)
    out = [frozenset()]
    for members in classes.values():
        for size in range(1, len(members) + 1):
            for sub in itertools.combinations(members, size):
                out.append(frozenset(sub))
    return out


def a_tuples(gammas: Sequence[int], k: int) -> Iterator[tuple[int, ...]]:
    """All compatible squarefree ``a``-tuples for the gammas (deterministic order)."""
    primes = primes_upto(max_a_prime(k))
    choices = [_prime_choices(gammas, q) for q in primes]
    for pick in itertools.product(*choices):
        a = [1] * len(gammas)
        for q, idx in zip(primes, pick):
            for i in idx:
                a[i] *= q
        yield tuple(a)


def count_a_tuples(gammas: Sequence[int], k: int) -> int:
    return math.prod(len(_prime_choices(gammas, q)) for q in primes_upto(max_a_prime(k)))


def enumerate_configs(k: int) -> Iterator[Configuration]:
    """Every configuration for ``k``, gammas outermost."""
    if not 8 <= k <= 17:
        raise ValueError("k must satisfy 8 <= k <= 17")
    for g in gamma_tuples(k):
        for a in a_tuples(g, k):
            yield Configuration(k, g, a)


@dataclass(frozen=True)
class CurveData:
    """The curve for a 4-subset ``J`` (indices into the configuration)."""

    J: tuple[int, int, int, int]
    model: QuarticModel
    curve: WeierstrassCurve

    @property
    def key(self) -> tuple[tuple[int, ...], int]:
        """Database key: gammas translated so the first is 0, and ``aJ``."""
        g1 = self.model.gammas[0]
        return tuple(g - g1 for g in self.model.gammas), self.model.aJ


def curves_for(config: Configuration) -> list[CurveData]:
    out = []
    for J in itertools.combinations(range(6), 4):
        gammas = tuple(config.gammas[j] for j in J)
        aJ = squarefree_part(math.prod(config.a[j] for j in J))
        model, curve = curve_from_quadruple(gammas, aJ)
        out.append(CurveData(J, model, curve))
    return out


def config_from_solution(x: int, d: int, gammas6: Sequence[int], k: int) -> tuple[Configuration, int]:
    """Configuration induced by a solution on six chosen gammas, and the shift removed."""
    s = min(gammas6)
    g = tuple(sorted(v - s for v in gammas6))
    a = tuple(squarefree_part(x + (v + s) * d) for v in g)
    return Configuration(k, g, a), s
