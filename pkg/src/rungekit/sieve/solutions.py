"""Exact checks of ``b y^2 = prod (x + gamma d)`` with ``gcd(x, d) = 1`` and ``P(b) < k``."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..exact_arith import factorize, largest_prime_factor, prime_pi, squarefree_part
from ..runge_bounds import ieq_holds


@dataclass(frozen=True)
class Solution:
    x: int
    d: int
    b: int
    y: int
    gammas: tuple[int, ...]
    k: int


def square_decomposition(n: int) -> tuple[int, int]:
    """``n = b * y^2`` with ``b`` squarefree."""
    b, y = 1, 1
    for q, e in factorize(n):
        if e % 2:
            b *= q
        y *= q ** (e // 2)
    return b, y


def verify_solution(x: int, d: int, gammas: Sequence[int], k: int) -> tuple[int, int] | None:
    """``(b, y)`` when ``prod (x + g d) = b y^2`` with ``P(b) < k`` and ``gcd(x, d) = 1``."""
    if x <= 0 or d <= 0 or math.gcd(x, d) != 1:
        return None
    prod = math.prod(x + g * d for g in gammas)
    if prod <= 0:
        return None
    b, y = square_decomposition(prod)
    if largest_prime_factor(b) >= k:
        return None
    return b, y


def smooth_offsets(x: int, d: int, k: int) -> tuple[int, ...]:
    """``gamma`` in ``0..k-1`` whose term ``x + gamma d`` has squarefree part free of primes ``>= k``."""
    return tuple(g for g in range(k) if largest_prime_factor(squarefree_part(x + g * d)) < k)


def eps_dk(d: int, k: int) -> int:
    """0 when the squarefree part of ``d`` has no prime above ``k - 1``, else 1."""
    return 0 if largest_prime_factor(squarefree_part(d)) < k else 1


def admissible_r(d: int, k: int) -> int | None:
    """Smallest ``r`` for which the admissibility inequality holds for this ``d``; None if none."""
    w = len(factorize(d).factors)
    eps = eps_dk(d, k)
    for r in range(1, k + 1):
        if ieq_holds(k, r, w, eps):
            return r
    return None


def witness(x: int, d: int, k: int, r: int | None = None) -> Solution | None:
    """A witnessing ``gamma`` tuple with ``gamma_1 = 0`` and at least ``r`` terms, if one exists.

    All terms with smooth squarefree part can be used together, so the largest
    such tuple is a witness whenever any tuple is.
    """
    if math.gcd(x, d) != 1 or x <= 0 or d <= 0:
        return None
    if r is None:
        r = admissible_r(d, k)
        if r is None:
            return None
    good = smooth_offsets(x, d, k)
    if not good or good[0] != 0 or len(good) < r:
        return None
    gammas = good[:r]
    by = verify_solution(x, d, gammas, k)
    if by is None:
        return None
    return Solution(x, d, by[0], by[1], gammas, k)


def witnesses_by_subsets(x: int, d: int, k: int, r: int) -> Iterable[tuple[int, ...]]:
    """Every ``r``-subset of ``0..k-1`` containing 0 that passes :func:`verify_solution` (exhaustive)."""
    for rest in itertools.combinations(range(1, k), r - 1):
        gammas = (0,) + rest
        if verify_solution(x, d, gammas, k) is not None:
            yield gammas


def first_prime_count(k: int) -> int:
    return prime_pi(k - 1)
