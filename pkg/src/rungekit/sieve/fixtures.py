"""Known positive solutions ``(d, x)`` for ``8 <= k <= 17``, keyed by ``d``."""

from __future__ import annotations

SOLUTION_TABLE: dict[int, tuple[int, ...]] = {
    1: (
        1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 18, 20, 21, 22, 24, 25, 26,
        27, 28, 30, 32, 33, 35, 36, 39, 40, 42, 44, 45, 48, 49, 50, 52, 54, 55, 56, 60,
        63, 64, 65, 66, 70, 72, 75, 77, 84, 88, 90, 96, 98, 117, 120,
    ),
    2: (1, 3, 5, 7, 9, 11, 13, 15, 21, 25, 33),
    3: (1, 2, 4, 5, 7, 8, 10, 11, 13, 14, 16, 20, 22, 25, 32),
    4: (1, 3, 5, 7, 9, 11, 13, 21),
    5: (1, 2, 3, 4, 6, 7, 8, 9, 11, 12, 13, 14, 16, 18, 21, 24, 28, 39),
    7: (1, 2, 3, 4, 5, 6, 8, 9, 11, 12, 13, 15, 16, 18, 20, 26, 30, 44),
    8: (1, 9),
    9: (4, 8),
    11: (3, 4, 6, 10, 15, 26, 48),
    13: (1, 7),
    17: (5, 22),
    19: (4,),
    23: (16,),
}


def table_pairs() -> frozenset[tuple[int, int]]:
    """All ``(d, x)`` pairs of the table."""
    return frozenset((d, x) for d, xs in SOLUTION_TABLE.items() for x in xs)
