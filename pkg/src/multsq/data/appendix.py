"""Published exceptional solutions mod p, one row per sign-flip pair.

Each row is ``(1/2a_0, a_2, a_3, a_4, a_5, a_7, a_8, a_9, a_11, a_13, a_16)``
followed by the modular-form annotation printed next to it ("" where none
was given).
"""
from __future__ import annotations

COLUMNS = ("1/2a_0", "a_2", "a_3", "a_4", "a_5", "a_7", "a_8", "a_9", "a_11", "a_13", "a_16")

TABLES: dict[int, list[tuple[tuple[int, ...], str]]] = {
    3: [
        ((1, 0, 0, 0, 0, 2, 0, 0, 0, 2, 0), "E_2"),
        ((1, 0, 1, 0, 0, 2, 0, 1, 0, 2, 0), "E_2"),
        ((1, 0, 1, 1, 0, 1, 0, 1, 0, 2, 1), "E_2"),
        ((1, 0, 2, 2, 2, 0, 0, 0, 1, 0, 2), "theta_Z[(1+sqrt(-11))/2]"),
        ((1, 1, 1, 0, 0, 1, 1, 1, 0, 2, 0), "E_2"),
        ((1, 1, 1, 0, 0, 2, 0, 1, 0, 2, 0), "E_2"),
        ((1, 1, 1, 1, 2, 2, 1, 1, 0, 2, 1), "E_2"),
        ((1, 1, 1, 2, 1, 2, 1, 1, 0, 2, 2), "E_2"),
        ((1, 1, 2, 1, 1, 0, 0, 1, 2, 1, 1), "15.2.1.a"),
        ((1, 1, 2, 2, 0, 0, 2, 0, 2, 0, 2), "theta_Z[sqrt(2)]"),
        ((1, 2, 1, 0, 2, 2, 2, 1, 0, 2, 0), "E_2"),
        ((1, 2, 1, 1, 0, 0, 0, 1, 2, 2, 1), "75.2.1.a or 75.2.1.b"),
        ((1, 2, 1, 2, 1, 2, 0, 1, 1, 1, 2), "21.2.1.a"),
        ((1, 2, 2, 0, 1, 1, 2, 1, 1, 1, 2), ""),
        ((1, 2, 2, 2, 0, 1, 2, 1, 0, 1, 2), "50.2.1.b"),
    ],
    5: [
        ((1, 1, 2, 2, 1, 4, 0, 4, 2, 3, 4), "E_4"),
        ((1, 1, 2, 3, 0, 1, 0, 2, 2, 2, 1), "5.4.1.a"),
        ((1, 2, 3, 3, 1, 3, 0, 3, 2, 4, 4), "E_2"),
        ((1, 2, 4, 4, 1, 3, 4, 3, 2, 4, 4), "E_2"),
        ((1, 3, 4, 2, 1, 3, 0, 3, 2, 4, 1), "E_2"),
        ((2, 3, 3, 4, 1, 4, 2, 2, 2, 3, 1), "E_4"),
    ],
    7: [
        ((1, 6, 2, 3, 6, 2, 0, 4, 3, 1, 2), "3.6.1.a"),
        ((2, 5, 2, 5, 2, 0, 5, 1, 0, 2, 5), "theta_Z[i]"),
        ((3, 2, 4, 1, 1, 1, 6, 6, 5, 0, 2), "E_2"),
        ((3, 2, 5, 2, 2, 0, 2, 1, 0, 2, 2), "theta_Z[i]"),
        ((3, 3, 0, 2, 0, 0, 3, 2, 1, 0, 4), "7.6.1.a"),
        ((3, 3, 6, 5, 4, 1, 6, 3, 3, 0, 3), "E_6"),
    ],
    11: [
        ((4, 3, 1, 10, 0, 2, 3, 1, 0, 2, 10), "theta_Z[zeta_3]"),
        ((5, 6, 9, 8, 1, 5, 7, 0, 7, 4, 2), "2.10.1.a"),
    ],
    13: [
        ((2, 2, 5, 10, 7, 0, 6, 3, 0, 8, 7), "1.12.1.a"),
        ((2, 5, 11, 10, 9, 6, 11, 8, 6, 1, 6), "E_4"),
        ((4, 6, 10, 9, 6, 12, 1, 0, 8, 1, 5), "E_6"),
    ],
    17: [
        ((3, 12, 1, 16, 5, 14, 16, 12, 5, 7, 14), "1.16.1.a"),
        ((4, 7, 12, 11, 11, 13, 13, 14, 4, 5, 14), "E_8"),
    ],
    19: [
        ((1, 5, 15, 5, 2, 0, 5, 1, 0, 2, 5), "theta_Z[i]"),
        ((5, 6, 15, 6, 2, 0, 6, 1, 0, 2, 6), "theta_Z[i]"),
        ((5, 13, 16, 5, 10, 12, 15, 13, 8, 15, 12), "E_6"),
        ((9, 7, 15, 7, 2, 0, 7, 1, 0, 2, 7), "theta_Z[i]"),
    ],
    23: [],
    29: [],
    31: [],
}

TABLE_PRIMES = tuple(sorted(TABLES))


def annotation(p: int, row: tuple[int, ...]) -> str | None:
    """The printed annotation for ``row`` (either member of its sign pair), else None."""
    from ..search import flip_tuple

    for r, c in TABLES.get(p, []):
        if r == tuple(row) or r == flip_tuple(tuple(row), p):
            return c
    return None
