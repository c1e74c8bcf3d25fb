"""Subsets of {1, ..., 2n} as integer bitmasks.

Number ``v`` lives in bit ``v - 1``. Plain ``int`` is used everywhere so the
masks are hashable, cheap to copy and unbounded in width.
"""

from __future__ import annotations

from typing import Iterable, Iterator

SetMask = int

EMPTY: SetMask = 0


def bit(v: int) -> SetMask:
    return 1 << (v - 1)


def from_iter(values: Iterable[int]) -> SetMask:
    mask = 0
    for v in values:
        if v < 1:
            raise ValueError(f"numbers start at 1, got {v}")
        mask |= 1 << (v - 1)
    return mask


def members(mask: SetMask) -> Iterator[int]:
    """Yield the numbers in ``mask`` in increasing order."""
    v = 1
    while mask:
        if mask & 1:
            yield v
        mask >>= 1
        v += 1


def to_list(mask: SetMask) -> list[int]:
    return list(members(mask))


def contains(mask: SetMask, v: int) -> bool:
    return (mask >> (v - 1)) & 1 == 1


def size(mask: SetMask) -> int:
    return mask.bit_count()


def universe(n: int) -> SetMask:
    """All of {1, ..., 2n}."""
    return (1 << (2 * n)) - 1


def smallest(mask: SetMask) -> int:
    """Smallest number in a non-empty mask."""
    if not mask:
        raise ValueError("empty mask has no smallest element")
    return (mask & -mask).bit_length()


def sort_key(mask: SetMask) -> tuple[int, ...]:
    """Lexicographic order on sorted element tuples."""
    return tuple(members(mask))
