"""Pure-Python kernels over int bitmasks (any width)."""

from __future__ import annotations


def gf2_rank(rows: list[int]) -> int:
    """Rank over GF(2) of the given bit-vectors (xor basis by leading bit)."""
    basis: dict[int, int] = {}
    rank = 0
    for row in rows:
        while row:
            lead = row.bit_length() - 1
            if lead not in basis:
                basis[lead] = row
                rank += 1
                break
            row ^= basis[lead]
    return rank


def even_pairs(masks: list[int]) -> list[tuple[int, int]]:
    """Greedy lexicographic-first matching of indices with even intersection."""
    alive = [True] * len(masks)
    pairs = []
    for i, a in enumerate(masks):
        if not alive[i]:
            continue
        for j in range(i + 1, len(masks)):
            if alive[j] and (a & masks[j]).bit_count() % 2 == 0:
                alive[i] = alive[j] = False
                pairs.append((i, j))
                break
    return pairs


def is_oddtown(masks: list[int]) -> bool:
    for i, a in enumerate(masks):
        if a.bit_count() % 2:
            return False
        for b in masks[i + 1:]:
            if (a & b).bit_count() % 2 == 0:
                return False
    return True
