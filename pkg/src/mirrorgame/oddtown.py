"""Oddtown families over GF(2) and greedy extraction of even-union pairs."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from mirrorgame import _kernels, setmask
from mirrorgame.setmask import SetMask


class Parity(enum.IntEnum):
    EVEN = 0
    ODD = 1


class OddMemberError(ValueError):
    """Even-union extraction was handed an odd-cardinality set."""


class NotOddtownError(ValueError):
    pass


@dataclass(frozen=True)
class SetFamily:
    ground_size: int
    members: tuple[SetMask, ...]

    def __post_init__(self) -> None:
        ground = (1 << self.ground_size) - 1
        for s in self.members:
            if s & ~ground:
                raise ValueError(f"{setmask.to_list(s)} is not inside 1..{self.ground_size}")
        if len(set(self.members)) != len(self.members):
            raise ValueError("family members must be distinct")

    @classmethod
    def from_lists(cls, ground_size: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        return cls(ground_size, tuple(setmask.from_iter(s) for s in sets))

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class PairMatching:
    pairs: tuple[tuple[SetMask, SetMask], ...]
    leftovers: tuple[SetMask, ...]


@dataclass(frozen=True)
class BoundReport:
    size: int
    ground_size: int
    rank: int

    @property
    def within_bound(self) -> bool:
        return self.size <= self.ground_size

    @property
    def independent(self) -> bool:
        return self.rank == self.size


def intersection_parity(a: SetMask, b: SetMask) -> Parity:
    return Parity((a & b).bit_count() & 1)


def is_oddtown(fam: SetFamily) -> bool:
    return _kernels.is_oddtown(list(fam.members))


def gf2_rank(vectors: Iterable[SetMask]) -> int:
    return _kernels.gf2_rank(list(vectors))


def oddtown_bound_check(fam: SetFamily) -> BoundReport:
    """Check ``|family| <= N`` and report the GF(2) rank alongside.

    The Gram matrix of an oddtown over GF(2) is ``J - I``, which is singular
    for an odd number of sets, so full rank is reported but not required:
    ``{1,2}, {1,3}, {2,3}`` is an oddtown of rank 2.
    """
    if not is_oddtown(fam):
        raise NotOddtownError("family is not an oddtown")
    return BoundReport(len(fam), fam.ground_size, gf2_rank(fam.members))


def extract_even_union_pairs(fam: SetFamily) -> PairMatching:
    """Greedily pair sets whose intersection (hence union) is even.

    Sets are visited in lexicographic order of their sorted elements and each
    is matched with the first later set it can pair with. Pairing continues
    until no eligible pair remains, so the leftovers form an oddtown and
    number at most ``ground_size``.
    """
    for s in fam.members:
        if s.bit_count() % 2:
            raise OddMemberError(f"odd-size member {setmask.to_list(s)}")
    ordered = sorted(fam.members, key=setmask.sort_key)
    idx_pairs = _kernels.even_pairs(ordered)
    taken = set()
    pairs = []
    for i, j in idx_pairs:
        pairs.append((ordered[i], ordered[j]))
        taken.update((i, j))
    leftovers = tuple(s for k, s in enumerate(ordered) if k not in taken)
    return PairMatching(tuple(pairs), leftovers)
