"""Open-book Alice: a memory-bounded machine whose program, memory and drawn
coins are all visible to Bob.

A program is a pair of pure functions over an ``m``-bit memory ``x`` (an int
below ``2**m``) and the public tape of ``ell``-bit blocks drawn so far:

* ``nxt(x, tape) -> number`` picks Alice's move. Before turn ``2i + 1`` the
  tape holds exactly ``i`` blocks, so the first move sees an empty tape.
* ``upd(bob_move, x, turn, tape) -> x'`` runs after Bob's reply at turn ``2i``
  and after block ``r_i`` has been appended; ``turn`` is the odd turn about to
  be played. Alice's own previous move is ``nxt(x, tape[:-1])`` if a program
  wants to remember it.

Memory starts as all zeros. Everything Alice knows about the board has to be
carried through ``upd``; ``nxt`` never sees the board directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from mirrorgame import setmask
from mirrorgame.errors import ConfigError

RandTape = tuple[int, ...]
NextFn = Callable[[int, RandTape], int]
UpdateFn = Callable[[int, int, int, RandTape], int]

DEFAULT_ELL_CAP = 8


@dataclass(frozen=True)
class AliceProgram:
    """The open-book machine ``(m, ell, x0 = 0, nxt, upd)``."""

    name: str
    n: int
    m: int
    ell: int
    nxt: NextFn = field(repr=False)
    upd: UpdateFn = field(repr=False)
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.m < 0 or self.ell < 0:
            raise ConfigError("memory and block widths must be non-negative")

    @property
    def x0(self) -> int:
        return 0

    def spec(self) -> str:
        if not self.params:
            return self.name
        opts = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.name}:{opts}"


def alice_step(prog: AliceProgram, x: int, tape: RandTape) -> int:
    return prog.nxt(x, tape)


def alice_update(prog: AliceProgram, bob_move: int, x: int, turn: int, tape: RandTape) -> int:
    return prog.upd(bob_move, x, turn, tape)


def draw_block(rng: np.random.Generator, ell: int) -> int:
    """A fresh uniform ``ell``-bit block."""
    if ell == 0:
        return 0
    if ell <= 62:
        return int(rng.integers(0, 1 << ell))
    nbytes = (ell + 7) // 8
    return int.from_bytes(rng.bytes(nbytes), "little") & ((1 << ell) - 1)


def mem_hex(x: int, m: int) -> str:
    width = (m + 3) // 4
    return format(x, f"0{width}x") if width else ""


def block_hex(block: int, ell: int) -> str:
    width = (ell + 3) // 4
    return format(block, f"0{width}x") if width else ""


def bits_for(values: int) -> int:
    """Bits needed to index ``values`` distinct values."""
    return max(0, math.ceil(math.log2(values))) if values > 1 else 0


# -- reference programs -------------------------------------------------------


def canonical_partner(v: int) -> int:
    """Partner of ``v`` in the matching (1,2), (3,4), ..."""
    return v + 1 if v % 2 == 1 else v - 1


def full_memory(n: int) -> AliceProgram:
    """Keeps the whole used-set bitmap (``m = 2n``) and never repeats."""

    def nxt(x: int, tape: RandTape) -> int:
        free = setmask.universe(n) & ~x
        return setmask.smallest(free) if free else 1

    def upd(bob_move: int, x: int, turn: int, tape: RandTape) -> int:
        own = nxt(x, tape[:-1])
        return x | setmask.bit(own) | setmask.bit(bob_move)

    return AliceProgram("full_memory", n, 2 * n, 0, nxt, upd)


def matched_response(n: int) -> AliceProgram:
    """Answers Bob's last number with its canonical partner; opens with 1.

    Memory stores ``bob_move - 1`` in ``ceil(log2(2n))`` bits.
    """

    def nxt(x: int, tape: RandTape) -> int:
        if not tape:
            return 1
        return canonical_partner(x + 1)

    def upd(bob_move: int, x: int, turn: int, tape: RandTape) -> int:
        return bob_move - 1

    return AliceProgram("matched_response", n, bits_for(2 * n), 0, nxt, upd)


def constant(n: int, value: int = 1) -> AliceProgram:
    def nxt(x: int, tape: RandTape) -> int:
        return value

    def upd(bob_move: int, x: int, turn: int, tape: RandTape) -> int:
        return 0

    params = {} if value == 1 else {"value": value}
    return AliceProgram("constant", n, 0, 0, nxt, upd, params)


def fresh_random(n: int, ell: int | None = None) -> AliceProgram:
    """No memory; each move is the latest block reduced mod ``2n``."""
    if ell is None:
        ell = bits_for(2 * n)

    def nxt(x: int, tape: RandTape) -> int:
        if not tape:
            return 1
        return tape[-1] % (2 * n) + 1

    def upd(bob_move: int, x: int, turn: int, tape: RandTape) -> int:
        return 0

    return AliceProgram("fresh_random", n, 0, ell, nxt, upd, {"ell": ell})


def block_ranges(n: int, m: int) -> list[tuple[int, int]]:
    """Split 1..2n into ``m`` contiguous blocks as (first, size)."""
    base, extra = divmod(2 * n, m)
    out = []
    start = 1
    for b in range(m):
        sz = base + (1 if b < extra else 0)
        out.append((start, sz))
        start += sz
    return out


def block_alice(n: int, m: int = 2, ell: int | None = None) -> AliceProgram:
    """One flag bit per block of numbers.

    Alice plays inside the lowest unflagged block (the last block once all are
    flagged), at an offset taken from the newest random block. A block is
    flagged once Bob plays into it or once Alice plays its top element.
    """
    if not 1 <= m <= 2 * n:
        raise ConfigError(f"block alice needs 1 <= m <= 2n, got m={m}")
    ranges = block_ranges(n, m)
    if ell is None:
        ell = bits_for(max(sz for _, sz in ranges))

    def block_of(v: int) -> int:
        for b, (first, sz) in enumerate(ranges):
            if first <= v < first + sz:
                return b
        return m - 1

    def nxt(x: int, tape: RandTape) -> int:
        b = m - 1
        for cand in range(m):
            if not (x >> cand) & 1:
                b = cand
                break
        first, sz = ranges[b]
        offset = tape[-1] % sz if tape else 0
        return first + offset

    def upd(bob_move: int, x: int, turn: int, tape: RandTape) -> int:
        own = nxt(x, tape[:-1])
        x |= 1 << block_of(bob_move)
        first, sz = ranges[block_of(own)]
        if own == first + sz - 1:
            x |= 1 << block_of(own)
        return x

    return AliceProgram("block", n, m, ell, nxt, upd, {"m": m, "ell": ell})


def forgetful(n: int, d: int = 4, ell: int = 0) -> AliceProgram:
    """Full bitmap of 1..2n-d (``m = 2n - d``); the top ``d`` numbers are untracked.

    Alice plays the smallest number she has not seen used. Once her tracked
    range is exhausted she cycles through the top numbers in an order shifted
    by the newest random block.
    """
    if not 0 <= d <= 2 * n:
        raise ConfigError(f"forgetful alice needs 0 <= d <= 2n, got d={d}")
    low = 2 * n - d
    low_mask = (1 << low) - 1

    def nxt(x: int, tape: RandTape) -> int:
        free = low_mask & ~x
        if free:
            return setmask.smallest(free)
        if d == 0:
            return 1
        shift = tape[-1] % d if tape else 0
        return low + 1 + shift

    def upd(bob_move: int, x: int, turn: int, tape: RandTape) -> int:
        own = nxt(x, tape[:-1])
        for v in (own, bob_move):
            if v <= low:
                x |= setmask.bit(v)
        return x

    return AliceProgram("forgetful", n, low, ell, nxt, upd, {"d": d, "ell": ell})


PROGRAM_FACTORIES: dict[str, Callable[..., AliceProgram]] = {
    "full_memory": full_memory,
    "matched_response": matched_response,
    "block": block_alice,
    "fresh_random": fresh_random,
    "constant": constant,
    "forgetful": forgetful,
}

# ``human`` is an interactive player rather than a program; see players.py.
CATALOG_NAMES = ("full_memory", "matched_response", "block", "fresh_random", "constant", "forgetful", "human")


def reference_alices(n: int) -> dict[str, AliceProgram]:
    """Default instance of every program in the catalog."""
    if n < 1:
        raise ConfigError("n must be positive")
    return {name: factory(n) for name, factory in PROGRAM_FACTORIES.items()}
