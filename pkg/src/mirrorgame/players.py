"""Simple players: the mirror Bob, uniform baselines and the interactive human."""

from __future__ import annotations

import sys
from typing import IO, Sequence

from mirrorgame import setmask
from mirrorgame.alice import canonical_partner
from mirrorgame.game import GameView


class MirrorBob:
    """Answers every Alice number with its partner under a fixed matching.

    The default matching is (1,2), (3,4), ..., (2n-1, 2n). Only Alice's last
    number is consulted.
    """

    def __init__(self, matching: dict[int, int] | None = None):
        self.matching = matching

    def partner(self, v: int) -> int:
        if self.matching is None:
            return canonical_partner(v)
        return self.matching[v]

    def candidates(self, view: GameView) -> Sequence[int]:
        last = view.state.history[-1].number
        return (self.partner(last),)


class RandomBob:
    """Uniform over the unused numbers."""

    def candidates(self, view: GameView) -> Sequence[int]:
        return tuple(setmask.members(view.state.unused()))


class RandomLegalAlice:
    """Full-information Alice that plays a uniform unused number."""

    def candidates(self, view: GameView) -> Sequence[int]:
        return tuple(setmask.members(view.state.unused()))


class HumanAlice:
    """Reads Alice's numbers from a text stream.

    Malformed lines are re-prompted; EOF raises ``EOFError`` so the caller can
    end the session cleanly. Any integer is accepted, so a human can repeat a
    number (and lose) or type one out of range (and forfeit).
    """

    def __init__(self, stdin: IO[str] | None = None, stdout: IO[str] | None = None):
        self.stdin = stdin or sys.stdin
        self.stdout = stdout or sys.stdout

    def candidates(self, view: GameView) -> Sequence[int]:
        while True:
            self.stdout.write(f"turn {view.turn}, your number (1..{2 * view.n}): ")
            self.stdout.flush()
            line = self.stdin.readline()
            if not line:
                raise EOFError
            try:
                return (int(line.strip()),)
            except ValueError:
                self.stdout.write(f"not a number: {line.strip()!r}\n")
