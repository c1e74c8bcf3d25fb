"""Turn-exact mirror game engine.

Turns are numbered from 1; odd turns belong to Alice and even turns to Bob.
``GameState.turn`` counts completed turns, so the next move is turn
``state.turn + 1``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import IO, Callable, Iterable, Protocol, Sequence, Union

import numpy as np

from mirrorgame import setmask
from mirrorgame.alice import AliceProgram, RandTape, block_hex, draw_block, mem_hex
from mirrorgame.errors import ConfigError, IllegalMoveError, InvariantViolation

ALICE = "alice"
BOB = "bob"


def mover(turn: int) -> str:
    return ALICE if turn % 2 == 1 else BOB


@dataclass(frozen=True)
class Move:
    turn: int
    player: str
    number: int
    # open-book log: Alice's memory and the block drawn at the end of the turn
    alice_mem: int | None = None
    mem_bits: int = 0
    rand_block: int | None = None
    block_bits: int = 0

    def record(self) -> dict:
        return {
            "turn": self.turn,
            "player": self.player,
            "number": self.number,
            "alice_mem_hex": None if self.alice_mem is None else mem_hex(self.alice_mem, self.mem_bits),
            "rand_block_hex": None if self.rand_block is None else block_hex(self.rand_block, self.block_bits),
        }


@dataclass(frozen=True)
class GameState:
    n: int
    used: int = 0
    turn: int = 0
    history: tuple[Move, ...] = ()

    @property
    def size(self) -> int:
        return 2 * self.n

    @property
    def over(self) -> bool:
        return self.turn >= 2 * self.n

    def unused(self) -> int:
        return setmask.universe(self.n) & ~self.used


@dataclass(frozen=True)
class Loss:
    """A repeated (or forfeited) move by ``player`` at ``turn``."""

    player: str
    turn: int
    number: int
    forfeit: bool = False


class OutcomeKind(str, enum.Enum):
    ALICE_LOSES = "AliceLoses"
    BOB_LOSES = "BobLoses"
    DRAW = "Draw"


@dataclass(frozen=True)
class Outcome:
    kind: OutcomeKind
    losing_turn: int | None = None
    transcript: tuple[Move, ...] = ()
    forfeit: bool = False
    losing_number: int | None = None

    @classmethod
    def from_loss(cls, loss: Loss, history: tuple[Move, ...]) -> "Outcome":
        kind = OutcomeKind.ALICE_LOSES if loss.player == ALICE else OutcomeKind.BOB_LOSES
        return cls(kind, loss.turn, history, loss.forfeit, loss.number)


def new_game(n: int) -> GameState:
    if not isinstance(n, int) or n < 1:
        raise ConfigError(f"n must be a positive integer, got {n!r}")
    return GameState(n)


def apply_move(state: GameState, number: int, **log) -> GameState | Loss:
    """Play ``number`` as the mover of turn ``state.turn + 1``.

    Extra keyword arguments are stored on the ``Move`` (open-book log fields).
    """
    if state.over:
        raise IllegalMoveError(f"game over after turn {state.turn}")
    if not 1 <= number <= 2 * state.n:
        raise IllegalMoveError(f"{number} is outside 1..{2 * state.n}")
    turn = state.turn + 1
    who = mover(turn)
    if setmask.contains(state.used, number):
        return Loss(who, turn, number)
    move = Move(turn, who, number, **log)
    return GameState(state.n, state.used | setmask.bit(number), turn, state.history + (move,))


@dataclass(frozen=True)
class GameView:
    """Everything public at the moment a player is asked to move.

    ``mem_log[i]`` is Alice's memory after round ``i`` (``mem_log[0] = x0``);
    ``tape`` holds the blocks drawn so far. Both are empty when Alice is not
    an open-book program.
    """

    state: GameState
    program: AliceProgram | None = None
    mem_log: tuple[int, ...] = ()
    tape: RandTape = ()

    @property
    def n(self) -> int:
        return self.state.n

    @property
    def turn(self) -> int:
        """The turn about to be played."""
        return self.state.turn + 1

    @property
    def used(self) -> int:
        return self.state.used


class Player(Protocol):
    """Anything that proposes a uniform candidate set for its next move."""

    def candidates(self, view: GameView) -> Sequence[int]: ...


AlicePlayer = Union[AliceProgram, Player]
BlockSource = Callable[[int], int]


def pick(cands: Sequence[int], rng: np.random.Generator) -> int:
    if not cands:
        raise InvariantViolation("player proposed no move")
    if len(cands) == 1:
        return cands[0]
    return cands[int(rng.integers(len(cands)))]


def _forfeit(state: GameState, number: int) -> Outcome:
    turn = state.turn + 1
    return Outcome.from_loss(Loss(mover(turn), turn, number, forfeit=True), state.history)


def run_match(
    alice: AlicePlayer,
    bob: Player,
    n: int,
    seed: int | np.random.SeedSequence = 0,
    *,
    blocks: BlockSource | None = None,
) -> Outcome:
    """Play one game; deterministic in ``seed`` and the player definitions.

    ``blocks`` overrides the random tape (``blocks(i)`` is block ``r_i``), which
    is how a determinized Alice is run.
    """
    state = new_game(n)
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    tape_rng, bob_rng, alice_rng = (np.random.Generator(np.random.PCG64(s)) for s in ss.spawn(3))
    prog = alice if isinstance(alice, AliceProgram) else None
    if prog is not None and prog.n != n:
        raise ConfigError(f"Alice program built for n={prog.n}, game has n={n}")
    x = 0
    mem_log: list[int] = [0]
    tape: RandTape = ()

    while not state.over:
        turn = state.turn + 1
        view = GameView(state, prog, tuple(mem_log), tape)
        if turn % 2 == 1:
            if prog is not None:
                number = prog.nxt(x, tape)
                log = {"alice_mem": x, "mem_bits": prog.m}
            else:
                number = pick(alice.candidates(view), alice_rng)
                log = {}
        else:
            number = pick(bob.candidates(view), bob_rng)
            log = {}
            if prog is not None and turn < 2 * n:
                i = turn // 2
                block = blocks(i) if blocks is not None else draw_block(tape_rng, prog.ell)
                tape = tape + (block,)
                log = {"rand_block": block, "block_bits": prog.ell}
        if not isinstance(number, (int, np.integer)) or not 1 <= number <= 2 * n:
            return _forfeit(state, number)
        number = int(number)
        result = apply_move(state, number)
        if isinstance(result, Loss):
            return Outcome.from_loss(result, state.history)
        if prog is not None and turn % 2 == 0 and turn < 2 * n:
            x = prog.upd(number, x, turn + 1, tape)
            if not 0 <= x < (1 << prog.m):
                raise InvariantViolation(f"{prog.name} produced a state wider than m={prog.m}")
            mem_log.append(x)
            log = dict(log, alice_mem=x, mem_bits=prog.m)
        if log:
            result = GameState(result.n, result.used, result.turn, state.history + (Move(turn, mover(turn), number, **log),))
        state = result
    return Outcome(OutcomeKind.DRAW, None, state.history)


def replay(n: int, numbers: Iterable[int]) -> Outcome:
    """Push a move sequence through ``apply_move`` and report the outcome."""
    state = new_game(n)
    for number in numbers:
        if state.over:
            raise IllegalMoveError("transcript continues past the end of the game")
        if not 1 <= number <= 2 * n:
            return _forfeit(state, number)
        result = apply_move(state, number)
        if isinstance(result, Loss):
            return Outcome.from_loss(result, state.history)
        state = result
    if state.over:
        return Outcome(OutcomeKind.DRAW, None, state.history)
    raise IllegalMoveError(f"transcript stops at turn {state.turn} of {2 * n}")


def outcome_numbers(outcome: Outcome) -> list[int]:
    """All moves of a finished game including the losing one."""
    nums = [mv.number for mv in outcome.transcript]
    if outcome.losing_number is not None:
        nums.append(outcome.losing_number)
    return nums


def write_transcript(outcome: Outcome, fh: IO[str]) -> None:
    """One JSON object per turn; the losing move, if any, is the last line."""
    for mv in outcome.transcript:
        fh.write(json.dumps(mv.record()) + "\n")
    if outcome.losing_turn is not None:
        player = mover(outcome.losing_turn)
        fh.write(json.dumps({
            "turn": outcome.losing_turn,
            "player": player,
            "number": outcome.losing_number,
            "alice_mem_hex": None,
            "rand_block_hex": None,
        }) + "\n")


def read_transcript(fh: IO[str]) -> list[dict]:
    return [json.loads(line) for line in fh if line.strip()]


def final_view(outcome: Outcome, n: int, program: AliceProgram | None = None) -> GameView:
    """Rebuild the last public view of a finished game from its open-book log."""
    used = setmask.from_iter(mv.number for mv in outcome.transcript)
    state = GameState(n, used, len(outcome.transcript), outcome.transcript)
    if program is None:
        return GameView(state)
    mem_log = (0,) + tuple(mv.alice_mem for mv in outcome.transcript if mv.player == BOB and mv.alice_mem is not None)
    tape = tuple(mv.rand_block for mv in outcome.transcript if mv.rand_block is not None)
    return GameView(state, program, mem_log, tape)
