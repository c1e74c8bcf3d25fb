import io
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorgame import setmask
from mirrorgame.alice import constant, full_memory, matched_response
from mirrorgame.errors import ConfigError, IllegalMoveError
from mirrorgame.game import (
    ALICE,
    BOB,
    GameState,
    Loss,
    OutcomeKind,
    apply_move,
    new_game,
    outcome_numbers,
    read_transcript,
    replay,
    run_match,
    write_transcript,
)
from mirrorgame.players import MirrorBob, RandomBob, RandomLegalAlice


def test_new_game():
    s = new_game(4)
    assert (s.turn, s.used, s.history) == (0, 0, ())
    assert s.unused() == setmask.from_iter(range(1, 9))
    assert new_game(1).unused() == setmask.from_iter([1, 2])
    with pytest.raises(ConfigError):
        new_game(0)


def test_apply_move_examples():
    s = apply_move(new_game(4), 5)
    assert isinstance(s, GameState)
    assert s.used == setmask.from_iter([5]) and s.turn == 1

    s = apply_move(new_game(4), 3)
    loss = apply_move(s, 3)
    assert loss == Loss(BOB, 2, 3)

    with pytest.raises(IllegalMoveError):
        apply_move(new_game(4), 9)
    full = replay(1, [1, 2])
    with pytest.raises(IllegalMoveError):
        apply_move(GameState(1, 3, 2, full.transcript), 1)


def test_run_match_examples():
    assert run_match(full_memory(4), MirrorBob(), 4, seed=1).kind is OutcomeKind.DRAW
    out = run_match(constant(2), RandomBob(), 2, seed=0)
    assert out.kind is OutcomeKind.ALICE_LOSES and out.losing_turn == 3


def test_mirror_answers_partner():
    out = replay(2, [3, 4, 1, 2])
    assert out.kind is OutcomeKind.DRAW
    assert MirrorBob().partner(3) == 4


class _Forfeiter:
    def candidates(self, view):
        return (99,)


def test_out_of_range_is_forfeit():
    out = run_match(full_memory(2), _Forfeiter(), 2, seed=0)
    assert out.kind is OutcomeKind.BOB_LOSES and out.forfeit and out.losing_turn == 2


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_replay_determinism_and_parity(n, seed):
    out = run_match(RandomLegalAlice(), RandomBob(), n, seed)
    again = replay(n, outcome_numbers(out))
    assert again.kind is out.kind and again.losing_turn == out.losing_turn
    assert [m.number for m in again.transcript] == [m.number for m in out.transcript]
    for t, mv in enumerate(out.transcript, start=1):
        assert mv.turn == t and mv.player == (ALICE if t % 2 else BOB)
    if out.kind is OutcomeKind.DRAW:
        assert setmask.from_iter(m.number for m in out.transcript) == setmask.universe(n)


def test_run_match_seed_determinism():
    a = run_match(RandomLegalAlice(), RandomBob(), 5, seed=11)
    b = run_match(RandomLegalAlice(), RandomBob(), 5, seed=11)
    assert a == b


def test_transcript_jsonl_fields():
    out = run_match(matched_response(3), RandomBob(), 3, seed=4)
    buf = io.StringIO()
    write_transcript(out, buf)
    buf.seek(0)
    recs = read_transcript(buf)
    assert all(set(r) == {"turn", "player", "number", "alice_mem_hex", "rand_block_hex"} for r in recs)
    assert [r["number"] for r in recs] == outcome_numbers(out)
    # Alice's turns carry her memory, Bob's turns carry the post-update memory
    assert recs[0]["alice_mem_hex"] == "0"
    first_line = json.dumps(recs[0])
    assert '"player": "alice"' in first_line
