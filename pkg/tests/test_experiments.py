import json
import math
import random
from fractions import Fraction

import pytest

from mirrorgame.alice import block_alice, constant, full_memory
from mirrorgame.errors import BudgetExceeded, ConfigError
from mirrorgame.experiments import (
    CSV_FIELDS,
    ExperimentConfig,
    bounds,
    exact_outcome_distribution,
    format_bounds,
    minimax_best_response,
    render,
    result_row,
    run_trials,
    wilson_interval,
)
from mirrorgame.game import OutcomeKind

AL, BL, DR = OutcomeKind.ALICE_LOSES, OutcomeKind.BOB_LOSES, OutcomeKind.DRAW


def test_wilson_interval():
    lo, hi = wilson_interval(50, 100)
    assert lo == pytest.approx(0.4038298, abs=1e-6) and hi == pytest.approx(0.5961702, abs=1e-6)
    assert wilson_interval(0, 10)[0] == 0.0
    assert wilson_interval(10, 10)[1] == 1.0
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_counts_and_reproducibility():
    cfg = ExperimentConfig(6, "full_memory", "mirror", trials=1000)
    stats = run_trials(cfg)
    assert stats.counts[DR] == 1000
    cfg = ExperimentConfig(5, "block:m=2", "half", trials=300, master_seed=4)
    a, b = run_trials(cfg), run_trials(cfg)
    assert a == b and sum(a.counts.values()) == 300
    for kind in (AL, BL, DR):
        lo, hi = a.interval(kind)
        assert 0 <= lo <= a.rate(kind) <= hi <= 1


def test_order_and_workers_do_not_matter():
    cfg = ExperimentConfig(5, "fresh_random", "half", trials=120, master_seed=9)
    base = run_trials(cfg)
    order = list(range(120))
    random.Random(0).shuffle(order)
    assert run_trials(cfg, order=order) == base
    par = ExperimentConfig(5, "fresh_random", "half", trials=120, master_seed=9, workers=3)
    assert run_trials(par) == base
    with pytest.raises(ConfigError):
        run_trials(cfg, order=[0, 0, 1])


def test_oracle_examples():
    r = exact_outcome_distribution(ExperimentConfig(2, "constant", "random", oracle=True))
    assert r.prob(AL) == 1
    r = exact_outcome_distribution(ExperimentConfig(4, "full_memory", "half", oracle=True))
    assert r.prob(DR) == 1
    r = exact_outcome_distribution(ExperimentConfig(2, "fresh_random:ell=3", "random", oracle=True))
    assert sum(r.distribution.values()) == 1
    assert r.prob(BL) == 0


def test_oracle_hand_case():
    # Alice opens 1; Bob's 2 makes her answer 1 again, his 3 or 4 leads to a draw
    r = exact_outcome_distribution(ExperimentConfig(2, "matched_response", "half:k=1", oracle=True))
    assert r.distribution == {AL: Fraction(1, 3), BL: Fraction(0), DR: Fraction(2, 3)}


def test_oracle_random_alice_player():
    # two uniform players on {1,2}: Alice picks, Bob has one legal move
    r = exact_outcome_distribution(ExperimentConfig(1, "random_legal", "random", oracle=True))
    assert r.prob(DR) == 1


def test_frozen_oracle_values():
    r = exact_outcome_distribution(ExperimentConfig(4, "block:m=2", "half", oracle=True))
    assert r.prob(AL) == Fraction(449, 560) and r.prob(DR) == Fraction(111, 560)
    r = exact_outcome_distribution(ExperimentConfig(4, "block:m=2", "amplified:c=2", oracle=True))
    assert r.prob(AL) == Fraction(19, 28)


def test_amplification_counterexample_frozen():
    # a one-bit-per-number Alice that survives c=4 more often than c=2
    prog = "block:m=8,ell=1"
    c2 = exact_outcome_distribution(ExperimentConfig(8, prog, "amplified:c=2", oracle=True))
    c4 = exact_outcome_distribution(ExperimentConfig(8, prog, "amplified:c=4", oracle=True))
    assert c2.prob(DR) == Fraction(1931, 12480)
    assert c4.prob(DR) == Fraction(197, 832)


def test_oracle_budget():
    with pytest.raises(BudgetExceeded):
        exact_outcome_distribution(ExperimentConfig(6, "fresh_random", "random", oracle=True, budget=100))
    with pytest.raises(BudgetExceeded):
        exact_outcome_distribution(ExperimentConfig(4, "fresh_random:ell=9", "random", oracle=True))


def test_minimax_examples():
    assert minimax_best_response(constant(2), 2, ())[1] == 1
    assert minimax_best_response(full_memory(2), 2, ())[1] == 0
    prog = block_alice(3, m=2)
    for tape in [(0, 0, 0), (1, 2, 3), (3, 1, 0)]:
        policy, value = minimax_best_response(prog, 3, tape)
        assert value == 1 and policy
    with pytest.raises(ConfigError):
        minimax_best_response(constant(5), 5, ())


def test_minimax_policy_wins():
    # follow the witness policy and check Alice really repeats
    from mirrorgame import setmask

    prog, n, tape = block_alice(4, m=2), 4, (1, 0, 3, 2)
    policy, value = minimax_best_response(prog, n, tape)
    assert value == 1
    used, x, turn = 0, 0, 0
    while True:
        a = prog.nxt(x, tape[: turn // 2])
        if setmask.contains(used, a):
            break
        used |= setmask.bit(a)
        b = policy[(used, x)]
        assert not setmask.contains(used, b)
        used |= setmask.bit(b)
        turn += 2
        assert turn < 2 * n
        x = prog.upd(b, x, turn + 1, tape[: turn // 2])


def test_bounds_values():
    assert bounds(6)["half_loss_bound"] == Fraction(6, 13)
    rep = bounds(8, c=4)
    assert rep["amp_survival_bound"] == Fraction(81, 289)
    assert float(rep["amp_survival_bound"]) == pytest.approx(0.2803, abs=1e-4)
    assert float(rep["amp_loss_bound"]) == pytest.approx(0.7197, abs=1e-4)
    rep = bounds(5, k=2)
    assert rep["set_prob_cap"] == Fraction(4, 25)
    assert rep["set_prob_cap"] <= rep["set_prob_cap_loose"]
    assert rep["set_prob_cap_loose"] == pytest.approx(0.84**10)
    assert bounds(8, c=4)["delta_lower_bound"] == pytest.approx(math.log2(4) / 32)
    assert "amp_survival_bound = 81/289" in format_bounds(bounds(8, c=4))


def test_csv_and_json_schema():
    cfg = ExperimentConfig(4, "full_memory", "mirror", trials=10)
    stats = run_trials(cfg)
    row = result_row(cfg, stats)
    text = render([row], "csv")
    assert text.splitlines()[0] == ",".join(CSV_FIELDS)
    assert text.splitlines()[0] == (
        "experiment_id,n,alice,bob,trials,seed,alice_loss,bob_loss,draw,ci_low,ci_high,oracle_alice_loss"
    )
    assert text.splitlines()[1].endswith(",")
    data = json.loads(render([row], "json"))
    assert list(data[0]) == list(CSV_FIELDS)
    with pytest.raises(ConfigError):
        render([row], "xml")


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(0, "constant", "mirror")
    with pytest.raises(ConfigError):
        ExperimentConfig(3, "constant", "mirror", workers=0)
    with pytest.raises(ConfigError):
        run_trials(ExperimentConfig(3, "nonsense", "mirror", trials=1))
    with pytest.raises(ConfigError):
        run_trials(ExperimentConfig(3, "constant", "mirror:x=1", trials=1))
