"""Acceptance criteria 1-10. Each test records notes that conftest prints as a
PASS/FAIL line per criterion at the end of the session."""

import io
import itertools
import random
import time
from fractions import Fraction

import pytest

from oracles import belief_fixtures, brute_force_beliefs

from mirrorgame import adversary
from mirrorgame.adversary import AdversaryConfig, enumerate_phase, first_entrants, unused_pool
from mirrorgame.alice import reference_alices
from mirrorgame.cli import main
from mirrorgame.experiments import (
    ExperimentConfig,
    bounds,
    exact_outcome_distribution,
    iter_games,
    minimax_best_response,
    run_trials,
    wilson_interval,
)
from mirrorgame.game import OutcomeKind, final_view, new_game
from mirrorgame.oddtown import SetFamily, extract_even_union_pairs, is_oddtown, oddtown_bound_check

AL, BL, DR = OutcomeKind.ALICE_LOSES, OutcomeKind.BOB_LOSES, OutcomeKind.DRAW


def _even_set(rng, n):
    while True:
        s = rng.getrandbits(n)
        if s and s.bit_count() % 2 == 0:
            return s


def _random_oddtown(rng, n):
    chosen: list[int] = []
    for _ in range(6 * n):
        s = _even_set(rng, n)
        if s not in chosen and all((s & t).bit_count() % 2 for t in chosen):
            chosen.append(s)
    return chosen


def test_criterion_01_oddtown_suite(record_property):
    rng = random.Random(2024)
    t0 = time.perf_counter()
    largest = 0
    for _ in range(10_000):
        n = rng.randint(2, 16)
        members = _random_oddtown(rng, n)
        fam = SetFamily(n, tuple(members))
        assert is_oddtown(fam)
        rep = oddtown_bound_check(fam)
        assert rep.within_bound and len(members) <= n
        largest = max(largest, len(members) - n)
    for _ in range(10_000):
        n = rng.randint(4, 16)
        j = rng.randint(0, min(8, 2 ** (n - 1) - n - 2))
        members = set()
        while len(members) < n + j + 1:
            members.add(_even_set(rng, n))
        m = extract_even_union_pairs(SetFamily(n, tuple(members)))
        assert len(m.pairs) >= -(-j // 2)
        assert all((a | b).bit_count() % 2 == 0 for a, b in m.pairs)
        assert len(m.leftovers) <= n
    elapsed = time.perf_counter() - t0
    record_property("note", f"2 x 10^4 families in {elapsed:.2f}s; max |F|-N over oddtowns = {largest}")
    assert elapsed < 10


def test_criterion_02_belief_exactness(record_property):
    t0 = time.perf_counter()
    count = 0
    for label, prog, n, k, tape in belief_fixtures(4):
        table = enumerate_phase(prog, tape, unused_pool(n), new_game(n), k)
        entries, loss = brute_force_beliefs(prog, tape, new_game(n), k)
        assert all(isinstance(w, Fraction) for b in table.entries.values() for w in b.values())
        assert table.survival_mass + table.loss_mass == 1, label
        assert table.entries == entries, label
        assert table.loss_mass == loss, label
        count += 1
    elapsed = time.perf_counter() - t0
    record_property("note", f"{count} fixtures match the replay oracle set-for-set in {elapsed:.2f}s")
    assert elapsed < 30


@pytest.fixture
def recorded_tables(monkeypatch):
    tables = []
    real = adversary.enumerate_phase

    def spy(*args, **kwargs):
        table = real(*args, **kwargs)
        tables.append(table)
        return table

    monkeypatch.setattr(adversary, "enumerate_phase", spy)
    return tables


def test_criterion_03_set_probability_caps(record_property, recorded_tables):
    checked = 0
    for label, prog, n, k, tape in belief_fixtures(4):
        cap = AdversaryConfig("half", n, k=k).set_prob_cap
        table = enumerate_phase(prog, tape, unused_pool(n), new_game(n), k)
        for w in table.set_weights().values():
            assert w <= cap, label
            checked += 1
    runs = [(4, "half:k=1"), (6, "half"), (8, "half"), (4, "amplified:c=2"), (8, "amplified:c=2"), (8, "amplified:c=4"), (16, "amplified:c=4")]
    for n, bob in runs:
        cfg = ExperimentConfig(n, "fresh_random:ell=3", bob, trials=40, master_seed=3)
        recorded_tables.clear()
        for _, _, _, player in iter_games(cfg):
            pass
        cap = player.config.set_prob_cap
        assert recorded_tables
        for table in recorded_tables:
            for w in table.set_weights().values():
                assert w <= cap, (n, bob)
                checked += 1
    record_property("note", f"{checked} set weights under their caps, all exact rationals")


def test_criterion_04_pair_properties(record_property, monkeypatch):
    plans_seen = []
    real = adversary.build_pair_plan

    def spy(dist, n, config):
        res = real(dist, n, config)
        plans_seen.append((n, res))
        return res

    monkeypatch.setattr(adversary, "build_pair_plan", spy)
    summary = []
    for n in (6, 8):
        cfg = ExperimentConfig(n, "block:m=2", "half", trials=10_000, master_seed=11)
        decoys = alice_first = nobody = 0
        for _, out, prog, bob in iter_games(cfg):
            plans = bob.collection(final_view(out, n, prog))
            for plan, who in first_entrants(plans, out):
                decoys += 1
                assert who != "bob"
                alice_first += who == "alice"
                nobody += who is None
        summary.append(f"n={n}: {decoys} decoys, Alice first {alice_first}, untouched {nobody}, Bob first 0")
        assert decoys > 0 and alice_first > 0
    n_pairs = 0
    for n, res in plans_seen:
        lo, hi = Fraction(2 * n, 2 * n + 1), Fraction(2 * n + 1, 2 * n)
        for p in res.pairs:
            assert p.union.bit_count() % 2 == 0
            assert lo <= p.p1 / p.p2 <= hi
            n_pairs += 1
    record_property("note", f"{n_pairs} pairs: even unions, ratios within [2n/(2n+1), (2n+1)/2n]")
    for line in summary:
        record_property("note", line)


def test_criterion_05_oracle_vs_monte_carlo(record_property):
    t0 = time.perf_counter()
    for bob in ("half", "amplified:c=2"):
        cfg = ExperimentConfig(4, "block:m=2", bob, trials=10_000, master_seed=5, oracle=True)
        exact = exact_outcome_distribution(cfg).prob(AL)
        stats = run_trials(cfg)
        lo, hi = wilson_interval(stats.counts[AL], stats.trials, z=3.0)
        record_property("note", f"{bob}: MC {stats.rate(AL):.4f}, 3-sigma band [{lo:.4f}, {hi:.4f}], exact {exact} = {float(exact):.4f}")
        assert lo <= exact <= hi
    assert time.perf_counter() - t0 < 300


# default catalog entries; randomized ones run with one-bit blocks so the
# oracle can enumerate every tape at n=8
AMPLIFICATION_PANEL = ["full_memory", "matched_response", "constant", "forgetful", "block:m=2,ell=1", "fresh_random:ell=1"]
# non-default parameters where c=4 is kinder to Alice than c=2; see README
KNOWN_REVERSALS = ["block:m=4,ell=1", "block:m=8,ell=1"]


def _survival(alice, c):
    r = exact_outcome_distribution(ExperimentConfig(8, alice, f"amplified:c={c}", oracle=True))
    return 1 - r.prob(AL)


def test_criterion_06_amplification_effect(record_property):
    bound = bounds(8, c=4)["amp_survival_bound"]
    assert bound == Fraction(81, 289)
    record_property("note", f"bound ((n+1)/(2n+1))^(c/2) at n=8, c=4: {bound} ~= {float(bound):.4f} (reported only)")
    for alice in AMPLIFICATION_PANEL:
        s2, s4 = _survival(alice, 2), _survival(alice, 4)
        record_property("note", f"{alice}: survival c=2 {s2}, c=4 {s4}")
        assert s4 <= s2, alice
    for alice in KNOWN_REVERSALS:
        s2, s4 = _survival(alice, 2), _survival(alice, 4)
        record_property("note", f"outside the panel, {alice}: c=2 {s2}, c=4 {s4} (c=4 forms no decoys at n=8)")


def test_criterion_07_negative_control(record_property):
    for n, bob in [(4, "half"), (6, "half"), (4, "amplified:c=2")]:
        cfg = ExperimentConfig(n, "full_memory", bob, trials=1000, oracle=True)
        stats = run_trials(cfg)
        assert stats.counts[DR] == 1000, (n, bob)
        assert exact_outcome_distribution(cfg).prob(DR) == 1
    record_property("note", "half at n=4,6 and amplified:c=2 at n=4 (the only legal c for n<=6): 1000/1000 draws, oracle 1")


def test_criterion_08_determinization(record_property):
    checked = 0
    for n in (2, 3, 4):
        for name, prog in reference_alices(n).items():
            if prog.m >= n:
                continue
            for tape in itertools.product(range(2**prog.ell), repeat=n):
                _, value = minimax_best_response(prog, n, tape)
                assert value == 1, (name, n, tape)
                checked += 1
    record_property("note", f"{checked} (Alice, n, tape) cases with m < n: Bob forces a repeat in every one")
    # with m = n = 2 the block Alice already tracks the whole board
    prog = reference_alices(2)["block"]
    draws = sum(minimax_best_response(prog, 2, t)[1] == 0 for t in itertools.product(range(2), repeat=2))
    record_property("note", f"block m=2 at n=2 (m = n, not low-memory): {draws}/4 tapes hold a draw")


def test_criterion_09_mirror_never_loses(record_property):
    for n in (4, 6, 8):
        stats = run_trials(ExperimentConfig(n, "random_legal", "mirror", trials=10_000, master_seed=n))
        assert stats.counts[BL] == 0
        record_property("note", f"n={n}: 10^4 games, BobLoses 0, draws {stats.counts[DR]}")


def _simulate(argv):
    out, err = io.StringIO(), io.StringIO()
    assert main(argv, stdout=out, stderr=err) == 0
    return out.getvalue().encode()


def test_criterion_10_reproducibility(record_property):
    runs = [
        ["simulate", "--n", "8", "--alice", "block:m=2", "--bob", "amplified:c=4", "--trials", "10000", "--seed", "7"],
        ["simulate", "--n", "6", "--alice", "block:m=2", "--bob", "half", "--trials", "2000", "--seed", "7", "--format", "json"],
        ["simulate", "--n", "4", "--alice", "block:m=2", "--bob", "half", "--trials", "500", "--oracle"],
    ]
    for argv in runs:
        first = _simulate(argv)
        assert _simulate(argv) == first
        assert _simulate(argv + ["--workers", "4"]) == first
    record_property("note", f"{len(runs)} invocations byte-identical across reruns and 4 workers")
