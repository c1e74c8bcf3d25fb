"""Monte Carlo harness, exact oracle, determinized minimax and bound formulas.

At desk scale (2n <= 16) the closed-form bounds carry asymptotic slack, so they
are reported next to results; only oracle agreement is checked hard.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from mirrorgame import setmask
from mirrorgame.alice import DEFAULT_ELL_CAP, AliceProgram
from mirrorgame.errors import BudgetExceeded, ConfigError
from mirrorgame.game import (
    ALICE,
    GameState,
    GameView,
    Loss,
    Outcome,
    OutcomeKind,
    apply_move,
    mover,
    new_game,
    run_match,
)
from mirrorgame.registry import make_alice, make_bob

KINDS = (OutcomeKind.ALICE_LOSES, OutcomeKind.BOB_LOSES, OutcomeKind.DRAW)

DESK_SCALE_NOTE = (
    "desk-scale run: asymptotic bounds are reported for reference only; "
    "only oracle agreement is asserted"
)


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    alice: str
    bob: str
    trials: int = 1000
    master_seed: int = 0
    oracle: bool = False
    budget: int = 10**7
    workers: int = 1
    ell_cap: int = DEFAULT_ELL_CAP

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigError("n must be positive")
        if self.trials < 0:
            raise ConfigError("trials must be non-negative")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    @property
    def experiment_id(self) -> str:
        key = json.dumps([self.n, self.alice, self.bob, self.trials, self.master_seed, self.oracle])
        return hashlib.sha1(key.encode()).hexdigest()[:12]


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class TrialStats:
    trials: int
    counts: dict[OutcomeKind, int]

    def rate(self, kind: OutcomeKind) -> float:
        return self.counts[kind] / self.trials if self.trials else 0.0

    def interval(self, kind: OutcomeKind, z: float = 1.96) -> tuple[float, float]:
        return wilson_interval(self.counts[kind], self.trials, z)


@dataclass(frozen=True)
class OracleResult:
    distribution: dict[OutcomeKind, Fraction]
    census: dict[OutcomeKind, int]
    nodes: int

    def prob(self, kind: OutcomeKind) -> Fraction:
        return self.distribution[kind]


# -- Monte Carlo ----------------------------------------------------------------


def trial_seed(master_seed: int, i: int) -> np.random.SeedSequence:
    """Independent stream for trial ``i``, a function of (master_seed, i) only."""
    return np.random.SeedSequence([master_seed, i])


def iter_games(config: ExperimentConfig, indices: Sequence[int] | None = None, *, on_plan=None) -> Iterator[tuple[int, Outcome, object, object]]:
    """Yield ``(i, outcome, alice, bob)`` for the selected trials."""
    alice = make_alice(config.alice, config.n)
    bob = make_bob(config.bob, config.n, budget=config.budget, on_plan=on_plan)
    for i in range(config.trials) if indices is None else indices:
        yield i, run_match(alice, bob, config.n, trial_seed(config.master_seed, i)), alice, bob


def _run_chunk(config: ExperimentConfig, indices: list[int]) -> list[tuple[int, str]]:
    return [(i, out.kind.value) for i, out, _, _ in iter_games(config, indices)]


def run_trials(config: ExperimentConfig, order: Sequence[int] | None = None) -> TrialStats:
    """Run ``config.trials`` games; the result does not depend on ``order``
    or on ``config.workers``."""
    indices = list(range(config.trials)) if order is None else list(order)
    if sorted(indices) != list(range(config.trials)):
        raise ConfigError("order must be a permutation of the trial indices")
    if config.workers == 1 or len(indices) < 2:
        results = _run_chunk(config, indices)
    else:
        chunks = [indices[w :: config.workers] for w in range(config.workers)]
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = [r for part in pool.map(_run_chunk, [config] * len(chunks), chunks) for r in part]
    by_index = dict(results)
    counts = {kind: 0 for kind in KINDS}
    for i in range(config.trials):
        counts[OutcomeKind(by_index[i])] += 1
    return TrialStats(config.trials, counts)


# -- exact oracle ---------------------------------------------------------------


def exact_outcome_distribution(config: ExperimentConfig) -> OracleResult:
    """Exact outcome law by recursion through the engine.

    Branches on every candidate Bob (or a randomized Alice player) proposes and
    on every value of each random block Alice draws.
    """
    n = config.n
    alice = make_alice(config.alice, n)
    bob = make_bob(config.bob, n, budget=config.budget)
    prog = alice if isinstance(alice, AliceProgram) else None
    if prog is not None and prog.ell > config.ell_cap:
        raise BudgetExceeded(f"oracle enumerates tapes only up to ell={config.ell_cap}, got {prog.ell}")
    dist = {kind: Fraction(0) for kind in KINDS}
    census = {kind: 0 for kind in KINDS}
    nodes = 0
    n_blocks = 1 << prog.ell if prog is not None else 1

    def finish(kind: OutcomeKind, p: Fraction) -> None:
        dist[kind] += p
        census[kind] += 1

    def lose(who: str, p: Fraction) -> None:
        finish(OutcomeKind.ALICE_LOSES if who == ALICE else OutcomeKind.BOB_LOSES, p)

    def rec(state: GameState, x: int, mem_log: tuple[int, ...], tape: tuple[int, ...], p: Fraction) -> None:
        nonlocal nodes
        nodes += 1
        if nodes > config.budget:
            raise BudgetExceeded(f"oracle exceeded {config.budget} nodes")
        if state.over:
            finish(OutcomeKind.DRAW, p)
            return
        turn = state.turn + 1
        view = GameView(state, prog, mem_log, tape)
        if turn % 2 == 1:
            cands = (prog.nxt(x, tape),) if prog is not None else tuple(alice.candidates(view))
        else:
            cands = tuple(bob.candidates(view))
        q = p / len(cands)
        for number in cands:
            if not 1 <= number <= 2 * n:
                lose(mover(turn), q)
                continue
            nxt_state = apply_move(state, number)
            if isinstance(nxt_state, Loss):
                lose(nxt_state.player, q)
                continue
            if prog is not None and turn % 2 == 0 and turn < 2 * n:
                qb = q / n_blocks
                for block in range(n_blocks):
                    tape2 = tape + (block,)
                    x2 = prog.upd(number, x, turn + 1, tape2)
                    rec(nxt_state, x2, mem_log + (x2,), tape2, qb)
            else:
                rec(nxt_state, x, mem_log, tape, q)

    rec(new_game(n), 0, (0,), (), Fraction(1))
    return OracleResult(dist, census, nodes)


# -- determinized Alice ---------------------------------------------------------


def minimax_best_response(prog: AliceProgram, n: int, blocks: Sequence[int], *, budget: int = 10**7) -> tuple[dict, int]:
    """Optimal Bob against ``prog`` run on a tape fixed in advance.

    Returns ``(policy, value)`` with value 1 when Bob can force Alice to repeat
    and 0 otherwise. ``policy`` maps ``(used, memory)`` at Bob's turns to a
    move that keeps the value.
    """
    if 2 * n > 8:
        raise ConfigError("minimax search is limited to 2n <= 8")
    if len(blocks) < n:
        blocks = tuple(blocks) + (0,) * (n - len(blocks))
    blocks = tuple(blocks)
    full = setmask.universe(n)
    policy: dict[tuple[int, int], int] = {}
    nodes = 0

    @lru_cache(maxsize=None)
    def alice_to_move(used: int, x: int) -> int:
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"minimax exceeded {budget} nodes")
        done = used.bit_count()
        i = done // 2 + 1
        a = prog.nxt(x, blocks[: i - 1])
        if not 1 <= a <= 2 * n or setmask.contains(used, a):
            return 1
        used |= setmask.bit(a)
        best, best_move = 0, None
        for b in setmask.members(full & ~used):
            after = used | setmask.bit(b)
            if after == full:
                value = 0
            else:
                value = alice_to_move(after, prog.upd(b, x, done + 3, blocks[:i]))
            if best_move is None or value > best:
                best, best_move = value, b
            if best == 1:
                break
        policy[(used, x)] = best_move
        return best

    value = alice_to_move(0, 0)
    return policy, value


# -- bounds -----------------------------------------------------------------------


def bounds(n: int, c: int | None = None, k: int | None = None, beta: float | None = None) -> dict:
    """Closed-form quantities for the half and amplified strategies."""
    from mirrorgame.adversary import alpha_for, default_k

    k = default_k(n) if k is None else k
    report: dict = {
        "n": n,
        "k": k,
        "half_loss_bound": Fraction(2 * n, 2 * (2 * n + 1)),
        "set_prob_cap": Fraction(2 * k, 2 * n) ** k,
        "set_prob_cap_loose": 0.84 ** (2 * n),
        "half_useful_threshold": Fraction(9, 10) ** (2 * n),
    }
    if c is not None:
        alpha = alpha_for(c)
        beta = alpha ** (5 / 6) if beta is None else beta
        base = Fraction(n + 1, 2 * n + 1)
        survival = base ** (c // 2) if c % 2 == 0 else float(base) ** (c / 2)
        log_beta = math.log2(beta)
        report.update({
            "c": c,
            "amp_survival_bound": survival,
            "amp_loss_bound": 1 - survival,
            "epoch_set_cap": Fraction(1, c) ** (n // (2 * c)) if n % (2 * c) == 0 else (1 / c) ** (n / (2 * c)),
            "alpha": alpha,
            "beta": beta,
            "beta_log_window": (math.log2(alpha), (2 / 3) * math.log2(alpha)),
            "delta_window": (-0.75 * log_beta, -log_beta),
            "delta_lower_bound": math.log2(c) / (8 * c),
            "delta_floor": 1 / (8 * c),
            "memory_bits_limit": n / (4 * c),
        })
    return report


def format_bounds(report: dict) -> str:
    lines = []
    for key, value in report.items():
        if isinstance(value, Fraction):
            lines.append(f"{key} = {value.numerator}/{value.denominator} ~= {float(value):.6f}")
        elif isinstance(value, tuple):
            lines.append(f"{key} = ({value[0]:.6f}, {value[1]:.6f})")
        elif isinstance(value, float):
            lines.append(f"{key} = {value:.6f}")
        else:
            lines.append(f"{key} = {value}")
    return "\n".join(lines)


# -- output -----------------------------------------------------------------------

CSV_FIELDS = (
    "experiment_id", "n", "alice", "bob", "trials", "seed",
    "alice_loss", "bob_loss", "draw", "ci_low", "ci_high", "oracle_alice_loss",
)


def result_row(config: ExperimentConfig, stats: TrialStats, oracle: OracleResult | None = None) -> dict:
    lo, hi = stats.interval(OutcomeKind.ALICE_LOSES)
    oracle_loss = None
    if oracle is not None:
        q = oracle.prob(OutcomeKind.ALICE_LOSES)
        oracle_loss = f"{q.numerator}/{q.denominator}"
    return {
        "experiment_id": config.experiment_id,
        "n": config.n,
        "alice": config.alice,
        "bob": config.bob,
        "trials": stats.trials,
        "seed": config.master_seed,
        "alice_loss": stats.counts[OutcomeKind.ALICE_LOSES],
        "bob_loss": stats.counts[OutcomeKind.BOB_LOSES],
        "draw": stats.counts[OutcomeKind.DRAW],
        "ci_low": f"{lo:.6f}",
        "ci_high": f"{hi:.6f}",
        "oracle_alice_loss": oracle_loss,
    }


def render(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if fmt != "csv":
        raise ConfigError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else v) for k, v in row.items()})
    return buf.getvalue()
