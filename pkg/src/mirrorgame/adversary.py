"""The decoy-pair Bob against an open-book Alice.

Bob plays uniformly at random up to a breakpoint, then replays every sequence
of his own coins against Alice's known program and realized tape. That gives
the exact joint law of (Alice's memory, set played) at the breakpoint. Given
the memory he actually observes, Bob groups the feasible sets into layers of
nearly equal conditional probability, pairs sets with an even union inside
each layer, and keeps out of the pair containing the true set. By parity Alice
has to enter that union first, and she cannot tell which half of it is live.

The half strategy has one breakpoint at turn ``2k``. The amplified strategy
has ``c/2`` breakpoints at turns ``t * n / c`` and collects one pair per epoch;
both are run by :class:`DecoyBob`.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from mirrorgame import setmask
from mirrorgame.alice import AliceProgram, RandTape
from mirrorgame.errors import BudgetExceeded, ConfigError, InvariantViolation
from mirrorgame.game import GameState, GameView, Outcome, mover
from mirrorgame.oddtown import SetFamily, extract_even_union_pairs
from mirrorgame.setmask import SetMask

DEFAULT_BUDGET = 10**7

PoolRule = Callable[[SetMask], SetMask]


# -- configuration ------------------------------------------------------------


def default_k(n: int) -> int:
    return max(1, round(0.4 * n))


def alpha_for(c: int) -> float:
    return (1 / c) ** (1 / (4 * c))


@dataclass(frozen=True)
class AdversaryConfig:
    """Parameters of the decoy Bob. ``None`` fields get the usual defaults."""

    mode: str
    n: int
    k: int | None = None
    c: int | None = None
    layer_ratio: Fraction | None = None
    max_layers: int | None = None
    low_prob_cutoff: Fraction | None = None
    useful_threshold: Fraction | None = None
    beta: float | None = None
    delta: float | None = None
    enumeration_budget: int = DEFAULT_BUDGET

    def __post_init__(self) -> None:
        n = self.n
        if n < 1:
            raise ConfigError("n must be positive")
        put = lambda name, value: object.__setattr__(self, name, value)  # noqa: E731
        if self.mode == "half":
            k = default_k(n) if self.k is None else self.k
            if not 1 <= k < n:
                raise ConfigError(f"half mode needs 1 <= k < n, got k={k}, n={n}")
            put("k", k)
        elif self.mode == "amplified":
            c = self.c
            if c is None or c < 2 or c % 2:
                raise ConfigError(f"amplified mode needs an even c >= 2, got c={c}")
            if n % c or (n // c) % 2:
                raise ConfigError(f"amplified mode needs n/c to be an even integer (n={n}, c={c})")
            alpha = alpha_for(c)
            beta = alpha ** (5 / 6) if self.beta is None else self.beta
            if not alpha < beta < 1:
                raise ConfigError(f"need alpha < beta < 1, got alpha={alpha:.6f}, beta={beta}")
            put("beta", beta)
            if self.delta is not None and not 2**self.delta * beta < 1:
                raise ConfigError(f"2^delta * beta must be < 1 (delta={self.delta}, beta={beta:.6f})")
        else:
            raise ConfigError(f"unknown adversary mode {self.mode!r}")
        if self.layer_ratio is None:
            put("layer_ratio", Fraction(2 * n, 2 * n + 1))
        if not 0 < self.layer_ratio < 1:
            raise ConfigError("layer_ratio must lie in (0, 1)")
        if self.max_layers is None:
            put("max_layers", (2 * n) ** 3)
        if self.low_prob_cutoff is None:
            put("low_prob_cutoff", Fraction(1, 2 ** (4 * n)))
        if self.useful_threshold is None:
            if self.mode == "half":
                put("useful_threshold", Fraction(9, 10) ** (2 * n))
            else:
                put("useful_threshold", Fraction(self.beta ** (2 * n)))
        if self.enumeration_budget < 1:
            raise ConfigError("enumeration budget must be positive")

    @property
    def breakpoints(self) -> tuple[int, ...]:
        if self.mode == "half":
            return (2 * self.k,)
        step = self.n // self.c
        return tuple(t * step for t in range(1, self.c // 2 + 1))

    @property
    def set_prob_cap(self) -> Fraction:
        """Upper bound on the unconditioned weight of any one phase set."""
        if self.mode == "half":
            return Fraction(2 * self.k, 2 * self.n) ** self.k
        # exponent 2n / 4c, an integer because n / c is even
        return Fraction(1, self.c) ** (self.n // (2 * self.c))


# -- belief enumeration ---------------------------------------------------------


@dataclass
class BeliefTable:
    """Exact joint law of (memory, phase set) over Bob's coins.

    ``entries[x][s]`` is the probability that Alice survives the phase, ends
    in memory ``x`` and the numbers played during the phase are ``s``.
    ``loss_mass`` is the probability that Alice repeats during the phase.
    """

    entries: dict[int, dict[SetMask, Fraction]]
    loss_mass: Fraction
    start_turn: int
    end_turn: int
    tape: RandTape = ()
    nodes: int = 0

    @property
    def survival_mass(self) -> Fraction:
        return sum((sum(b.values(), Fraction(0)) for b in self.entries.values()), Fraction(0))

    def state_mass(self, x: int) -> Fraction:
        return sum(self.entries[x].values(), Fraction(0))

    def set_weights(self) -> dict[SetMask, Fraction]:
        """Weight of each phase set summed over memory states."""
        out: dict[SetMask, Fraction] = {}
        for bucket in self.entries.values():
            for s, w in bucket.items():
                out[s] = out.get(s, Fraction(0)) + w
        return out

    def to_json(self) -> dict:
        return {
            "start_turn": self.start_turn,
            "end_turn": self.end_turn,
            "loss_mass": _frac(self.loss_mass),
            "entries": {
                format(x, "x"): [[setmask.to_list(s), _frac(w)] for s, w in sorted(b.items(), key=lambda kv: setmask.sort_key(kv[0]))]
                for x, b in sorted(self.entries.items())
            },
        }


def _frac(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def unused_pool(n: int, blocked: SetMask = 0) -> PoolRule:
    """Bob's candidates: unused numbers outside ``blocked``."""
    full = setmask.universe(n)

    def rule(used: SetMask) -> SetMask:
        return full & ~used & ~blocked

    return rule


def enumerate_phase(
    prog: AliceProgram,
    tape: RandTape,
    pool_rule: PoolRule,
    start: GameState,
    bob_turns: int,
    *,
    x: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> BeliefTable:
    """Replay every sequence of Bob's uniform choices for ``bob_turns`` rounds.

    ``start`` is the real position at the beginning of the phase (an even
    number of completed turns) and ``x`` Alice's memory there. The realized
    tape is reused in every branch: the enumeration is conditioned on it.
    """
    if start.turn % 2:
        raise ValueError("phases start after Bob's move")
    end_turn = start.turn + 2 * bob_turns
    if len(tape) < end_turn // 2:
        raise ValueError(f"tape has {len(tape)} blocks, phase needs {end_turn // 2}")
    size = 2 * start.n
    base = start.used
    # leaf weights are 1/denom; count hits per denominator, build Fractions once
    hits: dict[int, dict[SetMask, dict[int, int]]] = {}
    loss_hits: dict[int, int] = {}
    nodes = 0

    def rec(used: SetMask, mem: int, turn: int, denom: int, left: int) -> None:
        nonlocal nodes
        a = prog.nxt(mem, tape[: turn // 2])
        if not 1 <= a <= size or (used >> (a - 1)) & 1:
            loss_hits[denom] = loss_hits.get(denom, 0) + 1
            return
        used |= 1 << (a - 1)
        pool = pool_rule(used)
        width = pool.bit_count()
        if width == 0:
            raise InvariantViolation(f"Bob has no candidate at turn {turn + 2}")
        denom *= width
        block_prefix = tape[: turn // 2 + 1]
        nodes += width
        if nodes > budget:
            raise BudgetExceeded(f"belief enumeration exceeded {budget} nodes")
        for b in setmask.members(pool):
            after = used | (1 << (b - 1))
            mem2 = prog.upd(b, mem, turn + 3, block_prefix)
            if left == 1:
                per_set = hits.setdefault(mem2, {}).setdefault(after & ~base, {})
                per_set[denom] = per_set.get(denom, 0) + 1
            else:
                rec(after, mem2, turn + 2, denom, left - 1)

    if bob_turns > 0:
        rec(start.used, x, start.turn, 1, bob_turns)
    entries = {
        mem: {s: _weight(per_set) for s, per_set in bucket.items()}
        for mem, bucket in hits.items()
    }
    return BeliefTable(entries, _weight(loss_hits), start.turn, end_turn, tuple(tape[: end_turn // 2]), nodes)


def _weight(counts: dict[int, int]) -> Fraction:
    return sum((Fraction(c, d) for d, c in counts.items()), Fraction(0))


def conditional_dist(table: BeliefTable, x: int) -> list[tuple[SetMask, Fraction]]:
    """Pr[S = s | X = x] over the surviving branches, sorted by set."""
    if x not in table.entries:
        raise KeyError(f"memory state {x:#x} never occurs in this table")
    bucket = table.entries[x]
    total = sum(bucket.values(), Fraction(0))
    return [(s, w / total) for s, w in sorted(bucket.items(), key=lambda kv: setmask.sort_key(kv[0]))]


@dataclass(frozen=True)
class UsefulReport:
    useful: frozenset[int]
    mass_useful: Fraction
    threshold: Fraction
    bound: Fraction | None  # 1 - (2^m - 1) * threshold, when threshold < 2^-m


def classify_useful(table: BeliefTable, threshold: Fraction, m: int) -> UsefulReport:
    """Memory states whose probability, given survival, exceeds ``threshold``."""
    threshold = Fraction(threshold)
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    total = table.survival_mass
    useful = set()
    mass = Fraction(0)
    if total:
        for x in table.entries:
            p = table.state_mass(x) / total
            if p > threshold:
                useful.add(x)
                mass += p
    bound = 1 - (2**m - 1) * threshold if threshold < Fraction(1, 2**m) else None
    return UsefulReport(frozenset(useful), mass, threshold, bound)


# -- layering and pairing -------------------------------------------------------


@functools.lru_cache(maxsize=65536)
def _power(ratio: Fraction, j: int) -> Fraction:
    return ratio**j


def layer_index(p: Fraction, ratio: Fraction) -> int:
    """Smallest ``j >= 1`` with ``ratio**j < p <= ratio**(j-1)``."""
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    if not 0 < ratio < 1:
        raise ValueError("ratio must lie in (0, 1)")
    log_p = math.log(p.numerator) - math.log(p.denominator)
    log_r = math.log(ratio.numerator) - math.log(ratio.denominator)
    # float estimate, then exact correction
    j = max(1, math.floor(log_p / log_r) + 1)
    while j > 1 and _power(ratio, j - 1) < p:
        j -= 1
    while _power(ratio, j) >= p:
        j += 1
    return j


@dataclass(frozen=True)
class PairPlan:
    s1: SetMask
    s2: SetMask
    layer: int
    p1: Fraction
    p2: Fraction

    @property
    def union(self) -> SetMask:
        return self.s1 | self.s2

    def __contains__(self, s: SetMask) -> bool:
        return s == self.s1 or s == self.s2

    def to_json(self) -> dict:
        return {
            "s1": setmask.to_list(self.s1),
            "s2": setmask.to_list(self.s2),
            "layer": self.layer,
            "p1": _frac(self.p1),
            "p2": _frac(self.p2),
        }


@dataclass(frozen=True)
class PairPlanResult:
    pairs: tuple[PairPlan, ...]
    unpaired: tuple[tuple[SetMask, Fraction], ...]
    unpaired_mass: Fraction


def build_pair_plan(dist: Sequence[tuple[SetMask, Fraction]], n: int, config: AdversaryConfig) -> PairPlanResult:
    """Pair the feasible sets inside each probability layer."""
    ratio = config.layer_ratio
    layers: dict[int, list[tuple[SetMask, Fraction]]] = {}
    low: list[tuple[SetMask, Fraction]] = []
    for s, p in dist:
        if s.bit_count() % 2:
            raise ValueError(f"feasible set {setmask.to_list(s)} has odd size")
        if p < config.low_prob_cutoff:
            low.append((s, p))
            continue
        j = layer_index(p, ratio)
        if j > config.max_layers:
            low.append((s, p))
        else:
            layers.setdefault(j, []).append((s, p))
    pairs: list[PairPlan] = []
    unpaired = list(low)
    for j in sorted(layers):
        probs = dict(layers[j])
        matching = extract_even_union_pairs(SetFamily(2 * n, tuple(probs)))
        pairs.extend(PairPlan(a, b, j, probs[a], probs[b]) for a, b in matching.pairs)
        unpaired.extend((s, probs[s]) for s in matching.leftovers)
    unpaired.sort(key=lambda sp: setmask.sort_key(sp[0]))
    return PairPlanResult(tuple(pairs), tuple(unpaired), sum((p for _, p in unpaired), Fraction(0)))


def choose_decoy(pairs: Iterable[PairPlan], actual: SetMask) -> PairPlan | None:
    for pair in pairs:
        if actual in pair:
            return pair
    return None


# -- the player -----------------------------------------------------------------


@dataclass(frozen=True)
class BreakpointPlan:
    """What Bob decided at one breakpoint of one game."""

    index: int  # 1-based breakpoint number t
    turn: int
    memory: int
    actual: SetMask
    decoy: PairPlan | None
    n_pairs: int
    unpaired_mass: Fraction
    useful: bool
    state_prob: Fraction

    def to_json(self) -> dict:
        return {
            "breakpoint": self.index,
            "turn": self.turn,
            "memory_hex": format(self.memory, "x"),
            "actual": setmask.to_list(self.actual),
            "decoy": None if self.decoy is None else self.decoy.to_json(),
            "pairs": self.n_pairs,
            "unpaired_mass": _frac(self.unpaired_mass),
            "useful": self.useful,
            "state_prob": _frac(self.state_prob),
        }


class DecoyBob:
    """Half (one breakpoint) or amplified (``c/2`` breakpoints) decoy Bob.

    Candidate sets are a pure function of the public view, so the same object
    serves the Monte Carlo engine and the exact oracle. Belief tables and
    plans are memoized on their inputs.
    """

    def __init__(
        self,
        config: AdversaryConfig,
        *,
        on_plan: Callable[[BreakpointPlan], None] | None = None,
        cache_size: int = 4096,
    ):
        self.config = config
        self.on_plan = on_plan
        self.cache_size = cache_size
        self._tables: dict[tuple, BeliefTable] = {}
        self._plans: dict[tuple, PairPlanResult] = {}
        self._decisions: dict[tuple, BreakpointPlan] = {}

    # public, so tests and audits can inspect what Bob committed to
    def collection(self, view: GameView) -> list[BreakpointPlan]:
        """Plans for every breakpoint already reached in ``view``."""
        if view.program is None:
            raise ConfigError("the decoy Bob needs an open-book Alice program")
        done = view.state.turn
        hist = view.state.history
        out: list[BreakpointPlan] = []
        blocked = 0
        prev_turn = 0
        for t, bp in enumerate(self.config.breakpoints, start=1):
            if bp > done:
                break
            key = (t, tuple(mv.number for mv in hist[:bp]), view.tape[: bp // 2])
            decision = self._decisions.get(key)
            if decision is None:
                decision = self._decide(view, t, prev_turn, bp, blocked)
                self._remember(self._decisions, key, decision)
                if self.on_plan is not None:
                    self.on_plan(decision)
            out.append(decision)
            if decision.decoy is not None:
                blocked |= decision.decoy.union
            prev_turn = bp
        return out

    def _decide(self, view: GameView, t: int, start_turn: int, bp: int, blocked: SetMask) -> BreakpointPlan:
        prog = view.program
        n = view.n
        hist = view.state.history
        start_used = setmask.from_iter(mv.number for mv in hist[:start_turn])
        x_start = view.mem_log[start_turn // 2]
        x_obs = view.mem_log[bp // 2]
        actual = setmask.from_iter(mv.number for mv in hist[start_turn:bp])
        tape = view.tape[: bp // 2]
        tkey = (prog, t, start_used, x_start, blocked, tape)
        table = self._tables.get(tkey)
        if table is None:
            start = GameState(n, start_used, start_turn)
            table = enumerate_phase(
                prog, tape, unused_pool(n, blocked), start, (bp - start_turn) // 2,
                x=x_start, budget=self.config.enumeration_budget,
            )
            self._remember(self._tables, tkey, table)
        if x_obs not in table.entries:
            raise InvariantViolation(f"observed memory {x_obs:#x} missing from the belief table")
        pkey = tkey + (x_obs,)
        plan = self._plans.get(pkey)
        if plan is None:
            plan = build_pair_plan(conditional_dist(table, x_obs), n, self.config)
            self._remember(self._plans, pkey, plan)
        state_prob = table.state_mass(x_obs) / table.survival_mass
        return BreakpointPlan(
            index=t,
            turn=bp,
            memory=x_obs,
            actual=actual,
            decoy=choose_decoy(plan.pairs, actual),
            n_pairs=len(plan.pairs),
            unpaired_mass=plan.unpaired_mass,
            useful=state_prob > self.config.useful_threshold,
            state_prob=state_prob,
        )

    def _remember(self, cache: dict, key, value) -> None:
        if len(cache) >= self.cache_size:
            cache.clear()
        cache[key] = value

    def candidates(self, view: GameView) -> Sequence[int]:
        turn = view.turn
        unused = view.state.unused()
        plans = self.collection(view)
        bps = self.config.breakpoints
        if turn <= bps[-1]:
            blocked = 0
            for plan in plans:
                if plan.decoy is not None:
                    blocked |= plan.decoy.union
            pool = unused & ~blocked
            if not pool:
                raise InvariantViolation(f"phase-one pool empty at turn {turn}")
            return tuple(setmask.members(pool))
        avoid = 0
        for plan in live_pairs(plans, view.state.history):
            avoid |= plan.decoy.union
        pool = unused & ~avoid
        return (setmask.smallest(pool if pool else unused),)


def live_pairs(plans: Iterable[BreakpointPlan], history) -> list[BreakpointPlan]:
    """Plans whose pair union has not been touched since its breakpoint."""
    out = []
    for plan in plans:
        if plan.decoy is None:
            continue
        union = plan.decoy.union
        if not any(mv.turn > plan.turn and setmask.contains(union, mv.number) for mv in history):
            out.append(plan)
    return out


def first_entrants(plans: Iterable[BreakpointPlan], outcome: Outcome) -> list[tuple[BreakpointPlan, str | None]]:
    """Who first played into each decoy union after its breakpoint (None if nobody)."""
    moves = [(mv.turn, mv.player, mv.number) for mv in outcome.transcript]
    if outcome.losing_turn is not None:
        player = mover(outcome.losing_turn)
        moves.append((outcome.losing_turn, player, outcome.losing_number))
    out = []
    for plan in plans:
        if plan.decoy is None:
            continue
        union = plan.decoy.union
        who = None
        for turn, player, number in moves:
            if turn > plan.turn and isinstance(number, int) and 1 <= number and setmask.contains(union, number):
                who = player
                break
        out.append((plan, who))
    return out


def dump_plans(plans: Iterable[BreakpointPlan]) -> str:
    return json.dumps([p.to_json() for p in plans])
