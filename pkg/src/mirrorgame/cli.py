"""Command-line front end.

Exit codes: 0 ok, 2 configuration error, 3 enumeration budget exceeded,
4 internal invariant violated.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import IO, Sequence

import numpy as np

from mirrorgame import setmask
from mirrorgame.adversary import DecoyBob
from mirrorgame.errors import BudgetExceeded, ConfigError, InvariantViolation
from mirrorgame.experiments import (
    DESK_SCALE_NOTE,
    KINDS,
    ExperimentConfig,
    TrialStats,
    bounds,
    exact_outcome_distribution,
    format_bounds,
    iter_games,
    render,
    result_row,
    run_trials,
)
from mirrorgame.game import ALICE, GameView, Loss, Outcome, OutcomeKind, apply_move, new_game, pick, write_transcript
from mirrorgame.oddtown import OddMemberError, SetFamily, extract_even_union_pairs, is_oddtown, oddtown_bound_check
from mirrorgame.players import HumanAlice
from mirrorgame.registry import make_bob

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET, EXIT_INVARIANT = 0, 2, 3, 4

SIMULATE_DEFAULTS = {
    "n": None,
    "alice": "block:m=2",
    "bob": "half",
    "trials": 1000,
    "seed": 0,
    "oracle": False,
    "format": "csv",
    "out": None,
    "budget": 10**7,
    "verbose": False,
    "workers": 1,
}


def _add_simulate(sub) -> None:
    p = sub.add_parser("simulate", help="Monte Carlo trials, optionally with the exact oracle")
    p.add_argument("--n", type=int)
    p.add_argument("--alice", help="Alice strategy, e.g. block:m=2")
    p.add_argument("--bob", help="Bob strategy: mirror, random, half, amplified:c=2")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--oracle", action="store_true", default=None, help="add the exact Alice-loss probability")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out", help="write results here instead of stdout")
    p.add_argument("--config", help="JSON file of defaults; flags take precedence")
    p.add_argument("--budget", type=int, help="node budget for exact enumeration")
    p.add_argument("--verbose", action="store_true", default=None, help="print each breakpoint plan as JSON on stderr")
    p.add_argument("--workers", type=int, help="worker processes for trials")
    p.set_defaults(func=cmd_simulate)


def merge_config(args: argparse.Namespace) -> dict:
    """Defaults, then the --config file, then explicit flags."""
    merged = dict(SIMULATE_DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        unknown = sorted(set(loaded) - set(SIMULATE_DEFAULTS))
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        merged.update(loaded)
    for key in SIMULATE_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if merged["n"] is None:
        raise ConfigError("--n is required (flag or config file)")
    return merged


def cmd_simulate(args: argparse.Namespace, out: IO[str], err: IO[str]) -> int:
    opts = merge_config(args)
    config = ExperimentConfig(
        n=opts["n"],
        alice=opts["alice"],
        bob=opts["bob"],
        trials=opts["trials"],
        master_seed=opts["seed"],
        oracle=bool(opts["oracle"]),
        budget=opts["budget"],
        workers=opts["workers"],
    )
    err.write(f"# {DESK_SCALE_NOTE}\n")
    if opts["verbose"]:
        stats = _verbose_trials(config, err)
    else:
        stats = run_trials(config)
    oracle = exact_outcome_distribution(config) if config.oracle else None
    text = render([result_row(config, stats, oracle)], opts["format"])
    if opts["out"]:
        with open(opts["out"], "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def _verbose_trials(config: ExperimentConfig, err: IO[str]) -> TrialStats:
    """Sequential run that echoes each breakpoint plan; same counts as run_trials."""

    def show(plan) -> None:
        err.write(json.dumps(plan.to_json()) + "\n")

    counts = {kind: 0 for kind in KINDS}
    for _, outcome, _, _ in iter_games(config, on_plan=show):
        counts[outcome.kind] += 1
    return TrialStats(config.trials, counts)


def _add_play(sub) -> None:
    p = sub.add_parser("play", help="play Alice against a Bob strategy")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--bob", default="mirror", help="mirror or random")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--transcript", help="save the game as JSON lines here")
    p.set_defaults(func=cmd_play)


def _board(n: int, used: int) -> str:
    return " ".join(f"[{v}]" if setmask.contains(used, v) else f" {v} " for v in range(1, 2 * n + 1))


def cmd_play(args: argparse.Namespace, out: IO[str], err: IO[str], stdin: IO[str] | None = None) -> int:
    bob = make_bob(args.bob, args.n)
    if isinstance(bob, DecoyBob):
        raise ConfigError("the decoy strategies need an open-book Alice program; play against mirror or random")
    human = HumanAlice(stdin or sys.stdin, out)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(args.seed)))
    state = new_game(args.n)
    outcome = None
    try:
        while not state.over:
            out.write(_board(args.n, state.used) + "\n")
            view = GameView(state)
            if view.turn % 2 == 1:
                number = human.candidates(view)[0]
            else:
                number = pick(bob.candidates(view), rng)
                out.write(f"turn {view.turn}, Bob plays {number}\n")
            if not 1 <= number <= 2 * args.n:
                out.write(f"{number} is outside 1..{2 * args.n}\n")
                outcome = Outcome.from_loss(Loss(ALICE, view.turn, number, forfeit=True), state.history)
                break
            result = apply_move(state, number)
            if isinstance(result, Loss):
                outcome = Outcome.from_loss(result, state.history)
                break
            state = result
    except EOFError:
        out.write("\nsession aborted\n")
        return EXIT_OK
    if outcome is None:
        outcome = Outcome(OutcomeKind.DRAW, None, state.history)
    out.write({"AliceLoses": "Alice loses", "BobLoses": "Bob loses", "Draw": "Draw"}[outcome.kind.value] + "\n")
    if args.transcript:
        with open(args.transcript, "w") as fh:
            write_transcript(outcome, fh)
        out.write(f"transcript saved to {args.transcript}\n")
    return EXIT_OK


def _add_oddtown(sub) -> None:
    p = sub.add_parser("oddtown-check", help="inspect a set family given as a JSON list of lists")
    p.add_argument("path", help="JSON file, or - for stdin")
    p.add_argument("--ground", type=int, help="ground set size N (default: largest element)")
    p.set_defaults(func=cmd_oddtown)


def _load_family(path: str, ground: int | None, stdin: IO[str] | None) -> SetFamily:
    try:
        if path == "-":
            data = json.load(stdin or sys.stdin)
        else:
            with open(path) as fh:
                data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read family: {exc}") from None
    if not isinstance(data, list) or not all(
        isinstance(s, list) and all(isinstance(v, int) and not isinstance(v, bool) and v >= 1 for v in s) for s in data
    ):
        raise ConfigError("family must be a JSON list of lists of positive integers")
    if ground is None:
        ground = max((v for s in data for v in s), default=0)
    try:
        return SetFamily.from_lists(ground, data)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def cmd_oddtown(args: argparse.Namespace, out: IO[str], err: IO[str], stdin: IO[str] | None = None) -> int:
    fam = _load_family(args.path, args.ground, stdin)
    odd = is_oddtown(fam)
    out.write(f"sets: {len(fam)}  ground: {fam.ground_size}\n")
    out.write(f"is_oddtown: {str(odd).lower()}\n")
    if odd:
        rep = oddtown_bound_check(fam)
        out.write(f"bound |F| <= N: {str(rep.within_bound).lower()}  gf2_rank: {rep.rank}\n")
    try:
        match = extract_even_union_pairs(fam)
    except OddMemberError as exc:
        out.write(f"pair extraction refused: {exc}\n")
        return EXIT_OK
    out.write(f"pairs: {len(match.pairs)}\n")
    for a, b in match.pairs:
        out.write(f"  {setmask.to_list(a)} + {setmask.to_list(b)}\n")
    out.write(f"leftovers: {json.dumps([setmask.to_list(s) for s in match.leftovers])}\n")
    return EXIT_OK


def _add_bounds(sub) -> None:
    p = sub.add_parser("bounds", help="closed-form bounds for given n, c, k")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--c", type=int)
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_bounds)


def cmd_bounds(args: argparse.Namespace, out: IO[str], err: IO[str]) -> int:
    out.write(format_bounds(bounds(args.n, c=args.c, k=args.k)) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mirrorgame", description="Mirror game simulator with decoy-pair adversaries.")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_simulate(sub)
    _add_play(sub)
    _add_oddtown(sub)
    _add_bounds(sub)
    return parser


def main(
    argv: Sequence[str] | None = None,
    *,
    stdin: IO[str] | None = None,
    stdout: IO[str] | None = None,
    stderr: IO[str] | None = None,
) -> int:
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.func in (cmd_play, cmd_oddtown):
            return args.func(args, out, err, stdin)
        return args.func(args, out, err)
    except ConfigError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except BudgetExceeded as exc:
        err.write(f"budget exceeded: {exc}\n")
        return EXIT_BUDGET
    except InvariantViolation as exc:
        err.write(f"invariant violated: {exc}\n")
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
