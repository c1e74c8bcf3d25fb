"""Strategy identifiers of the form ``name:key=value,...``."""

from __future__ import annotations

from fractions import Fraction
from typing import IO, Callable

from mirrorgame import alice as alice_models
from mirrorgame.adversary import AdversaryConfig, BreakpointPlan, DecoyBob
from mirrorgame.errors import ConfigError
from mirrorgame.players import HumanAlice, MirrorBob, RandomBob, RandomLegalAlice

ALICE_NAMES = alice_models.CATALOG_NAMES + ("random_legal",)
BOB_NAMES = ("mirror", "random", "half", "amplified")


def _value(raw: str):
    for cast in (int, Fraction, float):
        try:
            return cast(raw)
        except ValueError:
            continue
    return raw


def parse_spec(spec: str) -> tuple[str, dict]:
    name, _, rest = spec.strip().partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            key, eq, raw = item.partition("=")
            if not eq or not key:
                raise ConfigError(f"malformed option {item!r} in {spec!r}")
            params[key.strip()] = _value(raw.strip())
    return name, params


def make_alice(spec: str, n: int, *, stdin: IO[str] | None = None, stdout: IO[str] | None = None):
    name, params = parse_spec(spec)
    if name == "human":
        return HumanAlice(stdin, stdout)
    if name == "random_legal":
        return RandomLegalAlice()
    factory = alice_models.PROGRAM_FACTORIES.get(name)
    if factory is None:
        raise ConfigError(f"unknown alice {name!r}; choose from {', '.join(ALICE_NAMES)}")
    try:
        return factory(n, **params)
    except TypeError as exc:
        raise ConfigError(f"bad options for alice {name!r}: {exc}") from None


def make_bob(
    spec: str,
    n: int,
    *,
    budget: int | None = None,
    on_plan: Callable[[BreakpointPlan], None] | None = None,
):
    name, params = parse_spec(spec)
    if name == "mirror":
        _no_params(name, params)
        return MirrorBob()
    if name == "random":
        _no_params(name, params)
        return RandomBob()
    if name in ("half", "amplified"):
        if budget is not None:
            params.setdefault("enumeration_budget", budget)
        try:
            config = AdversaryConfig(name, n, **params)
        except TypeError as exc:
            raise ConfigError(f"bad options for bob {name!r}: {exc}") from None
        return DecoyBob(config, on_plan=on_plan)
    raise ConfigError(f"unknown bob {name!r}; choose from {', '.join(BOB_NAMES)}")


def _no_params(name: str, params: dict) -> None:
    if params:
        raise ConfigError(f"bob {name!r} takes no options")
