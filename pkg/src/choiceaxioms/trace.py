"""Constructive contraction of a decisive environment set down to one environment.

Each step splits the current decisive set E into E1 (first half) and E2,
builds a three-hypothesis witness profile, reads the rule's choice on
{f, h} to decide which half inherits decisiveness over some pair, and then
spreads that local decisiveness to every pair via a four-hypothesis chain.
Every claim is checked against the rule's pair oracle as it is made, and
:func:`validate_trace` re-checks a finished trace from its JSON form.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .axioms import PairOracle, _env_mask
from .core import OrdinalProfile, default_universe
from .exceptions import ValidationError
from .rules import PairwiseRule

F, G, H, P, Q = range(5)
UNIVERSE_SIZE = 5
SPOT_CHECKS = 3


def _profile(orders: list[list[int]]) -> OrdinalProfile:
    levels = []
    for order in orders:
        row = [0] * UNIVERSE_SIZE
        for pos, h in enumerate(order):
            row[h] = pos
        levels.append(tuple(row))
    return OrdinalProfile(default_universe(UNIVERSE_SIZE), tuple(levels))


def _complete(prefix: list[int]) -> list[int]:
    return prefix + [h for h in range(UNIVERSE_SIZE) if h not in prefix]


def contraction_profile(n: int, e1, e2) -> OrdinalProfile:
    """E1: f > g > h.  E2: h > f > g.  Everyone else: g > h > f."""
    orders = []
    for e in range(1, n + 1):
        if e in e1:
            orders.append(_complete([F, G, H]))
        elif e in e2:
            orders.append(_complete([H, F, G]))
        else:
            orders.append(_complete([G, H, F]))
    return _profile(orders)


def spreading_profile(n: int, envs, a: int, b: int, p: int, q: int) -> OrdinalProfile:
    """Members rank p > a > b > q; the rest rank b > q > p > a.

    Everyone ranks p over a and b over q, so those pairs are unanimous while
    only the members rank p over q.
    """
    orders = []
    for e in range(1, n + 1):
        orders.append(_complete([p, a, b, q] if e in envs else [b, q, p, a]))
    return _profile(orders)


def _labels(xs) -> list[str]:
    u = default_universe(UNIVERSE_SIZE)
    return [u.label(x) for x in xs]


def _orders_json(profile: OrdinalProfile) -> list[list[str]]:
    return [[default_universe(UNIVERSE_SIZE).label(h) for h in sorted(range(UNIVERSE_SIZE), key=row.__getitem__)]
            for row in profile.levels]


@dataclass
class DecisivenessTrace:
    n: int
    rule: dict
    steps: list[dict] = field(default_factory=list)
    terminal: list[int] = field(default_factory=list)
    valid: bool = True
    message: str = ""

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "rule": self.rule,
            "universe": default_universe(UNIVERSE_SIZE).to_json(),
            "steps": self.steps,
            "terminal": list(self.terminal),
            "valid": self.valid,
            "message": self.message,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def chain(self) -> list[list[int]]:
        return [s["current"] for s in self.steps] + [list(self.terminal)]


def _local_check(oracle: PairOracle, envs, f: int, g: int, n: int) -> dict:
    holds = oracle.locally_decisive(_env_mask(envs, n), f, g)
    return {"kind": "local", "envs": list(envs), "pair": _labels((f, g)), "holds": holds}


def trace_decisiveness(n: int, rule=None, dictator: int = 1, seed: int = 0) -> DecisivenessTrace:
    """Shrink the grand coalition [n] to a single decisive environment.

    ``rule`` must expose ``pair_outcome`` or be cheap to enumerate on five
    hypotheses; by default it is the dictatorship of ``dictator``.  A rule
    for which some claimed decisiveness fails yields a trace with
    ``valid=False`` that stops at the failing step.
    """
    if n < 1:
        raise ValidationError(f"need n >= 1, got {n}")
    rule = rule if rule is not None else PairwiseRule.dictatorship(UNIVERSE_SIZE, n, dictator)
    oracle = PairOracle(rule, UNIVERSE_SIZE, n)
    rng = np.random.default_rng(seed)
    trace = DecisivenessTrace(n, rule.describe() if hasattr(rule, "describe") else {"name": str(rule)})
    current = list(range(1, n + 1))
    if not oracle.globally_decisive(_env_mask(current, n)):
        trace.valid = False
        trace.message = "grand coalition is not decisive: rule violates Pareto optimality"
        trace.terminal = current
        return trace

    while len(current) > 1:
        cut = math.ceil(len(current) / 2)
        e1, e2 = current[:cut], current[cut:]
        witness = contraction_profile(n, e1, e2)
        chosen = rule.choose(witness, (F, H))
        if chosen == (F,):
            branch, winner, pair = "E1", e1, (F, H)
        else:
            branch, winner, pair = "E2", e2, (H, G)
        step = {
            "current": list(current),
            "partition": {"E1": list(e1), "E2": list(e2)},
            "witness_profile": _orders_json(witness),
            "pair_choice": {"menu": _labels((F, H)), "chosen": _labels(chosen)},
            "branch": branch,
            "decisive_set": list(winner),
            "local_pair": _labels(pair),
            "checks": [_local_check(oracle, current, F, G, n), _local_check(oracle, winner, *pair, n)],
        }
        # spread from the local pair to (p, q) through the chain p > a > b > q
        a, b = pair
        spread = spreading_profile(n, winner, a, b, P, Q)
        step["spreading"] = {
            "pair": _labels((P, Q)),
            "chain": _labels((P, a, b, Q)),
            "witness_profile": _orders_json(spread),
            "chosen": _labels(rule.choose(spread, (P, Q))),
            "check": _local_check(oracle, winner, P, Q, n),
        }
        pairs = [(x, y) for x in range(UNIVERSE_SIZE) for y in range(UNIVERSE_SIZE) if x != y]
        picks = rng.choice(len(pairs), size=SPOT_CHECKS, replace=False)
        step["spot_checks"] = [_local_check(oracle, winner, *pairs[int(i)], n) for i in sorted(picks)]
        step["globally_decisive"] = oracle.globally_decisive(_env_mask(winner, n))
        trace.steps.append(step)

        claims = step["checks"] + [step["spreading"]["check"]] + step["spot_checks"]
        ok = all(c["holds"] for c in claims) and step["globally_decisive"]
        ok = ok and step["spreading"]["chosen"] == _labels((P,))
        if not ok:
            trace.valid = False
            trace.message = f"decisiveness claim failed at step {len(trace.steps)}"
            trace.terminal = list(winner)
            return trace
        current = list(winner)
    trace.terminal = current
    return trace


def validate_trace(data: dict, rule=None) -> bool:
    """Re-check a trace's JSON form: shrinking chain plus every decisiveness claim."""
    n = data["n"]
    rule = rule if rule is not None else PairwiseRule.dictatorship(UNIVERSE_SIZE, n, 1)
    oracle = PairOracle(rule, UNIVERSE_SIZE, n)
    u = default_universe(UNIVERSE_SIZE)
    prev = list(range(1, n + 1))
    for k, step in enumerate(data["steps"]):
        if step["current"] != prev:
            return False
        nxt = step["decisive_set"]
        if not (set(nxt) < set(prev)) or not nxt:
            return False
        if sorted(step["partition"]["E1"] + step["partition"]["E2"]) != sorted(prev):
            return False
        claims = step["checks"] + [step["spreading"]["check"]] + step["spot_checks"]
        for c in claims:
            f, g = (u.index(x) for x in c["pair"])
            if not oracle.locally_decisive(_env_mask(c["envs"], n), f, g):
                return False
        # the recorded witness must actually produce the recorded branch
        levels = [[row.index(u.label(h)) for h in range(UNIVERSE_SIZE)] for row in step["witness_profile"]]
        chosen = rule.choose(OrdinalProfile(u, tuple(map(tuple, levels))), (F, H))
        if (_labels(chosen) == _labels((F,))) != (step["branch"] == "E1"):
            return False
        prev = nxt
    return len(prev) == 1 and data["terminal"] == prev
