"""Reference aggregation rules.

Every rule surfaces ties as multi-element chosen sets; none breaks ties
arbitrarily.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np

from .base import AggregationRule, argmin_set
from .core import Menu, OrdinalProfile, RiskProfile, ordinalize
from .exceptions import NotInDomainError, ValidationError
from .validation import check_env_index, check_strict

# Social outcome of a pair (a, b) with a < b.
A_BETTER, TIE, B_BETTER = 0, 1, 2
OUTCOME_SYMBOLS = {A_BETTER: "a>b", TIE: "a~b", B_BETTER: "b>a"}


class ErmSingle(AggregationRule):
    """Risk minimization on a single environment (1-based ``env_index``)."""

    rule_name = "erm_single"

    def __init__(self, env_index: int = 1):
        self.env_index = env_index

    def _choose(self, profile: RiskProfile, menu: Menu) -> Menu:
        i = check_env_index(self.env_index, profile.n)
        return argmin_set(profile.values[i - 1], menu)

    def pair_outcome(self, a: int, b: int, vector: int, n: int) -> int:
        """Outcome on ``{a, b}`` given the strict direction vector over ``n`` environments."""
        i = check_env_index(self.env_index, n)
        bit = (vector >> (n - i)) & 1
        return B_BETTER if bit else A_BETTER


class RiskMinimizer(AggregationRule):
    """Argmin of one risk functional.

    With ``risk`` given the profile is ignored and the functional is used
    directly; otherwise the functional is the pooled mean over environments.
    """

    rule_name = "risk_min"

    def __init__(self, risk: Sequence[float] | None = None):
        self.risk = risk

    def functional(self, profile: RiskProfile) -> np.ndarray:
        if self.risk is None:
            return profile.values.mean(axis=0)
        r = np.asarray(self.risk, dtype=float)
        if r.shape != (profile.m,):
            raise ValidationError(f"risk functional has {r.size} values, universe has {profile.m}")
        if not np.all(np.isfinite(r)):
            raise ValidationError("risk functional must be finite")
        return r

    def _choose(self, profile: RiskProfile, menu: Menu) -> Menu:
        return argmin_set(self.functional(profile), menu)


class WeightedSum(AggregationRule):
    """Argmin of ``sum_i w_i r_i(h)``; the federated objective."""

    rule_name = "weighted_sum"

    def __init__(self, weights: Sequence[float] = (0.5, 0.5)):
        self.weights = weights

    def _weights(self, n: int) -> np.ndarray:
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size != n:
            raise ValidationError(f"weighted_sum needs {n} weights, got {list(np.atleast_1d(w))}")
        if np.any(w <= 0):
            raise ValidationError(f"weights must be > 0, got {w.tolist()}")
        return w

    def _choose(self, profile: RiskProfile, menu: Menu) -> Menu:
        w = self._weights(profile.n)
        return argmin_set(w @ profile.values, menu)


class Leximin(AggregationRule):
    """Lexicographic minimization of each hypothesis' risk vector sorted worst first.

    Risks are costs, so the vector is sorted descending: the worst environment
    is compared first.
    """

    rule_name = "leximin"

    def _choose(self, profile: RiskProfile, menu: Menu) -> Menu:
        keys = {h: tuple(sorted(profile.values[:, h].tolist(), reverse=True)) for h in menu}
        best = min(keys.values())
        return tuple(h for h in menu if keys[h] == best)


class ParetoFront(AggregationRule):
    """Menu members not strictly dominated in every environment by another member."""

    rule_name = "pareto_front"

    def _choose(self, profile: RiskProfile, menu: Menu) -> Menu:
        v = profile.values
        return tuple(h for h in menu if not any(np.all(v[:, g] < v[:, h]) for g in menu if g != h))


class Borda(AggregationRule):
    """Borda count on the menu-restricted strict orders.

    In each environment a member scores (menu size - rank position), rank
    positions starting at 1; the maximal total wins.
    """

    rule_name = "borda"
    domain_kind = "ordinal"

    def accepts(self, profile) -> bool:
        return ordinalize(profile).strict

    def _choose(self, profile: OrdinalProfile, menu: Menu) -> Menu:
        check_strict(profile)
        k = len(menu)
        totals = dict.fromkeys(menu, 0)
        for row in profile.levels:
            ranked = sorted(menu, key=lambda h: row[h])
            for pos, h in enumerate(ranked, start=1):
                totals[h] += k - pos
        best = max(totals.values())
        return tuple(h for h in menu if totals[h] == best)


class NashProduct(AggregationRule):
    """Argmin of ``prod_i r_i(h)``; requires strictly positive risks."""

    rule_name = "nash_product"

    def accepts(self, profile) -> bool:
        return not isinstance(profile, RiskProfile) or bool(np.all(profile.values > 0))

    def _choose(self, profile: RiskProfile, menu: Menu) -> Menu:
        if np.any(profile.values <= 0):
            raise NotInDomainError("nash_product needs strictly positive risks")
        prods = [math.prod(profile.values[:, h].tolist()) for h in range(profile.m)]
        return argmin_set(prods, menu)


class PairwiseRule(AggregationRule):
    """Ordinal rule given by one outcome table per hypothesis pair.

    ``tables[(a, b)]`` (``a < b``) lists the social outcome for every strict
    direction vector over ``n_environments``, in ascending vector order.  The
    choice on a menu is the set of maximal elements of the induced relation;
    choice is independent of everything but the pair's rankings by
    construction.
    """

    rule_name = "pairwise"
    domain_kind = "ordinal"

    def __init__(self, tables: Mapping[tuple[int, int], Sequence[int]] | None = None, n_environments: int = 1):
        self.tables = tables
        self.n_environments = n_environments

    @classmethod
    def dictatorship(cls, m: int, n: int, dictator: int) -> "PairwiseRule":
        check_env_index(dictator, n)
        shift = n - dictator
        table = tuple(B_BETTER if (v >> shift) & 1 else A_BETTER for v in range(2**n))
        return cls({(a, b): table for a in range(m) for b in range(a + 1, m)}, n)

    def pair_outcome(self, a: int, b: int, vector: int, n: int) -> int:
        if n != self.n_environments:
            raise ValidationError(f"rule is defined for {self.n_environments} environments, got {n}")
        if a < b:
            return self.tables[(a, b)][vector]
        # swapping the pair flips every direction bit and mirrors the outcome
        return 2 - self.tables[(b, a)][vector ^ ((1 << n) - 1)]

    def weakly_prefers(self, profile: OrdinalProfile, a: int, b: int) -> bool:
        if a == b:
            return True
        lo, hi = min(a, b), max(a, b)
        out = self.tables[(lo, hi)][profile.direction_vector(lo, hi)]
        if out == TIE:
            return True
        return (out == A_BETTER) == (a == lo)

    def _choose(self, profile: OrdinalProfile, menu: Menu) -> Menu:
        check_strict(profile)
        if profile.n != self.n_environments:
            raise ValidationError(f"rule is defined for {self.n_environments} environments, got {profile.n}")
        chosen = tuple(h for h in menu if all(self.weakly_prefers(profile, h, g) for g in menu))
        if not chosen:
            raise NotInDomainError(f"induced relation has no maximal element on {menu}")
        return chosen


ZOO = {
    "erm_single": ErmSingle,
    "risk_min": RiskMinimizer,
    "weighted_sum": WeightedSum,
    "leximin": Leximin,
    "pareto_front": ParetoFront,
    "borda": Borda,
    "nash_product": NashProduct,
}


def erm_single(i: int) -> ErmSingle:
    if int(i) < 1:
        raise ValidationError(f"environment index must be >= 1, got {i}")
    return ErmSingle(int(i))


def risk_min(r: Sequence[float] | None = None) -> RiskMinimizer:
    return RiskMinimizer(None if r is None else tuple(float(x) for x in r))


def pooled_erm() -> RiskMinimizer:
    """ERM on data pooled from all environments: the mean functional."""
    return RiskMinimizer(None)


def weighted_sum(w: Sequence[float]) -> WeightedSum:
    w = tuple(float(x) for x in w)
    if not w or any(x <= 0 for x in w):
        raise ValidationError(f"weights must be nonempty and > 0, got {list(w)}")
    return WeightedSum(w)


def leximin() -> Leximin:
    return Leximin()


def pareto_front() -> ParetoFront:
    return ParetoFront()


def borda() -> Borda:
    return Borda()


def nash_product() -> NashProduct:
    return NashProduct()


def make_rule(name: str, **params) -> AggregationRule:
    """Instantiate a zoo rule by name; unknown names raise ValidationError."""
    if name not in ZOO:
        raise ValidationError(f"unknown rule {name!r}; known: {', '.join(sorted(ZOO))}")
    factories = {
        "erm_single": lambda: erm_single(params.get("env_index", 1)),
        "risk_min": lambda: risk_min(params.get("risk")),
        "weighted_sum": lambda: weighted_sum(params["weights"]),
        "leximin": leximin,
        "pareto_front": pareto_front,
        "borda": borda,
        "nash_product": nash_product,
    }
    try:
        return factories[name]()
    except KeyError as exc:
        raise ValidationError(f"rule {name!r} requires parameter {exc.args[0]!r}") from None
