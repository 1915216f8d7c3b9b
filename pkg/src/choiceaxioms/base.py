"""Base class for aggregation rules.

A rule maps a risk profile to a choice correspondence.  Following the
scikit-learn estimator conventions, ``fit`` stores a validated profile and
``predict`` returns the chosen set for each requested menu; the stateless
``choose(profile, menu)`` is what the axiom checkers call.
"""

from __future__ import annotations

from typing import Iterable

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .core import ChoiceCorrespondence, FeasibleFamily, Menu, enumerate_menus
from .exceptions import ValidationError
from .validation import check_menu, check_profile


class AggregationRule(BaseEstimator):
    """Abstract aggregation rule.

    Subclasses set ``domain_kind`` to ``"numeric"`` or ``"ordinal"`` and
    implement ``_choose(profile, menu)`` on an already coerced profile.
    """

    domain_kind = "numeric"

    @property
    def name(self) -> str:
        return getattr(self, "rule_name", type(self).__name__)

    def _choose(self, profile, menu: Menu) -> Menu:
        raise NotImplementedError

    def accepts(self, profile) -> bool:
        """Whether ``profile`` lies in the rule's declared domain."""
        return True

    def choose(self, profile, menu) -> Menu:
        profile = check_profile(profile, self.domain_kind)
        menu = check_menu(menu, profile.universe)
        chosen = self._choose(profile, menu)
        if not chosen or not set(chosen) <= set(menu):
            raise ValidationError(f"{self.name} returned {chosen} on menu {menu}")
        return tuple(sorted(chosen))

    def correspondence(self, profile, family: FeasibleFamily | None = None) -> ChoiceCorrespondence:
        profile = check_profile(profile, self.domain_kind)
        family = family or enumerate_menus(profile.universe)
        return ChoiceCorrespondence(family, {menu: self._choose(profile, menu) for menu in family})

    def fit(self, X, y=None):
        self.profile_ = check_profile(X, self.domain_kind)
        self.n_environments_ = self.profile_.n
        self.n_hypotheses_ = self.profile_.m
        return self

    def predict(self, menus: Iterable) -> list[Menu]:
        check_is_fitted(self, "profile_")
        return [self.choose(self.profile_, menu) for menu in menus]

    def fit_predict(self, X, menus=None) -> list[Menu]:
        self.fit(X)
        if menus is None:
            menus = list(enumerate_menus(self.profile_.universe))
        return self.predict(menus)

    def describe(self) -> dict:
        return {"name": self.name, "domain": self.domain_kind, "params": _jsonable(self.get_params())}


def _jsonable(params: dict) -> dict:
    return {str(k): _plain(v) for k, v in sorted(params.items())}


def _plain(v):
    if hasattr(v, "tolist"):
        return v.tolist()
    if isinstance(v, (tuple, list)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        # tuple keys such as hypothesis pairs become "a,b"
        return {",".join(map(str, k)) if isinstance(k, tuple) else str(k): _plain(x) for k, x in sorted(v.items())}
    return v


def argmin_set(scores, menu: Menu) -> Menu:
    """Members of ``menu`` attaining the minimal score (exact comparison)."""
    best = min(scores[h] for h in menu)
    return tuple(h for h in menu if scores[h] == best)
