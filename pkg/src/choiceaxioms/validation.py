"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

from __future__ import annotations

import numpy as np

from .core import (
    FeasibleFamily,
    Menu,
    OrdinalProfile,
    RiskProfile,
    Universe,
    make_menu,
    make_profile,
    ordinalize,
)
from .exceptions import NotInDomainError, ValidationError


def check_profile(X, kind: str = "numeric", universe: Universe | None = None):
    """Coerce ``X`` to the profile type a rule of domain ``kind`` consumes.

    ``X`` may be a :class:`RiskProfile`, an :class:`OrdinalProfile` or an
    ``(n_environments, n_hypotheses)`` array-like.  Numeric rules receive
    ordinal input as rank-position scores; ordinal rules receive numeric input
    through :func:`ordinalize`.
    """
    if isinstance(X, (RiskProfile, OrdinalProfile)):
        profile = X
    else:
        arr = np.asarray(X, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :]
        profile = make_profile(arr, universe)
    if kind == "numeric":
        return profile.to_risk() if isinstance(profile, OrdinalProfile) else profile
    if kind == "ordinal":
        return ordinalize(profile)
    raise ValidationError(f"unknown domain kind {kind!r}")


def check_strict(profile: OrdinalProfile) -> OrdinalProfile:
    if not profile.strict:
        raise NotInDomainError("rule is defined on strict orders only; input has ties")
    return profile


def check_menu(menu, universe: Universe) -> Menu:
    return make_menu(universe, menu)


def check_env_index(i: int, n: int) -> int:
    """Validate a 1-based environment index against ``n`` environments."""
    if not 1 <= int(i) <= n:
        raise ValidationError(f"environment index {i} out of range 1..{n}")
    return int(i)


def check_family(family: FeasibleFamily, universe: Universe) -> FeasibleFamily:
    if family.universe != universe:
        raise ValidationError("feasible family and profile use different universes")
    return family
