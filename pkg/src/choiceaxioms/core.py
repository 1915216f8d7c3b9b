"""Finite domain model: hypothesis universes, menus, risk profiles, choices.

Hypotheses are identified by their position ``0..m-1`` in a :class:`Universe`;
labels are for display and serialization only.  Menus and chosen sets are
sorted tuples of identifiers, which keeps them hashable and canonically
ordered.  Lower risk is better everywhere.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .exceptions import ValidationError

Menu = tuple[int, ...]


def menu_sort_key(menu: Menu) -> tuple[int, Menu]:
    """Canonical order of menus: by size, then lexicographically."""
    return (len(menu), menu)


@dataclass(frozen=True)
class Universe:
    """Ordered, duplicate-free collection of hypothesis labels."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) == 0:
            raise ValidationError("universe must contain at least one hypothesis")
        seen = set()
        for label in self.labels:
            if label in seen:
                raise ValidationError(f"duplicate hypothesis label: {label!r}")
            seen.add(label)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[int]:
        return iter(range(len(self.labels)))

    @property
    def size(self) -> int:
        return len(self.labels)

    def label(self, h: int) -> str:
        return self.labels[h]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValidationError(f"unknown hypothesis label: {label!r}") from None

    def full_menu(self) -> Menu:
        return tuple(range(len(self.labels)))

    def to_json(self) -> list[str]:
        return list(self.labels)

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "Universe":
        return make_universe(data)


def make_universe(labels: Iterable) -> Universe:
    """Build a universe from distinct labels (strings or small integers)."""
    labels = [str(x) for x in labels]
    if not labels:
        raise ValidationError("label list is empty")
    return Universe(tuple(labels))


def default_universe(m: int) -> Universe:
    """Universe of size ``m`` labelled f, g, h, ... then h3, h4, ... if needed."""
    if m < 1:
        raise ValidationError(f"universe size must be >= 1, got {m}")
    base = ["f", "g", "h", "p", "q"]
    if m <= len(base):
        return Universe(tuple(base[:m]))
    return Universe(tuple(f"h{i}" for i in range(m)))


def make_menu(universe: Universe, members: Iterable) -> Menu:
    """Validate ``members`` (ids or labels) and return the canonical menu."""
    ids = []
    for x in members:
        if isinstance(x, str):
            ids.append(universe.index(x))
        else:
            x = int(x)
            if not 0 <= x < len(universe):
                raise ValidationError(f"hypothesis id {x} outside universe of size {len(universe)}")
            ids.append(x)
    if not ids:
        raise ValidationError("menu must be nonempty")
    if len(set(ids)) != len(ids):
        raise ValidationError(f"menu has duplicate members: {ids}")
    return tuple(sorted(ids))


@dataclass(frozen=True)
class FeasibleFamily:
    """A collection of menus over one universe.

    Unless ``require_small`` is false, every singleton, pair and triple of the
    universe must be present.
    """

    universe: Universe
    menus: tuple[Menu, ...]
    require_small: bool = True

    def __post_init__(self):
        menus = tuple(sorted({make_menu(self.universe, m) for m in self.menus}, key=menu_sort_key))
        if len(menus) != len(self.menus):
            raise ValidationError("feasible family contains duplicate menus")
        object.__setattr__(self, "menus", menus)
        if self.require_small:
            present = set(menus)
            for k in range(1, min(3, len(self.universe)) + 1):
                for sub in itertools.combinations(self.universe, k):
                    if sub not in present:
                        raise ValidationError(f"feasible family is missing required menu {sub}")

    def __iter__(self) -> Iterator[Menu]:
        return iter(self.menus)

    def __len__(self) -> int:
        return len(self.menus)

    def __contains__(self, menu) -> bool:
        return tuple(sorted(menu)) in set(self.menus)

    def pairs(self) -> list[Menu]:
        return [m for m in self.menus if len(m) == 2]


def enumerate_menus(universe: Universe, max_size: int | None = None) -> FeasibleFamily:
    """All nonempty subsets of ``universe`` with at most ``max_size`` members."""
    if max_size is not None and max_size < 3:
        raise ValidationError(f"max_size must be >= 3 so that all pairs and triples are feasible, got {max_size}")
    top = len(universe) if max_size is None else min(max_size, len(universe))
    menus = [sub for k in range(1, top + 1) for sub in itertools.combinations(universe, k)]
    return FeasibleFamily(universe, tuple(menus))


@dataclass(frozen=True, eq=False)
class RiskProfile:
    """Risk values indexed ``values[environment, hypothesis]``."""

    universe: Universe
    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float, copy=True)
        if arr.ndim != 2:
            raise ValidationError(f"risk values must be a 2-D (environments x hypotheses) array, got ndim={arr.ndim}")
        if arr.shape[0] < 1:
            raise ValidationError("risk profile needs at least one environment")
        if arr.shape[1] != len(self.universe):
            raise ValidationError(
                f"risk profile has {arr.shape[1]} hypothesis columns but universe has {len(self.universe)}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValidationError("risk values must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, RiskProfile):
            return NotImplemented
        return self.universe == other.universe and np.array_equal(self.values, other.values)

    __hash__ = None

    def __repr__(self):
        return f"RiskProfile(universe={self.universe.labels}, values={self.values.tolist()})"

    def to_json(self) -> dict:
        return {"universe": self.universe.to_json(), "values": self.values.tolist()}

    @classmethod
    def from_json(cls, data: Mapping) -> "RiskProfile":
        return cls(make_universe(data["universe"]), np.asarray(data["values"], dtype=float))


def make_profile(values, universe: Universe | None = None) -> RiskProfile:
    values = np.asarray(values, dtype=float)
    if universe is None:
        universe = default_universe(values.shape[1])
    return RiskProfile(universe, values)


@dataclass(frozen=True)
class OrdinalProfile:
    """Per-environment weak orders stored as dense levels (0 is best)."""

    universe: Universe
    levels: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        levels = tuple(tuple(int(v) for v in row) for row in self.levels)
        if not levels:
            raise ValidationError("ordinal profile needs at least one environment")
        for row in levels:
            if len(row) != len(self.universe):
                raise ValidationError("every environment must rank every hypothesis")
            if sorted(set(row)) != list(range(len(set(row)))):
                raise ValidationError(f"levels must be dense starting at 0, got {row}")
        object.__setattr__(self, "levels", levels)

    @property
    def n(self) -> int:
        return len(self.levels)

    @property
    def m(self) -> int:
        return len(self.universe)

    @property
    def strict(self) -> bool:
        return all(len(set(row)) == len(row) for row in self.levels)

    def prefers(self, env: int, a: int, b: int) -> bool:
        """True iff environment ``env`` ranks ``a`` strictly above ``b``."""
        return self.levels[env][a] < self.levels[env][b]

    def orders(self) -> list[list[list[int]]]:
        """Each environment's order as a list of indifference classes, best first."""
        out = []
        for row in self.levels:
            classes = [[] for _ in range(max(row) + 1)]
            for h, lvl in enumerate(row):
                classes[lvl].append(h)
            out.append(classes)
        return out

    def direction_vector(self, a: int, b: int) -> int:
        """Encode which of ``a``/``b`` each environment prefers.

        Bit for environment ``e`` (most significant first) is 0 when ``a`` is
        better and 1 when ``b`` is better, so vectors sort lexicographically by
        their integer value.  Only defined on strict profiles.
        """
        v = 0
        for row in self.levels:
            if row[a] == row[b]:
                raise ValidationError("direction vectors are only defined for strict profiles")
            v = (v << 1) | (1 if row[b] < row[a] else 0)
        return v

    def to_risk(self) -> RiskProfile:
        """Rank-position scores: level + 1, so all values are positive."""
        return RiskProfile(self.universe, np.asarray(self.levels, dtype=float) + 1.0)

    def to_json(self) -> dict:
        return {"universe": self.universe.to_json(), "levels": [list(r) for r in self.levels], "strict": self.strict}

    @classmethod
    def from_json(cls, data: Mapping) -> "OrdinalProfile":
        return cls(make_universe(data["universe"]), tuple(tuple(r) for r in data["levels"]))


def _dense_levels(row) -> tuple[int, ...]:
    distinct = sorted(set(row))
    lookup = {v: i for i, v in enumerate(distinct)}
    return tuple(lookup[v] for v in row)


def ordinalize(profile: RiskProfile | OrdinalProfile) -> OrdinalProfile:
    """Per-environment weak orders of a risk profile (lower risk ranks higher).

    Ties are detected by exact float comparison.
    """
    if isinstance(profile, OrdinalProfile):
        return profile
    return OrdinalProfile(profile.universe, tuple(_dense_levels(row.tolist()) for row in profile.values))


def strict_profiles(m: int, n: int, universe: Universe | None = None) -> Iterator[OrdinalProfile]:
    """All ``(m!)**n`` strict ordinal profiles, in canonical order."""
    universe = universe or default_universe(m)
    rankings = []
    for perm in itertools.permutations(range(m)):
        lv = [0] * m
        for pos, h in enumerate(perm):
            lv[h] = pos
        rankings.append(tuple(lv))
    for combo in itertools.product(rankings, repeat=n):
        yield OrdinalProfile(universe, combo)


def count_strict_profiles(m: int, n: int) -> int:
    return math.factorial(m) ** n


@dataclass(frozen=True)
class AffineTransform:
    """Per-environment positive affine map ``r -> offset + scale * r``."""

    offsets: tuple[float, ...]
    scales: tuple[float, ...]

    def __post_init__(self):
        offsets = tuple(float(a) for a in self.offsets)
        scales = tuple(float(b) for b in self.scales)
        if len(offsets) != len(scales):
            raise ValidationError("offsets and scales must have one entry per environment")
        for i, b in enumerate(scales):
            if not b > 0:
                raise ValidationError(f"scale for environment {i + 1} must be > 0, got {b}")
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "scales", scales)

    @classmethod
    def identity(cls, n: int) -> "AffineTransform":
        return cls((0.0,) * n, (1.0,) * n)

    def to_json(self) -> dict:
        return {"offsets": list(self.offsets), "scales": list(self.scales)}


def apply_affine(profile: RiskProfile, t: AffineTransform) -> RiskProfile:
    if len(t.scales) != profile.n:
        raise ValidationError(f"transform has {len(t.scales)} environments, profile has {profile.n}")
    a = np.asarray(t.offsets)[:, None]
    b = np.asarray(t.scales)[:, None]
    return RiskProfile(profile.universe, a + b * profile.values)


def random_affine(n: int, rng: np.random.Generator) -> AffineTransform:
    """Offsets uniform in [-10, 10], scales log-uniform in [0.01, 100]."""
    offsets = rng.uniform(-10.0, 10.0, size=n)
    scales = 10.0 ** rng.uniform(-2.0, 2.0, size=n)
    return AffineTransform(tuple(offsets), tuple(scales))


_MONOTONE_KINDS = ("affine", "cubic", "exp", "arctan")


@dataclass(frozen=True)
class MonotoneTransform:
    """A strictly increasing map from a closed parametric catalogue.

    * ``affine``:  a + b*x            (b > 0)
    * ``cubic``:   a*x**3 + b*x + c   (a >= 0, b > 0)
    * ``exp``:     a*exp(b*x) + c     (a > 0, b > 0)
    * ``arctan``:  a*arctan(x) + b*x + c   (a >= 0, b > 0)
    """

    kind: str
    params: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in _MONOTONE_KINDS:
            raise ValidationError(f"unknown monotone transform kind {self.kind!r}")
        defaults = {"affine": (0.0, 1.0), "cubic": (1.0, 1.0, 0.0), "exp": (1.0, 1.0, 0.0), "arctan": (1.0, 1.0, 0.0)}
        params = tuple(float(x) for x in (self.params or defaults[self.kind]))
        if len(params) != len(defaults[self.kind]):
            raise ValidationError(f"{self.kind} transform takes {len(defaults[self.kind])} parameters")
        if self.kind == "affine" and not params[1] > 0:
            raise ValidationError("affine slope must be > 0")
        if self.kind in ("cubic", "arctan") and not (params[0] >= 0 and params[1] > 0):
            raise ValidationError(f"{self.kind} needs a >= 0 and b > 0")
        if self.kind == "exp" and not (params[0] > 0 and params[1] > 0):
            raise ValidationError("exp needs a > 0 and b > 0")
        object.__setattr__(self, "params", params)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind == "affine":
            return p[0] + p[1] * x
        if self.kind == "cubic":
            return p[0] * x**3 + p[1] * x + p[2]
        if self.kind == "exp":
            return p[0] * np.exp(p[1] * x) + p[2]
        return p[0] * np.arctan(x) + p[1] * x + p[2]


def monotone_catalogue() -> list[MonotoneTransform]:
    """One representative (plus a rescaled variant) of every catalogue family."""
    return [
        MonotoneTransform("affine", (-3.0, 0.25)),
        MonotoneTransform("affine", (7.0, 40.0)),
        MonotoneTransform("cubic", (1.0, 1.0, 0.0)),
        MonotoneTransform("cubic", (5.0, 0.01, -2.0)),
        MonotoneTransform("exp", (1.0, 1.0, 0.0)),
        MonotoneTransform("exp", (0.5, 3.0, -1.0)),
        MonotoneTransform("arctan", (1.0, 1.0, 0.0)),
        MonotoneTransform("arctan", (10.0, 0.1, 4.0)),
    ]


@dataclass(frozen=True, eq=False)
class ChoiceCorrespondence:
    """Assignment of a nonempty chosen subset to every menu of a family."""

    family: FeasibleFamily
    choices: Mapping[Menu, Menu]

    def __post_init__(self):
        normalized = {}
        for menu, chosen in self.choices.items():
            menu = tuple(sorted(menu))
            normalized[menu] = tuple(sorted(set(chosen)))
        object.__setattr__(self, "choices", normalized)
        self.validate()

    def validate(self) -> None:
        """Check nonemptiness and containment on every menu of the family."""
        for menu in self.family:
            if menu not in self.choices:
                raise ValidationError(f"correspondence is missing menu {menu}")
            chosen = self.choices[menu]
            if not chosen:
                raise ValidationError(f"chosen set for menu {menu} is empty")
            if not set(chosen) <= set(menu):
                raise ValidationError(f"chosen set {chosen} is not a subset of menu {menu}")

    def __getitem__(self, menu) -> Menu:
        key = tuple(sorted(menu))
        try:
            return self.choices[key]
        except KeyError:
            raise ValidationError(f"correspondence is not defined on menu {key}") from None

    def __contains__(self, menu) -> bool:
        return tuple(sorted(menu)) in self.choices

    def __eq__(self, other):
        if not isinstance(other, ChoiceCorrespondence):
            return NotImplemented
        return self.family.universe == other.family.universe and dict(self.choices) == dict(other.choices)

    __hash__ = None

    @property
    def universe(self) -> Universe:
        return self.family.universe

    @classmethod
    def from_function(cls, family: FeasibleFamily, fn: Callable[[Menu], Iterable[int]]) -> "ChoiceCorrespondence":
        return cls(family, {menu: tuple(fn(menu)) for menu in family})

    def to_json(self) -> dict:
        return {
            "universe": self.universe.to_json(),
            "choices": [{"menu": list(m), "chosen": list(self.choices[m])} for m in self.family],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ChoiceCorrespondence":
        universe = make_universe(data["universe"])
        choices = {tuple(sorted(e["menu"])): tuple(e["chosen"]) for e in data["choices"]}
        family = FeasibleFamily(universe, tuple(choices), require_small=False)
        return cls(family, choices)
