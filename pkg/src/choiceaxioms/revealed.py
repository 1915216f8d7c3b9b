"""Revealed preference of a choice correspondence read off its pair menus."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .axioms import Verdict, Witness
from .core import ChoiceCorrespondence, FeasibleFamily, Menu, Universe, default_universe, make_universe
from .exceptions import ValidationError


@dataclass(frozen=True)
class RevealedPreference:
    """``matrix[f][g]`` is True iff f is weakly preferred to g."""

    universe: Universe
    matrix: tuple[tuple[bool, ...], ...]

    def __post_init__(self):
        m = len(self.universe)
        mat = tuple(tuple(bool(x) for x in row) for row in self.matrix)
        if len(mat) != m or any(len(row) != m for row in mat):
            raise ValidationError(f"relation matrix must be {m}x{m}")
        # reflexive by construction
        mat = tuple(tuple(True if f == g else mat[f][g] for g in range(m)) for f in range(m))
        object.__setattr__(self, "matrix", mat)

    def weakly(self, f: int, g: int) -> bool:
        return self.matrix[f][g]

    def strictly(self, f: int, g: int) -> bool:
        return self.matrix[f][g] and not self.matrix[g][f]

    def indifferent(self, f: int, g: int) -> bool:
        return self.matrix[f][g] and self.matrix[g][f]

    @classmethod
    def from_levels(cls, levels: Sequence[int], universe: Universe | None = None) -> "RevealedPreference":
        """Weak order given by levels (lower is better)."""
        universe = universe or default_universe(len(levels))
        m = len(levels)
        return cls(universe, tuple(tuple(levels[f] <= levels[g] for g in range(m)) for f in range(m)))

    def to_json(self) -> dict:
        return {"universe": self.universe.to_json(), "matrix": [list(r) for r in self.matrix]}

    @classmethod
    def from_json(cls, data) -> "RevealedPreference":

        return cls(make_universe(data["universe"]), tuple(tuple(r) for r in data["matrix"]))


def reveal(cc: ChoiceCorrespondence) -> RevealedPreference:
    """f ≽ g iff f is chosen from the pair menu {f, g}."""
    universe = cc.universe
    m = len(universe)
    mat = [[f == g for g in range(m)] for f in range(m)]
    for f, g in itertools.combinations(range(m), 2):
        if (f, g) not in cc:
            raise ValidationError(
                f"correspondence is missing pair menu {{{universe.label(f)}, {universe.label(g)}}}"
            )
        chosen = cc[(f, g)]
        mat[f][g] = f in chosen
        mat[g][f] = g in chosen
    return RevealedPreference(universe, tuple(tuple(r) for r in mat))


def check_complete_transitive(r: RevealedPreference) -> Verdict:
    m = len(r.universe)
    count = 0
    for f, g in itertools.combinations(range(m), 2):
        count += 1
        if not (r.weakly(f, g) or r.weakly(g, f)):
            w = Witness("complete", menus=[(f, g)], note=f"neither {f} >= {g} nor {g} >= {f}",
                        extra={"matrix": [list(x) for x in r.matrix], "pair": [f, g]})
            return Verdict("complete_transitive", False, count, w)
    for f, g, h in itertools.permutations(range(m), 3):
        count += 1
        if r.weakly(f, g) and r.weakly(g, h) and not r.weakly(f, h):
            w = Witness("transitive", menus=[tuple(sorted((f, g, h)))],
                        note=f"{f} >= {g} and {g} >= {h} but not {f} >= {h}",
                        extra={"matrix": [list(x) for x in r.matrix], "triple": [f, g, h]})
            return Verdict("complete_transitive", False, count, w)
    return Verdict("complete_transitive", True, count)


def _maximal(matrix, menu: Menu) -> Menu:
    return tuple(h for h in menu if all(matrix[h][g] for g in menu))


def rationalize(order, family: FeasibleFamily) -> ChoiceCorrespondence:
    """Choice correspondence picking the maximal elements of a weak order.

    ``order`` is a :class:`RevealedPreference` or a sequence of levels.
    """
    if not isinstance(order, RevealedPreference):
        order = RevealedPreference.from_levels(list(order), family.universe)
    verdict = check_complete_transitive(order)
    if not verdict.passed:
        raise ValidationError(f"cannot rationalize by a relation that is not a weak order: {verdict.witness.note}")
    return ChoiceCorrespondence(family, {menu: _maximal(order.matrix, menu) for menu in family})


def roundtrip_check(cc: ChoiceCorrespondence, family: FeasibleFamily) -> Verdict:
    """Does choosing the maximal elements of the revealed preference regenerate ``cc``?"""
    r = reveal(cc)
    count = 0
    for menu in family:
        count += 1
        regenerated = _maximal(r.matrix, menu)
        if regenerated != cc[menu]:
            pairs = list(itertools.combinations(menu, 2))
            w = Witness(
                "roundtrip",
                menus=[menu, *pairs],
                choices=[cc[menu], *(cc[p] for p in pairs)],
                note=f"on {list(menu)} the correspondence chose {list(cc[menu])}, "
                f"revealed preference gives {list(regenerated)}",
                extra={"regenerated": list(regenerated)},
            )
            return Verdict("roundtrip", False, count, w)
    return Verdict("roundtrip", True, count)


def replay_revealed(w: Witness) -> bool:
    if w.kind in ("complete", "transitive"):
        mat = w.extra["matrix"]
        r = RevealedPreference(default_universe(len(mat)), tuple(tuple(x) for x in mat))
        return not check_complete_transitive(r).passed
    if w.kind == "roundtrip":
        menu, *pairs = w.menus
        chosen, *pair_choices = w.choices
        weak = {(f, f) for f in menu}
        for (f, g), c in zip(pairs, pair_choices):
            if f in c:
                weak.add((f, g))
            if g in c:
                weak.add((g, f))
        regenerated = tuple(h for h in menu if all((h, g) in weak for g in menu))
        return regenerated != tuple(chosen)
    raise ValidationError(f"not a revealed-preference witness: {w.kind}")


def all_correspondences(family: FeasibleFamily) -> Iterator[ChoiceCorrespondence]:
    """Every choice correspondence on ``family`` (product of nonempty subsets)."""
    options = []
    for menu in family:
        subs = [s for k in range(1, len(menu) + 1) for s in itertools.combinations(menu, k)]
        options.append(subs)
    for combo in itertools.product(*options):
        yield ChoiceCorrespondence(family, dict(zip(family.menus, combo)))


def weak_orders(m: int) -> Iterator[tuple[int, ...]]:
    """All weak orders on ``m`` items as dense level tuples."""
    for levels in itertools.product(range(m), repeat=m):
        used = set(levels)
        if used == set(range(len(used))):
            yield levels
