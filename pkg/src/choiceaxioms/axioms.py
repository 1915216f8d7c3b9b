"""Executable axiom checks returning a verdict plus a replayable witness.

Enumeration is always in canonical order (menus by size then lexicographic,
profiles in :func:`~choiceaxioms.core.strict_profiles` order), so the first
failure found is deterministic and, for menu-indexed axioms, lives on the
smallest failing menu.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .core import (
    AffineTransform,
    ChoiceCorrespondence,
    FeasibleFamily,
    Menu,
    OrdinalProfile,
    RiskProfile,
    apply_affine,
    count_strict_profiles,
    default_universe,
    ordinalize,
    random_affine,
    strict_profiles,
)
from .exceptions import GuardError, ValidationError
from .rules import A_BETTER

ENUMERATION_GUARD = 10**7


@dataclass
class Witness:
    """Self-contained counterexample data for one failed check."""

    kind: str
    menus: list = field(default_factory=list)
    profiles: list = field(default_factory=list)
    choices: list = field(default_factory=list)
    note: str = ""
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "menus": [list(m) for m in self.menus],
            "profiles": [profile_to_json(p) for p in self.profiles],
            "choices": [list(c) for c in self.choices],
            "note": self.note,
            "extra": self.extra,
        }

    @classmethod
    def from_json(cls, data) -> "Witness":
        return cls(
            kind=data["kind"],
            menus=[tuple(m) for m in data["menus"]],
            profiles=[profile_from_json(p) for p in data["profiles"]],
            choices=[tuple(c) for c in data["choices"]],
            note=data.get("note", ""),
            extra=dict(data.get("extra", {})),
        )


@dataclass
class Verdict:
    axiom: str
    passed: bool
    checked_count: int = 0
    witness: Witness | None = None
    note: str = ""

    def __post_init__(self):
        if not self.passed and self.witness is None:
            raise ValidationError(f"failed verdict for {self.axiom} must carry a witness")

    def to_json(self) -> dict:
        return {
            "axiom": self.axiom,
            "passed": self.passed,
            "checked_count": self.checked_count,
            "note": self.note,
            "witness": None if self.witness is None else self.witness.to_json(),
        }

    @classmethod
    def from_json(cls, data) -> "Verdict":
        w = data.get("witness")
        return cls(
            axiom=data["axiom"],
            passed=data["passed"],
            checked_count=data.get("checked_count", 0),
            witness=None if w is None else Witness.from_json(w),
            note=data.get("note", ""),
        )


def profile_to_json(p) -> dict:
    if isinstance(p, RiskProfile):
        return {"type": "risk", **p.to_json()}
    return {"type": "ordinal", **p.to_json()}


def profile_from_json(data):
    if data["type"] == "risk":
        return RiskProfile.from_json(data)
    return OrdinalProfile.from_json(data)


def _require_defined(cc: ChoiceCorrespondence, family: FeasibleFamily) -> None:
    for menu in family:
        if menu not in cc:
            raise ValidationError(f"correspondence is not defined on menu {menu}")


def _sub_pairs(family: FeasibleFamily) -> Iterator[tuple[Menu, Menu]]:
    for big in family:
        bs = set(big)
        for small in family:
            if len(small) <= len(big) and set(small) <= bs:
                yield big, small


# -- internal consistency ---------------------------------------------------


def check_alpha(cc: ChoiceCorrespondence, family: FeasibleFamily) -> Verdict:
    """Contraction consistency: chosen from F and present in G ⊆ F implies chosen from G."""
    _require_defined(cc, family)
    count = 0
    for big, small in _sub_pairs(family):
        chosen_small = set(cc[small])
        for h in cc[big]:
            if h not in small:
                continue
            count += 1
            if h not in chosen_small:
                w = Witness(
                    "alpha",
                    menus=[big, small],
                    choices=[cc[big], cc[small]],
                    note=f"{h} chosen from {list(big)} but not from sub-menu {list(small)}",
                    extra={"h": h},
                )
                return Verdict("alpha", False, count, w)
    return Verdict("alpha", True, count)


def check_beta(cc: ChoiceCorrespondence, family: FeasibleFamily) -> Verdict:
    """Expansion consistency: sharing one chosen member forces A(G) ⊆ A(F)."""
    _require_defined(cc, family)
    count = 0
    for big, small in _sub_pairs(family):
        chosen_big = set(cc[big])
        common = [h for h in cc[small] if h in chosen_big]
        if not common:
            continue
        count += 1
        missing = [g for g in cc[small] if g not in chosen_big]
        if missing:
            h, g = common[0], missing[0]
            w = Witness(
                "beta",
                menus=[big, small],
                choices=[cc[big], cc[small]],
                note=f"{h} and {g} chosen from {list(small)}, {h} chosen from {list(big)} but {g} dropped",
                extra={"h": h, "g": g},
            )
            return Verdict("beta", False, count, w)
    return Verdict("beta", True, count)


def check_internal_consistency(cc: ChoiceCorrespondence, family: FeasibleFamily) -> Verdict:
    a = check_alpha(cc, family)
    if not a.passed:
        return Verdict("internal_consistency", False, a.checked_count, a.witness, "alpha fails")
    b = check_beta(cc, family)
    total = a.checked_count + b.checked_count
    if not b.passed:
        return Verdict("internal_consistency", False, total, b.witness, "beta fails")
    return Verdict("internal_consistency", True, total)


# -- properties of aggregation rules ---------------------------------------------


def _scores(profile) -> np.ndarray:
    if isinstance(profile, RiskProfile):
        return profile.values
    return np.asarray(profile.levels, dtype=float)


def check_pareto(rule, profile, family: FeasibleFamily) -> Verdict:
    """Unanimous strict improvement forces the pair choice."""
    v = _scores(profile)
    count = 0
    for pair in family.pairs():
        a, b = pair
        for f, g in ((a, b), (b, a)):
            if not np.all(v[:, f] < v[:, g]):
                continue
            count += 1
            chosen = rule.choose(profile, pair)
            if chosen != (f,):
                w = Witness(
                    "pareto",
                    menus=[pair],
                    profiles=[profile],
                    choices=[chosen],
                    note=f"{f} beats {g} in every environment but rule chose {list(chosen)}",
                    extra={"dominant": f, "dominated": g},
                )
                return Verdict("pareto", False, count, w)
    note = "" if count else "vacuous: no unanimously dominated pair"
    return Verdict("pareto", True, count, note=note)


def _increasing_values(levels: list[int], rng: np.random.Generator) -> np.ndarray:
    """Random strictly increasing positive scores for dense levels."""
    k = max(levels) + 1
    scale = 10.0 ** rng.uniform(-2.0, 2.0)
    gaps = rng.exponential(1.0, size=k) * scale * 10.0 ** rng.uniform(-1.0, 1.0, size=k)
    points = np.cumsum(gaps + 1e-9 * scale)
    return points[np.asarray(levels)]


def rescoring_pairs(
    m: int,
    n: int,
    k: int = 100,
    seed: int = 0,
    include_ties: bool = False,
    universe=None,
) -> Iterator[tuple[RiskProfile, RiskProfile]]:
    """Pairs of numeric profiles with identical ordinal content.

    A random ordinal profile (strict unless ``include_ties``) is re-scored
    twice with independent strictly increasing value assignments per
    environment.
    """
    universe = universe or default_universe(m)
    rng = np.random.default_rng(seed)
    for _ in range(k):
        rows = []
        for _e in range(n):
            if include_ties:
                raw = rng.integers(0, m, size=m).tolist()
                distinct = sorted(set(raw))
                rows.append([distinct.index(x) for x in raw])
            else:
                rows.append(rng.permutation(m).tolist())
        p = np.array([_increasing_values(r, rng) for r in rows])
        q = np.array([_increasing_values(r, rng) for r in rows])
        yield RiskProfile(universe, p), RiskProfile(universe, q)


def menu_local_pairs(
    family: FeasibleFamily, n: int, k: int = 100, seed: int = 0
) -> Iterator[tuple[RiskProfile, RiskProfile, Menu]]:
    """Triples (p, q, H) whose rankings agree within menu H only.

    Outside H the two profiles are drawn independently, which exercises
    dependence on irrelevant hypotheses.
    """
    universe = family.universe
    m = len(universe)
    menus = [mu for mu in family if len(mu) >= 2]
    rng = np.random.default_rng(seed)
    for _ in range(k):
        menu = menus[int(rng.integers(len(menus)))]
        p = np.empty((n, m))
        q = np.empty((n, m))
        for e in range(n):
            order = rng.permutation(m).tolist()
            p[e] = _increasing_values(order, rng)
            # q keeps p's order on the menu but places outsiders at random
            other = rng.permutation(m).tolist()
            inside = sorted(menu, key=lambda h: order[h])
            slots = sorted(other[h] for h in menu)
            for h, s in zip(inside, slots):
                other[h] = s
            q[e] = _increasing_values(other, rng)
        yield RiskProfile(universe, p), RiskProfile(universe, q), menu


def _same_order_on(p, q, menu) -> bool:
    op, oq = ordinalize(p), ordinalize(q)
    for rp, rq in zip(op.levels, oq.levels):
        for f, g in itertools.permutations(menu, 2):
            if (rp[f] <= rp[g]) != (rq[f] <= rq[g]):
                return False
    return True


def check_iih(rule, family: FeasibleFamily, sampler: Iterable) -> Verdict:
    """Choices may depend only on each environment's ordering.

    ``sampler`` yields ``(p, q)`` pairs with identical ordinal content (every
    menu is checked) or ``(p, q, menu)`` triples agreeing on ``menu`` only.
    Ordinal-domain rules pass full-rescoring samplers by construction.
    """
    items = iter(sampler)
    first = next(items, None)
    if first is None:
        return Verdict("iih", True, 0, note="empty sampler")
    items = itertools.chain([first], items)
    if len(first) == 2 and rule.domain_kind == "ordinal":
        return Verdict("iih", True, 0, note="by construction: rule consumes only ordinal content")
    count = 0
    for item in items:
        p, q = item[0], item[1]
        local = len(item) == 3
        menus = [item[2]] if local else list(family)
        if not _same_order_on(p, q, item[2] if local else tuple(family.universe)):
            raise RuntimeError("sampler produced an ordinally unequal pair")
        if not (rule.accepts(p) and rule.accepts(q)):
            continue
        for menu in menus:
            count += 1
            a, b = rule.choose(p, menu), rule.choose(q, menu)
            if a != b:
                w = Witness(
                    "iih",
                    menus=[menu],
                    profiles=[p, q],
                    choices=[a, b],
                    note=f"same rankings on {list(menu)} but choices {list(a)} vs {list(b)}",
                    extra={"menu_local": local},
                )
                return Verdict("iih", False, count, w)
    return Verdict("iih", True, count)


def check_ir(
    rule,
    profile: RiskProfile,
    family: FeasibleFamily,
    k: int = 100,
    seed: int = 0,
    transforms: Iterable[AffineTransform] | None = None,
) -> Verdict:
    """Choices are invariant under per-environment positive affine maps.

    Transforms are ``transforms`` when given, else ``k`` seeded draws from
    :func:`~choiceaxioms.core.random_affine`.  Transforms that move the
    profile outside the rule's domain are skipped and counted in the note.
    """
    if rule.domain_kind == "ordinal":
        return Verdict("ir", True, 0, note="by construction: rule consumes only ordinal content")
    if k < 1 and transforms is None:
        raise ValidationError("k must be >= 1")
    if transforms is None:
        rng = np.random.default_rng(seed)
        transforms = [random_affine(profile.n, rng) for _ in range(k)]
    base = {menu: rule.choose(profile, menu) for menu in family}
    count = skipped = 0
    for t in transforms:
        q = apply_affine(profile, t)
        if not rule.accepts(q):
            skipped += 1
            continue
        for menu in family:
            count += 1
            c = rule.choose(q, menu)
            if c != base[menu]:
                w = Witness(
                    "ir",
                    menus=[menu],
                    profiles=[profile, q],
                    choices=[base[menu], c],
                    note=f"positive affine rescaling changed choice on {list(menu)}",
                    extra={"transform": t.to_json()},
                )
                return Verdict("ir", False, count, w)
    return Verdict("ir", True, count, note=f"{skipped} transforms outside rule domain" if skipped else "")


# -- decisiveness -----------------------------------------------------------------


def _env_mask(envs: Iterable[int], n: int) -> int:
    """Bit mask (most significant bit = environment 1) of 1-based indices."""
    mask = 0
    for e in envs:
        e = int(e)
        if not 1 <= e <= n:
            raise ValidationError(f"environment {e} out of range 1..{n}")
        mask |= 1 << (n - e)
    if mask == 0:
        raise ValidationError("environment set must be nonempty")
    return mask


class PairOracle:
    """Pair-menu outcomes of a rule over every strict profile of (m, n).

    Rules exposing ``pair_outcome`` (choice on a pair depends only on that
    pair's direction vector) are queried over the ``2**n`` vectors directly;
    all other rules are evaluated on every strict profile, subject to the
    enumeration guard.
    """

    def __init__(self, rule, m: int, n: int, guard: int = ENUMERATION_GUARD):
        self.rule, self.m, self.n = rule, m, n
        self.fast = hasattr(rule, "pair_outcome")
        self.records: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
        if self.fast:
            return
        total = count_strict_profiles(m, n)
        if total > guard:
            raise GuardError(f"(m!)^n = {total} strict profiles exceeds the enumeration guard {guard}")
        self.profiles = []
        pairs = list(itertools.combinations(range(m), 2))
        self.records = {pair: [] for pair in pairs}
        numeric = rule.domain_kind == "numeric"
        for idx, prof in enumerate(strict_profiles(m, n)):
            self.profiles.append(prof)
            evaluated = prof.to_risk() if numeric else prof
            for a, b in pairs:
                chosen = rule.choose(evaluated, (a, b))
                outcome = 0 if chosen == (a,) else 2 if chosen == (b,) else 1
                self.records[(a, b)].append((prof.direction_vector(a, b), outcome, idx))

    def counterexample(self, mask: int, f: int, g: int):
        """First strict configuration where all of ``mask`` rank f over g but {f} is not chosen.

        Returns ``None`` when the set is locally decisive over (f, g); else a
        tuple ``(direction_vector_for_(f,g), outcome, profile_or_None)``.
        """
        n = self.n
        full = (1 << n) - 1
        if self.fast:
            for v in range(1 << n):
                if v & mask:
                    continue
                out = self.rule.pair_outcome(f, g, v, n)
                if out != A_BETTER:
                    return v, out, None
            return None
        a, b = min(f, g), max(f, g)
        for vec, out, idx in self.records[(a, b)]:
            v = vec if f == a else vec ^ full
            if v & mask:
                continue
            rel = out if f == a else 2 - out
            if rel != A_BETTER:
                return v, rel, self.profiles[idx]
        return None

    def locally_decisive(self, mask: int, f: int, g: int) -> bool:
        return self.counterexample(mask, f, g) is None

    def globally_decisive(self, mask: int) -> bool:
        return all(
            self.locally_decisive(mask, f, g) for f, g in itertools.permutations(range(self.m), 2)
        )


def is_locally_decisive(rule, envs: Iterable[int], f: int, g: int, m: int, n: int, oracle: PairOracle | None = None) -> bool:
    """Whether ``envs`` (1-based) unanimously ranking f over g forces {f} on {f, g}."""
    if f == g:
        raise ValidationError("decisiveness needs two distinct hypotheses")
    oracle = oracle or PairOracle(rule, m, n)
    return oracle.locally_decisive(_env_mask(envs, n), f, g)


def is_globally_decisive(rule, envs: Iterable[int], m: int, n: int, oracle: PairOracle | None = None) -> bool:
    oracle = oracle or PairOracle(rule, m, n)
    return oracle.globally_decisive(_env_mask(envs, n))


def find_dictator(rule, m: int, n: int, oracle: PairOracle | None = None) -> int | None:
    """The 1-based environment whose strict pairwise ranking always dictates, if any."""
    oracle = oracle or PairOracle(rule, m, n)
    if m < 2:
        return 1
    for i in range(1, n + 1):
        if oracle.globally_decisive(1 << (n - i)):
            return i
    return None


def check_ci(rule, m: int, n: int, oracle: PairOracle | None = None) -> Verdict:
    """Non-dictatorship on the strict ordinal quotient."""
    oracle = oracle or PairOracle(rule, m, n)
    d = find_dictator(rule, m, n, oracle)
    checked = count_strict_profiles(m, n) if not oracle.fast else 2**n
    if d is None:
        return Verdict("ci", True, checked)
    w = Witness("ci", note=f"environment {d} is a dictator", extra={"dictator": d, "m": m, "n": n})
    return Verdict("ci", False, checked, w)


def decisive_sets(rule, m: int, n: int, oracle: PairOracle | None = None) -> list[tuple[int, ...]]:
    """All globally decisive environment sets, by size then lexicographically."""
    oracle = oracle or PairOracle(rule, m, n)
    out = []
    for size in range(1, n + 1):
        for envs in itertools.combinations(range(1, n + 1), size):
            if oracle.globally_decisive(_env_mask(envs, n)):
                out.append(envs)
    return out


# -- witness replay ---------------------------------------------------------------


def replay(verdict: Verdict, rule=None) -> bool:
    """Re-run the violated predicate on exactly the witness data.

    Returns True iff the failure reproduces.
    """
    w = verdict.witness
    if verdict.passed or w is None:
        raise ValidationError("only failed verdicts carry a witness to replay")
    kind = w.kind
    if kind in ("alpha", "beta"):
        big, small = w.menus
        menus = {big, small} | {(h,) for h in big}
        universe = default_universe(max(big) + 1)
        fam = FeasibleFamily(universe, tuple(menus), require_small=False)
        choices = {(h,): (h,) for h in big}
        choices[big], choices[small] = w.choices[0], w.choices[1]
        cc = ChoiceCorrespondence(fam, choices)
        check = check_alpha if kind == "alpha" else check_beta
        return not check(cc, fam).passed
    if kind == "pareto":
        (pair,) = w.menus
        (profile,) = w.profiles
        fam = FeasibleFamily(profile.universe, (pair,), require_small=False)
        return not check_pareto(rule, profile, fam).passed
    if kind == "iih":
        (menu,) = w.menus
        p, q = w.profiles
        fam = FeasibleFamily(p.universe, (menu,), require_small=False)
        return not check_iih(rule, fam, [(p, q, menu)]).passed
    if kind == "ir":
        (menu,) = w.menus
        p = w.profiles[0]
        t = AffineTransform(tuple(w.extra["transform"]["offsets"]), tuple(w.extra["transform"]["scales"]))
        fam = FeasibleFamily(p.universe, (menu,), require_small=False)
        return not check_ir(rule, p, fam, transforms=[t]).passed
    if kind == "ci":
        d, m, n = w.extra["dictator"], w.extra["m"], w.extra["n"]
        return is_globally_decisive(rule, [d], m, n)
    if kind in ("complete", "transitive", "roundtrip"):
        from .revealed import replay_revealed

        return replay_revealed(w)
    raise ValidationError(f"no replay for witness kind {kind!r}")
