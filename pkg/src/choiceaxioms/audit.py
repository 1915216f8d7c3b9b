"""One-shot axiom audit of an aggregation rule, plus the zoo's audit table."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .axioms import (
    PairOracle,
    Verdict,
    check_alpha,
    check_beta,
    check_ci,
    check_iih,
    check_ir,
    check_pareto,
    decisive_sets,
    menu_local_pairs,
    rescoring_pairs,
)
from .core import RiskProfile, count_strict_profiles, default_universe, enumerate_menus, ordinalize, strict_profiles
from .exceptions import NotInDomainError, ValidationError
from .rules import make_rule

FULL_ENUMERATION_LIMIT = 5000
IR_PROFILES = 10
AXIOM_ORDER = ("alpha", "beta", "pareto", "iih", "iih_menu_local", "iih_ties", "ir", "ci")


@dataclass
class AxiomReport:
    rule: dict
    m: int
    n: int
    seed: int
    samples: int
    include_ties: bool
    verdicts: dict[str, Verdict]
    dictator: int | None
    decisive_sets: list[tuple[int, ...]]
    profiles_checked: int = 0
    notes: list[str] = field(default_factory=list)

    def passed(self, axiom: str) -> bool:
        return self.verdicts[axiom].passed

    def summary(self) -> dict:
        out = {a: ("pass" if v.passed else "fail") for a, v in self.verdicts.items()}
        out["dictator"] = self.dictator
        return out

    def to_json(self) -> dict:
        domain = {"m": self.m, "n": self.n}
        verdicts = []
        for v in self.verdicts.values():
            entry = v.to_json()
            entry.update(rule=self.rule, seed=self.seed, domain=domain)
            verdicts.append(entry)
        return {
            "rule": self.rule,
            "domain": domain,
            "seed": self.seed,
            "samples": self.samples,
            "include_ties": self.include_ties,
            "profiles_checked": self.profiles_checked,
            "verdicts": verdicts,
            "dictator": self.dictator,
            "decisive_sets": [list(s) for s in self.decisive_sets],
            "notes": list(self.notes),
        }


def _random_profiles(rule, m: int, n: int, count: int, rng: np.random.Generator, universe):
    for _ in range(count):
        if rule.domain_kind == "ordinal":
            levels = np.array([rng.permutation(m) for _ in range(n)])
            yield RiskProfile(universe, levels + 1.0)
        else:
            # offset keeps every risk strictly positive for product-type rules
            yield RiskProfile(universe, 0.01 + rng.random((n, m)))


def audit_profiles(rule, m: int, n: int, seed: int = 0, samples: int = 50, profile=None) -> list:
    """Profiles examined by :func:`audit`, in a fixed order.

    An optional supplied profile comes first, then ``samples`` seeded random
    profiles, then every strict rank-scored profile when there are at most
    5000 of them.
    """
    universe = default_universe(m) if profile is None else profile.universe
    out = []
    if profile is not None:
        if (profile.m, profile.n) != (m, n):
            raise ValidationError(f"profile is {profile.n}x{profile.m}, audit domain is n={n}, m={m}")
        out.append(profile)
    rng = np.random.default_rng(seed)
    out.extend(_random_profiles(rule, m, n, samples, rng, universe))
    if count_strict_profiles(m, n) <= FULL_ENUMERATION_LIMIT:
        out.extend(p.to_risk() for p in strict_profiles(m, n, universe))
    return out


def _accepted(rule, p) -> bool:
    return rule.accepts(p if rule.domain_kind == "numeric" else ordinalize(p))


def _consistency(check, name, rule, profiles, family) -> Verdict:
    total = 0
    skipped = 0
    for p in profiles:
        if not _accepted(rule, p):
            skipped += 1
            continue
        try:
            cc = rule.correspondence(p, family)
        except NotInDomainError:
            skipped += 1
            continue
        v = check(cc, family)
        total += v.checked_count
        if not v.passed:
            v.witness.profiles = [p]
            return Verdict(name, False, total, v.witness)
    return Verdict(name, True, total, note=f"{skipped} profiles outside rule domain" if skipped else "")


def _pareto(rule, profiles, family) -> Verdict:
    total = 0
    for p in profiles:
        if not _accepted(rule, p):
            continue
        v = check_pareto(rule, p, family)
        total += v.checked_count
        if not v.passed:
            return Verdict("pareto", False, total, v.witness)
    return Verdict("pareto", True, total)


def _ir(rule, profiles, family, seed: int) -> Verdict:
    total = 0
    used = [p for p in profiles if _accepted(rule, p)][:IR_PROFILES]
    for k, p in enumerate(used):
        v = check_ir(rule, p, family, k=100, seed=seed + k)
        total += v.checked_count
        if not v.passed:
            return Verdict("ir", False, total, v.witness)
        if rule.domain_kind == "ordinal":
            return v
    return Verdict("ir", True, total)


def _renamed(v: Verdict, name: str) -> Verdict:
    return Verdict(name, v.passed, v.checked_count, v.witness, v.note)


def audit(rule, m: int = 3, n: int = 2, seed: int = 0, samples: int = 50, include_ties: bool = False,
          profile: RiskProfile | None = None) -> AxiomReport:
    """Run every axiom check on ``rule`` over the (m, n) domain.

    Internal consistency and Pareto are checked on every audit profile;
    IIH on ``samples`` full re-scorings plus ``samples`` menu-local
    re-scorings (and tied re-scorings with ``include_ties``); IR on the
    first ten profiles with 100 random affine maps each; CI on the strict
    ordinal quotient by exhaustive enumeration.
    """
    if m < 2 or n < 1:
        raise ValidationError(f"need m >= 2 and n >= 1, got m={m}, n={n}")
    if samples < 0:
        raise ValidationError("samples must be >= 0")
    universe = default_universe(m) if profile is None else profile.universe
    family = enumerate_menus(universe)
    profiles = audit_profiles(rule, m, n, seed, samples, profile)

    verdicts = {
        "alpha": _consistency(check_alpha, "alpha", rule, profiles, family),
        "beta": _consistency(check_beta, "beta", rule, profiles, family),
        "pareto": _pareto(rule, profiles, family),
        "iih": check_iih(rule, family, rescoring_pairs(m, n, samples, seed, universe=universe)),
        "iih_menu_local": _renamed(
            check_iih(rule, family, menu_local_pairs(family, n, samples, seed)), "iih_menu_local"
        ),
    }
    if include_ties:
        pairs = rescoring_pairs(m, n, samples, seed, include_ties=True, universe=universe)
        verdicts["iih_ties"] = _renamed(check_iih(rule, family, pairs), "iih_ties")
    verdicts["ir"] = _ir(rule, profiles, family, seed)
    oracle = PairOracle(rule, m, n)
    verdicts["ci"] = check_ci(rule, m, n, oracle)
    dictator = verdicts["ci"].witness.extra["dictator"] if not verdicts["ci"].passed else None
    return AxiomReport(
        rule=rule.describe(),
        m=m,
        n=n,
        seed=seed,
        samples=samples,
        include_ties=include_ties,
        verdicts=verdicts,
        dictator=dictator,
        decisive_sets=decisive_sets(rule, m, n, oracle),
        profiles_checked=len(profiles),
    )


# -- zoo audit table ----------------------------------------------------------------


def zoo_instances(n: int) -> list[tuple[str, object]]:
    """Labelled zoo rules for an audit at ``n`` environments."""
    out = [(f"erm_single({i})", make_rule("erm_single", env_index=i)) for i in range(1, n + 1)]
    out += [
        ("pooled_erm", make_rule("risk_min")),
        (f"weighted_sum({','.join(['1/' + str(n)] * n)})", make_rule("weighted_sum", weights=[1.0 / n] * n)),
        ("leximin", make_rule("leximin")),
        ("pareto_front", make_rule("pareto_front")),
        ("borda", make_rule("borda")),
        ("nash_product", make_rule("nash_product")),
    ]
    return out


def audit_table(ns=(2, 3), m: int = 3, seed: int = 0, samples: int = 50) -> dict:
    """Machine-generated axiom table for the zoo; deterministic for fixed arguments."""
    rows = []
    for n in ns:
        for label, rule in zoo_instances(n):
            report = audit(rule, m, n, seed=seed, samples=samples)
            rows.append({"rule": label, "n": n, **report.summary(), "report": report.to_json()})
    return {"m": m, "environments": list(ns), "seed": seed, "samples": samples, "rows": rows}


def table_markdown(table: dict) -> str:
    cols = ["alpha", "beta", "pareto", "iih", "iih_menu_local", "ir", "ci"]
    lines = [
        f"Zoo audit (m={table['m']}, seed={table['seed']}, samples={table['samples']}). "
        "Generated by `choiceaxioms table`; do not edit by hand.",
        "",
        "| rule | n | " + " | ".join(cols) + " | dictator |",
        "|---" * (len(cols) + 3) + "|",
    ]
    for row in table["rows"]:
        cells = [row[c] for c in cols]
        dictator = "-" if row["dictator"] is None else str(row["dictator"])
        lines.append(f"| {row['rule']} | {row['n']} | " + " | ".join(cells) + f" | {dictator} |")
    return "\n".join(lines) + "\n"


def dumps_table(table: dict) -> str:
    return json.dumps(table, indent=2, sort_keys=True)
