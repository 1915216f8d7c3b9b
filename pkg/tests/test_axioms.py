import itertools
import json

import numpy as np
import pytest
from hypothesis import given

from choiceaxioms.axioms import (
    ENUMERATION_GUARD,
    PairOracle,
    Verdict,
    check_alpha,
    check_beta,
    check_ci,
    check_iih,
    check_internal_consistency,
    check_ir,
    check_pareto,
    decisive_sets,
    find_dictator,
    is_locally_decisive,
    menu_local_pairs,
    replay,
    rescoring_pairs,
)
from choiceaxioms.core import (
    AffineTransform,
    ChoiceCorrespondence,
    FeasibleFamily,
    default_universe,
    enumerate_menus,
    make_profile,
    monotone_catalogue,
    ordinalize,
)
from choiceaxioms.exceptions import GuardError, ValidationError
from choiceaxioms.revealed import rationalize
from choiceaxioms.rules import PairwiseRule, borda, erm_single, make_rule, pareto_front, risk_min, weighted_sum

from strategies import risk_profiles

ZOO_AT_3 = [
    erm_single(1), erm_single(2), erm_single(3), risk_min(None), weighted_sum([1, 1, 1]),
    make_rule("leximin"), pareto_front(), borda(), make_rule("nash_product"),
]


def cc_from(fam, overrides):
    """Correspondence choosing the whole menu except where overridden."""
    choices = {m: m for m in fam}
    choices.update(overrides)
    return ChoiceCorrespondence(fam, choices)


class TestAlpha:
    def test_linear_order_passes(self, fam3):
        cc = rationalize([0, 1, 2], fam3)
        v = check_alpha(cc, fam3)
        assert v.passed and v.checked_count > 0

    def test_contraction_failure_witness(self, fam3):
        cc = cc_from(fam3, {(0, 1, 2): (0,), (0, 1): (1,)})
        v = check_alpha(cc, fam3)
        assert not v.passed
        assert v.witness.menus == [(0, 1, 2), (0, 1)] and v.witness.extra["h"] == 0
        assert replay(v)

    def test_singletons_only(self, u3):
        fam = FeasibleFamily(u3, ((0,), (1,), (2,)), require_small=False)
        cc = ChoiceCorrespondence(fam, {m: m for m in fam})
        assert check_alpha(cc, fam).passed and check_beta(cc, fam).passed

    def test_missing_menu_named(self, fam3, u3):
        small = FeasibleFamily(u3, ((0,), (1,)), require_small=False)
        cc = ChoiceCorrespondence(small, {(0,): (0,), (1,): (1,)})
        with pytest.raises(ValidationError, match=r"menu \(2,\)"):
            check_alpha(cc, fam3)


class TestBeta:
    def test_pareto_front_expansion_failure(self, fam3):
        p = make_profile([[0, 1, 0.5], [1, 0.3, 0.2]])
        cc = pareto_front().correspondence(p, fam3)
        assert cc[(0, 1)] == (0, 1) and cc[(0, 1, 2)] == (0, 2)
        v = check_beta(cc, fam3)
        assert not v.passed
        assert v.witness.menus == [(0, 1, 2), (0, 1)]
        assert v.witness.extra == {"h": 0, "g": 1}
        assert replay(v)

    def test_weak_order_passes(self, fam3):
        assert check_beta(rationalize([0, 0, 1], fam3), fam3).passed

    def test_internal_consistency_reports_failing_part(self, fam3):
        p = make_profile([[0, 1, 0.5], [1, 0.3, 0.2]])
        v = check_internal_consistency(pareto_front().correspondence(p, fam3), fam3)
        assert not v.passed and v.witness.kind == "beta"

    def test_single_hypothesis_universe(self):
        u = default_universe(1)
        fam = enumerate_menus(u)
        cc = ChoiceCorrespondence(fam, {(0,): (0,)})
        assert check_internal_consistency(cc, fam).passed

    @given(risk_profiles())
    def test_risk_minimizers_are_consistent(self, p):
        fam = enumerate_menus(p.universe)
        for rule in (erm_single(1), risk_min(None)):
            assert check_internal_consistency(rule.correspondence(p, fam), fam).passed


class TestPareto:
    def test_dominated_pair_chosen(self):
        p = make_profile([[0.1, 0.2], [0.2, 0.3]])
        fam = enumerate_menus(p.universe)
        v = check_pareto(weighted_sum([1, 1]), p, fam)
        assert v.passed and v.checked_count == 1

    def test_wrong_choice_fails(self):
        p = make_profile([[0.1, 0.2], [0.2, 0.3]])
        fam = enumerate_menus(p.universe)
        v = check_pareto(risk_min([2.0, 1.0]), p, fam)
        assert not v.passed and v.witness.extra == {"dominant": 0, "dominated": 1}
        assert replay(v, risk_min([2.0, 1.0]))

    def test_no_dominated_pair_is_vacuous(self):
        p = make_profile([[0.1, 0.2], [0.3, 0.2]])
        fam = enumerate_menus(p.universe)
        v = check_pareto(risk_min([2.0, 1.0]), p, fam)
        assert v.passed and v.checked_count == 0 and "vacuous" in v.note

    @given(risk_profiles(m=3))
    def test_antichain_profiles_pass_vacuously(self, p):
        # reflect env 1 so that env 1 and its mirror disagree on every pair
        values = np.vstack([p.values[:1], -p.values[:1]])
        if len(set(values[0].tolist())) < 3:
            return
        q = make_profile(values)
        fam = enumerate_menus(q.universe)
        for rule in ZOO_AT_3[:1] + [risk_min([3.0, 2.0, 1.0]), pareto_front()]:
            assert check_pareto(rule, q, fam).passed


class TestIIH:
    def test_weighted_sum_foil(self):
        p = make_profile([[0, 1], [3, 0]])
        q = make_profile([[0, 1], [0.5, 0]])
        fam = enumerate_menus(p.universe)
        assert ordinalize(p) == ordinalize(q)
        rule = weighted_sum([0.5, 0.5])
        assert rule.choose(p, (0, 1)) == (1,) and rule.choose(q, (0, 1)) == (0,)
        v = check_iih(rule, fam, [(p, q)])
        assert not v.passed and v.witness.choices == [(1,), (0,)]
        assert replay(v, rule)

    @pytest.mark.parametrize("i", [1, 2, 3])
    def test_erm_single_passes(self, i):
        fam = enumerate_menus(default_universe(3))
        v = check_iih(erm_single(i), fam, rescoring_pairs(3, 3, 100, seed=i))
        assert v.passed and v.checked_count == 700

    def test_ordinal_rule_by_construction(self, fam3):
        v = check_iih(borda(), fam3, rescoring_pairs(3, 2, 10))
        assert v.passed and v.checked_count == 0 and "by construction" in v.note

    def test_unequal_pair_is_an_internal_error(self, fam3):
        p = make_profile([[0, 1, 2]])
        q = make_profile([[1, 0, 2]])
        with pytest.raises(RuntimeError):
            check_iih(erm_single(1), fam3, [(p, q)])

    def test_samplers_produce_ordinally_equal_pairs(self, fam3):
        for p, q in rescoring_pairs(3, 2, 50, include_ties=True):
            assert ordinalize(p) == ordinalize(q)
        for p, q, menu in menu_local_pairs(fam3, 2, 50):
            op, oq = ordinalize(p), ordinalize(q)
            for e in range(2):
                for f, g in itertools.combinations(menu, 2):
                    assert op.prefers(e, f, g) == oq.prefers(e, f, g)

    def test_menu_local_catches_weighted_sum(self, fam3):
        v = check_iih(weighted_sum([1, 1]), fam3, menu_local_pairs(fam3, 2, 100))
        assert not v.passed and v.witness.extra["menu_local"]


class TestIR:
    def test_erm_single_passes(self):
        p = make_profile(np.random.default_rng(0).random((3, 3)))
        v = check_ir(erm_single(1), p, enumerate_menus(p.universe), k=100)
        assert v.passed and v.checked_count == 700

    def test_weighted_sum_scaling_flip(self):
        p = make_profile([[0, 1], [3, 0]])
        fam = enumerate_menus(p.universe)
        t = AffineTransform((0.0, 0.0), (1.0, 0.1))
        v = check_ir(weighted_sum([0.5, 0.5]), p, fam, transforms=[t])
        assert not v.passed and v.witness.choices == [(1,), (0,)]
        assert replay(v, weighted_sum([0.5, 0.5]))

    def test_identity_only(self):
        p = make_profile([[0, 1], [3, 0]])
        v = check_ir(weighted_sum([0.5, 0.5]), p, enumerate_menus(p.universe), transforms=[AffineTransform.identity(2)])
        assert v.passed

    def test_k_must_be_positive(self):
        p = make_profile([[0, 1]])
        with pytest.raises(ValidationError):
            check_ir(erm_single(1), p, enumerate_menus(p.universe), k=0)

    def test_out_of_domain_transforms_skipped(self):
        p = make_profile([[1.0, 2.0], [2.0, 1.0]])
        v = check_ir(make_rule("nash_product"), p, enumerate_menus(p.universe),
                     transforms=[AffineTransform((-5.0, 0.0), (1.0, 1.0))])
        assert v.passed and "1 transforms outside" in v.note

    @pytest.mark.parametrize("c", monotone_catalogue(), ids=lambda c: f"{c.kind}{c.params}")
    def test_monotone_invariance_of_risk_minimizer(self, c):
        rng = np.random.default_rng(1)
        fam = enumerate_menus(default_universe(4))
        for _ in range(20):
            r = rng.random(4)
            a, b = risk_min(r), risk_min(c(r))
            for menu in fam:
                assert a.choose(make_profile([[0] * 4]), menu) == b.choose(make_profile([[0] * 4]), menu)


class TestDecisiveness:
    def test_erm_dictator(self):
        assert find_dictator(erm_single(2), 3, 3) == 2

    def test_borda_has_no_dictator(self):
        assert find_dictator(borda(), 3, 3) is None

    def test_single_environment(self):
        assert find_dictator(weighted_sum([1.0]), 3, 1) == 1
        assert decisive_sets(weighted_sum([1.0]), 3, 1) == [(1,)]

    def test_grand_set_decisive_for_po_rules(self):
        for rule in (weighted_sum([1, 1, 1]), borda(), erm_single(2)):
            for f, g in itertools.permutations(range(3), 2):
                assert is_locally_decisive(rule, [1, 2, 3], f, g, 3, 3)

    def test_singletons_under_erm(self):
        assert is_locally_decisive(erm_single(2), [2], 0, 1, 3, 3)
        assert not is_locally_decisive(erm_single(2), [1], 0, 1, 3, 3)

    def test_erm_decisive_sets_contain_dictator(self):
        sets = decisive_sets(erm_single(1), 3, 3)
        assert sets == [(1,), (1, 2), (1, 3), (1, 2, 3)]

    def test_canonical_order(self):
        sets = decisive_sets(borda(), 3, 3)
        assert sets == sorted(sets, key=lambda s: (len(s), s))

    def test_guard(self):
        with pytest.raises(GuardError):
            find_dictator(weighted_sum([1] * 6), 4, 6)
        assert 24**5 < ENUMERATION_GUARD < 24**6

    def test_bad_envs(self):
        with pytest.raises(ValidationError):
            is_locally_decisive(erm_single(1), [], 0, 1, 3, 2)
        with pytest.raises(ValidationError):
            is_locally_decisive(erm_single(1), [3], 0, 1, 3, 2)
        with pytest.raises(ValidationError):
            is_locally_decisive(erm_single(1), [1], 0, 0, 3, 2)

    @pytest.mark.parametrize("rule", ZOO_AT_3, ids=lambda r: r.name)
    def test_supersets_of_decisive_sets_are_decisive(self, rule):
        oracle = PairOracle(rule, 3, 3)
        sets = set(decisive_sets(rule, 3, 3, oracle))
        for s in sets:
            for extra in range(1, 4):
                sup = tuple(sorted(set(s) | {extra}))
                assert sup in sets

    @pytest.mark.parametrize("rule", ZOO_AT_3, ids=lambda r: r.name)
    def test_dictator_iff_locally_decisive_everywhere(self, rule):
        oracle = PairOracle(rule, 3, 3)
        d = find_dictator(rule, 3, 3, oracle)
        dictating = [
            i for i in (1, 2, 3)
            if all(is_locally_decisive(rule, [i], f, g, 3, 3, oracle) for f, g in itertools.permutations(range(3), 2))
        ]
        assert d == (dictating[0] if dictating else None)

    def test_fast_path_agrees_with_enumeration(self):
        rule = PairwiseRule.dictatorship(3, 3, 2)
        fast = PairOracle(rule, 3, 3)

        class Slow(PairwiseRule):
            pair_outcome = property(lambda self: (_ for _ in ()).throw(AttributeError))

        slow_rule = Slow(rule.tables, 3)
        slow = PairOracle(slow_rule, 3, 3)
        assert fast.fast and not slow.fast
        for mask in range(1, 8):
            assert fast.globally_decisive(mask) == slow.globally_decisive(mask)

    def test_ci_verdict_and_replay(self):
        v = check_ci(erm_single(3), 3, 3)
        assert not v.passed and v.witness.extra["dictator"] == 3
        assert replay(v, erm_single(3))
        assert check_ci(borda(), 3, 3).passed


class TestVerdictSerialization:
    def test_failed_verdict_requires_witness(self):
        with pytest.raises(ValidationError):
            Verdict("alpha", False)

    def test_roundtrip_with_profiles(self):
        p = make_profile([[0, 1], [3, 0]])
        q = make_profile([[0, 1], [0.5, 0]])
        v = check_iih(weighted_sum([0.5, 0.5]), enumerate_menus(p.universe), [(p, q)])
        back = Verdict.from_json(json.loads(json.dumps(v.to_json())))
        assert back.witness.profiles == [p, q]
        assert replay(back, weighted_sum([0.5, 0.5]))

    def test_replay_rejects_passed(self, fam3):
        with pytest.raises(ValidationError):
            replay(check_alpha(rationalize([0, 1, 2], fam3), fam3))
