import copy
import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from choiceaxioms.core import enumerate_menus, make_profile, monotone_catalogue
from choiceaxioms.exceptions import ValidationError
from choiceaxioms.risk import (
    LossSpec,
    RegularizerSpec,
    SyntheticDataset,
    TabularHypothesis,
    build_profile_block,
    build_profile_multisource,
    build_profile_per_example,
    empirical_risk,
    loss_eval,
    profile_from_spec,
    synth_generate,
)
from choiceaxioms.rules import erm_single, risk_min, weighted_sum

SQUARE = LossSpec("square")
HINGE = LossSpec("hinge")


def linear_spec(n_envs=2, **over):
    env = {"kind": "linear_gaussian", "n_samples": 30, "dim": 2, "weights": [1.0, -2.0], "noise": 0.5}
    env.update(over)
    return {"environments": [dict(env, seed=i) for i in range(n_envs)]}


def hyps(k=3, dim=2, seed=0):
    rng = np.random.default_rng(seed)
    return [TabularHypothesis(f"h{j}", weights=rng.normal(size=dim).tolist(), bias=float(rng.normal()),
                              norm=float(rng.uniform(0, 2))) for j in range(k)]


class TestLoss:
    def test_square(self):
        assert loss_eval(SQUARE, 2.0, 3.0) == 1.0

    def test_hinge(self):
        assert loss_eval(HINGE, 0.5, 1) == 0.5
        assert loss_eval(HINGE, 2.0, 1) == 0.0
        assert loss_eval(HINGE, 0.5, -1) == 1.5

    def test_hinge_labels(self):
        with pytest.raises(ValidationError):
            loss_eval(HINGE, 0.5, 0)

    def test_absolute(self):
        assert loss_eval(LossSpec("absolute"), -1.0, 2.0) == 3.0

    def test_cross_entropy_one_hot(self):
        ce = LossSpec("cross_entropy", 3)
        assert loss_eval(ce, [0.0, 1.0, 0.0], 1) == 0.0
        assert loss_eval(ce, [0.5, 0.25, 0.25], 0) == pytest.approx(math.log(2))
        assert loss_eval(ce, [0.5, 0.25, 0.25], [0.0, 0.0, 1.0]) == pytest.approx(math.log(4))

    def test_cross_entropy_normalization(self):
        ce = LossSpec("cross_entropy")
        loss_eval(ce, [0.5, 0.5 + 5e-10], 0)
        with pytest.raises(ValidationError):
            loss_eval(ce, [0.5, 0.5 + 1e-8], 0)
        with pytest.raises(ValidationError):
            loss_eval(ce, [1.2, -0.2], 0)
        with pytest.raises(ValidationError):
            loss_eval(ce, [0.5, 0.5], 2)
        with pytest.raises(ValidationError):
            loss_eval(ce, [1.0, 0.0], 1)

    def test_unknown_loss(self):
        with pytest.raises(ValidationError):
            LossSpec("logcosh")

    @given(st.floats(-100, 100), st.floats(-100, 100))
    def test_nonnegative(self, pred, y):
        assert loss_eval(SQUARE, pred, y) >= 0 and loss_eval(LossSpec("absolute"), pred, y) >= 0
        assert loss_eval(HINGE, pred, 1.0 if y >= 0 else -1.0) >= 0


class TestRegularizer:
    def test_negative_strength(self):
        with pytest.raises(ValidationError):
            RegularizerSpec("identity", -0.1)

    def test_penalties(self):
        assert RegularizerSpec("identity", 0.5).penalty(2.0) == 1.0
        assert RegularizerSpec("square", 0.5).penalty(2.0) == 2.0

    @given(st.floats(0, 50), st.floats(0, 50), st.sampled_from(["identity", "square"]))
    def test_nondecreasing(self, a, b, omega):
        reg = RegularizerSpec(omega, 1.0)
        lo, hi = sorted((a, b))
        assert reg.penalty(lo) <= reg.penalty(hi)


class TestEmpiricalRisk:
    def setup_method(self):
        # predictions 0 on both inputs; labels 1 and sqrt(3) give square losses 1 and 3
        self.d = SyntheticDataset([[0.0], [1.0]], [1.0, math.sqrt(3.0)])
        self.h = TabularHypothesis("zero", weights=[0.0], bias=0.0, norm=2.0)

    def test_mean(self):
        assert empirical_risk(self.h, self.d, SQUARE) == pytest.approx(2.0)

    def test_regularized(self):
        assert empirical_risk(self.h, self.d, SQUARE, RegularizerSpec("identity", 0.5)) == pytest.approx(3.0)

    def test_empty_dataset(self):
        with pytest.raises(ValidationError):
            SyntheticDataset(np.zeros((0, 1)), [])

    def test_table_hypothesis(self):
        h = TabularHypothesis("t", kind="table", table={(0.0,): 1.0, (1.0,): 0.0})
        assert empirical_risk(h, self.d, SQUARE) == pytest.approx((0 + 3) / 2)

    def test_table_must_cover_inputs(self):
        h = TabularHypothesis("t", kind="table", table={(0.0,): 1.0})
        with pytest.raises(ValidationError, match="not defined"):
            empirical_risk(h, self.d, SQUARE)

    def test_softmax_output_feeds_cross_entropy(self):
        d = SyntheticDataset([[1.0], [-1.0]], [1, 0], "class")
        h = TabularHypothesis("lin", weights=[[-1.0], [1.0]], bias=[0.0, 0.0], output="softmax")
        expected = -math.log(math.exp(1) / (math.exp(1) + math.exp(-1)))
        assert empirical_risk(h, d, LossSpec("cross_entropy", 2)) == pytest.approx(expected, rel=1e-12)


def oracle_cell(h, d, loss_kind, lam=0.0, omega="identity"):
    """Independent single-loop recomputation of one profile cell (affine hypotheses, scalar losses)."""
    total = 0.0
    for k in range(len(d.y)):
        pred = float(h.bias)
        for j in range(len(h.weights)):
            pred += h.weights[j] * d.X[k][j]
        y = d.y[k]
        if loss_kind == "square":
            total += (y - pred) * (y - pred)
        elif loss_kind == "absolute":
            total += abs(y - pred)
        else:
            total += max(0.0, 1.0 - y * pred)
    pen = h.norm if omega == "identity" else h.norm * h.norm
    return total / len(d.y) + lam * pen


class TestProfiles:
    def test_single_cell(self):
        envs = synth_generate(linear_spec(1), seed=3)
        h = hyps(1)
        p = build_profile_multisource(h, envs, SQUARE)
        assert p.values.shape == (1, 1)
        assert p.values[0, 0] == empirical_risk(h[0], envs[0], SQUARE)

    def test_cells_match_oracle(self):
        envs = synth_generate(
            {"environments": [
                {"kind": "label_flip", "n_samples": 40, "dim": 2, "weights": [1, 1], "flip_rate": 0.0, "seed": 1},
                {"kind": "label_flip", "n_samples": 40, "dim": 2, "weights": [1, 1], "flip_rate": 0.3, "seed": 2},
            ]}, seed=0)
        hs = hyps(3)
        reg = RegularizerSpec("square", 0.1)
        p = build_profile_multisource(hs, envs, HINGE, reg)
        assert p.values.shape == (2, 3)
        for i, j in itertools.product(range(2), range(3)):
            assert p.values[i, j] == pytest.approx(oracle_cell(hs[j], envs[i], "hinge", 0.1, "square"), rel=1e-12)

    def test_per_example_profile(self):
        d = synth_generate(linear_spec(1, n_samples=5), seed=1)[0]
        hs = hyps(2)
        p = build_profile_per_example(hs, d, SQUARE)
        assert p.values.shape == (5, 2)
        for k in range(5):
            for j in range(2):
                assert p.values[k, j] == pytest.approx(loss_eval(SQUARE, hs[j].predict(d.X[k]), d.y[k]))

    def test_duplicate_names(self):
        envs = synth_generate(linear_spec(1), seed=0)
        h = hyps(1)[0]
        with pytest.raises(ValidationError):
            build_profile_multisource([h, h], envs, SQUARE)


class TestBlock:
    def setup_method(self):
        self.envs = synth_generate(linear_spec(2), seed=11)
        self.h = hyps(2)

    def test_row_depends_on_own_component(self):
        a, b = self.h
        p = build_profile_block([(a, a), (a, b)], self.envs, SQUARE)
        assert p.values[0, 0] == p.values[0, 1] == empirical_risk(a, self.envs[0], SQUARE)

    def test_swap_other_component(self):
        a, b = self.h
        p = build_profile_block([(a, b), (a, a)], self.envs, SQUARE)
        q = build_profile_block([(a, a), (a, b)], self.envs, SQUARE)
        np.testing.assert_array_equal(p.values[0], q.values[0])

    def test_full_grid(self):
        tuples = list(itertools.product(self.h, repeat=2))
        p = build_profile_block(tuples, self.envs, SQUARE)
        assert p.values.shape == (2, 4)
        for i in range(2):
            for j, t in enumerate(tuples):
                assert p.values[i, j] == pytest.approx(oracle_cell(t[i], self.envs[i], "square"), rel=1e-12)

    def test_tuple_length(self):
        with pytest.raises(ValidationError):
            build_profile_block([(self.h[0],)], self.envs, SQUARE)

    def test_locality_exhaustive(self):
        hs = hyps(3, seed=5)
        envs = synth_generate(linear_spec(3), seed=2)
        tuples = list(itertools.product(hs, repeat=3))
        p = build_profile_block(tuples, envs, SQUARE)
        col = {tuple(h.name for h in t): j for j, t in enumerate(tuples)}
        for t in tuples:
            for i in range(3):
                for other in itertools.product(hs, repeat=3):
                    if other[i] is t[i]:
                        j1, j2 = col[tuple(h.name for h in t)], col[tuple(h.name for h in other)]
                        assert p.values[i, j1] == p.values[i, j2]


class TestGenerator:
    def test_identical_entries_identical_data(self):
        spec = {"environments": [dict(linear_spec(1)["environments"][0])] * 2}
        a, b = synth_generate(spec, seed=5)
        assert a == b

    def test_bit_identical_regeneration(self):
        spec = linear_spec(3)
        a = synth_generate(spec, seed=9)
        b = synth_generate(copy.deepcopy(spec), seed=9)
        for x, y in zip(a, b):
            assert x.X.tobytes() == y.X.tobytes() and x.y.tobytes() == y.y.tobytes()

    def test_seed_changes_examples(self):
        a = synth_generate(linear_spec(1), seed=1)[0]
        b = synth_generate(linear_spec(1), seed=2)[0]
        assert a.X.shape == b.X.shape and not np.array_equal(a.X, b.X)

    def test_flip_rate_raises_risk_of_true_hypothesis(self):
        base = {"kind": "label_flip", "n_samples": 2000, "dim": 2, "weights": [1.0, -1.0], "seed": 4}
        clean, noisy = synth_generate({"environments": [dict(base, flip_rate=0.0), dict(base, flip_rate=0.4)]}, 0)
        truth = TabularHypothesis("truth", weights=[1.0, -1.0])
        absolute = LossSpec("absolute")
        # sign predictions against +-1 labels: absolute loss is 2 per error
        sign = TabularHypothesis("sign", kind="table", table={tuple(x): float(np.sign(x @ [1.0, -1.0]) or 1.0)
                                                             for x in np.vstack([clean.X, noisy.X])})
        assert empirical_risk(sign, clean, absolute) == 0.0
        assert empirical_risk(sign, noisy, absolute) > 0.5
        assert empirical_risk(truth, clean, HINGE) < empirical_risk(truth, noisy, HINGE)

    @pytest.mark.parametrize("bad", [
        {},
        {"environments": []},
        {"environments": [{"kind": "mixture", "n_samples": 3, "dim": 1}]},
        {"environments": [{"kind": "linear_gaussian", "n_samples": 0, "dim": 1}]},
        {"environments": [{"kind": "label_flip", "n_samples": 3, "dim": 1, "flip_rate": 1.5}]},
        {"environments": [{"kind": "linear_gaussian", "n_samples": 3, "dim": 1, "colour": "red"}]},
    ])
    def test_malformed_spec(self, bad):
        with pytest.raises(ValidationError):
            synth_generate(bad, 0)

    def test_weights_length_checked(self):
        with pytest.raises(ValidationError):
            synth_generate({"environments": [{"kind": "linear_gaussian", "n_samples": 3, "dim": 2, "weights": [1]}]}, 0)

    def test_dataset_json_roundtrip(self):
        d = synth_generate(linear_spec(1), seed=0)[0]
        assert SyntheticDataset.from_json(json.loads(json.dumps(d.to_json()))) == d

    def test_hypothesis_json_roundtrip(self):
        for h in hyps(2) + [TabularHypothesis("t", kind="table", table={(0.0, 1.0): 2.0})]:
            back = TabularHypothesis.from_json(json.loads(json.dumps(h.to_json())))
            assert back.to_json() == h.to_json()


class TestPipelineInvariants:
    def test_monotone_transform_of_one_environment(self):
        envs = synth_generate(linear_spec(3), seed=8)
        p = build_profile_multisource(hyps(4, seed=3), envs, SQUARE)
        fam = enumerate_menus(p.universe)
        for c in monotone_catalogue():
            for i in range(3):
                values = p.values.copy()
                values[i] = c(values[i])
                q = make_profile(values, p.universe)
                for e in range(1, 4):
                    for menu in fam:
                        assert erm_single(e).choose(p, menu) == erm_single(e).choose(q, menu)

    def test_federated_identity(self):
        envs = synth_generate(linear_spec(3), seed=8)
        p = build_profile_multisource(hyps(4, seed=3), envs, SQUARE)
        w = [0.2, 0.5, 0.3]
        combined = np.asarray(w) @ p.values
        fam = enumerate_menus(p.universe)
        for menu in fam:
            assert risk_min(combined).choose(p, menu) == weighted_sum(w).choose(p, menu)

    def test_profile_from_spec_block_mode(self):
        spec = linear_spec(2)
        spec.update(hypotheses=[h.to_json() for h in hyps(2)], loss={"kind": "square"}, mode="block",
                    tuples=[["h0", "h1"], ["h1", "h0"]])
        p = profile_from_spec(spec, 0)
        assert p.universe.labels == ("(h0,h1)", "(h1,h0)")
        with pytest.raises(ValidationError):
            profile_from_spec(dict(spec, tuples=[["h0", "nope"]]), 0)
