"""Risk profiles built from synthetic supervised data.

Hypotheses are fixed predictors (affine maps or lookup tables), so every
profile cell is a plain mean of per-example losses plus an optional
regularization term and can be recomputed independently.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Mapping, Sequence

import jsonschema
import numpy as np

from .core import RiskProfile, make_universe
from .exceptions import ValidationError

LOSS_KINDS = ("cross_entropy", "hinge", "square", "absolute")
OMEGA_KINDS = ("identity", "square")
GENERATOR_KINDS = ("linear_gaussian", "label_flip")
PROBABILITY_TOLERANCE = 1e-9


# -- losses -----------------------------------------------------------------------


@dataclass(frozen=True)
class LossSpec:
    kind: str
    n_classes: int | None = None

    def __post_init__(self):
        if self.kind not in LOSS_KINDS:
            raise ValidationError(f"unknown loss {self.kind!r}; known: {', '.join(LOSS_KINDS)}")
        if self.kind == "cross_entropy" and self.n_classes is not None and self.n_classes < 2:
            raise ValidationError("cross-entropy needs at least 2 classes")

    def to_json(self) -> dict:
        return {"kind": self.kind, "n_classes": self.n_classes}

    @classmethod
    def from_json(cls, data: Mapping) -> "LossSpec":
        return cls(data["kind"], data.get("n_classes"))


def _cross_entropy(spec: LossSpec, prediction, label) -> float:
    p = np.asarray(prediction, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise ValidationError("cross-entropy prediction must be a probability vector")
    if spec.n_classes is not None and p.size != spec.n_classes:
        raise ValidationError(f"expected {spec.n_classes} class probabilities, got {p.size}")
    if np.any(p < 0) or abs(p.sum() - 1.0) > PROBABILITY_TOLERANCE:
        raise ValidationError(f"prediction is not a probability vector (sum {p.sum()!r})")
    y = np.asarray(label, dtype=float)
    if y.ndim == 0:
        k = int(label)
        if k != label or not 0 <= k < p.size:
            raise ValidationError(f"class label {label!r} out of range 0..{p.size - 1}")
        y = np.zeros(p.size)
        y[k] = 1.0
    elif y.shape != p.shape:
        raise ValidationError("label vector and prediction differ in length")
    total = 0.0
    for yk, pk in zip(y.tolist(), p.tolist()):
        if yk == 0:
            continue
        if pk == 0:
            raise ValidationError("true class has probability 0: cross-entropy is infinite")
        total -= yk * math.log(pk)
    return total


def loss_eval(spec: LossSpec, prediction, label) -> float:
    """Loss of one prediction against one label."""
    if spec.kind == "cross_entropy":
        return _cross_entropy(spec, prediction, label)
    pred = float(np.asarray(prediction, dtype=float).reshape(()))
    y = float(label)
    if spec.kind == "hinge":
        if y not in (-1.0, 1.0):
            raise ValidationError(f"hinge labels must be -1 or +1, got {label!r}")
        return max(0.0, 1.0 - y * pred)
    if spec.kind == "square":
        return (y - pred) ** 2
    return abs(y - pred)


@dataclass(frozen=True)
class RegularizerSpec:
    """``lam * omega(norm)`` with omega from a fixed nondecreasing catalogue."""

    omega: str = "identity"
    lam: float = 0.0

    def __post_init__(self):
        if self.omega not in OMEGA_KINDS:
            raise ValidationError(f"unknown penalty {self.omega!r}; known: {', '.join(OMEGA_KINDS)}")
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ValidationError(f"regularization strength must be finite and >= 0, got {self.lam!r}")

    def penalty(self, norm: float) -> float:
        if norm < 0:
            raise ValidationError(f"hypothesis norm must be >= 0, got {norm!r}")
        return self.lam * (norm if self.omega == "identity" else norm * norm)

    def to_json(self) -> dict:
        return {"omega": self.omega, "lam": self.lam}

    @classmethod
    def from_json(cls, data: Mapping) -> "RegularizerSpec":
        return cls(data.get("omega", "identity"), float(data.get("lam", 0.0)))


# -- hypotheses and data ------------------------------------------------------------


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max())
    return e / e.sum()


@dataclass(frozen=True)
class TabularHypothesis:
    """A fixed predictor.

    ``kind="affine"``: ``weights @ x + bias``; ``weights`` may be a vector
    (scalar output) or a matrix (vector output), and ``output="softmax"``
    turns a vector output into class probabilities.  ``kind="table"``: a
    lookup keyed by the input tuple.
    """

    name: str
    kind: str = "affine"
    weights: Any = None
    bias: Any = 0.0
    table: Mapping | None = None
    output: str = "identity"
    norm: float = 0.0

    def __post_init__(self):
        if self.kind not in ("affine", "table"):
            raise ValidationError(f"hypothesis kind must be 'affine' or 'table', got {self.kind!r}")
        if self.output not in ("identity", "softmax"):
            raise ValidationError(f"hypothesis output must be 'identity' or 'softmax', got {self.output!r}")
        if self.kind == "affine" and self.weights is None:
            raise ValidationError(f"affine hypothesis {self.name!r} needs weights")
        if self.kind == "table":
            if not self.table:
                raise ValidationError(f"table hypothesis {self.name!r} needs a nonempty table")
            object.__setattr__(self, "table", {_key(k): v for k, v in self.table.items()})
        if self.norm < 0:
            raise ValidationError("hypothesis norm must be >= 0")

    def predict(self, x):
        if self.kind == "table":
            key = _key(x)
            if key not in self.table:
                raise ValidationError(f"hypothesis {self.name!r} is not defined on input {list(key)}")
            out = np.asarray(self.table[key], dtype=float)
        else:
            w = np.asarray(self.weights, dtype=float)
            out = w @ np.asarray(x, dtype=float) + np.asarray(self.bias, dtype=float)
        if self.output == "softmax":
            out = _softmax(np.atleast_1d(out))
        return out

    def to_json(self) -> dict:
        d = {"name": self.name, "kind": self.kind, "output": self.output, "norm": self.norm}
        if self.kind == "affine":
            d["weights"] = np.asarray(self.weights, dtype=float).tolist()
            d["bias"] = np.asarray(self.bias, dtype=float).tolist()
        else:
            d["table"] = [{"input": list(k), "prediction": np.asarray(v).tolist()} for k, v in self.table.items()]
        return d

    @classmethod
    def from_json(cls, data: Mapping) -> "TabularHypothesis":
        table = None
        if data.get("kind", "affine") == "table":
            table = {tuple(row["input"]): row["prediction"] for row in data["table"]}
        return cls(
            name=data["name"],
            kind=data.get("kind", "affine"),
            weights=data.get("weights"),
            bias=data.get("bias", 0.0),
            table=table,
            output=data.get("output", "identity"),
            norm=float(data.get("norm", 0.0)),
        )


def _key(x) -> tuple:
    return tuple(float(v) for v in np.atleast_1d(np.asarray(x, dtype=float)))


@dataclass(frozen=True, eq=False)
class SyntheticDataset:
    X: np.ndarray
    y: np.ndarray
    label_kind: str = "real"
    spec: dict = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.array(self.y, dtype=float)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValidationError("dataset needs at least one example")
        if y.shape[0] != X.shape[0]:
            raise ValidationError(f"{X.shape[0]} inputs but {y.shape[0]} labels")
        if self.label_kind not in ("real", "class"):
            raise ValidationError("label_kind must be 'real' or 'class'")
        if self.label_kind == "class" and not np.all(y == np.round(y)):
            raise ValidationError("class labels must be integers")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.X.shape[0]

    def __eq__(self, other):
        return (
            isinstance(other, SyntheticDataset)
            and self.label_kind == other.label_kind
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
        )

    def to_json(self) -> dict:
        return {
            "X": self.X.tolist(),
            "y": self.y.tolist(),
            "label_kind": self.label_kind,
            "spec": self.spec,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "SyntheticDataset":
        return cls(data["X"], data["y"], data.get("label_kind", "real"), dict(data.get("spec", {})), data.get("seed"))


# -- risks and profiles ---------------------------------------------------------------


def empirical_risk(
    h: TabularHypothesis, d: SyntheticDataset, loss: LossSpec, reg: RegularizerSpec | None = None
) -> float:
    """Mean loss over ``d`` plus the regularization penalty."""
    if len(d) == 0:
        raise ValidationError("empirical risk of an empty dataset is undefined")
    losses = [loss_eval(loss, h.predict(x), y) for x, y in zip(d.X, d.y)]
    value = float(np.mean(losses))
    if reg is not None:
        value += reg.penalty(h.norm)
    return value


def _unique_labels(names: Sequence[str]) -> list[str]:
    if len(set(names)) != len(names):
        raise ValidationError(f"hypothesis names must be distinct, got {list(names)}")
    return list(names)


def build_profile_multisource(
    hyps: Sequence[TabularHypothesis],
    envs: Sequence[SyntheticDataset],
    loss: LossSpec,
    reg: RegularizerSpec | None = None,
) -> RiskProfile:
    """Entry (i, h) is the regularized empirical risk of h on environment i."""
    if not hyps or not envs:
        raise ValidationError("need at least one hypothesis and one environment")
    universe = make_universe(_unique_labels([h.name for h in hyps]))
    values = [[empirical_risk(h, d, loss, reg) for h in hyps] for d in envs]
    return RiskProfile(universe, np.array(values))


def build_profile_per_example(
    hyps: Sequence[TabularHypothesis], d: SyntheticDataset, loss: LossSpec
) -> RiskProfile:
    """One environment per example: row k holds each hypothesis' loss on example k."""
    single = [SyntheticDataset(d.X[k : k + 1], d.y[k : k + 1], d.label_kind) for k in range(len(d))]
    return build_profile_multisource(hyps, single, loss)


def build_profile_block(
    hyp_tuples: Sequence[Sequence[TabularHypothesis]],
    envs: Sequence[SyntheticDataset],
    loss: LossSpec,
    reg: RegularizerSpec | None = None,
) -> RiskProfile:
    """Multi-task profile over hypothesis tuples.

    Entry (i, tuple) is the risk of the tuple's i-th component on
    environment i; other components never enter row i.
    """
    n = len(envs)
    if not hyp_tuples or n == 0:
        raise ValidationError("need at least one hypothesis tuple and one environment")
    for t in hyp_tuples:
        if len(t) != n:
            raise ValidationError(f"hypothesis tuple has {len(t)} components, expected {n}")
    labels = _unique_labels(["(" + ",".join(h.name for h in t) + ")" for t in hyp_tuples])
    values = [[empirical_risk(t[i], envs[i], loss, reg) for t in hyp_tuples] for i in range(n)]
    return RiskProfile(make_universe(labels), np.array(values))


# -- generators --------------------------------------------------------------------


def load_schema(name: str) -> dict:
    return json.loads(resources.files("choiceaxioms").joinpath("schemas", name).read_text())


def validate_generator_spec(spec: Mapping) -> None:
    try:
        jsonschema.validate(spec, load_schema("generator_spec.schema.json"))
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"malformed generator spec at {path}: {exc.message}") from None


def _generate_env(env: Mapping, seed: int) -> SyntheticDataset:
    # entropy excludes the environment's position, so identical entries give identical data
    rng = np.random.default_rng(np.random.SeedSequence([seed, int(env.get("seed", 0))]))
    count, dim = int(env["n_samples"]), int(env["dim"])
    w = np.asarray(env.get("weights", [1.0] * dim), dtype=float)
    if w.shape != (dim,):
        raise ValidationError(f"generator weights must have length dim={dim}")
    mean = float(env.get("input_mean", 0.0))
    scale = float(env.get("input_scale", 1.0))
    X = mean + scale * rng.standard_normal((count, dim))
    signal = X @ w + float(env.get("bias", 0.0))
    if env["kind"] == "linear_gaussian":
        y = signal + float(env.get("noise", 0.0)) * rng.standard_normal(count)
        return SyntheticDataset(X, y, "real", dict(env), seed)
    labels = np.where(signal >= 0, 1.0, -1.0)
    flips = rng.random(count) < float(env.get("flip_rate", 0.0))
    labels = np.where(flips, -labels, labels)
    if env.get("label_format", "pm1") == "index":
        labels = (labels > 0).astype(float)
    return SyntheticDataset(X, labels, "class", dict(env), seed)


def synth_generate(spec: Mapping, seed: int | None = None) -> list[SyntheticDataset]:
    """Datasets for every environment in ``spec``; bit-identical for equal (spec, seed)."""
    validate_generator_spec(spec)
    seed = int(spec.get("seed", 0) if seed is None else seed)
    return [_generate_env(env, seed) for env in spec["environments"]]


def profile_from_spec(spec: Mapping, seed: int | None = None) -> RiskProfile:
    """Generate the environments, then score the spec's hypotheses on them."""
    envs = synth_generate(spec, seed)
    if "hypotheses" not in spec or "loss" not in spec:
        raise ValidationError("profile spec needs 'hypotheses' and 'loss'")
    hyps = [TabularHypothesis.from_json(h) for h in spec["hypotheses"]]
    loss = LossSpec.from_json(spec["loss"])
    reg = RegularizerSpec.from_json(spec.get("regularizer", {}))
    mode = spec.get("mode", "multisource")
    if mode == "multisource":
        return build_profile_multisource(hyps, envs, loss, reg)
    by_name = {h.name: h for h in hyps}
    tuples = spec.get("tuples")
    if not tuples:
        raise ValidationError("block mode needs 'tuples' of hypothesis names")
    try:
        resolved = [[by_name[name] for name in t] for t in tuples]
    except KeyError as exc:
        raise ValidationError(f"tuple names unknown hypothesis {exc.args[0]!r}") from None
    return build_profile_block(resolved, envs, loss, reg)
