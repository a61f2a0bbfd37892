"""Two-layer sigmoid perceptron trained by full-batch backpropagation on SSE."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

MODEL_FORMAT = "walshocr-mlp"
MODEL_VERSION = 1
N_INPUTS = 11


class ModelFormatError(ValueError):
    pass


class TrainingDivergedError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 1000
    goal_sse: float = 1e-4
    learning_rate: float = 0.05
    momentum: float = 0.5
    hidden_count: int = 24
    seed: int = 42
    target_hi: float = 0.95
    target_lo: float = 0.05

    def __post_init__(self):
        if self.max_epochs < 0:
            raise ValueError("max_epochs must be >= 0")
        if not self.goal_sse > 0:
            raise ValueError("goal_sse must be positive")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not 0 <= self.momentum < 1:
            raise ValueError("momentum must lie in [0, 1)")
        if self.hidden_count < 1:
            raise ValueError("hidden_count must be >= 1")


@dataclass
class MlpModel:
    w1: np.ndarray  # (hidden, inputs)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (outputs, hidden)
    b2: np.ndarray  # (outputs,)
    input_min: np.ndarray
    input_max: np.ndarray
    label_order: tuple[str, ...]
    seed: int = 0
    config: TrainConfig = field(default_factory=TrainConfig)
    epochs_run: int = 0
    final_sse: float | None = None

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.w1.shape[1], self.w1.shape[0], self.w2.shape[0])

    def params(self) -> list[np.ndarray]:
        return [self.w1, self.b1, self.w2, self.b2]

    def copy(self) -> "MlpModel":
        return replace(self, w1=self.w1.copy(), b1=self.b1.copy(), w2=self.w2.copy(), b2=self.b2.copy())


def feature_scaling(inputs) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(inputs, dtype=np.float64)
    return x.min(axis=0), x.max(axis=0)


def init_mlp(config: TrainConfig, scaling, label_order: Sequence[str], n_inputs: int = N_INPUTS) -> MlpModel:
    """Draw every weight and bias from U(-0.5, 0.5) with a generator seeded by config.seed."""
    lo, hi = (np.asarray(s, dtype=np.float64) for s in scaling)
    if lo.shape != (n_inputs,) or hi.shape != (n_inputs,) or np.any(lo > hi):
        raise ValueError("scaling needs one (min, max) pair with min <= max per input")
    rng = np.random.default_rng(config.seed)
    h, o = config.hidden_count, len(label_order)
    return MlpModel(
        w1=rng.uniform(-0.5, 0.5, (h, n_inputs)),
        b1=rng.uniform(-0.5, 0.5, h),
        w2=rng.uniform(-0.5, 0.5, (o, h)),
        b2=rng.uniform(-0.5, 0.5, o),
        input_min=lo.copy(),
        input_max=hi.copy(),
        label_order=tuple(label_order),
        seed=config.seed,
        config=config,
    )


def sigmoid(z):
    return 1.0 / (1.0 + np.exp(-z))


def scale_inputs(model: MlpModel, inputs) -> np.ndarray:
    """Min-max scale to [0, 1] with clamping; constant features map to 0.5."""
    x = np.asarray(inputs, dtype=np.float64)
    span = model.input_max - model.input_min
    const = span == 0
    scaled = (x - model.input_min) / np.where(const, 1.0, span)
    scaled = np.where(const, 0.5, scaled)
    return np.clip(scaled, 0.0, 1.0)


def _forward(model: MlpModel, x: np.ndarray):
    hidden = sigmoid(x @ model.w1.T + model.b1)
    out = sigmoid(hidden @ model.w2.T + model.b2)
    return hidden, out


def forward(model: MlpModel, features) -> np.ndarray:
    """Output activations for one feature vector (shape (36,)) or a batch (n, 36)."""
    _, out = _forward(model, scale_inputs(model, features))
    return out


def sse(model: MlpModel, inputs, targets) -> float:
    """Sum over samples and output units of squared error, not averaged."""
    err = np.asarray(targets, dtype=np.float64) - forward(model, inputs)
    return float(np.sum(err * err))


def make_targets(n_classes: int, hi: float = 0.95, lo: float = 0.05) -> np.ndarray:
    t = np.full((n_classes, n_classes), lo)
    np.fill_diagonal(t, hi)
    return t


def gradients(model: MlpModel, inputs, targets) -> tuple[float, list[np.ndarray]]:
    """SSE and its gradient with respect to (w1, b1, w2, b2)."""
    x = scale_inputs(model, inputs)
    t = np.asarray(targets, dtype=np.float64)
    hidden, out = _forward(model, x)
    err = out - t
    delta_out = 2.0 * err * out * (1.0 - out)
    delta_hidden = (delta_out @ model.w2) * hidden * (1.0 - hidden)
    grads = [delta_hidden.T @ x, delta_hidden.sum(axis=0), delta_out.T @ hidden, delta_out.sum(axis=0)]
    return float(np.sum(err * err)), grads


def train(model: MlpModel, inputs, targets, config: TrainConfig, on_epoch=None) -> tuple[MlpModel, list[float]]:
    """Gradient descent with momentum until SSE <= goal or max_epochs updates.

    ``history[k]`` is the SSE seen at the start of epoch k. The input model is
    left untouched.
    """
    model = model.copy()
    velocity = [np.zeros_like(p) for p in model.params()]
    history: list[float] = []
    epochs = 0
    while epochs < config.max_epochs:
        err, grads = gradients(model, inputs, targets)
        if not math.isfinite(err):
            raise TrainingDivergedError(f"SSE became non-finite at epoch {epochs}")
        history.append(err)
        if on_epoch is not None:
            on_epoch(epochs, err)
        if err <= config.goal_sse:
            break
        for p, v, g in zip(model.params(), velocity, grads):
            v *= config.momentum
            v -= config.learning_rate * g
            p += v
        epochs += 1
    final = sse(model, inputs, targets)
    if not math.isfinite(final):
        raise TrainingDivergedError("SSE became non-finite after the last update")
    model.epochs_run = epochs
    model.final_sse = final
    model.config = config
    return model, history


def classify(model: MlpModel, features) -> tuple[str, float, str]:
    """(label, winning activation, runner-up label); ties go to the lower index."""
    out = forward(model, features)
    order = np.argsort(-out, kind="stable")
    return model.label_order[order[0]], float(out[order[0]]), model.label_order[order[1]]


# --------------------------------------------------------------------------
# persistence
# --------------------------------------------------------------------------

def _matrix(a: np.ndarray) -> list:
    return a.tolist()


def model_to_dict(model: MlpModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "dims": list(model.dims),
        "seed": model.seed,
        "config": asdict(model.config),
        "label_order": list(model.label_order),
        "input_scaling": {"min": _matrix(model.input_min), "max": _matrix(model.input_max)},
        "weights": {
            "hidden": _matrix(model.w1),
            "hidden_bias": _matrix(model.b1),
            "output": _matrix(model.w2),
            "output_bias": _matrix(model.b2),
        },
        "training_log": {"epochs": model.epochs_run, "final_sse": model.final_sse},
    }


def save_model(model: MlpModel, path) -> None:
    # json writes floats with repr, which round-trips every bit
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1) + "\n", encoding="utf-8")


def _array(doc, key, shape, path) -> np.ndarray:
    a = np.array(doc[key], dtype=np.float64)
    if a.shape != shape:
        raise ModelFormatError(f"{path}: shape mismatch for {key!r}: expected {shape}, found {a.shape}")
    return a


def load_model(path) -> MlpModel:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ModelFormatError(f"cannot read model {path}: {exc}") from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"{path}: malformed model file ({exc})") from exc
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"{path}: not a model file")
    if doc.get("version") != MODEL_VERSION:
        raise ModelFormatError(f"{path}: unsupported model version {doc.get('version')!r}")
    try:
        n_in, n_hidden, n_out = (int(d) for d in doc["dims"])
        labels = tuple(doc["label_order"])
        if len(labels) != n_out:
            raise ModelFormatError(f"{path}: shape mismatch: {len(labels)} labels for {n_out} outputs")
        w = doc["weights"]
        scaling = doc["input_scaling"]
        log = doc.get("training_log", {})
        model = MlpModel(
            w1=_array(w, "hidden", (n_hidden, n_in), path),
            b1=_array(w, "hidden_bias", (n_hidden,), path),
            w2=_array(w, "output", (n_out, n_hidden), path),
            b2=_array(w, "output_bias", (n_out,), path),
            input_min=_array(scaling, "min", (n_in,), path),
            input_max=_array(scaling, "max", (n_in,), path),
            label_order=labels,
            seed=int(doc["seed"]),
            config=TrainConfig(**doc["config"]),
            epochs_run=int(log.get("epochs", 0)),
            final_sse=log.get("final_sse"),
        )
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"{path}: malformed model file ({exc!r})") from exc
    if np.any(model.input_min > model.input_max):
        raise ModelFormatError(f"{path}: input scaling has min > max")
    return model
