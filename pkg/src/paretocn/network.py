"""Dense network engine for the conditioned policy.

The architecture is fixed: a state embedding and a command embedding (both
sigmoid), combined with a Hadamard product, followed by one ReLU hidden
layer and a linear action-logit head. The command is the concatenation of
the desired return and the desired horizon, multiplied componentwise by a
fixed positive scale before entering the network. Gradients are
hand-derived for exactly this shape; everything runs in float64.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .validation import check_positive_int, check_return_vector

PARAM_ORDER = ("Ws", "bs", "Wc", "bc", "Wh", "bh", "Wo", "bo")

_MAGIC = b"PCNMODEL"
_FORMAT_VERSION = 1


def _sigmoid(z):
    # Clipping keeps exp in range; sigmoid(+-700) already rounds to 1/0.
    return 1.0 / (1.0 + np.exp(-np.clip(z, -700.0, 700.0)))


@dataclass
class TrainBatch:
    """Aligned arrays of supervised examples: command inputs and action labels."""

    states: np.ndarray
    horizons: np.ndarray
    returns: np.ndarray
    actions: np.ndarray

    def __post_init__(self):
        self.states = np.atleast_2d(np.asarray(self.states, dtype=np.float64))
        self.horizons = np.asarray(self.horizons, dtype=np.float64).ravel()
        self.returns = np.atleast_2d(np.asarray(self.returns, dtype=np.float64))
        self.actions = np.asarray(self.actions, dtype=np.int64).ravel()
        b = self.states.shape[0]
        if b == 0:
            raise ValueError("batch must be non-empty")
        if not (self.horizons.shape[0] == self.returns.shape[0] == self.actions.shape[0] == b):
            raise ValueError("batch arrays are not aligned")

    def __len__(self):
        return self.states.shape[0]


class PcnModel:
    """Parameters plus forward pass of the conditioned policy network."""

    def __init__(self, params, command_scale, state_dim, n_objectives, n_actions):
        self.params = params
        self.command_scale = np.asarray(command_scale, dtype=np.float64)
        self.state_dim = state_dim
        self.n_objectives = n_objectives
        self.n_actions = n_actions

    @property
    def embedding_width(self) -> int:
        return self.params["Ws"].shape[0]

    @property
    def hidden_width(self) -> int:
        return self.params["Wh"].shape[0]

    def _command(self, horizons, returns):
        cmd = np.concatenate([returns, horizons[:, None]], axis=1)
        return cmd * self.command_scale

    def forward_batch(self, states, horizons, returns, cache: bool = False):
        """Logits for a batch; with ``cache`` also return the activations
        needed by the backward pass."""
        states = np.atleast_2d(np.asarray(states, dtype=np.float64))
        horizons = np.asarray(horizons, dtype=np.float64).ravel()
        returns = np.atleast_2d(np.asarray(returns, dtype=np.float64))
        if states.shape[1] != self.state_dim:
            raise ValueError(
                f"state dimension {states.shape[1]}, model expects {self.state_dim}"
            )
        if returns.shape[1] != self.n_objectives:
            raise ValueError(
                f"return dimension {returns.shape[1]}, model expects {self.n_objectives}"
            )
        if not (states.shape[0] == horizons.shape[0] == returns.shape[0]):
            raise ValueError("states, horizons and returns are not aligned")
        p = self.params
        cmd = self._command(horizons, returns)
        es = _sigmoid(states @ p["Ws"].T + p["bs"])
        ec = _sigmoid(cmd @ p["Wc"].T + p["bc"])
        mixed = es * ec
        zh = mixed @ p["Wh"].T + p["bh"]
        hidden = np.maximum(zh, 0.0)
        logits = hidden @ p["Wo"].T + p["bo"]
        if cache:
            return logits, (states, cmd, es, ec, mixed, zh, hidden)
        return logits


def init_model(
    state_dim,
    n_objectives,
    n_actions,
    widths=(64, 64),
    command_scale=None,
    seed=0,
) -> PcnModel:
    """Build a model with uniform fan-in-scaled weights.

    Every weight and bias of a layer is drawn from
    U(-1/sqrt(fan_in), +1/sqrt(fan_in)); the same seed reproduces the
    parameters bit for bit.
    """
    state_dim = check_positive_int(state_dim, "state_dim")
    n_objectives = check_positive_int(n_objectives, "n_objectives")
    n_actions = check_positive_int(n_actions, "n_actions")
    emb, hid = widths
    emb = check_positive_int(emb, "embedding width")
    hid = check_positive_int(hid, "hidden width")
    if command_scale is None:
        command_scale = np.ones(n_objectives + 1)
    command_scale = check_return_vector(
        command_scale, "command_scale", dim=n_objectives + 1
    )
    if np.any(command_scale <= 0):
        raise ValueError("command_scale entries must be positive")
    rng = np.random.default_rng(seed)
    params = {}
    for name_w, name_b, fan_in, fan_out in (
        ("Ws", "bs", state_dim, emb),
        ("Wc", "bc", n_objectives + 1, emb),
        ("Wh", "bh", emb, hid),
        ("Wo", "bo", hid, n_actions),
    ):
        bound = 1.0 / np.sqrt(fan_in)
        params[name_w] = rng.uniform(-bound, bound, size=(fan_out, fan_in))
        params[name_b] = rng.uniform(-bound, bound, size=fan_out)
    return PcnModel(params, command_scale, state_dim, n_objectives, n_actions)


def forward(model: PcnModel, state, horizon, desired_return) -> np.ndarray:
    """Action logits for a single (state, horizon, return) input."""
    logits = model.forward_batch(
        np.asarray(state, dtype=np.float64)[None, :],
        np.array([horizon], dtype=np.float64),
        np.asarray(desired_return, dtype=np.float64)[None, :],
    )
    return logits[0]


def action_distribution(logits) -> np.ndarray:
    """Stable softmax over the last axis."""
    z = np.asarray(logits, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise ValueError("logits must be finite")
    z = z - z.max(axis=-1, keepdims=True)
    ez = np.exp(z)
    return ez / ez.sum(axis=-1, keepdims=True)


@dataclass
class AdamOptimizer:
    """Adaptive-moment optimizer state for one model's parameters."""

    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step_count: int = 0
    first_moment: dict = field(default_factory=dict)
    second_moment: dict = field(default_factory=dict)

    def ensure_state(self, params):
        for name, value in params.items():
            if name not in self.first_moment:
                self.first_moment[name] = np.zeros_like(value)
                self.second_moment[name] = np.zeros_like(value)

    def apply(self, params, grads):
        self.ensure_state(params)
        self.step_count += 1
        t = self.step_count
        bias1 = 1.0 - self.beta1**t
        bias2 = 1.0 - self.beta2**t
        for name, g in grads.items():
            m = self.first_moment[name]
            v = self.second_moment[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            update = (m / bias1) / (np.sqrt(v / bias2) + self.eps)
            params[name] -= self.learning_rate * update


def loss_and_gradients(model: PcnModel, batch: TrainBatch):
    """Mean cross-entropy on ``batch`` and its gradient for every parameter."""
    p = model.params
    b = len(batch)
    logits, (states, cmd, es, ec, mixed, zh, hidden) = model.forward_batch(
        batch.states, batch.horizons, batch.returns, cache=True
    )
    if np.any(batch.actions < 0) or np.any(batch.actions >= model.n_actions):
        raise ValueError("action labels out of range")
    if not np.all(np.isfinite(logits)):
        raise RuntimeError("training diverged: non-finite logits")
    probs = action_distribution(logits)
    rows = np.arange(b)
    # Clip only inside the log; the gradient uses the exact probabilities.
    loss = float(-np.log(np.maximum(probs[rows, batch.actions], 1e-300)).mean())

    dlogits = probs.copy()
    dlogits[rows, batch.actions] -= 1.0
    dlogits /= b
    grads = {
        "Wo": dlogits.T @ hidden,
        "bo": dlogits.sum(axis=0),
    }
    dhidden = dlogits @ p["Wo"]
    dzh = dhidden * (zh > 0.0)
    grads["Wh"] = dzh.T @ mixed
    grads["bh"] = dzh.sum(axis=0)
    dmixed = dzh @ p["Wh"]
    dzs = dmixed * ec * es * (1.0 - es)
    dzc = dmixed * es * ec * (1.0 - ec)
    grads["Ws"] = dzs.T @ states
    grads["bs"] = dzs.sum(axis=0)
    grads["Wc"] = dzc.T @ cmd
    grads["bc"] = dzc.sum(axis=0)
    return loss, grads


def train_batch(model: PcnModel, opt: AdamOptimizer, batch: TrainBatch) -> float:
    """One optimizer step on the batch; returns the pre-step mean loss."""
    loss, grads = loss_and_gradients(model, batch)
    if not np.isfinite(loss):
        raise RuntimeError(f"training diverged: non-finite loss {loss!r}")
    opt.apply(model.params, grads)
    return loss


def save_model(model: PcnModel, path) -> None:
    """Write parameters as a versioned binary file plus a JSON sidecar.

    Layout: magic, format version, parameter count, then per parameter a
    name, a shape and row-major little-endian float64 data. The sidecar
    ``<path>.json`` records the architecture so the file can be rebuilt
    without guessing dimensions.
    """
    path = str(path)
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", _FORMAT_VERSION, len(PARAM_ORDER)))
        for name in PARAM_ORDER:
            arr = np.ascontiguousarray(model.params[name], dtype="<f8")
            encoded = name.encode()
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<B", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            fh.write(arr.tobytes())
    sidecar = {
        "format_version": _FORMAT_VERSION,
        "state_dim": model.state_dim,
        "n_objectives": model.n_objectives,
        "n_actions": model.n_actions,
        "embedding_width": model.embedding_width,
        "hidden_width": model.hidden_width,
        "command_scale": [float(v) for v in model.command_scale],
    }
    with open(path + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> PcnModel:
    path = str(path)
    with open(path + ".json") as fh:
        sidecar = json.load(fh)
    if sidecar.get("format_version") != _FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint version {sidecar.get('format_version')!r}")
    with open(path, "rb") as fh:
        if fh.read(len(_MAGIC)) != _MAGIC:
            raise ValueError(f"{path} is not a model checkpoint")
        version, count = struct.unpack("<II", fh.read(8))
        if version != _FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        params = {}
        for _ in range(count):
            (name_len,) = struct.unpack("<H", fh.read(2))
            name = fh.read(name_len).decode()
            (ndim,) = struct.unpack("<B", fh.read(1))
            shape = struct.unpack(f"<{ndim}I", fh.read(4 * ndim))
            n_bytes = 8 * int(np.prod(shape, dtype=np.int64))
            data = np.frombuffer(fh.read(n_bytes), dtype="<f8")
            params[name] = data.reshape(shape).astype(np.float64)
    missing = set(PARAM_ORDER) - set(params)
    if missing:
        raise ValueError(f"checkpoint missing parameters: {sorted(missing)}")
    return PcnModel(
        params,
        np.asarray(sidecar["command_scale"], dtype=np.float64),
        sidecar["state_dim"],
        sidecar["n_objectives"],
        sidecar["n_actions"],
    )
