"""Feature encodings and a small numpy MLP regressor with analytic gradients.

Four encodings of a pulse word feed the regressor:

* ``integer_encoding``  codes scaled to [0, 1]                 (d)
* ``pulse_matrix``      flattened one-hot code matrix           (13 d)
* ``single_indicators`` the five indicators                     (5)
* ``indicator_series``  indicators of the 1..R-fold repetitions (5 R)

Models are trained with Adam on mean squared error, with inverted dropout
and early stopping on an internal validation split. Cross-validated models
predict with the mean of their fold members.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import sequences as sq
from .indicators import DEFAULT_REPETITIONS, N_INDICATORS, indicator_matrix, series_batch

FEATURE_KINDS = ("integer_encoding", "pulse_matrix", "single_indicators", "indicator_series")
ACTIVATIONS = ("elu", "relu", "tanh")
SCHEMA_VERSION = 1


class TrainingError(ValueError):
    pass


class FeatureMismatchError(ValueError):
    pass


# -- features -------------------------------------------------------------------

def feature_dim(kind, d=sq.DEFAULT_LENGTH, R=DEFAULT_REPETITIONS):
    dims = {"integer_encoding": d, "pulse_matrix": sq.N_CODES * d,
            "single_indicators": N_INDICATORS, "indicator_series": N_INDICATORS * R}
    if kind not in dims:
        raise ValueError(f"unknown feature kind {kind!r}; expected one of {FEATURE_KINDS}")
    return dims[kind]


def featurize_batch(codes, kind, R=DEFAULT_REPETITIONS, null_slot="pi_slot"):
    """Feature matrix (N, dim) for a batch of equal-length words."""
    codes = np.atleast_2d(np.asarray(codes, dtype=int))
    N, d = codes.shape
    feature_dim(kind, d, R)
    if kind == "integer_encoding":
        return codes / (sq.N_CODES - 1.0)
    if kind == "pulse_matrix":
        out = np.zeros((N, sq.N_CODES, d))
        out[np.arange(N)[:, None], codes, np.arange(d)[None, :]] = 1.0
        return out.reshape(N, -1)
    if kind == "single_indicators":
        return indicator_matrix(codes, null_slot)
    return series_batch(codes, R, null_slot).reshape(N, -1)


def featurize(seq, kind, R=DEFAULT_REPETITIONS, null_slot=None):
    """Feature vector of one word (a :class:`PulseSequence` or code list)."""
    codes = getattr(seq, "codes", seq)
    if null_slot is None:
        null_slot = getattr(seq, "null_slot", "pi_slot")
    return featurize_batch(np.asarray(codes)[None], kind, R, null_slot)[0]


# -- network ----------------------------------------------------------------------

def _act(name, z):
    if name == "elu":
        return np.where(z > 0, z, np.expm1(np.minimum(z, 0.0)))
    if name == "relu":
        return np.maximum(z, 0.0)
    return np.tanh(z)


def _dact(name, z, a):
    if name == "elu":
        return np.where(z > 0, 1.0, a + 1.0)
    if name == "relu":
        return (z > 0).astype(float)
    return 1.0 - a * a


@dataclass(frozen=True)
class RegressorSpec:
    """Architecture and training budget; defaults mirror the reference setup."""

    hidden: tuple = (256, 128)
    activation: str = "elu"
    dropout: float = 0.2
    learning_rate: float = 1e-3
    batch_size: int = 64
    max_epochs: int = 1000
    patience: int = 500
    validation_fraction: float = 0.1
    weight_decay: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"activation must be one of {ACTIVATIONS}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")
        if self.learning_rate <= 0 or self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ValueError("learning_rate, batch_size, max_epochs and patience must be positive")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must lie in [0, 1)")

    def to_dict(self):
        out = asdict(self)
        out["hidden"] = list(self.hidden)
        return out

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown regressor keys: {sorted(unknown)}")
        return cls(**data)


class MLP:
    """Fully connected network; ``params`` is a flat list [W1, b1, W2, b2, ...]."""

    def __init__(self, sizes, activation="elu", dropout=0.0, rng=None):
        self.sizes = tuple(int(s) for s in sizes)
        self.activation = activation
        self.dropout = dropout
        rng = np.random.default_rng(0) if rng is None else rng
        self.params = []
        for fan_in, fan_out in zip(self.sizes, self.sizes[1:]):
            self.params.append(rng.normal(0.0, math.sqrt(2.0 / (fan_in + fan_out)), (fan_in, fan_out)))
            self.params.append(np.zeros(fan_out))

    @property
    def n_layers(self):
        return len(self.params) // 2

    def forward(self, X, rng=None):
        """Output and cache; dropout is applied only when ``rng`` is given."""
        a = X
        cache = []
        for l in range(self.n_layers):
            W, b = self.params[2 * l], self.params[2 * l + 1]
            z = a @ W + b
            if l == self.n_layers - 1:
                cache.append((a, None, None, None))
                return z, cache
            h = _act(self.activation, z)
            mask = None
            if rng is not None and self.dropout > 0:
                mask = (rng.random(h.shape) >= self.dropout) / (1.0 - self.dropout)
                out = h * mask
            else:
                out = h
            cache.append((a, z, h, mask))
            a = out

    def predict(self, X):
        return self.forward(X)[0]

    def loss_and_grads(self, X, Y, rng=None, weight_decay=0.0):
        """Mean squared error (averaged over samples and outputs) and its gradient."""
        out, cache = self.forward(X, rng)
        diff = out - Y
        loss = float(np.mean(diff * diff))
        grads = [None] * len(self.params)
        g = 2.0 * diff / diff.size
        for l in range(self.n_layers - 1, -1, -1):
            a, z, h, mask = cache[l]
            if l < self.n_layers - 1:
                if mask is not None:
                    g = g * mask
                g = g * _dact(self.activation, z, h)
            W = self.params[2 * l]
            grads[2 * l] = a.T @ g
            grads[2 * l + 1] = g.sum(axis=0)
            if weight_decay:
                grads[2 * l] = grads[2 * l] + 2 * weight_decay * W
            g = g @ W.T
        if weight_decay:
            loss += weight_decay * sum(float(np.sum(self.params[2 * l] ** 2)) for l in range(self.n_layers))
        return loss, grads


class Adam:
    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        c1 = 1 - self.b1**self.t
        c2 = 1 - self.b2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.b1
            m += (1 - self.b1) * g
            v *= self.b2
            v += (1 - self.b2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


# -- models -----------------------------------------------------------------------

def _check_length(codes, length):
    codes = np.atleast_2d(np.asarray(codes, dtype=int))
    if length is not None and codes.shape[1] != length:
        raise FeatureMismatchError(f"model was trained on words of length {length}, got {codes.shape[1]}")
    return codes


@dataclass
class SurrogateModel:
    """A trained network plus feature kind and normalization constants."""

    kind: str
    R: int
    spec: RegressorSpec
    net: MLP
    x_mean: np.ndarray
    x_std: np.ndarray
    y_mean: np.ndarray
    y_std: np.ndarray
    target_names: tuple = ("simplified",)
    null_slot: str = "pi_slot"
    curve: list = field(default_factory=list)  # (epoch, train_loss, val_loss)
    length: int | None = None  # word length of the training data, when known

    def predict_features(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.x_mean.size:
            raise FeatureMismatchError(
                f"model expects {self.x_mean.size} {self.kind} features, got {X.shape[1]}")
        out = self.net.predict((X - self.x_mean) / self.x_std)
        return out * self.y_std + self.y_mean

    def predict(self, codes):
        codes = _check_length(codes, self.length)
        return self.predict_features(featurize_batch(codes, self.kind, self.R, self.null_slot))

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION, "type": "mlp", "kind": self.kind, "R": self.R,
                "spec": self.spec.to_dict(), "sizes": list(self.net.sizes),
                "params": [p.tolist() for p in self.net.params],
                "x_mean": self.x_mean.tolist(), "x_std": self.x_std.tolist(),
                "y_mean": self.y_mean.tolist(), "y_std": self.y_std.tolist(),
                "target_names": list(self.target_names), "null_slot": self.null_slot,
                "curve": [list(c) for c in self.curve], "length": self.length}

    @classmethod
    def from_dict(cls, data):
        spec = RegressorSpec.from_dict(data["spec"])
        net = MLP(data["sizes"], spec.activation, spec.dropout)
        net.params = [np.array(p, dtype=float) for p in data["params"]]
        return cls(data["kind"], int(data["R"]), spec, net, np.array(data["x_mean"]), np.array(data["x_std"]),
                   np.array(data["y_mean"]), np.array(data["y_std"]), tuple(data["target_names"]),
                   data.get("null_slot", "pi_slot"), [tuple(c) for c in data.get("curve", [])],
                   data.get("length"))


@dataclass
class SurrogateEnsemble:
    """Fold members whose mean output is the prediction."""

    members: list

    @property
    def kind(self):
        return self.members[0].kind

    @property
    def target_names(self):
        return self.members[0].target_names

    def predict_features(self, X):
        return np.mean([m.predict_features(X) for m in self.members], axis=0)

    def predict(self, codes):
        codes = _check_length(codes, self.members[0].length)
        X = featurize_batch(codes, self.kind, self.members[0].R, self.members[0].null_slot)
        return self.predict_features(X)

    def predict_indicators(self, codes):
        """Predicted indicators 1-3 (N, 3); needs a pulse_matrix -> indicator model."""
        return predict_indicators(self, codes)

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION, "type": "ensemble",
                "members": [m.to_dict() for m in self.members]}


def load_model(data):
    if isinstance(data, str):
        data = json.loads(data)
    if data.get("type") == "ensemble":
        return SurrogateEnsemble([SurrogateModel.from_dict(m) for m in data["members"]])
    return SurrogateModel.from_dict(data)


def dump_model(model):
    return json.dumps(model.to_dict(), sort_keys=True)


def _standardize(A):
    mean = A.mean(axis=0)
    std = A.std(axis=0)
    return mean, np.where(std > 1e-12, std, 1.0)


def train(X, y, spec=None, seed=0, kind="custom", R=DEFAULT_REPETITIONS, target_names=None,
          null_slot="pi_slot"):
    """Train one network on features ``X`` (N, f) and targets ``y`` (N,) or (N, m).

    Deterministic given ``seed``. The best-validation parameters are kept
    (early stopping with ``spec.patience`` epochs).
    """
    spec = RegressorSpec() if spec is None else spec
    X = np.asarray(X, dtype=float)
    Y = np.asarray(y, dtype=float)
    Y = Y[:, None] if Y.ndim == 1 else Y
    if X.ndim != 2 or X.shape[0] != Y.shape[0]:
        raise TrainingError("features and targets must have matching first dimension")
    if X.shape[0] < 2:
        raise TrainingError("need at least 2 samples")
    if np.any(Y.std(axis=0) < 1e-12):
        raise TrainingError("degenerate targets: zero variance")
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(7,)))
    n = X.shape[0]
    perm = rng.permutation(n)
    n_val = int(round(spec.validation_fraction * n))
    val, tr = perm[:n_val], perm[n_val:]
    x_mean, x_std = _standardize(X[tr])
    y_mean, y_std = _standardize(Y[tr])
    Xs = (X - x_mean) / x_std
    Ys = (Y - y_mean) / y_std
    net = MLP((X.shape[1], *spec.hidden, Y.shape[1]), spec.activation, spec.dropout, rng)
    opt = Adam(net.params, spec.learning_rate)
    best = (math.inf, [p.copy() for p in net.params])
    since_best = 0
    curve = []
    for epoch in range(spec.max_epochs):
        order = rng.permutation(tr)
        total = 0.0
        for start in range(0, order.size, spec.batch_size):
            b = order[start:start + spec.batch_size]
            loss, grads = net.loss_and_grads(Xs[b], Ys[b], rng, spec.weight_decay)
            opt.step(net.params, grads)
            total += loss * b.size
        train_loss = total / tr.size
        if n_val:
            diff = net.predict(Xs[val]) - Ys[val]
            val_loss = float(np.mean(diff * diff))
        else:
            val_loss = train_loss
        curve.append((epoch, train_loss, val_loss))
        if val_loss < best[0] - 1e-12:
            best = (val_loss, [p.copy() for p in net.params])
            since_best = 0
        else:
            since_best += 1
            if since_best >= spec.patience:
                break
    net.params = best[1]
    names = tuple(target_names) if target_names else \
        (("simplified",) if Y.shape[1] == 1 else tuple(f"y{j}" for j in range(Y.shape[1])))
    return SurrogateModel(kind, R, spec, net, x_mean, x_std, y_mean, y_std, names, null_slot, curve)


# -- evaluation ---------------------------------------------------------------------

def r_squared(truth, pred):
    truth = np.asarray(truth, float).ravel()
    pred = np.asarray(pred, float).ravel()
    ss_tot = float(np.sum((truth - truth.mean()) ** 2))
    ss_res = float(np.sum((truth - pred) ** 2))
    if ss_tot == 0:
        return 1.0 if ss_res == 0 else -math.inf
    return 1.0 - ss_res / ss_tot


@dataclass
class EvalReport:
    r_squared: float
    mae: float
    folds: list = field(default_factory=list)  # [{"fold", "r_squared", "mae", "n"}]
    pairs: list = field(default_factory=list)  # [(prediction, truth)]
    kind: str = ""
    target: str = "simplified"

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION, "kind": self.kind, "target": self.target,
                "r_squared": self.r_squared, "mae": self.mae, "folds": self.folds,
                "pairs": [list(p) for p in self.pairs]}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data):
        return cls(data["r_squared"], data["mae"], list(data["folds"]),
                   [tuple(p) for p in data["pairs"]], data.get("kind", ""), data.get("target", "simplified"))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _scalar(pred, truth):
    pred = np.asarray(pred, float).reshape(-1)
    truth = np.asarray(truth, float).reshape(-1)
    return pred, truth


def evaluate(model, X, y, kind=None):
    """R^2, MAE and prediction/truth pairs of ``model`` on held-out features."""
    pred, truth = _scalar(model.predict_features(X), y)
    return EvalReport(r_squared(truth, pred), float(np.mean(np.abs(pred - truth))), [],
                      list(zip(pred.tolist(), truth.tolist())), kind or getattr(model, "kind", ""))


def fold_indices(n, k=5, seed=0):
    """Random partition of range(n) into k folds."""
    if not 2 <= k <= n:
        raise ValueError("need 2 <= k <= n")
    perm = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(5,))).permutation(n)
    return [np.sort(f) for f in np.array_split(perm, k)]


def cross_validate(X, y, spec=None, seed=0, k=5, kind="custom", R=DEFAULT_REPETITIONS, null_slot="pi_slot"):
    """k-fold CV. Returns ``(report, ensemble)``.

    The report scores out-of-fold predictions (each sample predicted by the
    member that never saw it); the ensemble averages all members.
    """
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    folds = fold_indices(len(X), k, seed)
    oof = np.empty(y.shape)
    members, per_fold = [], []
    for j, val in enumerate(folds):
        tr = np.setdiff1d(np.arange(len(X)), val)
        m = train(X[tr], y[tr], spec, seed=seed * 1000 + j, kind=kind, R=R, null_slot=null_slot)
        p = m.predict_features(X[val])
        oof[val] = p.reshape(oof[val].shape)
        pv, tv = _scalar(p, y[val])
        per_fold.append({"fold": j, "n": int(len(val)), "r_squared": r_squared(tv, pv),
                         "mae": float(np.mean(np.abs(pv - tv)))})
        members.append(m)
    pred, truth = _scalar(oof, y)
    report = EvalReport(r_squared(truth, pred), float(np.mean(np.abs(pred - truth))), per_fold,
                        list(zip(pred.tolist(), truth.tolist())), kind)
    return report, SurrogateEnsemble(members)


# -- indicator predictor ----------------------------------------------------------------

def indicator_training_words(rng, n, d=sq.DEFAULT_LENGTH):
    """Half uniform words, half words whose Null density is itself uniform in [0, 1]."""
    codes = sq.random_codes(rng, d, size=n)
    sparse = np.arange(n) % 2 == 1
    null_p = rng.random(n)[:, None]
    codes[sparse] = np.where(rng.random((n, d)) < null_p, 0, codes)[sparse]
    return codes


def train_indicator_predictor(codes, spec=None, seed=0, null_slot="pi_slot", k=None):
    """Network mapping pulse matrices to indicators 1-3 (the search filter)."""
    codes = np.atleast_2d(np.asarray(codes, dtype=int))
    X = featurize_batch(codes, "pulse_matrix", null_slot=null_slot)
    Y = indicator_matrix(codes, null_slot)[:, :3]
    names = ("i1", "i2", "i3")
    if k:
        _, ens = cross_validate(X, Y, spec, seed, k, "pulse_matrix", null_slot=null_slot)
        for m in ens.members:
            m.target_names = names
            m.length = codes.shape[1]
        return ens
    m = train(X, Y, spec, seed, "pulse_matrix", target_names=names, null_slot=null_slot)
    m.length = codes.shape[1]
    return SurrogateEnsemble([m])


def predict_indicators(model, codes):
    if model.kind != "pulse_matrix" or tuple(model.target_names) != ("i1", "i2", "i3"):
        raise FeatureMismatchError("indicator prediction needs a pulse_matrix model with targets i1..i3")
    return model.predict(codes)
