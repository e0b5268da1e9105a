"""Monte Carlo coherence simulation of a small disordered dipolar spin cluster.

Each realization samples static disorder fields, random spin positions (and
hence dipolar couplings) and one fractional amplitude error per pulse, shared
by all spins of the cluster. A pulse word is turned into the cycle unitary

    U = P~_d F_d ... P~_1 F_1

where ``F_k`` is free evolution under the cluster Hamiltonian and ``P~_k`` a
finite-width pulse that keeps evolving under it. Coherence after M cycles is
the survival probability of an initial product state, measured relative to
the ideal net rotation of the word (``frame="net_rotation"``) or literally in
the lab frame (``frame="lab"``), and averaged over K realizations.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np
from scipy.optimize import curve_fit

from . import sequences as sq
from .spin import (
    AXES,
    ClusterHamiltonian,
    PAULI,
    assemble_batch,
    assemble_hamiltonian,
    collective,
    expm_hermitian_generator,
    propagators,
    site_operators,
    su2_axis_angle,
)

NV_COUPLING = 2 * np.pi * 52e-9  # rad/us * um^3 (52 MHz nm^3)
METRICS = ("overlap", "polarization")
FRAMES = ("net_rotation", "lab")
DISORDER_DISTS = ("gaussian", "lorentzian")
NOISE_FLOOR = 0.02
MAX_PLACEMENT_ATTEMPTS = 10_000
AXIS_NAMES = ("x", "y", "z")


class ConfigurationError(ValueError):
    pass


def midpoint_points(top):
    """Cycle counts at the midpoints of the thirds of [0, top] (3-point midpoint rule)."""
    return tuple(max(1, int(math.floor(top * (2 * i + 1) / 6 + 0.5))) for i in range(3))


@dataclass(frozen=True)
class SimulatorParams:
    n_spins: int = 5
    disorder_std: float = 0.5  # W, rad/us
    coupling_scale: float = NV_COUPLING  # J0, rad/us um^3
    box_size: float = 0.045  # um, edge of the sampling cube
    min_separation: float = 0.005  # um
    pulse_error_std: float = 0.01
    rabi: float = sq.DEFAULT_RABI
    tau: float = sq.DEFAULT_TAU
    null_slot: str = "pi_slot"
    K: int = 100
    cycle_grid: tuple = (1, 2, 4, 8, 16, 32, 64, 128)
    score_points: tuple | None = None  # default: midpoints of thirds of [0, max(cycle_grid)]
    seed: int = 0
    metric: str = "overlap"
    frame: str = "net_rotation"
    disorder_dist: str = "gaussian"
    interaction_form: str = "xxyy_m2zz"
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "cycle_grid", tuple(int(m) for m in self.cycle_grid))
        if self.score_points is None:
            object.__setattr__(self, "score_points", midpoint_points(max(self.cycle_grid)))
        object.__setattr__(self, "score_points", tuple(int(m) for m in self.score_points))
        if self.n_spins < 1 or self.K < 1:
            raise ConfigurationError("n_spins and K must be >= 1")
        if min(self.disorder_std, self.coupling_scale, self.pulse_error_std) < 0:
            raise ConfigurationError("noise scales must be non-negative")
        if not (self.rabi > 0 and self.tau > 0 and self.box_size > 0):
            raise ConfigurationError("rabi, tau and box_size must be positive")
        for name in ("cycle_grid", "score_points"):
            grid = getattr(self, name)
            if not grid or grid[0] < 1 or any(b <= a for a, b in zip(grid, grid[1:])):
                raise ConfigurationError(f"{name} must be strictly increasing positive integers")
        if len(self.score_points) != 3:
            raise ConfigurationError("score_points must hold exactly 3 cycle counts")
        if self.metric not in METRICS:
            raise ConfigurationError(f"metric must be one of {METRICS}")
        if self.frame not in FRAMES:
            raise ConfigurationError(f"frame must be one of {FRAMES}")
        if self.disorder_dist not in DISORDER_DISTS:
            raise ConfigurationError(f"disorder_dist must be one of {DISORDER_DISTS}")
        if self.null_slot not in sq.NULL_SLOTS:
            raise ConfigurationError(f"null_slot must be one of {sq.NULL_SLOTS}")

    def timing(self, codes):
        return sq.PulseSequence(tuple(codes), tau=self.tau, rabi=self.rabi, null_slot=self.null_slot)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown simulator keys: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class ClusterRealization:
    h: np.ndarray  # (n,) rad/us
    J: np.ndarray  # (n, n) rad/us
    eps: np.ndarray  # (d,) fractional pulse errors
    positions: np.ndarray = field(default=None, repr=False)

    def hamiltonian(self, form="xxyy_m2zz"):
        return ClusterHamiltonian(tuple(self.h), tuple(map(tuple, self.J)), form)


def _stream(seed, index, sub):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index, sub)))


def dipolar_couplings(positions, J0):
    """``J_ij = J0 (1 - 3 cos^2 theta_ij) / r_ij^3`` with theta measured from z."""
    diff = positions[:, None, :] - positions[None, :, :]
    r = np.linalg.norm(diff, axis=-1)
    np.fill_diagonal(r, np.inf)
    cos2 = np.where(np.isfinite(r), diff[..., 2] ** 2 / np.where(np.isfinite(r), r, 1.0) ** 2, 0.0)
    J = J0 * (1 - 3 * cos2) / r**3
    np.fill_diagonal(J, 0.0)
    return J


def sample_positions(rng, n, box, r_min):
    for _ in range(MAX_PLACEMENT_ATTEMPTS):
        pos = rng.uniform(0.0, box, size=(n, 3))
        d = np.linalg.norm(pos[:, None] - pos[None], axis=-1)
        if n == 1 or d[np.triu_indices(n, 1)].min() >= r_min:
            return pos
    raise ConfigurationError(
        f"could not place {n} spins with separation >= {r_min} um in a {box} um box")


def sample_cluster(params, index=0, n_pulses=0):
    """Realization ``index`` of the cluster ensemble defined by ``params``.

    Disorder and geometry come from one sub-stream, pulse errors from another,
    so a realization's cluster does not depend on the word length.
    """
    rng = _stream(params.seed, index, 0)
    n = params.n_spins
    if params.disorder_dist == "gaussian":
        h = rng.normal(0.0, 1.0, size=n) * params.disorder_std
    else:
        h = rng.standard_cauchy(size=n) * params.disorder_std
    pos = sample_positions(rng, n, params.box_size, params.min_separation)
    J = dipolar_couplings(pos, params.coupling_scale)
    eps = _stream(params.seed, index, 1).normal(0.0, 1.0, size=n_pulses) * params.pulse_error_std
    return ClusterRealization(h, J, eps, pos)


_ENSEMBLE_CACHE = {}


class _Ensemble:
    """K sampled clusters with eigendecomposed Hamiltonians, reused across words."""

    def __init__(self, params):
        self.params = params
        reals = [sample_cluster(params, i) for i in range(params.K)]
        self.h = np.array([r.h for r in reals])
        self.J = np.array([r.J for r in reals])
        self.H = assemble_batch(self.h, self.J, params.interaction_form)
        self.w, self.v = np.linalg.eigh(self.H)
        self._eps = np.zeros((params.K, 0))

    def eps(self, d):
        if self._eps.shape[1] < d:
            p = self.params
            self._eps = np.array([_stream(p.seed, i, 1).normal(size=d) for i in range(p.K)])
            self._eps *= p.pulse_error_std
        return self._eps[:, :d]


def _ensemble(params):
    key = replace(params, metric="overlap", frame="net_rotation", cycle_grid=(1,), score_points=(1, 2, 3),
                  label="")
    ens = _ENSEMBLE_CACHE.get(key)
    if ens is None:
        if len(_ENSEMBLE_CACHE) > 16:
            _ENSEMBLE_CACHE.clear()
        ens = _ENSEMBLE_CACHE[key] = _Ensemble(params)
    return ens


def _rz_quarter_phases(n):
    """Diagonal of exp(-i pi/4 sum_i Z_i), which maps sum X_i to sum Y_i."""
    m = np.real(np.diagonal(collective((0, 0, 1), n)))
    return np.exp(-1j * np.pi / 4 * m)


def _cycle_unitaries(codes, params, H, w, v, eps):
    """Batched cycle unitaries (K, D, D) for one word."""
    seq = params.timing(codes)
    free = seq.free_durations()
    tpulse = seq.pulse_durations()
    K, D = H.shape[0], H.shape[1]
    n = params.n_spins
    # free propagators for the few distinct free durations
    uniq, inv = np.unique(np.round(free, 15), return_inverse=True)
    F = {j: propagators(w, v, np.full(K, t)) for j, t in enumerate(uniq)}
    slots = [k for k, c in enumerate(codes) if c != 0]
    P = {}
    if slots:
        # The cluster Hamiltonian is real and commutes with global Z rotations,
        # so every drive is reduced to a real symmetric +-X problem and Y drives
        # are recovered by the diagonal rotation Rz(pi/2).
        vec = sq.AXIS_VECTORS[[codes[k] for k in slots]]
        sign = vec[:, 0] + vec[:, 1]
        is_y = vec[:, 1] != 0
        tp = tpulse[slots]
        amp = params.rabi * (1.0 + eps[:, slots]) / 2 * sign  # (K, p)
        Hp = H.real[:, None] + amp[..., None, None] * collective((1, 0, 0), n).real[None, None]
        wp, vp = np.linalg.eigh(Hp)
        Up = propagators(wp, vp.astype(complex), np.broadcast_to(tp, (K, len(slots))))
        if is_y.any():
            r = _rz_quarter_phases(n)
            Up[:, is_y] = r[:, None] * Up[:, is_y] * r.conj()[None, :]
        P = {k: Up[:, j] for j, k in enumerate(slots)}
    U = np.broadcast_to(np.eye(D, dtype=complex), (K, D, D)).copy()
    for k, c in enumerate(codes):
        U = F[inv[k]] @ U
        if c != 0:
            U = P[k] @ U
    return U


def sequence_unitary(seq, realization, params):
    """Cycle unitary of one word for one explicit realization."""
    codes = tuple(getattr(seq, "codes", seq))
    H = assemble_hamiltonian(realization.hamiltonian(params.interaction_form))[None]
    w, v = np.linalg.eigh(H)
    eps = np.asarray(realization.eps, dtype=float).reshape(1, -1)
    if eps.shape[1] < len(codes):
        raise ValueError("realization carries fewer pulse errors than the word has slots")
    return _cycle_unitaries(codes, params, H, w, v, eps)[0]


def _product_state(axis, n):
    single = {
        "x": np.array([1, 1]) / np.sqrt(2),
        "y": np.array([1, 1j]) / np.sqrt(2),
        "z": np.array([1, 0]),
    }[axis].astype(complex)
    return _kron_power_vec(single, n)


def _kron_power_vec(vec, n):
    out = np.ones(1, dtype=complex)
    for _ in range(n):
        out = np.kron(out, vec)
    return out


def _kron_power(m, n):
    out = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        out = np.kron(out, m)
    return out


def _matrix_powers(U, grid):
    """U^M for each M in an increasing grid by binary exponentiation."""
    out = {}
    squares = [U]
    top = max(grid)
    while 2 ** len(squares) <= top:
        squares.append(squares[-1] @ squares[-1])
    for M in grid:
        acc = None
        for bit, S in enumerate(squares):
            if M >> bit & 1:
                acc = S if acc is None else S @ acc
        out[M] = acc
    return out


def _survival(W, axes, n, metric):
    """Average survival per axis for frame-corrected evolutions W (K, D, D)."""
    ops = site_operators(n)
    res = {}
    for ax in axes:
        psi = _product_state(ax, n)
        phi = W @ psi
        if metric == "overlap":
            vals = np.abs(phi @ psi.conj()) ** 2
        else:
            a = AXIS_NAMES.index(ax)
            expv = np.einsum("kd,ide,ke->ki", phi.conj(), ops[a], phi).real
            vals = np.mean((1 + expv) / 2, axis=1)
        res[ax] = float(np.clip(vals.mean(), 0.0, 1.0))
    return res


@dataclass
class CoherenceCurve:
    """Survival vs time per probed axis; index 0 is M=0 (value 1)."""

    cycles: np.ndarray
    times: np.ndarray  # us
    values: dict  # axis -> array

    @property
    def axes(self):
        return tuple(self.values)

    def to_csv(self):
        cols = ["cx", "cy", "cz"]
        lines = ["M,T_us," + ",".join(cols)]
        for i, (m, t) in enumerate(zip(self.cycles, self.times)):
            row = [repr(float(self.values[a][i])) if a in self.values else "" for a in AXIS_NAMES]
            lines.append(f"{int(m)},{float(t)!r}," + ",".join(row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text):
        rows = [line.split(",") for line in text.strip().splitlines()[1:]]
        cycles = np.array([int(r[0]) for r in rows])
        times = np.array([float(r[1]) for r in rows])
        values = {}
        for j, a in enumerate(AXIS_NAMES):
            if rows and rows[0][2 + j] != "":
                values[a] = np.array([float(r[2 + j]) for r in rows])
        return cls(cycles, times, values)


def _curve_from_points(grid, cycle_time, per_m, axes):
    cycles = np.array([0, *grid])
    values = {a: np.array([1.0] + [per_m[m][a] for m in grid]) for a in axes}
    return CoherenceCurve(cycles, cycles * cycle_time, values)


def _word_points(codes, params, grid):
    ens = _ensemble(params)
    codes = tuple(int(c) for c in codes)
    U = _cycle_unitaries(codes, params, ens.H, ens.w, ens.v, ens.eps(len(codes)))
    powers = _matrix_powers(U, grid)
    n = params.n_spins
    P = sq.net_rotation(codes)
    out = {}
    for M in grid:
        W = powers[M]
        if params.frame == "net_rotation":
            G = _kron_power(np.linalg.matrix_power(P, M).conj().T, n)
            W = G @ W
        out[M] = _survival(W, AXIS_NAMES, n, params.metric)
    return out


def _protocol_points(proto, params, grid):
    ens = _ensemble(params)
    n = params.n_spins
    times = np.array(grid) * proto.slot
    out = {}
    if proto.kind == "free":
        for M, t in zip(grid, times):
            W = propagators(ens.w, ens.v, np.full(params.K, t))
            out[M] = _survival(W, proto.axes, n, params.metric)
        return out
    axis_vec = AXES[proto.drive_axis]
    amp = params.rabi * (1.0 + ens.eps(1)[:, 0]) / 2
    Hd = ens.H + amp[:, None, None] * collective(axis_vec, n)[None]
    wd, vd = np.linalg.eigh(Hd)
    for M, t in zip(grid, times):
        W = propagators(wd, vd, np.full(params.K, t))
        if params.frame == "net_rotation":
            ideal = expm_hermitian_generator(params.rabi * (axis_vec[0] * PAULI["x"] + axis_vec[1] * PAULI["y"]) / 2, t)
            W = _kron_power(ideal.conj().T, n) @ W
        out[M] = _survival(W, proto.axes, n, params.metric)
    return out


def coherence_curve(seq, params):
    """Coherence on ``params.cycle_grid`` for a word or a protocol descriptor."""
    grid = params.cycle_grid
    if isinstance(seq, sq.Protocol):
        per_m = _protocol_points(seq, params, grid)
        return _curve_from_points(grid, seq.slot, per_m, seq.axes)
    codes = tuple(getattr(seq, "codes", seq))
    per_m = _word_points(codes, params, grid)
    return _curve_from_points(grid, params.timing(codes).cycle_time, per_m, AXIS_NAMES)


def simplified_score(seq, params, points=None):
    """Mean survival over three cycle counts and all probed axes (no fit)."""
    points = tuple(params.score_points if points is None else points)
    if len(points) != 3 or any(b <= a for a, b in zip(points, points[1:])) or points[0] < 1:
        raise ValueError("need 3 strictly increasing positive cycle counts")
    if isinstance(seq, sq.Protocol):
        per_m = _protocol_points(seq, params, points)
    else:
        per_m = _word_points(tuple(getattr(seq, "codes", seq)), params, points)
    return float(np.mean([v for m in points for v in per_m[m].values()]))


def spin_lock_curve(axis, params):
    """Continuous drive along ``axis`` (+X/-X/+Y/-Y); locked and orthogonal axes."""
    if axis not in AXES:
        raise ValueError("spin-lock axis must lie in the XY plane")
    ax = axis[-1].lower()
    proto = sq.Protocol(f"spin_lock_{ax}", "drive", (ax, "y" if ax == "x" else "x"), axis,
                        params.tau + np.pi / params.rabi)
    return coherence_curve(proto, params)


# -- fitting and scores -------------------------------------------------------

@dataclass
class FitResult:
    axes: tuple
    contrast: dict
    rate: dict  # 1/us
    unfittable: dict

    @property
    def C(self):
        return float(np.mean([self.contrast[a] for a in self.axes]))

    @property
    def kappa(self):
        return float(np.mean([self.rate[a] for a in self.axes]))

    @property
    def coherence_time(self):
        k = self.kappa
        return math.inf if k == 0 else 1.0 / k

    def to_dict(self, T_max=None):
        def num(x):
            return None if not math.isfinite(x) else float(x)

        out = {
            "schema_version": 1,
            "axes": list(self.axes),
            "contrast": {a: num(self.contrast[a]) for a in self.axes},
            "rate": {a: num(self.rate[a]) for a in self.axes},
            "unfittable": {a: bool(self.unfittable[a]) for a in self.axes},
            "C": num(self.C),
            "kappa": num(self.kappa),
            "coherence_time": num(self.coherence_time),
        }
        if T_max is not None:
            out["T_max"] = float(T_max)
            out["coherence_score"] = coherence_score(self, T_max)
        return out

    def to_json(self, T_max=None, **extra):
        return json.dumps({**self.to_dict(T_max), **extra}, indent=2, sort_keys=True)


def _exp_model(t, C, k):
    return C * np.exp(-k * t)


def fit_axis(t, y):
    """Fit ``C exp(-k t)``; returns (C, k, unfittable)."""
    t = np.asarray(t, float)
    y = np.asarray(y, float)
    if t.size < 3:
        raise ValueError("need at least 3 time points to fit")
    if np.all(y < NOISE_FLOOR):
        return 0.0, math.inf, True
    pos = y > 1e-12
    if pos.sum() >= 2 and np.ptp(t[pos]) > 0:
        slope, icept = np.polyfit(t[pos], np.log(y[pos]), 1)
        k0, C0 = max(-slope, 0.0), float(np.exp(icept))
    else:
        k0, C0 = 0.0, float(y.max())
    C0 = min(max(C0, 1e-6), 1.05)
    try:
        (C, k), _ = curve_fit(_exp_model, t, y, p0=(C0, k0), bounds=([0.0, 0.0], [1.05, np.inf]),
                              method="trf", xtol=1e-14, ftol=1e-14, gtol=1e-14, max_nfev=10_000)
    except (RuntimeError, ValueError):
        return 0.0, math.inf, True
    return float(C), float(max(k, 0.0)), False


def fit_exponential(curve):
    """Per-axis single-exponential fits over the M >= 1 points."""
    sel = curve.cycles >= 1
    contrast, rate, bad = {}, {}, {}
    for a in curve.axes:
        contrast[a], rate[a], bad[a] = fit_axis(curve.times[sel], curve.values[a][sel])
    return FitResult(curve.axes, contrast, rate, bad)


def coherence_score(fit, T_max):
    """Normalized area under the fitted decays on [0, T_max]."""
    if T_max <= 0:
        raise ValueError("T_max must be positive")
    terms = []
    for a in fit.axes:
        C, k = fit.contrast[a], fit.rate[a]
        x = k * T_max
        if not math.isfinite(x):
            terms.append(0.0)
        elif x < 1e-8:
            terms.append(C * (1 - x / 2))
        else:
            terms.append(C * -math.expm1(-x) / x)
    return float(np.mean(terms))


def full_score(seq, params):
    """Full curve, fit and coherence score; T_max is the last grid time."""
    curve = coherence_curve(seq, params)
    fit = fit_exponential(curve)
    return coherence_score(fit, curve.times[-1]), fit, curve


def anisotropy_report(seq, params):
    """Net rotation axis/angle of a word plus per-axis fits.

    ``spin_lock_like`` is set when the coordinate axis nearest the net axis
    has the smallest fitted decay rate.
    """
    axis, angle = su2_axis_angle(sq.net_rotation(getattr(seq, "codes", seq)))
    curve = coherence_curve(seq, params)
    fit = fit_exponential(curve)
    aligned = AXIS_NAMES[int(np.argmax(np.abs(axis)))]
    flag = False
    if angle > 1e-8:
        rates = {a: fit.rate[a] for a in fit.axes}
        flag = rates[aligned] <= min(rates.values()) and not fit.unfittable[aligned]
    return {"net_axis": axis, "net_angle": angle, "aligned_axis": aligned, "fit": fit,
            "curve": curve, "spin_lock_like": bool(flag)}


# -- ensembles of simulators --------------------------------------------------

# (disorder, coupling, pulse error) multipliers for labelled variants
VARIANT_GRID = (
    (1.0, 1.0, 1.0),
    (1.3, 0.7, 1.5),
    (0.8, 1.3, 0.7),
    (1.15, 1.15, 2.0),
)


def expected_max_coupling(params, n_clusters=100):
    vals = [np.abs(sample_cluster(replace(params, seed=params.seed + 7919), i).J).max()
            for i in range(n_clusters)]
    return float(np.mean(vals))


def ensemble_params(base, n_variants):
    """Deterministic simulator variants V1..Vn around ``base``.

    The first four follow :data:`VARIANT_GRID`; further ones are jittered from
    the base seed. Couplings are shrunk if needed so that the disorder scale
    exceeds the expected largest pair coupling.
    """
    if n_variants < 1:
        raise ValueError("n_variants must be >= 1")
    if n_variants == 1:
        return [replace(base, label=base.label or "V1")]
    rng = np.random.default_rng(np.random.SeedSequence(base.seed, spawn_key=(99,)))
    seeds = np.random.SeedSequence(base.seed).generate_state(n_variants, dtype=np.uint32)
    out = []
    for i in range(n_variants):
        fw, fj, fe = VARIANT_GRID[i] if i < len(VARIANT_GRID) else tuple(rng.uniform(0.7, 1.4, 3))
        p = replace(base, disorder_std=base.disorder_std * fw, coupling_scale=base.coupling_scale * fj,
                    pulse_error_std=base.pulse_error_std * fe, seed=int(seeds[i]), label=f"V{i + 1}")
        if p.coupling_scale > 0 and p.disorder_std > 0:
            jmax = expected_max_coupling(p)
            if jmax >= p.disorder_std:
                p = replace(p, coupling_scale=p.coupling_scale * 0.9 * p.disorder_std / jmax)
        out.append(p)
    return out


# -- batch helpers ------------------------------------------------------------

def _simplified_task(args):
    codes, params = args
    return simplified_score(codes, params)


def simplified_scores(words, params, jobs=1):
    """Simplified scores for many words; results do not depend on ``jobs``."""
    words = [tuple(getattr(w, "codes", w)) for w in words]
    if jobs <= 1 or len(words) < 2:
        return np.array([simplified_score(w, params) for w in words])
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return np.array(list(ex.map(_simplified_task, [(w, params) for w in words], chunksize=8)))
