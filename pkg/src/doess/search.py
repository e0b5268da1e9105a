"""Indicator-filtered UCB tree search over pulse words, plus baseline optimizers.

All optimizers draw simulations from one :class:`SimulationMeter`, so an
``eval_budget`` means the same number of simulator calls for each of them.
Indicator filtering is free: it does not touch the meter.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import sequences as sq
from .indicators import N_INDICATORS, indicator_matrix
from .simulator import ConfigurationError, simplified_score

OPTIMIZERS = ("doess", "mcmc", "sa", "random")
FILTER_MODES = ("exact", "predicted", "none")
DESCENTS = ("from_root", "from_best_leaf")
MAX_IDLE = 10_000  # loop iterations without a new simulation before giving up
TRAJECTORY_HEADER = ["eval_idx", "seq_codes", "simplified", "i1", "i2", "i3", "i4", "i5", "best_so_far"]


@dataclass(frozen=True)
class SearchConfig:
    c0: float = 0.01
    expansion_width: int = 24
    p_stochastic: float = 0.75
    init_pool: int = 2000
    eval_budget: int = 5000
    filter_thresholds: tuple = (0.25,) * N_INDICATORS
    filter_mode: str = "exact"
    baseline_filter: bool = False  # whether mcmc/sa/random also use the filter
    descent: str = "from_root"
    length: int = sq.DEFAULT_LENGTH
    alphabet: tuple = tuple(range(sq.N_CODES))
    temperature: float = 0.02  # MCMC
    sa_t0: float = 0.1
    sa_t_end: float = 1e-4
    stagnation_limit: int = 50  # empty expansions in a row before the filter is bypassed once
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "filter_thresholds", tuple(float(t) for t in self.filter_thresholds))
        object.__setattr__(self, "alphabet", tuple(sorted({int(c) for c in self.alphabet})))
        if self.c0 < 0:
            raise ConfigurationError("c0 must be >= 0")
        if not 0.0 <= self.p_stochastic <= 1.0:
            raise ConfigurationError("p_stochastic must lie in [0, 1]")
        if self.expansion_width < 1 or self.init_pool < 1 or self.eval_budget < 1 or self.length < 1:
            raise ConfigurationError("expansion_width, init_pool, eval_budget and length must be >= 1")
        if len(self.filter_thresholds) != N_INDICATORS:
            raise ConfigurationError(f"filter_thresholds needs {N_INDICATORS} entries")
        if self.filter_mode not in FILTER_MODES:
            raise ConfigurationError(f"filter_mode must be one of {FILTER_MODES}")
        if self.descent not in DESCENTS:
            raise ConfigurationError(f"descent must be one of {DESCENTS}")
        if not self.alphabet or any(not 0 <= c < sq.N_CODES for c in self.alphabet):
            raise ConfigurationError("alphabet must be a non-empty subset of 0..12")
        if self.temperature < 0 or not 0 < self.sa_t_end <= self.sa_t0:
            raise ConfigurationError("need temperature >= 0 and 0 < sa_t_end <= sa_t0")

    def to_dict(self):
        out = asdict(self)
        out["filter_thresholds"] = [t if math.isfinite(t) else "inf" for t in self.filter_thresholds]
        out["alphabet"] = list(self.alphabet)
        return out

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown search keys: {sorted(unknown)}")
        data = dict(data)
        if "filter_thresholds" in data:
            th = data["filter_thresholds"]
            th = [th] * N_INDICATORS if isinstance(th, (int, float, str)) else th
            data["filter_thresholds"] = tuple(float(t) for t in th)
        return cls(**data)


# -- scoring and moves ----------------------------------------------------------

def search_score(simplified, n, N_total, max_rho, c0):
    """UCB search score ``rho + c0 max_rho sqrt(2 ln N / (n + 1))``.

    ``simplified=None`` (pending or filtered) contributes zero exploitation.
    """
    if N_total < 1:
        raise ValueError("N_total must be >= 1")
    rho = 0.0 if simplified is None else simplified
    return rho + c0 * max_rho * math.sqrt(2.0 * math.log(N_total) / (n + 1))


def move_sizes(d):
    """Stochastic move ladder {1, d/2, d/3, d/4, d/5, d/10}, rounded, capped at d."""
    return tuple(min(d, max(1, int(math.floor(d / k + 0.5)))) for k in (d, 2, 3, 4, 5, 10))


def mutate(codes, rng, p_stochastic=0.75, alphabet=None):
    """Return ``(child, kind)`` with ``kind`` "stochastic" or "deterministic".

    Stochastic moves redraw 1, d/2, d/3, d/4, d/5 or d/10 positions uniformly
    from the alphabet. Deterministic moves shift one position by +-1 within the
    (sorted) alphabet, reflecting at either end.
    """
    codes = np.array(codes, dtype=int)
    d = codes.size
    alpha = np.arange(sq.N_CODES) if alphabet is None else np.asarray(sorted(alphabet), dtype=int)
    if rng.random() < p_stochastic:
        size = move_sizes(d)[rng.integers(6)]
        pos = rng.choice(d, size=size, replace=False)
        codes[pos] = alpha[rng.integers(0, alpha.size, size=size)]
        return codes, "stochastic"
    pos = rng.integers(d)
    step = 1 if rng.random() < 0.5 else -1
    if alpha.size > 1:
        idx = int(np.searchsorted(alpha, codes[pos]))
        idx = min(idx, alpha.size - 1)
        new = idx + step
        if not 0 <= new < alpha.size:
            new = idx - step
        codes[pos] = alpha[new]
    return codes, "deterministic"


# -- filter ---------------------------------------------------------------------

def passes_filter(words, cfg, predictor=None, null_slot="pi_slot", indicators=None):
    """Boolean mask over a batch of words.

    ``exact`` compares all five indicators with the thresholds; ``predicted``
    screens on predicted indicators 1-3 and then checks exact 4 and 5.
    """
    words = np.atleast_2d(np.asarray(words, dtype=int))
    th = np.asarray(cfg.filter_thresholds)
    if cfg.filter_mode == "none":
        return np.ones(len(words), dtype=bool)
    if indicators is None:
        indicators = indicator_matrix(words, null_slot)
    if cfg.filter_mode == "exact":
        return np.all(indicators < th, axis=1)
    if predictor is None:
        raise ConfigurationError("filter_mode 'predicted' needs a trained indicator predictor")
    pred = np.asarray(predictor.predict_indicators(words))[:, :3]
    return np.all(pred < th[:3], axis=1) & np.all(indicators[:, 3:] < th[3:], axis=1)


# -- simulation meter and results -------------------------------------------------

class BudgetExhausted(RuntimeError):
    pass


class SimulationMeter:
    """Caches simplified scores and counts every real simulator call.

    Each counted call appends one trajectory row; cache hits are free.
    """

    def __init__(self, budget, score_fn, null_slot="pi_slot"):
        self.budget = int(budget)
        self.score_fn = score_fn
        self.null_slot = null_slot
        self.cache = {}
        self.rows = []
        self.best = -math.inf

    @property
    def used(self):
        return len(self.rows)

    @property
    def remaining(self):
        return self.budget - self.used

    def score(self, codes, indicators=None):
        key = tuple(int(c) for c in codes)
        if key in self.cache:
            return self.cache[key]
        if self.remaining <= 0:
            raise BudgetExhausted
        value = float(self.score_fn(key))
        self.cache[key] = value
        self.best = max(self.best, value)
        if indicators is None:
            indicators = indicator_matrix(np.array([key]), self.null_slot)[0]
        self.rows.append((self.used, key, value, *map(float, indicators), self.best))
        return value

    def ranked(self):
        """All simulated words, best first (ties broken by code order)."""
        return sorted(self.cache.items(), key=lambda kv: (-kv[1], kv[0]))


@dataclass
class SearchResult:
    optimizer: str
    ranked: list  # [(codes, simplified), ...]
    trajectory: list  # rows matching TRAJECTORY_HEADER
    stats: dict = field(default_factory=dict)
    root: object = None

    @property
    def best(self):
        return self.ranked[0] if self.ranked else (None, -math.inf)

    def trajectory_csv(self):
        return trajectory_csv(self.trajectory)

    def ranked_sequences(self, params=None, top=None):
        timing = {} if params is None else {"tau": params.tau, "rabi": params.rabi, "null_slot": params.null_slot}
        items = self.ranked if top is None else self.ranked[:top]
        return [sq.PulseSequence(codes, name=f"{self.optimizer}_{i:04d}", **timing)
                for i, (codes, _) in enumerate(items)]


def trajectory_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRAJECTORY_HEADER)
    for idx, key, value, *rest in rows:
        w.writerow([idx, "-".join(map(str, key)), repr(value), *(repr(x) for x in rest)])
    return buf.getvalue()


def read_trajectory(text):
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != TRAJECTORY_HEADER:
        raise ValueError("not a trajectory CSV")
    return [row for row in reader]


def _default_score_fn(sim):
    def fn(codes):
        return simplified_score(codes, sim)
    return fn


def _meter(cfg, sim, score_fn):
    return SimulationMeter(cfg.eval_budget, score_fn or _default_score_fn(sim), sim.null_slot)


# -- the tree ---------------------------------------------------------------------

class TreeNode:
    __slots__ = ("codes", "parent", "children", "n", "hits", "simplified", "status")

    def __init__(self, codes, parent=None, simplified=None, status="pending"):
        self.codes = tuple(int(c) for c in codes)
        self.parent = parent
        self.children = []
        self.n = 0
        self.hits = 0  # rollouts that ended at this node
        self.simplified = simplified
        self.status = status  # "simulated", "filtered" or "pending"

    def path_to_root(self):
        node = self
        while node is not None:
            yield node
            node = node.parent

    def walk(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(node.children)


def _pick_root(pool, scores, indicators):
    # best simplified score, then smallest indicator sum, then code order
    order = sorted(range(len(pool)), key=lambda i: (-scores[i], float(indicators[i].sum()), tuple(pool[i])))
    return order[0]


def doess_run(cfg, sim, score_fn=None, predictor=None):
    """Indicator-filtered UCB tree search.

    ``score_fn`` replaces the simplified simulator score (used for tests and
    cheap stand-ins); it receives a code tuple and returns a float.
    """
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(0,)))
    meter = _meter(cfg, sim, score_fn)
    pool = sq.random_codes(rng, cfg.length, cfg.alphabet, size=cfg.init_pool)
    ind = indicator_matrix(pool, sim.null_slot)
    ok = passes_filter(pool, cfg, predictor, sim.null_slot, ind)
    fallback = not ok.any()
    if fallback:
        # nothing passes: seed the tree with the word closest to passing
        ok = np.zeros(len(pool), dtype=bool)
        ok[int(np.argmin(ind.sum(axis=1)))] = True
    idx = np.flatnonzero(ok)
    uniq = {tuple(pool[i]) for i in idx}
    if len(uniq) > cfg.eval_budget:
        raise ConfigurationError(
            f"eval_budget {cfg.eval_budget} is smaller than the {len(uniq)} filter-passing "
            "initial-pool words that must be simulated")
    scores = [meter.score(pool[i], ind[i]) for i in idx]
    r = _pick_root(pool[idx], scores, ind[idx])
    root = TreeNode(pool[idx[r]], simplified=scores[r], status="simulated")
    max_rho = max(scores)
    rollouts = 0
    empty_streak = 0
    bypasses = 0
    best_node = root
    idle = 0
    try:
        while meter.remaining > 0 and idle < MAX_IDLE:
            used = meter.used
            node = best_node if cfg.descent == "from_best_leaf" else root
            N = max(root.n, 1)  # total completed rollouts
            while node.children:
                node = max(node.children,
                           key=lambda ch: search_score(ch.simplified, ch.n, N, max_rho, cfg.c0))
            kids = np.array([mutate(node.codes, rng, cfg.p_stochastic, cfg.alphabet)[0]
                             for _ in range(cfg.expansion_width)])
            kid_ind = indicator_matrix(kids, sim.null_slot)
            bypass = empty_streak >= cfg.stagnation_limit
            mask = np.ones(len(kids), dtype=bool) if bypass else \
                passes_filter(kids, cfg, predictor, sim.null_slot, kid_ind)
            if bypass:
                bypasses += 1
                empty_streak = 0
            empty_streak = 0 if mask.any() else empty_streak + 1
            for k, codes in enumerate(kids):
                child = TreeNode(codes, parent=node, status="filtered" if not mask[k] else "pending")
                node.children.append(child)
            for k, child in enumerate(node.children):
                if mask[k]:
                    child.simplified = meter.score(child.codes, kid_ind[k])
                    child.status = "simulated"
                    max_rho = max(max_rho, child.simplified)
                    if best_node.simplified is None or child.simplified > best_node.simplified:
                        best_node = child
            leaf = max(node.children, key=lambda ch: search_score(ch.simplified, ch.n, N, max_rho, cfg.c0))
            leaf.hits += 1
            for v in leaf.path_to_root():
                v.n += 1
            rollouts += 1
            idle = idle + 1 if meter.used == used else 0
    except BudgetExhausted:
        pass
    stats = {"rollouts": rollouts, "simulations": meter.used, "filter_bypasses": bypasses,
             "root_fallback": bool(fallback), "max_rho": max_rho}
    return SearchResult("doess", meter.ranked(), meter.rows, stats, root)


# -- baselines ----------------------------------------------------------------------

def _filtered_draw(rng, cfg, sim, predictor, proposer, max_tries=1000):
    """Draw from ``proposer`` until a word passes the filter (if enabled)."""
    for _ in range(max_tries):
        codes = proposer()
        ind = indicator_matrix(codes[None], sim.null_slot)
        if not cfg.baseline_filter or passes_filter(codes[None], cfg, predictor, sim.null_slot, ind)[0]:
            return codes, ind[0]
    return codes, ind[0]


def random_run(cfg, sim, score_fn=None, predictor=None):
    """Uniform random sampling until the meter runs out."""
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(1,)))
    meter = _meter(cfg, sim, score_fn)
    draws = idle = 0
    try:
        while meter.remaining > 0 and idle < MAX_IDLE:
            used = meter.used
            codes, ind = _filtered_draw(rng, cfg, sim, predictor,
                                        lambda: sq.random_codes(rng, cfg.length, cfg.alphabet))
            meter.score(codes, ind)
            draws += 1
            idle = idle + 1 if meter.used == used else 0
    except BudgetExhausted:
        pass
    return SearchResult("random", meter.ranked(), meter.rows, {"draws": draws, "simulations": meter.used})


def _metropolis(cfg, sim, score_fn, predictor, temperature_at, name, spawn):
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(spawn,)))
    meter = _meter(cfg, sim, score_fn)
    accepted = proposed = 0
    chain = []
    try:
        codes, ind = _filtered_draw(rng, cfg, sim, predictor,
                                    lambda: sq.random_codes(rng, cfg.length, cfg.alphabet))
        current = meter.score(codes, ind)
        chain.append(current)
        idle = 0
        while meter.remaining > 0 and idle < MAX_IDLE:
            used = meter.used
            cand, cind = _filtered_draw(rng, cfg, sim, predictor,
                                        lambda: mutate(codes, rng, cfg.p_stochastic, cfg.alphabet)[0])
            value = meter.score(cand, cind)
            idle = idle + 1 if meter.used == used else 0
            T = temperature_at(meter.used)
            delta = value - current
            proposed += 1
            if delta >= 0 or (T > 0 and rng.random() < math.exp(delta / T)):
                codes, current = cand, value
                accepted += 1
            chain.append(current)
    except BudgetExhausted:
        pass
    stats = {"accepted": accepted, "proposed": proposed, "simulations": meter.used,
             "acceptance_rate": accepted / proposed if proposed else float("nan"), "chain": chain}
    return SearchResult(name, meter.ranked(), meter.rows, stats)


def mcmc_run(cfg, sim, score_fn=None, predictor=None):
    """Metropolis sampling at fixed ``cfg.temperature`` with :func:`mutate` proposals."""
    return _metropolis(cfg, sim, score_fn, predictor, lambda k: cfg.temperature, "mcmc", 2)


def sa_run(cfg, sim, score_fn=None, predictor=None):
    """Simulated annealing: geometric cooling from ``sa_t0`` to ``sa_t_end`` over the budget."""
    span = max(cfg.eval_budget - 1, 1)
    ratio = cfg.sa_t_end / cfg.sa_t0

    def temp(k):
        return cfg.sa_t0 * ratio ** (min(k, span) / span)

    return _metropolis(cfg, sim, score_fn, predictor, temp, "sa", 3)


RUNNERS = {"doess": doess_run, "mcmc": mcmc_run, "sa": sa_run, "random": random_run}


def run(optimizer, cfg, sim, score_fn=None, predictor=None):
    if optimizer not in RUNNERS:
        raise ConfigurationError(f"optimizer must be one of {OPTIMIZERS}")
    return RUNNERS[optimizer](cfg, sim, score_fn=score_fn, predictor=predictor)
