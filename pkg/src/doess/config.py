"""Run configuration: YAML file -> validated :class:`RunConfig`.

Example::

    seed: 7
    simulator:
      n_spins: 3
      K: 32
      cycle_grid: [1, 2, 4, 8, 16, 32]
    ensemble:
      n_variants: 2
    search:
      optimizer: doess
      eval_budget: 500
      init_pool: 200
    surrogate:
      kind: indicator_series
      dataset_size: 2000
      spec: {hidden: [64, 32], max_epochs: 50, patience: 10}

Every section is optional. Unknown keys anywhere are rejected. The master
``seed`` is the only seed; it is propagated to the simulator, the search and
the surrogate. ``DOESS_OUT`` and ``DOESS_JOBS`` override ``out`` and ``jobs``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields, replace

import yaml

from .indicators import DEFAULT_REPETITIONS
from .search import OPTIMIZERS, SearchConfig
from .simulator import ConfigurationError, SimulatorParams
from .surrogate import FEATURE_KINDS, RegressorSpec

TOP_KEYS = {"seed", "jobs", "out", "simulator", "ensemble", "search", "surrogate", "indicators"}


@dataclass(frozen=True)
class SurrogateConfig:
    kind: str = "indicator_series"
    R: int = DEFAULT_REPETITIONS
    folds: int = 5
    dataset_size: int = 10_000
    target: str = "simplified"  # or "indicators" (pulse_matrix -> i1..i3)
    spec: RegressorSpec = field(default_factory=RegressorSpec)

    def __post_init__(self):
        if self.kind not in FEATURE_KINDS:
            raise ConfigurationError(f"surrogate kind must be one of {FEATURE_KINDS}")
        if self.target not in ("simplified", "indicators"):
            raise ConfigurationError("surrogate target must be 'simplified' or 'indicators'")
        if self.target == "indicators" and self.kind != "pulse_matrix":
            raise ConfigurationError("indicator targets are learned from pulse_matrix features")
        if self.R < 1 or self.folds < 2 or self.dataset_size < 2:
            raise ConfigurationError("need R >= 1, folds >= 2 and dataset_size >= 2")

    def to_dict(self):
        return {"kind": self.kind, "R": self.R, "folds": self.folds, "dataset_size": self.dataset_size,
                "target": self.target, "spec": self.spec.to_dict()}


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    jobs: int = 1
    out: str = "doess_out"
    simulator: SimulatorParams = field(default_factory=SimulatorParams)
    n_variants: int = 1
    optimizer: str = "doess"
    search: SearchConfig = field(default_factory=SearchConfig)
    surrogate: SurrogateConfig = field(default_factory=SurrogateConfig)
    repetitions: int = DEFAULT_REPETITIONS

    def to_dict(self):
        sim = self.simulator.to_dict()
        sim.pop("seed")
        sim.pop("label")
        sim["cycle_grid"] = list(sim["cycle_grid"])
        sim["score_points"] = list(sim["score_points"])
        search = self.search.to_dict()
        search.pop("seed")
        search["optimizer"] = self.optimizer
        return {"seed": self.seed, "jobs": self.jobs, "out": self.out, "simulator": sim,
                "ensemble": {"n_variants": self.n_variants}, "search": search,
                "surrogate": self.surrogate.to_dict(), "indicators": {"repetitions": self.repetitions}}

    def snapshot(self):
        """YAML text that reproduces the outputs; ``jobs`` and ``out`` are left out
        because they do not change any result."""
        data = self.to_dict()
        del data["jobs"], data["out"]
        return yaml.safe_dump(data, sort_keys=True, default_flow_style=None)


def _section(data, name, allowed):
    sec = data.get(name) or {}
    if not isinstance(sec, dict):
        raise ConfigurationError(f"section {name!r} must be a mapping")
    unknown = set(sec) - set(allowed)
    if unknown:
        raise ConfigurationError(f"unknown keys in {name!r}: {sorted(unknown)}")
    return dict(sec)


def _float(x):
    return math.inf if isinstance(x, str) and x.strip().lower() in ("inf", "+inf", "infinity") else float(x)


def from_dict(data, seed=None, jobs=None, out=None, env=None):
    """Build a :class:`RunConfig`; explicit arguments beat env vars beat the file."""
    env = os.environ if env is None else env
    data = dict(data or {})
    unknown = set(data) - TOP_KEYS
    if unknown:
        raise ConfigurationError(f"unknown top-level keys: {sorted(unknown)}")
    try:
        master = int(data.get("seed", 0) if seed is None else seed)
        if jobs is None:
            jobs = env.get("DOESS_JOBS") or data.get("jobs") or os.cpu_count() or 1
        jobs = max(1, int(jobs))
        out = str(out or env.get("DOESS_OUT") or data.get("out") or "doess_out")

        sim_keys = {f.name for f in fields(SimulatorParams)} - {"seed", "label"}
        sim = _section(data, "simulator", sim_keys)
        for key in ("cycle_grid", "score_points"):
            if key in sim and sim[key] is not None:
                sim[key] = tuple(sim[key])
        simulator = SimulatorParams(**sim, seed=master)

        ens = _section(data, "ensemble", {"n_variants"})
        n_variants = int(ens.get("n_variants", 1))
        if n_variants < 1:
            raise ConfigurationError("ensemble.n_variants must be >= 1")

        search_keys = ({f.name for f in fields(SearchConfig)} - {"seed"}) | {"optimizer"}
        srch = _section(data, "search", search_keys)
        optimizer = srch.pop("optimizer", "doess")
        if optimizer not in OPTIMIZERS:
            raise ConfigurationError(f"search.optimizer must be one of {OPTIMIZERS}")
        if "filter_thresholds" in srch:
            th = srch["filter_thresholds"]
            th = [th] * 5 if not isinstance(th, (list, tuple)) else th
            srch["filter_thresholds"] = tuple(_float(t) for t in th)
        if "alphabet" in srch:
            srch["alphabet"] = tuple(srch["alphabet"])
        search = SearchConfig(**srch, seed=master)

        sur_keys = {f.name for f in fields(SurrogateConfig)}
        sur = _section(data, "surrogate", sur_keys)
        if "spec" in sur:
            if not isinstance(sur["spec"], dict):
                raise ConfigurationError("surrogate.spec must be a mapping")
            sur["spec"] = RegressorSpec.from_dict(sur["spec"])
        surrogate = SurrogateConfig(**sur)

        ind = _section(data, "indicators", {"repetitions"})
        reps = int(ind.get("repetitions", DEFAULT_REPETITIONS))
        if reps < 1:
            raise ConfigurationError("indicators.repetitions must be >= 1")
    except ConfigurationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from None
    return RunConfig(master, jobs, out, simulator, n_variants, optimizer, search, surrogate, reps)


def load(path=None, **overrides):
    """Read a YAML config file (or none) and apply overrides."""
    data = {}
    if path is not None:
        try:
            with open(path) as fh:
                data = yaml.safe_load(fh) or {}
        except OSError as exc:
            raise ConfigurationError(f"cannot read config: {exc}") from None
        except yaml.YAMLError as exc:
            raise ConfigurationError(f"invalid YAML in {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigurationError("config file must hold a mapping")
    return from_dict(data, **overrides)


def with_simulator(cfg, **changes):
    try:
        return replace(cfg, simulator=replace(cfg.simulator, **changes))
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from None
