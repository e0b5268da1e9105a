"""Command-line entry point: ``doess simulate|indicators|search|surrogate|report``.

Exit codes: 0 success, 2 input data error, 3 configuration error,
4 missing artifact. Every command writes ``config.resolved.yaml`` and a
``manifest.json`` into its output directory; all tables are CSV with a header
row and all JSON carries ``schema_version``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np
import yaml

from . import config as config_mod
from . import sequences as sq
from . import search as search_mod
from . import simulator as sim_mod
from . import surrogate as sur_mod
from .indicators import indicator_matrix, series_batch

SCHEMA_VERSION = 1
BASELINES_TOKEN = "@baselines"
EXIT_OK, EXIT_DATA, EXIT_CONFIG, EXIT_MISSING = 0, 2, 3, 4


class InputDataError(Exception):
    pass


class MissingArtifact(Exception):
    def __init__(self, missing):
        super().__init__("missing artifacts: " + ", ".join(missing))
        self.missing = list(missing)


# -- small IO helpers -------------------------------------------------------------

def _num(x):
    x = float(x)
    return repr(x) if np.isfinite(x) else ("inf" if x > 0 else ("-inf" if x < 0 else "nan"))


def _write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    Path(path).write_text(buf.getvalue())


def _write_json(path, data):
    Path(path).write_text(json.dumps({"schema_version": SCHEMA_VERSION, **data}, indent=2, sort_keys=True) + "\n")


def _safe(name):
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name) or "seq"


def _codes_str(codes):
    return "-".join(str(int(c)) for c in codes)


def _parse_codes(text):
    try:
        codes = tuple(int(t) for t in text.split("-"))
    except ValueError:
        raise InputDataError(f"cannot parse codes {text!r}") from None
    if any(not 0 <= c < sq.N_CODES for c in codes):
        raise InputDataError(f"code out of range in {text!r}")
    return codes


def _prepare_out(cfg):
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.resolved.yaml").write_text(cfg.snapshot())
    return out


def _manifest(out, command, artifacts, **extra):
    _write_json(out / "manifest.json", {"command": command, "artifacts": sorted(artifacts), **extra})


def _load_sequences(spec, sim):
    """Sequences from a file or the shipped baseline library, with the simulator's timing."""
    timing = {"tau": sim.tau, "rabi": sim.rabi}
    if spec == BASELINES_TOKEN:
        out = []
        for name in sq.BASELINE_NAMES:
            b = sq.baseline(name, null_slot=sim.null_slot, **timing)
            out.append(b)
        return out
    path = Path(spec)
    if not path.is_file():
        raise InputDataError(f"cannot read sequence file {spec}")
    _, seqs = sq.read_sequences(path, null_slot=sim.null_slot, **timing)
    return seqs


# -- simulate ---------------------------------------------------------------------

def _simulate_one(args):
    seq, params = args
    curve = sim_mod.coherence_curve(seq, params)
    fit = sim_mod.fit_exponential(curve)
    simplified = sim_mod.simplified_score(seq, params)
    return curve, fit, simplified


def _map(fn, items, jobs):
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as ex:
        return list(ex.map(fn, items))


def cmd_simulate(cfg, args):
    seqs = _load_sequences(args.sequences, cfg.simulator)
    out = _prepare_out(cfg)
    (out / "curves").mkdir(exist_ok=True)
    (out / "fits").mkdir(exist_ok=True)
    results = _map(_simulate_one, [(s, cfg.simulator) for s in seqs], cfg.jobs)
    rows, artifacts, names = [], ["fits.csv"], []
    for seq, (curve, fit, simplified) in zip(seqs, results):
        name = _safe(seq.name)
        while name in names:
            name += "_"
        names.append(name)
        (out / "curves" / f"{name}.csv").write_text(curve.to_csv())
        T_max = float(curve.times[-1])
        (out / "fits" / f"{name}.json").write_text(
            fit.to_json(T_max, name=seq.name, simplified_score=simplified) + "\n")
        artifacts += [f"curves/{name}.csv", f"fits/{name}.json"]
        kind = "protocol" if isinstance(seq, sq.Protocol) else "word"
        codes = "" if kind == "protocol" else _codes_str(seq.codes)
        rows.append([name, kind, codes, _num(fit.C), _num(fit.kappa), _num(fit.coherence_time),
                     _num(sim_mod.coherence_score(fit, T_max)), _num(simplified),
                     int(any(fit.unfittable.values()))])
    _write_csv(out / "fits.csv", ["name", "kind", "seq_codes", "C", "kappa", "coherence_time_us",
                                  "coherence_score", "simplified_score", "unfittable"], rows)
    _manifest(out, "simulate", artifacts, names=names)
    print(f"simulated {len(seqs)} sequences -> {out}")
    return EXIT_OK


# -- indicators -------------------------------------------------------------------

def cmd_indicators(cfg, args):
    seqs = [s for s in _load_sequences(args.sequences, cfg.simulator) if not isinstance(s, sq.Protocol)]
    if not seqs:
        raise InputDataError("no pulse words in the sequence file")
    R = cfg.repetitions if args.repetitions is None else args.repetitions
    if R < 1:
        raise config_mod.ConfigurationError("--repetitions must be >= 1")
    out = _prepare_out(cfg)
    header = ["name", "length", "seq_codes", "i1", "i2", "i3", "i4", "i5"]
    header += [f"i{k}_r{r}" for k in range(1, 6) for r in range(1, R + 1)]
    rows = []
    for s in seqs:
        codes = np.array(s.codes)[None]
        ind = indicator_matrix(codes, cfg.simulator.null_slot)[0]
        ser = series_batch(codes, R, cfg.simulator.null_slot)[0]
        rows.append([s.name, len(s), _codes_str(s.codes), *map(_num, ind), *map(_num, ser.ravel())])
    _write_csv(out / "indicators.csv", header, rows)
    _manifest(out, "indicators", ["indicators.csv"], repetitions=R)
    print(f"indicators for {len(rows)} sequences -> {out / 'indicators.csv'}")
    return EXIT_OK


# -- search -----------------------------------------------------------------------

def _variant_seed(master, i):
    if i == 0:
        return master
    return int(np.random.SeedSequence(master, spawn_key=(1000 + i,)).generate_state(1)[0])


def _search_task(args):
    optimizer, scfg, params = args
    return search_mod.run(optimizer, scfg, params)


def cmd_search(cfg, args):
    optimizer = cfg.optimizer
    n = cfg.n_variants
    variants = sim_mod.ensemble_params(cfg.simulator, n)
    tasks = [(optimizer, replace(cfg.search, seed=_variant_seed(cfg.seed, i)), p) for i, p in enumerate(variants)]
    out = _prepare_out(cfg)
    results = _map(_search_task, tasks, cfg.jobs)
    artifacts = ["variants.json", "elite.txt"]
    elite = []
    seen = set()
    for (_, scfg, p), res in zip(tasks, results):
        vdir = out / p.label
        vdir.mkdir(exist_ok=True)
        (vdir / "trajectory.csv").write_text(res.trajectory_csv())
        sq.write_sequences(vdir / "ranked.txt", res.ranked_sequences(p),
                           {"variant": p.label, "optimizer": optimizer, "tau": p.tau, "rabi": p.rabi,
                            "null_slot": p.null_slot})
        stats = {k: (v if not isinstance(v, float) or np.isfinite(v) else None)
                 for k, v in res.stats.items() if k != "chain"}
        best_codes, best = res.best
        _write_json(vdir / "summary.json", {"variant": p.label, "optimizer": optimizer, "search_seed": scfg.seed,
                                            "best_codes": list(best_codes) if best_codes else None,
                                            "best_simplified": best, "stats": stats})
        artifacts += [f"{p.label}/trajectory.csv", f"{p.label}/ranked.txt", f"{p.label}/summary.json"]
        for codes, score in res.ranked[:args.elite]:
            if codes not in seen:
                seen.add(codes)
                elite.append(sq.PulseSequence(codes, tau=p.tau, rabi=p.rabi, null_slot=p.null_slot,
                                              name=f"{p.label}_{len(elite):04d}"))
    sq.write_sequences(out / "elite.txt", elite, {"optimizer": optimizer, "variants": n})
    _write_json(out / "variants.json", {"variants": {p.label: _params_json(p) for p in variants}})
    _manifest(out, "search", artifacts, optimizer=optimizer, variants=[p.label for p in variants])
    for (_, _, p), res in zip(tasks, results):
        print(f"{p.label}: best simplified {res.best[1]:.4f} after {len(res.trajectory)} simulations")
    return EXIT_OK


def _params_json(p):
    d = p.to_dict()
    d["cycle_grid"] = list(d["cycle_grid"])
    d["score_points"] = list(d["score_points"])
    return d


def _params_from_json(d):
    return sim_mod.SimulatorParams.from_dict(d)


# -- surrogate --------------------------------------------------------------------

DATASET_HEADER = ["seq_codes", "simplified", "i1", "i2", "i3"]


def _read_dataset(path):
    path = Path(path)
    if not path.is_file():
        raise MissingArtifact([str(path)])
    reader = csv.DictReader(io.StringIO(path.read_text()))
    if reader.fieldnames is None or "seq_codes" not in reader.fieldnames:
        raise InputDataError(f"{path}: dataset needs a seq_codes column")
    codes, ys = [], []
    for lineno, row in enumerate(reader, start=2):
        try:
            codes.append(_parse_codes(row["seq_codes"]))
            ys.append(float(row["simplified"]) if row.get("simplified") not in (None, "") else np.nan)
        except (InputDataError, ValueError) as exc:
            raise InputDataError(f"{path} line {lineno}: {exc}") from None
    if not codes:
        raise InputDataError(f"{path}: empty dataset")
    if len({len(c) for c in codes}) != 1:
        raise InputDataError(f"{path}: all words must have the same length")
    return np.array(codes), np.array(ys)


def _dataset_targets(cfg, codes, y):
    if cfg.surrogate.target == "indicators":
        return indicator_matrix(codes, cfg.simulator.null_slot)[:, :3]
    if np.isnan(y).any():
        raise InputDataError("dataset lacks simplified scores")
    return y


def _score_task(args):
    chunk, params = args
    return [sim_mod.simplified_score(tuple(c), params) for c in chunk]


def generate_dataset(cfg, size=None, extra_codes=None):
    """Random words (plus optional extra words) scored on the configured simulator."""
    size = cfg.surrogate.dataset_size if size is None else size
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(11,)))
    n_extra = 0 if extra_codes is None else len(extra_codes)
    if cfg.surrogate.target == "indicators":
        codes = sur_mod.indicator_training_words(rng, max(size - n_extra, 0), cfg.search.length)
    else:
        codes = sq.random_codes(rng, cfg.search.length, cfg.search.alphabet, size=max(size - n_extra, 0))
    if n_extra:
        codes = np.concatenate([codes, np.asarray(extra_codes, dtype=int)])
    if cfg.surrogate.target == "indicators":
        y = np.full(len(codes), np.nan)
    else:
        chunks = [codes[i::max(cfg.jobs, 1)] for i in range(max(cfg.jobs, 1))]
        parts = _map(_score_task, [(c, cfg.simulator) for c in chunks], cfg.jobs)
        y = np.empty(len(codes))
        for i, part in enumerate(parts):
            y[i::max(cfg.jobs, 1)] = part
    return codes, y


def _write_dataset(path, codes, y, null_slot):
    ind = indicator_matrix(codes, null_slot)
    rows = [[_codes_str(c), "" if np.isnan(v) else _num(v), *map(_num, i[:3])] for c, v, i in zip(codes, y, ind)]
    _write_csv(path, DATASET_HEADER, rows)


def _load_model(path):
    path = Path(path)
    if not path.is_file():
        raise MissingArtifact([str(path)])
    try:
        return sur_mod.load_model(path.read_text())
    except (ValueError, KeyError) as exc:
        raise InputDataError(f"{path}: not a model file ({exc})") from None


def _report_with_members(model, X, y, kind, target):
    pred = model.predict_features(X)
    p, t = pred.reshape(-1), np.asarray(y, float).reshape(-1)
    folds = []
    for j, m in enumerate(getattr(model, "members", [model])):
        pm = m.predict_features(X).reshape(-1)
        folds.append({"fold": j, "n": int(len(X)), "r_squared": sur_mod.r_squared(t, pm),
                      "mae": float(np.mean(np.abs(pm - t)))})
    return sur_mod.EvalReport(sur_mod.r_squared(t, p), float(np.mean(np.abs(p - t))), folds,
                              list(zip(p.tolist(), t.tolist())), kind, target)


def cmd_surrogate(cfg, args):
    sc = cfg.surrogate
    out = _prepare_out(cfg)
    if args.action == "train":
        if args.dataset:
            codes, y = _read_dataset(args.dataset)
        else:
            extra = None
            if args.extra:
                _, extra_seqs = sq.read_sequences(args.extra)
                extra = [s.codes for s in extra_seqs if not isinstance(s, sq.Protocol)]
            codes, y = generate_dataset(cfg, extra_codes=extra)
        _write_dataset(out / "dataset.csv", codes, y, cfg.simulator.null_slot)
        Y = _dataset_targets(cfg, codes, y)
        X = sur_mod.featurize_batch(codes, sc.kind, sc.R, cfg.simulator.null_slot)
        report, model = sur_mod.cross_validate(X, Y, sc.spec, cfg.seed, sc.folds, sc.kind, sc.R,
                                               cfg.simulator.null_slot)
        for m in model.members:
            m.length = codes.shape[1]
            if sc.target == "indicators":
                m.target_names = ("i1", "i2", "i3")
        report.target = sc.target
        (out / "model.json").write_text(sur_mod.dump_model(model) + "\n")
        (out / "report.json").write_text(report.to_json() + "\n")
        _manifest(out, "surrogate train", ["dataset.csv", "model.json", "report.json"], kind=sc.kind)
        print(f"{sc.kind}: cross-validated R^2 {report.r_squared:.4f}, MAE {report.mae:.4f}")
        return EXIT_OK
    model = _load_model(args.model)
    if model.kind != sc.kind:
        raise config_mod.ConfigurationError(
            f"model was trained on {model.kind} features but the config asks for {sc.kind}")
    if args.action == "eval":
        if not args.dataset:
            raise config_mod.ConfigurationError("surrogate eval needs --dataset")
        codes, y = _read_dataset(args.dataset)
        Y = _dataset_targets(cfg, codes, y)
        X = sur_mod.featurize_batch(codes, sc.kind, sc.R, cfg.simulator.null_slot)
        try:
            report = _report_with_members(model, X, Y, sc.kind, sc.target)
        except sur_mod.FeatureMismatchError as exc:
            raise config_mod.ConfigurationError(str(exc)) from None
        (out / "report.json").write_text(report.to_json() + "\n")
        _manifest(out, "surrogate eval", ["report.json"], kind=sc.kind)
        print(f"R^2 {report.r_squared:.4f}, MAE {report.mae:.4f}")
        return EXIT_OK
    # predict
    if not args.sequences:
        raise config_mod.ConfigurationError("surrogate predict needs --sequences")
    seqs = _load_sequences(args.sequences, cfg.simulator)
    names = list(model.target_names)
    rows = []
    for s in seqs:
        if isinstance(s, sq.Protocol):
            rows.append([s.name, "", "", "protocol", *[""] * len(names)])
            continue
        try:
            pred = model.predict(np.array(s.codes)[None])[0]
            rows.append([s.name, len(s), _codes_str(s.codes), "ok", *map(_num, pred)])
        except sur_mod.FeatureMismatchError:
            rows.append([s.name, len(s), _codes_str(s.codes), "length_mismatch", *[""] * len(names)])
    _write_csv(out / "predictions.csv", ["name", "length", "seq_codes", "status", *names], rows)
    _manifest(out, "surrogate predict", ["predictions.csv"], kind=sc.kind)
    print(f"{len(rows)} predictions -> {out / 'predictions.csv'}")
    return EXIT_OK


# -- report -----------------------------------------------------------------------

def _check_run_dir(run):
    manifest = run / "manifest.json"
    if not manifest.is_file():
        raise MissingArtifact([str(manifest)])
    data = json.loads(manifest.read_text())
    missing = [a for a in data.get("artifacts", []) if not (run / a).is_file()]
    if missing:
        raise MissingArtifact([str(run / a) for a in missing])
    return data


def _anisotropy_rows(label, entries, params):
    rows = []
    for name, codes in entries:
        r = sim_mod.anisotropy_report(codes, params)
        f = r["fit"]
        rows.append([label, name, _codes_str(codes), *map(_num, r["net_axis"]), _num(r["net_angle"]),
                     r["aligned_axis"], *(_num(f.rate[a]) for a in "xyz"), int(r["spin_lock_like"])])
    return rows


ANISO_HEADER = ["variant", "name", "seq_codes", "net_axis_x", "net_axis_y", "net_axis_z", "net_angle",
                "aligned_axis", "kappa_x", "kappa_y", "kappa_z", "spin_lock_like"]


def _report_search(run, manifest, args):
    variants = json.loads((run / "variants.json").read_text())["variants"]
    best_rows, score_rows, aniso = [], [], []
    for label in manifest["variants"]:
        params = _params_from_json(variants[label])
        traj = search_mod.read_trajectory((run / label / "trajectory.csv").read_text())
        droid = sq.baseline("droid_r2d2").codes
        ref = sim_mod.simplified_score(droid, params) if len(traj) and \
            len(_parse_codes(traj[0]["seq_codes"])) == len(droid) else float("nan")
        for row in traj:
            best_rows.append([label, row["eval_idx"], row["best_so_far"]])
        ranked = sorted(traj, key=lambda r: (-float(r["simplified"]), r["seq_codes"]))
        for rank, row in enumerate(ranked):
            s = float(row["simplified"])
            score_rows.append([label, rank, row["seq_codes"], row["simplified"], _num(s / ref) if ref else "nan"])
        entries = [("net_x_demo", sq.NET_X_DEMO)]
        entries += [(f"{label}_top{k}", _parse_codes(r["seq_codes"])) for k, r in enumerate(ranked[:args.top])]
        aniso += _anisotropy_rows(label, entries, params)
    _write_csv(run / "report_best_so_far.csv", ["variant", "eval_idx", "best_so_far"], best_rows)
    _write_csv(run / "report_scores.csv", ["variant", "rank", "seq_codes", "simplified", "normalized_vs_droid"],
               score_rows)
    _write_csv(run / "report_anisotropy.csv", ANISO_HEADER, aniso)
    return ["report_best_so_far.csv", "report_scores.csv", "report_anisotropy.csv"]


def _report_simulate(run, manifest, args):
    rows = list(csv.DictReader(io.StringIO((run / "fits.csv").read_text())))
    ref = next((float(r["coherence_score"]) for r in rows if r["name"] == "droid_r2d2"), float("nan"))
    cfg = config_mod.from_dict(yaml.safe_load((run / "config.resolved.yaml").read_text()), jobs=1)
    decay, aniso = [], []
    for r in rows:
        cs = float(r["coherence_score"])
        decay.append([r["name"], r["kind"], r["C"], r["kappa"], r["coherence_time_us"], r["coherence_score"],
                      _num(cs / ref) if np.isfinite(ref) and ref else "nan"])
        if r["kind"] == "word":
            aniso += _anisotropy_rows("", [(r["name"], _parse_codes(r["seq_codes"]))], cfg.simulator)
    _write_csv(run / "report_decay.csv", ["name", "kind", "C", "kappa", "coherence_time_us", "coherence_score",
                                          "normalized_vs_droid"], decay)
    _write_csv(run / "report_anisotropy.csv", ANISO_HEADER, aniso)
    return ["report_decay.csv", "report_anisotropy.csv"]


def _report_surrogate(run, manifest, args):
    rep = sur_mod.EvalReport.from_json((run / "report.json").read_text())
    _write_csv(run / "report_folds.csv", ["fold", "n", "r_squared", "mae"],
               [[f["fold"], f["n"], _num(f["r_squared"]), _num(f["mae"])] for f in rep.folds])
    return ["report_folds.csv"]


def cmd_report(cfg, args):
    run = Path(args.run_dir)
    manifest = _check_run_dir(run)
    command = manifest.get("command", "")
    if command == "search":
        written = _report_search(run, manifest, args)
    elif command == "simulate":
        written = _report_simulate(run, manifest, args)
    elif command in ("surrogate train", "surrogate eval"):
        written = _report_surrogate(run, manifest, args)
    else:
        raise InputDataError(f"no report for command {command!r}")
    print("wrote " + ", ".join(written))
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration")
    common.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common.add_argument("--jobs", type=int, help="worker processes (default: logical cores)")
    common.add_argument("--out", help="output directory")

    parser = argparse.ArgumentParser(prog="doess", description="Pulse-sequence design by indicator-filtered tree search.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="coherence curves and fits")
    p.add_argument("--sequences", required=True, help=f"sequence file, or {BASELINES_TOKEN}")
    p.add_argument("--metric", choices=sim_mod.METRICS)
    p.add_argument("--frame", choices=sim_mod.FRAMES)
    p.add_argument("-K", type=int, dest="K", help="realizations")

    p = sub.add_parser("indicators", parents=[common], help="indicator table")
    p.add_argument("--sequences", required=True, help=f"sequence file, or {BASELINES_TOKEN}")
    p.add_argument("--repetitions", type=int, help="series length R")

    p = sub.add_parser("search", parents=[common], help="run optimizers over simulator variants")
    p.add_argument("--optimizer", choices=search_mod.OPTIMIZERS)
    p.add_argument("--variants", type=int, help="number of simulator variants")
    p.add_argument("--budget", type=int, help="simulations per variant")
    p.add_argument("--elite", type=int, default=20, help="top words per variant in elite.txt")

    p = sub.add_parser("surrogate", parents=[common], help="train / evaluate / apply regressors")
    p.add_argument("action", choices=("train", "eval", "predict"))
    p.add_argument("--dataset", help="dataset CSV (seq_codes, simplified)")
    p.add_argument("--extra", help="sequence file appended to a generated dataset")
    p.add_argument("--model", help="model.json from a training run")
    p.add_argument("--sequences", help=f"sequence file, or {BASELINES_TOKEN} (predict)")
    p.add_argument("--kind", choices=sur_mod.FEATURE_KINDS)

    p = sub.add_parser("report", parents=[common], help="summary tables for a run directory")
    p.add_argument("run_dir")
    p.add_argument("--top", type=int, default=3, help="elite words per variant in the anisotropy table")
    return parser


COMMANDS = {"simulate": cmd_simulate, "indicators": cmd_indicators, "search": cmd_search,
            "surrogate": cmd_surrogate, "report": cmd_report}


def _resolve(args):
    out = args.out
    if args.command == "report" and out is None:
        out = args.run_dir
    cfg = config_mod.load(args.config, seed=args.seed, jobs=args.jobs, out=out)
    sim_changes = {}
    if getattr(args, "metric", None):
        sim_changes["metric"] = args.metric
    if getattr(args, "frame", None):
        sim_changes["frame"] = args.frame
    if getattr(args, "K", None) is not None:
        sim_changes["K"] = args.K
    if sim_changes:
        cfg = config_mod.with_simulator(cfg, **sim_changes)
    if getattr(args, "optimizer", None):
        cfg = replace(cfg, optimizer=args.optimizer)
    if getattr(args, "variants", None) is not None:
        if args.variants < 1:
            raise config_mod.ConfigurationError("--variants must be >= 1")
        cfg = replace(cfg, n_variants=args.variants)
    if getattr(args, "budget", None) is not None:
        cfg = replace(cfg, search=replace(cfg.search, eval_budget=args.budget))
    if getattr(args, "kind", None):
        cfg = replace(cfg, surrogate=replace(cfg.surrogate, kind=args.kind))
    return cfg


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve(args)
        return COMMANDS[args.command](cfg, args)
    except (config_mod.ConfigurationError, sur_mod.TrainingError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (sq.SequenceFileError, InputDataError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except MissingArtifact as exc:
        print(f"missing artifact: {exc}", file=sys.stderr)
        return EXIT_MISSING


if __name__ == "__main__":
    sys.exit(main())
