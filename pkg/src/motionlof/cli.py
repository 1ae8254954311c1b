"""Command-line front end.

Subcommands: fit, score, eval, synth, bench, plot. Exit codes are a stable
contract: 0 success, 2 input/format/usage error, 3 insufficient data.

Missions live on disk as a pair of files sharing a stem:
``<name>.imu.csv`` and ``<name>.frames.txt``; commands take the IMU path and
derive the frame path. Every command that writes into an output directory
also drops a ``run.json`` echoing the fully resolved configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import lof as lof_mod
from . import pipeline, synth
from .errors import ConfigError, FormatError, InsufficientDataError, MotionLofError
from .ingest import load_mission, write_mission
from .lof import STATUS_SCORED
from .spectral import DEFAULT_BINS, feature_vector
from .windowing import DEFAULT_MIN_SAMPLES, DEFAULT_SPAN, STATUS_OK, Window

FRAME_BUDGET_MS = 1000.0 / 30.0


def _fmt(v):
    return repr(float(v))


def frames_path_for(imu_path):
    imu_path = str(imu_path)
    if imu_path.endswith(".imu.csv"):
        return imu_path[:-len(".imu.csv")] + ".frames.txt"
    if imu_path.endswith(".imu.jsonl"):
        return imu_path[:-len(".imu.jsonl")] + ".frames.txt"
    return imu_path + ".frames.txt"


def _load_mission_arg(path):
    p = Path(path)
    if not p.exists():
        raise FormatError(f"mission file not found: {path}")
    fp = Path(frames_path_for(path))
    if not fp.exists():
        raise FormatError(f"frame file not found: {fp} (expected next to {path})")
    return load_mission(p, fp, mission_id=p.name.split(".imu.")[0])


def read_config_file(path):
    """Parse a key=value config file (comments with '#', blank lines ignored)."""
    cfg = {}
    with open(path, encoding="utf-8") as fh:
        for line_num, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}: line {line_num}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            cfg[key] = value
    return cfg


def _resolved(args, keys):
    return {k: getattr(args, k) for k in keys}


def _write_run_json(out_dir, command, resolved):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {"command": command, "config": resolved}
    (out_dir / "run.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                                      encoding="utf-8")


def _apply_config_file(args, parser_defaults):
    """Fill args from --config for keys the command line left at default."""
    if not getattr(args, "config", None):
        return
    file_cfg = read_config_file(args.config)
    casts = {"k": int, "bins": int, "span": int, "min_samples": int,
             "offset": float, "threshold": float, "seed": int}
    for key, raw in file_cfg.items():
        attr = key.replace("-", "_")
        if attr not in parser_defaults:
            continue
        if getattr(args, attr) == parser_defaults[attr]:
            cast = casts.get(attr, str)
            try:
                setattr(args, attr, cast(raw))
            except ValueError:
                raise ConfigError(f"{args.config}: bad value for {key}: {raw!r}")


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------

def cmd_fit(args):
    missions = [_load_mission_arg(p) for p in args.missions]
    X = pipeline.training_matrix(missions, args.span, args.bins, args.min_samples)
    if X.shape[0] <= args.k:
        raise InsufficientDataError(
            f"only {X.shape[0]} scored windows across {len(missions)} missions; "
            f"need more than k={args.k}")
    model = lof_mod.fit(X, k=args.k, offset=args.offset, bins=args.bins,
                        span=args.span, min_samples=args.min_samples)
    lof_mod.save(model, args.model)

    out_dir = Path(args.out)
    resolved = _resolved(args, ("k", "bins", "span", "min_samples", "offset", "model"))
    resolved["missions"] = list(args.missions)
    _write_run_json(out_dir, "fit", resolved)
    report = {"n": model.n, "d": model.d, "k": model.k, "bins": model.bins,
              "span": model.span, "min_samples": model.min_samples,
              "offset": model.offset, "missions": list(args.missions)}
    (out_dir / "fit_report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                                             encoding="utf-8")
    print(f"fitted LOF model: n={model.n} d={model.d} k={model.k} -> {args.model}")
    return 0


# ---------------------------------------------------------------------------
# score
# ---------------------------------------------------------------------------

def write_scores_csv(path, scores):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("frame_index,t,lof,abnormality,status\n")
        for s in scores:
            if s.status == STATUS_SCORED:
                fh.write(f"{s.frame_index},{_fmt(s.t)},{_fmt(s.lof)},"
                         f"{_fmt(s.abnormality)},{s.status}\n")
            else:
                fh.write(f"{s.frame_index},{_fmt(s.t)},,,{s.status}\n")


def cmd_score(args):
    model = lof_mod.load(args.model)
    mission = _load_mission_arg(args.mission)
    scores = pipeline.score_mission(model, mission, threshold=args.threshold)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{mission.id}.scores.csv"
    write_scores_csv(csv_path, scores)

    if args.dump_features:
        recs = pipeline.mission_features(mission, model.span, model.bins,
                                         model.min_samples)
        with open(args.dump_features, "w", encoding="utf-8", newline="\n") as fh:
            d = model.d
            fh.write("frame_index," + ",".join(f"f{i}" for i in range(d)) + "\n")
            for rec in recs:
                if rec.features is not None:
                    fh.write(str(rec.frame_index) + ","
                             + ",".join(_fmt(v) for v in rec.features) + "\n")

    resolved = _resolved(args, ("model", "threshold"))
    resolved["mission"] = args.mission
    _write_run_json(out_dir, "score", resolved)
    n_scored = sum(1 for s in scores if s.status == STATUS_SCORED)
    print(f"scored {n_scored}/{len(scores)} frames -> {csv_path}")
    return 0


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

def _parse_labeled(arg):
    if ":" not in arg:
        raise FormatError(f"mission {arg!r} has no label; use PATH:normal or "
                          f"PATH:abnormal")
    path, label = arg.rsplit(":", 1)
    if label not in ("normal", "abnormal"):
        raise FormatError(f"mission {arg!r}: label must be normal or abnormal")
    return path, label


def cmd_eval(args):
    model = lof_mod.load(args.model)
    tau = args.threshold
    per_mission = []
    for arg in args.missions:
        path, label = _parse_labeled(arg)
        mission = _load_mission_arg(path)
        scores = [s for s in pipeline.score_mission(model, mission, threshold=tau)
                  if s.status == STATUS_SCORED]
        values = np.array([s.abnormality for s in scores], dtype=np.float64)
        flagged = int(np.sum(values < tau)) if values.size else 0
        per_mission.append({
            "mission": mission.id,
            "path": path,
            "label": label,
            "frames_scored": int(values.size),
            "frames_flagged": flagged,
            "flag_rate": flagged / values.size if values.size else None,
            "abnormality_min": float(values.min()) if values.size else None,
            "abnormality_mean": float(values.mean()) if values.size else None,
            "abnormality_max": float(values.max()) if values.size else None,
        })

    def _rate(label, predicate):
        total = sum(m["frames_scored"] for m in per_mission if m["label"] == label)
        hits = sum(predicate(m) for m in per_mission if m["label"] == label)
        return hits / total if total else None

    normal_pass = _rate("normal", lambda m: m["frames_scored"] - m["frames_flagged"])
    abnormal_catch = _rate("abnormal", lambda m: m["frames_flagged"])
    report = {"threshold": tau, "missions": per_mission,
              "normal_pass_rate": normal_pass, "abnormal_catch_rate": abnormal_catch}

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "metrics.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                                          encoding="utf-8")
    lines = [f"threshold: {tau}",
             f"normal pass rate:   {normal_pass}",
             f"abnormal catch rate: {abnormal_catch}", ""]
    for m in per_mission:
        lines.append(f"{m['mission']} [{m['label']}]: scored={m['frames_scored']} "
                     f"flagged={m['frames_flagged']} min={m['abnormality_min']} "
                     f"mean={m['abnormality_mean']} max={m['abnormality_max']}")
    text = "\n".join(lines) + "\n"
    (out_dir / "metrics.txt").write_text(text, encoding="utf-8")
    resolved = _resolved(args, ("model", "threshold"))
    resolved["missions"] = list(args.missions)
    _write_run_json(out_dir, "eval", resolved)
    print(text, end="")
    return 0


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------

_SYNTH_DEFAULTS = {
    "seed": 0, "duration": 30.0, "imu_rate": 90.0, "frame_rate": 30.0,
    "noise_w": 0.05, "noise_a": 0.05, "n_normal": 6, "n_abnormal": 6,
    "flip_t0": 15.0, "flip_duration": 0.8, "flip_peak_rate": 10.0,
    "flip_axis": "x",
}


def _scenario_from_file(path, base_seed=None):
    cfg = dict(_SYNTH_DEFAULTS)
    if path:
        raw = read_config_file(path)
        for key, value in raw.items():
            if key not in cfg:
                raise ConfigError(f"{path}: unknown scenario key {key!r}")
            if key in ("n_normal", "n_abnormal", "seed"):
                cast = int
            elif key == "flip_axis":
                cast = str
            else:
                cast = float
            try:
                cfg[key] = cast(value)
            except ValueError:
                raise ConfigError(f"{path}: bad value for {key}: {value!r}")
    if base_seed is not None:
        cfg["seed"] = base_seed
    return cfg


def cmd_synth(args):
    cfg = _scenario_from_file(args.config, args.seed)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    base = synth.ScenarioConfig(seed=cfg["seed"], duration=cfg["duration"],
                                imu_rate=cfg["imu_rate"], frame_rate=cfg["frame_rate"],
                                noise_w=cfg["noise_w"], noise_a=cfg["noise_a"])
    flip = synth.FlipConfig(t0=cfg["flip_t0"], duration=cfg["flip_duration"],
                            peak_rate=cfg["flip_peak_rate"], axis=cfg["flip_axis"])
    written = []
    for i in range(cfg["n_normal"]):
        mission = synth.gen_normal_mission(replace(base, seed=cfg["seed"] + i))
        name = f"normal_{i + 1:02d}"
        write_mission(mission, out_dir / f"{name}.imu.csv", out_dir / f"{name}.frames.txt")
        written.append(name)
    for i in range(cfg["n_abnormal"]):
        mission = synth.gen_flip_mission(replace(base, seed=cfg["seed"] + 100 + i,
                                                 flip=flip))
        name = f"abnormal_{i + 1:02d}"
        write_mission(mission, out_dir / f"{name}.imu.csv", out_dir / f"{name}.frames.txt")
        written.append(name)
    _write_run_json(out_dir, "synth", cfg)
    print(f"wrote {len(written)} missions to {out_dir}")
    return 0


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

def cmd_bench(args):
    if args.reps < 1:
        raise ConfigError(f"repetitions must be >= 1, got {args.reps}")
    if args.model:
        model = lof_mod.load(args.model)
    else:
        rng = np.random.default_rng(0)
        X = rng.standard_normal((args.n, args.d))
        model = lof_mod.fit(X, k=args.k, bins=args.d // 10 if args.d % 10 == 0 else 0,
                            span=DEFAULT_SPAN, min_samples=DEFAULT_MIN_SAMPLES)

    # one full frame scoring = feature extraction of one window + LOF query
    rng = np.random.default_rng(1)
    n_samples = 9
    t = np.arange(n_samples) / 90.0
    bins = model.bins if model.bins > 0 else DEFAULT_BINS
    times_ms = np.empty(args.reps)
    for r in range(args.reps):
        channels = rng.standard_normal((n_samples, 10))
        window = Window(frame_index=DEFAULT_SPAN, t_start=t[0], t_end=t[-1] + 1e-3,
                        t=t, channels=channels,
                        mean_rate=(n_samples - 1) / (t[-1] - t[0]), status=STATUS_OK)
        t0 = time.perf_counter()
        features = feature_vector(window, bins)
        if features.shape[0] != model.d:
            features = np.resize(features, model.d)
        lof_mod.lof_of_query(model, features)
        times_ms[r] = (time.perf_counter() - t0) * 1e3

    p50, p95 = np.percentile(times_ms, [50, 95])
    worst = times_ms.max()
    ok = p95 < args.budget_ms
    report = {"n": model.n, "d": model.d, "k": model.k, "reps": args.reps,
              "p50_ms": float(p50), "p95_ms": float(p95), "max_ms": float(worst),
              "budget_ms": args.budget_ms, "within_budget": bool(ok)}
    print(f"frame scoring latency over {args.reps} reps (n={model.n}, d={model.d}, "
          f"k={model.k}):")
    print(f"  p50 = {p50:.3f} ms   p95 = {p95:.3f} ms   max = {worst:.3f} ms")
    print(f"  budget {args.budget_ms:.1f} ms: {'PASS' if ok else 'FAIL'}")
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "bench.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                                            encoding="utf-8")
        _write_run_json(out_dir, "bench",
                        _resolved(args, ("n", "d", "k", "reps", "budget_ms")))
    return 0


# ---------------------------------------------------------------------------
# plot
# ---------------------------------------------------------------------------

def read_scores_csv(path):
    """Read a score CSV back into a list of (frame_index, t, lof, abn, status)."""
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "frame_index,t,lof,abnormality,status":
            raise FormatError(f"{path}: not a score CSV (header {header!r})")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            fi, t, lof, abn, status = line.split(",")
            rows.append((int(fi), float(t),
                         float(lof) if lof else None,
                         float(abn) if abn else None, status))
    return rows


def cmd_plot(args):
    import matplotlib
    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "motionlof"
    import matplotlib.pyplot as plt

    segments = []
    for path in args.scores:
        rows = read_scores_csv(path)
        if not rows:
            raise FormatError(f"{path}: score CSV has no rows")
        segments.append((Path(path).name.replace(".scores.csv", ""), rows))

    fig, ax = plt.subplots(figsize=(10, 4))
    offset = 0
    for label, rows in segments:
        x = np.array([offset + r[0] for r in rows], dtype=float)
        # gaps (NaN) for warmup/insufficient frames, not zeros
        y = np.array([r[3] if r[4] == STATUS_SCORED else np.nan for r in rows])
        ax.plot(x, y, linewidth=1.0, label=label)
        if offset:
            ax.axvline(offset, color="0.6", linewidth=0.8)
        offset += rows[-1][0] + 1
    ax.axhline(args.threshold, color="red", linestyle="--", linewidth=1.0,
               label=f"threshold {args.threshold}")
    ax.set_xlabel("frame")
    ax.set_ylabel("abnormality measure")
    ax.legend(loc="lower left", fontsize=8)
    fig.tight_layout()
    fig.savefig(args.out, format="svg", metadata={"Date": None})
    plt.close(fig)
    print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# parser / entry point
# ---------------------------------------------------------------------------

def build_parser():
    """Build the argument parser; returns (parser, {command: subparser})."""
    parser = argparse.ArgumentParser(prog="motionlof",
                                     description="IMU motion-novelty scoring pipeline")
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {}

    def add_common(p, *, threshold=False):
        p.add_argument("--config", default=None, help="key=value config file; "
                       "command-line flags win")
        p.add_argument("--k", type=int, default=lof_mod.DEFAULT_K)
        p.add_argument("--bins", type=int, default=DEFAULT_BINS)
        p.add_argument("--span", type=int, default=DEFAULT_SPAN)
        p.add_argument("--min-samples", dest="min_samples", type=int,
                       default=DEFAULT_MIN_SAMPLES)
        p.add_argument("--offset", type=float, default=lof_mod.DEFAULT_OFFSET)
        if threshold:
            p.add_argument("--threshold", type=float, default=lof_mod.DEFAULT_THRESHOLD)

    p = commands["fit"] = sub.add_parser("fit", help="fit a LOF model on normal missions")
    p.add_argument("missions", nargs="+", metavar="IMU_CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    add_common(p)
    p.set_defaults(func=cmd_fit)

    p = commands["score"] = sub.add_parser("score", help="score one mission against a model")
    p.add_argument("mission", metavar="IMU_CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=float, default=lof_mod.DEFAULT_THRESHOLD)
    p.add_argument("--config", default=None)
    p.add_argument("--dump-features", default=None,
                   help="also write the per-frame feature matrix to this CSV")
    p.set_defaults(func=cmd_score)

    p = commands["eval"] = sub.add_parser("eval", help="evaluate labeled missions against a model")
    p.add_argument("missions", nargs="+", metavar="IMU_CSV:LABEL")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--threshold", type=float, default=lof_mod.DEFAULT_THRESHOLD)
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_eval)

    p = commands["synth"] = sub.add_parser("synth", help="generate synthetic missions")
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None, help="scenario key=value file")
    p.add_argument("--seed", type=int, default=None, help="override base seed")
    p.set_defaults(func=cmd_synth)

    p = commands["bench"] = sub.add_parser("bench", help="measure single-frame scoring latency")
    p.add_argument("--model", default=None)
    p.add_argument("--n", type=int, default=5000)
    p.add_argument("--d", type=int, default=160)
    p.add_argument("--k", type=int, default=lof_mod.DEFAULT_K)
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--budget-ms", dest="budget_ms", type=float, default=FRAME_BUDGET_MS)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    p = commands["plot"] = sub.add_parser("plot", help="render score CSVs into an SVG figure")
    p.add_argument("scores", nargs="+", metavar="SCORES_CSV")
    p.add_argument("--out", required=True, help="output SVG path")
    p.add_argument("--threshold", type=float, default=lof_mod.DEFAULT_THRESHOLD)
    p.set_defaults(func=cmd_plot)

    return parser, commands


def main(argv=None):
    parser, commands = build_parser()
    args = parser.parse_args(argv)
    defaults = {a.dest: a.default for a in commands[args.command]._actions
                if a.dest != "help"}
    try:
        _apply_config_file(args, defaults)
        return args.func(args)
    except MotionLofError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
