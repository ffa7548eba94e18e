"""Config-driven command line: run experiments, write CSV traces, SVG charts, reports.

Commands: train, invariance, variational-check, report. Configs are JSON
with a fixed key schema (see README). Every command writes a manifest.json
echoing the fully resolved config so the exact run can be repeated from the
manifest alone. Exit codes: 0 success, 1 comparison failure, 2 usage, config
or IO error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, charts
from .data import Dataset, constant_dataset, from_idx, glyph_dataset, synthetic_blobs
from .dynamics import NetworkConfig, init_network, run
from .invariance import (
    COMPARE_METRICS,
    InvarianceSpec,
    compare,
    resample_common_grid,
    run_family,
)
from .metrics import (
    TrajectoryTrace,
    find_entropy_minimum,
    find_flow_peak,
    find_zero_crossings,
)
from .variational import (
    action_entropy,
    el_residual,
    entropy_by_definition,
    extract_unit_trajectories,
    net_action_identity,
)

TRACE_HEADER = "step,time,layer,entropy_step,entropy_cum,cosine,z_norm,flow_norm,net_step,net_cum"
MARKERS_HEADER = "layer,kind,step,value"


class ConfigError(ValueError):
    """Bad config file: unknown key, missing key, or invalid value."""


# ---------------------------------------------------------------- config ---


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return cfg


def _expect_keys(d: dict, allowed: tuple, path: str) -> None:
    unknown = [k for k in d if k not in allowed]
    if unknown:
        where = f"{path}.{unknown[0]}" if path else unknown[0]
        raise ConfigError(f"unknown config key {where}")


def _get(d: dict, key: str, path: str, kind, default=None, required=False):
    if key not in d or d[key] is None:
        if required:
            raise ConfigError(f"missing config key {path}.{key}")
        return default
    v = d[key]
    if kind is float and isinstance(v, int) and not isinstance(v, bool):
        v = float(v)
    bad_bool = kind is not bool and isinstance(v, bool)
    if kind is not None and (not isinstance(v, kind) or bad_bool):
        raise ConfigError(f"config key {path}.{key} must be {kind.__name__}")
    return v


def resolve_network(cfg: dict, seed: int) -> dict:
    net = _get(cfg, "network", "", dict, required=True)
    _expect_keys(net, ("layer_sizes", "init_std_scale"), "network")
    sizes = _get(net, "layer_sizes", "network", list, required=True)
    if len(sizes) < 2 or any(not isinstance(s, int) or s < 1 for s in sizes):
        raise ConfigError("network.layer_sizes must list 2+ positive integers")
    scale = _get(net, "init_std_scale", "network", float, default=1.0)
    if scale < 0:
        raise ConfigError("network.init_std_scale must be nonnegative")
    return {"layer_sizes": list(sizes), "init_std_scale": scale, "seed": seed}


def resolve_run(cfg: dict) -> dict:
    run_cfg = _get(cfg, "run", "", dict, required=True)
    _expect_keys(run_cfg, ("dt", "steps", "total_time"), "run")
    dt = _get(run_cfg, "dt", "run", float, required=True)
    if dt <= 0:
        raise ConfigError("run.dt must be positive")
    steps = _get(run_cfg, "steps", "run", int)
    total = _get(run_cfg, "total_time", "run", float)
    if steps is None and total is None:
        raise ConfigError("run needs steps or total_time")
    if steps is not None and total is not None:
        # both allowed only when consistent, so manifests re-load cleanly
        if abs(total - dt * steps) > 1e-9 * max(1.0, abs(total)):
            raise ConfigError("run.steps and run.total_time disagree")
    if steps is None:
        steps = int(round(total / dt))
        if steps < 1:
            raise ConfigError("run.total_time is shorter than one dt")
    if steps < 1:
        raise ConfigError("run.steps must be positive")
    return {"dt": dt, "steps": steps, "total_time": dt * steps}


def resolve_data(cfg: dict, default_seed: int) -> dict:
    d = _get(cfg, "data", "", dict, required=True)
    _expect_keys(
        d,
        ("source", "n", "dim", "classes", "seed", "center_spacing", "std",
         "value", "images", "labels", "limit", "batch"),
        "data",
    )
    source = _get(d, "source", "data", str, required=True)
    batch = _get(d, "batch", "data", dict, default={})
    _expect_keys(batch, ("mode", "size"), "data.batch")
    mode = _get(batch, "mode", "data.batch", str, default="full")
    if mode not in ("full", "cyclic"):
        raise ConfigError("data.batch.mode must be 'full' or 'cyclic'")
    size = _get(batch, "size", "data.batch", int)
    out = {"source": source, "batch": {"mode": mode, "size": size}}
    if source == "synthetic":
        out.update(
            n=_get(d, "n", "data", int, default=512),
            dim=_get(d, "dim", "data", int, default=64),
            classes=_get(d, "classes", "data", int, default=8),
            seed=_get(d, "seed", "data", int, default=default_seed),
            center_spacing=_get(d, "center_spacing", "data", float, default=0.45),
            std=_get(d, "std", "data", float, default=0.08),
        )
    elif source == "glyphs":
        out.update(
            n=_get(d, "n", "data", int, default=4096),
            seed=_get(d, "seed", "data", int, default=default_seed),
        )
    elif source == "constant":
        out.update(
            n=_get(d, "n", "data", int, default=1),
            dim=_get(d, "dim", "data", int, default=1),
            value=_get(d, "value", "data", float, default=1.0),
        )
    elif source == "mnist":
        out.update(
            images=_get(d, "images", "data", str, required=True),
            labels=_get(d, "labels", "data", str),
            limit=_get(d, "limit", "data", int),
        )
    else:
        raise ConfigError(f"data.source {source!r} is not a known source")
    return out


def build_dataset(spec: dict) -> Dataset:
    source = spec["source"]
    if source == "synthetic":
        return synthetic_blobs(
            spec["n"], spec["dim"], spec["classes"], spec["seed"],
            center_spacing=spec["center_spacing"], std=spec["std"],
        )
    if source == "glyphs":
        return glyph_dataset(spec["n"], spec["seed"])
    if source == "constant":
        return constant_dataset(spec["n"], spec["dim"], spec["value"])
    return from_idx(spec["images"], spec.get("labels"), limit=spec.get("limit"))


# ------------------------------------------------------------- artifacts ---


def _cell(v) -> str:
    if isinstance(v, float) and math.isnan(v):
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_trace_csv(path, trace: TrajectoryTrace) -> None:
    lines = [TRACE_HEADER]
    for i, k in enumerate(trace.steps):
        for l in range(trace.n_layers):
            lines.append(",".join([
                str(int(k)),
                repr(float(trace.times[i])),
                str(l),
                repr(float(trace.entropy_step[i, l])),
                repr(float(trace.entropy_cum[i, l])),
                _cell(float(trace.cosine[i, l])),
                repr(float(trace.z_norm[i, l])),
                repr(float(trace.flow_norm[i, l])),
                repr(float(trace.net_step[i, l])),
                repr(float(trace.net_cum[i, l])),
            ]))
    Path(path).write_text("\n".join(lines) + "\n")


def trace_markers(trace: TrajectoryTrace) -> list:
    """(layer, kind, step, value) rows: extrema carry the metric value at the
    step, zero crossings carry the crossing time."""
    rows = []
    first = int(trace.steps[0])
    for l in range(trace.n_layers):
        k_min = find_entropy_minimum(trace, l)
        rows.append((l, "entropy_min", float(k_min), float(trace.entropy_step[k_min - first, l])))
        k_pk = find_flow_peak(trace, l)
        rows.append((l, "flow_peak", float(k_pk), float(trace.flow_norm[k_pk - first, l])))
        for pos in find_zero_crossings(trace, l):
            rows.append((l, "net_zero_crossing", float(pos), float(pos * trace.dt)))
    return rows


def write_markers_csv(path, trace: TrajectoryTrace) -> None:
    lines = [MARKERS_HEADER]
    for layer, kind, step_v, value in trace_markers(trace):
        lines.append(f"{layer},{kind},{_cell(step_v)},{_cell(value)}")
    Path(path).write_text("\n".join(lines) + "\n")


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")


def write_manifest(out_dir: Path, command: str, config: dict, resolved: dict,
                   artifacts: list, t0: float) -> dict:
    manifest = {
        "tool": "ska",
        "version": __version__,
        "command": command,
        "config": config,
        "resolved": resolved,
        "artifacts": sorted(artifacts),
        "duration_seconds": round(time.perf_counter() - t0, 3),
    }
    write_json(out_dir / "manifest.json", manifest)
    return manifest


def train_charts(out_dir: Path, trace: TrajectoryTrace) -> list:
    steps = trace.steps.astype(float)
    L = trace.n_layers
    col = lambda name, l: trace.column(name)[:, l]
    written = []

    def chart(name, title, x_label, y_label, series, markers=()):
        svg = charts.line_chart(series, title=title, x_label=x_label,
                                y_label=y_label, markers=list(markers))
        (out_dir / name).write_text(svg)
        written.append(name)

    def layer_series(xname, yname):
        out = []
        for l in range(L):
            x = steps if xname == "step" else col(xname, l)
            out.append(charts.Series(f"layer {l}", x, col(yname, l),
                                     charts.COLORS[l % len(charts.COLORS)]))
        return out

    ent_marks = []
    for l in range(L):
        k = find_entropy_minimum(trace, l)
        ent_marks.append(charts.Marker(float(k), float(trace.entropy_step[k - 1, l]),
                                       charts.COLORS[l % len(charts.COLORS)], f"min L{l}"))
    chart("entropy_vs_step.svg", "Per-step entropy", "step", "entropy",
          layer_series("step", "entropy_step"), ent_marks)

    chart("cosine_vs_step.svg", "Knowledge and decision-shift alignment", "step",
          "cosine", layer_series("step", "cosine"))

    flow_marks = []
    for l in range(L):
        k = find_flow_peak(trace, l)
        flow_marks.append(charts.Marker(float(k), float(trace.flow_norm[k - 1, l]),
                                        charts.COLORS[l % len(charts.COLORS)], f"peak L{l}"))
    chart("flow_vs_step.svg", "Knowledge flow", "step", "flow norm",
          layer_series("step", "flow_norm"), flow_marks)

    chart("flow_vs_znorm.svg", "Knowledge flow against knowledge norm",
          "knowledge norm", "flow norm", layer_series("z_norm", "flow_norm"))

    cross_marks = []
    for l in range(L):
        for pos in find_zero_crossings(trace, l):
            cross_marks.append(charts.Marker(float(pos), 0.0,
                                             charts.COLORS[l % len(charts.COLORS)], ""))
    chart("net_vs_step.svg", "Cumulative net", "step", "net",
          layer_series("step", "net_cum"), cross_marks)

    zn_marks = []
    for l in range(L):
        for pos in find_zero_crossings(trace, l):
            zx = float(np.interp(pos, steps, col("z_norm", l)))
            zn_marks.append(charts.Marker(zx, 0.0, charts.COLORS[l % len(charts.COLORS)], ""))
    chart("net_vs_znorm.svg", "Cumulative net against knowledge norm",
          "knowledge norm", "net", layer_series("z_norm", "net_cum"), zn_marks)
    return written


# -------------------------------------------------------------- commands ---


def cmd_train(args) -> int:
    t0 = time.perf_counter()
    cfg = load_config(args.config)
    _expect_keys(cfg, ("seed", "network", "run", "data"), "")
    seed = _get(cfg, "seed", "", int, default=0)
    if args.seed is not None:
        seed = args.seed
    net_cfg = resolve_network(cfg, seed)
    run_cfg = resolve_run(cfg)
    data_cfg = resolve_data(cfg, seed)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ds = build_dataset(data_cfg)
    config = NetworkConfig(
        layer_sizes=tuple(net_cfg["layer_sizes"]),
        dt=run_cfg["dt"],
        steps=run_cfg["steps"],
        init_std_scale=net_cfg["init_std_scale"],
        seed=seed,
    )
    trace = run(init_network(config), ds,
                batch_size=data_cfg["batch"]["size"],
                batch_mode=data_cfg["batch"]["mode"])

    artifacts = ["trace.csv", "markers.csv", "manifest.json"]
    write_trace_csv(out_dir / "trace.csv", trace)
    write_markers_csv(out_dir / "markers.csv", trace)
    if args.svg:
        artifacts += train_charts(out_dir, trace)

    echo = {"seed": seed, "network": {k: v for k, v in net_cfg.items() if k != "seed"},
            "run": run_cfg, "data": data_cfg}
    resolved = {
        "eta": run_cfg["dt"],
        "steps": run_cfg["steps"],
        "eta_times_K": run_cfg["dt"] * run_cfg["steps"],
        "layers": len(net_cfg["layer_sizes"]) - 1,
        "samples": ds.n,
    }
    write_manifest(out_dir, "train", echo, resolved, artifacts, t0)
    print(f"train: {trace.n_steps} steps x {trace.n_layers} layers, "
          f"eta*K = {resolved['eta_times_K']:g}, wrote {len(artifacts)} files to {out_dir}")
    return 0


def cmd_invariance(args) -> int:
    t0 = time.perf_counter()
    cfg = load_config(args.config)
    _expect_keys(cfg, ("seed", "network", "data", "invariance"), "")
    seed = _get(cfg, "seed", "", int, default=0)
    if args.seed is not None:
        seed = args.seed
    net_cfg = resolve_network(cfg, seed)
    data_cfg = resolve_data(cfg, seed)
    inv = _get(cfg, "invariance", "", dict, required=True)
    _expect_keys(inv, ("eta_list", "total_time", "tolerance", "metrics", "seed_overrides"), "invariance")
    eta_list = _get(inv, "eta_list", "invariance", list, required=True)
    total_time = _get(inv, "total_time", "invariance", float, required=True)
    tolerance = _get(inv, "tolerance", "invariance", float, default=0.02)
    metric_names = _get(inv, "metrics", "invariance", list, default=list(COMPARE_METRICS))
    overrides = _get(inv, "seed_overrides", "invariance", list)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    if overrides is not None and any(s != seed for s in overrides):
        # runs seeded differently are not discretizations of one trajectory
        write_json(out_dir / "invariance_report.json", {
            "incomparable": True,
            "reason": "seed_overrides give the runs different initializations",
            "seed": seed,
            "seed_overrides": overrides,
        })
        print("invariance: refusing comparison, seed_overrides differ across runs",
              file=sys.stderr)
        return 2
    if data_cfg["batch"]["mode"] != "full" or data_cfg["batch"]["size"] is not None:
        raise ConfigError("invariance runs compare full-batch trajectories only")

    ds = build_dataset(data_cfg)
    spec = InvarianceSpec(
        total_time=total_time,
        eta_list=tuple(float(e) for e in eta_list),
        layer_sizes=tuple(net_cfg["layer_sizes"]),
        seed=seed,
        dataset=ds,
        init_std_scale=net_cfg["init_std_scale"],
        tolerance=tolerance,
        metrics=tuple(metric_names),
    )
    runs = run_family(spec)
    artifacts = ["aligned.csv", "invariance_report.csv", "invariance_report.json", "manifest.json"]
    for i, fr in enumerate(runs):
        name = f"trace_run{i}_eta{fr.eta:g}.csv"
        write_trace_csv(out_dir / name, fr.trace)
        artifacts.append(name)

    aligned = resample_common_grid(runs, spec.metrics)
    lines = ["metric,run,eta,layer,time,value"]
    for lab, eta in zip(aligned.labels, aligned.etas):
        for metric in aligned.metrics:
            vals = aligned.values(lab, metric)
            for l in range(vals.shape[1]):
                for g, tval in enumerate(aligned.grid):
                    lines.append(f"{metric},{lab},{_cell(float(eta))},{l},"
                                 f"{_cell(float(tval))},{_cell(float(vals[g, l]))}")
    (out_dir / "aligned.csv").write_text("\n".join(lines) + "\n")

    report = compare(aligned, tolerance=tolerance)
    lines = ["metric,run,eta,reference_eta,sup_dev,rel_dev,tolerance,passed"]
    for r in report.rows:
        word = "incomparable" if r.passed is None else ("pass" if r.passed else "fail")
        lines.append(f"{r.metric},{r.label},{_cell(r.eta)},{_cell(r.reference_eta)},"
                     f"{_cell(r.sup_dev)},{_cell(r.rel_dev)},{_cell(r.tolerance)},{word}")
    (out_dir / "invariance_report.csv").write_text("\n".join(lines) + "\n")

    write_json(out_dir / "invariance_report.json", {
        "incomparable": False,
        "reference": report.reference_label,
        "reference_eta": report.reference_eta,
        "tolerance_base": report.tolerance_base,
        "all_pass": report.all_pass,
        "rows": [{
            "metric": r.metric,
            "run": r.label,
            "eta": r.eta,
            "reference_eta": r.reference_eta,
            "sup_dev": r.sup_dev,
            "rel_dev": r.rel_dev,
            "tolerance": r.tolerance,
            "passed": r.passed,
            "per_layer": {str(l): {"dev": d, "rel": rel, "range": rng}
                          for l, (d, rel, rng) in r.per_layer.items()},
        } for r in report.rows],
    })

    echo = {"seed": seed, "network": {k: v for k, v in net_cfg.items() if k != "seed"},
            "data": data_cfg,
            "invariance": {"eta_list": [float(e) for e in eta_list],
                           "total_time": total_time, "tolerance": tolerance,
                           "metrics": list(metric_names)}}
    resolved = {
        "runs": [{"label": fr.label, "eta": fr.eta, "steps": fr.steps,
                  "eta_times_K": fr.realized_product} for fr in runs],
        "all_pass": report.all_pass,
    }
    write_manifest(out_dir, "invariance", echo, resolved, artifacts, t0)
    verdict = "PASS" if report.all_pass else "FAIL"
    print(f"invariance: {len(runs)} runs, {len(report.rows)} compared rows, {verdict}")
    return 0 if report.all_pass else 1


def cmd_variational(args) -> int:
    t0 = time.perf_counter()
    cfg = load_config(args.config)
    _expect_keys(cfg, ("seed", "network", "run", "data", "variational"), "")
    seed = _get(cfg, "seed", "", int, default=0)
    if args.seed is not None:
        seed = args.seed
    if "network" not in cfg:
        cfg["network"] = {"layer_sizes": [1, 1]}
    if "data" not in cfg:
        cfg["data"] = {"source": "constant", "n": 1, "dim": 1, "value": 1.0}
    net_cfg = resolve_network(cfg, seed)
    run_cfg = resolve_run(cfg)
    data_cfg = resolve_data(cfg, seed)
    var = _get(cfg, "variational", "", dict, default={})
    _expect_keys(var, ("units", "dt_halving"), "variational")
    units = _get(var, "units", "variational", list, default=[[0, 0, 0]])
    halving = _get(var, "dt_halving", "variational", bool, default=True)
    selections = []
    for u in units:
        if (not isinstance(u, list) or len(u) != 3
                or any(not isinstance(x, int) for x in u)):
            raise ConfigError("variational.units entries must be [layer, unit, sample]")
        selections.append(tuple(u))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ds = build_dataset(data_cfg)

    def one_run(dt, steps):
        config = NetworkConfig(
            layer_sizes=tuple(net_cfg["layer_sizes"]), dt=dt, steps=steps,
            init_std_scale=net_cfg["init_std_scale"], seed=seed,
        )
        trace = run(init_network(config), ds,
                    batch_size=data_cfg["batch"]["size"],
                    batch_mode=data_cfg["batch"]["mode"],
                    record_units=selections)
        return trace, extract_unit_trajectories(trace, selections)

    trace, trajs = one_run(run_cfg["dt"], run_cfg["steps"])
    trajs_half = None
    if halving:
        _, trajs_half = one_run(run_cfg["dt"] / 2.0, run_cfg["steps"] * 2)

    unit_reports = []
    for i, sel in enumerate(selections):
        traj = trajs[i]
        res = el_residual(traj)
        norm = float(np.max(np.abs(res))) if res.size else 0.0
        entry = {
            "selection": list(sel),
            "action_entropy": float(action_entropy(traj)),
            "entropy_by_definition": float(entropy_by_definition(traj)),
            "el_residual_max": norm,
        }
        if trajs_half is not None:
            res_h = el_residual(trajs_half[i])
            norm_h = float(np.max(np.abs(res_h))) if res_h.size else 0.0
            entry["el_residual_max_half"] = norm_h
            if norm > 0 and norm_h > 0:
                entry["el_order"] = float(math.log2(norm / norm_h))
            else:
                entry["el_order"] = None
        crossings = []
        for pos in find_zero_crossings(trace, sel[0]):
            ct = float(pos * trace.dt)
            if ct <= float(traj.t[-1]):
                crossings.append({
                    "step": float(pos),
                    "time": ct,
                    "residual": float(net_action_identity(traj, ct)),
                })
        entry["net_identity_crossings"] = crossings
        unit_reports.append(entry)

    payload = {
        "dt": run_cfg["dt"],
        "steps": run_cfg["steps"],
        "dt_halving": halving,
        "units": unit_reports,
    }
    write_json(out_dir / "variational_report.json", payload)
    echo = {"seed": seed, "network": {k: v for k, v in net_cfg.items() if k != "seed"},
            "run": run_cfg, "data": data_cfg,
            "variational": {"units": [list(s) for s in selections], "dt_halving": halving}}
    resolved = {"eta_times_K": run_cfg["dt"] * run_cfg["steps"],
                "recorded_units": len(selections)}
    artifacts = ["variational_report.json", "manifest.json"]
    write_manifest(out_dir, "variational-check", echo, resolved, artifacts, t0)
    print(f"variational-check: {len(selections)} unit(s), "
          f"el_residual_max = {unit_reports[0]['el_residual_max']:.3g}")
    return 0


def cmd_report(args) -> int:
    out_dir = Path(args.out)
    manifest_path = out_dir / "manifest.json"
    if not manifest_path.exists():
        print(f"error: no manifest.json in {out_dir}", file=sys.stderr)
        return 2
    manifest = json.loads(manifest_path.read_text())
    command = manifest.get("command", "?")
    cfg = manifest.get("config", {})
    resolved = manifest.get("resolved", {})
    print(f"ska {manifest.get('version', '?')} {command} run in {out_dir}")

    if command == "train":
        print(f"characteristic time eta*K = {resolved.get('eta_times_K')}")
        print(f"layers: {resolved.get('layers')}, samples: {resolved.get('samples')}")
        markers_path = out_dir / "markers.csv"
        if markers_path.exists():
            by_layer = {}
            for line in markers_path.read_text().splitlines()[1:]:
                layer, kind, step_v, value = line.split(",")
                by_layer.setdefault(int(layer), []).append((kind, step_v, value))
            for layer in sorted(by_layer):
                parts = []
                for kind, step_v, value in by_layer[layer]:
                    if kind == "net_zero_crossing":
                        parts.append(f"net crossing at step {step_v} (t = {value})")
                    elif kind == "entropy_min":
                        parts.append(f"entropy min at step {float(step_v):g}")
                    else:
                        parts.append(f"flow peak at step {float(step_v):g}")
                print(f"layer {layer}: " + "; ".join(parts))
        print("PASS")
    elif command == "invariance":
        inv = cfg.get("invariance", {})
        print(f"characteristic time eta*K = {inv.get('total_time')}")
        report_path = out_dir / "invariance_report.json"
        if not report_path.exists():
            print(f"error: no invariance_report.json in {out_dir}", file=sys.stderr)
            return 2
        report = json.loads(report_path.read_text())
        if report.get("incomparable"):
            print("comparison refused: " + report.get("reason", "incomparable setup"))
            print("FAIL")
            return 1
        for row in report["rows"]:
            word = {True: "pass", False: "FAIL", None: "incomparable"}[row["passed"]]
            rel = "nan" if row["rel_dev"] is None else f"{row['rel_dev']:.4f}"
            print(f"{row['metric']} {row['run']}: rel_dev {rel} "
                  f"tol {row['tolerance']:.4f} {word}")
        print("PASS" if report["all_pass"] else "FAIL")
        return 0 if report["all_pass"] else 1
    elif command == "variational-check":
        print(f"characteristic time eta*K = {resolved.get('eta_times_K')}")
        report = json.loads((out_dir / "variational_report.json").read_text())
        for unit in report["units"]:
            sel = unit["selection"]
            print(f"unit {sel}: action {unit['action_entropy']:.6g}, "
                  f"entropy {unit['entropy_by_definition']:.6g}, "
                  f"el residual {unit['el_residual_max']:.3g}"
                  + (f", order {unit['el_order']:.2f}" if unit.get("el_order") is not None else ""))
            for c in unit["net_identity_crossings"]:
                print(f"  crossing t = {c['time']:.4g}: net identity residual {c['residual']:.3g}")
        print("PASS")
    else:
        print(f"unknown command {command!r} in manifest", file=sys.stderr)
        return 2
    return 0


# ------------------------------------------------------------ entry point ---


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ska",
        description="Forward-only entropy-driven learning runs with CSV/SVG artifacts.",
    )
    parser.add_argument("--version", action="version", version=f"ska {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override config seed")

    p_train = sub.add_parser("train", help="single run with trace, markers, charts")
    add_common(p_train)
    p_train.add_argument("--svg", action=argparse.BooleanOptionalAction, default=True,
                         help="write SVG charts (default on)")
    p_train.set_defaults(func=cmd_train)

    p_inv = sub.add_parser("invariance", help="fixed eta*K family comparison")
    add_common(p_inv)
    p_inv.set_defaults(func=cmd_invariance)

    p_var = sub.add_parser("variational-check", help="unit-trajectory identity checks")
    add_common(p_var)
    p_var.set_defaults(func=cmd_variational)

    p_rep = sub.add_parser("report", help="summarize a finished run directory")
    p_rep.add_argument("--out", required=True, help="directory holding manifest.json")
    p_rep.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
