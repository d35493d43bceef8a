"""Experiment driver: dataset -> spectrum -> run grid -> CSV + SVG + manifest.

Each (width, beta, seed, method) cell runs independently with its own
seeded stream; outputs are written atomically and all recorded paths are
relative to the output directory, so a rerun with the same config
reproduces every artifact byte for byte.  Wall-clock numbers go to a
separate timings.json sidecar to keep the manifest deterministic.
"""

import json
import math
import os
import statistics
import time

from .. import backend
from ..dynamics import DynamicsConfig, integrate_dynamics
from ..errors import ConfigError, DivergenceError
from ..kernel import gram_at, ntk_limit_closed, spectrum_report
from ..model import init_network, validate_dataset
from ..numerics import Rng
from ..optimizers import OptimizerConfig, train
from ..theory import (bound_curve, make_rate_bundle, radius_bounds, rho_hb,
                      rho_nag, width_requirement)
from .csvio import atomic_write_text, write_trajectory_csv
from .datasets import gen_synthetic, load_cifar_subset, load_idx_subset
from .svgplot import svg_line_chart

MANIFEST_NAME = "manifest.json"
TIMINGS_NAME = "timings.json"
COMPARE_NAME = "compare.csv"
THRESHOLD_FACTOR = 1e-2

_ODE_SYSTEM = {"gd": "gf_residual", "hb": "hb_highres", "nag": "nag_highres"}
_COLORS = {"hb": "#1f77b4", "nag": "#d62728", "gd": "#2ca02c"}
_BOUND_COLORS = {"hb": "#9ecae1", "nag": "#fcae91"}


def load_dataset(cfg):
    """Materialize the configured dataset and assert its invariants."""
    ds = cfg.dataset
    kind = ds["kind"]
    if kind == "synthetic":
        data = gen_synthetic(int(ds["n"]), int(ds["d"]), Rng(int(ds["seed"])))
    elif kind in ("mnist2", "fmnist2"):
        data = load_idx_subset(
            cfg.resolve_path(ds["images"]), cfg.resolve_path(ds["labels"]),
            int(ds.get("class_a", 0)), int(ds.get("class_b", 1)),
            int(ds.get("n_max", 200)),
        )
    else:
        data = load_cifar_subset(
            cfg.resolve_path(ds["path"]),
            int(ds.get("class_a", 0)), int(ds.get("class_b", 1)),
            int(ds.get("n_max", 200)),
        )
    validate_dataset(data)
    return data


def resolve_eta(eta_rule, lambda_m):
    kind = eta_rule["kind"]
    if kind == "lambda_m_over_10":
        return lambda_m / 10.0
    if kind == "lambda_m_over_20":
        return lambda_m / 20.0
    return float(eta_rule["value"])


def _beta_str(beta):
    return repr(float(beta)).replace(".", "p")


def _to_threshold(records):
    """First recorded (step, t) where loss drops to 1e-2 of the initial loss."""
    if not records:
        return None, None
    target = THRESHOLD_FACTOR * records[0].loss
    for rec in records:
        if rec.loss <= target:
            return int(rec.step), float(rec.t)
    return None, None


def _run_one(cfg, data, sr, eta, width, beta, seed, method):
    rng = Rng(seed)
    net0 = init_network(width, data.d, rng)
    H0 = None
    if cfg.lambda0_source == "empirical" or cfg.mode == "ode":
        H0 = gram_at(net0, data.X)
    lambda0_run = sr.lambda0 if cfg.lambda0_source == "ntk" else H0.lambda_min

    status = "ok"
    if cfg.mode == "discrete":
        s_run = eta
        try:
            records = train(net0, data, OptimizerConfig(
                method, eta, beta, cfg.max_iters, cfg.record_every))
        except DivergenceError as err:
            status = "diverged"
            records = err.trajectory
    else:
        ode = cfg.ode
        s_run = float(ode["s"]) if ode.get("s") else sr.s_max
        dyn = DynamicsConfig(
            system=_ODE_SYSTEM[method],
            kernel_mode=ode.get("kernel_mode", "frozen"),
            s=s_run,
            lambda0=lambda0_run,
            h=float(ode.get("h", 1e-3)),
            t_end=float(ode.get("t_end", 10.0)),
            record_every=int(ode.get("record_every", cfg.record_every)),
            lambda_m=sr.lambda_m,
        )
        gram0 = H0 if dyn.kernel_mode == "frozen" else None
        try:
            records = integrate_dynamics(net0, data, dyn, gram=gram0)
        except DivergenceError as err:
            status = "diverged"
            records = err.trajectory

    l_hat0 = records[0].pseudo_loss if records else None
    bundle = None
    bound_fn = None
    if method in ("hb", "nag") and l_hat0 is not None and l_hat0 > 0.0:
        bundle = make_rate_bundle(lambda0_run, s_run, l_hat0, lambda_m=sr.lambda_m)
        bound_fn = lambda t, _b=bundle, _m=method: bound_curve(_m, _b, t)

    flags = {}
    if records:
        flags["lambda_min_ge_half_lambda0"] = bool(
            all(rec.lambda_min_H >= lambda0_run / 2.0 for rec in records))
        if method in ("hb", "nag") and l_hat0 is not None and l_hat0 > 0.0:
            radius = radius_bounds(method, l_hat0, data.n, lambda0_run, width)
            disps = [rec.max_displacement for rec in records
                     if not math.isnan(rec.max_displacement)]
            if disps:
                flags["displacement_within_radius"] = bool(
                    all(d <= radius for d in disps))

    step_thr, t_thr = _to_threshold(records)
    entry = {
        "width": width,
        "beta": beta,
        "seed": seed,
        "method": method,
        "status": status,
        "l_hat0": l_hat0,
        "lambda0": lambda0_run,
        "s": bundle.s if bundle else s_run,
        "s_requested": s_run,
        "s_clamped": bool(bundle.s_clamped) if bundle else False,
        "steps_to_threshold": step_thr,
        "t_to_threshold": t_thr,
        "censored": step_thr is None,
        "flags": flags,
        "n_records": len(records),
    }
    return entry, records, bundle


def _cell_svg(cfg, cell_runs, width, beta):
    """Mean loss curves per method (dashed) overlaid with theorem bounds."""
    series = []
    x_axis = "iteration" if cfg.mode == "discrete" else "t"
    for method in ("hb", "nag", "gd"):
        runs = [r for r in cell_runs
                if r["entry"]["method"] == method and r["entry"]["status"] == "ok"]
        if not runs:
            continue
        length = min(len(r["records"]) for r in runs)
        recs0 = runs[0]["records"][:length]
        xs = [rec.step if cfg.mode == "discrete" else rec.t for rec in recs0]
        mean_loss = [
            sum(r["records"][i].loss for r in runs) / len(runs) for i in range(length)
        ]
        series.append({
            "label": method.upper(),
            "x": xs, "y": mean_loss,
            "color": _COLORS[method], "dashed": True,
        })
        bundles = [r["bundle"] for r in runs if r["bundle"] is not None]
        if bundles:
            worst = max(bundles, key=lambda b: b.L_hat0)
            ts = [rec.t for rec in recs0]
            series.append({
                "label": "%s bound" % method.upper(),
                "x": xs,
                "y": [bound_curve(method, worst, t) for t in ts],
                "color": _BOUND_COLORS.get(method, "#999999"), "dashed": False,
            })
    if not series:
        return None
    title = "loss vs %s (m=%d, beta=%s)" % (x_axis, width, beta)
    return svg_line_chart(title, x_axis, "training loss", series, log_y=True)


def run_experiment(cfg):
    """Run the full (width, beta, seed, method) grid and write all artifacts.

    Returns the manifest dict.  Per-run divergence is recorded as a status,
    not raised.
    """
    data = load_dataset(cfg)
    Hinf = ntk_limit_closed(data.X)
    sr = spectrum_report(Hinf)
    eta = resolve_eta(cfg.eta_rule, sr.lambda_m)

    out_dir = cfg.output_path
    os.makedirs(os.path.join(out_dir, "runs"), exist_ok=True)
    os.makedirs(os.path.join(out_dir, "plots"), exist_ok=True)

    run_entries = []
    timings = {}
    by_cell = {}
    for width in cfg.widths:
        for beta in cfg.betas:
            for seed in cfg.seeds:
                for method in cfg.methods:
                    t_start = time.perf_counter()
                    entry, records, bundle = _run_one(
                        cfg, data, sr, eta, width, beta, seed, method)
                    csv_rel = "runs/m%d_beta%s_seed%d_%s.csv" % (
                        width, _beta_str(beta), seed, method)
                    bound_fn = None
                    if bundle is not None:
                        bound_fn = lambda t, _b=bundle, _m=method: bound_curve(_m, _b, t)
                    write_trajectory_csv(os.path.join(out_dir, csv_rel), records, bound_fn)
                    entry["csv"] = csv_rel
                    run_entries.append(entry)
                    timings[csv_rel] = time.perf_counter() - t_start
                    by_cell.setdefault((width, beta), []).append(
                        {"entry": entry, "records": records, "bundle": bundle})

    plots = []
    for (width, beta), cell_runs in sorted(by_cell.items()):
        svg = _cell_svg(cfg, cell_runs, width, beta)
        if svg is None:
            continue
        rel = "plots/m%d_beta%s.svg" % (width, _beta_str(beta))
        atomic_write_text(os.path.join(out_dir, rel), svg)
        plots.append(rel)

    alpha_ref = math.sqrt(2.0 * sr.lambda0 * sr.s_max) / 4.0
    manifest = {
        "schema": "momentumlab-manifest-v1",
        "config_hash": cfg.config_hash(),
        "config": cfg.canonical(),
        "kernel_lane": backend.active_lane(),
        "dataset": {"n": data.n, "d": data.d},
        "eta": eta,
        "spectrum": {
            "lambda0_ntk": sr.lambda0,
            "lambda_max_ntk": Hinf.lambda_max,
            "lambda_m": sr.lambda_m,
            "s_max": sr.s_max,
        },
        "theory": {
            "rho_hb": rho_hb(),
            "alpha_at_s_max": alpha_ref,
            "rho_nag_at_s_max": rho_nag(alpha_ref),
            "kappa": sr.lambda_m / (sr.lambda0 / 2.0),
            "width_requirement": width_requirement(data.n, sr.lambda0, cfg.delta),
        },
        "runs": run_entries,
        "plots": plots,
    }
    atomic_write_text(
        os.path.join(out_dir, MANIFEST_NAME),
        json.dumps(manifest, sort_keys=True, indent=2) + "\n",
    )
    atomic_write_text(
        os.path.join(out_dir, TIMINGS_NAME),
        json.dumps({"wall_clock_s": timings,
                    "total_s": sum(timings.values())}, sort_keys=True, indent=2) + "\n",
    )
    return manifest


def _median_or_inf(values):
    return statistics.median(values) if values else None


def compare_report(manifest):
    """Per-cell median time-to-threshold comparison between HB and NAG.

    Returns (rows, csv_text, text_report).  Censored runs count as inf.
    """
    cells = {}
    for entry in manifest["runs"]:
        key = (entry["width"], entry["beta"])
        cells.setdefault(key, {}).setdefault(entry["method"], []).append(entry)

    rows = []
    for (width, beta) in sorted(cells):
        row = {"width": width, "beta": beta,
               "hb_median": None, "nag_median": None,
               "ratio": None, "nag_le_hb": None}
        for method in ("hb", "nag"):
            entries = cells[(width, beta)].get(method)
            if not entries:
                continue
            vals = [float("inf") if e["censored"] else float(e["steps_to_threshold"])
                    for e in entries]
            row["%s_median" % method] = _median_or_inf(vals)
        hb_med, nag_med = row["hb_median"], row["nag_median"]
        if hb_med is not None and nag_med is not None:
            row["nag_le_hb"] = bool(nag_med <= hb_med)
            if math.isfinite(hb_med) and math.isfinite(nag_med) and hb_med > 0:
                row["ratio"] = nag_med / hb_med
        rows.append(row)

    def _cell_fmt(v):
        if v is None:
            return ""
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, float) and math.isinf(v):
            return "inf"
        return repr(v) if isinstance(v, float) else str(v)

    lines = ["width,beta,hb_median_iters,nag_median_iters,ratio,nag_le_hb"]
    for row in rows:
        lines.append(",".join(_cell_fmt(row[k]) for k in
                              ("width", "beta", "hb_median", "nag_median", "ratio", "nag_le_hb")))
    csv_text = "\r\n".join(lines) + "\r\n"

    text = ["median steps to reach 1e-2 x initial loss (censored = inf)"]
    for row in rows:
        text.append(
            "  m=%-6d beta=%-5s  HB=%-8s NAG=%-8s  NAG<=HB: %s"
            % (row["width"], row["beta"],
               _cell_fmt(row["hb_median"]), _cell_fmt(row["nag_median"]),
               _cell_fmt(row["nag_le_hb"])))
    return rows, csv_text, "\n".join(text)


def write_compare(manifest, out_dir):
    rows, csv_text, text = compare_report(manifest)
    atomic_write_text(os.path.join(out_dir, COMPARE_NAME), csv_text)
    return rows, text


def read_manifest(out_dir):
    path = os.path.join(out_dir, MANIFEST_NAME)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as err:
        raise ConfigError("cannot read manifest %s: %s (run 'train' or 'integrate' first)"
                          % (path, err)) from None
