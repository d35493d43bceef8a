"""Command-line interface.

Subcommands: data-gen, spectrum, train, integrate, theory, compare, report.
Every subcommand takes --config plus targeted overrides.  Exit codes:
0 success, 2 config error, 3 data/format error, 4 divergence (a targeted
run diverged, or every run in a grid did).
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from .. import backend
from ..errors import (ConfigError, DegenerateDataError, DivergenceError,
                      FormatError, GenerationError, RejectedInputError)
from ..kernel import gram_at, ntk_limit_closed, spectrum_report
from ..model import forward, init_network
from ..numerics import Rng
from ..theory import (make_rate_bundle, radius_bounds, rho_hb, rho_nag,
                      width_requirement)
from .config import load_config
from .runner import (load_dataset, read_manifest, resolve_eta, run_experiment,
                     write_compare)


def _add_common(p):
    p.add_argument("--config", required=True, help="path to the JSON experiment config")
    p.add_argument("--out", help="override the configured output location")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="momentumlab",
        description="Momentum-method convergence laboratory for wide two-layer ReLU nets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("data-gen", help="materialize the configured dataset to a .npy file")
    _add_common(p)

    p = sub.add_parser("spectrum", help="kernel spectrum report (lambda0, lambda_m, s_max)")
    _add_common(p)

    p = sub.add_parser("train", help="discrete training runs over the config grid")
    _add_common(p)
    p.add_argument("--seed", type=int, help="run only this seed")
    p.add_argument("--method", choices=("gd", "hb", "nag"), help="run only this method")

    p = sub.add_parser("integrate", help="continuous-time ODE runs over the config grid")
    _add_common(p)
    p.add_argument("--seed", type=int, help="run only this seed")
    p.add_argument("--method", choices=("gd", "hb", "nag"), help="run only this method")

    p = sub.add_parser("theory", help="closed-form rates, width requirement and radii")
    _add_common(p)

    p = sub.add_parser("compare", help="HB-vs-NAG time-to-threshold table from a manifest")
    _add_common(p)

    p = sub.add_parser("report", help="human-readable summary of a completed experiment")
    _add_common(p)
    return parser


def _configure(args, mode=None):
    cfg = load_config(args.config)
    if getattr(args, "out", None):
        cfg.output_dir = args.out
        cfg.config_dir = os.getcwd()
    if mode is not None:
        if mode == "ode" and cfg.ode is None:
            raise ConfigError("'integrate' needs an 'ode' section in the config")
        cfg.mode = mode
    if getattr(args, "seed", None) is not None:
        cfg.seeds = [args.seed]
    if getattr(args, "method", None):
        cfg.methods = (args.method,)
    return cfg


def _cmd_data_gen(args):
    cfg = _configure(args)
    data = load_dataset(cfg)
    out = args.out or os.path.join(cfg.output_path, "dataset.npy")
    os.makedirs(os.path.dirname(os.path.abspath(out)), exist_ok=True)
    np.save(out, np.concatenate([data.X, data.y[:, None]], axis=1))
    print("wrote %s (n=%d, d=%d)" % (out, data.n, data.d))
    return 0


def _spectrum_doc(cfg):
    data = load_dataset(cfg)
    Hinf = ntk_limit_closed(data.X)
    sr = spectrum_report(Hinf)
    return data, Hinf, sr


def _cmd_spectrum(args):
    cfg = _configure(args)
    data, Hinf, sr = _spectrum_doc(cfg)
    doc = {
        "n": data.n, "d": data.d,
        "lambda0": sr.lambda0,
        "lambda_max": Hinf.lambda_max,
        "lambda_m": sr.lambda_m,
        "s_max": sr.s_max,
        "eta": resolve_eta(cfg.eta_rule, sr.lambda_m),
        "kernel_lane": backend.active_lane(),
    }
    text = json.dumps(doc, sort_keys=True, indent=2)
    print(text)
    return 0


def _cmd_theory(args):
    cfg = _configure(args)
    data, Hinf, sr = _spectrum_doc(cfg)
    eta = resolve_eta(cfg.eta_rule, sr.lambda_m)
    net0 = init_network(cfg.widths[0], data.d, Rng(cfg.seeds[0]))
    H0 = gram_at(net0, data.X)
    delta0 = forward(net0, data.X) - data.y
    l_hat0 = 0.5 * float(delta0 @ (H0.H @ delta0))
    bundle = make_rate_bundle(sr.lambda0, eta, l_hat0, lambda_m=sr.lambda_m)
    doc = {
        "lambda0": sr.lambda0,
        "lambda_m": sr.lambda_m,
        "s_max": sr.s_max,
        "eta": eta,
        "s_used_for_bounds": bundle.s,
        "s_clamped": bundle.s_clamped,
        "alpha": bundle.alpha,
        "rho_hb": bundle.rho_hb,
        "rho_nag": bundle.rho_nag,
        "kappa": sr.lambda_m / (sr.lambda0 / 2.0),
        "width_requirement": width_requirement(data.n, sr.lambda0, cfg.delta),
        "measured": {
            "width": cfg.widths[0],
            "seed": cfg.seeds[0],
            "l_hat0": l_hat0,
            "lambda_min_H0": H0.lambda_min,
            "radius_hb": radius_bounds("hb", l_hat0, data.n, sr.lambda0, cfg.widths[0]),
            "radius_nag": radius_bounds("nag", l_hat0, data.n, sr.lambda0, cfg.widths[0]),
        },
    }
    print(json.dumps(doc, sort_keys=True, indent=2))
    return 0


def _grid_exit_code(manifest):
    statuses = [run["status"] for run in manifest["runs"]]
    if statuses and all(s == "diverged" for s in statuses):
        return 4
    return 0


def _cmd_train(args):
    cfg = _configure(args, mode="discrete")
    manifest = run_experiment(cfg)
    print("wrote %d run(s) + manifest under %s" % (len(manifest["runs"]), cfg.output_path))
    return _grid_exit_code(manifest)


def _cmd_integrate(args):
    cfg = _configure(args, mode="ode")
    manifest = run_experiment(cfg)
    print("wrote %d integration(s) + manifest under %s" % (len(manifest["runs"]), cfg.output_path))
    return _grid_exit_code(manifest)


def _cmd_compare(args):
    cfg = _configure(args)
    manifest = read_manifest(cfg.output_path)
    rows, text = write_compare(manifest, cfg.output_path)
    print(text)
    return 0


def _cmd_report(args):
    cfg = _configure(args)
    manifest = read_manifest(cfg.output_path)
    sp = manifest["spectrum"]
    th = manifest["theory"]
    print("experiment %s (kernel lane: %s)" % (manifest["config_hash"][:12], manifest["kernel_lane"]))
    print("dataset: n=%d d=%d   eta=%.6g" % (manifest["dataset"]["n"], manifest["dataset"]["d"], manifest["eta"]))
    print("spectrum: lambda0=%.6g lambda_m=%.6g s_max=%.6g" % (sp["lambda0_ntk"], sp["lambda_m"], sp["s_max"]))
    print("rates: rho_hb=%.6f rho_nag(alpha=%.4f)=%.6f kappa=%.4g" %
          (th["rho_hb"], th["alpha_at_s_max"], th["rho_nag_at_s_max"], th["kappa"]))
    print("advisory width requirement: %.3e" % th["width_requirement"])
    print("runs:")
    for run in manifest["runs"]:
        thr = "censored" if run["censored"] else str(run["steps_to_threshold"])
        flags = run.get("flags", {})
        flag_txt = "".join(
            " %s=%s" % (k, "ok" if v else "VIOLATED") for k, v in sorted(flags.items()))
        print("  m=%-6d beta=%-5s seed=%-3d %-4s %-9s to_threshold=%-9s%s"
              % (run["width"], run["beta"], run["seed"], run["method"],
                 run["status"], thr, flag_txt))
    _, text = write_compare(manifest, cfg.output_path)
    print(text)
    return 0


_COMMANDS = {
    "data-gen": _cmd_data_gen,
    "spectrum": _cmd_spectrum,
    "train": _cmd_train,
    "integrate": _cmd_integrate,
    "theory": _cmd_theory,
    "compare": _cmd_compare,
    "report": _cmd_report,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as err:
        print("config error: %s" % err, file=sys.stderr)
        return 2
    except (FormatError, GenerationError, DegenerateDataError, RejectedInputError) as err:
        print("data error: %s" % err, file=sys.stderr)
        return 3
    except OSError as err:
        print("i/o error: %s" % err, file=sys.stderr)
        return 3
    except DivergenceError as err:
        print("divergence: %s" % err, file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
