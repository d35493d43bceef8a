"""Experiment configuration: a single JSON document.

Paths inside the document are relative to the config file.  The config
hash covers the canonical (defaults-resolved, raw-path) form, so a hash
changes exactly when a field changes.
"""

import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Optional

from ..errors import ConfigError

DATASET_KINDS = ("synthetic", "mnist2", "fmnist2", "cifar2")
ETA_RULES = ("lambda_m_over_10", "lambda_m_over_20", "fixed")
MODES = ("discrete", "ode")
LAMBDA0_SOURCES = ("ntk", "empirical")
METHODS_DEFAULT = ("hb", "nag")

_TOP_KEYS = {
    "dataset", "widths", "betas", "eta_rule", "seeds", "max_iters",
    "record_every", "mode", "ode", "lambda0_source", "delta", "output_dir",
    "methods",
}
_ODE_KEYS = {"kernel_mode", "s", "h", "t_end", "record_every"}


@dataclass
class ExperimentConfig:
    dataset: dict
    widths: list
    seeds: list
    betas: list = field(default_factory=lambda: [0.97])
    eta_rule: dict = field(default_factory=lambda: {"kind": "lambda_m_over_10"})
    max_iters: int = 1000
    record_every: int = 10
    mode: str = "discrete"
    ode: Optional[dict] = None
    lambda0_source: str = "ntk"
    delta: float = 0.1
    output_dir: str = "out"
    methods: tuple = METHODS_DEFAULT
    config_dir: str = "."

    def canonical(self):
        """Defaults-resolved dict with raw path strings, for hashing."""
        doc = {
            "dataset": dict(sorted(self.dataset.items())),
            "widths": list(self.widths),
            "betas": list(self.betas),
            "eta_rule": dict(sorted(self.eta_rule.items())),
            "seeds": list(self.seeds),
            "max_iters": self.max_iters,
            "record_every": self.record_every,
            "mode": self.mode,
            "ode": dict(sorted(self.ode.items())) if self.ode else None,
            "lambda0_source": self.lambda0_source,
            "delta": self.delta,
            "methods": list(self.methods),
        }
        return doc

    def config_hash(self):
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def resolve_path(self, p):
        return os.path.normpath(os.path.join(self.config_dir, p))

    @property
    def output_path(self):
        return self.resolve_path(self.output_dir)


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def _validate_dataset(ds):
    _require(isinstance(ds, dict) and "kind" in ds, "dataset must be an object with a 'kind'")
    kind = ds["kind"]
    _require(kind in DATASET_KINDS, "dataset.kind must be one of %s" % (DATASET_KINDS,))
    if kind == "synthetic":
        _require(int(ds.get("n", 0)) >= 2, "synthetic dataset needs n >= 2")
        _require(int(ds.get("d", 0)) >= 2, "synthetic dataset needs d >= 2")
        _require("seed" in ds, "synthetic dataset needs a seed")
    elif kind in ("mnist2", "fmnist2"):
        _require("images" in ds and "labels" in ds, "%s dataset needs 'images' and 'labels' paths" % kind)
    else:
        _require("path" in ds, "cifar2 dataset needs a 'path'")
    if kind != "synthetic":
        _require(int(ds.get("n_max", 200)) >= 2, "n_max must be >= 2")


def _validate_eta_rule(rule):
    _require(isinstance(rule, dict) and rule.get("kind") in ETA_RULES,
             "eta_rule.kind must be one of %s" % (ETA_RULES,))
    if rule["kind"] == "fixed":
        _require(float(rule.get("value", 0.0)) > 0.0, "fixed eta_rule needs value > 0")


def parse_config(doc, config_dir="."):
    """Validate a decoded JSON document and build an ExperimentConfig."""
    _require(isinstance(doc, dict), "config root must be a JSON object")
    unknown = set(doc) - _TOP_KEYS
    _require(not unknown, "unknown config keys: %s" % sorted(unknown))
    _require("dataset" in doc, "config needs a 'dataset' section")
    _validate_dataset(doc["dataset"])

    widths = doc.get("widths")
    _require(isinstance(widths, list) and widths and all(int(w) >= 1 for w in widths),
             "widths must be a non-empty list of integers >= 1")
    seeds = doc.get("seeds")
    _require(isinstance(seeds, list) and len(seeds) > 0, "seeds must be a non-empty list")
    betas = doc.get("betas", [0.97])
    _require(isinstance(betas, list) and betas and all(0.0 <= float(b) < 1.0 for b in betas),
             "betas must be a non-empty list within [0, 1)")

    eta_rule = doc.get("eta_rule", {"kind": "lambda_m_over_10"})
    _validate_eta_rule(eta_rule)

    mode = doc.get("mode", "discrete")
    _require(mode in MODES, "mode must be one of %s" % (MODES,))

    ode = doc.get("ode")
    if ode is not None:
        _require(isinstance(ode, dict), "ode section must be an object")
        unknown = set(ode) - _ODE_KEYS
        _require(not unknown, "unknown ode keys: %s" % sorted(unknown))
        _require(ode.get("kernel_mode", "frozen") in ("frozen", "coupled"),
                 "ode.kernel_mode must be 'frozen' or 'coupled'")
        _require(float(ode.get("h", 1e-3)) > 0.0, "ode.h must be > 0")
        _require(float(ode.get("t_end", 10.0)) >= 0.0, "ode.t_end must be >= 0")
    if mode == "ode":
        _require(ode is not None, "mode 'ode' requires an 'ode' section")

    methods = tuple(str(m).lower() for m in doc.get("methods", list(METHODS_DEFAULT)))
    _require(methods and all(m in ("gd", "hb", "nag") for m in methods),
             "methods must be drawn from gd/hb/nag")

    lambda0_source = doc.get("lambda0_source", "ntk")
    _require(lambda0_source in LAMBDA0_SOURCES,
             "lambda0_source must be one of %s" % (LAMBDA0_SOURCES,))

    max_iters = int(doc.get("max_iters", 1000))
    record_every = int(doc.get("record_every", 10))
    _require(max_iters >= 0 and record_every >= 1,
             "max_iters must be >= 0 and record_every >= 1")
    delta = float(doc.get("delta", 0.1))
    _require(0.0 < delta <= 1.0, "delta must lie in (0, 1]")

    return ExperimentConfig(
        dataset=doc["dataset"],
        widths=[int(w) for w in widths],
        betas=[float(b) for b in betas],
        eta_rule=eta_rule,
        seeds=[int(s) for s in seeds],
        max_iters=max_iters,
        record_every=record_every,
        mode=mode,
        ode=ode,
        lambda0_source=lambda0_source,
        delta=delta,
        output_dir=str(doc.get("output_dir", "out")),
        methods=methods,
        config_dir=config_dir,
    )


def load_config(path):
    """Read, decode and validate a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as err:
        raise ConfigError("cannot read config %s: %s" % (path, err)) from None
    except json.JSONDecodeError as err:
        raise ConfigError("config %s is not valid JSON: %s" % (path, err)) from None
    return parse_config(doc, config_dir=os.path.dirname(os.path.abspath(path)))
