"""Discrete full-batch trainers: GD, heavy ball, and NAG with gradient correction.

All three start from w(-1) = w(0).  NAG differs from HB by the extra
-beta*eta*(grad(t) - grad(t-1)) term; at the first step that correction
is exactly zero.  The training loop records loss every step (divergence
guard) and the expensive kernel diagnostics only at recorded steps.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DivergenceError, RejectedInputError
from .kernel import gram_at, max_displacement
from .model import NetworkState, grad_from_residual, residual

METHODS = ("gd", "hb", "nag")
DIVERGENCE_LOSS = 1e12


@dataclass
class OptimizerConfig:
    method: str
    eta: float
    beta: float = 0.0
    max_iters: int = 1000
    record_every: int = 10

    def __post_init__(self):
        self.method = self.method.lower()
        if self.method not in METHODS:
            raise RejectedInputError("method must be one of %s" % (METHODS,))
        if self.eta <= 0.0:
            raise RejectedInputError("eta must be > 0")
        if not (0.0 <= self.beta < 1.0):
            raise RejectedInputError("beta must lie in [0, 1)")
        if self.max_iters < 0 or self.record_every < 1:
            raise RejectedInputError("max_iters must be >= 0 and record_every >= 1")


@dataclass
class TrajectoryRecord:
    """One recorded point of a training run or ODE integration.

    ``step`` is the iteration count (record index for ODE runs) and ``t``
    the matching continuous time; for discrete runs t = step * sqrt(eta),
    the high-resolution time scale.  ``lyapunov`` is filled only where a
    Lyapunov function is defined; ``max_displacement`` is NaN for
    residual-space integrations that carry no weights.
    """

    step: float
    t: float
    loss: float
    pseudo_loss: float
    residual_norm: float
    max_displacement: float
    lambda_min_H: float
    lyapunov: Optional[float] = None


def gd_step(net, data, eta):
    """W <- W - eta * grad; W_prev <- old W."""
    if eta <= 0.0:
        raise RejectedInputError("eta must be > 0")
    g = grad_from_residual(net, data.X, residual(net, data))
    return NetworkState(net.W - eta * g, net.a, net.W)


def hb_step(net, data, eta, beta):
    """W <- W + beta*(W - W_prev) - eta * grad; W_prev <- old W."""
    if eta <= 0.0 or not (0.0 <= beta < 1.0):
        raise RejectedInputError("need eta > 0 and beta in [0, 1)")
    g = grad_from_residual(net, data.X, residual(net, data))
    W_new = net.W + beta * (net.W - net.W_prev) - eta * g
    return NetworkState(W_new, net.a, net.W)


def nag_step(net, prev_grad, data, eta, beta):
    """Heavy-ball step plus the gradient correction -beta*eta*(g - prev_grad).

    prev_grad must be the gradient at W_prev; with w(-1) = w(0) the
    correction vanishes at the first step.  Returns (new state, g) so the
    caller can reuse g as the next prev_grad.
    """
    if eta <= 0.0 or not (0.0 <= beta < 1.0):
        raise RejectedInputError("need eta > 0 and beta in [0, 1)")
    g = grad_from_residual(net, data.X, residual(net, data))
    W_new = net.W + beta * (net.W - net.W_prev) - eta * g
    W_new = W_new - (beta * eta) * (g - prev_grad)
    return NetworkState(W_new, net.a, net.W), g


def _record(step, t, net, net0, data, delta, loss_val):
    H = gram_at(net, data.X)
    return TrajectoryRecord(
        step=step,
        t=t,
        loss=loss_val,
        pseudo_loss=0.5 * float(delta @ (H.H @ delta)),
        residual_norm=float(np.linalg.norm(delta)),
        max_displacement=max_displacement(net, net0),
        lambda_min_H=H.lambda_min,
        lyapunov=None,
    )


def train(net0, data, cfg):
    """Run cfg.max_iters steps of the selected method, recording diagnostics.

    Records step 0, every cfg.record_every steps, and the final step.
    Raises DivergenceError (carrying the partial trajectory) when the loss
    goes non-finite or above 1e12.
    """
    sqrt_s = math.sqrt(cfg.eta)
    net = net0
    delta = residual(net, data)
    loss_val = 0.5 * float(delta @ delta)
    records = [_record(0, 0.0, net, net0, data, delta, loss_val)]
    prev_grad = None
    if cfg.method == "nag":
        prev_grad = grad_from_residual(net, data.X, delta)

    for k in range(1, cfg.max_iters + 1):
        if cfg.method == "gd":
            net = gd_step(net, data, cfg.eta)
        elif cfg.method == "hb":
            net = hb_step(net, data, cfg.eta, cfg.beta)
        else:
            net, prev_grad = nag_step(net, prev_grad, data, cfg.eta, cfg.beta)
        delta = residual(net, data)
        loss_val = 0.5 * float(delta @ delta)
        if not math.isfinite(loss_val) or loss_val > DIVERGENCE_LOSS:
            raise DivergenceError(
                "training diverged at step %d (loss=%r)" % (k, loss_val),
                trajectory=records,
            )
        if k % cfg.record_every == 0 or k == cfg.max_iters:
            records.append(_record(k, k * sqrt_s, net, net0, data, delta, loss_val))
    return records
