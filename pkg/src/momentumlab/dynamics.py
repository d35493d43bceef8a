"""Continuous-time systems and Lyapunov monitors.

Residual dynamics (frozen kernel H = H(0), alpha = lambda0/2):

    gradient flow   d/dt Delta = -H Delta
    low-resolution  Dddot + b*Ddot + H*Delta = 0
    heavy ball      Dddot + sqrt(2*lambda0)*Ddot + (1+sqrt(lambda0*s/2))*H*Delta = 0
    Nesterov        ... + sqrt(s)*H*Ddot extra damping (the gradient correction)

The coupled mode integrates the matching weight-space ODEs instead and
recomputes the kernel at observer points, which verifies that freezing
the kernel is harmless at large width.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DivergenceError, RejectedInputError
from .kernel import GramMatrix, gram_at
from .model import Dataset, NetworkState, forward
from .numerics import OdeState, rk4_integrate
from .optimizers import TrajectoryRecord

SYSTEMS = ("gf_residual", "lowres", "hb_highres", "nag_highres")
KERNEL_MODES = ("frozen", "coupled")


@dataclass
class ResidualState:
    """Residual vector and its time derivative at time t."""

    t: float
    delta: np.ndarray
    delta_dot: np.ndarray


@dataclass
class DynamicsConfig:
    system: str
    kernel_mode: str = "frozen"
    s: float = 0.0
    lambda0: float = 0.0
    b: Optional[float] = None
    h: float = 0.01
    t_end: float = 1.0
    record_every: int = 10
    lambda_m: Optional[float] = None

    def __post_init__(self):
        self.system = self.system.lower()
        self.kernel_mode = self.kernel_mode.lower()
        if self.system not in SYSTEMS:
            raise RejectedInputError("system must be one of %s" % (SYSTEMS,))
        if self.kernel_mode not in KERNEL_MODES:
            raise RejectedInputError("kernel_mode must be one of %s" % (KERNEL_MODES,))
        if self.system == "gf_residual" and self.kernel_mode == "coupled":
            raise RejectedInputError("gradient-flow residual dynamics are frozen-kernel only")
        if self.h <= 0.0 or self.t_end < 0.0 or self.record_every < 1:
            raise RejectedInputError("need h > 0, t_end >= 0, record_every >= 1")
        if self.system in ("hb_highres", "nag_highres"):
            if self.s <= 0.0:
                raise RejectedInputError("high-resolution systems need s > 0")
            if self.lambda0 <= 0.0:
                raise RejectedInputError("high-resolution systems need lambda0 > 0")
            if self.lambda_m is not None and self.s > 2.0 / self.lambda_m:
                raise RejectedInputError(
                    "s=%r exceeds the admissible 2/lambda_m=%r" % (self.s, 2.0 / self.lambda_m)
                )
        if self.system == "lowres":
            if self.b is None:
                if self.lambda0 <= 0.0:
                    raise RejectedInputError("lowres needs b > 0 or lambda0 > 0 to default it")
                self.b = math.sqrt(2.0 * self.lambda0)
            if self.b <= 0.0:
                raise RejectedInputError("damping b must be > 0")


def _kernel_matrix(H):
    return H.H if isinstance(H, GramMatrix) else np.asarray(H, dtype=np.float64)


def hb_residual_rhs(state, H, s, lambda0):
    """Acceleration of the heavy-ball residual dynamics."""
    Hm = _kernel_matrix(H)
    stiff = 1.0 + math.sqrt(lambda0 * s / 2.0)
    return -math.sqrt(2.0 * lambda0) * state.delta_dot - stiff * (Hm @ state.delta)


def nag_residual_rhs(state, H, s, lambda0):
    """Acceleration of the Nesterov residual dynamics.

    The -sqrt(s) * H * Ddot term is the gradient correction; at s = 0 it
    vanishes and the system coincides with heavy ball.
    """
    Hm = _kernel_matrix(H)
    stiff = 1.0 + math.sqrt(lambda0 * s / 2.0)
    return (
        -math.sqrt(2.0 * lambda0) * state.delta_dot
        - math.sqrt(s) * (Hm @ state.delta_dot)
        - stiff * (Hm @ state.delta)
    )


def lyapunov_hb(state, H, s, lambda0):
    """V = (1+sqrt(lambda0 s/2)) Lhat + ||Ddot||^2/4 + ||Ddot + sqrt(2 lambda0) Delta||^2/4."""
    Hm = _kernel_matrix(H)
    d, dd = state.delta, state.delta_dot
    lhat = 0.5 * float(d @ (Hm @ d))
    mix = dd + math.sqrt(2.0 * lambda0) * d
    return (
        (1.0 + math.sqrt(lambda0 * s / 2.0)) * lhat
        + 0.25 * float(dd @ dd)
        + 0.25 * float(mix @ mix)
    )


def lyapunov_nag(state, H, s, lambda0):
    """As lyapunov_hb with the extra sqrt(s) * H * Delta term in the mixed norm."""
    Hm = _kernel_matrix(H)
    d, dd = state.delta, state.delta_dot
    lhat = 0.5 * float(d @ (Hm @ d))
    mix = dd + math.sqrt(2.0 * lambda0) * d + math.sqrt(s) * (Hm @ d)
    return (
        (1.0 + math.sqrt(lambda0 * s / 2.0)) * lhat
        + 0.25 * float(dd @ dd)
        + 0.25 * float(mix @ mix)
    )


def gradient_flow_residual(H, delta0, cfg):
    """Integrate d/dt Delta = -H Delta; returns the ResidualState trajectory."""
    if cfg.kernel_mode != "frozen":
        raise RejectedInputError("gradient flow integrates with a frozen kernel")
    Hm = _kernel_matrix(H)
    delta0 = np.asarray(delta0, dtype=np.float64)
    out = [ResidualState(0.0, delta0.copy(), -(Hm @ delta0))]
    if cfg.t_end == 0.0:
        return out
    counter = [0]

    def rhs(t, y):
        return -(Hm @ y)

    def observer(t, y):
        counter[0] += 1
        if counter[0] % cfg.record_every == 0:
            out.append(ResidualState(t, y.copy(), -(Hm @ y)))

    final = rk4_integrate(rhs, OdeState(0.0, delta0), cfg.t_end, cfg.h, observer)
    if out[-1].t != final.t:
        out.append(ResidualState(final.t, final.y.copy(), -(Hm @ final.y)))
    return out


def _residual_record(step, t, delta, delta_dot, H0, cfg):
    lyap = None
    if cfg.system == "hb_highres":
        lyap = lyapunov_hb(ResidualState(t, delta, delta_dot), H0, cfg.s, cfg.lambda0)
    elif cfg.system == "nag_highres":
        lyap = lyapunov_nag(ResidualState(t, delta, delta_dot), H0, cfg.s, cfg.lambda0)
    return TrajectoryRecord(
        step=step,
        t=t,
        loss=0.5 * float(delta @ delta),
        pseudo_loss=0.5 * float(delta @ (H0.H @ delta)),
        residual_norm=float(np.linalg.norm(delta)),
        max_displacement=float("nan"),
        lambda_min_H=H0.lambda_min,
        lyapunov=lyap,
    )


def _integrate_frozen(delta0, H0, cfg):
    if cfg.system == "gf_residual":
        states = gradient_flow_residual(H0, delta0, cfg)
        return [
            _residual_record(i, st.t, st.delta, st.delta_dot, H0, cfg)
            for i, st in enumerate(states)
        ]

    n = delta0.shape[0]
    records = [_residual_record(0, 0.0, delta0, np.zeros(n), H0, cfg)]
    if cfg.t_end == 0.0:
        return records
    Hm = H0.H
    stiff = 1.0 + math.sqrt(cfg.lambda0 * cfg.s / 2.0) if cfg.system != "lowres" else 1.0
    damp = cfg.b if cfg.system == "lowres" else math.sqrt(2.0 * cfg.lambda0)
    sqrt_s = math.sqrt(cfg.s) if cfg.system == "nag_highres" else 0.0

    def rhs(t, y):
        d, dd = y[:n], y[n:]
        acc = -damp * dd - stiff * (Hm @ d)
        if sqrt_s:
            acc -= sqrt_s * (Hm @ dd)
        return np.concatenate((dd, acc))

    counter = [0]

    def observer(t, y):
        counter[0] += 1
        if counter[0] % cfg.record_every == 0:
            records.append(_residual_record(len(records), t, y[:n].copy(), y[n:].copy(), H0, cfg))

    y0 = np.concatenate((delta0, np.zeros(n)))
    try:
        final = rk4_integrate(rhs, OdeState(0.0, y0), cfg.t_end, cfg.h, observer)
    except DivergenceError as err:
        raise DivergenceError(str(err), state=err.state, trajectory=records) from None
    if records[-1].t != final.t:
        records.append(
            _residual_record(len(records), final.t, final.y[:n].copy(), final.y[n:].copy(), H0, cfg)
        )
    return records


def _coupled_record(step, t, W, V, net0, data, cfg):
    m = W.shape[0]
    net_t = NetworkState(W, net0.a, W)
    f = forward(net_t, data.X)
    delta = f - data.y
    active = (W @ data.X.T) >= 0.0
    delta_dot = ((active * (V @ data.X.T)) * net0.a[:, None]).sum(axis=0) / math.sqrt(m)
    H_t = gram_at(net_t, data.X)
    lyap = None
    if cfg.system == "hb_highres":
        lyap = lyapunov_hb(ResidualState(t, delta, delta_dot), H_t, cfg.s, cfg.lambda0)
    elif cfg.system == "nag_highres":
        lyap = lyapunov_nag(ResidualState(t, delta, delta_dot), H_t, cfg.s, cfg.lambda0)
    diff = W - net0.W
    return TrajectoryRecord(
        step=step,
        t=t,
        loss=0.5 * float(delta @ delta),
        pseudo_loss=0.5 * float(delta @ (H_t.H @ delta)),
        residual_norm=float(np.linalg.norm(delta)),
        max_displacement=float(np.sqrt(np.max(np.sum(diff * diff, axis=1)))),
        lambda_min_H=H_t.lambda_min,
        lyapunov=lyap,
    )


def _integrate_coupled(net0, data, cfg):
    from .model import grad_from_residual

    m, d = net0.m, net0.d
    X, ylab, a = data.X, data.y, net0.a
    md = m * d
    damp = cfg.b if cfg.system == "lowres" else math.sqrt(2.0 * cfg.lambda0)
    stiff = 1.0 + math.sqrt(cfg.lambda0 * cfg.s / 2.0) if cfg.system != "lowres" else 1.0
    sqrt_s = math.sqrt(cfg.s) if cfg.system == "nag_highres" else 0.0
    sqrt_m = math.sqrt(m)

    def rhs(t, y):
        W = y[:md].reshape(m, d)
        V = y[md:].reshape(m, d)
        net_t = NetworkState(W, a, W)
        delta = forward(net_t, X) - ylab
        G = grad_from_residual(net_t, X, delta)
        acc = -damp * V - stiff * G
        if sqrt_s:
            # almost-sure Hessian: row r gets (1/m) sum_i 1{w_r.x_i>=0} (x_i.v_r) x_i
            act = (W @ X.T) >= 0.0
            acc -= sqrt_s * (((act * (V @ X.T)) / m) @ X)
        return np.concatenate((V.ravel(), acc.ravel()))

    records = [_coupled_record(0, 0.0, net0.W, np.zeros((m, d)), net0, data, cfg)]
    if cfg.t_end == 0.0:
        return records
    counter = [0]

    def observer(t, y):
        counter[0] += 1
        if counter[0] % cfg.record_every == 0:
            records.append(
                _coupled_record(
                    len(records), t, y[:md].reshape(m, d).copy(), y[md:].reshape(m, d).copy(),
                    net0, data, cfg,
                )
            )

    y0 = np.concatenate((net0.W.ravel(), np.zeros(md)))
    try:
        final = rk4_integrate(rhs, OdeState(0.0, y0), cfg.t_end, cfg.h, observer)
    except DivergenceError as err:
        raise DivergenceError(str(err), state=err.state, trajectory=records) from None
    if records[-1].t != final.t:
        records.append(
            _coupled_record(
                len(records), final.t, final.y[:md].reshape(m, d).copy(),
                final.y[md:].reshape(m, d).copy(), net0, data, cfg,
            )
        )
    return records


def integrate_dynamics(init, data, cfg, gram=None):
    """Integrate the configured system from rest (Ddot(0) = 0, Wdot(0) = 0).

    ``init`` is either a NetworkState (residual and kernel derived from it)
    or a raw residual vector, in which case ``gram`` must supply the frozen
    kernel.  Returns TrajectoryRecord points at the observer cadence.
    """
    if cfg.kernel_mode == "coupled":
        if not isinstance(init, NetworkState):
            raise RejectedInputError("coupled mode needs a NetworkState initial condition")
        return _integrate_coupled(init, data, cfg)

    if isinstance(init, NetworkState):
        delta0 = forward(init, data.X) - data.y
        H0 = gram if gram is not None else gram_at(init, data.X)
    else:
        delta0 = np.asarray(init, dtype=np.float64)
        if gram is None:
            raise RejectedInputError("frozen mode with a raw residual needs an explicit kernel")
        H0 = gram
    return _integrate_frozen(delta0, H0, cfg)
