"""Closed-form convergence rates, the max-min rate program, and bound curves.

Rates are returned as dimensionless factors rho; the time constant is
always rho * sqrt(lambda0 / 2).  The heavy-ball factor is 2 - sqrt(2); the
Nesterov factor rho_nag(alpha) = (4 + 3a - sqrt(8 + 16a + 9a^2)) / 2 with
alpha = sqrt(2 * lambda0 * s) / 4 exceeds it for every alpha > 0, which is
the closed-form expression of the gradient-correction speedup.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import RejectedInputError

RHO_HB = 2.0 - math.sqrt(2.0)

_PHI_MAX = 10.0
_GRID_STEP = 1e-4
_GOLDEN_TOL = 1e-8
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def rho_hb():
    """Dimensionless heavy-ball rate factor, exactly 2 - sqrt(2)."""
    return RHO_HB


def rho_nag(alpha):
    """Dimensionless Nesterov rate factor on alpha in [0, 1/2].

    Uses the 9*alpha^2 discriminant, the only variant that matches both
    endpoint values 2 - sqrt(2) at alpha = 0 and (11 - sqrt(73))/4 at
    alpha = 1/2; strictly increasing on the domain.
    """
    alpha = float(alpha)
    if not (0.0 <= alpha <= 0.5):
        raise RejectedInputError("alpha must lie in [0, 0.5], got %r" % alpha)
    return 0.5 * (4.0 + 3.0 * alpha - math.sqrt(8.0 + 16.0 * alpha + 9.0 * alpha * alpha))


def rho_nag_main_text(alpha):
    """The alpha^2-discriminant variant printed in the theorem statement.

    Kept for comparison plots only; it does not reproduce the stated
    endpoint (11 - sqrt(73))/4 at alpha = 1/2.
    """
    alpha = float(alpha)
    if not (0.0 <= alpha <= 0.5):
        raise RejectedInputError("alpha must lie in [0, 0.5], got %r" % alpha)
    return 0.5 * (4.0 + 3.0 * alpha - math.sqrt(8.0 + 16.0 * alpha + alpha * alpha))


def _objective(problem, alpha, phi):
    """min-of-ratios objective h(phi) after the inner maximizations.

    HB: max over z in [0,1] of min{2z, 4/(2+1/phi), (1-z)/(1+phi)}.  The
    first ratio increases in z and the third decreases, so the inner max
    sits at their crossing z = 1/(3+2phi), leaving
    min{2/(3+2phi), 4/(2+1/phi)}.
    NAG: min{2/(3+2phi), 4(1+alpha)/(2+1/phi), 4/(1+phi)}; dropping the
    (1+alpha) factor gives the no-gradient-correction ablation.
    """
    first = 2.0 / (3.0 + 2.0 * phi)
    second = 4.0 / (2.0 + 1.0 / phi)
    if problem == "HB":
        return np.minimum(first, second)
    third = 4.0 / (1.0 + phi)
    if problem == "NAG":
        return np.minimum(np.minimum(first, (1.0 + alpha) * second), third)
    if problem == "NAG_NO_CORRECTION":
        return np.minimum(np.minimum(first, second), third)
    raise RejectedInputError("unknown problem %r" % (problem,))


def maxmin_rate_solver(problem, alpha=0.0):
    """Numerical solution of the max-min rate program.

    Grid search over phi in (0, 10] at step 1e-4, then golden-section
    refinement of the bracketing interval to 1e-8.  Returns the
    dimensionless rate factor.
    """
    alpha = float(alpha)
    if problem in ("NAG",) and not (0.0 <= alpha <= 0.5):
        raise RejectedInputError("alpha must lie in [0, 0.5] for NAG")
    phis = np.arange(_GRID_STEP, _PHI_MAX + _GRID_STEP / 2, _GRID_STEP)
    vals = _objective(problem, alpha, phis)
    k = int(np.argmax(vals))
    lo = phis[max(k - 1, 0)]
    hi = phis[min(k + 1, len(phis) - 1)]

    # golden-section on the unimodal min-of-monotone-ratios objective
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = _objective(problem, alpha, c)
    fd = _objective(problem, alpha, d)
    while b - a > _GOLDEN_TOL:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = _objective(problem, alpha, c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = _objective(problem, alpha, d)
    return float(max(fc, fd))


@dataclass
class RateBundle:
    """Everything needed to draw a convergence bound curve."""

    lambda0: float
    s: float
    alpha: float
    rho_hb: float
    rho_nag: float
    prefactor_hb: float
    prefactor_nag: float
    L_hat0: float
    s_requested: float
    s_clamped: bool


def make_rate_bundle(lambda0, s, L_hat0, lambda_m=None):
    """Assemble rate constants and bound prefactors.

    When lambda_m is given and s exceeds the admissible 2/lambda_m, the
    bound-side s is clamped to 2/lambda_m and the bundle flags it.
    """
    lambda0 = float(lambda0)
    s_requested = float(s)
    if lambda0 <= 0.0 or s_requested <= 0.0 or L_hat0 < 0.0:
        raise RejectedInputError("lambda0, s must be > 0 and L_hat0 >= 0")
    s_used = s_requested
    clamped = False
    if lambda_m is not None and s_used > 2.0 / lambda_m:
        s_used = 2.0 / lambda_m
        clamped = True
    alpha = math.sqrt(2.0 * lambda0 * s_used) / 4.0
    return RateBundle(
        lambda0=lambda0,
        s=s_used,
        alpha=alpha,
        rho_hb=rho_hb(),
        rho_nag=rho_nag(alpha),
        prefactor_hb=6.0 * L_hat0 / lambda0,
        prefactor_nag=26.0 * L_hat0 / (3.0 * lambda0),
        L_hat0=float(L_hat0),
        s_requested=s_requested,
        s_clamped=clamped,
    )


def bound_curve(method, bundle, t):
    """Theoretical loss bound at time t for "hb" or "nag"."""
    t = float(t)
    if t < 0.0:
        raise RejectedInputError("t must be >= 0")
    scale = math.sqrt(bundle.lambda0 / 2.0)
    method = method.lower()
    if method == "hb":
        return bundle.prefactor_hb * math.exp(-bundle.rho_hb * scale * t)
    if method == "nag":
        return bundle.prefactor_nag * math.exp(-bundle.rho_nag * scale * t)
    raise RejectedInputError("method must be 'hb' or 'nag'")


def width_requirement(n, lambda0, delta):
    """Advisory width n^6 / (delta^3 lambda0^4) with implied constant 1."""
    n = int(n)
    lambda0 = float(lambda0)
    delta = float(delta)
    if n < 1 or lambda0 <= 0.0 or not (0.0 < delta <= 1.0):
        raise RejectedInputError("need n >= 1, lambda0 > 0, delta in (0, 1]")
    return n ** 6 / (delta ** 3 * lambda0 ** 4)


def radius_bounds(method, L_hat0, n, lambda0, m):
    """Proven weight-displacement radii: hb 10*sqrt(6*Lhat0*n/(lambda0^3 m)),
    nag 25*sqrt(Lhat0*n/(lambda0^3 m))."""
    L_hat0, lambda0 = float(L_hat0), float(lambda0)
    n, m = int(n), int(m)
    if min(L_hat0, lambda0) <= 0.0 or n < 1 or m < 1:
        raise RejectedInputError("all radius-bound arguments must be positive")
    base = L_hat0 * n / (lambda0 ** 3 * m)
    method = method.lower()
    if method == "hb":
        return 10.0 * math.sqrt(6.0 * base)
    if method == "nag":
        return 25.0 * math.sqrt(base)
    raise RejectedInputError("method must be 'hb' or 'nag'")
