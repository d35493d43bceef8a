"""Gram-matrix machinery for the network's tangent features.

H(t)_ij = (1/m) (x_i . x_j) sum_r 1{w_r.x_i >= 0} 1{w_r.x_j >= 0} is the
finite-width kernel; its infinite-width limit has the arc-cosine closed
form (x.x') (pi - arccos(x.x')) / (2 pi) for unit-norm inputs, and is also
available as a Monte Carlo average over shared Gaussian draws (the
literal limit definition, kept as the verification oracle).
"""

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import DegenerateDataError, RejectedInputError
from .numerics import eig_extremes, symmetrize

PSD_TOL = 1e-10
_MC_CHUNK = 65536


@dataclass
class GramMatrix:
    """Symmetric PSD kernel matrix with cached extreme eigenvalues."""

    H: np.ndarray
    lambda_min: float
    lambda_max: float

    @property
    def order(self):
        return self.H.shape[0]


@dataclass
class SpectrumReport:
    """lambda0 = lambda_min(reference kernel), the spectral cap
    lambda_m = lambda_max + lambda0/4, and the step bound s_max = 2/lambda_m."""

    lambda0: float
    lambda_m: float
    s_max: float


def _finalize(H):
    H = symmetrize(H)
    lo, hi = eig_extremes(H)
    return GramMatrix(H, lo, hi)


def gram_at(net, X):
    """Finite-width Gram matrix of the network at its current weights."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.shape[1] != net.d:
        raise RejectedInputError("input dimension mismatch")
    counts = backend.gram_counts(net.W, X)
    H = (X @ X.T) * counts / net.m
    return _finalize(H)


def ntk_limit_closed(X):
    """Infinite-width kernel in closed form; rows of X must be unit norm."""
    X = np.asarray(X, dtype=np.float64)
    norms = np.linalg.norm(X, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-12):
        raise RejectedInputError("rows must be unit norm for the closed-form kernel")
    G = X @ X.T
    H = G * (np.pi - np.arccos(np.clip(G, -1.0, 1.0))) / (2.0 * np.pi)
    return _finalize(H)


def ntk_limit_mc(X, samples, rng):
    """Monte Carlo estimate of the infinite-width kernel.

    Averages (x_i . x_j) 1{w.x_i >= 0} 1{w.x_j >= 0} over ``samples``
    shared draws w ~ N(0, I_d).  Chunk size is fixed so the accumulation
    order (and hence the result) is deterministic.
    """
    samples = int(samples)
    if samples < 1:
        raise RejectedInputError("samples must be >= 1")
    X = np.ascontiguousarray(X, dtype=np.float64)
    n, d = X.shape
    counts = np.zeros((n, n))
    done = 0
    from .numerics import sample_normal

    while done < samples:
        k = min(_MC_CHUNK, samples - done)
        Wmc = sample_normal(rng, k * d).reshape(k, d)
        active = ((Wmc @ X.T) >= 0.0).astype(np.float64)
        counts += active.T @ active
        done += k
    H = (X @ X.T) * counts / samples
    return _finalize(H)


def spectrum_report(Hinf):
    """lambda0, lambda_m and s_max from a reference kernel."""
    lam0 = Hinf.lambda_min
    if lam0 <= 0.0:
        raise DegenerateDataError(
            "lambda_min(H) = %r <= 0: inputs are effectively parallel" % lam0
        )
    lam_m = Hinf.lambda_max + lam0 / 4.0
    return SpectrumReport(lam0, lam_m, 2.0 / lam_m)


def max_displacement(net, net0):
    """max_r ||w_r - w_r(0)||_2 between two same-shape networks."""
    if net.W.shape != net0.W.shape:
        raise RejectedInputError("networks have different shapes")
    diff = net.W - net0.W
    return float(np.sqrt(np.max(np.sum(diff * diff, axis=1))))
