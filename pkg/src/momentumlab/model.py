"""Two-layer ReLU network with a fixed sign output layer.

f(x) = (1/sqrt(m)) * sum_r a_r * max(w_r . x, 0), square loss over a
dataset of unit-norm inputs with +-1 labels.  Only the hidden weights W
train; the signs a stay fixed.  The previous iterate W_prev rides along
for the momentum updates (w(-1) = w(0) at initialization).
"""

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import RejectedInputError
from .numerics import Rng, sample_normal, sample_rademacher

UNIT_NORM_TOL = 1e-12
PARALLEL_TOL = 1e-6


@dataclass
class NetworkState:
    """Hidden weights (m x d rows w_r), fixed signs a, previous iterate."""

    W: np.ndarray
    a: np.ndarray
    W_prev: np.ndarray

    @property
    def m(self):
        return self.W.shape[0]

    @property
    def d(self):
        return self.W.shape[1]

    def copy(self):
        return NetworkState(self.W.copy(), self.a.copy(), self.W_prev.copy())


@dataclass
class Dataset:
    """n unit-norm input rows with +-1 labels, pairwise non-parallel."""

    X: np.ndarray
    y: np.ndarray

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]


def validate_dataset(data):
    """Check unit norms, pairwise non-parallelism and +-1 labels."""
    X, y = data.X, data.y
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise RejectedInputError("dataset shapes are inconsistent")
    norms = np.linalg.norm(X, axis=1)
    if np.any(np.abs(norms - 1.0) > UNIT_NORM_TOL):
        raise RejectedInputError("input rows are not unit norm")
    G = np.abs(X @ X.T)
    np.fill_diagonal(G, 0.0)
    if np.any(G >= 1.0 - PARALLEL_TOL):
        raise RejectedInputError("dataset contains (anti)parallel input rows")
    if np.any(np.abs(y) != 1.0):
        raise RejectedInputError("labels must be +1 or -1")


def init_network(m, d, rng):
    """Fresh network: W rows ~ N(0, I_d), signs a ~ uniform{-1,+1}, W_prev = W.

    Draw order is fixed (all of W, then a) so a seed pins the state bit
    for bit.
    """
    m, d = int(m), int(d)
    if m < 1 or d < 1:
        raise RejectedInputError("m and d must be >= 1")
    W = np.ascontiguousarray(sample_normal(rng, m * d).reshape(m, d))
    a = sample_rademacher(rng, m)
    return NetworkState(W, a, W.copy())


def forward(net, X):
    """Prediction vector f over the rows of X."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != net.d:
        raise RejectedInputError(
            "input dimension mismatch: X has %d columns, network expects %d"
            % (X.shape[-1], net.d)
        )
    return backend.relu_forward(net.W, net.a, X)


def loss(f, y):
    """Square loss (1/2) sum_i (f_i - y_i)^2, accumulated pairwise (np.sum)."""
    f = np.asarray(f, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if f.shape != y.shape:
        raise RejectedInputError("prediction/label length mismatch")
    r = f - y
    return 0.5 * float(np.sum(r * r))


def residual(net, data):
    """delta = f - y; satisfies ||delta||^2 = 2 * loss."""
    return forward(net, data.X) - data.y


def grad_from_residual(net, X, delta):
    """Gradient rows (a_r/sqrt(m)) sum_i delta_i x_i 1{w_r.x_i >= 0}.

    Ties at w_r . x_i = 0 count as active.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    delta = np.ascontiguousarray(delta, dtype=np.float64)
    return backend.relu_grad(net.W, net.a, X, delta)


def grad_w(net, data):
    """Full-batch loss gradient with respect to W."""
    return grad_from_residual(net, data.X, residual(net, data))
