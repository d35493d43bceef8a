"""Deterministic numerical kernels: seeded RNG, symmetric eigensolver, RK4.

The RNG is counter based (SplitMix64 finalizer over seed + index), so a
draw depends only on (seed, stream position).  Two calls of count k then
count j produce exactly the draws of one call of count k + j, and streams
can be split by offsetting the counter.  Normals come from Box-Muller on
the counter stream, one uniform pair per draw.
"""

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import DivergenceError, RejectedInputError

_MASK64 = (1 << 64) - 1
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_TWO_NEG53 = 2.0 ** -53


def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


class Rng:
    """Counter-based pseudo-random stream with a 64-bit seed."""

    __slots__ = ("seed", "counter")

    def __init__(self, seed, counter=0):
        self.seed = int(seed) & _MASK64
        self.counter = int(counter) & _MASK64

    def clone(self):
        return Rng(self.seed, self.counter)

    def jump(self, offset):
        """Advance the counter without drawing; used to split streams."""
        self.counter = (self.counter + int(offset)) & _MASK64

    def _raw(self, count):
        """count mixed 64-bit words; advances the counter by count."""
        idx = np.arange(1, count + 1, dtype=np.uint64) + np.uint64(self.counter)
        self.counter = (self.counter + count) & _MASK64
        return _mix64(np.uint64(self.seed) + idx * _GAMMA)

    def uniform(self, count):
        """count uniforms in [0, 1)."""
        return (self._raw(count) >> np.uint64(11)).astype(np.float64) * _TWO_NEG53


def sample_normal(rng, count):
    """count i.i.d. standard-normal draws (Box-Muller, cosine branch).

    Each draw consumes exactly two counter positions, which makes the
    stream position-addressable: draw i only depends on positions
    (2i, 2i+1) relative to the counter at call time.
    """
    count = int(count)
    if count < 0:
        raise RejectedInputError("count must be >= 0")
    raw = rng._raw(2 * count)
    u1 = ((raw[0::2] >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * _TWO_NEG53
    u2 = (raw[1::2] >> np.uint64(11)).astype(np.float64) * _TWO_NEG53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def sample_rademacher(rng, count):
    """count i.i.d. signs, +1 or -1 with probability 1/2 each."""
    count = int(count)
    if count < 0:
        raise RejectedInputError("count must be >= 0")
    raw = rng._raw(count)
    return np.where((raw >> np.uint64(63)).astype(bool), 1.0, -1.0)


def symmetrize(M):
    """Exactly symmetric copy: (M + M.T) / 2 entry by entry."""
    M = np.asarray(M, dtype=np.float64)
    return 0.5 * (M + M.T)


def eig_extremes(M):
    """(lambda_min, lambda_max) of a symmetric matrix via cyclic Jacobi.

    Rotations run until the off-diagonal Frobenius norm is below
    1e-12 * ||M||_F.  Non-finite or non-symmetric input is rejected.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise RejectedInputError("expected a square matrix of order >= 1")
    if not np.all(np.isfinite(M)):
        raise RejectedInputError("matrix has non-finite entries")
    if not np.array_equal(M, M.T):
        raise RejectedInputError("matrix is not symmetric as stored")
    return backend.jacobi_extremes(np.ascontiguousarray(M))


@dataclass
class OdeState:
    """Time plus flattened first-order state vector."""

    t: float
    y: np.ndarray


def rk4_integrate(f, y0, t_end, h, observer=None):
    """Classical fixed-step RK4 from y0.t to t_end.

    The last step is shortened to land exactly on t_end.  ``observer(t, y)``
    is invoked after every accepted step.  A non-finite state raises
    DivergenceError carrying the last finite OdeState.
    """
    if h <= 0.0:
        raise RejectedInputError("step size h must be > 0")
    t0 = float(y0.t)
    t_end = float(t_end)
    if t_end < t0:
        raise RejectedInputError("t_end must be >= y0.t")
    y = np.array(y0.y, dtype=np.float64).ravel()
    total = t_end - t0
    n_full = int(np.floor(total / h + 1e-12))
    h_last = total - n_full * h
    if h_last <= 1e-12 * max(h, 1.0):
        h_last = 0.0

    t = t0
    for k in range(n_full + (1 if h_last > 0.0 else 0)):
        hh = h if k < n_full else h_last
        k1 = f(t, y)
        k2 = f(t + 0.5 * hh, y + (0.5 * hh) * k1)
        k3 = f(t + 0.5 * hh, y + (0.5 * hh) * k2)
        k4 = f(t + hh, y + hh * k3)
        y_new = y + (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t_new = t0 + (k + 1) * h if k + 1 <= n_full else t_end
        if k + 1 == n_full + (1 if h_last > 0.0 else 0):
            t_new = t_end
        if not np.all(np.isfinite(y_new)):
            raise DivergenceError(
                "non-finite state at t=%r" % t_new, state=OdeState(t, y)
            )
        t, y = t_new, y_new
        if observer is not None:
            observer(t, y)
    return OdeState(t_end, y)
