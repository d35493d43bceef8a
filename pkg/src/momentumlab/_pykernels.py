"""Pure numpy implementations of the hot kernels.

These are the fallback lane used when the compiled extension
(momentumlab._ckernels) is unavailable; see momentumlab.backend for the
selection logic.  Both lanes implement the same contracts and agree to
floating-point roundoff.
"""

import numpy as np

LANE = "pure"


def relu_forward(W, a, X):
    """Network output (1/sqrt(m)) * sum_r a_r * max(w_r . x_i, 0) for every row of X."""
    m = W.shape[0]
    Z = W @ X.T
    return (a @ np.maximum(Z, 0.0)) / np.sqrt(m)


def relu_grad(W, a, X, delta):
    """Loss gradient rows (a_r/sqrt(m)) * sum_i delta_i * x_i * 1{w_r . x_i >= 0}."""
    m = W.shape[0]
    active = (W @ X.T) >= 0.0
    G = (active * delta) @ X
    G *= (a / np.sqrt(m))[:, None]
    return G


def gram_counts(W, X):
    """Co-activation counts S_ij = sum_r 1{w_r.x_i >= 0} 1{w_r.x_j >= 0}."""
    active = ((W @ X.T) >= 0.0).astype(np.float64)
    return active.T @ active


def jacobi_extremes(A, rel_tol=1e-12, max_sweeps=60):
    """Extreme eigenvalues of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius norm drops below
    rel_tol * ||A||_F.  Returns (lambda_min, lambda_max).
    """
    A = np.array(A, dtype=np.float64, copy=True)
    n = A.shape[0]
    if n == 1:
        return float(A[0, 0]), float(A[0, 0])
    fro = np.sqrt(np.sum(A * A))
    tol = rel_tol * fro
    for _ in range(max_sweeps):
        off2 = np.sum(A * A) - np.sum(np.diag(A) ** 2)
        if np.sqrt(max(off2, 0.0)) <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                app = A[p, p]
                aqq = A[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                colp = A[:, p].copy()
                colq = A[:, q].copy()
                newp = c * colp - s * colq
                newq = s * colp + c * colq
                A[:, p] = newp
                A[p, :] = newp
                A[:, q] = newq
                A[q, :] = newq
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = 0.0
                A[q, p] = 0.0
    else:
        raise RuntimeError("Jacobi eigensolver failed to converge within %d sweeps" % max_sweeps)
    diag = np.diag(A)
    return float(diag.min()), float(diag.max())
