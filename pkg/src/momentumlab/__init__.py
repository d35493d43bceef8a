"""momentumlab: momentum-method convergence laboratory for wide two-layer ReLU nets.

Discrete heavy-ball / Nesterov trainers, high-resolution residual ODEs,
Gram-matrix (NTK) machinery, Lyapunov monitors, closed-form rate and bound
calculators, and a reproducible CLI harness.
"""

from .backend import active_lane

__version__ = "0.1.0"

__all__ = ["active_lane", "__version__"]
