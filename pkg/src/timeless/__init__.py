"""Quantum dynamics relative to finite-resource clocks.

Two consistent pictures of measurement without external time: invariant
(twirled) observables on a static history state, and dynamically purified
measurements driven by the clock itself.  The package provides both
engines for ideal and finite-bandwidth clocks, a discrete-time variant,
and a CLI that reproduces the reference figures and checks as CSV tables,
JSON manifests and rendered plots.
"""

from .clocks import (
    ClockKind,
    ClockModel,
    KernelEvaluator,
    TimeGrid,
    cumulative_kernel_F,
    overlap_kernel_f,
    sine_integral,
)
from .tensor import expm_hermitian_generator, kron

__version__ = "0.1.0"

__all__ = [
    "ClockKind",
    "ClockModel",
    "KernelEvaluator",
    "TimeGrid",
    "cumulative_kernel_F",
    "overlap_kernel_f",
    "sine_integral",
    "expm_hermitian_generator",
    "kron",
    "__version__",
]
