"""Dispatch to the numba or pure-numpy kernel implementations.

See ``linopt.backend`` for how the backend is selected.
"""

from . import backend as _backend

if _backend.active_backend() == "numba":
    from ._kernels_numba import apply_steps, zeroing_sweep
else:
    from ._kernels_numpy import apply_steps, zeroing_sweep

__all__ = ["apply_steps", "zeroing_sweep"]
