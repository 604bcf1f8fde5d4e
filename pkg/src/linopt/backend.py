"""Kernel backend selection.

The hot inner loops (circuit layer products, Givens zeroing sweeps) have two
implementations: a numba @njit version and a pure-numpy fallback.  The env
var LINOPT_BACKEND picks one:

    LINOPT_BACKEND=numba   force numba (error if numba unavailable)
    LINOPT_BACKEND=numpy   force the pure-numpy path
    unset / "auto"         numba if importable, else numpy

Both paths perform the same floating-point operations in the same order, so
results are bit-identical; ``tests/test_kernels.py`` asserts this.
"""

import os

_CHOICES = ("auto", "numba", "numpy")


def _env_choice() -> str:
    v = os.environ.get("LINOPT_BACKEND", "auto").strip().lower()
    if v not in _CHOICES:
        raise ValueError(
            f"LINOPT_BACKEND must be one of {_CHOICES}, got {v!r}")
    return v


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


_ACTIVE = None


def active_backend() -> str:
    """Return 'numba' or 'numpy', resolving the env flag once per process."""
    global _ACTIVE
    if _ACTIVE is None:
        choice = _env_choice()
        if choice == "numpy":
            _ACTIVE = "numpy"
        elif choice == "numba":
            if not _numba_available():
                raise RuntimeError("LINOPT_BACKEND=numba but numba is not importable")
            _ACTIVE = "numba"
        else:
            _ACTIVE = "numba" if _numba_available() else "numpy"
    return _ACTIVE
