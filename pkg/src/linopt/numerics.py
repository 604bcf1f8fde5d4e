"""Dense complex linear-algebra primitives shared by the other modules.

All functions operate on numpy arrays of complex128 (real inputs are fine
where noted) and are pure: no global state, safe to call concurrently.
"""

import numpy as np

__all__ = [
    "NumericsError",
    "NotPositiveDefiniteError",
    "hs_norm",
    "unitarity_defect",
    "hermitian_eigenvalues",
    "logdet_spd",
]


class NumericsError(ValueError):
    """Invalid input to a linear-algebra primitive."""


class NotPositiveDefiniteError(NumericsError):
    """A matrix required to be positive definite was not."""


def _as_matrix(a):
    a = np.asarray(a)
    if a.ndim != 2:
        raise NumericsError(f"expected a 2-d matrix, got shape {a.shape}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise NumericsError(f"empty matrix of shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag if np.iscomplexobj(a) else a.real)):
        raise NumericsError("matrix contains non-finite entries")
    return a


def _require_square(a):
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise NumericsError(f"expected a square matrix, got shape {a.shape}")
    return a


def hs_norm(a) -> float:
    """Hilbert-Schmidt (Frobenius) norm, (sum |a_ij|^2)^(1/2)."""
    a = _as_matrix(a)
    return float(np.linalg.norm(a))


def unitarity_defect(u) -> float:
    """||U^dag U - I||_hs, the drift certificate for deep matrix products."""
    u = _require_square(u)
    n = u.shape[0]
    return float(np.linalg.norm(u.conj().T @ u - np.eye(n)))


def hermitian_eigenvalues(h, hermitian_defect_tol: float = 1e-10) -> np.ndarray:
    """All real eigenvalues of the Hermitian part (H + H^dag)/2, ascending.

    Rejects inputs whose Hermitian defect ||H - H^dag||_hs exceeds
    hermitian_defect_tol * ||H||_hs (the tolerance is relative; an exactly
    zero matrix always passes).
    """
    h = _require_square(h)
    scale = float(np.linalg.norm(h))
    defect = float(np.linalg.norm(h - h.conj().T))
    if defect > hermitian_defect_tol * max(scale, 1e-300):
        raise NumericsError(
            f"Hermitian defect {defect:.3e} exceeds {hermitian_defect_tol:.1e} * ||H||_hs = "
            f"{hermitian_defect_tol * scale:.3e}")
    sym = 0.5 * (h + h.conj().T)
    return np.linalg.eigvalsh(sym)


def logdet_spd(s) -> float:
    """log det of a real-symmetric positive definite matrix, via Cholesky.

    The determinant is accumulated as a sum of logs of the (positive)
    Cholesky pivots, so it does not overflow for well-conditioned large
    matrices.  Raises NotPositiveDefiniteError if the factorization hits a
    non-positive pivot.
    """
    s = _require_square(s)
    if np.iscomplexobj(s):
        if np.max(np.abs(s.imag)) > 1e-10 * max(float(np.linalg.norm(s)), 1e-300):
            raise NumericsError("logdet_spd expects a real-symmetric matrix")
        s = s.real
    if np.linalg.norm(s - s.T) > 1e-10 * max(float(np.linalg.norm(s)), 1e-300):
        raise NumericsError("logdet_spd expects a symmetric matrix")
    try:
        chol = np.linalg.cholesky(s)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("matrix is not positive definite") from exc
    diag = np.diag(chol)
    if np.any(diag <= 0.0):
        raise NotPositiveDefiniteError("matrix is not positive definite")
    return float(2.0 * np.sum(np.log(diag)))
