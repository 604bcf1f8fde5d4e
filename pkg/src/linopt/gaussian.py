"""Renyi-2 entanglement entropy of equally-squeezed vacuum inputs evolved
through a passive linear-optical circuit, plus the deterministic bound
checkers.

Three routes compute the same quantity:

* ``renyi2_eig``   -- production path, from the spectrum of W = V V^dag with
                      V the subsystem block of U U^T;
* ``renyi2_cov``   -- independent cross-oracle via the 2k x 2k reduced
                      covariance matrix and its log-determinant;
* ``renyi2_series``-- diagnostic partial sums in powers of tanh^2(2s).

Entropies are in nats.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import BRICKWALL_1D, BRICKWORK_D, GeometrySpec
from .numerics import hermitian_eigenvalues, logdet_spd, unitarity_defect
from .sampler import CircuitSample

__all__ = [
    "EntropyError",
    "Subsystem",
    "EntropyResult",
    "BoundReport",
    "build_W",
    "renyi2_eig",
    "renyi2_cov",
    "renyi2_series",
    "check_bounds",
    "boundary_modes",
    "box_subsystem",
]

EIG_CLAMP_TOL = 1e-9
DEFECT_TOL = 1e-8
ZERO_PATTERN_TOL = 1e-13


class EntropyError(RuntimeError):
    """Numerically invalid state in an entropy computation."""


@dataclass(frozen=True)
class Subsystem:
    """Strictly increasing 1-based mode indices of the kept subsystem."""

    modes: tuple

    def __post_init__(self):
        modes = tuple(int(m) for m in self.modes)
        if len(modes) == 0:
            raise ValueError("subsystem must be nonempty")
        if any(b <= a for a, b in zip(modes, modes[1:])) or modes[0] < 1:
            raise ValueError(f"modes must be strictly increasing and >= 1: {modes}")
        object.__setattr__(self, "modes", modes)

    @classmethod
    def first_k(cls, k: int) -> "Subsystem":
        return cls(tuple(range(1, k + 1)))

    def complement(self, n: int) -> "Subsystem":
        mine = set(self.modes)
        return Subsystem(tuple(m for m in range(1, n + 1) if m not in mine))

    def indices(self) -> np.ndarray:
        return np.asarray(self.modes, dtype=np.int64) - 1

    def __len__(self) -> int:
        return len(self.modes)


@dataclass(frozen=True)
class EntropyResult:
    value: float
    route: str
    spectrum: np.ndarray = field(default_factory=lambda: np.empty(0))
    series_terms: int = 0

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "route": self.route,
            "spectrum": [float(v) for v in self.spectrum],
        }


def _subsystem(gamma, n: int) -> Subsystem:
    if isinstance(gamma, Subsystem):
        g = gamma
    elif isinstance(gamma, int):
        g = Subsystem.first_k(gamma)
    else:
        g = Subsystem(tuple(gamma))
    if g.modes[-1] > n:
        raise ValueError(f"subsystem mode {g.modes[-1]} out of range 1..{n}")
    return g


def _circuit_matrix(u):
    if isinstance(u, CircuitSample):
        return u.u
    return np.asarray(u, dtype=np.complex128)


def build_W(u, gamma) -> np.ndarray:
    """W = V V^dag with V the Gamma-block of U U^T; Hermitian PSD with
    spectrum in [0, 1] (clamped at the EIG_CLAMP_TOL boundary)."""
    mat = _circuit_matrix(u)
    defect = unitarity_defect(mat)
    if defect > DEFECT_TOL:
        raise EntropyError(
            f"input is not unitary within {DEFECT_TOL:.1e} (defect {defect:.3e})")
    g = _subsystem(gamma, mat.shape[0]).indices()
    v = (mat @ mat.T)[np.ix_(g, g)]
    return v @ v.conj().T


def _clamped_spectrum(w: np.ndarray) -> np.ndarray:
    lam = hermitian_eigenvalues(w, hermitian_defect_tol=1e-8)
    low, high = float(lam[0]), float(lam[-1])
    if low < -EIG_CLAMP_TOL or high > 1.0 + EIG_CLAMP_TOL:
        raise EntropyError(
            "W eigenvalue outside [0,1] beyond clamping tolerance "
            f"{EIG_CLAMP_TOL:.1e}: min={low!r}, max={high!r}, "
            f"spectrum={lam.tolist()!r}")
    return np.clip(lam, 0.0, 1.0)


def renyi2_eig(u, gamma, s: float) -> EntropyResult:
    """S2 = k log cosh(2s) + (1/2) sum_i log(1 - tanh^2(2s) lambda_i)."""
    if s < 0:
        raise ValueError(f"squeezing parameter must be >= 0, got {s}")
    mat = _circuit_matrix(u)
    g = _subsystem(gamma, mat.shape[0])
    lam = _clamped_spectrum(build_W(mat, g))
    t2 = math.tanh(2.0 * s) ** 2
    value = len(g) * math.log(math.cosh(2.0 * s)) + 0.5 * float(
        np.sum(np.log1p(-t2 * lam)))
    if -1e-12 < value < 0.0:
        value = 0.0
    return EntropyResult(value=value, route="eig", spectrum=lam)


def renyi2_cov(u, gamma, s: float) -> EntropyResult:
    """S2 = (1/2) log det sigma, sigma = cosh(2s) I + sinh(2s) M with M the
    Re/Im block matrix of the Gamma-block of conj(U U^T)."""
    if s < 0:
        raise ValueError(f"squeezing parameter must be >= 0, got {s}")
    mat = _circuit_matrix(u)
    g = _subsystem(gamma, mat.shape[0])
    idx = g.indices()
    b = np.conj(mat @ mat.T)[np.ix_(idx, idx)]
    k = len(g)
    m = np.empty((2 * k, 2 * k), dtype=np.float64)
    m[:k, :k] = b.real
    m[:k, k:] = b.imag
    m[k:, :k] = b.imag
    m[k:, k:] = -b.real
    sigma = math.cosh(2.0 * s) * np.eye(2 * k) + math.sinh(2.0 * s) * m
    try:
        value = 0.5 * logdet_spd(sigma)
    except Exception as exc:
        raise EntropyError(f"covariance matrix not positive definite: {exc}") from exc
    return EntropyResult(value=value, route="cov")


def renyi2_series(u, gamma, s: float, max_terms: int = 64) -> EntropyResult:
    """Partial sum of sum_l tanh^(2l)(2s)/(2l) (k - Tr W^l) up to l = max_terms.

    Converges monotonically upward to the eig-route value; diagnostic only.
    """
    if max_terms < 1:
        raise ValueError(f"max_terms must be >= 1, got {max_terms}")
    if s < 0:
        raise ValueError(f"squeezing parameter must be >= 0, got {s}")
    mat = _circuit_matrix(u)
    g = _subsystem(gamma, mat.shape[0])
    w = build_W(mat, g)
    k = len(g)
    t2 = math.tanh(2.0 * s) ** 2
    acc = 0.0
    power = np.eye(k, dtype=np.complex128)
    coeff = 1.0
    for ell in range(1, max_terms + 1):
        power = power @ w
        coeff *= t2
        acc += coeff / (2.0 * ell) * (k - float(np.trace(power).real))
    return EntropyResult(value=acc, route="series", series_terms=max_terms)


# -- bound checkers ----------------------------------------------------------

def boundary_modes(u, gamma, tol: float = ZERO_PATTERN_TOL) -> tuple:
    """Modes of Gamma coupled to the outside through U U^T.

    Returns the 1-based modes x in Gamma with some |(U U^T)_{xy}| > tol for
    y outside Gamma.  Structural zeros of banded circuits are exact floating
    zeros, so the tolerance only guards pathological inputs.
    """
    mat = _circuit_matrix(u)
    n = mat.shape[0]
    g = _subsystem(gamma, n)
    idx = g.indices()
    outside = np.setdiff1d(np.arange(n), idx)
    if outside.size == 0:
        return ()
    coupling = np.abs((mat @ mat.T)[np.ix_(idx, outside)]) > tol
    return tuple(int(m) for m, hit in zip(g.modes, coupling.any(axis=1)) if hit)


def box_subsystem(m: int, dim: int, k_per_axis) -> tuple:
    """Box subsystem {x : x_j <= k_j} of an m^D brickwork, with its boundary
    area A = sum_j 1[k_j < m] prod_{l != j} k_l.

    Returns (Subsystem, area).
    """
    ks = [int(k) for k in k_per_axis]
    if len(ks) != dim or any(not 1 <= k <= m for k in ks):
        raise ValueError(f"need {dim} axis sizes in 1..{m}, got {ks}")
    modes = []
    for coords in np.ndindex(*([m] * dim)):
        if all(c < k for c, k in zip(coords, ks)):
            idx = 0
            for c in coords:
                idx = idx * m + c
            modes.append(idx + 1)
    area = sum(
        (1 if ks[j] < m else 0) * int(np.prod([ks[l] for l in range(dim) if l != j]))
        for j in range(dim))
    return Subsystem(tuple(sorted(modes))), area


@dataclass(frozen=True)
class BoundReport:
    s2: float
    worst_case_bound: float | None
    trivial_bound: float
    boundary_bound: float
    boundary_size: int
    passes: dict

    @property
    def all_pass(self) -> bool:
        return all(self.passes.values())


def check_bounds(sample: CircuitSample, gamma, s: float, slack: float = 1e-9) -> BoundReport:
    """S2 against the light-cone, trivial, and boundary bounds.

    * worst case: 4 d log cosh(2s) for brickwall steps (scaled by the box
      boundary area for D-dim brickwork when Gamma is a coordinate box),
    * trivial:    k log cosh(2s),
    * boundary:   |boundary modes of Gamma under U U^T| log cosh(2s).
    """
    g = _subsystem(gamma, sample.geometry.n)
    s2 = renyi2_eig(sample, g, s).value
    lc = math.log(math.cosh(2.0 * s))
    k = len(g)
    boundary = boundary_modes(sample, g)
    worst = None
    if sample.geometry.label == BRICKWALL_1D:
        worst = 4.0 * sample.depth * lc
    elif sample.geometry.label == BRICKWORK_D and sample.geometry.brickwork is not None:
        m, dim, _ = sample.geometry.brickwork
        area = _box_area_if_box(g, m, dim)
        if area is not None:
            worst = 4.0 * sample.depth * area * lc
    passes = {
        "trivial": s2 <= k * lc + slack,
        "boundary": s2 <= len(boundary) * lc + slack,
    }
    if worst is not None:
        passes["worst_case"] = s2 <= worst + slack
    return BoundReport(s2=s2, worst_case_bound=worst, trivial_bound=k * lc,
                       boundary_bound=len(boundary) * lc,
                       boundary_size=len(boundary), passes=passes)


def _box_area_if_box(g: Subsystem, m: int, dim: int):
    """Boundary area if g is a coordinate box {x : x_j <= k_j}, else None."""
    coords = np.array(np.unravel_index(g.indices(), [m] * dim)).T + 1
    ks = coords.max(axis=0)
    if int(np.prod(ks)) != len(g):
        return None
    box, area = box_subsystem(m, dim, ks)
    return area if box.modes == g.modes else None
