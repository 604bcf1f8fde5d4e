"""Exact Reck-style interferometer decomposition and banded approximate
compression of deep brickwall circuits.

The zeroing sweep multiplies U from the right by Givens-type rotations
T_{r,m} acting on the (m, m+1) column plane, bottom row first, left-most
in-band entry first, producing a near-diagonal D.  Phase gates then make
the diagonal of D real and nonnegative.  The compressed circuit is the
inverse gate sequence; its distance to U equals ||D - I||_hs exactly.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .geometry import BRICKWALL_1D, GeometrySpec
from .numerics import hs_norm, unitarity_defect
from .sampler import CircuitSample

__all__ = [
    "CompressError",
    "Gate",
    "GateCount",
    "CompressionResult",
    "reck_decompose",
    "banded_compress",
    "reconstruct",
    "effective_bandwidth",
    "gate_count_naive",
    "gate_list_to_json",
    "gate_list_from_json",
]

SKIP_TOL = 1e-15
_UNITARY_TOL = 1e-8


class CompressError(ValueError):
    """Invalid input to a decomposition routine."""


@dataclass(frozen=True)
class Gate:
    """A nearest-neighbor two-mode gate or a single-mode phase gate.

    modes are 1-based; two-mode gates occupy (i, i+1).  block is a 2x2
    complex unitary for two-mode gates, a unit-modulus complex scalar for
    phase gates.
    """

    kind: str
    modes: tuple
    block: object

    def __post_init__(self):
        if self.kind == "two-mode":
            if len(self.modes) != 2 or self.modes[1] != self.modes[0] + 1:
                raise CompressError(
                    f"two-mode gates must act on adjacent modes, got {self.modes}")
            blk = np.asarray(self.block, dtype=np.complex128)
            if blk.shape != (2, 2):
                raise CompressError(f"two-mode block must be 2x2, got {blk.shape}")
            if np.linalg.norm(blk.conj().T @ blk - np.eye(2)) > 1e-12:
                raise CompressError("two-mode block is not unitary within 1e-12")
            object.__setattr__(self, "block", blk)
        elif self.kind == "phase":
            if len(self.modes) != 1:
                raise CompressError(f"phase gates act on one mode, got {self.modes}")
            val = complex(self.block)
            if abs(abs(val) - 1.0) > 1e-12:
                raise CompressError("phase value is not unit modulus within 1e-12")
            object.__setattr__(self, "block", val)
        else:
            raise CompressError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))


@dataclass(frozen=True)
class GateCount:
    two_mode: int
    phase: int


@dataclass(frozen=True)
class CompressionResult:
    """Gate list for the compressed circuit and its error certificates."""

    gates: tuple
    band: int
    hs_error: float
    gate_count: int
    phase_count: int
    diag_profile: np.ndarray   # |D_jj|^2, j = 1..n
    left_mass: np.ndarray      # post-sweep below-diagonal l2 mass per row
    eps_hat: float             # max_r out-of-band below-diagonal input mass

    def close_diag_ok(self, slack: float = 1e-7) -> bool:
        """Check |D_{n-j,n-j}|^2 >= 1 - (j+1) eps_hat^2 for all j."""
        n = self.diag_profile.shape[0]
        j = np.arange(n)[::-1]
        return bool(np.all(
            self.diag_profile >= 1.0 - (j + 1) * self.eps_hat**2 - slack))


def _input_matrix(u) -> np.ndarray:
    if isinstance(u, CircuitSample):
        u = u.u
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise CompressError(f"expected a square matrix, got shape {u.shape}")
    return u


def _sweep(u: np.ndarray, w: int, skip_tol: float):
    a = u.copy()
    n = a.shape[0]
    cap = n * w - w * (w + 1) // 2
    gate_m = np.empty(cap, dtype=np.int64)
    gate_block = np.empty((cap, 2, 2), dtype=np.complex128)
    count = int(kernels.zeroing_sweep(a, w, skip_tol, gate_m, gate_block))
    return a, gate_m[:count], gate_block[:count]


def _assemble(u: np.ndarray, w: int, skip_tol: float) -> CompressionResult:
    n = u.shape[0]
    rows, cols = np.tril_indices(n, -1)
    out_of_band = rows - cols > w
    mass_sq = np.zeros(n)
    np.add.at(mass_sq, rows[out_of_band],
              np.abs(u[rows[out_of_band], cols[out_of_band]])**2)
    eps_hat = float(np.sqrt(mass_sq.max())) if n > 1 else 0.0

    d, gate_m, gate_block = _sweep(u, w, skip_tol)
    diag = np.diag(d).copy()
    absd = np.abs(diag)
    unit = np.where(absd > 0.0, diag / np.maximum(absd, 1e-300), 1.0)
    d = d * np.conj(unit)[None, :]

    gates = [Gate("two-mode", (int(m) + 1, int(m) + 2), blk.conj().T)
             for m, blk in zip(gate_m, gate_block)]
    gates.extend(Gate("phase", (j + 1,), complex(unit[j])) for j in range(n))

    left = np.tril(d, -1)
    left_mass = np.sqrt(np.sum(np.abs(left)**2, axis=1))
    return CompressionResult(
        gates=tuple(gates),
        band=w,
        hs_error=hs_norm(d - np.eye(n)),
        gate_count=len(gate_m),
        phase_count=n,
        diag_profile=np.abs(np.diag(d))**2,
        left_mass=left_mass,
        eps_hat=eps_hat,
    )


def reck_decompose(u) -> tuple:
    """Exact decomposition into n(n-1)/2 nearest-neighbor two-mode gates
    plus n final phases; reconstruct(gates, n) reproduces u."""
    u = _input_matrix(u)
    defect = unitarity_defect(u)
    if defect > _UNITARY_TOL:
        raise CompressError(
            f"input is not unitary within {_UNITARY_TOL:.1e} (defect {defect:.3e})")
    result = _assemble(u, u.shape[0] - 1, skip_tol=-1.0)
    return result.gates


def banded_compress(u, w: int) -> CompressionResult:
    """Zeroing sweep restricted to the in-band lower triangle.

    Returns the gate list of the compressed unitary, the exact error
    ||U - U_compressed||_hs = ||D - I||_hs, the gate count (rotations whose
    target entry is already below 1e-15 in modulus are skipped and not
    counted), and the diagonal-defect profile of D.
    """
    u = _input_matrix(u)
    n = u.shape[0]
    if not 1 <= w <= n - 1:
        raise CompressError(f"band width must be in 1..{n - 1}, got {w}")
    defect = unitarity_defect(u)
    if defect > _UNITARY_TOL:
        raise CompressError(
            f"input is not unitary within {_UNITARY_TOL:.1e} (defect {defect:.3e})")
    return _assemble(u, w, skip_tol=SKIP_TOL)


def reconstruct(gates, n: int) -> np.ndarray:
    """Ordered product of the gate matrices embedded in the n x n identity;
    the first gate in the list is applied first."""
    u = np.eye(n, dtype=np.complex128)
    for gate in gates:
        if any(not 1 <= m <= n for m in gate.modes):
            raise CompressError(f"gate modes {gate.modes} out of range 1..{n}")
        if gate.kind == "two-mode":
            a, b = gate.modes[0] - 1, gate.modes[1] - 1
            blk = gate.block
            ra = u[a, :].copy()
            rb = u[b, :]
            u[a, :] = blk[0, 0] * ra + blk[0, 1] * rb
            u[b, :] = blk[1, 0] * ra + blk[1, 1] * rb
        else:
            u[gate.modes[0] - 1, :] *= gate.block
    return u


def effective_bandwidth(depth: int, kappa: float, c_band: float, n=None) -> int:
    """w = ceil(c_band sqrt(d log d)), optionally capped at n-1.

    kappa records which tail exponent the c_band constant was tuned for; it
    does not enter the formula (only the proportionality constant is free).
    """
    if depth < 2:
        raise CompressError(f"depth must be >= 2, got {depth}")
    if kappa < 1:
        raise CompressError(f"kappa must be >= 1, got {kappa}")
    w = math.ceil(c_band * math.sqrt(depth * math.log(depth)))
    w = max(w, 1)
    if n is not None:
        w = min(w, n - 1)
    return int(w)


def gate_count_naive(geometry: GeometrySpec, depth: int) -> GateCount:
    """Gate count of the sampled brickwall circuit itself: d(n-1) two-mode
    gates (n/2 per L-layer, n/2 - 1 per R-layer) and 2d phase gates."""
    if geometry.label != BRICKWALL_1D:
        raise CompressError(
            f"naive gate count is defined for {BRICKWALL_1D}, got {geometry.label!r}")
    return GateCount(two_mode=depth * (geometry.n - 1), phase=2 * depth)


def gate_list_to_json(gates) -> list:
    """JSON form: {kind, modes, block}; two-mode blocks are row-major lists
    of four [re, im] pairs, phases a single [re, im]."""
    out = []
    for g in gates:
        if g.kind == "two-mode":
            block = [[float(v.real), float(v.imag)] for v in g.block.ravel()]
        else:
            block = [float(g.block.real), float(g.block.imag)]
        out.append({"kind": g.kind, "modes": list(g.modes), "block": block})
    return out


def gate_list_from_json(obj) -> tuple:
    gates = []
    for item in obj:
        kind = item["kind"]
        modes = tuple(item["modes"])
        if kind == "two-mode":
            flat = [complex(re, im) for re, im in item["block"]]
            gates.append(Gate(kind, modes, np.asarray(flat).reshape(2, 2)))
        else:
            re, im = item["block"]
            gates.append(Gate(kind, modes, complex(re, im)))
    return tuple(gates)
