"""Seeded sampling of Haar blocks, layer unitaries, circuits, and Haar
baselines.

Reproducibility contract
------------------------
A trial is identified by an RngStream (seed, stream_id); its generator is
``PCG64(SeedSequence(entropy=seed, spawn_key=(stream_id,)))``.  Experiments
assign stream_id = trial index, so trials can run on any number of workers
with bit-reproducible results.

Within one circuit build the stream is consumed in a fixed order:

1. one uniform draw of shape (depth, Q) for all phase-shifter angles
   (Q = singletons per step, layer-major within a step), then
2. standard-normal draws of shape (*, P, 2, 2, 2) for the 2x2 blocks
   (P = pairs per step), step-major, layers in order within a step, the
   trailing axes being (row, col, re/im).

Normals are consumed in step order, so applying steps in chunks of any size
gives the same circuit.  Haar 2x2 blocks come from a closed-form
Gram-Schmidt of the Gaussian 2x2 (the R factor has positive diagonal, which
makes Q exactly Haar); the distribution is verified by the moment test
suite rather than asserted by construction.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .geometry import GeometrySpec
from .numerics import unitarity_defect

__all__ = [
    "RngStream",
    "CircuitSample",
    "CircuitError",
    "haar_u2",
    "haar_phase",
    "sample_layer",
    "sample_circuit",
    "sample_circuit_batch",
    "circuit_snapshots",
    "haar_unitary",
    "matrix_to_json",
    "matrix_from_json",
    "write_matrix_binary",
    "read_matrix_binary",
]

DEFECT_LIMIT = 1e-8
_STEP_CHUNK = 512
MAGIC = b"LINOPTM1"


class CircuitError(RuntimeError):
    """Numerical failure while building a circuit (unitarity drift)."""


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream: (seed, stream_id) -> PCG64 generator."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id)


@dataclass(frozen=True)
class CircuitSample:
    """A sampled n x n circuit unitary with its provenance."""

    u: np.ndarray
    geometry: GeometrySpec
    depth: int
    seed: RngStream
    defect: float

    def __post_init__(self):
        if self.defect > DEFECT_LIMIT:
            raise CircuitError(
                f"unitarity defect {self.defect:.3e} exceeds {DEFECT_LIMIT:.1e} "
                f"(n={self.geometry.n}, depth={self.depth})")


def _gram_schmidt_u2(normals: np.ndarray) -> np.ndarray:
    """Map (..., 2, 2, 2) standard normals to (..., 2, 2) Haar U(2) blocks."""
    g = normals[..., 0] + 1j * normals[..., 1]
    c1 = g[..., :, 0]
    c2 = g[..., :, 1]
    r11 = np.sqrt(np.sum(c1.real**2 + c1.imag**2, axis=-1))
    q1 = c1 / r11[..., None]
    proj = np.sum(np.conj(q1) * c2, axis=-1)
    c2p = c2 - proj[..., None] * q1
    r22 = np.sqrt(np.sum(c2p.real**2 + c2p.imag**2, axis=-1))
    q2 = c2p / r22[..., None]
    return np.stack([q1, q2], axis=-1)


def haar_u2(rng: RngStream) -> np.ndarray:
    """One Haar-random 2x2 unitary."""
    gen = rng.generator()
    return _gram_schmidt_u2(gen.standard_normal((2, 2, 2)))


def haar_u2_batch(rng: RngStream, count: int) -> np.ndarray:
    """(count, 2, 2) Haar blocks drawn sequentially from one stream; the
    first block equals haar_u2(rng) bit-for-bit."""
    gen = rng.generator()
    return _gram_schmidt_u2(gen.standard_normal((count, 2, 2, 2)))


def haar_phase(rng: RngStream) -> complex:
    """One scalar uniformly distributed on the unit circle."""
    gen = rng.generator()
    return complex(np.exp(2j * np.pi * gen.random()))


def haar_phase_batch(rng: RngStream, count: int) -> np.ndarray:
    """(count,) unit-circle scalars drawn sequentially from one stream."""
    gen = rng.generator()
    return np.exp(2j * np.pi * gen.random(count))


def sample_layer(pairing, rng: RngStream) -> np.ndarray:
    """One sampled layer unitary: independent Haar 2x2 on every pair,
    independent Haar phase on every singleton, exact zeros elsewhere."""
    gen = rng.generator()
    n = pairing.n
    singles = pairing.single_rows
    ra, rb = pairing.pair_rows
    phases = np.exp(2j * np.pi * gen.random(singles.shape[0]))
    blocks = _gram_schmidt_u2(gen.standard_normal((ra.shape[0], 2, 2, 2)))
    u = np.zeros((n, n), dtype=np.complex128)
    u[singles, singles] = phases
    u[ra, ra] = blocks[:, 0, 0]
    u[ra, rb] = blocks[:, 0, 1]
    u[rb, ra] = blocks[:, 1, 0]
    u[rb, rb] = blocks[:, 1, 1]
    return u


def _identity_batch(n: int, trials: int) -> np.ndarray:
    u = np.zeros((trials, n, n), dtype=np.complex128)
    u[:, np.arange(n), np.arange(n)] = 1.0
    return u


def circuit_snapshots(geometry: GeometrySpec, depths, streams, step_chunk: int = _STEP_CHUNK):
    """Build one circuit per stream, yielding (depth, u_batch) at each depth.

    ``depths`` must be strictly increasing non-negative ints; each yielded
    u_batch has shape (len(streams), n, n) and is a live buffer, valid until
    the next iteration (copy it to keep it).  The circuits grow with depth:
    a later snapshot extends the earlier one with further steps of the same
    realization, exactly like watching one run of the circuit deepen.
    """
    depths = [int(d) for d in depths]
    if any(d < 0 for d in depths) or any(b <= a for a, b in zip(depths, depths[1:])):
        raise ValueError(f"depths must be strictly increasing and >= 0: {depths}")
    n = geometry.n
    pair_a, pair_b, pair_off, single_idx, single_off = geometry.plan
    n_pairs = geometry.pairs_per_step
    n_singles = geometry.singles_per_step
    max_depth = depths[-1] if depths else 0
    gens = [s.generator() for s in streams]
    u = _identity_batch(n, len(streams))

    phases = np.stack([np.exp(2j * np.pi * g.random((max_depth, n_singles))) for g in gens])
    done = 0
    targets = iter(depths)
    target = next(targets, None)
    while target == 0:
        yield 0, u
        target = next(targets, None)
    while target is not None:
        stop = min(done + step_chunk, target)
        span = stop - done
        normals = np.stack(
            [g.standard_normal((span, n_pairs, 2, 2, 2)) for g in gens])
        blocks = _gram_schmidt_u2(normals)
        kernels.apply_steps(u, blocks, phases[:, done:stop], pair_a, pair_b,
                            pair_off, single_idx, single_off)
        done = stop
        while target == done:
            yield done, u
            target = next(targets, None)


def sample_circuit_batch(geometry: GeometrySpec, depth: int, streams) -> np.ndarray:
    """Circuits for many trials at a single depth; shape (trials, n, n)."""
    if depth == 0:
        return _identity_batch(geometry.n, len(streams))
    for _, u in circuit_snapshots(geometry, [depth], streams):
        return u


def sample_circuit(geometry: GeometrySpec, depth: int, rng: RngStream) -> CircuitSample:
    """One seeded circuit of the given depth, with a unitarity certificate."""
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    u = sample_circuit_batch(geometry, depth, [rng])[0]
    return CircuitSample(u=u, geometry=geometry, depth=depth, seed=rng,
                         defect=unitarity_defect(u))


def haar_unitary(n: int, rng: RngStream) -> np.ndarray:
    """Haar-random n x n unitary (Ginibre QR with phase-fixed diagonal)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    gen = rng.generator()
    g = gen.standard_normal((n, n, 2))
    z = g[..., 0] + 1j * g[..., 1]
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


# -- matrix serialization ---------------------------------------------------

def matrix_to_json(u: np.ndarray) -> list:
    """Nested row-major lists of [re, im] pairs."""
    u = np.asarray(u, dtype=np.complex128)
    return [[[float(v.real), float(v.imag)] for v in row] for row in u]


def matrix_from_json(obj) -> np.ndarray:
    arr = np.asarray(obj, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError("expected nested lists of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def write_matrix_binary(u: np.ndarray, fh) -> None:
    """Binary dump: magic 'LINOPTM1', u64 rows, u64 cols, then row-major
    f64 interleaved re/im; all little-endian."""
    u = np.ascontiguousarray(u, dtype=np.complex128)
    fh.write(MAGIC)
    fh.write(np.asarray(u.shape, dtype="<u8").tobytes())
    inter = np.empty(u.shape + (2,), dtype="<f8")
    inter[..., 0] = u.real
    inter[..., 1] = u.imag
    fh.write(inter.tobytes())


def read_matrix_binary(fh) -> np.ndarray:
    magic = fh.read(len(MAGIC))
    if magic != MAGIC:
        raise ValueError(f"bad magic bytes {magic!r}")
    rows, cols = np.frombuffer(fh.read(16), dtype="<u8")
    rows, cols = int(rows), int(cols)
    flat = np.frombuffer(fh.read(rows * cols * 16), dtype="<f8")
    if flat.shape[0] != rows * cols * 2:
        raise ValueError("truncated matrix dump")
    inter = flat.reshape(rows, cols, 2)
    return inter[..., 0] + 1j * inter[..., 1]

