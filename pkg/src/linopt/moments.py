"""Monte Carlo estimators for second and fourth moments of circuit entries.

All estimators for one (geometry, depth) can share circuit samples: trial t
uses the stream RngStream(rng.seed, rng.stream_id + t), so two estimators
called with the same root rng and trial count consume identical samples.
Batch boundaries are fixed and partial sums are merged in batch order, so
results are byte-identical for any thread count.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._parallel import map_batches
from .gaussian import renyi2_eig
from .geometry import GeometrySpec
from .sampler import RngStream, haar_unitary, sample_circuit_batch

__all__ = [
    "MomentEstimate",
    "second_moment",
    "second_moment_matrix",
    "fourth_moment",
    "fourth_moment_tables",
    "uut_second_moment",
    "uut_abs_mean",
    "uut_alpha_check",
    "haar_reference",
]

_BATCH = 4096


@dataclass(frozen=True)
class MomentEstimate:
    value: float
    stderr: float
    trials: int
    target: str


def _streams(rng: RngStream, start: int, count: int):
    return [RngStream(rng.seed, rng.stream_id + start + i) for i in range(count)]


def _finalize(total: np.ndarray, total_sq: np.ndarray, trials: int):
    mean = total / trials
    if trials < 2:
        return mean, np.zeros_like(mean)
    var = np.maximum(total_sq - trials * mean**2, 0.0) / (trials - 1)
    return mean, np.sqrt(var / trials)


def _accumulate(geometry, depth, trials, rng, batch, threads, per_batch):
    """Sum per_batch(u_batch) tuples over fixed trial batches, in order."""
    def worker(start, count):
        u = sample_circuit_batch(geometry, depth, _streams(rng, start, count))
        return per_batch(u)

    partials = map_batches(trials, batch, threads, worker)
    acc = list(partials[0])
    for p in partials[1:]:
        for a, q in zip(acc, p):
            a += q
    return acc


def second_moment_matrix(geometry: GeometrySpec, depth: int, trials: int,
                         rng: RngStream, batch: int = _BATCH, threads: int = 1):
    """Mean and stderr of |U_{xy}|^2 for all (x, y), from shared samples."""
    def per_batch(u):
        a = u.real**2 + u.imag**2
        return a.sum(axis=0), (a**2).sum(axis=0)

    total, total_sq = _accumulate(geometry, depth, trials, rng, batch, threads, per_batch)
    return _finalize(total, total_sq, trials)


def second_moment(geometry: GeometrySpec, depth: int, x: int, y: int,
                  trials: int, rng: RngStream) -> MomentEstimate:
    """MC estimate of E|U_{xy}|^2 (1-based x, y)."""
    if trials < 2:
        raise ValueError("need at least 2 trials")
    mean, stderr = second_moment_matrix(geometry, depth, trials, rng)
    return MomentEstimate(value=float(mean[x - 1, y - 1]),
                          stderr=float(stderr[x - 1, y - 1]),
                          trials=trials, target=f"E|U[{x},{y}]|^2")


def fourth_moment_tables(geometry: GeometrySpec, depth: int, trials: int,
                         rng: RngStream, batch: int = _BATCH, threads: int = 1):
    """Mean and stderr tables of the fourth moments, from shared samples.

    Returns (row_mean, row_stderr, col_mean, col_stderr), each of shape
    (n, n, n) indexed [alpha-1, x-1, y-1]:
        row -> E[|U_{alpha x}|^2 |U_{alpha y}|^2]
        col -> E[|U_{x alpha}|^2 |U_{y alpha}|^2]
    """
    def per_batch(u):
        a = u.real**2 + u.imag**2
        a2 = a**2
        return (np.einsum("bax,bay->axy", a, a),
                np.einsum("bax,bay->axy", a2, a2),
                np.einsum("bxa,bya->axy", a, a),
                np.einsum("bxa,bya->axy", a2, a2))

    r, r2, c, c2 = _accumulate(geometry, depth, trials, rng, batch, threads, per_batch)
    row_mean, row_stderr = _finalize(r, r2, trials)
    col_mean, col_stderr = _finalize(c, c2, trials)
    return row_mean, row_stderr, col_mean, col_stderr


def fourth_moment(geometry: GeometrySpec, depth: int, alpha: int, x: int, y: int,
                  side: str, trials: int, rng: RngStream) -> MomentEstimate:
    """MC estimate of E[|U_{alpha x}|^2 |U_{alpha y}|^2] (side='rows') or
    E[|U_{x alpha}|^2 |U_{y alpha}|^2] (side='cols')."""
    if trials < 2:
        raise ValueError("need at least 2 trials")
    if side not in ("rows", "cols"):
        raise ValueError(f"side must be 'rows' or 'cols', got {side!r}")
    row_mean, row_stderr, col_mean, col_stderr = fourth_moment_tables(
        geometry, depth, trials, rng)
    i, j, k = alpha - 1, x - 1, y - 1
    if side == "rows":
        value, stderr = row_mean[i, j, k], row_stderr[i, j, k]
        target = f"E|U[{alpha},{x}]|^2|U[{alpha},{y}]|^2"
    else:
        value, stderr = col_mean[i, j, k], col_stderr[i, j, k]
        target = f"E|U[{x},{alpha}]|^2|U[{y},{alpha}]|^2"
    return MomentEstimate(value=float(value), stderr=float(stderr),
                          trials=trials, target=target)


def uut_abs_mean(geometry: GeometrySpec, depth: int, trials: int,
                 rng: RngStream, batch: int = _BATCH, threads: int = 1):
    """Mean |(U U^T)_{xy}| matrix (the effective-band heatmap) and its stderr."""
    def per_batch(u):
        g = u @ np.transpose(u, (0, 2, 1))
        mag = np.sqrt(g.real**2 + g.imag**2)
        return mag.sum(axis=0), (mag**2).sum(axis=0)

    total, total_sq = _accumulate(geometry, depth, trials, rng, batch, threads, per_batch)
    return _finalize(total, total_sq, trials)


def uut_second_moment(geometry: GeometrySpec, depth: int, x: int, y: int,
                      trials: int, rng: RngStream, batch: int = _BATCH,
                      threads: int = 1) -> MomentEstimate:
    """MC estimate of E|<x|U U^T|y>|^2."""
    if trials < 2:
        raise ValueError("need at least 2 trials")

    def per_batch(u):
        g = u @ np.transpose(u, (0, 2, 1))
        sq = g.real**2 + g.imag**2
        return sq.sum(axis=0), (sq**2).sum(axis=0)

    total, total_sq = _accumulate(geometry, depth, trials, rng, batch, threads, per_batch)
    mean, stderr = _finalize(total, total_sq, trials)
    return MomentEstimate(value=float(mean[x - 1, y - 1]),
                          stderr=float(stderr[x - 1, y - 1]),
                          trials=trials, target=f"E|UU^T[{x},{y}]|^2")


def uut_alpha_check(geometry: GeometrySpec, depth: int, trials: int,
                    rng: RngStream, batch: int = _BATCH, threads: int = 1):
    """Per-(x, y) z-scores of sum_alpha |U_{x alpha}|^2 |U_{y alpha}|^2 minus
    |<x|U U^T|y>|^2 on shared samples.

    The identity holds in expectation, so every z should be small; the
    per-sample difference is pure cross-term noise.
    """
    def per_batch(u):
        a = u.real**2 + u.imag**2
        lhs = a @ np.transpose(a, (0, 2, 1))
        g = u @ np.transpose(u, (0, 2, 1))
        diff = lhs - (g.real**2 + g.imag**2)
        return diff.sum(axis=0), (diff**2).sum(axis=0)

    total, total_sq = _accumulate(geometry, depth, trials, rng, batch, threads, per_batch)
    mean, stderr = _finalize(total, total_sq, trials)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(stderr > 0, mean / stderr,
                        np.where(mean == 0.0, 0.0, np.inf))


def haar_reference(n: int, gamma, s: float, trials: int,
                   rng: RngStream) -> MomentEstimate:
    """MC mean of the Renyi-2 entropy over Haar-random n x n unitaries; the
    saturation baseline for entropy sweeps."""
    if trials < 2:
        raise ValueError("need at least 2 trials")
    vals = np.empty(trials)
    for t in range(trials):
        u = haar_unitary(n, RngStream(rng.seed, rng.stream_id + t))
        vals[t] = renyi2_eig(u, gamma, s).value
    stderr = float(vals.std(ddof=1) / math.sqrt(trials))
    return MomentEstimate(value=float(vals.mean()), stderr=stderr,
                          trials=trials, target=f"E S2 Haar(n={n})")
