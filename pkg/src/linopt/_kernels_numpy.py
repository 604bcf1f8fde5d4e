"""Pure-numpy implementations of the hot kernels.

Reference semantics for the numba versions in ``_kernels_numba``; every
arithmetic expression mirrors the numba loop body operation-for-operation so
the two backends produce bit-identical output (no hypot/abs calls whose
libm rounding could differ between the two).
"""

import numpy as np


def apply_steps(u, blocks, phases, pair_a, pair_b, pair_off, single_idx, single_off):
    """Apply circuit steps in place to a batch of matrices.

    u:       (B, n, n) complex128, each row b is multiplied from the left by
             the step unitaries encoded in blocks/phases, first step first.
    blocks:  (B, S, P, 2, 2) per-trial 2x2 unitaries, pairs ordered layer by
             layer within a step (pair_off gives the layer boundaries).
    phases:  (B, S, Q) unit-modulus scalars for the singleton modes.
    pair_a, pair_b: (P,) 0-based row indices of each 2-mode coupling.
    single_idx:     (Q,) 0-based row indices of the phase-only modes.
    pair_off, single_off: (M+1,) layer offsets into the pair/single arrays.
    """
    n_steps = blocks.shape[1]
    n_layers = pair_off.shape[0] - 1
    for s in range(n_steps):
        for j in range(n_layers):
            lo, hi = pair_off[j], pair_off[j + 1]
            if hi > lo:
                ra = pair_a[lo:hi]
                rb = pair_b[lo:hi]
                blk = blocks[:, s, lo:hi]
                xa = u[:, ra, :]
                xb = u[:, rb, :]
                u[:, ra, :] = blk[:, :, 0, 0, None] * xa + blk[:, :, 0, 1, None] * xb
                u[:, rb, :] = blk[:, :, 1, 0, None] * xa + blk[:, :, 1, 1, None] * xb
            slo, shi = single_off[j], single_off[j + 1]
            if shi > slo:
                u[:, single_idx[slo:shi], :] *= phases[:, s, slo:shi, None]


def zeroing_sweep(a, w, skip_tol, gate_m, gate_block):
    """Givens zeroing sweep over the in-band lower triangle of ``a``.

    Zeroes entries (r, m) with 1 <= r-m <= w, bottom row first, left-most
    in-band entry first, each rotation mixing columns m and m+1.  ``a`` is
    overwritten with the resulting near-diagonal matrix.  Rotations whose
    target entry already has modulus < skip_tol are skipped; pass a negative
    skip_tol to emit a gate for every position.

    gate_m:     (K,) int64 output, column index m of each emitted rotation.
    gate_block: (K, 2, 2) complex128 output, the rotation applied.
    Returns the number of gates emitted.
    """
    n = a.shape[0]
    skip_sq = skip_tol * skip_tol
    count = 0
    for r in range(n - 1, 0, -1):
        for m in range(max(0, r - w), r):
            x = a[r, m]
            xsq = x.real * x.real + x.imag * x.imag
            if skip_tol >= 0.0 and xsq < skip_sq:
                continue
            y = a[r, m + 1]
            ysq = y.real * y.real + y.imag * y.imag
            rho = np.sqrt(xsq + ysq)
            if rho == 0.0:
                t00 = 1.0 + 0.0j
                t10 = 0.0 + 0.0j
                t01 = 0.0 + 0.0j
                t11 = 1.0 + 0.0j
            else:
                t00 = y / rho
                t10 = -(x / rho)
                t01 = np.conj(x) / rho
                t11 = np.conj(y) / rho
            cm = a[:, m]
            cn = a[:, m + 1]
            new_m = cm * t00 + cn * t10
            new_n = cm * t01 + cn * t11
            a[:, m] = new_m
            a[:, m + 1] = new_n
            gate_m[count] = m
            gate_block[count, 0, 0] = t00
            gate_block[count, 0, 1] = t01
            gate_block[count, 1, 0] = t10
            gate_block[count, 1, 1] = t11
            count += 1
    return count
