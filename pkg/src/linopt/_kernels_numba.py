"""Numba @njit implementations of the hot kernels.

Loop bodies mirror ``_kernels_numpy`` operation-for-operation; see that
module for the argument contracts.
"""

import numpy as np
from numba import njit, prange


@njit(cache=True, parallel=True, nogil=True)
def apply_steps(u, blocks, phases, pair_a, pair_b, pair_off, single_idx, single_off):
    n_batch = u.shape[0]
    n = u.shape[2]
    n_steps = blocks.shape[1]
    n_layers = pair_off.shape[0] - 1
    for b in prange(n_batch):
        for s in range(n_steps):
            for j in range(n_layers):
                for t in range(pair_off[j], pair_off[j + 1]):
                    ra = pair_a[t]
                    rb = pair_b[t]
                    b00 = blocks[b, s, t, 0, 0]
                    b01 = blocks[b, s, t, 0, 1]
                    b10 = blocks[b, s, t, 1, 0]
                    b11 = blocks[b, s, t, 1, 1]
                    for c in range(n):
                        xa = u[b, ra, c]
                        xb = u[b, rb, c]
                        u[b, ra, c] = b00 * xa + b01 * xb
                        u[b, rb, c] = b10 * xa + b11 * xb
                for t in range(single_off[j], single_off[j + 1]):
                    row = single_idx[t]
                    ph = phases[b, s, t]
                    for c in range(n):
                        u[b, row, c] = ph * u[b, row, c]


@njit(cache=True, nogil=True)
def zeroing_sweep(a, w, skip_tol, gate_m, gate_block):
    n = a.shape[0]
    skip_sq = skip_tol * skip_tol
    count = 0
    for r in range(n - 1, 0, -1):
        lo = r - w
        if lo < 0:
            lo = 0
        for m in range(lo, r):
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
            for i in range(n):
                cm = a[i, m]
                cn = a[i, m + 1]
                a[i, m] = cm * t00 + cn * t10
                a[i, m + 1] = cm * t01 + cn * t11
            gate_m[count] = m
            gate_block[count, 0, 0] = t00
            gate_block[count, 0, 1] = t01
            gate_block[count, 1, 0] = t10
            gate_block[count, 1, 1] = t11
            count += 1
    return count
