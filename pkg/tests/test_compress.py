import math

import numpy as np
import pytest

from linopt.compress import (CompressError, Gate, banded_compress,
                             effective_bandwidth, gate_count_naive,
                             gate_list_from_json, gate_list_to_json,
                             reck_decompose, reconstruct)
from linopt.geometry import brickwall_geometry, lightcone_band
from linopt.numerics import hs_norm, unitarity_defect
from linopt.sampler import RngStream, haar_unitary, sample_circuit


class TestReck:
    def test_gate_counts_and_round_trip(self):
        for n in (2, 4, 8):
            u = haar_unitary(n, RngStream(80, n))
            gates = reck_decompose(u)
            two = [g for g in gates if g.kind == "two-mode"]
            phases = [g for g in gates if g.kind == "phase"]
            assert len(two) == n * (n - 1) // 2
            assert len(phases) == n
            assert hs_norm(reconstruct(gates, n) - u) <= 1e-7 * n

    def test_identity_input(self):
        gates = reck_decompose(np.eye(4, dtype=complex))
        assert hs_norm(reconstruct(gates, 4) - np.eye(4)) <= 1e-12
        assert sum(g.kind == "two-mode" for g in gates) == 6

    def test_rejects_non_unitary(self):
        with pytest.raises(CompressError):
            reck_decompose(np.eye(3) * 1.1)

    def test_gates_on_adjacent_modes(self):
        gates = reck_decompose(haar_unitary(5, RngStream(81)))
        for g in gates:
            if g.kind == "two-mode":
                assert g.modes[1] == g.modes[0] + 1


class TestReconstruct:
    def test_empty_identity(self):
        assert np.array_equal(reconstruct([], 3), np.eye(3))

    def test_single_phase_gate_diagonal(self):
        u = reconstruct([Gate("phase", (3,), complex(math.cos(1.0), math.sin(1.0)))], 4)
        expected = np.diag([1.0, 1.0, complex(math.cos(1.0), math.sin(1.0)), 1.0])
        assert np.allclose(u, expected, atol=1e-15)

    def test_mode_out_of_range(self):
        with pytest.raises(CompressError):
            reconstruct([Gate("phase", (5,), 1.0 + 0j)], 4)


class TestBandedCompress:
    def test_full_band_is_exact(self):
        u = haar_unitary(6, RngStream(82))
        res = banded_compress(u, 5)
        assert res.hs_error <= 1e-7 * 6
        assert res.gate_count <= 6 * 5 - 15

    def test_banded_input_exact(self):
        # a shallow brickwall unitary has exact zeros outside band 2d; a
        # sweep with w = 2d must reproduce it to roundoff
        geom = brickwall_geometry(12)
        cs = sample_circuit(geom, 2, RngStream(83))
        w = lightcone_band(geom, 2)
        res = banded_compress(cs.u, w)
        assert res.hs_error <= 1e-7 * 12
        assert res.eps_hat <= 1e-13

    def test_error_equals_reconstruction_distance(self):
        # ||U - U_tilde||_hs = ||D - I||_hs by unitary invariance
        cs = sample_circuit(brickwall_geometry(16), 16, RngStream(84))
        res = banded_compress(cs.u, 6)
        rec = reconstruct(res.gates, 16)
        assert unitarity_defect(rec) <= 1e-8
        assert hs_norm(rec - cs.u) == pytest.approx(res.hs_error, abs=1e-10)

    def test_left_mass_bounded_by_eps_hat(self):
        cs = sample_circuit(brickwall_geometry(16), 16, RngStream(85))
        res = banded_compress(cs.u, 5)
        assert res.left_mass.max() <= res.eps_hat + 1e-10

    def test_close_diag_profile(self):
        cs = sample_circuit(brickwall_geometry(16), 16, RngStream(86))
        res = banded_compress(cs.u, 8)
        assert res.close_diag_ok()

    def test_gate_count_cap(self):
        n = 12
        u = haar_unitary(n, RngStream(87))
        for w in (1, 3, 11):
            res = banded_compress(u, w)
            assert res.gate_count <= n * w - w * (w + 1) // 2
            assert res.band == w

    def test_identity_input_skips_all_gates(self):
        res = banded_compress(np.eye(8, dtype=complex), 4)
        assert res.gate_count == 0
        assert res.hs_error <= 1e-12

    def test_band_validation(self):
        u = haar_unitary(4, RngStream(88))
        with pytest.raises(CompressError):
            banded_compress(u, 0)
        with pytest.raises(CompressError):
            banded_compress(u, 4)


class TestEffectiveBandwidth:
    def test_reference_value(self):
        assert effective_bandwidth(100, 2.0, 2.0) == 43

    def test_small_depth(self):
        assert effective_bandwidth(2, 1.0, 1.0) >= 1

    def test_cap(self):
        assert effective_bandwidth(100, 2.0, 10.0, n=16) == 15

    def test_rejects_bad_args(self):
        with pytest.raises(CompressError):
            effective_bandwidth(1, 2.0, 2.0)
        with pytest.raises(CompressError):
            effective_bandwidth(10, 0.5, 2.0)


class TestNaiveGateCount:
    def test_cases(self):
        assert gate_count_naive(brickwall_geometry(8), 1).two_mode == 7
        assert gate_count_naive(brickwall_geometry(2), 3).two_mode == 3
        assert gate_count_naive(brickwall_geometry(8), 1).phase == 2

    def test_linear_in_depth(self):
        g = brickwall_geometry(10)
        counts = [gate_count_naive(g, d).two_mode for d in (1, 2, 4)]
        assert counts == [9, 18, 36]

    def test_rejects_non_brickwall(self):
        from linopt.geometry import octahedral_geometry
        with pytest.raises(CompressError):
            gate_count_naive(octahedral_geometry(), 3)


class TestGateJson:
    def test_round_trip(self):
        cs = sample_circuit(brickwall_geometry(6), 4, RngStream(89))
        res = banded_compress(cs.u, 3)
        back = gate_list_from_json(gate_list_to_json(res.gates))
        assert len(back) == len(res.gates)
        rec1 = reconstruct(res.gates, 6)
        rec2 = reconstruct(back, 6)
        assert np.array_equal(rec1, rec2)

    def test_gate_validation(self):
        with pytest.raises(CompressError):
            Gate("two-mode", (1, 3), np.eye(2))
        with pytest.raises(CompressError):
            Gate("two-mode", (1, 2), np.eye(2) * 2.0)
        with pytest.raises(CompressError):
            Gate("phase", (1,), 2.0 + 0j)
        with pytest.raises(CompressError):
            Gate("banana", (1,), 1.0 + 0j)
