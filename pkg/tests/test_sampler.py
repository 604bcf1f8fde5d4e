import io
import math

import numpy as np
import pytest

from linopt.geometry import Pairing, brickwall_geometry, octahedral_geometry
from linopt.numerics import unitarity_defect
from linopt.sampler import (CircuitError, CircuitSample, RngStream,
                            circuit_snapshots, haar_phase, haar_phase_batch,
                            haar_u2, haar_u2_batch, haar_unitary,
                            matrix_from_json, matrix_to_json,
                            read_matrix_binary, sample_circuit,
                            sample_circuit_batch, sample_layer,
                            write_matrix_binary)

N_MOMENT = 10**6


def _zscore(samples, target):
    return (samples.mean() - target) / (samples.std(ddof=1) / math.sqrt(samples.size))


class TestHaarU2Moments:
    # statistical contracts at 3 standard errors; Haar values for U(2):
    # E|u11|^2 = 1/2, E|u11|^4 = 2/(2*3) = 1/3, phase averages vanish
    blocks = haar_u2_batch(RngStream(20240, 1), N_MOMENT)

    def test_second_moment(self):
        m = np.abs(self.blocks[:, 0, 0]) ** 2
        assert abs(_zscore(m, 0.5)) <= 3.0

    def test_fourth_moment(self):
        m = np.abs(self.blocks[:, 0, 0]) ** 4
        assert abs(_zscore(m, 1.0 / 3.0)) <= 3.0

    def test_phase_average(self):
        cross = self.blocks[:, 0, 0] * np.conj(self.blocks[:, 1, 1])
        assert abs(_zscore(cross.real, 0.0)) <= 3.0
        assert abs(_zscore(cross.imag, 0.0)) <= 3.0

    def test_unitary_and_batch_consistency(self):
        u = haar_u2(RngStream(20240, 1))
        assert np.array_equal(u, self.blocks[0])
        assert unitarity_defect(u) <= 1e-14


class TestHaarPhase:
    def test_unit_modulus(self):
        vals = haar_phase_batch(RngStream(1, 5), 1000)
        assert np.abs(np.abs(vals) - 1.0).max() <= 1e-15
        assert haar_phase(RngStream(1, 5)) == complex(vals[0])

    def test_circular_symmetry(self):
        vals = haar_phase_batch(RngStream(2, 6), N_MOMENT)
        assert abs(_zscore(vals.real, 0.0)) <= 3.0
        assert abs(_zscore(vals.imag, 0.0)) <= 3.0
        sq = vals**2
        assert abs(_zscore(sq.real, 0.0)) <= 3.0
        assert abs(_zscore(sq.imag, 0.0)) <= 3.0


class TestSampleLayer:
    def test_all_singletons_diagonal(self):
        p = Pairing(3, ((1,), (2,), (3,)))
        u = sample_layer(p, RngStream(3, 0))
        assert np.count_nonzero(u - np.diag(np.diag(u))) == 0
        assert unitarity_defect(u) <= 1e-14

    def test_single_pair_is_haar_block(self):
        p = Pairing(2, ((1, 2),))
        u = sample_layer(p, RngStream(3, 1))
        assert unitarity_defect(u) <= 1e-14

    def test_left_layer_block_structure(self):
        p = brickwall_geometry(4).layers[0]
        u = sample_layer(p, RngStream(3, 2))
        for x, y in ((0, 2), (0, 3), (1, 2), (1, 3), (2, 0), (3, 1)):
            assert u[x, y] == 0.0
        assert unitarity_defect(u) <= 1e-14


class TestSampleCircuit:
    def test_depth_zero_identity(self):
        cs = sample_circuit(brickwall_geometry(4), 0, RngStream(9))
        assert np.array_equal(cs.u, np.eye(4))
        assert cs.defect == 0.0

    def test_band_zero(self):
        cs = sample_circuit(brickwall_geometry(8), 3, RngStream(10))
        assert cs.u[0, 7] == 0.0  # |1-8| = 7 > 6 = 2d

    def test_determinism(self):
        a = sample_circuit(brickwall_geometry(6), 5, RngStream(11, 2)).u
        b = sample_circuit(brickwall_geometry(6), 5, RngStream(11, 2)).u
        assert np.array_equal(a, b)

    def test_batch_matches_single(self):
        geom = octahedral_geometry()
        streams = [RngStream(12, i) for i in range(4)]
        batch = sample_circuit_batch(geom, 7, streams)
        for i, s in enumerate(streams):
            assert np.array_equal(batch[i], sample_circuit(geom, 7, s).u)

    def test_snapshot_chunking_is_invisible(self):
        # the final state of a snapshotted run equals the direct build
        # bit-for-bit: chunk boundaries must not change the draws
        geom = brickwall_geometry(6)
        stream = RngStream(13, 0)
        direct = sample_circuit_batch(geom, 5, [stream])
        for depth, u in circuit_snapshots(geom, [2, 5], [stream]):
            last = (depth, u.copy())
        assert last[0] == 5
        assert np.array_equal(last[1], direct)

    def test_deep_product_drift_budget(self):
        cs = sample_circuit(brickwall_geometry(64), 1000, RngStream(14))
        assert cs.defect <= 1e-9

    def test_defect_certificate_rejects_bad(self):
        with pytest.raises(CircuitError):
            CircuitSample(u=np.eye(2) * 1.5, geometry=brickwall_geometry(2),
                          depth=1, seed=RngStream(0), defect=1.0)

    def test_composition_in_distribution(self):
        # depth d1+d2 vs product of independent depth-d2 and depth-d1
        # samples: second moments of entries must match (both equal the
        # walk kernel power)
        geom = brickwall_geometry(4)
        d1, d2, trials = 2, 3, 4000
        joint = sample_circuit_batch(geom, d1 + d2, [RngStream(15, i) for i in range(trials)])
        a = sample_circuit_batch(geom, d1, [RngStream(16, i) for i in range(trials)])
        b = sample_circuit_batch(geom, d2, [RngStream(17, i) for i in range(trials)])
        prod = b @ a
        m1 = np.abs(joint) ** 2
        m2 = np.abs(prod) ** 2
        se = np.sqrt(m1.var(axis=0, ddof=1) / trials + m2.var(axis=0, ddof=1) / trials)
        z = np.where(se > 0, (m1.mean(axis=0) - m2.mean(axis=0)) / np.where(se > 0, se, 1), 0.0)
        assert np.abs(z).max() <= 5.0

    def test_steps_independent(self):
        # entries of step 1 and step 2 within one circuit are uncorrelated;
        # recover step 2 of each trial as snap2 snap1^dagger
        geom = brickwall_geometry(4)
        trials = 4000
        streams = [RngStream(18, i) for i in range(trials)]
        snap1 = None
        for depth, u in circuit_snapshots(geom, [1, 2], streams):
            if depth == 1:
                snap1 = u.copy()
            else:
                snap2 = u.copy()
        step2 = snap2 @ np.conj(np.transpose(snap1, (0, 2, 1)))
        a = snap1[:, 0, 0].real
        b = step2[:, 0, 0].real
        corr = np.corrcoef(a, b)[0, 1]
        assert abs(corr) <= 3.0 / math.sqrt(trials)


class TestHaarUnitary:
    def test_defect(self):
        for n in (1, 3, 8):
            assert unitarity_defect(haar_unitary(n, RngStream(21, n))) <= 1e-12

    def test_second_moment(self):
        trials = 10**5
        vals = np.empty(trials)
        # one stream, many draws: batch the Ginibre sampling by hand
        gen = RngStream(22, 0).generator()
        for t in range(trials // 1000):
            g = gen.standard_normal((1000, 8, 8, 2))
            z = g[..., 0] + 1j * g[..., 1]
            q, r = np.linalg.qr(z)
            d = np.diagonal(r, axis1=1, axis2=2)
            q = q * (d / np.abs(d))[:, None, :]
            vals[t * 1000:(t + 1) * 1000] = np.abs(q[:, 0, 0]) ** 2
        assert abs(_zscore(vals, 1.0 / 8.0)) <= 3.0


class TestSerialization:
    def test_json_round_trip(self):
        u = haar_unitary(4, RngStream(23))
        assert np.array_equal(matrix_from_json(matrix_to_json(u)), u)

    def test_binary_round_trip(self):
        u = haar_unitary(5, RngStream(24))
        buf = io.BytesIO()
        write_matrix_binary(u, buf)
        buf.seek(0)
        assert np.array_equal(read_matrix_binary(buf), u)

    def test_binary_layout(self):
        u = np.array([[1.0 + 2.0j]])
        buf = io.BytesIO()
        write_matrix_binary(u, buf)
        raw = buf.getvalue()
        assert raw[:8] == b"LINOPTM1"
        assert np.frombuffer(raw[8:24], dtype="<u8").tolist() == [1, 1]
        assert np.frombuffer(raw[24:], dtype="<f8").tolist() == [1.0, 2.0]

    def test_binary_rejects_bad_magic(self):
        with pytest.raises(ValueError):
            read_matrix_binary(io.BytesIO(b"WRONG!!!" + b"\0" * 32))
