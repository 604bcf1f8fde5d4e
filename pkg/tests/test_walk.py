import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linopt.geometry import (Pairing, brickwall_geometry, custom_geometry,
                             octahedral_geometry)
from linopt.sampler import RngStream
from linopt.walk import (layer_kernel, meeting_tail_curve, meeting_tail_exact,
                         meeting_time, meeting_time_tail, mixing_time,
                         reflect_map, simulate_line_walk, step_kernel,
                         tv_distance, verify_boson_rw, verify_boson_rw_all,
                         verify_reflection, walk_distribution)


def zt_reference_kernel(n: int) -> np.ndarray:
    """Independent case-analysis transcription of the brickwall walk rule:
    from odd y move to {y-1, y, y+1, y+2} (1/4 each, interior targets),
    from even y to {y-2, y-1, y, y+1}; boundary sites 1 and n absorb the
    clipped mass at weight 1/2 from their two nearest sources."""
    p = np.zeros((n, n))
    for y in range(1, n + 1):
        targets = (y - 1, y, y + 1, y + 2) if y % 2 == 1 else (y - 2, y - 1, y, y + 1)
        for x in targets:
            if 2 <= x <= n - 1:
                p[y - 1, x - 1] += 0.25
        if y in (1, 2):
            p[y - 1, 0] += 0.5
        if y in (n - 1, n):
            p[y - 1, n - 1] += 0.5
    return p


class TestKernels:
    def test_layer_kernel_singletons(self):
        assert np.array_equal(layer_kernel(Pairing(3, ((1,), (2,), (3,)))), np.eye(3))

    def test_layer_kernel_pair(self):
        k = layer_kernel(Pairing(2, ((1, 2),)))
        assert np.array_equal(k, np.full((2, 2), 0.5))

    def test_layer_kernel_symmetric_doubly_stochastic(self):
        for layer in octahedral_geometry().layers:
            s = layer_kernel(layer)
            assert np.array_equal(s, s.T)
            assert np.allclose(s.sum(axis=0), 1.0, atol=1e-15)

    def test_step_kernel_matches_reference(self):
        for n in (4, 6, 8):
            k = step_kernel(brickwall_geometry(n))
            assert np.array_equal(k.p, zt_reference_kernel(n))

    def test_step_kernel_rows_n4(self):
        p = step_kernel(brickwall_geometry(4)).p
        assert p[0].tolist() == [0.5, 0.25, 0.25, 0.0]
        assert p[1].tolist() == [0.5, 0.25, 0.25, 0.0]

    def test_all_singleton_geometry_identity(self):
        g = custom_geometry(3, [[(1,), (2,), (3,)]])
        assert np.array_equal(step_kernel(g).p, np.eye(3))

    def test_doubly_stochastic_all_geometries(self):
        import linopt.geometry as geo
        for g in (brickwall_geometry(10), octahedral_geometry(),
                  geo.brickwork_d_geometry(4, 2)):
            p = step_kernel(g).p
            assert np.abs(p.sum(axis=0) - 1.0).max() <= 1e-12
            assert np.abs(p.sum(axis=1) - 1.0).max() <= 1e-12


class TestWalkDistribution:
    def test_depth_zero(self):
        k = step_kernel(brickwall_geometry(4))
        assert np.array_equal(walk_distribution(k, 3, 0), [0, 0, 1, 0])

    def test_depth_one_is_kernel_row(self):
        k = step_kernel(brickwall_geometry(6))
        assert np.array_equal(walk_distribution(k, 2, 1), k.p[1])

    def test_large_depth_uniform(self):
        k = step_kernel(brickwall_geometry(100))
        dist = walk_distribution(k, 1, 20000)
        assert np.abs(dist - 0.01).max() <= 1e-6


class TestBosonRw:
    def test_depth_zero_exact(self):
        rep = verify_boson_rw(brickwall_geometry(4), 0, 2, 2, 100, RngStream(50))
        assert rep.mc == 1.0 and rep.stderr == 0.0 and rep.z == 0.0

    def test_brickwall_small(self):
        rep = verify_boson_rw_all(brickwall_geometry(8), 4, 20000, RngStream(51))
        assert rep.max_abs_z <= 5.0

    def test_octahedral(self):
        rep = verify_boson_rw_all(octahedral_geometry(), 3, 20000, RngStream(52))
        assert rep.max_abs_z <= 5.0


class TestReflection:
    def test_reflect_map_cases(self):
        assert reflect_map(3, 4) == 3
        assert reflect_map(5, 4) == 4
        assert reflect_map(-1, 4) == 2

    @given(st.integers(-200, 200), st.integers(1, 20))
    @settings(max_examples=100, deadline=None)
    def test_reflect_map_properties(self, x, n):
        r = reflect_map(x, n)
        assert 1 <= r <= n
        assert reflect_map(x + 2 * n, n) == r       # period 2n
        assert reflect_map(1 - x, n) == r           # mirror at the left wall
        assert reflect_map(2 * n + 1 - x, n) == r   # mirror at the right wall

    def test_line_walk_steps_bounded(self):
        pos = simulate_line_walk(1, 5, 1000, RngStream(53).generator())
        assert np.abs(pos - 1).max() <= 10

    def test_verify_reflection_depth_zero(self):
        rep = verify_reflection(4, 0, 1000, RngStream(54))
        assert rep.tv_gap == 0.0

    def test_verify_reflection_small(self):
        rep = verify_reflection(4, 6, 10**5, RngStream(55))
        assert rep.passes


class TestTvDistance:
    def test_cases(self):
        assert tv_distance([0.5, 0.5], [0.5, 0.5]) == 0.0
        assert tv_distance([1, 0], [0, 1]) == 1.0
        assert tv_distance([0.5, 0.5], [1.0, 0.0]) == 0.5

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            tv_distance([1.0], [0.5, 0.5])

    def test_rejects_non_distribution(self):
        with pytest.raises(ValueError):
            tv_distance([0.7, 0.7], [0.5, 0.5])

    @given(st.integers(2, 8), st.integers(0, 2**31))
    @settings(max_examples=50, deadline=None)
    def test_symmetry_and_range(self, n, seed):
        gen = np.random.default_rng(seed)
        p = gen.dirichlet(np.ones(n))
        q = gen.dirichlet(np.ones(n))
        d = tv_distance(p, q)
        assert 0.0 <= d <= 1.0
        assert d == tv_distance(q, p)


class TestMixing:
    def test_n2_quarter(self):
        assert mixing_time(brickwall_geometry(2), 0.25, 10) == 1

    def test_identity_never_mixes(self):
        g = custom_geometry(4, [[(1,), (2,), (3,), (4,)]])
        assert mixing_time(g, 0.5, 50) is None

    def test_monotone_in_epsilon(self):
        g = brickwall_geometry(8)
        t_loose = mixing_time(g, 0.1, 1000)
        t_tight = mixing_time(g, 0.01, 1000)
        assert t_loose <= t_tight


class TestMeeting:
    @staticmethod
    def brute_tails(geom, k_layers):
        """Forward absorbing DP per start pair (independent oracle)."""
        n = geom.n
        factors = [layer_kernel(l) for l in geom.layers]
        bids = [l.block_id for l in geom.layers]
        m = len(factors)
        out = np.empty((n, n))
        for x in range(n):
            for y in range(n):
                q = np.zeros((n, n))
                q[x, y] = 1.0
                for kk in range(k_layers):
                    j = kk % m
                    q = factors[j].T @ q @ factors[j]
                    q = q * (bids[j][:, None] != bids[j][None, :])
                out[x, y] = q.sum()
        return out

    def test_exact_matches_brute_force(self):
        for geom in (brickwall_geometry(4), octahedral_geometry()):
            for k in (1, 2, 3, 7):
                exact = meeting_tail_exact(geom, k / geom.n_layers)
                brute = self.brute_tails(geom, k)
                assert np.abs(exact - brute).max() <= 1e-12

    def test_n2_first_layer_meets(self):
        tails = meeting_tail_exact(brickwall_geometry(2), 0.5)
        assert np.abs(tails).max() == 0.0

    def test_curve_monotone_decreasing(self):
        curve = meeting_tail_curve(brickwall_geometry(8), 40)
        maxima = curve.max(axis=(1, 2))
        assert np.all(np.diff(maxima) <= 1e-12)

    def test_meeting_time_n2(self):
        assert meeting_time(brickwall_geometry(2), 0.5, 5) == 0.5

    def test_mc_matches_exact(self):
        geom = brickwall_geometry(4)
        est = meeting_time_tail(geom, 2.0, 20000, RngStream(56))
        exact = meeting_tail_exact(geom, 2.0)
        for (x, y), tail, se in zip(est.starts, est.tails, est.stderr):
            e = exact[x - 1, y - 1]
            if se > 0:
                assert abs(tail - e) <= 5.0 * se
            else:
                assert tail == pytest.approx(e, abs=1e-12)

    def test_mc_monotone_within_noise(self):
        geom = brickwall_geometry(8)
        t1 = meeting_time_tail(geom, 2.0, 4000, RngStream(57))
        t2 = meeting_time_tail(geom, 6.0, 4000, RngStream(57))
        assert t2.max_tail <= t1.max_tail + 0.05


class TestLargeDeviationEnvelope:
    def test_histogram_under_gaussian_envelope(self):
        # empirical brickwall-walk histograms at n=200 fit under
        # C exp(-c (x-y)^2 / d) with stable constants across depths
        n, start, trials = 200, 100, 10**6
        fits = {}
        for d in (25, 100):
            gen = RngStream(58, d).generator()
            pos = simulate_line_walk(start, d, trials, gen)
            r = (pos - 1) % (2 * n) + 1
            reflected = np.where(r <= n, r, 2 * n + 1 - r)
            hist = np.bincount(reflected - 1, minlength=n) / trials
            dx2 = ((np.arange(1, n + 1) - start) ** 2) / d
            fit_bins = hist * trials >= 50
            coeffs = np.polyfit(dx2[fit_bins], np.log(hist[fit_bins]), 1)
            c_fit = -coeffs[0]
            # smallest majorizing C for the fitted decay rate
            log_c = np.max(np.log(hist[hist > 0]) + c_fit * dx2[hist > 0])
            c_major = math.exp(log_c)
            fits[d] = (c_fit, c_major)
            se = np.sqrt(hist * (1 - hist) / trials)
            envelope = c_major * np.exp(-c_fit * dx2)
            assert np.all(hist <= envelope + 3 * se)
            assert 0.0 < c_fit < 2.0 and c_major < 20.0
        c25, c100 = fits[25][0], fits[100][0]
        assert max(c25, c100) / min(c25, c100) <= 1.6
