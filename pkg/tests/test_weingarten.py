import math

import numpy as np
import pytest

from gausswork import sampling as sm
from gausswork import weingarten as wg
from gausswork.errors import BadDimension, InvalidConfig
from gausswork.sampling import RandomStateConfig, SqueezingSpec, ZProfile


def uniform_config(n_full, m_sys, z0, seed, pipeline="purified"):
    return RandomStateConfig(
        n_full=n_full, m_sys=m_sys, profile=ZProfile("uniform", z0=z0),
        master_seed=seed, pipeline=pipeline,
    )


def ambient_spec(config):
    return sm.draw_squeezing(config.profile, config.ambient_modes)


class TestWeingartenValues:
    def test_d2(self):
        assert wg.weingarten_pair(2, "identity") == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert wg.weingarten_pair(2, "swap") == pytest.approx(-1.0 / 6.0, abs=1e-15)

    def test_d3_swap(self):
        assert wg.weingarten_pair(3, "swap") == pytest.approx(-1.0 / 24.0, abs=1e-15)

    def test_bad_dimension(self):
        with pytest.raises(BadDimension):
            wg.weingarten_pair(1, "identity")

    def test_bad_permutation(self):
        with pytest.raises(ValueError):
            wg.weingarten_pair(4, "cycle")

    @pytest.mark.parametrize("d", [2, 4, 8])
    def test_fourth_moment_consistency_mc(self, d):
        # the degree-2 Weingarten sums predict the entry fourth moments:
        #   E|U_11|^4            = 2 (Wg_id + Wg_swap) = 2/(d(d+1))
        #   E|U_11|^2 |U_12|^2   = Wg_id + Wg_swap     = 1/(d(d+1))
        #   E U_11 U_22 U*_12 U*_21 = Wg_swap
        n_draws = 30000
        rng = np.random.default_rng(1000 + d)
        w_id = wg.weingarten_pair(d, "identity")
        w_sw = wg.weingarten_pair(d, "swap")
        a = np.empty(n_draws)
        b = np.empty(n_draws)
        c = np.empty(n_draws, dtype=complex)
        sq = np.empty(n_draws)
        for k in range(n_draws):
            u = sm.haar_unitary(d, rng)
            a[k] = abs(u[0, 0]) ** 4
            b[k] = abs(u[0, 0]) ** 2 * abs(u[0, 1]) ** 2
            c[k] = u[0, 0] * u[1, 1] * np.conj(u[0, 1]) * np.conj(u[1, 0])
            sq[k] = abs(u[0, 0]) ** 2
        for values, expected in (
            (a, 2.0 * (w_id + w_sw)),
            (b, w_id + w_sw),
            (c.real, w_sw),
            (sq, 1.0 / d),
        ):
            se = np.std(values, ddof=1) / math.sqrt(n_draws)
            assert abs(np.mean(values) - expected) <= 4.0 * se
        se = np.std(c.imag, ddof=1) / math.sqrt(n_draws)
        assert abs(np.mean(c.imag)) <= 4.0 * se


class TestABDecomposition:
    def test_invariants(self):
        spec = SqueezingSpec(np.array([1.0, 1.5, 2.5]))
        ab = wg.ABDecomposition.from_squeezing(spec)
        j = np.diag(spec.z ** 2)
        assert np.allclose(ab.B - ab.A, np.linalg.inv(j), atol=1e-14)
        assert np.allclose(ab.B + ab.A, j, atol=1e-14)
        assert np.all(np.linalg.eigvalsh(ab.B - ab.A) >= 0.0)
        b_diag = np.diag(ab.B)
        assert ab.trA2 <= ab.trB2 <= np.sum(b_diag) * np.max(b_diag)

    def test_trace_identities(self):
        spec = SqueezingSpec(np.array([1.2, 2.0]))
        ab = wg.ABDecomposition.from_squeezing(spec)
        assert ab.trB == pytest.approx(np.trace(ab.B), abs=1e-14)
        assert ab.trB2 == pytest.approx(np.trace(ab.B @ ab.B), abs=1e-14)
        assert ab.trA2 == pytest.approx(np.trace(ab.A @ ab.A), abs=1e-14)


class TestFirstMoment:
    def test_vacuum(self):
        config = RandomStateConfig(n_full=3, m_sys=1, profile=ZProfile("vacuum"), master_seed=0)
        assert wg.expected_tr_gamma(ambient_spec(config), config) == 1.0

    def test_uniform_closed_form(self):
        config = uniform_config(8, 2, 1.2, 0)
        expected = 1.2 ** 2 + 1.2 ** -2
        assert wg.expected_tr_gamma(ambient_spec(config), config) == pytest.approx(
            expected, abs=1e-14
        )

    def test_power_profile_mc(self):
        # non-uniform profile, so the trace genuinely fluctuates
        config = RandomStateConfig(
            n_full=8, m_sys=1, profile=ZProfile("power", beta=0.5), master_seed=14
        )
        report = wg.mc_moment("tr_gamma", config, 20000)
        assert report.z_ratio <= 4.0


class TestSecondMoment:
    @pytest.mark.parametrize("n_full,m_sys", [(2, 1), (4, 2), (16, 5)])
    def test_vacuum_forced_value(self, n_full, m_sys):
        config = RandomStateConfig(
            n_full=n_full, m_sys=m_sys, profile=ZProfile("vacuum"), master_seed=0
        )
        assert wg.expected_tr_gamma_sq(ambient_spec(config), config) == pytest.approx(
            m_sys / 2.0, abs=1e-12
        )

    def test_uniform_mc(self):
        config = uniform_config(8, 1, 1.3, 21)
        report = wg.mc_moment("tr_gamma_sq", config, 20000)
        assert report.z_ratio <= 4.0

    def test_direct_pipeline_mc(self):
        # the closed forms hold for the direct pipeline too, with the
        # ambient dimension equal to n_full
        config = uniform_config(6, 2, 1.4, 22, pipeline="direct")
        report = wg.mc_moment("tr_gamma_sq", config, 20000)
        assert report.z_ratio <= 4.0


class TestOmegaSecondMoment:
    def test_vacuum_forces_retained_coefficient(self):
        # every vacuum draw yields Gamma = I/2 exactly, so the expectation
        # is -m/2; only the retained coefficient reproduces it at d = 4
        config = RandomStateConfig(n_full=2, m_sys=1, profile=ZProfile("vacuum"), master_seed=0)
        spec = ambient_spec(config)
        retained = wg.expected_tr_omega_gamma_sq(spec, config, wg.OMEGA_TRB2_RETAINED)
        alternate = wg.expected_tr_omega_gamma_sq(spec, config, wg.OMEGA_TRB2_ALTERNATE)
        assert retained == pytest.approx(-0.5, abs=1e-12)
        assert alternate == pytest.approx(-13.0 / 30.0, abs=1e-12)

    def test_full_trace_identity(self):
        # keeping every mode makes Tr[(Omega Gamma)^2] = -d/2 for any z;
        # the retained coefficient matches exactly, the alternate does not
        config = RandomStateConfig(
            n_full=4, m_sys=4, profile=ZProfile("uniform", z0=1.7),
            master_seed=5, pipeline="direct",
        )
        spec = ambient_spec(config)
        d = config.ambient_modes
        for i in range(5):
            gamma = sm.sample_random_state(config, i)
            assert wg.measure_tr_omega_gamma_sq(gamma) == pytest.approx(-d / 2.0, abs=1e-10)
        retained = wg.expected_tr_omega_gamma_sq(spec, config, wg.OMEGA_TRB2_RETAINED)
        alternate = wg.expected_tr_omega_gamma_sq(spec, config, wg.OMEGA_TRB2_ALTERNATE)
        assert retained == pytest.approx(-d / 2.0, abs=1e-12)
        assert abs(alternate + d / 2.0) > 1e-3

    def test_brute_force_probe_decides(self):
        probe = wg.omega_coefficient_probe(n_samples=60000)
        assert probe["retained"] == wg.OMEGA_TRB2_RETAINED
        assert probe["z_scores"][wg.OMEGA_TRB2_RETAINED] <= 4.0
        assert probe["z_scores"][wg.OMEGA_TRB2_ALTERNATE] >= 10.0

    def test_always_negative(self):
        for z0 in (1.0, 1.5, 3.0):
            config = uniform_config(8, 2, z0, 0)
            assert wg.expected_tr_omega_gamma_sq(ambient_spec(config), config) < 0.0


class TestAsymptoticLimits:
    @pytest.mark.parametrize(
        "quantity,limit_sign", [("tr_gamma_sq", 1.0), ("tr_omega_gamma_sq", -1.0)]
    )
    def test_approach_thermal_square(self, quantity, limit_sign):
        # |analytic - limit| decays like 1/n at a fixed uniform profile
        z0, m_sys = 1.5, 1
        fn = wg._ANALYTIC[quantity]
        scaled_gaps = []
        for n_full in (16, 32, 64, 128, 256):
            config = uniform_config(n_full, m_sys, z0, 0)
            spec = ambient_spec(config)
            nu = float(np.sum(spec.z ** 2 + spec.z ** -2.0)) / (4 * spec.n_modes)
            limit = limit_sign * 2.0 * m_sys * nu * nu
            scaled_gaps.append(n_full * abs(fn(spec, config) - limit))
        assert max(scaled_gaps) <= 2.0 * min(scaled_gaps)
        assert scaled_gaps[-1] / 256 <= 1e-2


class TestMcMoment:
    def test_vacuum_exact(self):
        config = RandomStateConfig(n_full=4, m_sys=2, profile=ZProfile("vacuum"), master_seed=7)
        report = wg.mc_moment("tr_gamma", config, 200)
        assert report.estimate == pytest.approx(2.0, abs=1e-12)
        assert report.std_error <= 1e-13
        assert report.z_ratio == 0.0
        report = wg.mc_moment("tr_gamma_sq", config, 200)
        assert report.estimate == pytest.approx(1.0, abs=1e-12)
        assert report.z_ratio == 0.0

    def test_report_fields(self):
        config = uniform_config(4, 1, 1.2, 3)
        report = wg.mc_moment("tr_gamma_sq", config, 500)
        assert report.n_samples == 500
        assert report.std_error > 0.0
        assert set(report.to_dict()) == {
            "quantity", "analytic", "estimate", "std_error", "n_samples", "z_ratio",
        }

    def test_deterministic_across_threads(self):
        config = uniform_config(4, 1, 1.3, 11)
        a = wg.mc_moment("tr_omega_gamma_sq", config, 400, threads=1)
        b = wg.mc_moment("tr_omega_gamma_sq", config, 400, threads=2)
        assert a == b

    def test_rejects_bad_input(self):
        config = uniform_config(4, 1, 1.2, 0)
        with pytest.raises(InvalidConfig):
            wg.mc_moment("tr_gamma_cubed", config, 100)
        with pytest.raises(InvalidConfig):
            wg.mc_moment("tr_gamma", config, 1)
        flat = RandomStateConfig(
            n_full=4, m_sys=1, profile=ZProfile("flat", energy=10.0), master_seed=0
        )
        with pytest.raises(InvalidConfig):
            wg.mc_moment("tr_gamma", flat, 100)
