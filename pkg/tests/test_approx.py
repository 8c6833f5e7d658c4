"""Poisson-limit engine, asymptotic regimes, and the multi-altitude product."""

import math
import warnings

import numpy as np
import pytest
import scipy.integrate as si
import scipy.stats as ss
from conftest import build_scenario

from satsec.approx import (HighSnrCharacterization, PoissonEvaluator,
                           _conditional_mean_distance, approx_secrecy_metrics,
                           capacity_no_eavesdroppers,
                           degenerate_many_eavesdroppers,
                           high_snr_characterization, multi_altitude_metrics,
                           outage_no_eavesdroppers, ppp_eav_mainlobe_cdf,
                           ppp_eav_sidelobe_cdf)
from satsec.channel import FadingParams, dbm_to_watts
from satsec.pointprocess import distance_cdf_shell, region_probabilities
from satsec.secrecy import ExactEvaluator, ergodic_secrecy_capacity
from satsec.snrdist import eav_mainlobe_snr_cdf

INTEGER_M = FadingParams(b=0.126, m=10.0, omega=0.835)


class TestPoissonLobeCdfs:
    def test_empty_process(self):
        scn = build_scenario(n=0)
        x = np.logspace(-3, 3, 9)
        np.testing.assert_array_equal(
            ppp_eav_mainlobe_cdf(x, scn.single_layer, scn), 1.0)
        np.testing.assert_array_equal(
            ppp_eav_sidelobe_cdf(x, scn.single_layer, scn), 1.0)

    def test_saturates(self):
        scn = build_scenario(n=50)
        val = np.asarray(ppp_eav_mainlobe_cdf(1e9, scn.single_layer, scn))
        assert val.item() == pytest.approx(1.0, abs=1e-6)

    def test_zero_threshold_is_void_probability(self):
        scn = build_scenario(n=40)
        layer = scn.single_layer
        got = np.asarray(ppp_eav_mainlobe_cdf(0.0, layer, scn)).item()
        want = math.exp(-0.5 * 40 * (1.0 - math.cos(layer.psi_th)))
        assert got == pytest.approx(want, rel=1e-12)

    def test_binomial_mixture_agreement_low_altitude(self):
        # Exact law: binomial mixture over the main-lobe count. The
        # intensity-matched Poisson form must track it at low altitude.
        scn = build_scenario(n=10, a_e=300.0)
        layer = scn.single_layer
        s1, _, _ = region_probabilities(layer, scn.system.r_km)
        x = np.logspace(-4, 3, 60)
        mix = np.zeros(x.shape)
        for p in range(11):
            mix += (ss.binom.pmf(p, 10, s1)
                    * eav_mainlobe_snr_cdf(x, p, scn))
        ppp = ppp_eav_mainlobe_cdf(x, layer, scn)
        assert float(np.max(np.abs(mix - ppp))) < 0.01

    def test_vanishes_pointwise_with_density(self):
        prev = None
        for n in (100, 10_000, 1_000_000):
            scn = build_scenario(n=n)
            vals = PoissonEvaluator(scn).joint_eav_cdf(np.array([1.0]))
            if prev is not None:
                assert float(vals[0]) < prev
            prev = float(vals[0])
        assert prev < 1e-6


class TestPoissonEvaluator:
    def test_single_quadrature_per_metric(self):
        engine = PoissonEvaluator(build_scenario(n=10_000))
        engine.c_erg()
        assert engine.n_integrals == 1
        engine.p_out(3.0)
        assert engine.n_integrals == 2

    def test_large_constellation_no_refusal(self):
        report = approx_secrecy_metrics(build_scenario(n=10_000), r_t=3.0)
        assert 0.0 <= report.c_erg < capacity_no_eavesdroppers(
            build_scenario(n=0, fading=INTEGER_M)) + 1e-6
        assert 0.0 <= report.p_out <= 1.0

    def test_close_to_exact_at_low_altitude(self):
        scn = build_scenario(n=10, a_e=300.0)
        exact = ergodic_secrecy_capacity(scn)
        approx = PoissonEvaluator(scn).c_erg()
        assert abs(exact - approx) / exact < 0.05

    def test_multi_altitude_single_layer_reduction(self):
        scn = build_scenario(n=25, a_e=700.0)
        a = approx_secrecy_metrics(scn, r_t=2.0)
        b = multi_altitude_metrics(scn, r_t=2.0)
        assert a.c_erg == b.c_erg
        assert a.p_out == b.p_out

    def test_product_cdf_bounded_by_layers(self):
        two = build_scenario(layers=[(78, 1015.0), (220, 1325.0)],
                             omega_th_deg=20.0, delta_omega_deg=10.0)
        one_a = build_scenario(layers=[(78, 1015.0)], omega_th_deg=20.0,
                               delta_omega_deg=10.0)
        one_b = build_scenario(layers=[(220, 1325.0)], omega_th_deg=20.0,
                               delta_omega_deg=10.0)
        x = np.logspace(-4, 3, 30)
        joint = PoissonEvaluator(two).joint_eav_cdf(x)
        assert np.all(joint <= PoissonEvaluator(one_a).joint_eav_cdf(x) + 1e-14)
        assert np.all(joint <= PoissonEvaluator(one_b).joint_eav_cdf(x) + 1e-14)


class TestNoEavesdropperRegime:
    def test_integer_order_capacity_cross_check(self):
        scn = build_scenario(n=0, fading=INTEGER_M)
        assert capacity_no_eavesdroppers(scn) == pytest.approx(
            ergodic_secrecy_capacity(scn), abs=1e-3)

    def test_noninteger_order_warns(self):
        with pytest.warns(UserWarning, match="floor"):
            capacity_no_eavesdroppers(build_scenario(n=0))

    def test_upper_bounds_exact_capacity(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ceiling = capacity_no_eavesdroppers(build_scenario(n=0))
        for n in (1, 10, 100):
            assert ergodic_secrecy_capacity(build_scenario(n=n)) < ceiling

    def test_outage_zero_rate(self):
        assert outage_no_eavesdroppers(build_scenario(n=0), 0.0) == 0.0

    def test_outage_monotone(self):
        scn = build_scenario(n=0)
        vals = [outage_no_eavesdroppers(scn, rt) for rt in (0.5, 2.0, 4.0)]
        assert vals[0] < vals[1] < vals[2]


class TestDenseConstellationRegime:
    def test_limit_report(self):
        report = degenerate_many_eavesdroppers()
        assert (report.c_erg, report.p_out, report.c_out) == (0.0, 1.0, 0.0)

    def test_approx_metrics_approach_limit(self):
        report = approx_secrecy_metrics(build_scenario(n=1_000_000), r_t=1.0)
        assert report.c_erg < 0.01
        assert report.p_out > 0.99


class TestHighSnrCharacterization:
    def test_survival_fraction_frozen(self):
        hs = high_snr_characterization(build_scenario(n=10))
        r = 6378.0
        want = (1.0 - 0.5 / (1.0 + r / 600.0)) ** 10
        assert hs.slope == pytest.approx(want, rel=1e-12)
        assert hs.slope == pytest.approx(0.6445, abs=1e-3)

    def test_empty_constellation_slope_one(self):
        hs = high_snr_characterization(build_scenario(n=0))
        assert hs.slope == 1.0

    @pytest.mark.parametrize("a_e", [300.0, 600.0, 1200.0, 2100.0])
    @pytest.mark.parametrize("n", [1, 5, 10, 60, 200])
    def test_slope_bounds(self, a_e, n):
        hs = high_snr_characterization(build_scenario(n=n, a_e=a_e))
        assert 0.5 ** n < hs.slope < 1.0

    def test_offset_identity(self):
        scn = build_scenario(n=10, p_dbm=40.0)
        hs = high_snr_characterization(scn)
        assert hs.assembled(scn.system.tx_power_w) == pytest.approx(
            hs.c_erg_inf, abs=1e-9)

    def test_gap_shrinks_with_power(self):
        gaps = []
        for p_dbm in (20.0, 40.0, 60.0):
            scn = build_scenario(n=10, p_dbm=p_dbm)
            approx = PoissonEvaluator(scn).c_erg()
            hs = high_snr_characterization(scn)
            assert hs.c_erg_inf > approx  # asymptote is an upper bound
            gaps.append(hs.c_erg_inf - approx)
        assert gaps[0] > gaps[1] > gaps[2]

    def test_lambda_terms_inside_intervals(self):
        for n, a_e in ((5, 600.0), (50, 1200.0), (200, 300.0)):
            scn = build_scenario(n=n, a_e=a_e)
            layer = scn.single_layer
            hs = high_snr_characterization(scn)
            lam1, lam2 = hs.lambda_terms
            assert layer.altitude_km < lam1 < layer.d_th_km
            assert layer.d_th_km < lam2 < layer.d_max_km

    @pytest.mark.parametrize("n", [5, 35, 60, 61, 150])
    def test_conditional_mean_against_quadrature_oracle(self, n):
        # Dual route: binomial expansion to n = 60, quadrature beyond. Both
        # must match an independent adaptive-quadrature evaluation.
        a_e, r = 600.0, 6378.0
        layer = build_scenario(n=n, a_e=a_e).single_layer
        lo, hi = layer.altitude_km, layer.d_th_km
        c = 1.0 / (4.0 * r * (r + a_e))

        def surv(z):
            return 1.0 - float(distance_cdf_shell(z, a_e, r))

        val, _ = si.quad(lambda z: z * z * surv(z) ** (n - 1), lo, hi,
                         epsabs=0.0, epsrel=1e-12, limit=300)
        denom = surv(lo) ** n - surv(hi) ** n
        want = 2.0 * c * n * val / denom
        got, flagged = _conditional_mean_distance(lo, hi, n, a_e, r)
        assert got == pytest.approx(want, rel=1e-6)
        assert not flagged

    def test_conditioning_interval_validation(self):
        with pytest.raises(ValueError):
            _conditional_mean_distance(600.0, 600.0, 5, 600.0, 6378.0)

    def test_dataclass_frozen(self):
        hs = high_snr_characterization(build_scenario(n=3))
        with pytest.raises(AttributeError):
            hs.slope = 0.5
