"""Exact secrecy metrics: cross-module oracles, monotonicity, solver contract."""

import math
import warnings

import numpy as np
import pytest
from conftest import build_scenario

from satsec.approx import capacity_no_eavesdroppers
from satsec.channel import FadingParams
from satsec.montecarlo import simulate_secrecy
from satsec.secrecy import (DEFAULT_QUAD, ExactEvaluator,
                            InfeasibleTargetWarning, N_EXACT_CAP,
                            QuadratureControl, SecrecyReport,
                            ergodic_secrecy_capacity, exact_secrecy_report,
                            secrecy_outage_probability, solve_outage_capacity)

INTEGER_M = FadingParams(b=0.126, m=10.0, omega=0.835)


class TestErgodicCapacity:
    def test_no_eavesdropper_matches_closed_form(self):
        scn = build_scenario(n=0, fading=INTEGER_M)
        exact = ergodic_secrecy_capacity(scn)
        closed = capacity_no_eavesdroppers(scn)
        assert exact == pytest.approx(closed, abs=1e-4)

    def test_matches_monte_carlo(self):
        scn = build_scenario()
        want = ergodic_secrecy_capacity(scn)
        got = simulate_secrecy(scn, [3.0], 300_000, seed=17)
        assert abs(got.mean_secrecy_rate - want) < 3.0 * got.rate_ci_halfwidth
        assert abs(got.mean_secrecy_rate - want) / want < 0.02

    def test_decreasing_in_constellation_size(self):
        caps = [ergodic_secrecy_capacity(build_scenario(n=n))
                for n in (10, 50, 200)]
        assert caps[0] > caps[1] > caps[2] > 0.0

    def test_steerable_no_better_than_fixed(self):
        fixed = ergodic_secrecy_capacity(build_scenario(n=50))
        steer = ergodic_secrecy_capacity(
            build_scenario(n=50, delta_omega_deg=20.0, beam_mode="steerable"))
        assert steer <= fixed

    def test_nonnegative(self):
        assert ergodic_secrecy_capacity(build_scenario(n=500, a_s=1200.0)) >= 0.0


class TestOutageProbability:
    def test_certain_outage_for_huge_target(self):
        assert secrecy_outage_probability(build_scenario(), 25.0) == 1.0

    def test_monotone_in_target_rate(self):
        scn = build_scenario()
        engine = ExactEvaluator(scn)
        vals = [engine.p_out(rt) for rt in (0.0, 0.5, 1.0, 2.0, 3.0, 4.0)]
        assert all(b >= a - 1e-10 for a, b in zip(vals, vals[1:]))
        assert all(0.0 <= v <= 1.0 for v in vals)

    def test_zero_rate_matches_mc_zero_rate_mass(self):
        scn = build_scenario(n=100)
        want = secrecy_outage_probability(scn, 0.0)
        sim = simulate_secrecy(scn, [0.0], 400_000, seed=23)
        freq = float(sim.outage_frequency[0])
        sigma = math.sqrt(max(want * (1 - want), 1e-12) / 400_000)
        assert abs(freq - want) < 3.5 * sigma

    def test_negative_target_rejected(self):
        with pytest.raises(ValueError):
            secrecy_outage_probability(build_scenario(), -0.5)


class TestOutageCapacitySolver:
    def test_bisection_residual(self):
        scn = build_scenario(omega_th_deg=20.0, delta_omega_deg=10.0)
        report = exact_secrecy_report(scn, epsilon=0.1)
        assert abs(report.diagnostics["bisection_residual"]) < 1e-4
        # Ninety percent of the solved target rate, near the published read.
        assert report.c_out == pytest.approx(2.07, abs=0.1)

    def test_infeasible_target_returns_zero(self):
        scn = build_scenario(n=400)
        engine = ExactEvaluator(scn)
        floor = engine.p_out(0.0)
        assert floor > 0.05
        with pytest.warns(InfeasibleTargetWarning):
            value, residual = engine.c_out(0.5 * floor)
        assert value == 0.0
        assert residual > 0.0

    def test_solver_validation(self):
        with pytest.raises(ValueError):
            solve_outage_capacity(lambda r: 0.5, 0.0, 1.0)

    def test_solver_on_analytic_curve(self):
        value, residual = solve_outage_capacity(
            lambda r: 1.0 - math.exp(-r), 0.5, 8.0)
        assert value == pytest.approx(math.log(2.0), abs=1e-4)
        assert abs(residual) < 1e-5


class TestEngineAndReport:
    def test_refuses_oversized_constellation(self):
        with pytest.raises(ValueError, match="approx"):
            ExactEvaluator(build_scenario(n=N_EXACT_CAP + 1))

    def test_refuses_multiple_layers(self):
        scn = build_scenario(layers=[(5, 600.0), (5, 1200.0)])
        with pytest.raises(ValueError, match="single"):
            ExactEvaluator(scn)

    def test_pq_mass_quota(self):
        engine = ExactEvaluator(build_scenario(n=200))
        assert engine.pq_mass >= 1.0 - DEFAULT_QUAD.pq_mass_eps

    def test_marginalized_cdf_properties(self):
        engine = ExactEvaluator(build_scenario(n=20))
        vals = engine.joint_eav_cdf(np.logspace(-5, 5, 60))
        assert np.all(np.diff(vals) >= -1e-12)
        assert np.all((vals >= 0.0) & (vals <= 1.0 + 1e-12))

    def test_report_validation(self):
        with pytest.raises(ValueError):
            SecrecyReport(method="exact", c_erg=-0.1)
        with pytest.raises(ValueError):
            SecrecyReport(method="exact", p_out=1.2)

    def test_report_diagnostics(self):
        report = exact_secrecy_report(build_scenario(), r_t=3.0)
        assert report.method == "exact"
        assert report.diagnostics["n_integrals"] == 2
        assert report.diagnostics["pq_mass"] >= 1.0 - 1e-9
        assert not report.diagnostics["series_degraded"]

    def test_control_validation(self):
        with pytest.raises(ValueError):
            QuadratureControl(tail_eps=0.0)

    def test_workers_hint_does_not_change_values(self):
        scn = build_scenario(n=30)
        a = ExactEvaluator(scn, workers=1).c_erg()
        b = ExactEvaluator(scn, workers=8).c_erg()
        assert a == b
