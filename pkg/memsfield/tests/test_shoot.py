import math
import unittest
from dataclasses import replace
from unittest import mock

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from memsfield import transforms
from memsfield.analysis import exact
from memsfield.exceptions import EvaluationMismatch, NoZeroFound, ParameterError, SingularityHit
from memsfield.model import ProblemParams
from memsfield.solvers.shoot import (DEFAULT_CONTROLS, ProfileKind, RadialProfile, ShotResult, integrate_scaled,
                                     integrate_transformed, lambda_of_alpha, residual, shoot)


def fixed_step_zero(N, g, dg, center, h):
    """First zero of u'' + (N-1)/s u' + g(u) = 0, u(0) = center, by classical RK4 with step h"""
    a = -g(center) / (2.0 * N)
    b = -dg(center) * a / (4.0 * N + 8.0)

    def f(s, y):
        return np.array([y[1], -(N - 1) / s * y[1] - g(y[0])])

    s = h
    y = np.array([center + a * h * h + b * h ** 4, 2.0 * a * h + 4.0 * b * h ** 3])
    while True:
        k1 = f(s, y)
        k2 = f(s + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(s + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(s + h, y + h * k3)
        y_new = y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if y_new[0] <= 0.0:
            break
        s, y = s + h, y_new
    spline = CubicHermiteSpline([s, s + h], [y[0], y_new[0]], [y[1], y_new[1]])
    return brentq(lambda x: float(spline(x)), s, s + h, xtol=1e-15)


def richardson_zero(N, g, dg, center, h=1e-3):
    coarse = fixed_step_zero(N, g, dg, center, 2.0 * h)
    fine = fixed_step_zero(N, g, dg, center, h)
    return fine + (fine - coarse) / 15.0


class TestScaledShooting(unittest.TestCase):
    def test_parabola_law(self):
        params = ProblemParams(3, 1.5)
        result = shoot(params, 0.5)
        self.assertLess(abs(result.lam - 1.5), 1e-6)
        profile = result.profile
        exact_U = 0.5 * (1.0 - profile.nodes ** 2)
        self.assertLess(np.max(np.abs(profile.U - exact_U)), 1e-6)
        self.assertLess(residual(profile, params), 1e-4)

    def test_parabola_law_many_alphas(self):
        for N in (2, 3, 4, 6):
            params = ProblemParams(N, 0.5 * N)
            for alpha in np.linspace(0.02, 0.98, 50):
                result = shoot(params, alpha)
                self.assertLess(abs(result.lam - 2 * N * alpha * (1 - alpha)), 1e-6, (N, alpha))
                exact_U = alpha * (1.0 - result.profile.nodes ** 2)
                self.assertLess(np.max(np.abs(result.profile.U - exact_U)), 1e-6, (N, alpha))

    def test_four_dimensions(self):
        self.assertLess(abs(lambda_of_alpha(ProblemParams(4, 2.0), 0.5) - 2.0), 1e-6)

    def test_small_center_value(self):
        for N, delta in [(2, 0.5), (3, 1.0), (5, 3.0)]:
            self.assertLess(lambda_of_alpha(ProblemParams(N, delta), 1e-6), 1e-4)

    def test_profile_properties(self):
        profile = shoot(ProblemParams(3, 1.0), 0.6).profile
        self.assertIs(profile.kind, ProfileKind.REGULAR)
        self.assertEqual(profile.check(), [])
        self.assertEqual(profile.nodes[-1], 1.0)
        self.assertEqual(profile.U[-1], 0.0)
        self.assertTrue(np.all(np.diff(profile.nodes) > 0))
        self.assertEqual(list(profile.to_frame().columns), ['r', 'U', 'dU'])

    def test_invalid_alpha(self):
        params = ProblemParams(3, 1.0)
        with self.assertRaises(ParameterError):
            integrate_scaled(params, 1.0)
        with self.assertRaises(ParameterError):
            integrate_transformed(params, 0.0)
        with self.assertRaises(SingularityHit):
            integrate_scaled(params, 1.0 - 1e-12)

    def test_no_zero_before_horizon(self):
        controls = replace(DEFAULT_CONTROLS, s_max_factor=1e-3)
        with self.assertRaises(NoZeroFound):
            integrate_scaled(ProblemParams(3, 1.0), 0.5, controls)


class TestOracles(unittest.TestCase):
    def test_gelfand_form(self):
        # u = -2 log(1 - U), lam = s0^2 / 2
        center = -2.0 * math.log(0.1)
        s0 = richardson_zero(3, math.exp, math.exp, center)
        lam = lambda_of_alpha(ProblemParams(3, 1.0), 0.9)
        self.assertLess(abs(lam - 0.5 * s0 * s0), 1e-7 * max(1.0, lam))

    def test_mems_form(self):
        # u = 1 - (1 - U)^(1/2), g(u) = (1 - u)^-3, lam = s0^2 / (1/2)
        center = 1.0 - math.sqrt(0.7)
        s0 = richardson_zero(2, lambda u: (1.0 - u) ** -3, lambda u: 3.0 * (1.0 - u) ** -4, center)
        lam = lambda_of_alpha(ProblemParams(2, 0.5), 0.3)
        self.assertLess(abs(lam - 2.0 * s0 * s0), 1e-7 * max(1.0, lam))


class TestInvariants(unittest.TestCase):
    CASES = [(3, 1.0, 0.6), (2, 0.5, 0.3), (4, 3.0, 0.7), (3, 1.0, 1 - 1e-6), (6, 2.0, 1 - 1e-5),
             (3, 2.0, 1 - 1e-4)]

    def test_monotone_start(self):
        for N, delta, alpha in self.CASES:
            profile = shoot(ProblemParams(N, delta), alpha).profile
            self.assertTrue(np.all(np.diff(profile.one_minus_U()) > 0), (N, delta, alpha))
            self.assertTrue(np.all(profile.dU < 0), (N, delta, alpha))

    def test_tolerance_refinement(self):
        halved = replace(DEFAULT_CONTROLS, rtol=0.5 * DEFAULT_CONTROLS.rtol)
        for N, delta, alpha in [(3, 1.0, 0.6), (2, 0.5, 0.3), (4, 3.0, 0.7), (3, 2.0, 0.995)]:
            params = ProblemParams(N, delta)
            lam = lambda_of_alpha(params, alpha)
            lam_fine = lambda_of_alpha(params, alpha, halved)
            self.assertLess(abs(lam - lam_fine), 10 * DEFAULT_CONTROLS.rtol * max(1.0, lam), (N, delta, alpha))


class TestTransformedShooting(unittest.TestCase):
    def test_methods_agree(self):
        for N, delta in [(3, 0.5), (3, 1.0), (4, 3.0)]:
            params = ProblemParams(N, delta)
            for alpha in np.linspace(0.05, 0.95, 20):
                direct = integrate_scaled(params, alpha).lam
                transformed = integrate_transformed(params, alpha).lam
                self.assertLess(abs(direct - transformed), 1e-8, (N, delta, alpha))

    def test_gelfand_limit(self):
        lam = lambda_of_alpha(ProblemParams(3, 1.0), 1.0 - 1e-6)
        self.assertLess(abs(lam - 1.0), 0.05)

    def test_profile_gap(self):
        result = integrate_transformed(ProblemParams(3, 2.0), 1.0 - 1e-6)
        profile = result.profile
        self.assertIsNotNone(profile.gap)
        self.assertAlmostEqual(profile.gap[0], 1e-6, delta=1e-8)
        self.assertEqual(profile.U[-1], 0.0)
        self.assertEqual(profile.gap[-1], 1.0)

    def test_boundary_node_on_every_branch(self):
        for N, delta in [(3, 0.5), (3, 1.0), (3, 2.0), (6, 3.0), (10, 4.0)]:
            profile = integrate_transformed(ProblemParams(N, delta), 1.0 - 1e-6).profile
            self.assertEqual(profile.nodes[-1], 1.0, (N, delta))
            self.assertEqual(profile.U[-1], 0.0, (N, delta))
            self.assertEqual(profile.check(), [], (N, delta))

    def test_half_dimension_law_near_one(self):
        for N in (6, 10):
            params = ProblemParams(N, 0.5 * N)
            for gap in (1e-4, 1e-6, 1e-8):
                alpha = 1.0 - gap
                result = shoot(params, alpha)
                expected = exact.parabola(N, alpha).lam
                self.assertLess(abs(result.lam / expected - 1.0), 1e-6, (N, gap))
                exact_U = alpha * (1.0 - result.profile.nodes ** 2)
                self.assertLess(np.max(np.abs(result.profile.U - exact_U)), 1e-6, (N, gap))

    def test_parabola_law_above_switch(self):
        for N in (2, 3, 4, 6):
            params = ProblemParams(N, 0.5 * N)
            for alpha in np.concatenate([[0.993], 1.0 - np.geomspace(1e-3, 1e-7, 5)]):
                lam = shoot(params, alpha).lam
                expected = 2 * N * alpha * (1 - alpha)
                self.assertLess(abs(lam - expected), 1e-6, (N, alpha))
                self.assertLess(abs(lam / expected - 1.0), 1e-5, (N, alpha))

    def test_large_center_values(self):
        # (1 - alpha)^-(delta - 1) = 1e24
        for N in (2, 3, 4, 6):
            result = shoot(ProblemParams(N, 4.0), 1.0 - 1e-8)
            self.assertGreater(result.lam, 0.0)
            self.assertLess(result.lam, 1e-10)
            self.assertEqual(result.profile.check(), [], N)

    def test_taylor_start_from_nonlinearity(self):
        with mock.patch('memsfield.solvers.shoot.nonlinearity', wraps=transforms.nonlinearity) as spy:
            for delta, kind in [(0.5, transforms.TransformKind.MEMS_POWER),
                                (1.0, transforms.TransformKind.EXPONENTIAL),
                                (2.0, transforms.TransformKind.SUPERLINEAR_POWER)]:
                integrate_transformed(ProblemParams(3, delta), 0.995)
                self.assertIs(spy.call_args[0][0], kind)
        self.assertEqual(spy.call_count, 3)


class TestSwitchAgreement(unittest.TestCase):
    def test_agreement_near_switch(self):
        params = ProblemParams(3, 1.0)
        alpha = DEFAULT_CONTROLS.alpha_switch + 0.002
        self.assertLess(abs(shoot(params, alpha).lam - integrate_scaled(params, alpha).lam), 1e-6)

    def test_disagreement_raises(self):
        params = ProblemParams(3, 1.0)
        wrong = ShotResult(s0=1.0, lam=2.0, profile=None)
        with mock.patch('memsfield.solvers.shoot.integrate_transformed', return_value=wrong):
            with self.assertRaises(EvaluationMismatch):
                shoot(params, DEFAULT_CONTROLS.alpha_switch + 0.002)
            self.assertNotEqual(shoot(params, 0.9).lam, 2.0)


class TestResidual(unittest.TestCase):
    def setUp(self):
        self.nodes = np.geomspace(1e-6, 1.0, 2001)

    def test_rupture_line(self):
        params = ProblemParams(5, 1.0)
        r = self.nodes
        profile = RadialProfile(r, 1.0 - r, -np.ones_like(r), ProfileKind.RUPTURE, 3.0, gap=r.copy())
        self.assertLessEqual(residual(profile, params), 1e-12)

    def test_parabola(self):
        params = ProblemParams(3, 1.5)
        r, alpha = self.nodes, 0.4
        profile = RadialProfile(r, alpha * (1 - r * r), -2 * alpha * r, ProfileKind.REGULAR,
                                2 * 3 * alpha * (1 - alpha), alpha=alpha, gap=(1 - alpha) + alpha * r * r)
        self.assertLessEqual(residual(profile, params), 1e-12)

    def test_perturbed_profile(self):
        params = ProblemParams(3, 1.5)
        r = self.nodes
        U = 0.5 * (1 - r * r) + 0.01 * np.sin(np.pi * r)
        dU = -r + 0.01 * np.pi * np.cos(np.pi * r)
        profile = RadialProfile(r, U, dU, ProfileKind.REGULAR, 1.5, alpha=0.5)
        self.assertGreater(residual(profile, params), 0.01)

    def test_too_few_nodes(self):
        r = np.array([0.5, 1.0])
        profile = RadialProfile(r, 1 - r, -np.ones(2), ProfileKind.RUPTURE, 1.0)
        with self.assertRaises(ParameterError):
            residual(profile, ProblemParams(3, 1.0))

    def test_check_reports_problems(self):
        r = self.nodes
        profile = RadialProfile(r, 0.5 * (1 - r), -0.5 * np.ones_like(r), ProfileKind.RUPTURE, 1.0)
        problems = profile.check()
        self.assertEqual(len(problems), 1)
        self.assertIn('rupture', problems[0])


if __name__ == '__main__':
    unittest.main()
