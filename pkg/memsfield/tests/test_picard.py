import itertools
import unittest
from unittest import mock

import numpy as np

from memsfield.exceptions import EvaluationMismatch, Infeasible, ParameterError
from memsfield.model import ProblemParams
from memsfield.solvers import picard
from memsfield.solvers.shoot import ProfileKind


class TestKernels(unittest.TestCase):
    def test_disk_kernel(self):
        kernel = picard.disk_kernel(ProblemParams(2, 2.0, 0.01))
        self.assertIs(kernel.kind, picard.KernelKind.EXPONENTIAL_DISK)
        self.assertAlmostEqual(kernel.coefficient, 0.01, places=15)
        self.assertEqual(kernel.p, 3.0)
        self.assertEqual(kernel.shift, 1.0)

    def test_exterior_kernel(self):
        kernel = picard.exterior_kernel(ProblemParams(3, 3.0, 0.01))
        self.assertIs(kernel.kind, picard.KernelKind.POWER_EXTERIOR)
        self.assertAlmostEqual(kernel.coefficient, 0.02, places=15)
        self.assertEqual(kernel.p, 2.0)
        self.assertEqual(kernel.decay, 4.0)

    def test_kernel_ranges(self):
        with self.assertRaises(ParameterError):
            picard.disk_kernel(ProblemParams(3, 2.0, 0.01))
        with self.assertRaises(ParameterError):
            picard.exterior_kernel(ProblemParams(3, 2.0, 0.01))
        with self.assertRaises(ParameterError):
            picard.disk_kernel(ProblemParams(2, 2.0))

    def test_gamma_constant(self):
        self.assertAlmostEqual(picard.gamma_constant(3.0), 0.375, places=14)

    def test_gamma_constant_cross_check(self):
        picard.gamma_constant.cache_clear()
        try:
            with mock.patch('memsfield.solvers.picard.integrate.quad', return_value=(1.0, 0.0)):
                with self.assertRaises(EvaluationMismatch):
                    picard.gamma_constant(3.0)
        finally:
            picard.gamma_constant.cache_clear()


class TestFeasibility(unittest.TestCase):
    def setUp(self):
        self.kernel = picard.disk_kernel(ProblemParams(2, 2.0, 0.01))

    def test_closed_form(self):
        m = 0.4368
        self.assertAlmostEqual(picard.feasibility(self.kernel, m), 0.02 / m + 0.12 * m * m, places=12)

    def test_interval(self):
        interval = picard.feasible_m(self.kernel)
        self.assertAlmostEqual(interval.h_min, 0.0687, places=3)
        self.assertAlmostEqual(interval.m_best, (1.0 / 12.0) ** (1.0 / 3.0), places=5)
        self.assertLess(interval.m_lo, 0.1)
        self.assertGreater(interval.m_hi, 1.0)
        self.assertAlmostEqual(picard.feasibility(self.kernel, interval.m_lo), 1.0, places=8)
        self.assertAlmostEqual(picard.feasibility(self.kernel, interval.m_hi), 1.0, places=8)

    def test_infeasible(self):
        kernel = picard.disk_kernel(ProblemParams(2, 2.0, 10.0))
        with self.assertRaises(Infeasible):
            picard.feasible_m(kernel)

    def test_vanishing_coefficient(self):
        interval = picard.feasible_m(self.kernel.with_coefficient(1e-8))
        self.assertGreater(interval.m_hi / interval.m_lo, 1e6)

    def test_threshold(self):
        threshold = picard.constructive_threshold(self.kernel)
        self.assertAlmostEqual(threshold, 0.01 / picard.feasible_m(self.kernel).h_min, places=6)
        above = picard.disk_kernel(ProblemParams(2, 2.0, 1.01 * threshold))
        with self.assertRaises(Infeasible):
            picard.feasible_m(above)


class TestFixedPoint(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.params = ProblemParams(2, 2.0, 0.01)
        cls.kernel = picard.disk_kernel(cls.params)
        cls.solution = picard.solve(cls.kernel, 0.4368)

    def test_linear_without_forcing(self):
        solution = picard.solve(self.kernel.with_coefficient(0.0), 0.5, T=10.0)
        np.testing.assert_array_equal(solution.deviation, 0.0)
        np.testing.assert_allclose(solution.z, 0.5 * solution.t, rtol=0, atol=1e-15)

    def test_residual(self):
        self.assertEqual(self.solution.z[0], 0.0)
        self.assertLessEqual(picard.ode_residual(self.kernel, self.solution), 1e-8)

    def test_cone(self):
        self.assertTrue(self.solution.cone_ok)
        s = self.solution
        self.assertTrue(np.all(s.z >= 0))
        self.assertTrue(np.all(s.z <= 2 * s.m * s.t + 1e-12))

    def test_slope(self):
        s = self.solution
        T = s.t[-1]
        self.assertLessEqual(abs(s.z[-1] / T - s.m), picard.slope_bound(self.kernel, s.m, T))

    def test_rupture_profile(self):
        profile = picard.to_rupture(self.kernel, self.solution, self.params)
        self.assertIs(profile.kind, ProfileKind.RUPTURE)
        self.assertEqual(profile.U[-1], 0.0)
        self.assertEqual(profile.nodes[-1], 1.0)
        self.assertTrue(np.all(np.diff(profile.nodes) > 0))
        T = self.solution.t[-1]
        self.assertLessEqual(profile.one_minus_U()[0], 1.0 / (1.0 + self.solution.m * T) + 1e-15)

    def test_many_slopes(self):
        profiles = [picard.to_rupture(self.kernel, picard.solve(self.kernel, m, T=20.0), self.params)
                    for m in np.geomspace(0.1, 1.0, 10)]
        for p, q in itertools.combinations(profiles, 2):
            self.assertGreater(np.max(np.abs(p.U - q.U)), 1e-6)

    def test_rejects_bad_slope(self):
        with self.assertRaises(ParameterError):
            picard.solve(self.kernel, 0.0)


class TestExteriorKernel(unittest.TestCase):
    def test_solution(self):
        params = ProblemParams(3, 3.0, 0.01)
        kernel = picard.exterior_kernel(params)
        interval = picard.feasible_m(kernel)
        solution = picard.solve(kernel, interval.m_best, T=20.0)
        self.assertLessEqual(picard.ode_residual(kernel, solution), 1e-8)
        self.assertTrue(solution.cone_ok)
        profile = picard.to_rupture(kernel, solution, params)
        self.assertEqual(profile.U[-1], 0.0)
        self.assertTrue(np.all(np.diff(profile.U[:-1]) < 0))


if __name__ == '__main__':
    unittest.main()
