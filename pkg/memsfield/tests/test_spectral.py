import math
import unittest

from scipy import special

from memsfield import spectral
from memsfield.exceptions import NoZeroFound, NumericalError, ParameterError


class TestMu1(unittest.TestCase):
    def test_three_dimensions(self):
        self.assertLess(abs(spectral.mu1(3).mu1 - math.pi ** 2), 1e-10)

    def test_disk(self):
        result = spectral.mu1(2)
        self.assertLess(abs(result.mu1 - 5.783185963), 1e-8)
        self.assertEqual(result.nu, 0.0)
        self.assertEqual(result.mu1, result.j_first ** 2)

    def test_five_dimensions(self):
        # tan x = x
        j = spectral.mu1(5).j_first
        self.assertAlmostEqual(j, 4.4934094579, places=9)
        self.assertLess(abs(math.tan(j) - j), 1e-8)
        self.assertAlmostEqual(spectral.mu1(5).mu1, 20.190729, places=5)

    def test_zero_residual(self):
        for N in (2, 3, 4, 7, 20):
            result = spectral.mu1(N)
            self.assertLess(abs(special.jv(result.nu, result.j_first)), 1e-12)

    def test_increasing_in_dimension(self):
        values = [spectral.mu1(N).mu1 for N in range(2, 14)]
        self.assertTrue(all(b > a for a, b in zip(values, values[1:])))

    def test_supported_range(self):
        self.assertGreater(spectral.mu1(50).mu1, spectral.mu1(49).mu1)
        with self.assertRaises(ParameterError):
            spectral.mu1(51)
        with self.assertRaises(ParameterError):
            spectral.mu1(1)


class TestEvaluators(unittest.TestCase):
    def test_series_matches_scipy(self):
        for nu, x in [(0.0, 1.3), (0.5, 2.0), (1.5, 7.7), (3.0, 12.5)]:
            self.assertAlmostEqual(spectral.bessel_series(nu, x), special.jv(nu, x), places=12)

    def test_series_half_order_zero(self):
        self.assertLess(abs(spectral.bessel_series(0.5, math.pi)), 1e-14)

    def test_independent_evaluators_agree(self):
        for N in (2, 3, 5, 7):
            self.assertLess(spectral.cross_check(N), 1e-10)

    def test_series_range(self):
        with self.assertRaises(ParameterError):
            spectral.bessel_series(0.0, 31.0)


class TestFirstZeroFailures(unittest.TestCase):
    def test_no_sign_change(self):
        with self.assertRaises(NoZeroFound):
            spectral.first_zero(1.0, evaluator=lambda nu, x: 1.0)

    def test_negative_at_start(self):
        with self.assertRaises(NoZeroFound):
            spectral.first_zero(1.0, evaluator=lambda nu, x: -1.0)

    def test_numerical_error_family(self):
        with self.assertRaises(NumericalError):
            spectral.first_zero(0.5, evaluator=lambda nu, x: 2.0 + math.sin(x))


if __name__ == '__main__':
    unittest.main()
