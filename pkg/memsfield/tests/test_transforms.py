import math
import unittest

import numpy as np

from memsfield.exceptions import DomainError
from memsfield.transforms import (Direction, TransformKind, from_transformed, kind_of, map_lambda,
                                  nonlinearity, to_transformed, transformed_problem)


class TestForwardBackward(unittest.TestCase):
    def test_boundary_value(self):
        for delta in (0.5, 1.0, 3.0):
            self.assertEqual(to_transformed(0.0, delta), 0.0)
            self.assertEqual(from_transformed(0.0, delta), 0.0)

    def test_known_values(self):
        self.assertAlmostEqual(to_transformed(0.5, 1.0), 2.0 * math.log(2.0), places=14)
        self.assertAlmostEqual(to_transformed(0.75, 3.0), 15.0, places=12)
        self.assertAlmostEqual(from_transformed(2.0 * math.log(2.0), 1.0), 0.5, places=14)
        self.assertAlmostEqual(from_transformed(15.0, 3.0), 0.75, places=14)
        self.assertAlmostEqual(to_transformed(0.75, 0.5), 0.5, places=14)

    def test_near_singular_value(self):
        U = 1.0 - 1e-12
        for delta in (0.5, 1.0, 3.0):
            u = to_transformed(U, delta)
            self.assertTrue(math.isfinite(u))
            self.assertLess(abs(from_transformed(u, delta) - U), 1e-15)

    def test_arrays(self):
        U = np.array([0.0, 0.25, 0.5])
        u = to_transformed(U, 2.0)
        self.assertEqual(u.shape, (3,))
        np.testing.assert_allclose(from_transformed(u, 2.0), U, atol=1e-15)

    def test_domain_errors(self):
        with self.assertRaises(DomainError):
            to_transformed(1.0, 1.0)
        with self.assertRaises(DomainError):
            from_transformed(1.0, 0.5)
        with self.assertRaises(DomainError):
            from_transformed(-1.0, 2.0)


class TestLambdaMap(unittest.TestCase):
    def test_examples(self):
        self.assertEqual(map_lambda(1.0, 0.5, Direction.FORWARD), 0.5)
        self.assertEqual(map_lambda(2.0 * (5 - 2), 1.0, 'backward'), 3.0)
        self.assertEqual(map_lambda(0.75, 3.0), 1.5)

    def test_inverse(self):
        for delta in (0.3, 1.0, 2.5):
            lam_t = map_lambda(1.7, delta, Direction.FORWARD)
            self.assertAlmostEqual(map_lambda(lam_t, delta, Direction.BACKWARD), 1.7, places=14)


class TestTransformedProblem(unittest.TestCase):
    def test_kinds(self):
        self.assertIs(kind_of(0.5), TransformKind.MEMS_POWER)
        self.assertIs(kind_of(1.0), TransformKind.EXPONENTIAL)
        self.assertIs(kind_of(2.0), TransformKind.SUPERLINEAR_POWER)

    def test_superlinear(self):
        problem = transformed_problem(2.0, 0.5)
        self.assertIs(problem.kind, TransformKind.SUPERLINEAR_POWER)
        self.assertEqual(problem.p, 3.0)
        self.assertEqual(problem.lambda_factor, 1.0)
        self.assertAlmostEqual(problem.center_value, 1.0, places=14)

    def test_center_limits(self):
        self.assertGreater(transformed_problem(0.5, 1.0 - 1e-10).center_value, 0.9999)
        self.assertGreater(transformed_problem(1.0, 1.0 - 1e-10).center_value, 40.0)
        self.assertGreater(transformed_problem(3.0, 1.0 - 1e-10).center_value, 1e19)

    def test_nonlinearity(self):
        g, dg = nonlinearity(TransformKind.EXPONENTIAL)
        self.assertEqual(g(0.0), 1.0)
        g, dg = nonlinearity(TransformKind.MEMS_POWER, 3.0)
        self.assertAlmostEqual(g(0.5), 8.0, places=12)
        self.assertAlmostEqual(dg(0.5), 48.0, places=12)
        g, dg = nonlinearity('SuperlinearPower', 2.0)
        self.assertEqual(g(1.0), 4.0)
        self.assertEqual(dg(1.0), 4.0)


if __name__ == '__main__':
    unittest.main()
