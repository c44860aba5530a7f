from unittest import TestCase

import numpy as np

from igacontact.spline import QuadratureRangeError, gauss_legendre


class TestGaussLegendre(TestCase):
    def test_exact_for_degree_2n_minus_1(self):
        for n in (1, 2, 3, 5, 12):
            rule = gauss_legendre(n)
            self.assertEqual(rule.n_points, n)
            for k in range(2 * n):
                exact = 0.0 if k % 2 else 2.0 / (k + 1)
                self.assertAlmostEqual(np.sum(rule.weights * rule.points**k), exact, places=12)

    def test_mapped(self):
        x, w = gauss_legendre(4).mapped(1.0, 3.0)
        self.assertAlmostEqual(w.sum(), 2.0, places=13)
        self.assertAlmostEqual(np.sum(w * x**3), (3.0**4 - 1.0) / 4.0, places=11)

    def test_large_rule(self):
        rule = gauss_legendre(200)
        self.assertAlmostEqual(rule.weights.sum(), 2.0, places=10)
        self.assertTrue(np.all(np.diff(rule.points) > 0.0))
        np.testing.assert_allclose(rule.points, -rule.points[::-1], atol=1e-15)

    def test_range(self):
        with self.assertRaises(QuadratureRangeError):
            gauss_legendre(0)
        with self.assertRaises(QuadratureRangeError):
            gauss_legendre(201)
