from unittest import TestCase

import numpy as np
from numpy.testing import assert_allclose

from igacontact.spline import (
    InvalidKnotVector,
    KnotDomainError,
    KnotVector,
    eval_basis,
    eval_basis_batch,
    find_span,
    find_spans,
    graded_interior_knots,
    uniform_interior_knots,
)


class TestKnotVector(TestCase):
    def test_rejects_invalid(self):
        with self.assertRaises(InvalidKnotVector):
            KnotVector([0, 0, 1, 0.5, 1, 1], 2)
        with self.assertRaises(InvalidKnotVector):
            KnotVector([0, 0.1, 0.5, 1, 1, 1], 2)
        with self.assertRaises(InvalidKnotVector):
            KnotVector([0, 0, 0, 0.5, 0.5, 0.5, 1, 1, 1], 2)
        with self.assertRaises(InvalidKnotVector):
            KnotVector([0, 0, 1], 1)

    def test_properties(self):
        kv = KnotVector([0, 0, 0, 0.5, 0.5, 1, 1, 1], 2)
        self.assertEqual(kv.n_basis, 5)
        self.assertEqual(kv.bounds, (0.0, 1.0))
        assert_allclose(kv.unique_knots, [0.0, 0.5, 1.0])
        self.assertEqual(kv.n_spans, 2)
        self.assertEqual(kv.multiplicity(0.5), 2)
        self.assertEqual(kv.multiplicity(0.25), 0)
        self.assertEqual(kv.span_bounds(kv.spans[1]), (0.5, 1.0))

    def test_uniform_and_elevated(self):
        kv = KnotVector.uniform(2, 4)
        assert_allclose(kv.interior_knots(), [0.25, 0.5, 0.75])
        up = kv.elevated(1)
        self.assertEqual(up.degree, 3)
        self.assertEqual(up.multiplicity(0.5), 2)
        self.assertEqual(up.n_basis, kv.n_basis + kv.n_spans)

    def test_equality(self):
        self.assertEqual(KnotVector.uniform(1, 2), KnotVector([0, 0, 0.5, 1, 1], 1))
        self.assertNotEqual(KnotVector.uniform(1, 2), KnotVector.uniform(2, 2))


class TestSpans(TestCase):
    def setUp(self):
        self.kv = KnotVector([0, 0, 0, 1, 2, 3, 3, 3], 2)

    def test_interior_and_ends(self):
        self.assertEqual(find_span(self.kv, 0.0), 2)
        self.assertEqual(find_span(self.kv, 1.0), 3)
        self.assertEqual(find_span(self.kv, 2.5), 4)
        self.assertEqual(find_span(self.kv, 3.0), 4)
        np.testing.assert_array_equal(find_spans(self.kv, [0.5, 1.5, 3.0]), [2, 3, 4])

    def test_outside(self):
        with self.assertRaises(KnotDomainError):
            find_span(self.kv, 3.5)
        with self.assertRaises(KnotDomainError):
            find_spans(self.kv, [np.nan])


class TestBasis(TestCase):
    def test_quadratic_bezier(self):
        kv = KnotVector([0, 0, 0, 1, 1, 1], 2)
        ev = eval_basis(kv, 0.5)
        assert_allclose(ev.values, [0.25, 0.5, 0.25])
        self.assertEqual(ev.span, 2)

    def test_linear_hats(self):
        kv = KnotVector.uniform(1, 2)
        ev = eval_basis(kv, 0.25, der_order=1)
        assert_allclose(ev.values, [0.5, 0.5])
        assert_allclose(ev.derivatives[1], [-2.0, 2.0])

    def test_partition_of_unity(self):
        rng = np.random.default_rng(3)
        kv = KnotVector([0, 0, 0, 0, 0.2, 0.5, 0.5, 0.9, 1, 1, 1, 1], 3)
        xis = rng.random(500)
        _, ders = eval_basis_batch(kv, xis, der_order=2)
        assert_allclose(ders[:, 0].sum(axis=1), 1.0, atol=1e-14)
        self.assertTrue(np.all(ders[:, 0] >= -1e-14))
        assert_allclose(ders[:, 1].sum(axis=1), 0.0, atol=1e-10)
        assert_allclose(ders[:, 2].sum(axis=1), 0.0, atol=1e-8)

    def test_derivatives_match_differences(self):
        kv = KnotVector([0, 0, 0, 0.3, 0.6, 1, 1, 1], 2)
        h = 1e-6
        for xi in (0.1, 0.45, 0.8):
            span, ders = eval_basis_batch(kv, [xi], der_order=1)
            _, plus = eval_basis_batch(kv, [xi + h])
            _, minus = eval_basis_batch(kv, [xi - h])
            fd = (plus[0, 0] - minus[0, 0]) / (2 * h)
            assert_allclose(ders[0, 1], fd, rtol=1e-6, atol=1e-8)

    def test_orders_above_degree_are_zero(self):
        kv = KnotVector.uniform(1, 3)
        _, ders = eval_basis_batch(kv, [0.5], der_order=3)
        assert_allclose(ders[0, 2:], 0.0)


class TestInteriorKnots(TestCase):
    def test_uniform(self):
        assert_allclose(uniform_interior_knots(4), [0.25, 0.5, 0.75])
        self.assertEqual(len(uniform_interior_knots(1)), 0)

    def test_graded(self):
        knots = graded_interior_knots(24, 0.75, 0.1)
        self.assertEqual(len(knots), 23)
        self.assertTrue(np.all(np.diff(knots) > 0.0))
        breaks = np.concatenate([[0.0], knots, [1.0]])
        spans_in_range = np.count_nonzero(breaks[1:] <= 0.1 + 1e-14)
        self.assertGreaterEqual(spans_in_range / 24, 0.7)
