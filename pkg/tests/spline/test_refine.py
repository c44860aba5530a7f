from unittest import TestCase

import numpy as np
from numpy.testing import assert_allclose

from igacontact.spline import (
    KnotVector,
    RefinementError,
    elevate_degree,
    eval_basis_batch,
    from_homogeneous,
    insert_knot,
    insert_knots,
    to_homogeneous,
)


def curve_points(kv: KnotVector, ctrl: np.ndarray, xis: np.ndarray) -> np.ndarray:
    spans, ders = eval_basis_batch(kv, xis)
    p = kv.degree
    idx = spans[:, None] - p + np.arange(p + 1)
    n = ders[:, 0] * ctrl[idx, -1]
    return np.einsum("np,npi->ni", n, ctrl[idx, :-1]) / n.sum(axis=1)[:, None]


def quarter_circle():
    kv = KnotVector([0, 0, 0, 1, 1, 1], 2)
    w = np.sqrt(0.5)
    ctrl = np.array([[1.0, 0.0, 0.0, 1.0], [1.0, 1.0, 0.0, w], [0.0, 1.0, 0.0, 1.0]])
    return kv, ctrl


class TestHomogeneous(TestCase):
    def test_round_trip(self):
        _, ctrl = quarter_circle()
        assert_allclose(from_homogeneous(to_homogeneous(ctrl)), ctrl)


class TestInsertion(TestCase):
    def setUp(self):
        self.xis = np.linspace(0.0, 1.0, 41)

    def test_circle_preserved(self):
        kv, ctrl = quarter_circle()
        new_kv, new_ctrl = insert_knot(kv, ctrl, 0.3)
        self.assertEqual(new_kv.n_basis, 4)
        pts = curve_points(new_kv, new_ctrl, self.xis)
        assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)
        assert_allclose(pts, curve_points(kv, ctrl, self.xis), atol=1e-12)

    def test_several_knots(self):
        kv, ctrl = quarter_circle()
        new_kv, new_ctrl = insert_knots(kv, ctrl, [0.75, 0.25, 0.5])
        assert_allclose(new_kv.interior_knots(), [0.25, 0.5, 0.75])
        assert_allclose(
            curve_points(new_kv, new_ctrl, self.xis),
            curve_points(kv, ctrl, self.xis),
            atol=1e-12,
        )

    def test_repeated_insertion_up_to_degree(self):
        kv, ctrl = quarter_circle()
        new_kv, new_ctrl = insert_knot(kv, ctrl, 0.5, repetitions=2)
        self.assertEqual(new_kv.multiplicity(0.5), 2)
        assert_allclose(
            curve_points(new_kv, new_ctrl, self.xis),
            curve_points(kv, ctrl, self.xis),
            atol=1e-12,
        )

    def test_errors(self):
        kv, ctrl = quarter_circle()
        with self.assertRaises(RefinementError):
            insert_knot(kv, ctrl, 0.5, repetitions=3)
        with self.assertRaises(RefinementError):
            insert_knot(kv, ctrl, 1.0)


class TestElevation(TestCase):
    def test_circle_preserved(self):
        kv, ctrl = quarter_circle()
        kv, ctrl = insert_knot(kv, ctrl, 0.4)
        xis = np.linspace(0.0, 1.0, 57)
        for steps in (1, 2, 3):
            up_kv, up_ctrl = elevate_degree(kv, ctrl, steps)
            self.assertEqual(up_kv.degree, 2 + steps)
            self.assertEqual(up_kv.multiplicity(0.4), 1 + steps)
            pts = curve_points(up_kv, up_ctrl, xis)
            assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)
            assert_allclose(pts, curve_points(kv, ctrl, xis), atol=1e-12)

    def test_invalid_steps(self):
        kv, ctrl = quarter_circle()
        with self.assertRaises(ValueError):
            elevate_degree(kv, ctrl, 0)
