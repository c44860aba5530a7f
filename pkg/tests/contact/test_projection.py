from unittest import TestCase

import numpy as np
from numpy.testing import assert_allclose

from igacontact.contact import (
    NurbsMasterSurface,
    ProjectionFailure,
    RigidPlane,
    normal_gap,
    project_closest_point,
    project_points,
)
from igacontact.nurbs import Face, block, build_vo_body, sphere_octant


class TestRigidPlane(TestCase):
    def test_projection(self):
        plane = RigidPlane((0.0, 0.0, 1.0), (0.0, 0.0, 2.0))
        res = project_closest_point((0.3, 0.2, 1.5), plane)
        self.assertTrue(res.converged)
        assert_allclose(res.x_bar, [0.3, 0.2, 1.0], atol=1e-14)
        assert_allclose(res.n_bar, [0.0, 0.0, 1.0])
        self.assertAlmostEqual(res.g_N, 0.5)
        self.assertAlmostEqual(normal_gap((0.0, 0.0, 0.9), res), -0.1)

    def test_frame_is_orthonormal(self):
        plane = RigidPlane((1.0, 2.0, 3.0), (1.0, 1.0, 0.0))
        frame = np.vstack([plane.frame, plane.normal])
        assert_allclose(frame @ frame.T, np.eye(3), atol=1e-14)
        self.assertGreater(np.linalg.det(frame), 0.0)

    def test_zero_normal(self):
        with self.assertRaises(ValueError):
            RigidPlane((0.0, 0.0, 0.0), (0.0, 0.0, 0.0))


class TestNurbsProjection(TestCase):
    def setUp(self):
        vol = sphere_octant(0.8, 1.0, (4, 4, 1)).volume
        self.master = NurbsMasterSurface(build_vo_body(vol, Face.XI3_MAX, 0, name="shell"))
        rng = np.random.default_rng(3)
        d = np.abs(rng.standard_normal((30, 3)))
        d[:, 2] *= -1.0
        self.dirs = d / np.linalg.norm(d, axis=1)[:, None]

    def test_points_outside_and_inside(self):
        for radius in (1.2, 0.95):
            batch = project_points(self.master, radius * self.dirs)
            self.assertTrue(np.all(batch.converged))
            assert_allclose(batch.kin.x, self.dirs, atol=1e-9)
            assert_allclose(batch.gap, radius - 1.0, atol=1e-9)
            assert_allclose(batch.kin.normal, self.dirs, atol=1e-8)

    def test_warm_start(self):
        cold = project_points(self.master, 1.1 * self.dirs)
        warm = project_points(self.master, 1.1 * self.dirs, seeds=cold.xi)
        assert_allclose(warm.xi, cold.xi, atol=1e-10)
        self.assertLessEqual(warm.iterations.max(), 2)

    def test_displaced_master(self):
        u = np.zeros((self.master.body.control_count, 3))
        u[:, 2] = 0.1
        batch = project_points(self.master, 1.2 * self.dirs + [0.0, 0.0, 0.1], u)
        assert_allclose(batch.gap, 0.2, atol=1e-9)

    def test_unconverged_points_flagged(self):
        batch = project_points(self.master, 1.1 * self.dirs, max_iter=0)
        self.assertFalse(np.any(batch.converged))
        err = ProjectionFailure(np.array([0.0, 0.0, 5.0]), 50)
        self.assertIn("50 iterations", str(err))


class TestKinkedMaster(TestCase):
    """Bilinear master with a ridge along x = 0.5, 0.1 above the flanks."""

    def setUp(self):
        vol = block((1.0, 1.0, 1.0), elements=(2, 1, 1), degrees=(1, 1, 1)).volume
        self.master = NurbsMasterSurface(build_vo_body(vol, Face.XI3_MAX, 0, name="ridge"))
        body = self.master.body
        self.u = np.zeros((body.control_count, 3))
        ridge = np.flatnonzero(np.isclose(body.points[:, 0], 0.5) & np.isclose(body.points[:, 2], 1.0))
        self.assertEqual(len(ridge), 2)
        self.u[ridge, 2] = 0.1

    def test_kinks(self):
        kinks = self.master.kinks()
        self.assertEqual(sorted(k.size for k in kinks), [0, 1])
        self.assertEqual(np.concatenate(kinks).tolist(), [0.5])

    def test_point_above_ridge(self):
        for seed in (None, (0.1, 0.5), (0.9, 0.5)):
            res = project_closest_point((0.5, 0.5, 1.5), self.master, seed=seed, u=self.u)
            self.assertTrue(res.converged)
            assert_allclose(res.x_bar, [0.5, 0.5, 1.1], atol=1e-10)

    def test_point_above_flank(self):
        res = project_closest_point((0.2, 0.3, 1.5), self.master, u=self.u)
        self.assertTrue(res.converged)
        self.assertAlmostEqual(res.x_bar[2], 1.0 + 0.2 * res.x_bar[0], places=10)
        self.assertLess(res.x_bar[0], 0.5)
        # foot point of the left flank plane z = 1 + 0.2 x
        d = np.array([0.2, 0.0, -1.0]) / np.sqrt(1.04)
        expected = np.array([0.2, 0.3, 1.5]) - ((np.array([0.2, 0.3, 1.5]) @ d + 1.0 / np.sqrt(1.04)) * d)
        assert_allclose(res.x_bar, expected, atol=1e-10)
