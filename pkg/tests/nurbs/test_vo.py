from unittest import TestCase

import numpy as np
from numpy.testing import assert_allclose

from igacontact.continuum import element_quad_data
from igacontact.nurbs import (
    ElementKind,
    Face,
    VOConstructionError,
    VOMisuseError,
    block,
    build_vo_body,
    dof_summary,
    eval_vo_basis,
    format_dof_table,
    hollow_hemisphere,
    sphere_octant,
)


def layer_parameters(body, n, rng):
    """Random parameters inside the contact layer (last thickness span)."""
    kv3 = body.volume.knot_vectors[2]
    lo = kv3.knots[kv3.n_basis - 1]
    xis = body.volume.random_parameters(n, rng)
    xis[:, 2] = lo + (kv3.bounds[1] - lo) * rng.random(n)
    return xis


class TestVOBody(TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(5)
        self.vol = block((1.0, 1.0, 1.0), elements=(2, 3, 2), degrees=(2, 2, 1)).volume

    def test_counts(self):
        for steps, n_face in ((0, 4 * 5), (1, 6 * 8), (2, 8 * 11)):
            body = build_vo_body(self.vol, Face.XI3_MAX, steps, name="b")
            self.assertEqual(body.n_bulk, 4 * 5 * 2)
            self.assertEqual(body.n_face, n_face)
            self.assertEqual(body.control_count, 40 + n_face)
            self.assertEqual(body.surface.degrees, (2 + steps, 2 + steps))
            self.assertEqual(body.bulk_elements.size, 6)
            self.assertEqual(body.layer_elements.size, 6)
            s = dof_summary(body)
            self.assertEqual((s.interface, s.bulk, s.total), (3 * n_face, 120, 3 * n_face + 120))

    def test_partition_of_unity_and_non_negativity(self):
        for steps in (0, 1, 2):
            body = build_vo_body(self.vol, Face.XI3_MAX, steps)
            basis = body.layer_basis(layer_parameters(body, 2000, self.rng))
            self.assertLess(np.max(np.abs(basis.values.sum(axis=1) - 1.0)), 1e-12)
            self.assertGreaterEqual(basis.values.min(), -1e-14)
            assert_allclose(basis.grads.sum(axis=1), 0.0, atol=1e-10)

    def test_geometry_preserved(self):
        for steps in (1, 2):
            body = build_vo_body(self.vol, Face.XI3_MAX, steps)
            xis = body.volume.random_parameters(50, self.rng)
            xis[:25] = layer_parameters(body, 25, self.rng)
            ref, _ = body.volume.evaluate(xis)
            assert_allclose(body.evaluate(xis), ref, atol=1e-10)

    def test_displacement_interpolated(self):
        body = build_vo_body(self.vol, Face.XI3_MAX, 1)
        shift = np.array([0.1, -0.2, 0.3])
        u = np.tile(shift, (body.control_count, 1))
        xis = layer_parameters(body, 20, self.rng)
        assert_allclose(body.evaluate(xis, u) - body.evaluate(xis), np.tile(shift, (20, 1)), atol=1e-12)

    def test_other_contact_face(self):
        body = build_vo_body(self.vol, Face.XI3_MIN, 1)
        top = body.points[body.face_nodes(Face.XI3_MIN)]
        assert_allclose(top[:, 2], 0.0, atol=1e-12)
        self.assertEqual(len(top), body.n_face)
        side = body.points[body.face_nodes(Face.XI1_MIN)]
        assert_allclose(side[:, 0], 0.0, atol=1e-12)
        far = body.points[body.face_nodes(Face.XI3_MAX)]
        assert_allclose(far[:, 2], 1.0, atol=1e-12)

    def test_face_nodes_cover_elevated_edge(self):
        body = build_vo_body(self.vol, Face.XI3_MAX, 2)
        nodes = body.face_nodes(Face.XI2_MIN)
        self.assertTrue(np.all(np.abs(body.points[nodes, 1]) < 1e-12))
        on_plane = np.flatnonzero(np.abs(body.points[:, 1]) < 1e-12)
        np.testing.assert_array_equal(np.sort(nodes), on_plane)

    def test_eval_vo_basis(self):
        body = build_vo_body(self.vol, Face.XI3_MAX, 1)
        layer = int(body.layer_elements.ids[0])
        self.assertEqual(body.element_kind(layer), ElementKind.LAYER)
        ev = eval_vo_basis(body, layer, (0.1, 0.1, 0.9))
        self.assertAlmostEqual(ev.values.sum(), 1.0, places=12)
        bulk = int(body.bulk_elements.ids[0])
        with self.assertRaises(VOMisuseError):
            eval_vo_basis(body, bulk, (0.1, 0.1, 0.1))

    def test_negative_steps(self):
        with self.assertRaises(ValueError):
            build_vo_body(self.vol, Face.XI3_MAX, -1)

    def test_single_element_through_thickness(self):
        vol = block((1.0, 1.0, 1.0), elements=(2, 2, 1), degrees=(2, 2, 1)).volume
        body = build_vo_body(vol, Face.XI3_MAX, 1)
        self.assertEqual(body.bulk_elements.size, 0)
        self.assertEqual(body.bulk_elements.conn.shape, (0, 18))
        self.assertEqual(body.layer_elements.size, 4)
        self.assertEqual(body.n_bulk, 16)
        self.assertEqual(body.n_face, 36)
        basis = body.layer_basis(layer_parameters(body, 200, self.rng))
        self.assertLess(np.max(np.abs(basis.values.sum(axis=1) - 1.0)), 1e-12)
        quad = element_quad_data(body, body.layer_elements)
        self.assertAlmostEqual(quad.weights.sum(), 1.0, places=12)


class TestCurvedVO(TestCase):
    def test_collapsed_face_rejected(self):
        vol = sphere_octant(0.8, 1.0, (2, 2, 1)).volume
        with self.assertRaises(VOConstructionError):
            build_vo_body(vol, Face.XI2_MAX, 1)

    def test_sphere_surface_stays_exact(self):
        center = np.array([0.0, 0.0, 1.0])
        vol = sphere_octant(0.8, 1.0, (4, 4, 2), center=center).volume
        rng = np.random.default_rng(2)
        for steps in (1, 2):
            body = build_vo_body(vol, Face.XI3_MAX, steps)
            xis = layer_parameters(body, 50, rng)
            xis[:, 2] = 1.0
            r = np.linalg.norm(body.evaluate(xis) - center, axis=1)
            assert_allclose(r, 1.0, atol=1e-10)

    def test_hemisphere_layer_basis(self):
        vol = hollow_hemisphere(2.0 / 3.0, 1.0, (1.0, 1.0, 3.0), (4, 4, 2)).volume
        body = build_vo_body(vol, Face.XI3_MAX, 2)
        basis = body.layer_basis(layer_parameters(body, 1000, np.random.default_rng(4)))
        self.assertLess(np.max(np.abs(basis.values.sum(axis=1) - 1.0)), 1e-12)
        self.assertGreaterEqual(basis.values.min(), -1e-14)


class TestDofTable(TestCase):
    def test_format(self):
        vol = block((1.0, 1.0, 1.0), elements=(1, 1, 1), degrees=(1, 1, 1)).volume
        rows = [[dof_summary(build_vo_body(vol, Face.XI3_MAX, s, name="cube"))] for s in (0, 1)]
        text = format_dof_table(rows, ["N1", "N1-N1.1"])
        lines = text.splitlines()
        self.assertEqual(len(lines), 4)
        self.assertIn("cube interface", lines[0])
        self.assertTrue(lines[2].split()[-1] == "24")
        self.assertTrue(lines[3].split()[-1] == str(3 * 4 + 3 * 9))

    def test_label_mismatch(self):
        with self.assertRaises(ValueError):
            format_dof_table([[]], [])
