from unittest import TestCase

import numpy as np
from numpy.testing import assert_allclose
from scipy.sparse import coo_matrix

from igacontact.contact import (
    AreaMeasure,
    ContactPair,
    FrictionStatus,
    NurbsMasterSurface,
    PenaltyParams,
    PenaltyScaling,
    RigidPlane,
    min_element_edge,
    scaled_penalty,
)
from igacontact.nurbs import Face, block, build_vo_body

OVERLAP = 0.01


def slave_block(steps=1):
    vol = block((1.0, 1.0, 0.5), origin=(0.0, 0.0, -OVERLAP), elements=(2, 2, 1), degrees=(2, 2, 1)).volume
    return build_vo_body(vol, Face.XI3_MIN, steps, name="slave")


def dense(coo, n):
    rows, cols, data = coo
    return coo_matrix((data, (rows, cols)), shape=(n, n)).toarray()


class TestPenaltyScaling(TestCase):
    def test_scaled(self):
        body = slave_block()
        h = min_element_edge(body)
        self.assertAlmostEqual(h, 0.5)
        p = scaled_penalty(10.0, 5.0, 0.3, PenaltyScaling.MIN_ELEMENT_SIZE, h)
        self.assertAlmostEqual(p.eps_N, 20.0, places=10)
        self.assertAlmostEqual(p.eps_T, 10.0, places=10)
        self.assertEqual(p.mu_f, 0.3)
        p = scaled_penalty(10.0, 5.0, 0.3, PenaltyScaling.NONE, h)
        self.assertEqual(p.eps_N, 10.0)


class TestRigidPlanePair(TestCase):
    def setUp(self):
        self.body = slave_block()
        plane = RigidPlane((0.0, 0.0, 0.0), (0.0, 0.0, 1.0))
        self.eps = 100.0
        self.pair = ContactPair(self.body, plane, PenaltyParams(self.eps, self.eps, 0.3), n_gp=4)

    def test_default_point_count(self):
        pair = ContactPair(self.body, self.pair.master, PenaltyParams(1.0))
        self.assertEqual(pair.n_gp, 16)
        self.assertEqual(pair.n_points, 4 * 256)

    def test_uniform_penetration(self):
        ev = self.pair.evaluate(None)
        self.assertEqual(ev.n_active, self.pair.n_points)
        assert_allclose(ev.gap, -OVERLAP, atol=1e-14)
        assert_allclose(ev.pressure, self.eps * OVERLAP)
        assert_allclose(ev.slave_force.sum(axis=0), [0.0, 0.0, -self.eps * OVERLAP], atol=1e-12)
        self.assertAlmostEqual(ev.max_penetration, OVERLAP)
        self.assertIsNone(ev.master_force)
        # bulk control points carry no contact force
        assert_allclose(ev.slave_force[: self.body.n_bulk], 0.0)

    def test_separated(self):
        u = np.zeros((self.body.control_count, 3))
        u[:, 2] = 0.1
        ev = self.pair.evaluate(u)
        self.assertEqual(ev.n_active, 0)
        assert_allclose(ev.slave_force, 0.0)
        self.assertEqual(len(ev.tangent[0]), 0)

    def _history(self, shift):
        ev = self.pair.evaluate(None, tangent=False)
        history = self.pair.commit(self.pair.new_history(), ev, friction=True)
        history.xi_slip[:] = history.xi_slip - [shift, 0.0]
        return history

    def _check_tangent(self, history, friction):
        n = self.body.control_count
        rng = np.random.default_rng(7)
        u = 2e-4 * rng.standard_normal((n, 3))
        ev = self.pair.evaluate(u, history=history, friction=friction)
        k = dense(ev.tangent, 3 * n)
        scale = np.abs(k).max()
        h = 1e-7
        nodes = np.unique(self.pair.quad.indices)
        for dof in (3 * nodes[0], 3 * nodes[5] + 1, 3 * nodes[-1] + 2):
            du = np.zeros(3 * n)
            du[dof] = h
            fp = self.pair.evaluate(u + du.reshape(n, 3), history=history, friction=friction, tangent=False)
            fm = self.pair.evaluate(u - du.reshape(n, 3), history=history, friction=friction, tangent=False)
            fd = (fp.slave_force - fm.slave_force).ravel() / (2 * h)
            assert_allclose(k[:, dof], fd, rtol=1e-5, atol=1e-6 * scale)
        return ev

    def test_frictionless_tangent(self):
        ev = self._check_tangent(None, False)
        self.assertTrue(np.all(ev.status[ev.active] == FrictionStatus.FREE))

    def test_stick_tangent(self):
        ev = self._check_tangent(self._history(1e-4), True)
        self.assertEqual(ev.n_stick, ev.n_active)

    def test_slip_tangent(self):
        ev = self._check_tangent(self._history(1e-2), True)
        self.assertEqual(ev.n_slip, ev.n_active)
        assert_allclose(ev.tangential[ev.active], 0.3 * ev.pressure[ev.active], rtol=1e-12)

    def test_new_points_stick_first(self):
        ev = self.pair.evaluate(None, history=self.pair.new_history(), friction=True)
        self.assertTrue(np.all(ev.status[ev.active] == FrictionStatus.FREE))
        history = self.pair.commit(self.pair.new_history(), ev, friction=True)
        self.assertTrue(np.all(history.status[ev.active] == FrictionStatus.STICK))


class TestDeformableMasterPair(TestCase):
    def setUp(self):
        self.slave = slave_block()
        master_vol = block((2.0, 2.0, 1.0), origin=(-0.5, -0.5, -1.0), elements=(3, 3, 1), degrees=(2, 2, 1)).volume
        self.master = build_vo_body(master_vol, Face.XI3_MAX, 0, name="master")
        self.n_s = self.slave.control_count
        self.n_m = self.master.control_count

    def _pair(self, area_measure):
        pair = ContactPair(
            self.slave, NurbsMasterSurface(self.master), PenaltyParams(50.0), n_gp=3, area_measure=area_measure
        )
        pair.bind_dofs(0, self.n_s)
        return pair

    def _residual(self, pair, u):
        ev = pair.evaluate(u[: self.n_s], u[self.n_s :], tangent=False)
        return np.concatenate([ev.slave_force, ev.master_force]).ravel()

    def test_forces_balance(self):
        ev = self._pair(AreaMeasure.REFERENCE).evaluate(None, None)
        assert_allclose(ev.slave_force.sum(axis=0) + ev.master_force.sum(axis=0), 0.0, atol=1e-12)
        assert_allclose(ev.slave_force.sum(axis=0), [0.0, 0.0, -50.0 * OVERLAP], atol=1e-10)

    def test_tangent(self):
        for measure in (AreaMeasure.REFERENCE, AreaMeasure.CURRENT):
            pair = self._pair(measure)
            n = self.n_s + self.n_m
            rng = np.random.default_rng(2)
            u = 1e-3 * rng.standard_normal((n, 3))
            # flat master, closest points stay exact
            u[self.n_s :] = 0.0
            ev = pair.evaluate(u[: self.n_s], u[self.n_s :])
            k = dense(ev.tangent, 3 * n)
            scale = np.abs(k).max()
            h = 1e-5
            slave_node = int(pair.quad.indices[0, 0])
            master_node = self.n_s + self.master.n_bulk + 5
            for dof in (3 * slave_node + 2, 3 * slave_node, 3 * master_node + 2, 3 * master_node + 1):
                du = np.zeros(3 * n)
                du[dof] = h
                fd = (self._residual(pair, u + du.reshape(n, 3)) - self._residual(pair, u - du.reshape(n, 3))) / (2 * h)
                assert_allclose(k[:, dof], fd, rtol=1e-5, atol=1e-6 * scale)

    def test_points_beside_master_are_not_projected(self):
        pair = self._pair(AreaMeasure.REFERENCE)
        ev = pair.evaluate(None, None)
        self.assertEqual(ev.n_unprojected, 0)
        u = np.zeros((self.n_s, 3))
        u[:, 0] = 5.0
        ev = pair.evaluate(u, None)
        self.assertEqual(ev.n_unprojected, pair.n_points)
        self.assertEqual(ev.n_active, 0)
        assert_allclose(ev.slave_force, 0.0)
