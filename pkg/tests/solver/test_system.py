from types import SimpleNamespace
from unittest import TestCase

import numpy as np
import scipy.sparse as sp
from numpy.testing import assert_allclose

from igacontact.continuum import lame_from_engineering
from igacontact.nurbs import Face, block, build_vo_body
from igacontact.solver import (
    BodyModel,
    ConstraintSet,
    CutbackExhausted,
    DofMap,
    LinearSolveError,
    LoadProgram,
    Model,
    Motion,
    NewtonSettings,
    RunHooks,
    Stage,
    assemble,
    force_reference,
    linear_solve,
    run_load_program,
    set_torque,
)


def cube(name="cube"):
    vol = block((1.0, 1.0, 1.0), elements=(1, 1, 2), degrees=(1, 1, 1)).volume
    return build_vo_body(vol, Face.XI3_MAX, 0, name=name)


def compression_model():
    body = cube()
    mat = lame_from_engineering(100.0, 0.3)
    constraints = [
        ConstraintSet("bottom", 0, body.face_nodes(Face.XI3_MIN), (2,)),
        ConstraintSet("sym_x", 0, body.face_nodes(Face.XI1_MIN), (0,)),
        ConstraintSet("sym_y", 0, body.face_nodes(Face.XI2_MIN), (1,)),
        ConstraintSet("top", 0, body.face_nodes(Face.XI3_MAX), (2,)),
    ]
    return Model([BodyModel.build(body, mat)], [], constraints)


class CountingHooks(RunHooks):
    def __init__(self):
        self.steps = []
        self.aborted = False

    def on_step(self, record, u, system):
        self.steps.append(record.step)

    def on_abort(self, history, error):
        self.aborted = True


class TestDofMap(TestCase):
    def test_offsets(self):
        a, b = cube("a"), cube("b")
        dofs = DofMap([a, b])
        self.assertEqual(dofs.n_dofs, 6 * a.control_count)
        self.assertEqual(dofs.cp_offset(1), a.control_count)
        self.assertEqual(dofs.body_index(b), 1)
        np.testing.assert_array_equal(dofs.global_dofs(1, [0, 2], (2,)), [[3 * 12 + 2], [3 * 14 + 2]])
        dofs.constrain(0, np.array([1]), (0, 1))
        self.assertEqual(int(dofs.dirichlet.sum()), 2)
        u = np.arange(dofs.n_dofs, dtype=float)
        parts = dofs.split(u)
        self.assertEqual(parts[1].shape, (12, 3))
        assert_allclose(dofs.join(parts), u)
        with self.assertRaises(ValueError):
            dofs.body_index(cube("c"))


class TestLinearSolve(TestCase):
    def test_solve(self):
        m = sp.csr_matrix(np.array([[4.0, 1.0], [1.0, 3.0]]))
        assert_allclose(m @ linear_solve(m, np.array([1.0, 2.0])), [1.0, 2.0])

    def test_singular(self):
        m = sp.csr_matrix(np.array([[1.0, 1.0], [1.0, 1.0]]))
        with self.assertRaises(LinearSolveError):
            linear_solve(m, np.array([1.0, 0.0]))


class TestAssembly(TestCase):
    def test_tangent_matches_residual(self):
        model = compression_model()
        rng = np.random.default_rng(0)
        u = 0.01 * rng.standard_normal(model.n_dofs)
        system = assemble(model, u, model.new_histories())
        k = system.matrix.toarray()
        h = 1e-7
        for dof in (0, 7, model.n_dofs - 1):
            du = np.zeros(model.n_dofs)
            du[dof] = h
            rp = assemble(model, u + du, model.new_histories(), tangent=False).residual
            rm = assemble(model, u - du, model.new_histories(), tangent=False).residual
            assert_allclose(k[:, dof], (rp - rm) / (2 * h), rtol=1e-5, atol=1e-6 * np.abs(k).max())

    def test_parallel_assembly_is_identical(self):
        model = compression_model()
        u = 0.01 * np.random.default_rng(1).standard_normal(model.n_dofs)
        serial = assemble(model, u, [])
        model.parallel = True
        parallel = assemble(model, u, [])
        assert_allclose(parallel.residual, serial.residual, rtol=0, atol=0)

    def test_set_torque(self):
        model = compression_model()
        top = model.constraint("top")
        body = model.bodies[0].body
        x = body.points[top.nodes]
        center = np.array([0.5, 0.5, 1.0])
        arm = x - center
        forces = np.cross([0.0, 0.0, 1.0], arm)
        residual = np.zeros(model.n_dofs)
        residual[model.dofs.global_dofs(0, top.nodes)] = forces
        torque = set_torque(model, SimpleNamespace(residual=residual), np.zeros(model.n_dofs), "top", center)
        assert_allclose(torque, [0.0, 0.0, np.sum(arm[:, 0] ** 2 + arm[:, 1] ** 2)], atol=1e-14)

    def test_duplicate_set_names(self):
        body = cube()
        with self.assertRaises(ValueError):
            Model(
                [BodyModel.build(body, lame_from_engineering(1.0, 0.3))],
                [],
                [ConstraintSet("a", 0, np.arange(2)), ConstraintSet("a", 0, np.arange(2, 4))],
            )


class TestLoadStepping(TestCase):
    def test_uniaxial_compression(self):
        model = compression_model()
        program = LoadProgram([Stage("press", 2, {"top": Motion(translation=(0.0, 0.0, -0.01))})])
        hooks = CountingHooks()
        history = run_load_program(model, program, hooks=hooks, torque_centers={"top": (0.5, 0.5, 1.0)})
        self.assertEqual(hooks.steps, [1, 2])
        self.assertEqual(history.n_steps, 2)
        last = history.records[-1]
        self.assertAlmostEqual(last.progress, 1.0)
        self.assertLess(last.residual, 1e-6)
        # nominal stress close to E times the strain
        self.assertAlmostEqual(last.reactions["top"][2], -1.0, delta=0.05)
        assert_allclose(last.reactions["bottom"][2], -last.reactions["top"][2], rtol=1e-6)
        pz = history.series("top", 2)
        self.assertLess(pz[1], pz[0])
        u = model.dofs.split(history.u)[0]
        top = model.constraint("top").nodes
        assert_allclose(u[top, 2], -0.01, atol=1e-14)
        # lateral expansion
        self.assertTrue(np.all(u[model.bodies[0].body.face_nodes(Face.XI1_MAX), 0] > 0.0))
        self.assertEqual(last.torques["top"].shape, (3,))

    def test_cutbacks_exhausted(self):
        model = compression_model()
        program = LoadProgram([Stage("press", 1, {"top": Motion(translation=(0.0, 0.0, -0.2))})])
        hooks = CountingHooks()
        settings = NewtonSettings(rel_tol=1e-14, abs_tol=1e-300, max_iterations=1, max_cutbacks=1)
        with self.assertRaises(CutbackExhausted) as ctx:
            run_load_program(model, program, settings, hooks)
        self.assertTrue(ctx.exception.history.aborted)
        self.assertEqual(ctx.exception.history.n_steps, 0)
        self.assertTrue(hooks.aborted)


class TestForceReference(TestCase):
    def test_reactions_enter_reference(self):
        dirichlet = np.array([True, False, False, True])
        system = SimpleNamespace(
            f_ext=np.zeros(4), f_c=np.zeros(4), residual=np.array([3.0, 1e-9, 0.0, 4.0])
        )
        self.assertAlmostEqual(force_reference(system, dirichlet, 1e-12), 5.0)
        system.f_c = np.array([0.0, 6.0, 8.0, 0.0])
        self.assertAlmostEqual(force_reference(system, dirichlet, 1e-12), 10.0)
        quiet = SimpleNamespace(f_ext=np.zeros(2), f_c=np.zeros(2), residual=np.zeros(2))
        self.assertEqual(force_reference(quiet, np.array([True, False]), 1e-12), 1e-12)
