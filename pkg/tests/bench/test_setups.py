from unittest import TestCase

import numpy as np

from igacontact.bench import (
    apply_overrides,
    build_body,
    build_geometry,
    build_program,
    setup_benchmark,
    setup_hertz,
    setup_ironing,
    setup_patch_test,
    setup_twisting,
)
from igacontact.config import BenchmarkKind, ConfigError, Discretization
from igacontact.nurbs import dof_summary

N2 = Discretization(2)
N2_1 = Discretization(2, 1)
N2_2 = Discretization(2, 2)


def dofs(cfg):
    return [dof_summary(build_body(spec)) for spec in cfg.bodies]


class TestDofTables(TestCase):
    def check(self, cfg, expected):
        summaries = dofs(cfg)
        self.assertEqual([(s.interface, s.bulk) for s in summaries], expected)

    def test_hertz_m1(self):
        self.check(setup_hertz(1, N2), [(588, 14112)])
        self.check(setup_hertz(1, N2_1), [(2028, 14112)])
        self.check(setup_hertz(1, N2_2), [(4332, 14112)])
        self.assertEqual(sum(s.total for s in dofs(setup_hertz(1, N2))), 14700)

    def test_hertz_m2(self):
        self.check(setup_hertz(2, N2), [(2028, 48672)])
        self.check(setup_hertz(2, N2_1), [(7500, 48672)])
        self.check(setup_hertz(2, N2_2), [(16428, 48672)])

    def test_hertz_m3(self):
        self.check(setup_hertz(3, N2), [(7500, 180000)])
        self.check(setup_hertz(3, N2_1), [(28812, 180000)])
        self.check(setup_hertz(3, N2_2), [(63948, 180000)])

    def test_ironing_m1(self):
        table = {
            "N2": ([(147, 441), (252, 756)], 1596),
            "N4": ([(243, 729), (384, 1152)], 2508),
            "N5": ([(300, 900), (459, 1377)], 3036),
            "N2-N2.1": ([(432, 441), (780, 756)], 2409),
            "N2-N2.2": ([(867, 441), (1596, 756)], 3660),
        }
        for tag, (expected, total) in table.items():
            with self.subTest(tag):
                cfg = setup_ironing(1, Discretization.parse(tag))
                summaries = dofs(cfg)
                self.assertEqual([(s.interface, s.bulk) for s in summaries], expected)
                self.assertEqual(sum(s.total for s in summaries), total)

    def test_twisting(self):
        table = {
            (1, "N2"): [(147, 294), (48, 96)],
            (1, "N2-N2.1"): [(363, 294), (108, 96)],
            (1, "N2-N2.2"): [(675, 294), (192, 96)],
            (2, "N2"): [(363, 1089), (108, 432)],
            (2, "N2-N2.1"): [(1083, 1089), (300, 432)],
            (2, "N2-N2.2"): [(2187, 1089), (588, 432)],
            (3, "N2"): [(1083, 4332), (300, 2400)],
            (3, "N2-N2.1"): [(3675, 4332), (972, 2400)],
            (3, "N2-N2.2"): [(7803, 4332), (2028, 2400)],
        }
        for (level, tag), expected in table.items():
            with self.subTest(level=level, disc=tag):
                self.check(setup_twisting(level, Discretization.parse(tag)), expected)


class TestSetups(TestCase):
    def test_patch_test(self):
        cfg = setup_patch_test(1)
        lower, upper = cfg.bodies
        self.assertEqual(lower.elements, (3, 3, 3))
        self.assertEqual(upper.elements, (2, 2, 2))
        self.assertEqual(cfg.contacts[0].slave, "upper")
        self.assertAlmostEqual(cfg.contacts[0].eps_N, 100.0)
        self.assertEqual(cfg.contacts[0].n_gp, 0)
        self.assertEqual(setup_patch_test(1, n_gp=200).contacts[0].n_gp, 200)
        self.assertEqual(setup_patch_test(3).bodies[1].elements, (11, 11, 11))

    def test_patch_test_step_scale(self):
        self.assertEqual(setup_patch_test(1).stages[0].steps, 10)
        self.assertEqual(setup_patch_test(1, step_scale=0.2).stages[0].steps, 2)
        self.assertAlmostEqual(setup_patch_test(1, step_scale=0.2).meta.step_scale, 0.2)
        cfg = setup_benchmark(BenchmarkKind.PATCH_TEST, 1, N2, step_scale=0.2)
        self.assertEqual(cfg.stages[0].steps, 2)
        out = apply_overrides(setup_patch_test(1), step_scale=0.5)
        self.assertEqual(out.stages[0].steps, 5)

    def test_hertz(self):
        cfg = setup_hertz(1)
        self.assertAlmostEqual(cfg.contacts[0].eps_N, 5000.0)
        self.assertIsNotNone(cfg.contacts[0].plane)
        self.assertEqual(cfg.bodies[0].elements, (12, 12, 24))
        self.assertEqual(setup_hertz(2).bodies[0].elements, (24, 24, 24))

    def test_hertz_grading(self):
        volume = build_geometry(setup_hertz(1).bodies[0]).volume
        for direction in (0, 1):
            kv = volume.knot_vectors[direction]
            lo, hi = kv.bounds
            upper = kv.unique_knots[1:]
            in_corner = np.count_nonzero(upper <= lo + 0.1 * (hi - lo) + 1e-12)
            self.assertGreaterEqual(in_corner / kv.n_spans, 0.7)

    def test_ironing(self):
        cfg = setup_ironing(1)
        self.assertEqual([b.material.E for b in cfg.bodies], [100.0, 1.0])
        self.assertEqual([s.steps for s in cfg.stages], [70, 540])
        self.assertAlmostEqual(cfg.contacts[0].mu_f, 0.1)
        program = build_program(cfg)
        self.assertEqual(program.total_steps, 610)
        half = setup_ironing(1, step_scale=0.5)
        self.assertEqual([s.steps for s in half.stages], [35, 270])

    def test_twisting(self):
        self.assertEqual(
            [setup_twisting(k).contacts[0].eps_N for k in (1, 2, 3)], [100.0, 200.0, 400.0]
        )
        frictionless = setup_twisting(1)
        self.assertEqual(frictionless.contacts[0].mu_f, 0.0)
        self.assertFalse(any(s.friction for s in frictionless.stages))
        frictional = setup_twisting(1, friction=True)
        self.assertAlmostEqual(frictional.contacts[0].mu_f, 0.5)
        self.assertEqual([s.friction for s in frictional.stages], [False, True])
        self.assertEqual(frictional.stages[1].motions[0].angle_deg, 180.0)

    def test_invalid_mesh_level(self):
        for setup in (setup_patch_test, setup_hertz, setup_ironing, setup_twisting):
            with self.subTest(setup.__name__):
                with self.assertRaises(ConfigError):
                    setup(7)

    def test_setup_benchmark(self):
        cfg = setup_benchmark(BenchmarkKind.TWISTING, 2, N2_1, friction=True)
        self.assertEqual(cfg.meta.mesh_level, 2)
        self.assertEqual(cfg.bodies[0].discretization, N2_1)
        self.assertGreater(cfg.contacts[0].mu_f, 0.0)
        with self.assertRaises(ConfigError):
            setup_benchmark(BenchmarkKind.PATCH_TEST, 1, N2_1)
        patch = setup_benchmark(BenchmarkKind.PATCH_TEST, 1, Discretization(3))
        self.assertEqual(patch.bodies[0].degrees, (3, 3, 3))


class TestOverrides(TestCase):
    def test_benchmark_rebuilt(self):
        cfg = setup_twisting(1, friction=True)
        cfg.solver.max_iterations = 7
        cfg.solver.parallel = True
        out = apply_overrides(cfg, mesh_level=2, disc=N2_2, step_scale=0.5, serial=True)
        self.assertEqual(out.meta.mesh_level, 2)
        self.assertEqual(out.bodies[1].discretization, N2_2)
        self.assertEqual([s.steps for s in out.stages], [10, 90])
        self.assertGreater(out.contacts[0].mu_f, 0.0)
        self.assertEqual(out.solver.max_iterations, 7)
        self.assertFalse(out.solver.parallel)
        self.assertEqual(cfg.meta.mesh_level, 1)

    def test_custom(self):
        cfg = setup_patch_test(1)
        cfg.meta.benchmark = BenchmarkKind.CUSTOM
        out = apply_overrides(cfg, disc=Discretization(3), n_gp=9, step_scale=2.0)
        self.assertEqual(out.bodies[0].degrees, (3, 3, 2))
        self.assertEqual(out.bodies[1].discretization, Discretization(3))
        self.assertEqual(out.contacts[0].n_gp, 9)
        self.assertEqual(out.stages[0].steps, 20)
        self.assertEqual(cfg.stages[0].steps, 10)
        with self.assertRaises(ConfigError):
            apply_overrides(cfg, mesh_level=2)
