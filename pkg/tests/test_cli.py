import io
import json
import os
from contextlib import redirect_stdout
from unittest.mock import patch

from pyfakefs.fake_filesystem_unittest import TestCase

from igacontact.bench import case_name, setup_ironing
from igacontact.bench.metrics import HISTORY_FILE_NAME, METRICS_FILE_NAME
from igacontact.cli import default_reference, dof_table, main, sweep_table
from igacontact.config import BenchmarkKind, Discretization, load_config


def run_main(argv):
    out = io.StringIO()
    with patch("igacontact.cli.init_logger"), redirect_stdout(out):
        code = main(argv)
    return code, out.getvalue()


class TestCommands(TestCase):
    def setUp(self):
        self.setUpPyfakefs()

    def test_setup(self):
        code, _ = run_main(
            ["setup", "ironing", "--disc", "N2-N2.1", "--step-scale", "0.5", "-o", "/cfg/iron.json"]
        )
        self.assertEqual(code, 0)
        cfg = load_config("/cfg/iron.json")
        self.assertEqual(cfg.meta.benchmark, BenchmarkKind.IRONING)
        self.assertEqual(cfg.bodies[0].discretization, Discretization(2, 1))
        self.assertEqual([s.steps for s in cfg.stages], [35, 270])

    def test_setup_invalid_patch_discretization(self):
        code, _ = run_main(["setup", "patch_test", "--disc", "N2-N2.1", "-o", "/cfg/p.json"])
        self.assertEqual(code, 2)
        self.assertFalse(os.path.exists("/cfg/p.json"))

    def test_dofs(self):
        run_main(["setup", "twisting", "-o", "/cfg/twist.json"])
        code, text = run_main(["dofs", "/cfg/twist.json", "--disc", "N2", "N2-N2.2"])
        self.assertEqual(code, 0)
        lines = text.splitlines()
        self.assertIn("hemisphere interface", lines[0])
        self.assertEqual(lines[2].split()[0], "N2")
        self.assertEqual(lines[2].split()[-1], "585")
        self.assertEqual(lines[3].split()[-1], "1257")

    def test_missing_config(self):
        code, _ = run_main(["run", "/cfg/none.json"])
        self.assertEqual(code, 2)

    def test_run_and_metrics(self):
        run_main(["setup", "patch_test", "--disc", "N2", "-o", "/cfg/patch.json"])
        code, _ = run_main(
            ["run", "/cfg/patch.json", "--step-scale", "0.2", "-o", "/runs", "--serial"]
        )
        self.assertEqual(code, 0)
        run_dir = "/runs/patch_test_m1_N2"
        with open(os.path.join(run_dir, HISTORY_FILE_NAME)) as f:
            self.assertEqual(len(f.read().splitlines()), 3)
        with open(os.path.join(run_dir, METRICS_FILE_NAME)) as f:
            summary = json.load(f)
        self.assertEqual(summary["status"], "completed")
        self.assertAlmostEqual(summary["metrics"]["values"]["mean_pressure"], 1.0, delta=0.02)
        self.assertTrue(os.path.isfile(os.path.join(run_dir, "run.log")))
        code, text = run_main(["metrics", run_dir])
        self.assertEqual(code, 0)
        self.assertIn("P_z", json.loads(text))


class TestSweepTable(TestCase):
    def setUp(self):
        self.cases = [
            setup_ironing(1, Discretization(2)),
            setup_ironing(1, Discretization(2, 1)),
            setup_ironing(1, Discretization(2, 2)),
        ]
        self.names = [case_name(c) for c in self.cases]

    def results(self, amplitudes, torques):
        return {
            name: {
                "amplitudes": {"P_z": a, "P_x": 2.0 * a, "torque": 0.0},
                "means": {"P_z": -1.0, "P_x": 0.1, "torque": t},
            }
            for name, a, t in zip(self.names, amplitudes, torques)
        }

    def test_default_reference(self):
        self.assertEqual(default_reference(self.cases), "ironing_m1_N2-N2.2")

    def test_percentages(self):
        rows = sweep_table(self.cases, self.results([1.0, 0.8, 0.5], [0.3, 0.2, 0.1]), self.names[2])
        self.assertEqual([r["case"] for r in rows], self.names)
        self.assertAlmostEqual(rows[0]["dP_z_percent"], 100.0)
        self.assertAlmostEqual(rows[1]["dP_z_percent"], 80.0)
        self.assertAlmostEqual(rows[2]["dP_x_percent"], 50.0)
        self.assertAlmostEqual(rows[0]["torque_deviation"], 0.2)
        self.assertAlmostEqual(rows[2]["torque_deviation"], 0.0)

    def test_failed_case(self):
        results = self.results([1.0, 0.8, 0.5], [0.0] * 3)
        results[self.names[1]] = None
        rows = sweep_table(self.cases, results, self.names[2])
        self.assertTrue(rows[1]["failed"])
        self.assertFalse(rows[2]["failed"])


class TestDofTable(TestCase):
    def test_ironing_rows(self):
        cfg = setup_ironing(1)
        text = dof_table(cfg, [Discretization(2), Discretization(5)])
        lines = text.splitlines()
        self.assertEqual(lines[2].split()[-1], "1596")
        self.assertEqual(lines[3].split()[-1], "3036")
