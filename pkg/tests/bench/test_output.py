import json
import os

import numpy as np
from numpy.testing import assert_allclose
from pyfakefs.fake_filesystem_unittest import TestCase

from igacontact.bench import (
    HistoryWriter,
    OutputError,
    build_model,
    build_program,
    case_name,
    compute_metrics,
    history_row,
    read_history,
    setup_hertz,
    setup_ironing,
    setup_patch_test,
    setup_twisting,
    write_metrics,
    write_outputs,
    write_vtk,
)
from igacontact.bench.metrics import (
    CONFIG_FILE_NAME,
    CONTACT_COLUMNS,
    CONTACT_DIR_NAME,
    HISTORY_COLUMNS,
    HISTORY_FILE_NAME,
    METRICS_FILE_NAME,
)
from igacontact.bench.output import prepare_run_dir
from igacontact.config import Discretization, save_config
from igacontact.continuum import lame_from_engineering
from igacontact.nurbs import Face, block, build_vo_body
from igacontact.solver import RunHistory, StepRecord


def history_rows(stages):
    rows = []
    for k, stage in enumerate(stages):
        rows.append(
            {
                "step": k + 1,
                "stage": stage,
                "u_z": -0.1 * (k + 1),
                "u_x_or_theta": 10.0 * k,
                "P_z": -1.0 - 0.01 * (k % 3),
                "P_x": 0.02 * (k % 2),
                "torque": 0.001 * k,
                "active": 16,
                "stick": 16 - k,
                "slip": k,
            }
        )
    return rows


class TestCaseName(TestCase):
    def test_names(self):
        self.assertEqual(case_name(setup_hertz(2, Discretization(2, 1))), "hertz_m2_N2-N2.1")
        self.assertEqual(case_name(setup_patch_test(1)), "patch_test_m1_N2")
        self.assertEqual(case_name(setup_twisting(1)), "twisting_m1_N2")


class TestRunFiles(TestCase):
    def setUp(self):
        self.setUpPyfakefs()
        self.run_dir = "/runs/case"

    def test_prepare_run_dir(self):
        prepare_run_dir(self.run_dir)
        self.assertTrue(os.path.isdir(os.path.join(self.run_dir, CONTACT_DIR_NAME)))
        self.fs.create_file("/runs/blocked")
        with self.assertRaises(OutputError) as ctx:
            prepare_run_dir("/runs/blocked/case")
        self.assertIn("/runs/blocked/case", str(ctx.exception))

    def test_history_writer(self):
        prepare_run_dir(self.run_dir)
        path = os.path.join(self.run_dir, HISTORY_FILE_NAME)
        writer = HistoryWriter(path)
        writer.open()
        for row in history_rows(["press", "press", "twist"]):
            writer.write(row)
        writer.close()
        with open(path) as f:
            lines = f.read().splitlines()
        self.assertEqual(
            lines[0], "step,stage,u_z,u_x_or_theta,P_z,P_x,torque,active,stick,slip"
        )
        self.assertEqual(len(lines), 4)
        self.assertEqual(lines[3].split(",")[:2], ["3", "twist"])
        history = read_history(path)
        assert_allclose(history["u_z"], [-0.1, -0.2, -0.3])
        self.assertEqual(history["stage"].tolist(), ["press", "press", "twist"])
        self.assertEqual(set(history), set(HISTORY_COLUMNS))

    def test_history_missing_columns(self):
        self.fs.create_file("/h.csv", contents="step,stage\n1,a\n")
        with self.assertRaises(ValueError):
            read_history("/h.csv")

    def test_write_metrics_echoes_config(self):
        cfg = setup_twisting(1, friction=True)
        prepare_run_dir(self.run_dir)
        write_metrics(self.run_dir, cfg, None, {"status": "completed"})
        with open(os.path.join(self.run_dir, METRICS_FILE_NAME)) as f:
            summary = json.load(f)
        self.assertEqual(summary["status"], "completed")
        self.assertIsNone(summary["metrics"])
        self.assertEqual(summary["config"]["contacts"][0]["mu_f"], 0.5)
        self.assertEqual(summary["config"]["meta"]["benchmark"], "twisting")

    def test_compute_metrics_from_run_dir(self):
        cfg = setup_twisting(1, step_scale=0.05)
        stages = [s.name for s in cfg.stages for _ in range(s.steps)]
        prepare_run_dir(self.run_dir)
        save_config(cfg, os.path.join(self.run_dir, CONFIG_FILE_NAME))
        writer = HistoryWriter(os.path.join(self.run_dir, HISTORY_FILE_NAME))
        writer.open()
        rows = history_rows(stages)
        for row in rows:
            writer.write(row)
        writer.close()
        metrics = compute_metrics(self.run_dir)
        self.assertEqual(metrics.benchmark, "twisting")
        self.assertEqual(metrics.n_steps, len(stages))
        self.assertFalse(metrics.aborted)
        twist = [r for r in rows if r["stage"] == "twist"]
        skipped = int(round(0.1 * len(twist)))
        window = twist[skipped:]
        self.assertEqual(metrics.window, (window[0]["step"], window[-1]["step"]))
        torques = [r["torque"] for r in window]
        self.assertAlmostEqual(metrics.amplitudes["torque"], max(torques) - min(torques))

    def test_compute_metrics_patch_contact_fields(self):
        cfg = setup_patch_test(1)
        prepare_run_dir(self.run_dir)
        save_config(cfg, os.path.join(self.run_dir, CONFIG_FILE_NAME))
        writer = HistoryWriter(os.path.join(self.run_dir, HISTORY_FILE_NAME))
        writer.open()
        for row in history_rows(["load"] * cfg.stages[0].steps):
            writer.write(row)
        writer.close()
        n = 4
        fields = np.zeros((n, len(CONTACT_COLUMNS)))
        fields[:, 0] = np.arange(n)
        fields[:, CONTACT_COLUMNS.index("pressure")] = [0.98, 1.0, 1.02, 1.0]
        fields[:, CONTACT_COLUMNS.index("status")] = 1
        fields[:, CONTACT_COLUMNS.index("weight")] = 0.25
        path = os.path.join(self.run_dir, CONTACT_DIR_NAME, "step_0010.csv")
        with open(path, "w") as f:
            np.savetxt(f, fields, delimiter=",", header=",".join(CONTACT_COLUMNS), comments="")
        metrics = compute_metrics(self.run_dir)
        self.assertAlmostEqual(metrics.values["max_relative_error"], 0.02)
        self.assertAlmostEqual(metrics.values["mean_pressure"], 1.0)


class TestVtk(TestCase):
    def setUp(self):
        self.setUpPyfakefs()
        geo = block((1.0, 2.0, 1.0), elements=(1, 1, 1), degrees=(1, 1, 1))
        self.body = build_vo_body(geo.volume, Face.XI3_MAX, 0, name="cube")
        self.mat = lame_from_engineering(1.0, 0.3)
        self.fs.create_dir("/out")

    def read_section(self, lines, header, n):
        start = lines.index(header) + 1
        return np.array([[float(v) for v in line.split()] for line in lines[start : start + n]])

    def test_legacy_ascii_grid(self):
        u = np.zeros_like(self.body.points)
        u[:, 0] = 0.1 * self.body.points[:, 0]
        write_vtk("/out/snap.vtk", [self.body], [u], [self.mat], subdivisions=1, title="snap")
        with open("/out/snap.vtk") as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[0], "# vtk DataFile Version 3.0")
        self.assertEqual(lines[1], "snap")
        self.assertEqual(lines[2], "ASCII")
        self.assertEqual(lines[3], "DATASET UNSTRUCTURED_GRID")
        self.assertEqual(lines[4], "POINTS 8 double")
        self.assertIn("CELLS 1 9", lines)
        self.assertEqual(lines[lines.index("CELL_TYPES 1") + 1], "12")
        points = self.read_section(lines, "POINTS 8 double", 8)
        disp = self.read_section(lines, "VECTORS displacement double", 8)
        assert_allclose(disp[:, 0], 0.1 * points[:, 0], atol=1e-9)
        assert_allclose(disp[:, 1:], 0.0, atol=1e-12)
        stress = self.read_section(lines, "LOOKUP_TABLE default", 8).ravel()
        expected = self.mat.lam * np.log(1.1) / 1.1
        assert_allclose(stress, expected, rtol=1e-8)

    def test_two_bodies_offset_cells(self):
        u = np.zeros_like(self.body.points)
        write_vtk("/out/two.vtk", [self.body, self.body], [u, u], [self.mat] * 2, subdivisions=1)
        with open("/out/two.vtk") as f:
            lines = f.read().splitlines()
        self.assertIn("POINTS 16 double", lines)
        cells = self.read_section(lines, "CELLS 2 18", 2).astype(int)
        self.assertEqual(cells[0, 0], 8)
        self.assertEqual(cells[1, 1:].min(), 8)
        self.assertEqual(cells[1, 1:].max(), 15)


def step_record(step, stage, stage_name, progress, reactions, torques=None):
    return StepRecord(
        step=step,
        stage=stage,
        stage_name=stage_name,
        progress=progress,
        load_factor=progress,
        iterations=2,
        cutbacks=0,
        residual=1e-10,
        reactions=reactions,
        torques=torques or {},
        active=4,
        stick=3,
        slip=1,
        max_penetration=1e-3,
    )


class TestHistoryRow(TestCase):
    def test_twisting_row(self):
        cfg = setup_twisting(1)
        program = build_program(cfg)
        record = step_record(
            30,
            1,
            "twist",
            0.5,
            {"ring": np.array([0.1, 0.0, -2.0]), "base": np.zeros(3)},
            {"ring": np.array([0.0, 0.0, 2.5])},
        )
        row = history_row(cfg, program, record)
        self.assertAlmostEqual(row["u_x_or_theta"], 90.0)
        self.assertAlmostEqual(row["u_z"], -1.0)
        self.assertAlmostEqual(row["P_z"], -2.0)
        self.assertAlmostEqual(row["P_x"], 0.1)
        self.assertAlmostEqual(row["torque"], 2.5)
        self.assertEqual(history_row(cfg, program, record, torque=0.5)["torque"], 0.5)

    def test_translation_row(self):
        cfg = setup_ironing(1)
        program = build_program(cfg)
        record = step_record(70 + 270, 1, "drag", 0.5, {"top": np.ones(3), "base": np.zeros(3)})
        row = history_row(cfg, program, record)
        self.assertAlmostEqual(row["u_x_or_theta"], 27.0)
        self.assertAlmostEqual(row["u_z"], -7.0)
        self.assertEqual(row["torque"], 0.0)


class TestWriteOutputs(TestCase):
    def setUp(self):
        self.setUpPyfakefs()
        self.cfg = setup_patch_test(1, p=1)
        self.cfg.output.vtk_every = 1
        self.built = build_model(self.cfg)
        records = [
            step_record(k + 1, 0, "load", (k + 1) / 10, {"base": np.array([0.0, 0.0, 0.1 * (k + 1)])})
            for k in range(3)
        ]
        u = np.zeros(self.built.model.n_dofs)
        self.history = RunHistory(records=records, aborted=True, message="singular matrix", u=u)

    def test_files(self):
        write_outputs("/runs/patch", self.cfg, self.built, self.history, extra={"note": "x"})
        history = read_history(os.path.join("/runs/patch", HISTORY_FILE_NAME))
        assert_allclose(history["P_z"], [0.1, 0.2, 0.3])
        self.assertTrue(os.path.isfile("/runs/patch/snapshots/step_0003.vtk"))
        self.assertTrue(os.path.isfile(os.path.join("/runs/patch", CONFIG_FILE_NAME)))
        with open(os.path.join("/runs/patch", METRICS_FILE_NAME)) as f:
            summary = json.load(f)
        self.assertEqual(summary["status"], "aborted: singular matrix")
        self.assertEqual(summary["note"], "x")

    def test_unwritable_directory(self):
        self.fs.create_file("/runs")
        with self.assertRaises(OutputError):
            write_outputs("/runs/patch", self.cfg, self.built, self.history)
