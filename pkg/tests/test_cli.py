# coding=utf-8
# Copyright 2026 The risnoma Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import contextlib
import csv
import io
import json
import tempfile

from pathlib import Path

import pytest

from unittest import TestCase
from parameterized import parameterized

from risnoma.simulation.__main__ import COMMANDS, build_parser, load_config, main
from .testing_utils import require_cvxpy, require_matplotlib


_TINY_SCENARIO = {
    "M": 2,
    "trials": 2,
    "frameworks": ["conventional_no_ris", "benchmark_fixed_phase"],
    "power_grid_dbm": [40, 50],
    "qos_grid_mbps": [0, 5],
    "convergence_elements": [1],
    "solver": {"max_outer_iters": 3, "ccp_iters": 3, "randomization_samples": 20},
}


def _help(argv):
    out = io.StringIO()
    with contextlib.redirect_stdout(out), pytest.raises(SystemExit) as e:
        build_parser().parse_args(argv)
    assert e.value.code == 0
    return out.getvalue()


class ParserTestCase(TestCase):
    def test_top_level_help_lists_commands(self):
        text = _help(["--help"])
        for command in COMMANDS:
            self.assertIn(command, text)

    @parameterized.expand([(command,) for command in COMMANDS])
    def test_help_lists_common_flags(self, command):
        text = _help([command, "--help"])
        for flag in (
            "--config", "--out-dir", "--seed", "--trials", "--framework", "--jobs", "--emit-plots", "--verbose", "--quiet"
        ):
            self.assertIn(flag, text)

    def test_convergence_elements_flag(self):
        self.assertIn("--elements", _help(["convergence", "--help"]))
        self.assertEqual(build_parser().parse_args(["convergence", "--elements", "2,4"]).elements, [2, 4])

    def test_defaults(self):
        args = build_parser().parse_args(["sweep-power"])
        self.assertEqual(args.out_dir, Path("results"))
        self.assertEqual(args.jobs, 1)
        self.assertIsNone(args.config)
        self.assertFalse(args.emit_plots)

    @parameterized.expand([
        ("no_command", []),
        ("unknown_command", ["sweep-everything"]),
        ("bad_framework", ["sweep-power", "--framework", "magic"]),
        ("zero_trials", ["sweep-power", "--trials", "0"]),
        ("negative_seed", ["sweep-power", "--seed", "-1"]),
        ("bad_elements", ["convergence", "--elements", "a,b"]),
        ("verbose_and_quiet", ["sweep-power", "--verbose", "--quiet"]),
    ])
    def test_usage_errors_exit_with_2(self, _, argv):
        with contextlib.redirect_stderr(io.StringIO()), pytest.raises(SystemExit) as e:
            build_parser().parse_args(argv)
        self.assertEqual(e.value.code, 2)

    def test_overrides(self):
        args = build_parser().parse_args(["sweep-qos", "--seed", "7", "--trials", "3", "--framework", "no-ris,joint"])
        cfg = load_config(args)
        self.assertEqual((cfg.master_seed, cfg.trials), (7, 3))
        self.assertEqual(cfg.frameworks, ["conventional_no_ris", "proposed"])


class MainTestCase(TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)
        self.config = self.tmp / "scenario.json"
        self.config.write_text(json.dumps(_TINY_SCENARIO), encoding="utf-8")

    def tearDown(self):
        self._tmp.cleanup()

    def _run(self, *argv, out_dir=None):
        out_dir = out_dir or self.tmp / "out"
        return main([*argv, "--config", str(self.config), "--out-dir", str(out_dir), "--quiet"])

    def test_missing_config(self):
        self.assertEqual(main(["sweep-power", "--config", str(self.tmp / "missing.json"), "--quiet"]), 2)

    def test_invalid_config(self):
        self.config.write_text(json.dumps({"M": -3}), encoding="utf-8")
        self.assertEqual(self._run("sweep-power"), 2)

    def test_sweep_power(self):
        self.assertEqual(self._run("sweep-power"), 0)
        with open(self.tmp / "out" / "sweep_power.csv", encoding="utf-8", newline="") as f:
            rows = list(csv.DictReader(f))
        self.assertEqual(len(rows), 4)
        self.assertEqual({row["param_value"] for row in rows}, {"40", "50"})
        self.assertEqual({row["trials"] for row in rows}, {"2"})

    def test_sweep_qos_with_framework_override(self):
        self.assertEqual(self._run("sweep-qos", "--framework", "no-ris", "--trials", "1"), 0)
        with open(self.tmp / "out" / "sweep_qos.csv", encoding="utf-8", newline="") as f:
            rows = list(csv.DictReader(f))
        self.assertEqual([row["framework"] for row in rows], ["conventional_no_ris"] * 2)
        self.assertEqual(rows[0]["infeasible_frac"], "0")

    def test_reruns_are_byte_identical(self):
        self.assertEqual(self._run("sweep-power", "--seed", "3", out_dir=self.tmp / "a"), 0)
        self.assertEqual(self._run("sweep-power", "--seed", "3", out_dir=self.tmp / "b"), 0)
        self.assertEqual(
            (self.tmp / "a" / "sweep_power.csv").read_bytes(), (self.tmp / "b" / "sweep_power.csv").read_bytes()
        )

    def test_single_trial(self):
        self.assertEqual(self._run("single-trial"), 0)
        out = self.tmp / "out"
        with open(out / "single_trial.csv", encoding="utf-8", newline="") as f:
            rows = list(csv.DictReader(f))
        self.assertEqual([row["framework"] for row in rows], ["conventional_no_ris", "benchmark_fixed_phase"])
        self.assertEqual({row["seed"] for row in rows}, {"0"})
        for framework in ("conventional_no_ris", "benchmark_fixed_phase"):
            self.assertTrue((out / f"trace_{framework}.csv").exists())

    @require_cvxpy
    def test_convergence(self):
        self.assertEqual(self._run("convergence", "--elements", "1", "--trials", "1"), 0)
        with open(self.tmp / "out" / "convergence.csv", encoding="utf-8", newline="") as f:
            rows = list(csv.DictReader(f))
        self.assertGreaterEqual(len(rows), 1)
        self.assertEqual({row["M"] for row in rows}, {"1"})

    @require_matplotlib
    def test_emit_plots(self):
        self.assertEqual(self._run("sweep-power", "--framework", "no-ris", "--emit-plots"), 0)
        self.assertTrue((self.tmp / "out" / "sweep_power.png").exists())
