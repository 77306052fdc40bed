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

import json
import math
import tempfile

from pathlib import Path

import pytest

from unittest import TestCase
from parameterized import parameterized

from risnoma.simulation.config import (
    ConfigError,
    ScenarioConfig,
    SolverConfig,
    config_from_dict,
    default_gamma_min,
    parse_config,
    serialize_config,
)


class ParseConfigTestCase(TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def _write(self, text):
        path = self.tmp / "scenario.json"
        path.write_text(text, encoding="utf-8")
        return path

    def test_empty_file_gives_defaults(self):
        cfg = parse_config(self._write(""))
        self.assertEqual(cfg.M, 64)
        self.assertEqual(cfg.p_t_dbm, 50.0)
        self.assertEqual(cfg.bandwidth_hz, 20e6)
        self.assertEqual(cfg, ScenarioConfig())

    def test_empty_object_gives_defaults(self):
        self.assertEqual(parse_config(self._write("{}")), ScenarioConfig())

    def test_nested_values(self):
        cfg = parse_config(self._write(json.dumps({"M": 16, "geometry": {"carrier_hz": 19e9}, "solver": {"ccp_iters": 3}})))
        self.assertEqual(cfg.M, 16)
        self.assertEqual(cfg.geometry.carrier_hz, 19e9)
        self.assertEqual(cfg.solver.ccp_iters, 3)

    def test_tuples_from_lists(self):
        cfg = parse_config(self._write(json.dumps({"geometry": {"ris_gt_distance_m": [8, 9.5]}})))
        self.assertEqual(cfg.geometry.ris_gt_distance_m, (8.0, 9.5))

    def test_missing_file(self):
        with pytest.raises(ConfigError, match="does not exist"):
            parse_config(self.tmp / "missing.json")

    def test_invalid_json(self):
        with pytest.raises(ConfigError, match="not valid JSON"):
            parse_config(self._write("{\"M\": "))

    @parameterized.expand([
        ("negative_m", {"M": -1}, "^M:"),
        ("unknown_key", {"elements": 4}, "^elements: unknown key"),
        ("unknown_nested_key", {"solver": {"ccp_iter": 4}}, "^solver.ccp_iter: unknown key"),
        ("wrong_type", {"trials": "many"}, "^trials: expected an integer"),
        ("bad_carrier", {"geometry": {"carrier_hz": 1e9}}, "^geometry.carrier_hz"),
        ("bad_choice", {"solver": {"kkt_form": "exact"}}, "^solver.kkt_form"),
        ("bad_tuple", {"geometry": {"sat_gt_distance_m": [1.0]}}, "^geometry.sat_gt_distance_m"),
        ("unknown_framework", {"frameworks": ["magic"]}, "^frameworks"),
        ("descending_grid", {"power_grid_dbm": [30, 20]}, "^power_grid_dbm"),
        ("penalty_needs_hermitian", {"solver": {"rank_one_penalty": True, "sdp_embedding": "real"}}, "rank_one_penalty"),
        ("negative_first_order_size", {"solver": {"sdp_first_order_above": -1}}, "^solver.sdp_first_order_above"),
    ])
    def test_validation_errors_name_the_key(self, _, data, pattern):
        with pytest.raises(ConfigError, match=pattern):
            parse_config(self._write(json.dumps(data)))

    def test_round_trip(self):
        data = {"M": 8, "trials": 3, "solver": {"init_phases": "random"}, "geometry": {"g_max_dbi": 35.0}}
        cfg = parse_config(self._write(json.dumps(data)))
        text = serialize_config(cfg)
        self.assertEqual(serialize_config(parse_config(self._write(text))), text)
        self.assertEqual(json.loads(text)["solver"]["init_phases"], "random")

    def test_serialized_form_is_canonical(self):
        text = serialize_config(ScenarioConfig())
        self.assertTrue(text.endswith("}\n"))
        self.assertEqual(text, json.dumps(json.loads(text), indent=2, sort_keys=True) + "\n")


class ScenarioConfigTestCase(TestCase):
    def test_derived_power(self):
        self.assertAlmostEqual(ScenarioConfig().p_t_w, 100.0)
        self.assertAlmostEqual(ScenarioConfig(p_t_dbm=30.0).p_t_w, 1.0)

    def test_noise_override(self):
        self.assertEqual(ScenarioConfig(noise_power_w=2.0).sigma2_w, 2.0)
        self.assertAlmostEqual(
            10 * math.log10(ScenarioConfig().sigma2_w * 1e3), -174 + 10 * math.log10(20e6) + 7, places=9
        )

    def test_gamma_min_from_rate(self):
        cfg = ScenarioConfig()
        self.assertAlmostEqual(cfg.resolved_gamma_min, math.sqrt(2) - 1, places=12)
        self.assertEqual(cfg.resolved_gamma_min, default_gamma_min())
        self.assertEqual(cfg.resolved_gamma_min_bar, cfg.resolved_gamma_min)

    def test_explicit_thresholds(self):
        cfg = ScenarioConfig(gamma_min=0.5, gamma_min_bar=0.1)
        self.assertEqual(cfg.resolved_gamma_min, 0.5)
        self.assertEqual(cfg.resolved_gamma_min_bar, 0.1)

    def test_with_qos_rate_clears_explicit_threshold(self):
        cfg = ScenarioConfig(gamma_min=0.5).with_qos_rate(20e6)
        self.assertIsNone(cfg.gamma_min)
        self.assertAlmostEqual(cfg.resolved_gamma_min, 1.0)

    def test_zero_qos_is_allowed(self):
        cfg = ScenarioConfig(qos_rate_bps=0.0).validate()
        self.assertEqual(cfg.resolved_gamma_min, 0.0)

    def test_replace_keeps_original(self):
        cfg = ScenarioConfig()
        other = cfg.replace(M=4)
        self.assertEqual((cfg.M, other.M), (64, 4))

    def test_config_from_dict_validates(self):
        with pytest.raises(ConfigError, match="^solver.rho_epsilon"):
            config_from_dict({"solver": {"rho_epsilon": 0.7}})

    def test_solver_defaults(self):
        solver = SolverConfig()
        self.assertEqual((solver.kkt_form, solver.split_rule, solver.sdp_embedding), ("derived", "stationary", "hermitian"))
        self.assertEqual(solver.sdp_first_order_above, 16)
        self.assertIsNone(solver.sdp_solver)
        solver.validate()
