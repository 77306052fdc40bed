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

import numpy as np
import pytest

from unittest import TestCase
from parameterized import parameterized

from risnoma.simulation.frameworks import (
    FrameworksManager,
    run_benchmark_fixed_phase,
    run_conventional_no_ris,
    run_proposed,
)
from .testing_utils import desk_config, random_channels


class FrameworksManagerTestCase(TestCase):
    @parameterized.expand([
        ("canonical", "proposed", "proposed"),
        ("synonym", "no-ris", "conventional_no_ris"),
        ("case", " Fixed-Phase ", "benchmark_fixed_phase"),
    ])
    def test_synonyms(self, _, text, expected):
        self.assertEqual(FrameworksManager.map_from_synonym(text), expected)

    def test_runner(self):
        self.assertIs(FrameworksManager.get_runner("joint"), run_proposed)
        self.assertIs(FrameworksManager.get_runner("benchmark"), run_benchmark_fixed_phase)
        self.assertIs(FrameworksManager.get_runner("conventional"), run_conventional_no_ris)

    def test_unknown(self):
        with pytest.raises(ValueError, match="Unknown framework 'magic'"):
            FrameworksManager.check_supported_framework_or_raise("magic")

    def test_parse_list(self):
        self.assertEqual(
            FrameworksManager.parse_framework_list("proposed, no-ris,joint,,benchmark"),
            ["proposed", "conventional_no_ris", "benchmark_fixed_phase"],
        )

    def test_parse_empty_list(self):
        with pytest.raises(ValueError, match="No framework"):
            FrameworksManager.parse_framework_list(" , ")


class RunnerTestCase(TestCase):
    def test_conventional_ignores_ris(self):
        channels = random_channels(3, seed=1)
        solution = run_conventional_no_ris(
            channels, desk_config(M=3, gamma_min=0.01), np.random.default_rng(0), np.random.default_rng(1)
        )
        self.assertEqual(len(solution.phases), 0)
        self.assertEqual(solution.iterations, 1)

    def test_benchmark_draws_phases_from_phase_stream(self):
        channels = random_channels(3, seed=2)
        cfg = desk_config(M=3, gamma_min=0.01)
        a = run_benchmark_fixed_phase(channels, cfg, np.random.default_rng(5), np.random.default_rng(0))
        b = run_benchmark_fixed_phase(channels, cfg, np.random.default_rng(5), np.random.default_rng(9))
        np.testing.assert_array_equal(a.phases.alphas, b.phases.alphas)
        self.assertEqual(a.ee, b.ee)
