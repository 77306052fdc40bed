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

from typing import Callable, Dict, List, Tuple

import numpy as np

from .altopt import Solution, initial_phases, optimize
from .channel import ChannelRealization, PhaseShiftVector
from .config import FRAMEWORKS, ScenarioConfig
from ..utils import logging


logger = logging.get_logger(__name__)  # pylint: disable=invalid-name

FrameworkRunner = Callable[[ChannelRealization, ScenarioConfig, np.random.Generator, np.random.Generator], Solution]


def run_proposed(
    channels: ChannelRealization, cfg: ScenarioConfig, phase_rng: np.random.Generator, solver_rng: np.random.Generator
) -> Solution:
    """Joint power allocation and passive beamforming."""
    return optimize(channels, cfg, rng=solver_rng, phases=initial_phases(channels.num_elements, cfg, phase_rng))


def run_benchmark_fixed_phase(
    channels: ChannelRealization, cfg: ScenarioConfig, phase_rng: np.random.Generator, solver_rng: np.random.Generator
) -> Solution:
    """Power allocation only, under random RIS phases drawn once per trial."""
    phases = PhaseShiftVector.random(channels.num_elements, phase_rng)
    return optimize(channels, cfg, rng=solver_rng, phases=phases, optimize_phases=False)


def run_conventional_no_ris(
    channels: ChannelRealization, cfg: ScenarioConfig, phase_rng: np.random.Generator, solver_rng: np.random.Generator
) -> Solution:
    """Power allocation over the direct links of the same draw, without RIS."""
    return optimize(channels.without_ris(), cfg, rng=solver_rng, optimize_phases=False)


class FrameworksManager:
    _SUPPORTED_FRAMEWORKS: Dict[str, FrameworkRunner] = {
        "proposed": run_proposed,
        "benchmark_fixed_phase": run_benchmark_fixed_phase,
        "conventional_no_ris": run_conventional_no_ris,
    }

    _SYNONYM_FRAMEWORK_MAP = {
        "ris-noma": "proposed",
        "joint": "proposed",
        "benchmark": "benchmark_fixed_phase",
        "fixed-phase": "benchmark_fixed_phase",
        "random-phase": "benchmark_fixed_phase",
        "conventional": "conventional_no_ris",
        "no-ris": "conventional_no_ris",
    }

    AVAILABLE_FRAMEWORKS = list(FRAMEWORKS)
    AVAILABLE_FRAMEWORKS_INCLUDING_SYNONYMS = AVAILABLE_FRAMEWORKS + list(_SYNONYM_FRAMEWORK_MAP.keys())

    @staticmethod
    def map_from_synonym(framework: str) -> str:
        framework = framework.strip().lower()
        if framework in FrameworksManager._SYNONYM_FRAMEWORK_MAP:
            framework = FrameworksManager._SYNONYM_FRAMEWORK_MAP[framework]
        return framework

    @staticmethod
    def check_supported_framework_or_raise(framework: str) -> Tuple[str, FrameworkRunner]:
        """
        Check whether a framework (or one of its synonyms) is supported.

        Args:
            framework (`str`):
                The name of the framework.

        Returns:
            `Tuple[str, Callable]`: the canonical name and the function running the framework on one channel draw.
        """
        name = FrameworksManager.map_from_synonym(framework)
        if name not in FrameworksManager._SUPPORTED_FRAMEWORKS:
            raise ValueError(
                f"Unknown framework {framework!r}. Supported values are: "
                f"{FrameworksManager.AVAILABLE_FRAMEWORKS_INCLUDING_SYNONYMS}"
            )
        return name, FrameworksManager._SUPPORTED_FRAMEWORKS[name]

    @staticmethod
    def get_runner(framework: str) -> FrameworkRunner:
        return FrameworksManager.check_supported_framework_or_raise(framework)[1]

    @staticmethod
    def parse_framework_list(text: str) -> List[str]:
        """Canonical names of a comma-separated list, duplicates removed, order kept."""
        names = []
        for item in text.split(","):
            if not item.strip():
                continue
            name, _ = FrameworksManager.check_supported_framework_or_raise(item)
            if name not in names:
                names.append(name)
        if not names:
            raise ValueError(f"No framework given in {text!r}")
        return names
