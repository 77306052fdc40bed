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
"""Energy-efficiency maximization of RIS-assisted NOMA LEO satellite downlinks."""

from .altopt import Solution, optimize
from .channel import ChannelRealization, GeometryConfig, PhaseShiftVector, sample_channel_realization
from .config import ConfigError, ScenarioConfig, SolverConfig, parse_config, serialize_config
from .experiments import convergence_trace, run_trial, sweep_power, sweep_qos
from .export import emit_csv
from .frameworks import FrameworksManager
from .power_alloc import InfeasibleAllocationError, dinkelbach_power_allocation
from .validate import validate_solution
