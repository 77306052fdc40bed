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
"""Monte Carlo comparison of the frameworks: convergence traces, power sweeps and QoS sweeps."""

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .altopt import Solution
from .channel import ChannelRealization, sample_channel_realization
from .config import ScenarioConfig
from .frameworks import FrameworksManager
from ..utils import logging


logger = logging.get_logger(__name__)  # pylint: disable=invalid-name


@dataclasses.dataclass
class TrialResult:
    """
    Outcome of one framework on one channel draw.

    Args:
        seed (`int`): Per-trial seed; all frameworks see the same channels for the same seed.
        framework (`str`): Canonical framework name.
        ee (`float`): Energy efficiency, 0 for infeasible trials.
        rate_i (`float`), rate_j (`float`): Rates of the strong and the weak terminal.
        iterations (`int`): Accepted alternating iterations.
        feasible (`bool`): Whether the QoS constraints could be met.
        trace (`List[float]`): EE after every accepted iteration.
    """
    seed: int
    framework: str
    ee: float
    rate_i: float
    rate_j: float
    iterations: int
    feasible: bool
    trace: List[float] = dataclasses.field(default_factory=list)


@dataclasses.dataclass
class AggregateRow:
    mean: float
    std: float
    ci95: float
    infeasible_frac: float
    trials: int


@dataclasses.dataclass
class SweepPoint:
    param_value: float
    framework: str
    mean_ee: float
    ci95: float
    infeasible_frac: float
    trials: int


@dataclasses.dataclass
class SweepResult:
    """Mean EE per grid value and framework of a swept parameter."""
    parameter: str
    grid: List[float]
    points: List[SweepPoint] = dataclasses.field(default_factory=list)

    @property
    def frameworks(self) -> List[str]:
        names = []
        for point in self.points:
            if point.framework not in names:
                names.append(point.framework)
        return names

    def series(self, framework: str) -> List[SweepPoint]:
        return [point for point in self.points if point.framework == framework]

    def mean_series(self, framework: str) -> np.ndarray:
        return np.array([point.mean_ee for point in self.series(framework)])


@dataclasses.dataclass
class ConvergenceRow:
    M: int
    iteration: int
    mean_ee: float
    ci95: float


@dataclasses.dataclass
class ConvergenceTable:
    """Mean EE after each alternating iteration, for every number of RIS elements."""
    rows: List[ConvergenceRow] = dataclasses.field(default_factory=list)

    def series(self, num_elements: int) -> np.ndarray:
        return np.array([row.mean_ee for row in self.rows if row.M == num_elements])

    def final_mean(self, num_elements: int) -> float:
        return float(self.series(num_elements)[-1])


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Seed of one trial, `master_seed XOR trial_index`."""
    if master_seed < 0 or trial_index < 0:
        raise ValueError(f"seeds must be >= 0, got ({master_seed}, {trial_index})")
    return master_seed ^ trial_index


def trial_streams(seed: int) -> Tuple[np.random.Generator, np.random.Generator, np.random.Generator]:
    """Independent generators for the channel draw, the fixed benchmark phases and the solver."""
    channel, phase, solver = np.random.SeedSequence(seed).spawn(3)
    return np.random.default_rng(channel), np.random.default_rng(phase), np.random.default_rng(solver)


def solve_trial(cfg: ScenarioConfig, seed: int, framework: str) -> Tuple[ChannelRealization, Solution]:
    """The channel draw of `seed` and the full solution of one framework on it."""
    _, runner = FrameworksManager.check_supported_framework_or_raise(framework)
    channel_rng, phase_rng, solver_rng = trial_streams(seed)
    channels = sample_channel_realization(cfg.geometry, cfg.M, cfg.sigma2_w, channel_rng)
    return channels, runner(channels, cfg, phase_rng, solver_rng)


def trial_result(seed: int, framework: str, solution: Solution) -> TrialResult:
    """Summary of a solution. Infeasible trials are kept, with `ee = 0`."""
    return TrialResult(
        seed=seed,
        framework=FrameworksManager.map_from_synonym(framework),
        ee=solution.ee if solution.feasible else 0.0,
        rate_i=solution.rate_i,
        rate_j=solution.rate_j,
        iterations=solution.iterations,
        feasible=solution.feasible,
        trace=[float(v) for v in solution.trace.ee_values],
    )


def run_trial(cfg: ScenarioConfig, seed: int, framework: str) -> TrialResult:
    """Run one framework on the channel draw of `seed`."""
    _, solution = solve_trial(cfg, seed, framework)
    return trial_result(seed, framework, solution)


def _run_trial_args(args) -> TrialResult:
    return run_trial(*args)


def run_trials(
    cfg: ScenarioConfig, framework: str, seeds: Sequence[int], jobs: int = 1
) -> List[TrialResult]:
    """Run one framework over several seeds, in seed order whatever the number of worker processes."""
    tasks = [(cfg, seed, framework) for seed in seeds]
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_trial_args(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(_run_trial_args, tasks))


def trial_seeds(cfg: ScenarioConfig, trials: Optional[int] = None) -> List[int]:
    return [trial_seed(cfg.master_seed, k) for k in range(trials if trials is not None else cfg.trials)]


def mean_and_ci(values: Iterable[float]) -> Tuple[float, float, float]:
    """Mean, sample standard deviation and half-width of the 95% Student-t confidence interval."""
    values = np.asarray(list(values), dtype=float)
    if values.size == 0:
        raise ValueError("cannot summarize an empty sample")
    mean = float(values.mean())
    if values.size == 1:
        return mean, 0.0, 0.0
    std = float(values.std(ddof=1))
    half_width = float(stats.t.ppf(0.975, values.size - 1) * std / math.sqrt(values.size))
    return mean, std, half_width


def aggregate(results: Sequence[TrialResult]) -> AggregateRow:
    """Summary statistics of the EE of several trials; infeasible trials count with EE 0."""
    if not results:
        raise ValueError("aggregate needs at least one trial result")
    mean, std, ci95 = mean_and_ci(r.ee for r in results)
    infeasible = sum(1 for r in results if not r.feasible)
    return AggregateRow(mean, std, ci95, infeasible / len(results), len(results))


def _resolve_frameworks(cfg: ScenarioConfig, frameworks: Optional[Sequence[str]]) -> List[str]:
    names = frameworks if frameworks is not None else cfg.frameworks
    return [FrameworksManager.check_supported_framework_or_raise(name)[0] for name in names]


def _sweep(parameter, grid, configs, frameworks, seeds, jobs) -> SweepResult:
    result = SweepResult(parameter=parameter, grid=[float(v) for v in grid])
    for value, point_cfg in zip(grid, configs):
        for framework in frameworks:
            row = aggregate(run_trials(point_cfg, framework, seeds, jobs=jobs))
            result.points.append(
                SweepPoint(float(value), framework, row.mean, row.ci95, row.infeasible_frac, row.trials)
            )
            logger.info(
                f"{parameter} = {value:g}, {framework}: mean EE {row.mean:.6g} +- {row.ci95:.3g}"
                f" ({row.infeasible_frac:.0%} infeasible)"
            )
    return result


def sweep_power(
    cfg: ScenarioConfig,
    power_grid_dbm: Optional[Sequence[float]] = None,
    frameworks: Optional[Sequence[str]] = None,
    trials: Optional[int] = None,
    jobs: int = 1,
) -> SweepResult:
    """Mean EE against the satellite power budget `P_T`, in dBm."""
    grid = list(power_grid_dbm if power_grid_dbm is not None else cfg.power_grid_dbm)
    _check_ascending(grid, "power_grid_dbm")
    configs = [cfg.replace(p_t_dbm=float(p)) for p in grid]
    return _sweep("p_t_dbm", grid, configs, _resolve_frameworks(cfg, frameworks), trial_seeds(cfg, trials), jobs)


def sweep_qos(
    cfg: ScenarioConfig,
    qos_grid_mbps: Optional[Sequence[float]] = None,
    frameworks: Optional[Sequence[str]] = None,
    trials: Optional[int] = None,
    jobs: int = 1,
) -> SweepResult:
    """Mean EE against the QoS rate requirement, in Mbps."""
    grid = list(qos_grid_mbps if qos_grid_mbps is not None else cfg.qos_grid_mbps)
    _check_ascending(grid, "qos_grid_mbps")
    configs = [cfg.with_qos_rate(float(q) * 1e6) for q in grid]
    return _sweep(
        "qos_rate_mbps", grid, configs, _resolve_frameworks(cfg, frameworks), trial_seeds(cfg, trials), jobs
    )


def convergence_trace(
    cfg: ScenarioConfig,
    seeds: Optional[Sequence[int]] = None,
    M_values: Optional[Sequence[int]] = None,
    jobs: int = 1,
) -> ConvergenceTable:
    """
    Mean EE of the proposed framework after each alternating iteration, for every number of RIS elements. Traces
    that stop early are extended with their final value.
    """
    seeds = list(seeds) if seeds is not None else trial_seeds(cfg)
    M_values = list(M_values) if M_values is not None else list(cfg.convergence_elements)
    if not M_values:
        raise ValueError("M_values must not be empty")
    table = ConvergenceTable()
    for m in M_values:
        results = run_trials(cfg.replace(M=int(m)), "proposed", seeds, jobs=jobs)
        length = max(max((len(r.trace) for r in results), default=1), 1)
        padded = np.zeros((len(results), length))
        for k, r in enumerate(results):
            trace = r.trace if r.trace else [r.ee]
            padded[k, : len(trace)] = trace
            padded[k, len(trace) :] = trace[-1]
        for iteration in range(length):
            mean, _, ci95 = mean_and_ci(padded[:, iteration])
            table.rows.append(ConvergenceRow(int(m), iteration + 1, mean, ci95))
        logger.info(f"M = {m}: mean EE {table.final_mean(int(m)):.6g} after {length} iterations")
    return table


def _check_ascending(grid: Sequence[float], name: str):
    if not grid:
        raise ValueError(f"{name} must not be empty")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError(f"{name} must be ascending, got {list(grid)}")
