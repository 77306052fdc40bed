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
"""Alternating optimization of the power split (Step 1) and the RIS phases (Step 2)."""

import dataclasses
import time
from typing import Iterator, List, Optional

import numpy as np

from .beamforming import passive_beamforming
from .channel import ChannelRealization, PhaseShiftVector
from .config import ScenarioConfig
from .noma import PowerSplit, check_constraints, evaluate_link, qos_feasible_grid, sic_order
from .power_alloc import InfeasibleAllocationError, PowerProblem, dinkelbach_power_allocation
from ..utils import logging


logger = logging.get_logger(__name__)  # pylint: disable=invalid-name

# Side of the grid used by the feasibility gate.
FEASIBILITY_GRID = 200


@dataclasses.dataclass
class EETraceRecord:
    iteration: int
    ee: float
    phi: float
    eta: float
    rho_i: float
    rho_j: float
    rate_i: float
    rate_j: float
    feasible: bool
    power_seconds: float = 0.0
    beamforming_seconds: float = 0.0


@dataclasses.dataclass
class EETrace:
    """Accepted alternating iterations, in order."""
    records: List[EETraceRecord] = dataclasses.field(default_factory=list)

    def append(self, record: EETraceRecord):
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[EETraceRecord]:
        return iter(self.records)

    @property
    def ee_values(self) -> List[float]:
        return [record.ee for record in self.records]


@dataclasses.dataclass
class Solution:
    """
    Result of `optimize`.

    Args:
        power ([`PowerSplit`]):
            Power split, `rho_i` on the stronger terminal under `phases`.
        phases ([`PhaseShiftVector`]):
            RIS phases, empty without RIS.
        ee (`float`):
            Energy efficiency of `(power, phases)` on the channel draw, in bits/s/Hz/W.
        trace ([`EETrace`]):
            Per-iteration record.
        status (`str`):
            `"converged"`, `"max-iters"` or `"infeasible"`.
        rate_i (`float`), rate_j (`float`):
            Rates of the strong and the weak terminal.
    """
    power: PowerSplit
    phases: PhaseShiftVector
    ee: float
    trace: EETrace
    status: str
    rate_i: float = 0.0
    rate_j: float = 0.0

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"

    @property
    def iterations(self) -> int:
        return len(self.trace)


@dataclasses.dataclass
class FeasibilityReport:
    feasible: bool
    diagnostic: str

    def __bool__(self) -> bool:
        return self.feasible


def initial_phases(num_elements: int, cfg: ScenarioConfig, rng: Optional[np.random.Generator]) -> PhaseShiftVector:
    if cfg.solver.init_phases == "random" and num_elements > 0:
        return PhaseShiftVector.random(num_elements, rng if rng is not None else np.random.default_rng(0))
    return PhaseShiftVector.ones(num_elements)


def check_feasibility(
    channels: ChannelRealization, cfg: ScenarioConfig, phases: Optional[PhaseShiftVector] = None
) -> FeasibilityReport:
    """
    Whether some split on a 200 x 200 grid meets both QoS constraints at full power `P_T` under `phases`
    (all ones by default).
    """
    gamma_min = cfg.resolved_gamma_min
    if gamma_min == 0:
        return FeasibilityReport(True, "no QoS requirement")
    if phases is None and channels.num_elements > 0:
        phases = PhaseShiftVector.ones(channels.num_elements)
    _, _, gains = sic_order(*channels.effective_gains(phases))
    rho = np.linspace(0.0, 1.0, FEASIBILITY_GRID)
    rho_i, rho_j = np.meshgrid(rho, rho, indexing="ij")
    within_budget = rho_i + rho_j <= 1.0 + 1e-12
    qos = qos_feasible_grid(rho_i, rho_j, cfg.p_t_w, gains, channels.noise_power_w, gamma_min)
    count = int(np.count_nonzero(qos & within_budget))
    if count == 0:
        snr_i = cfg.p_t_w * gains.o_i / channels.noise_power_w
        snr_j = cfg.p_t_w * gains.o_j / channels.noise_power_w
        return FeasibilityReport(
            False,
            f"no split meets SINR >= {gamma_min:.4g} (full-power SNRs {snr_i:.4g} and {snr_j:.4g})",
        )
    return FeasibilityReport(True, f"{count} of {rho_i.size} grid splits meet QoS")


def _infeasible_solution(channels, phases, cfg, reason) -> Solution:
    logger.warning(f"Infeasible instance: {reason}")
    power = PowerSplit(0.0, 0.0, cfg.p_t_w, cfg.p_c_w)
    return Solution(power, phases, evaluate_link(channels, phases, power).ee, EETrace(), "infeasible")


def optimize(
    channels: ChannelRealization,
    cfg: ScenarioConfig,
    rng: Optional[np.random.Generator] = None,
    phases: Optional[PhaseShiftVector] = None,
    optimize_phases: bool = True,
) -> Solution:
    """
    Maximize the energy efficiency by alternating the power allocation (phases fixed) and the passive beamforming
    (power fixed).

    The loop stops when the relative EE change falls below `cfg.solver.tol_outer` or after
    `cfg.solver.max_outer_iters` iterations. A step that lowers the EE, or phases that break the QoS constraints,
    are rejected, so the recorded EE never decreases.

    Args:
        channels ([`ChannelRealization`]):
            Channel draw; without RIS elements only the power is optimized.
        cfg ([`ScenarioConfig`]):
            Scenario and solver options.
        rng (`np.random.Generator`, *optional*):
            Source of random initial phases and randomization samples.
        phases ([`PhaseShiftVector`], *optional*):
            Initial phases, overriding `cfg.solver.init_phases`.
        optimize_phases (`bool`, *optional*, defaults to `True`):
            When `False`, the phases stay fixed and a single power allocation is performed.
    """
    solver = cfg.solver
    m = channels.num_elements
    phases = phases if phases is not None else initial_phases(m, cfg, rng)
    report = check_feasibility(channels, cfg, phases)
    if not report:
        return _infeasible_solution(channels, phases, cfg, report.diagnostic)

    problem = PowerProblem.from_config(cfg, sigma2=channels.noise_power_w)
    sigma2, gamma_min = channels.noise_power_w, cfg.resolved_gamma_min
    alternating = optimize_phases and m > 0
    trace = EETrace()
    power: Optional[PowerSplit] = None
    ee = 0.0
    status = "max-iters"

    for r in range(1, solver.max_outer_iters + 1):
        start = time.perf_counter()
        _, _, gains = sic_order(*channels.effective_gains(phases))
        try:
            candidate_power, state = dinkelbach_power_allocation(gains, problem, solver)
        except InfeasibleAllocationError as e:
            if power is None:
                return _infeasible_solution(channels, phases, cfg, str(e))
            logger.warning(f"Power allocation failed at iteration {r}: {e}")
            status = "converged"
            break
        power_seconds = time.perf_counter() - start

        candidate_phases = phases
        beamforming_seconds = 0.0
        if alternating:
            start = time.perf_counter()
            result = passive_beamforming(channels, candidate_power, cfg, phases=phases, rng=rng)
            beamforming_seconds = time.perf_counter() - start
            _, _, new_gains = sic_order(*channels.effective_gains(result.phases))
            constraints = check_constraints(candidate_power, new_gains, sigma2, gamma_min, problem.p_t_w)
            if constraints.holds(gamma_min):
                candidate_phases = result.phases
            else:
                logger.debug(f"Phases of iteration {r} break {constraints.worst[0]}, keeping the previous phases")

        link = evaluate_link(channels, candidate_phases, candidate_power)
        if power is not None and link.ee < ee:
            logger.debug(f"Iteration {r} lowers EE ({link.ee:.6g} < {ee:.6g}), stopping")
            status = "converged"
            break
        previous_ee = ee
        power, phases, ee = candidate_power, candidate_phases, link.ee
        _, _, final_gains = sic_order(*channels.effective_gains(phases))
        feasible = check_constraints(power, final_gains, sigma2, gamma_min, problem.p_t_w).holds(gamma_min)
        trace.append(
            EETraceRecord(
                iteration=r,
                ee=ee,
                phi=state.phi,
                eta=state.eta,
                rho_i=power.rho_i,
                rho_j=power.rho_j,
                rate_i=link.rate_i,
                rate_j=link.rate_j,
                feasible=feasible,
                power_seconds=power_seconds,
                beamforming_seconds=beamforming_seconds,
            )
        )
        logger.debug(f"Outer iteration {r}: EE = {ee:.8g}, rho = ({power.rho_i:.6g}, {power.rho_j:.6g})")
        if not alternating:
            status = "converged"
            break
        if r > 1 and (ee - previous_ee) <= solver.tol_outer * max(previous_ee, 1e-300):
            status = "converged"
            break

    link = evaluate_link(channels, phases, power)
    if status == "max-iters":
        logger.warning(f"Alternating optimization stopped after {solver.max_outer_iters} iterations")
    logger.info(f"Optimized EE {link.ee:.6g} bits/s/Hz/W after {len(trace)} iterations ({status})")
    return Solution(power, phases, link.ee, trace, status, rate_i=link.rate_i, rate_j=link.rate_j)
