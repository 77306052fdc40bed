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

from .altopt import Solution
from .channel import ChannelRealization
from .config import ScenarioConfig
from .noma import check_constraints, evaluate_link, sic_order
from ..utils import logging


logger = logging.get_logger(__name__)  # pylint: disable=invalid-name


def validate_solution(solution: Solution, channels: ChannelRealization, cfg: ScenarioConfig, rtol: float = 1e-6):
    """
    Validate that an optimized solution is consistent with the channel draw it was computed on.

    Args:
        solution ([`~simulation.altopt.Solution`]):
            The result of `optimize`.
        channels ([`~simulation.channel.ChannelRealization`]):
            The channel draw passed to `optimize`.
        cfg ([`~simulation.config.ScenarioConfig`]):
            The scenario passed to `optimize`.
        rtol (`float`, *optional*, defaults to 1e-6):
            Relative tolerance on the reported energy efficiency and the QoS slacks.
    """
    logger.info("Validating solution...")

    if not solution.feasible:
        logger.info("\t-[ ] solution is infeasible, nothing to validate")
        return

    # No phases: the solution ignores the RIS
    if len(solution.phases) == 0 and channels.num_elements > 0:
        logger.info("\t- solution has no RIS phases, validating on the direct links")
        channels = channels.without_ris()

    # Unit modulus
    xi = solution.phases.xi
    if len(xi) != channels.num_elements:
        logger.info(f"\t-[x] {len(xi)} phases for {channels.num_elements} RIS elements")
        raise ValueError(f"Phase vector has {len(xi)} entries, expected {channels.num_elements}")
    elif len(xi) > 0 and not np.allclose(np.abs(xi), 1.0, atol=1e-9):
        logger.info("\t-[x] phases are not unit modulus")
        raise ValueError(f"Phases are not unit modulus: got max deviation of {np.amax(np.abs(np.abs(xi) - 1.0))}")
    else:
        logger.info(f"\t-[✓] {len(xi)} unit-modulus phases")

    # Energy efficiency
    link = evaluate_link(channels, solution.phases, solution.power)
    if not np.isclose(link.ee, solution.ee, rtol=rtol, atol=0.0):
        logger.info(f"\t-[x] reported EE {solution.ee:.8g} doesn't match {link.ee:.8g}")
        raise ValueError(
            f"Reported energy efficiency doesn't match the channel draw: got {solution.ee} (reported) and "
            f"{link.ee} (recomputed)"
        )
    else:
        logger.info(f"\t-[✓] EE {solution.ee:.8g} bits/s/Hz/W matches the channel draw")

    # Constraints
    _, _, gains = sic_order(*channels.effective_gains(solution.phases))
    gamma_min = cfg.resolved_gamma_min
    report = check_constraints(solution.power, gains, channels.noise_power_w, gamma_min, cfg.p_t_w)
    if not report.holds(gamma_min, rtol=rtol):
        name, slack = report.worst
        logger.info(f"\t-[x] constraint {name} violated (slack {slack:.4g})")
        raise ValueError(f"Solution violates constraint {name}: got slack {slack}")
    else:
        logger.info(f"\t-[✓] all constraints hold (worst: {report.worst[0]})")

    # Trace
    ee_values = solution.trace.ee_values
    if any(b < a - rtol * max(abs(a), 1.0) for a, b in zip(ee_values, ee_values[1:])):
        logger.info("\t-[x] EE trace decreases")
        raise ValueError(f"EE trace is not non-decreasing: {ee_values}")
    else:
        logger.info(f"\t-[✓] EE trace non-decreasing over {len(ee_values)} iterations")
