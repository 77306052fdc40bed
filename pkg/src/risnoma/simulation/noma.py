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
"""Two-user downlink NOMA: SIC ordering, SINRs, rates and energy efficiency."""

import dataclasses
import math
from typing import Optional, Tuple

import numpy as np

from .channel import ChannelRealization, PhaseShiftVector


@dataclasses.dataclass
class PowerSplit:
    """
    NOMA power allocation of the satellite.

    Args:
        rho_i (`float`):
            Power fraction of the strong (SIC) ground terminal.
        rho_j (`float`):
            Power fraction of the weak ground terminal.
        p_l_w (`float`):
            Satellite transmit power `P_l` the fractions apply to.
        p_c_w (`float`, *optional*, defaults to 1 W):
            Circuit power added to the consumption.
    """
    rho_i: float
    rho_j: float
    p_l_w: float
    p_c_w: float = 1.0

    @property
    def delta(self) -> float:
        return self.rho_i + self.rho_j

    @property
    def consumed_power_w(self) -> float:
        return self.p_l_w * self.delta + self.p_c_w


@dataclasses.dataclass
class QosSpec:
    """
    Quality-of-service requirement of each ground terminal.

    Args:
        min_sinr (`float`):
            SINR threshold `gamma_min` both ground terminals must reach.
        bandwidth_hz (`float`):
            Bandwidth of each ground terminal.
        derived_from_rate_bps (`float`, *optional*):
            The rate requirement `min_sinr` was converted from, if any.
    """
    min_sinr: float
    bandwidth_hz: float
    derived_from_rate_bps: Optional[float] = None

    def __post_init__(self):
        if self.min_sinr < 0:
            raise ValueError(f"min_sinr must be >= 0, got {self.min_sinr}")

    @classmethod
    def from_rate(cls, rate_bps: float, bandwidth_hz: float) -> "QosSpec":
        return cls(qos_rate_to_sinr(rate_bps, bandwidth_hz), bandwidth_hz, derived_from_rate_bps=rate_bps)


@dataclasses.dataclass
class EffectiveGains:
    """Power gains `O` of the strong (`o_i`) and weak (`o_j`) ground terminals."""
    o_i: float
    o_j: float

    def __post_init__(self):
        if self.o_i < 0 or self.o_j < 0:
            raise ValueError(f"gains must be >= 0, got ({self.o_i}, {self.o_j})")

    def normalized(self, sigma2: float) -> "EffectiveGains":
        """The gains divided by the noise power."""
        return EffectiveGains(self.o_i / sigma2, self.o_j / sigma2)


@dataclasses.dataclass
class ConstraintReport:
    """Slack of each constraint of the power allocation problem; a constraint holds when its slack is >= 0."""
    qos_strong: float
    qos_weak: float
    power_budget: float
    unit_budget: float
    box: float

    @property
    def satisfied(self) -> bool:
        return min(dataclasses.astuple(self)) >= 0

    @property
    def worst(self) -> Tuple[str, float]:
        items = dataclasses.asdict(self).items()
        return min(items, key=lambda item: item[1])

    def holds(self, gamma_min: float, rtol: float = 1e-6) -> bool:
        """Like `satisfied`, but QoS slacks may fall short by `rtol * max(1, gamma_min)` and the others by 1e-12."""
        qos_floor = -rtol * max(1.0, gamma_min)
        return (
            self.qos_strong >= qos_floor
            and self.qos_weak >= qos_floor
            and min(self.power_budget, self.unit_budget, self.box) >= -1e-12
        )


@dataclasses.dataclass
class LinkEvaluation:
    """True rates and energy efficiency of a `(power, phases, channels)` triple."""
    rate_i: float
    rate_j: float
    sinr_i: float
    sinr_j: float
    ee: float
    strong_index: int
    weak_index: int

    @property
    def sum_rate(self) -> float:
        return self.rate_i + self.rate_j


def sic_order(gain_i: float, gain_j: float) -> Tuple[int, int, EffectiveGains]:
    """
    Order the two ground terminals for SIC decoding.

    Returns:
        `(strong_index, weak_index, EffectiveGains)` with `o_i >= o_j`. Equal gains keep the original order.
    """
    if gain_i < 0 or gain_j < 0:
        raise ValueError(f"gains must be >= 0, got ({gain_i}, {gain_j})")
    if gain_j > gain_i:
        return 1, 0, EffectiveGains(gain_j, gain_i)
    return 0, 1, EffectiveGains(gain_i, gain_j)


def sinr_strong(ps: PowerSplit, gains: EffectiveGains, sigma2: float) -> float:
    """SNR of the strong terminal, which removes the weak user's signal by SIC."""
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be > 0, got {sigma2}")
    return ps.p_l_w * ps.rho_i * gains.o_i / sigma2


def sinr_weak(ps: PowerSplit, gains: EffectiveGains, sigma2: float) -> float:
    """SINR of the weak terminal, which treats the strong user's signal as interference."""
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be > 0, got {sigma2}")
    return ps.p_l_w * ps.rho_j * gains.o_j / (sigma2 + ps.p_l_w * ps.rho_i * gains.o_j)


def rate(sinr: float) -> float:
    """Spectral efficiency `log2(1 + sinr)` in bits/s/Hz."""
    if sinr < 0:
        raise ValueError(f"sinr must be >= 0, got {sinr}")
    return math.log2(1.0 + sinr)


def energy_efficiency(rate_sum: float, ps: PowerSplit) -> float:
    """Sum rate divided by the consumed power `P_l (rho_i + rho_j) + p_c`."""
    denominator = ps.consumed_power_w
    if not denominator > 0:
        raise ValueError(f"consumed power must be > 0, got {denominator}")
    return rate_sum / denominator


def qos_rate_to_sinr(rate_bps: float, bandwidth_hz: float) -> float:
    """SINR threshold `2^(R/B) - 1` that delivers `rate_bps` over `bandwidth_hz`."""
    if not bandwidth_hz > 0:
        raise ValueError(f"bandwidth_hz must be > 0, got {bandwidth_hz}")
    return 2.0 ** (rate_bps / bandwidth_hz) - 1.0


def check_constraints(
    ps: PowerSplit, gains: EffectiveGains, sigma2: float, gamma_min: float, p_t_w: float
) -> ConstraintReport:
    """
    Slacks of the QoS, power budget, unit budget and box constraints, each scaled so that they are comparable:
    QoS slacks are in units of the noise power, the power budget in units of `p_t_w`.
    """
    received_i = ps.p_l_w * ps.rho_i * gains.o_i
    received_j = ps.p_l_w * ps.rho_j * gains.o_j
    interference = ps.p_l_w * ps.rho_i * gains.o_j
    return ConstraintReport(
        qos_strong=(received_i - gamma_min * sigma2) / sigma2,
        qos_weak=(received_j - gamma_min * (sigma2 + interference)) / sigma2,
        power_budget=(p_t_w - ps.p_l_w * ps.delta) / p_t_w,
        unit_budget=1.0 - ps.delta,
        box=min(ps.rho_i, ps.rho_j, 1.0 - ps.rho_i, 1.0 - ps.rho_j),
    )


def evaluate_link(
    channels: ChannelRealization, phases: Optional[PhaseShiftVector], ps: PowerSplit
) -> LinkEvaluation:
    """
    Rates and energy efficiency of a power split on a channel draw. `ps.rho_i` always goes to whichever ground
    terminal is stronger under `phases`.
    """
    strong, weak, gains = sic_order(*channels.effective_gains(phases))
    sigma2 = channels.noise_power_w
    gamma_i = sinr_strong(ps, gains, sigma2)
    gamma_j = sinr_weak(ps, gains, sigma2)
    rate_i, rate_j = rate(gamma_i), rate(gamma_j)
    return LinkEvaluation(
        rate_i=rate_i,
        rate_j=rate_j,
        sinr_i=gamma_i,
        sinr_j=gamma_j,
        ee=energy_efficiency(rate_i + rate_j, ps),
        strong_index=strong,
        weak_index=weak,
    )


def sum_rate_grid(
    rho_i: np.ndarray, rho_j: np.ndarray, p_l_w: float, gains: EffectiveGains, sigma2: float
) -> np.ndarray:
    """Vectorized true sum rate over arrays of power fractions."""
    gamma_i = p_l_w * rho_i * gains.o_i / sigma2
    gamma_j = p_l_w * rho_j * gains.o_j / (sigma2 + p_l_w * rho_i * gains.o_j)
    return np.log2(1.0 + gamma_i) + np.log2(1.0 + gamma_j)


def qos_feasible_grid(
    rho_i: np.ndarray, rho_j: np.ndarray, p_l_w: float, gains: EffectiveGains, sigma2: float, gamma_min: float
) -> np.ndarray:
    """Vectorized test of both QoS constraints over arrays of power fractions."""
    strong_ok = p_l_w * rho_i * gains.o_i >= gamma_min * sigma2
    weak_ok = p_l_w * rho_j * gains.o_j >= gamma_min * (sigma2 + p_l_w * rho_i * gains.o_j)
    return strong_ok & weak_ok
