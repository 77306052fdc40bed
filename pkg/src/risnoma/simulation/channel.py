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
"""Channel coefficients of the satellite → ground terminal and satellite → RIS → ground terminal links."""

import dataclasses
import math
from typing import Optional, Tuple

import numpy as np
from scipy import constants, special

from ..utils import logging


logger = logging.get_logger(__name__)  # pylint: disable=invalid-name

# Index of the two ground terminals sharing the NOMA resource block.
GT_INDICES = (0, 1)

# Scale of the antenna pattern argument: the gain falls by 3 dB at sin(theta) = sin(theta_3db).
_PATTERN_SCALE = 2.07123

# Below this pattern argument the bracket of the Bessel pattern is replaced by its limit (= 1).
_PATTERN_SMALL_ARGUMENT = 1e-6


@dataclasses.dataclass
class GeometryConfig:
    """
    Link geometry and RF parameters of the satellite downlink.

    Args:
        sat_altitude_m (`float`, *optional*, defaults to 600 km):
            Orbit altitude of the LEO satellite.
        sat_gt_distance_m (`Tuple[float, float]`):
            Slant range from the satellite to each ground terminal.
        sat_ris_distance_m (`float`):
            Slant range from the satellite to the RIS.
        ris_gt_distance_m (`Tuple[float, float]`):
            Distance from the RIS to each ground terminal.
        boresight_angle_rad (`Tuple[float, float]`):
            Angle between each ground terminal and the centre of the satellite beam.
        ris_boresight_angle_rad (`float`):
            Angle between the RIS and the centre of the satellite beam.
        theta_3db_rad (`float`):
            Angle of 3 dB loss relative to the beam centre.
        carrier_hz (`float`, *optional*, defaults to 18.5 GHz):
            Carrier frequency.
        carrier_band_hz (`Tuple[float, float]`, *optional*, defaults to the Ka downlink band):
            Admissible range of `carrier_hz`.
        pathloss_exponent (`float`):
            Power-law decay of the RIS → ground terminal links.
        g_max_dbi (`float`):
            Maximum satellite antenna gain, observed at the beam centre.
        g_rx_dbi (`float`):
            Receive antenna gain of the ground terminals.
        g_ris_dbi (`float`):
            Gain of a single RIS element towards the satellite.
    """
    sat_altitude_m: float = 600e3
    sat_gt_distance_m: Tuple[float, float] = (600e3, 610e3)
    sat_ris_distance_m: float = 605e3
    ris_gt_distance_m: Tuple[float, float] = (10.0, 14.0)
    boresight_angle_rad: Tuple[float, float] = (0.002, 0.004)
    ris_boresight_angle_rad: float = 0.003
    theta_3db_rad: float = 0.007
    carrier_hz: float = 18.5e9
    carrier_band_hz: Tuple[float, float] = (17.7e9, 19.7e9)
    pathloss_exponent: float = 2.0
    g_max_dbi: float = 40.0
    g_rx_dbi: float = 10.0
    g_ris_dbi: float = 0.0

    def validate(self, prefix: str = "geometry."):
        """Check the invariants of the geometry, raising `ValueError` naming the offending key."""
        distances = {
            "sat_altitude_m": (self.sat_altitude_m,),
            "sat_gt_distance_m": tuple(self.sat_gt_distance_m),
            "sat_ris_distance_m": (self.sat_ris_distance_m,),
            "ris_gt_distance_m": tuple(self.ris_gt_distance_m),
        }
        for key, values in distances.items():
            if any(not v > 0 for v in values):
                raise ValueError(f"{prefix}{key}: all distances must be > 0, got {values}")
        for key in ("boresight_angle_rad", "ris_boresight_angle_rad"):
            values = np.atleast_1d(getattr(self, key))
            if np.any(values < 0) or np.any(values >= math.pi / 2):
                raise ValueError(f"{prefix}{key}: angles must lie in [0, pi/2), got {tuple(values)}")
        if not 0 < self.theta_3db_rad < math.pi / 2:
            raise ValueError(f"{prefix}theta_3db_rad: must lie in (0, pi/2), got {self.theta_3db_rad}")
        low, high = self.carrier_band_hz
        if not 0 < low <= high:
            raise ValueError(f"{prefix}carrier_band_hz: expected 0 < low <= high, got {self.carrier_band_hz}")
        if not low <= self.carrier_hz <= high:
            raise ValueError(f"{prefix}carrier_hz: {self.carrier_hz} outside the band [{low}, {high}]")
        if self.pathloss_exponent < 2:
            raise ValueError(f"{prefix}pathloss_exponent: must be >= 2, got {self.pathloss_exponent}")

    @property
    def g_max(self) -> float:
        return db_to_linear(self.g_max_dbi)

    @property
    def g_rx(self) -> float:
        return db_to_linear(self.g_rx_dbi)

    @property
    def g_ris(self) -> float:
        return db_to_linear(self.g_ris_dbi)


@dataclasses.dataclass
class ChannelRealization:
    """
    One draw of every channel coefficient of the scenario.

    Args:
        h_direct (`np.ndarray` of shape `(2,)`):
            Direct satellite → ground terminal coefficients, one per GT.
        g_sat_ris (`np.ndarray` of shape `(M,)`):
            Satellite → RIS coefficients.
        f_ris_gt (`np.ndarray` of shape `(2, M)`):
            RIS → ground terminal coefficients, one row per GT.
        doppler_phase (`np.ndarray` of shape `(2,)`):
            Doppler term zeta of each direct link; the phase of `h_direct` is `pi * zeta`.
        noise_power_w (`float`):
            Noise variance at the receivers.
    """
    h_direct: np.ndarray
    g_sat_ris: np.ndarray
    f_ris_gt: np.ndarray
    doppler_phase: np.ndarray
    noise_power_w: float

    def __post_init__(self):
        self.h_direct = np.asarray(self.h_direct, dtype=complex)
        self.g_sat_ris = np.asarray(self.g_sat_ris, dtype=complex)
        self.f_ris_gt = np.asarray(self.f_ris_gt, dtype=complex).reshape(len(GT_INDICES), -1)
        self.doppler_phase = np.asarray(self.doppler_phase, dtype=float)
        if self.f_ris_gt.shape[1] != self.g_sat_ris.shape[0]:
            raise ValueError(
                f"f_ris_gt has {self.f_ris_gt.shape[1]} elements per GT but g_sat_ris has {self.g_sat_ris.shape[0]}"
            )
        if not self.noise_power_w > 0:
            raise ValueError(f"noise_power_w must be > 0, got {self.noise_power_w}")
        if not np.all(np.isfinite(self.h_direct)):
            raise ValueError("h_direct must be finite")

    @property
    def num_elements(self) -> int:
        return self.g_sat_ris.shape[0]

    def cascade(self, gt_index: int) -> np.ndarray:
        """Cascaded satellite → RIS → GT vector of one ground terminal."""
        return cascade_vector(self.g_sat_ris, self.f_ris_gt[gt_index])

    def effective_gains(self, phases: Optional["PhaseShiftVector"] = None) -> np.ndarray:
        """Power gains |h + g Θ f|² of both ground terminals, in GT index order."""
        if self.num_elements == 0:
            return np.abs(self.h_direct) ** 2
        if phases is None:
            phases = PhaseShiftVector.ones(self.num_elements)
        return np.array(
            [
                abs(effective_gain(self.h_direct[k], self.g_sat_ris, phases, self.f_ris_gt[k])) ** 2
                for k in GT_INDICES
            ]
        )

    def reduced_gains(self, phases: "PhaseShiftVector") -> np.ndarray:
        """Power gains |g Θ f|² with the direct links removed."""
        return np.array(
            [abs(effective_gain(0.0, self.g_sat_ris, phases, self.f_ris_gt[k])) ** 2 for k in GT_INDICES]
        )

    def without_ris(self) -> "ChannelRealization":
        """The same draw seen by a system without RIS (M = 0)."""
        return ChannelRealization(
            h_direct=self.h_direct.copy(),
            g_sat_ris=np.zeros(0, dtype=complex),
            f_ris_gt=np.zeros((len(GT_INDICES), 0), dtype=complex),
            doppler_phase=self.doppler_phase.copy(),
            noise_power_w=self.noise_power_w,
        )


@dataclasses.dataclass
class PhaseShiftVector:
    """
    Reflection coefficients of the RIS elements, the diagonal of Θ.

    Args:
        alphas (`np.ndarray` of shape `(M,)`):
            Unit-modulus complex coefficients. The beamforming vector of the relaxation is `xi = conj(alphas)`.
    """
    alphas: np.ndarray

    def __post_init__(self):
        self.alphas = np.asarray(self.alphas, dtype=complex).reshape(-1)
        if self.alphas.size and np.max(np.abs(np.abs(self.alphas) - 1.0)) > 1e-9:
            raise ValueError("RIS coefficients must have unit modulus")

    def __len__(self):
        return self.alphas.shape[0]

    @property
    def xi(self) -> np.ndarray:
        return np.conj(self.alphas)

    @classmethod
    def ones(cls, num_elements: int) -> "PhaseShiftVector":
        return cls(np.ones(num_elements, dtype=complex))

    @classmethod
    def random(cls, num_elements: int, rng: np.random.Generator) -> "PhaseShiftVector":
        return cls(np.exp(1j * rng.uniform(0.0, 2 * np.pi, size=num_elements)))

    @classmethod
    def from_xi(cls, xi: np.ndarray) -> "PhaseShiftVector":
        """Project an arbitrary complex vector elementwise onto the unit circle and take α = conj(ξ)."""
        xi = np.asarray(xi, dtype=complex)
        magnitude = np.abs(xi)
        projected = np.where(magnitude > 0, xi / np.where(magnitude > 0, magnitude, 1.0), 1.0)
        return cls(np.conj(projected))


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def thermal_noise_power_w(bandwidth_hz: float, noise_figure_db: float = 7.0) -> float:
    """Thermal noise -174 dBm/Hz over `bandwidth_hz`, degraded by the receiver noise figure."""
    if not bandwidth_hz > 0:
        raise ValueError(f"bandwidth_hz must be > 0, got {bandwidth_hz}")
    noise_dbm = -174.0 + 10.0 * math.log10(bandwidth_hz) + noise_figure_db
    return 10.0 ** ((noise_dbm - 30.0) / 10.0)


def bessel_j(order: int, x: float) -> float:
    """
    Bessel function of the first kind of order 1 or 3, the two orders used by the satellite antenna pattern.
    """
    if order not in (1, 3):
        raise ValueError(f"order must be 1 or 3, got {order}")
    if x < 0:
        raise ValueError(f"x must be >= 0, got {x}")
    return float(special.jv(order, x))


def antenna_pattern(vartheta: float) -> float:
    """
    Normalized satellite antenna pattern `[J1(v)/(2v) + 36 J3(v)/v^3]^2`, equal to 1 at the beam centre.
    """
    if vartheta < _PATTERN_SMALL_ARGUMENT:
        return 1.0
    bracket = bessel_j(1, vartheta) / (2 * vartheta) + 36 * bessel_j(3, vartheta) / vartheta**3
    return bracket**2


def satellite_antenna_gain(theta_rad: float, cfg: GeometryConfig) -> float:
    """
    Linear transmit gain of the satellite towards a point at `theta_rad` from the beam centre.

    Args:
        theta_rad (`float`):
            Off-boresight angle in `[0, pi/2)`.
        cfg ([`GeometryConfig`]):
            Provides `g_max_dbi` and `theta_3db_rad`.

    Returns:
        `float`: `G_max` times the normalized Bessel pattern; exactly `G_max` at `theta_rad = 0`.
    """
    if not 0 <= theta_rad < math.pi / 2:
        raise ValueError(f"theta_rad must lie in [0, pi/2), got {theta_rad}")
    if theta_rad == 0:
        return cfg.g_max
    vartheta = _PATTERN_SCALE * math.sin(theta_rad) / math.sin(cfg.theta_3db_rad)
    return cfg.g_max * antenna_pattern(vartheta)


def free_space_amplitude(
    cfg: GeometryConfig, d_m: float, theta_rad: float = 0.0, rx_gain: Optional[float] = None
) -> float:
    """
    Amplitude `sqrt(G_l G_rx (c / (4 pi f_c d))^2)` of a free-space satellite link.

    The transmit gain `G_l` is the antenna pattern evaluated at `theta_rad`; `rx_gain` defaults to the ground
    terminal gain of `cfg`.
    """
    if not d_m > 0:
        raise ValueError(f"d_m must be > 0, got {d_m}")
    if not cfg.carrier_hz > 0:
        raise ValueError(f"carrier_hz must be > 0, got {cfg.carrier_hz}")
    if rx_gain is None:
        rx_gain = cfg.g_rx
    g_l = satellite_antenna_gain(theta_rad, cfg)
    return math.sqrt(g_l * rx_gain * (constants.c / (4 * math.pi * cfg.carrier_hz * d_m)) ** 2)


def pathloss_db(cfg: GeometryConfig, d_m: float) -> float:
    """Free-space pathloss `20 log10(4 pi d f_c / c)`, without antenna gains."""
    return 20.0 * math.log10(4 * math.pi * d_m * cfg.carrier_hz / constants.c)


def sample_direct_channel(
    cfg: GeometryConfig, gt_index: int, rng: np.random.Generator, zeta: Optional[float] = None
) -> complex:
    """
    Direct satellite → GT coefficient `h = |h| exp(j pi zeta)`, zeta ~ Uniform(0, 2).

    Passing `zeta` fixes the Doppler term instead of drawing it from `rng`.
    """
    if gt_index not in GT_INDICES:
        raise ValueError(f"gt_index must be one of {GT_INDICES}, got {gt_index}")
    if zeta is None:
        zeta = rng.uniform(0.0, 2.0)
    amplitude = free_space_amplitude(cfg, cfg.sat_gt_distance_m[gt_index], cfg.boresight_angle_rad[gt_index])
    return complex(amplitude * np.exp(1j * np.pi * zeta))


def sample_sat_ris_channel(cfg: GeometryConfig, num_elements: int, rng: np.random.Generator) -> np.ndarray:
    """
    Satellite → RIS vector: the line-of-sight link budget amplitude on every element, with independent uniform
    phases.
    """
    if num_elements < 1:
        raise ValueError(f"num_elements must be >= 1, got {num_elements}")
    amplitude = free_space_amplitude(
        cfg, cfg.sat_ris_distance_m, cfg.ris_boresight_angle_rad, rx_gain=cfg.g_ris
    )
    return amplitude * np.exp(1j * rng.uniform(0.0, 2 * np.pi, size=num_elements))


def sample_ris_gt_channel(
    cfg: GeometryConfig, gt_index: int, num_elements: int, rng: np.random.Generator
) -> np.ndarray:
    """
    RIS → GT vector: unit-variance Rayleigh coefficients scaled by `d^(-beta/2)`, so that `E|f_m|^2 = d^(-beta)`.
    """
    if num_elements < 1:
        raise ValueError(f"num_elements must be >= 1, got {num_elements}")
    if gt_index not in GT_INDICES:
        raise ValueError(f"gt_index must be one of {GT_INDICES}, got {gt_index}")
    fading = (rng.standard_normal(num_elements) + 1j * rng.standard_normal(num_elements)) / np.sqrt(2.0)
    return fading * cfg.ris_gt_distance_m[gt_index] ** (-cfg.pathloss_exponent / 2)


def sample_channel_realization(
    cfg: GeometryConfig, num_elements: int, noise_power_w: float, rng: np.random.Generator
) -> ChannelRealization:
    """
    Draw a complete [`ChannelRealization`]. The draw order is fixed (Doppler terms, satellite → RIS, RIS → GT i,
    RIS → GT j), so one seed always yields the same coefficients.
    """
    zeta = rng.uniform(0.0, 2.0, size=len(GT_INDICES))
    h_direct = np.array([sample_direct_channel(cfg, k, rng, zeta=zeta[k]) for k in GT_INDICES])
    if num_elements == 0:
        g = np.zeros(0, dtype=complex)
        f = np.zeros((len(GT_INDICES), 0), dtype=complex)
    else:
        g = sample_sat_ris_channel(cfg, num_elements, rng)
        f = np.stack([sample_ris_gt_channel(cfg, k, num_elements, rng) for k in GT_INDICES])
    logger.debug(f"Sampled channel: |h| = {np.abs(h_direct)}, M = {num_elements}")
    return ChannelRealization(h_direct, g, f, zeta, noise_power_w)


def _check_lengths(**vectors):
    lengths = {name: np.shape(v)[0] for name, v in vectors.items()}
    if len(set(lengths.values())) > 1:
        raise ValueError(f"length mismatch: {lengths}")


def effective_gain(h: complex, g: np.ndarray, phases: PhaseShiftVector, f: np.ndarray) -> complex:
    """Composite coefficient `h + sum_m g_m alpha_m f_m` of one ground terminal."""
    g = np.asarray(g, dtype=complex)
    f = np.asarray(f, dtype=complex)
    _check_lengths(g=g, phases=phases.alphas, f=f)
    return complex(h + np.sum(g * phases.alphas * f))


def cascade_vector(g: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Hadamard product `g ∘ f`, so that `|xi^H (g ∘ f)|^2 = |g Θ f|^2` for `xi = conj(alpha)`."""
    g = np.asarray(g, dtype=complex)
    f = np.asarray(f, dtype=complex)
    _check_lengths(g=g, f=f)
    return g * f
