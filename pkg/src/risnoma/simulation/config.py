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

import dataclasses
import json
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from .channel import GeometryConfig, thermal_noise_power_w
from .noma import QosSpec, qos_rate_to_sinr
from ..utils import logging


logger = logging.get_logger(__name__)  # pylint: disable=invalid-name

FRAMEWORKS = ("proposed", "benchmark_fixed_phase", "conventional_no_ris")


class ConfigError(ValueError):
    """Invalid scenario configuration. The message starts with the dotted path of the offending key."""


@dataclasses.dataclass
class SolverConfig:
    """
    Iteration budgets and tolerances of the alternating optimization.

    Args:
        tol_eta (`float`, *optional*, defaults to 1e-4):
            Dinkelbach stops once the residual `|eta|` falls below this value.
        max_dinkelbach_iters (`int`, *optional*, defaults to 20):
            Budget of Dinkelbach updates of `phi`.
        max_sca_iters (`int`, *optional*, defaults to 10):
            Budget of SCA re-expansions per Dinkelbach update.
        tol_sca (`float`, *optional*, defaults to 1e-5):
            SCA stops when the Dinkelbach objective changes by less than this value.
        max_dual_steps (`int`, *optional*, defaults to 500):
            Budget of projected subgradient steps on the multipliers.
        dual_step (`float`, *optional*, defaults to 0.1):
            Constant `c` of the diminishing step `c / sqrt(k)`.
        rho_epsilon (`float`, *optional*, defaults to 1e-6):
            Power fractions are kept in `[eps, 1 - eps]` so that every logarithm stays finite.
        kkt_form (`str`, *optional*, defaults to `"derived"`):
            `"derived"` solves the stationarity polynomial of the log2 Lagrangian, `"printed"` uses the closed-form
            coefficients with natural-log `Psi` and a bare `sigma` in the linear term.
        split_rule (`str`, *optional*, defaults to `"stationary"`):
            `"stationary"` takes `rho_j` from its own stationarity condition and the complement `1 - rho_i` only when
            the sum-power constraint binds; `"complement"` always uses `rho_j = 1 - rho_i`.
        ccp_iters (`int`, *optional*, defaults to 10):
            Budget of convex-concave iterations of the beamforming step.
        tol_ccp (`float`, *optional*, defaults to 1e-4):
            CCP stops when the relaxed objective changes by less than this value.
        randomization_samples (`int`, *optional*, defaults to 200):
            Number of Gaussian randomization candidates drawn from the relaxed solution.
        rank_one_penalty (`bool`, *optional*, defaults to `False`):
            Add the Schur-complement auxiliary vector and the penalty `mu (Tr(Xi) - |xi_hat|^2)` to the relaxation.
        rank_one_mu (`float`, *optional*, defaults to 10):
            Weight `mu` of the rank-one penalty.
        sdp_solver (`str`, *optional*):
            Name of the cvxpy solver; `None` picks SCS above `sdp_first_order_above` elements and lets cvxpy choose
            otherwise.
        sdp_first_order_above (`int`, *optional*, defaults to 16):
            Size above which the relaxation goes to the first-order SCS solver when `sdp_solver` is `None`.
        sdp_embedding (`str`, *optional*, defaults to `"hermitian"`):
            `"hermitian"` hands a complex Hermitian variable to cvxpy, `"real"` solves the real symmetric embedding of
            size `2M`.
        tol_outer (`float`, *optional*, defaults to 1e-3):
            Alternating optimization stops when the relative EE change falls below this value.
        max_outer_iters (`int`, *optional*, defaults to 20):
            Budget of alternating iterations.
        init_phases (`str`, *optional*, defaults to `"ones"`):
            Initial RIS phases, `"ones"` (coherent) or `"random"`.
    """
    tol_eta: float = 1e-4
    max_dinkelbach_iters: int = 20
    max_sca_iters: int = 10
    tol_sca: float = 1e-5
    max_dual_steps: int = 500
    dual_step: float = 0.1
    rho_epsilon: float = 1e-6
    kkt_form: str = "derived"
    split_rule: str = "stationary"
    ccp_iters: int = 10
    tol_ccp: float = 1e-4
    randomization_samples: int = 200
    rank_one_penalty: bool = False
    rank_one_mu: float = 10.0
    sdp_solver: Optional[str] = dataclasses.field(default=None, metadata={"type": str})
    sdp_first_order_above: int = 16
    sdp_embedding: str = "hermitian"
    tol_outer: float = 1e-3
    max_outer_iters: int = 20
    init_phases: str = "ones"

    def validate(self, prefix: str = "solver."):
        positive = ("tol_eta", "tol_sca", "dual_step", "tol_ccp", "rank_one_mu", "tol_outer")
        for key in positive:
            if not getattr(self, key) > 0:
                raise ConfigError(f"{prefix}{key}: must be > 0, got {getattr(self, key)}")
        counts = (
            "max_dinkelbach_iters",
            "max_sca_iters",
            "max_dual_steps",
            "ccp_iters",
            "randomization_samples",
            "max_outer_iters",
        )
        for key in counts:
            if getattr(self, key) < 1:
                raise ConfigError(f"{prefix}{key}: must be >= 1, got {getattr(self, key)}")
        if self.sdp_first_order_above < 0:
            raise ConfigError(f"{prefix}sdp_first_order_above: must be >= 0, got {self.sdp_first_order_above}")
        if not 0 < self.rho_epsilon < 0.5:
            raise ConfigError(f"{prefix}rho_epsilon: must lie in (0, 0.5), got {self.rho_epsilon}")
        choices = {
            "kkt_form": ("derived", "printed"),
            "split_rule": ("stationary", "complement"),
            "sdp_embedding": ("hermitian", "real"),
            "init_phases": ("ones", "random"),
        }
        for key, allowed in choices.items():
            if getattr(self, key) not in allowed:
                raise ConfigError(f"{prefix}{key}: must be one of {allowed}, got {getattr(self, key)!r}")
        if self.rank_one_penalty and self.sdp_embedding != "hermitian":
            raise ConfigError(f"{prefix}rank_one_penalty: requires sdp_embedding 'hermitian'")


@dataclasses.dataclass
class ScenarioConfig:
    """
    Every physical and algorithmic parameter of a simulation. Defaults reproduce the reference scenario: 64 RIS
    elements, 50 dBm satellite power, 20 MHz per ground terminal over the Ka band and a 10 Mbps QoS requirement.

    Args:
        geometry ([`GeometryConfig`]):
            Link geometry and RF parameters.
        solver ([`SolverConfig`]):
            Iteration budgets and tolerances.
        M (`int`, *optional*, defaults to 64):
            Number of RIS elements; 0 describes a system without RIS.
        p_t_dbm (`float`, *optional*, defaults to 50):
            Maximum satellite transmit power `P_T`.
        p_c_w (`float`, *optional*, defaults to 1):
            Circuit power.
        bandwidth_hz (`float`, *optional*, defaults to 20 MHz):
            Bandwidth of each ground terminal.
        noise_figure_db (`float`, *optional*, defaults to 7):
            Receiver noise figure used for the thermal noise power.
        noise_power_w (`float`, *optional*):
            Overrides the thermal noise power.
        qos_rate_bps (`float`, *optional*, defaults to 10 Mbps):
            Rate each ground terminal must receive.
        gamma_min (`float`, *optional*):
            Overrides the SINR threshold derived from `qos_rate_bps`.
        gamma_min_bar (`float`, *optional*):
            SINR threshold of the beamforming step on RIS-only gains; defaults to `gamma_min`.
        trials (`int`, *optional*, defaults to 200):
            Monte Carlo trials per operating point.
        master_seed (`int`, *optional*, defaults to 0):
            Seed every per-trial seed is derived from.
        frameworks (`List[str]`):
            Frameworks compared by the experiments.
        power_grid_dbm (`List[float]`):
            Values of `P_T` swept by `sweep-power`.
        qos_grid_mbps (`List[float]`):
            QoS rates swept by `sweep-qos`.
        convergence_elements (`List[int]`):
            RIS sizes compared by `convergence`.
    """
    geometry: GeometryConfig = dataclasses.field(default_factory=GeometryConfig)
    solver: SolverConfig = dataclasses.field(default_factory=SolverConfig)
    M: int = 64
    p_t_dbm: float = 50.0
    p_c_w: float = 1.0
    bandwidth_hz: float = 20e6
    noise_figure_db: float = 7.0
    noise_power_w: Optional[float] = dataclasses.field(default=None, metadata={"type": float})
    qos_rate_bps: float = 10e6
    gamma_min: Optional[float] = dataclasses.field(default=None, metadata={"type": float})
    gamma_min_bar: Optional[float] = dataclasses.field(default=None, metadata={"type": float})
    trials: int = 200
    master_seed: int = 0
    frameworks: List[str] = dataclasses.field(default_factory=lambda: list(FRAMEWORKS))
    power_grid_dbm: List[float] = dataclasses.field(default_factory=lambda: [10.0, 20.0, 30.0, 40.0, 50.0])
    qos_grid_mbps: List[float] = dataclasses.field(default_factory=lambda: [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0])
    convergence_elements: List[int] = dataclasses.field(default_factory=lambda: [32, 64])

    def validate(self):
        try:
            self.geometry.validate()
        except ConfigError:
            raise
        except ValueError as e:
            raise ConfigError(str(e)) from e
        self.solver.validate()
        if self.M < 0:
            raise ConfigError(f"M: must be >= 0, got {self.M}")
        for key in ("p_c_w", "bandwidth_hz", "qos_rate_bps"):
            value = getattr(self, key)
            if key == "qos_rate_bps" and value == 0:
                continue
            if not value > 0:
                raise ConfigError(f"{key}: must be > 0, got {value}")
        if self.noise_power_w is not None and not self.noise_power_w > 0:
            raise ConfigError(f"noise_power_w: must be > 0, got {self.noise_power_w}")
        for key in ("gamma_min", "gamma_min_bar"):
            value = getattr(self, key)
            if value is not None and value < 0:
                raise ConfigError(f"{key}: must be >= 0, got {value}")
        if self.trials < 1:
            raise ConfigError(f"trials: must be >= 1, got {self.trials}")
        if self.master_seed < 0:
            raise ConfigError(f"master_seed: must be >= 0, got {self.master_seed}")
        if not self.frameworks:
            raise ConfigError("frameworks: must not be empty")
        for name in self.frameworks:
            if name not in FRAMEWORKS:
                raise ConfigError(f"frameworks: unknown framework {name!r}, expected one of {FRAMEWORKS}")
        for key in ("power_grid_dbm", "qos_grid_mbps"):
            grid = getattr(self, key)
            if not grid:
                raise ConfigError(f"{key}: must not be empty")
            if any(b < a for a, b in zip(grid, grid[1:])):
                raise ConfigError(f"{key}: grid must be ascending, got {grid}")
        if any(m < 0 for m in self.convergence_elements) or not self.convergence_elements:
            raise ConfigError(f"convergence_elements: expected non-empty list of sizes >= 0, got {self.convergence_elements}")
        if any(q < 0 for q in self.qos_grid_mbps):
            raise ConfigError(f"qos_grid_mbps: rates must be >= 0, got {self.qos_grid_mbps}")
        return self

    @property
    def p_t_w(self) -> float:
        return 10.0 ** ((self.p_t_dbm - 30.0) / 10.0)

    @property
    def sigma2_w(self) -> float:
        if self.noise_power_w is not None:
            return self.noise_power_w
        return thermal_noise_power_w(self.bandwidth_hz, self.noise_figure_db)

    @property
    def qos(self) -> QosSpec:
        if self.gamma_min is not None:
            return QosSpec(self.gamma_min, self.bandwidth_hz)
        return QosSpec.from_rate(self.qos_rate_bps, self.bandwidth_hz)

    @property
    def resolved_gamma_min(self) -> float:
        return self.qos.min_sinr

    @property
    def resolved_gamma_min_bar(self) -> float:
        if self.gamma_min_bar is not None:
            return self.gamma_min_bar
        return self.resolved_gamma_min

    def replace(self, **changes) -> "ScenarioConfig":
        """Copy of the configuration with some top-level fields changed."""
        return dataclasses.replace(self, **changes)

    def with_qos_rate(self, rate_bps: float) -> "ScenarioConfig":
        """Copy of the configuration whose threshold is derived from `rate_bps`."""
        return dataclasses.replace(self, qos_rate_bps=rate_bps, gamma_min=None)

    def to_dict(self) -> Dict[str, Any]:
        return _to_plain(dataclasses.asdict(self))


def _to_plain(value):
    if isinstance(value, dict):
        return {k: _to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_plain(v) for v in value]
    return value


_NESTED = {"geometry": GeometryConfig, "solver": SolverConfig}


def _coerce(path: str, value: Any, field: dataclasses.Field, default: Any):
    """Convert a JSON value to the type of the field, naming `path` on mismatch."""
    declared = field.metadata.get("type")
    if declared is not None:
        if value is None:
            return None
        default = declared()
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected a boolean, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                return int(value)
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    if isinstance(default, tuple):
        if not isinstance(value, (list, tuple)) or len(value) != len(default):
            raise ConfigError(f"{path}: expected a list of {len(default)} numbers, got {value!r}")
        return tuple(_coerce(f"{path}[{k}]", v, field, d) for k, (v, d) in enumerate(zip(value, default)))
    if isinstance(default, list):
        if not isinstance(value, list):
            raise ConfigError(f"{path}: expected a list, got {value!r}")
        template = default[0] if default else 0.0
        return [_coerce(f"{path}[{k}]", v, field, template) for k, v in enumerate(value)]
    raise ConfigError(f"{path}: unsupported value {value!r}")


def _from_mapping(cls, data: Mapping[str, Any], prefix: str = ""):
    if not isinstance(data, Mapping):
        raise ConfigError(f"{prefix or '<root>'}: expected an object, got {type(data).__name__}")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    template = cls()
    kwargs = {}
    for key, value in data.items():
        path = f"{prefix}{key}"
        if key not in fields:
            raise ConfigError(f"{path}: unknown key")
        if key in _NESTED and cls is ScenarioConfig:
            kwargs[key] = _from_mapping(_NESTED[key], value, prefix=f"{path}.")
        else:
            kwargs[key] = _coerce(path, value, fields[key], getattr(template, key))
    return cls(**kwargs)


def config_from_dict(data: Mapping[str, Any]) -> ScenarioConfig:
    """Build and validate a [`ScenarioConfig`] from nested plain data; missing keys take their defaults."""
    return _from_mapping(ScenarioConfig, data).validate()


def parse_config(path: Union[str, Path]) -> ScenarioConfig:
    """
    Read a scenario from a JSON file.

    An empty file (or `{}`) yields the default scenario. Unknown keys are rejected so that typos cannot silently fall
    back to defaults.

    Raises:
        `ConfigError`: the file is missing, is not valid JSON or fails validation; the message names the key path.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"<file>: configuration file {path} does not exist")
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        data = {}
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"<file>: {path} is not valid JSON ({e.msg} at line {e.lineno})") from e
    cfg = config_from_dict(data)
    logger.info(f"Loaded scenario from {path}: M = {cfg.M}, P_T = {cfg.p_t_dbm} dBm, B = {cfg.bandwidth_hz} Hz")
    return cfg


def serialize_config(cfg: ScenarioConfig) -> str:
    """Canonical JSON text of a configuration (sorted keys, every field written out)."""
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n"


def default_gamma_min(bandwidth_hz: float = 20e6, rate_bps: float = 10e6) -> float:
    return qos_rate_to_sinr(rate_bps, bandwidth_hz)
