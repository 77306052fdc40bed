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
"""
Step 1 of the alternating optimization: NOMA power allocation for fixed RIS phases.

The energy-efficiency ratio is handled by Dinkelbach's transform, the rates by a successive lower bound
`log2(1 + g) >= Psi log2(g) + Omega`, and each bound by the stationarity conditions of its Lagrangian under a
projected subgradient update of the multipliers.
"""

import dataclasses
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from .config import ScenarioConfig, SolverConfig
from .noma import (
    EffectiveGains,
    PowerSplit,
    energy_efficiency,
    qos_feasible_grid,
    rate,
    sinr_strong,
    sinr_weak,
    sum_rate_grid,
)
from ..utils import logging


logger = logging.get_logger(__name__)  # pylint: disable=invalid-name

_LN2 = math.log(2.0)

# Number of log-spaced points used to bracket the maximum of the reduced one-dimensional problem.
_BRACKET_POINTS = 48


class InfeasibleAllocationError(ValueError):
    """No power split satisfies the QoS constraints under the power budget."""


@dataclasses.dataclass
class PowerProblem:
    """
    One instance of the power allocation problem for fixed effective gains.

    Args:
        sigma2 (`float`):
            Noise power.
        p_l_w (`float`):
            Transmit power `P_l` the fractions apply to.
        p_t_w (`float`):
            Power budget `P_T`; together with the unit budget the total fraction is capped at `min(1, P_T / P_l)`.
        p_c_w (`float`, *optional*, defaults to 1):
            Circuit power.
        gamma_min (`float`, *optional*, defaults to 0):
            SINR threshold of both ground terminals.
    """
    sigma2: float
    p_l_w: float
    p_t_w: float
    p_c_w: float = 1.0
    gamma_min: float = 0.0

    def __post_init__(self):
        for key in ("sigma2", "p_l_w", "p_t_w"):
            if not getattr(self, key) > 0:
                raise ValueError(f"{key} must be > 0, got {getattr(self, key)}")
        if self.p_c_w < 0:
            raise ValueError(f"p_c_w must be >= 0, got {self.p_c_w}")
        if self.gamma_min < 0:
            raise ValueError(f"gamma_min must be >= 0, got {self.gamma_min}")

    @classmethod
    def from_config(cls, cfg: ScenarioConfig, sigma2: Optional[float] = None) -> "PowerProblem":
        """Problem at full transmit power `P_l = P_T` for a scenario."""
        return cls(
            sigma2=cfg.sigma2_w if sigma2 is None else sigma2,
            p_l_w=cfg.p_t_w,
            p_t_w=cfg.p_t_w,
            p_c_w=cfg.p_c_w,
            gamma_min=cfg.resolved_gamma_min,
        )

    @property
    def max_delta(self) -> float:
        return min(1.0, self.p_t_w / self.p_l_w)

    def normalized(self) -> "PowerProblem":
        return dataclasses.replace(self, sigma2=1.0)

    def snr_scale(self, gains: EffectiveGains) -> Tuple[float, float]:
        """SNR of each terminal at full power: `(P_l o_i / sigma2, P_l o_j / sigma2)`."""
        return self.p_l_w * gains.o_i / self.sigma2, self.p_l_w * gains.o_j / self.sigma2

    def min_delta(self, gains: EffectiveGains) -> float:
        """Smallest total fraction that meets both QoS constraints."""
        if self.gamma_min == 0:
            return 0.0
        a, b = self.snr_scale(gains)
        if a <= 0 or b <= 0:
            return math.inf
        g = self.gamma_min
        return g / a + g * (1.0 / b + g / a)

    def is_feasible(self, gains: EffectiveGains) -> bool:
        return self.min_delta(gains) <= self.max_delta * (1 + 1e-12)

    def split(self, rho_i: float, rho_j: float) -> PowerSplit:
        return PowerSplit(float(rho_i), float(rho_j), self.p_l_w, self.p_c_w)


@dataclasses.dataclass
class ScaCoefficients:
    """
    Coefficients of the lower bound `Psi log2(g) + Omega` of `log2(1 + g)`, tight at the expansion point.

    Args:
        psi_i (`float`): `Psi` of the strong terminal, in `[0, 1)`.
        psi_j (`float`): `Psi` of the weak terminal, in `[0, 1)`.
        omega_i (`float`): `Omega` of the strong terminal, in bits/s/Hz.
        omega_j (`float`): `Omega` of the weak terminal, in bits/s/Hz.
    """
    psi_i: float
    psi_j: float
    omega_i: float
    omega_j: float

    def surrogate_rate(self, gamma_i: float, gamma_j: float) -> float:
        """Lower bound of the sum rate at the SINRs `(gamma_i, gamma_j)`."""
        if not (gamma_i > 0 and gamma_j > 0):
            raise ValueError(f"SINRs must be > 0, got ({gamma_i}, {gamma_j})")
        return (
            self.psi_i * math.log2(gamma_i) + self.omega_i + self.psi_j * math.log2(gamma_j) + self.omega_j
        )


@dataclasses.dataclass
class DualVariables:
    """
    Multipliers of the QoS constraints (`lambda1`, `lambda2`), the power budget (`lambda3`) and the unit budget
    (`lambda4`). `step_scale` is the constant `c` of the diminishing step `c / sqrt(k)`.
    """
    lambda1: float = 0.0
    lambda2: float = 0.0
    lambda3: float = 0.0
    lambda4: float = 0.0
    step_scale: float = 0.1

    def __post_init__(self):
        if min(self.as_array()) < 0:
            raise ValueError(f"multipliers must be >= 0, got {tuple(self.as_array())}")
        if not self.step_scale > 0:
            raise ValueError(f"step_scale must be > 0, got {self.step_scale}")

    def as_array(self) -> np.ndarray:
        return np.array([self.lambda1, self.lambda2, self.lambda3, self.lambda4], dtype=float)


@dataclasses.dataclass
class KktPolynomial:
    """
    Stationarity condition `a2 rho^2 + a1 rho + a0 = 0` of the Lagrangian in `rho_i`, and its closed-form roots
    `(A +- sqrt(B)) / C`.
    """
    a2: float
    a1: float
    a0: float
    A: float
    B: float
    C: float
    form: str

    def residual(self, rho: float) -> float:
        return self.a2 * rho**2 + self.a1 * rho + self.a0


@dataclasses.dataclass
class DinkelbachState:
    """
    Progress of the Dinkelbach iteration.

    Args:
        phi (`float`):
            Current energy-efficiency parameter.
        eta (`float`):
            Residual `R - phi D` of the last accepted iterate.
        iteration (`int`):
            Number of accepted updates.
        trace (`List[Tuple[float, float, float, float]]`):
            `(phi, eta, rho_i, rho_j)` after every accepted update.
        phi_initial (`float`):
            Parameter the iteration started from.
        converged (`bool`):
            Whether the residual fell below the tolerance within the iteration budget.
        rejected (`bool`):
            Whether the loop stopped on an update that lowered the energy efficiency; `eta` is then the residual of
            that rejected update.
    """
    phi: float
    eta: float = math.inf
    iteration: int = 0
    trace: List[Tuple[float, float, float, float]] = dataclasses.field(default_factory=list)
    phi_initial: float = 0.0
    converged: bool = False
    rejected: bool = False


@dataclasses.dataclass
class RootContext:
    """Everything `select_root` needs to complete and rank candidate values of `rho_i`."""
    duals: DualVariables
    sca: ScaCoefficients
    gains: EffectiveGains
    phi: float
    problem: PowerProblem
    epsilon: float = 1e-6
    split_rule: str = "stationary"


_ZERO_DUALS = DualVariables()


def sca_coefficients(gamma_i: float, gamma_j: float) -> ScaCoefficients:
    """
    Expand the lower bound of both rates around the SINRs `(gamma_i, gamma_j)`.

    `Psi = g / (1 + g)` and `Omega = log2(1 + g) - Psi log2(g)`, so the bound equals `log2(1 + g)` at the expansion
    point.
    """
    if not gamma_i > 0 or not gamma_j > 0:
        raise ValueError(f"SINRs must be > 0 to expand the rate bound, got ({gamma_i}, {gamma_j})")
    psi_i = gamma_i / (1.0 + gamma_i)
    psi_j = gamma_j / (1.0 + gamma_j)
    return ScaCoefficients(
        psi_i=psi_i,
        psi_j=psi_j,
        omega_i=math.log2(1.0 + gamma_i) - psi_i * math.log2(gamma_i),
        omega_j=math.log2(1.0 + gamma_j) - psi_j * math.log2(gamma_j),
    )


def lagrangian_value(
    ps: PowerSplit,
    duals: DualVariables,
    sca: ScaCoefficients,
    gains: EffectiveGains,
    phi: float,
    gamma_min: float,
    sigma2: float,
    p_t_w: float,
) -> float:
    """
    Lagrangian of the bounded Dinkelbach problem:

        Psi_i log2(g_i) + Omega_i + Psi_j log2(g_j) + Omega_j - phi (P_l (rho_i + rho_j) + p_c)
          + lambda1 (P_l rho_i o_i - gamma_min sigma2)
          + lambda2 (P_l rho_j o_j - gamma_min (sigma2 + P_l rho_i o_j))
          + lambda3 (P_T - P_l (rho_i + rho_j))
          + lambda4 (1 - (rho_i + rho_j))
    """
    gamma_i = sinr_strong(ps, gains, sigma2)
    gamma_j = sinr_weak(ps, gains, sigma2)
    p = ps.p_l_w
    value = sca.surrogate_rate(gamma_i, gamma_j) - phi * ps.consumed_power_w
    value += duals.lambda1 * (p * ps.rho_i * gains.o_i - gamma_min * sigma2)
    value += duals.lambda2 * (p * ps.rho_j * gains.o_j - gamma_min * (sigma2 + p * ps.rho_i * gains.o_j))
    value += duals.lambda3 * (p_t_w - p * ps.delta)
    value += duals.lambda4 * (1.0 - ps.delta)
    return value


def kkt_polynomial(
    duals: DualVariables,
    sca: ScaCoefficients,
    gains: EffectiveGains,
    phi: float,
    p_l_w: float,
    sigma2: float,
    gamma_min: float,
    form: str = "derived",
) -> KktPolynomial:
    """
    Coefficients of the stationarity polynomial of the Lagrangian in `rho_i`.

    `form="derived"` differentiates the log2 Lagrangian, so that `Psi` enters as `Psi / ln 2`.
    `form="printed"` takes `Psi` without the `ln 2` scaling and `sigma` in the linear term; it agrees with the derived
    one at `sigma2 = P_l = 1` up to that `ln 2` factor.
    """
    l1, l2, l3, l4 = duals.as_array()
    o_i, o_j, p = gains.o_i, gains.o_j, p_l_w
    if form == "derived":
        psi_i, psi_j = sca.psi_i / _LN2, sca.psi_j / _LN2
        k = l1 * p * o_i - p * (phi + l3 + l2 * gamma_min * o_j) - l4
        a2 = p * o_j * k
        a1 = sigma2 * k + p * o_j * (psi_i - psi_j)
        a0 = psi_i * sigma2
        return KktPolynomial(a2, a1, a0, A=-a1, B=a1**2 - 4 * a2 * a0, C=2 * a2, form=form)
    if form == "printed":
        psi_i, psi_j = sca.psi_i, sca.psi_j
        sigma = math.sqrt(sigma2)
        kp = -l1 * o_i * p + (l4 + p * (l3 + phi + l2 * o_j * gamma_min)) * sigma2
        cross = o_j * p * (-psi_i + psi_j + l2 * gamma_min * sigma2)
        base = -l1 * o_i * p + (l4 + (l3 + phi) * p) * sigma2
        a2 = -o_j * p * kp
        a1 = -sigma * (base + cross)
        a0 = psi_i * sigma2
        A = sigma2 * ((-l1 * o_i * p + (l4 + (l3 + phi) * sigma2)) + cross)
        B = sigma2**2 * (4 * o_j * p * psi_i * kp + (base + cross) ** 2)
        C = -2 * o_j * p * kp
        return KktPolynomial(a2, a1, a0, A=A, B=B, C=C, form=form)
    raise ValueError(f"form must be 'derived' or 'printed', got {form!r}")


def kkt_root(
    duals: DualVariables,
    sca: ScaCoefficients,
    gains: EffectiveGains,
    phi: float,
    p_l_w: float,
    sigma2: float,
    gamma_min: float,
    form: str = "derived",
) -> List[float]:
    """
    Real stationary points `rho_i` in `(0, 1)`, ascending.

    A negative discriminant yields no candidate; a vanishing leading coefficient leaves the root of the linear
    remainder.
    """
    poly = kkt_polynomial(duals, sca, gains, phi, p_l_w, sigma2, gamma_min, form=form)
    scale = max(1.0, abs(poly.a1), abs(poly.a0))
    if abs(poly.C) <= 1e-15 * scale:
        if abs(poly.a1) <= 1e-15 * scale:
            return []
        roots = [-poly.a0 / poly.a1]
    else:
        B = poly.B
        if B < 0:
            if B < -1e-12 * max(1.0, poly.A**2):
                return []
            B = 0.0
        root = math.sqrt(B)
        roots = sorted({(poly.A - root) / poly.C, (poly.A + root) / poly.C})
    return [r for r in roots if 0.0 < r < 1.0]


def stationary_rho_j(
    duals: DualVariables,
    sca: ScaCoefficients,
    gains: EffectiveGains,
    phi: float,
    p_l_w: float,
    epsilon: float = 1e-6,
) -> float:
    """
    Maximizer in `rho_j` of the Lagrangian, `(Psi_j / ln 2) / (P_l (phi + lambda3) + lambda4 - lambda2 P_l o_j)`,
    clipped to `[epsilon, 1]`. A non-positive denominator means the Lagrangian grows with `rho_j`, giving 1.
    """
    denominator = p_l_w * (phi + duals.lambda3) + duals.lambda4 - duals.lambda2 * p_l_w * gains.o_j
    if denominator <= 0:
        return 1.0
    return float(np.clip(sca.psi_j / _LN2 / denominator, epsilon, 1.0))


def _complete(rho_i: float, context: RootContext) -> PowerSplit:
    if context.split_rule == "complement":
        rho_j = 1.0 - rho_i
    elif context.split_rule == "stationary":
        rho_j = stationary_rho_j(
            context.duals, context.sca, context.gains, context.phi, context.problem.p_l_w, context.epsilon
        )
    else:
        raise ValueError(f"split_rule must be 'stationary' or 'complement', got {context.split_rule!r}")
    eps = context.epsilon
    return context.problem.split(rho_i, float(np.clip(rho_j, eps, 1.0 - eps)))


def select_root(candidates: Sequence[float], context: RootContext) -> PowerSplit:
    """
    Complete each candidate `rho_i` with its `rho_j` and keep the split with the largest Lagrangian.

    Candidates outside `(0, 1)` are dropped; with none left the scan falls back to `{eps, 0.5, 1 - eps}`. Every value
    is clamped to `[eps, 1 - eps]`.

    Raises:
        `InfeasibleAllocationError`: the Lagrangian is undefined at every candidate.
    """
    eps = context.epsilon
    in_range = [float(c) for c in candidates if 0.0 < c < 1.0]
    if not in_range:
        in_range = [eps, 0.5, 1.0 - eps]
    best, best_value = None, -math.inf
    for candidate in in_range:
        ps = _complete(float(np.clip(candidate, eps, 1.0 - eps)), context)
        try:
            value = lagrangian_value(
                ps,
                context.duals,
                context.sca,
                context.gains,
                context.phi,
                context.problem.gamma_min,
                context.problem.sigma2,
                context.problem.p_t_w,
            )
        except ValueError:
            continue
        if math.isfinite(value) and value > best_value:
            best, best_value = ps, value
    if best is None:
        raise InfeasibleAllocationError(f"no admissible power split among candidates {in_range}")
    return best


def dual_update(
    duals: DualVariables, violations: Sequence[float], k: int, step: Optional[float] = None
) -> DualVariables:
    """
    Projected subgradient step `lambda <- max(0, lambda - (c / sqrt(k)) slack)`.

    `violations` holds the four constraint slacks, positive when the constraint holds.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    slacks = np.asarray(violations, dtype=float)
    if slacks.shape != (4,):
        raise ValueError(f"expected 4 constraint slacks, got shape {slacks.shape}")
    c = duals.step_scale if step is None else step
    updated = np.maximum(0.0, duals.as_array() - c / math.sqrt(k) * slacks)
    return DualVariables(*updated.tolist(), step_scale=duals.step_scale)


def constraint_slacks(ps: PowerSplit, gains: EffectiveGains, problem: PowerProblem) -> np.ndarray:
    """Slacks of the two QoS constraints (in noise units), the power budget (in units of `P_T`) and the unit budget."""
    a, b = problem.snr_scale(gains)
    g = problem.gamma_min
    return np.array(
        [
            a * ps.rho_i - g,
            b * ps.rho_j - g * (1.0 + b * ps.rho_i),
            (problem.p_t_w - problem.p_l_w * ps.delta) / problem.p_t_w,
            1.0 - ps.delta,
        ]
    )


def _true_sum_rate(rho_i: float, rho_j: float, gains: EffectiveGains, problem: PowerProblem) -> float:
    ps = problem.split(rho_i, rho_j)
    return rate(sinr_strong(ps, gains, problem.sigma2)) + rate(sinr_weak(ps, gains, problem.sigma2))


def _face_bounds(gains: EffectiveGains, problem: PowerProblem, epsilon: float) -> Tuple[float, float]:
    """Range of `rho_i` for which some `rho_j` completes a feasible split."""
    a, b = problem.snr_scale(gains)
    g = problem.gamma_min
    cap = problem.max_delta
    lo = max(g / a if g > 0 else 0.0, epsilon)
    hi = min((cap - (g / b if g > 0 else 0.0)) / (1.0 + g), cap - epsilon)
    return lo, hi


def repair_power_split(
    ps: PowerSplit, gains: EffectiveGains, problem: PowerProblem, epsilon: float = 1e-6
) -> PowerSplit:
    """
    Smallest lift of `ps` onto the QoS constraints. If the lifted split exceeds the budget, the split is replaced by
    the rate-maximizing point on the face `rho_i + rho_j = min(1, P_T / P_l)`.

    Raises:
        `InfeasibleAllocationError`: the QoS constraints cannot be met within the budget.
    """
    if not problem.is_feasible(gains):
        raise InfeasibleAllocationError(
            f"QoS needs a power fraction of {problem.min_delta(gains):.6g} but at most {problem.max_delta:.6g} is"
            " available"
        )
    a, b = problem.snr_scale(gains)
    g = problem.gamma_min
    cap = problem.max_delta
    lo, hi = _face_bounds(gains, problem, epsilon)
    rho_i = max(ps.rho_i, lo)
    rho_j = max(ps.rho_j, g * (1.0 / b + rho_i) if g > 0 else 0.0, epsilon)
    if rho_i + rho_j <= cap:
        return problem.split(rho_i, rho_j)
    if lo > hi * (1 + 1e-12):
        raise InfeasibleAllocationError(f"empty budget face: rho_i must lie in [{lo:.6g}, {hi:.6g}]")
    if hi - lo <= 1e-12:
        rho_i = lo
    else:
        result = optimize.minimize_scalar(
            lambda x: -_true_sum_rate(x, cap - x, gains, problem),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        rho_i = float(result.x)
        for end in (lo, hi):
            if _true_sum_rate(end, cap - end, gains, problem) > _true_sum_rate(rho_i, cap - rho_i, gains, problem):
                rho_i = end
    return problem.split(rho_i, cap - rho_i)


def _surrogate_objective(ps: PowerSplit, sca: ScaCoefficients, gains: EffectiveGains, phi: float, problem) -> float:
    return lagrangian_value(ps, _ZERO_DUALS, sca, gains, phi, problem.gamma_min, problem.sigma2, problem.p_t_w)


def _reduced_maximizer(
    sca: ScaCoefficients,
    gains: EffectiveGains,
    phi: float,
    problem: PowerProblem,
    epsilon: float,
    split_rule: str,
) -> PowerSplit:
    """
    Maximize the bounded Dinkelbach objective over `rho_i`, completing every `rho_i` with its best feasible `rho_j`.
    """
    _, b = problem.snr_scale(gains)
    g = problem.gamma_min
    cap = problem.max_delta
    lo, hi = _face_bounds(gains, problem, epsilon)
    unconstrained_j = stationary_rho_j(_ZERO_DUALS, sca, gains, phi, problem.p_l_w, epsilon)

    def complete(x):
        if split_rule == "complement":
            return problem.split(x, cap - x)
        floor = max(g * (1.0 / b + x) if g > 0 else 0.0, epsilon)
        return problem.split(x, min(max(unconstrained_j, floor), cap - x))

    def objective(x):
        return _surrogate_objective(complete(x), sca, gains, phi, problem)

    if hi - lo <= 1e-12 * max(1.0, hi):
        return complete(lo)
    grid = np.geomspace(lo, hi, _BRACKET_POINTS)
    values = [objective(x) for x in grid]
    k = int(np.argmax(values))
    left, right = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    result = optimize.minimize_scalar(
        lambda x: -objective(x), bounds=(left, right), method="bounded", options={"xatol": 1e-13}
    )
    x = float(result.x) if -result.fun >= values[k] else float(grid[k])
    return complete(x)


def _maximize_surrogate(
    start: PowerSplit,
    sca: ScaCoefficients,
    gains: EffectiveGains,
    phi: float,
    problem: PowerProblem,
    solver: SolverConfig,
) -> PowerSplit:
    """
    Maximize one bounded Dinkelbach problem. The multipliers follow the projected subgradient update; every
    primal response is repaired to feasibility and the best one is kept, together with the expansion point and the
    maximizer of the reduced one-dimensional problem.
    """
    eps = solver.rho_epsilon
    best, best_value = start, _surrogate_objective(start, sca, gains, phi, problem)

    def consider(ps):
        nonlocal best, best_value
        value = _surrogate_objective(ps, sca, gains, phi, problem)
        if value > best_value:
            best, best_value = ps, value

    duals = DualVariables(step_scale=solver.dual_step)
    steps = 0
    for k in range(1, solver.max_dual_steps + 1):
        steps = k
        roots = kkt_root(
            duals, sca, gains, phi, problem.p_l_w, problem.sigma2, problem.gamma_min, form=solver.kkt_form
        )
        context = RootContext(duals, sca, gains, phi, problem, epsilon=eps, split_rule=solver.split_rule)
        response = select_root(roots, context)
        consider(repair_power_split(response, gains, problem, eps))
        slacks = constraint_slacks(response, gains, problem)
        violation = max(0.0, -float(np.min(slacks)))
        slackness = float(np.max(np.abs(duals.as_array() * slacks)))
        if violation < 1e-6 and slackness < 1e-6:
            break
        duals = dual_update(duals, slacks, k)
    consider(_reduced_maximizer(sca, gains, phi, problem, eps, solver.split_rule))
    logger.debug(f"Dual loop stopped after {steps} steps with multipliers {duals.as_array()}")
    return best


def _dinkelbach_objective(ps: PowerSplit, gains: EffectiveGains, phi: float, problem: PowerProblem) -> float:
    return _true_sum_rate(ps.rho_i, ps.rho_j, gains, problem) - phi * ps.consumed_power_w


def _sca(
    start: PowerSplit, gains: EffectiveGains, phi: float, problem: PowerProblem, solver: SolverConfig
) -> PowerSplit:
    """Re-expand the rate bound around the current SINRs until the Dinkelbach objective settles."""
    ps = start
    value = _dinkelbach_objective(ps, gains, phi, problem)
    for _ in range(solver.max_sca_iters):
        sca = sca_coefficients(sinr_strong(ps, gains, problem.sigma2), sinr_weak(ps, gains, problem.sigma2))
        candidate = _maximize_surrogate(ps, sca, gains, phi, problem, solver)
        candidate_value = _dinkelbach_objective(candidate, gains, phi, problem)
        if candidate_value < value:
            break
        change = candidate_value - value
        ps, value = candidate, candidate_value
        if change < solver.tol_sca:
            break
    return ps


def dinkelbach_power_allocation(
    gains: EffectiveGains,
    problem: PowerProblem,
    solver: Optional[SolverConfig] = None,
    phi0: Optional[float] = None,
) -> Tuple[PowerSplit, DinkelbachState]:
    """
    Energy-efficiency maximizing power split for fixed effective gains.

    Args:
        gains ([`EffectiveGains`]):
            Gains of the strong and weak terminal, `o_i >= o_j`.
        problem ([`PowerProblem`]):
            Noise, power and QoS parameters.
        solver ([`SolverConfig`], *optional*):
            Tolerances and iteration budgets.
        phi0 (`float`, *optional*):
            Initial Dinkelbach parameter. Defaults to the energy efficiency of the initial split; when given, the first
            update is accepted unconditionally.

    Returns:
        `Tuple[PowerSplit, DinkelbachState]`: the split satisfies every constraint of the problem.

    Raises:
        `InfeasibleAllocationError`: the QoS constraints cannot be met within the budget.
    """
    solver = solver or SolverConfig()
    unit = problem.normalized()
    gains = gains.normalized(problem.sigma2)
    if not unit.is_feasible(gains):
        raise InfeasibleAllocationError(
            f"QoS needs a power fraction of {unit.min_delta(gains):.6g} but at most {unit.max_delta:.6g} is available"
        )
    if gains.o_i <= 0 or gains.o_j <= 0:
        raise InfeasibleAllocationError(f"zero effective gain ({gains.o_i}, {gains.o_j})")

    ps = repair_power_split(unit.split(0.3, 0.7), gains, unit, solver.rho_epsilon)
    current_ee = energy_efficiency(_true_sum_rate(ps.rho_i, ps.rho_j, gains, unit), ps)
    phi = current_ee if phi0 is None else float(phi0)
    state = DinkelbachState(phi=phi, phi_initial=phi)

    for t in range(1, solver.max_dinkelbach_iters + 1):
        candidate = _sca(ps, gains, phi, unit, solver)
        rate_sum = _true_sum_rate(candidate.rho_i, candidate.rho_j, gains, unit)
        new_ee = energy_efficiency(rate_sum, candidate)
        eta = rate_sum - phi * candidate.consumed_power_w
        if new_ee < current_ee and not (phi0 is not None and t == 1):
            state.eta = eta
            state.rejected = True
            state.converged = abs(eta) < solver.tol_eta
            if not state.converged:
                logger.warning(
                    f"Dinkelbach update {t} lowers EE ({new_ee:.6g} < {current_ee:.6g}) with eta = {eta:.3e}, "
                    "keeping the previous iterate"
                )
            break
        ps, current_ee, phi = candidate, new_ee, new_ee
        state.phi, state.eta, state.iteration = phi, eta, t
        state.trace.append((phi, eta, ps.rho_i, ps.rho_j))
        logger.debug(f"Dinkelbach {t}: phi = {phi:.8g}, eta = {eta:.3e}, rho = ({ps.rho_i:.6g}, {ps.rho_j:.6g})")
        if abs(eta) < solver.tol_eta:
            state.converged = True
            break
    if not (state.converged or state.rejected):
        logger.warning(
            f"Dinkelbach did not reach |eta| < {solver.tol_eta} in {solver.max_dinkelbach_iters} iterations"
        )
    return problem.split(ps.rho_i, ps.rho_j), state


def power_oracle_grid(gains: EffectiveGains, problem: PowerProblem, resolution: int = 1000) -> PowerSplit:
    """
    Exhaustive search of the best energy efficiency over the grid `linspace(0, 1, resolution)` squared. Meant as a
    reference for tests.
    """
    if resolution < 100:
        raise ValueError(f"resolution must be >= 100, got {resolution}")
    rho = np.linspace(0.0, 1.0, resolution)
    cap = problem.max_delta
    best, best_ee = None, -math.inf
    for rho_i in rho:
        rho_j = rho[rho_i + rho <= cap + 1e-12]
        if rho_j.size == 0:
            break
        row_i = np.full_like(rho_j, rho_i)
        feasible = qos_feasible_grid(row_i, rho_j, problem.p_l_w, gains, problem.sigma2, problem.gamma_min)
        if not feasible.any():
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            ee = sum_rate_grid(row_i, rho_j, problem.p_l_w, gains, problem.sigma2) / (
                problem.p_l_w * (rho_i + rho_j) + problem.p_c_w
            )
        ee = np.where(feasible & np.isfinite(ee), ee, -np.inf)
        k = int(np.argmax(ee))
        if ee[k] > best_ee:
            best, best_ee = problem.split(rho_i, rho_j[k]), float(ee[k])
    if best is None:
        raise InfeasibleAllocationError("no grid point satisfies the QoS constraints")
    return best
