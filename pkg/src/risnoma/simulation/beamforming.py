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
Step 2 of the alternating optimization: RIS phases for a fixed power split.

The rank-one matrix `Xi = xi xi^H` is relaxed to a unit-diagonal PSD matrix, the difference-of-logs rate is handled by
convex-concave iterations, and unit-modulus phases are recovered by Gaussian randomization.
"""

import dataclasses
import math
from typing import List, Optional, Tuple

import cvxpy as cp
import numpy as np

from .channel import ChannelRealization, PhaseShiftVector, _check_lengths
from .config import ScenarioConfig, SolverConfig
from .noma import PowerSplit, evaluate_link, sic_order
from ..utils import logging


logger = logging.get_logger(__name__)  # pylint: disable=invalid-name

_LN2 = math.log(2.0)

_STATUS = {cp.OPTIMAL: "optimal", cp.OPTIMAL_INACCURATE: "near-optimal"}


@dataclasses.dataclass
class CascadeMatrices:
    """
    Rank-one matrices of the relaxed rates.

    Args:
        g_i (`np.ndarray`): `P_l rho_i H_i H_i^H`, signal of the strong terminal.
        g_j (`np.ndarray`): `P_l rho_j H_j H_j^H`, signal of the weak terminal.
        g_bar_j (`np.ndarray`): `P_l rho_i H_j H_j^H`, interference at the weak terminal.
    """
    g_i: np.ndarray
    g_j: np.ndarray
    g_bar_j: np.ndarray

    @property
    def num_elements(self) -> int:
        return self.g_i.shape[0]


@dataclasses.dataclass
class CcpMajorant:
    """
    First-order expansion of `log2(Tr(Xi G_bar_j) + sigma2)` at `xi_k`, an upper bound of that concave term.
    """
    xi_k: np.ndarray
    anchor: float
    g_bar_j: np.ndarray

    def value(self, xi: np.ndarray) -> float:
        return math.log2(self.anchor) + _trace(self.g_bar_j, xi - self.xi_k) / (_LN2 * self.anchor)

    def directional_derivative(self, direction: np.ndarray) -> float:
        return _trace(self.g_bar_j, direction) / (_LN2 * self.anchor)


@dataclasses.dataclass
class SdpSolution:
    """
    Solution of one relaxed subproblem.

    Args:
        xi_matrix (`np.ndarray`):
            Hermitian `M x M` matrix with unit diagonal.
        objective (`float`):
            Convexified rate at `xi_matrix`, in bits/s/Hz.
        solver_status (`str`):
            One of `"optimal"`, `"near-optimal"` or `"infeasible"`.
        xi_hat (`np.ndarray`, *optional*):
            Auxiliary vector of the rank-one penalty variant.
        qos_relaxed (`bool`, *optional*, defaults to `False`):
            Whether the QoS constraints were dropped to reach a feasible problem.
    """
    xi_matrix: Optional[np.ndarray]
    objective: float
    solver_status: str
    xi_hat: Optional[np.ndarray] = None
    qos_relaxed: bool = False

    @property
    def feasible(self) -> bool:
        return self.solver_status != "infeasible"


@dataclasses.dataclass
class BeamformingResult:
    """
    Outcome of `passive_beamforming`.

    Args:
        phases ([`PhaseShiftVector`]): Phases to apply.
        sum_rate (`float`): Sum rate with the direct links, in bits/s/Hz.
        status (`str`): `"improved"`, `"kept-incoming"` or `"infeasible"`.
        qos_relaxed (`bool`): Whether the QoS constraints were dropped on the RIS-only gains.
        qos_met (`bool`): Whether the recovered phases meet the QoS constraints on the RIS-only gains.
        ccp_objectives (`List[float]`): Relaxed rate after each convex-concave iteration.
    """
    phases: PhaseShiftVector
    sum_rate: float
    status: str
    qos_relaxed: bool = False
    qos_met: bool = True
    ccp_objectives: List[float] = dataclasses.field(default_factory=list)


def _trace(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.real(np.trace(a @ b)))


def real_embedding(a: np.ndarray) -> np.ndarray:
    """Real symmetric matrix `[[Re A, -Im A], [Im A, Re A]]` of a Hermitian matrix `A`."""
    a = np.asarray(a, dtype=complex)
    return np.block([[a.real, -a.imag], [a.imag, a.real]])


def complex_from_embedding(x: np.ndarray) -> np.ndarray:
    """Inverse of `real_embedding`."""
    x = np.asarray(x, dtype=float)
    m = x.shape[0] // 2
    if x.shape != (2 * m, 2 * m):
        raise ValueError(f"expected a square matrix of even size, got shape {x.shape}")
    return x[:m, :m] + 1j * x[m:, :m]


def build_cascade_matrices(h_hat_i: np.ndarray, h_hat_j: np.ndarray, ps: PowerSplit) -> CascadeMatrices:
    """Scaled outer products of the cascaded vectors, so that `Tr(xi xi^H G) = P_l rho |xi^H H|^2`."""
    h_hat_i = np.asarray(h_hat_i, dtype=complex)
    h_hat_j = np.asarray(h_hat_j, dtype=complex)
    _check_lengths(h_hat_i=h_hat_i, h_hat_j=h_hat_j)
    outer_i = np.outer(h_hat_i, h_hat_i.conj())
    outer_j = np.outer(h_hat_j, h_hat_j.conj())
    return CascadeMatrices(
        g_i=ps.p_l_w * ps.rho_i * outer_i,
        g_j=ps.p_l_w * ps.rho_j * outer_j,
        g_bar_j=ps.p_l_w * ps.rho_i * outer_j,
    )


def dc_objective(xi: np.ndarray, cm: CascadeMatrices, sigma2: float) -> float:
    """
    RIS-only sum rate written as a difference of logs:

        log2(sigma2 + Tr(Xi G_i)) - log2(sigma2)
          + log2(Tr(Xi G_bar_j) + sigma2 + Tr(Xi G_j)) - log2(Tr(Xi G_bar_j) + sigma2)
    """
    t_i = _trace(xi, cm.g_i)
    t_j = _trace(xi, cm.g_j)
    t_bar = _trace(xi, cm.g_bar_j)
    arguments = (sigma2 + t_i, sigma2, t_bar + sigma2 + t_j, t_bar + sigma2)
    if min(arguments) <= 0:
        raise ValueError(f"log arguments must be > 0, got {arguments}")
    return (
        math.log2(arguments[0]) - math.log2(arguments[1]) + math.log2(arguments[2]) - math.log2(arguments[3])
    )


def ccp_linearize(xi_k: np.ndarray, cm: CascadeMatrices, sigma2: float) -> CcpMajorant:
    """Linearize the subtracted concave term of `dc_objective` at `xi_k`."""
    anchor = _trace(xi_k, cm.g_bar_j) + sigma2
    if not anchor > 0:
        raise ValueError(f"Tr(Xi_k G_bar_j) + sigma2 must be > 0, got {anchor}")
    return CcpMajorant(xi_k=np.array(xi_k, dtype=complex), anchor=anchor, g_bar_j=cm.g_bar_j)


def surrogate_objective(xi: np.ndarray, majorant: CcpMajorant, cm: CascadeMatrices, sigma2: float) -> float:
    """`dc_objective` with the subtracted term replaced by the majorant; a lower bound that is tight at `xi_k`."""
    t_i = _trace(xi, cm.g_i)
    t_all = _trace(xi, cm.g_j + cm.g_bar_j)
    return (
        math.log2(sigma2 + t_i) - math.log2(sigma2) + math.log2(t_all + sigma2) - majorant.value(xi)
    )


def _trace_expression(g: np.ndarray, x) -> cp.Expression:
    """`Re Tr(G X)` written elementwise, so the coefficient has `M^2` entries instead of `M^3`."""
    return cp.real(cp.sum(cp.multiply(g.T, x)))


class RelaxedProgram:
    """
    Relaxed subproblem of one passive beamforming call.

    The cascade matrices stay fixed while the convex-concave anchor moves, so each program is built and canonicalized
    once and every later solve only updates the slope of the linearized term (and the rank-one anchor when the
    penalty is on). Repeated solves are warm-started.

    Args:
        cm ([`CascadeMatrices`]):
            Cascade matrices of the fixed power split.
        gamma_min_bar (`float`):
            SINR threshold on the RIS-only gains.
        sigma2 (`float`):
            Noise power.
        solver ([`SolverConfig`], *optional*):
            Embedding, solver and rank-one penalty options.
    """

    def __init__(
        self, cm: CascadeMatrices, gamma_min_bar: float, sigma2: float, solver: Optional[SolverConfig] = None
    ):
        self.cm = cm
        self.gamma_min_bar = gamma_min_bar
        self.sigma2 = sigma2
        self.solver = solver or SolverConfig()
        self.num_elements = cm.num_elements
        if self.solver.rank_one_penalty and self.solver.sdp_embedding != "hermitian":
            raise ValueError("the rank-one penalty needs the Hermitian program")
        self._slope = cp.Parameter(nonneg=True)
        self._anchor_re = cp.Parameter(self.num_elements)
        self._anchor_im = cp.Parameter(self.num_elements)
        self._programs = {}

    @property
    def solver_name(self) -> Optional[str]:
        if self.solver.sdp_solver is not None:
            return self.solver.sdp_solver
        return cp.SCS if self.num_elements > self.solver.sdp_first_order_above else None

    def _traces(self, x, embed: bool):
        gs = (self.cm.g_i, self.cm.g_j, self.cm.g_bar_j)
        if embed:
            return [_trace_expression(real_embedding(g / self.sigma2), x) / 2 for g in gs]
        return [_trace_expression(g / self.sigma2, x) for g in gs]

    def _finish(self, t_i, t_j, t_bar, constraints, with_qos, bonus=0):
        objective = (cp.log(1 + t_i) + cp.log(1 + t_j + t_bar)) / _LN2 - self._slope * t_bar + bonus
        if with_qos:
            constraints = constraints + [t_i >= self.gamma_min_bar, t_j >= self.gamma_min_bar * (t_bar + 1)]
        return cp.Problem(cp.Maximize(objective), constraints)

    def _hermitian(self, with_qos: bool):
        m = self.num_elements
        bonus = 0
        if self.solver.rank_one_penalty:
            z = cp.Variable((m + 1, m + 1), hermitian=True)
            xi, xi_hat = z[:m, :m], z[:m, m]
            constraints = [z >> 0, cp.real(z[m, m]) == 1]
            linear = self._anchor_re @ cp.real(xi_hat) + self._anchor_im @ cp.imag(xi_hat)
            bonus = 2 * self.solver.rank_one_mu * linear
        else:
            z = xi = cp.Variable((m, m), hermitian=True)
            constraints = [xi >> 0]
        constraints.append(cp.real(cp.diag(xi)) == 1)
        problem = self._finish(*self._traces(xi, embed=False), constraints, with_qos, bonus)

        def recover():
            value = np.asarray(z.value)
            if self.solver.rank_one_penalty:
                return value[:m, :m], value[:m, m]
            return value, None

        return problem, recover

    def _embedded(self, with_qos: bool):
        m = self.num_elements
        x = cp.Variable((2 * m, 2 * m), symmetric=True)
        constraints = [
            x >> 0,
            x[:m, :m] == x[m:, m:],
            x[:m, m:] == -x[m:, :m],
            cp.diag(x[:m, :m]) == 1,
        ]
        problem = self._finish(*self._traces(x, embed=True), constraints, with_qos)

        def recover():
            return complex_from_embedding(x.value), None

        return problem, recover

    def _program(self, with_qos: bool):
        if with_qos not in self._programs:
            build = self._embedded if self.solver.sdp_embedding == "real" else self._hermitian
            self._programs[with_qos] = build(with_qos)
        return self._programs[with_qos]

    def solve(
        self, majorant: CcpMajorant, with_qos: bool = True, xi_hat_k: Optional[np.ndarray] = None
    ) -> SdpSolution:
        """Solve the relaxation linearized at `majorant`; failures come back as `solver_status="infeasible"`."""
        problem, recover = self._program(with_qos)
        self._slope.value = self.sigma2 / (_LN2 * majorant.anchor)
        anchor = np.ones(self.num_elements, dtype=complex) if xi_hat_k is None else np.asarray(xi_hat_k, dtype=complex)
        self._anchor_re.value = anchor.real
        self._anchor_im.value = anchor.imag
        try:
            problem.solve(solver=self.solver_name, warm_start=True)
        except cp.error.SolverError as e:
            logger.warning(f"SDP solver failed: {e}")
            return SdpSolution(None, -math.inf, "infeasible")
        status = _STATUS.get(problem.status, "infeasible")
        if status == "infeasible":
            logger.debug(f"SDP subproblem status {problem.status}")
            return SdpSolution(None, -math.inf, status)
        xi, xi_hat = recover()
        xi = (xi + xi.conj().T) / 2
        try:
            objective = surrogate_objective(xi, majorant, self.cm, self.sigma2)
        except ValueError:
            return SdpSolution(None, -math.inf, "infeasible")
        return SdpSolution(xi, objective, status, xi_hat=xi_hat)


def solve_sdp_subproblem(
    majorant: CcpMajorant,
    cm: CascadeMatrices,
    gamma_min_bar: float,
    sigma2: float,
    M: int,
    solver: Optional[SolverConfig] = None,
    with_qos: bool = True,
    xi_hat_k: Optional[np.ndarray] = None,
) -> SdpSolution:
    """
    Maximize the convexified rate over unit-diagonal PSD matrices, the rank-one constraint dropped.

    The QoS constraints read `Tr(Xi G_i) >= gamma_min_bar sigma2` and
    `Tr(Xi G_j) >= gamma_min_bar (Tr(Xi G_bar_j) + sigma2)`. Solver failures are reported through
    `solver_status="infeasible"` and never raised. A single solve; `passive_beamforming` keeps one
    [`RelaxedProgram`] across its iterations instead.
    """
    if cm.num_elements != M:
        raise ValueError(f"cascade matrices have {cm.num_elements} elements, expected {M}")
    return RelaxedProgram(cm, gamma_min_bar, sigma2, solver).solve(majorant, with_qos, xi_hat_k)


def _quadratic_forms(candidates: np.ndarray, g: np.ndarray) -> np.ndarray:
    """`xi^H G xi` for every row `xi` of `candidates`."""
    return np.real(np.einsum("nm,mk,nk->n", candidates.conj(), g, candidates))


def _rank_candidates(
    candidates: np.ndarray, cm: CascadeMatrices, gamma_min_bar: float, sigma2: float
) -> Tuple[np.ndarray, np.ndarray]:
    t_i = _quadratic_forms(candidates, cm.g_i)
    t_j = _quadratic_forms(candidates, cm.g_j)
    t_bar = _quadratic_forms(candidates, cm.g_bar_j)
    rates = np.log2(1 + t_i / sigma2) + np.log2(1 + t_j / (t_bar + sigma2))
    feasible = (t_i >= gamma_min_bar * sigma2) & (t_j >= gamma_min_bar * (t_bar + sigma2))
    return rates, feasible


def _unit_modulus(z: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    magnitude = np.abs(z)
    zero = magnitude == 0
    if np.any(zero):
        z = np.where(zero, np.exp(1j * rng.uniform(0.0, 2 * np.pi, size=z.shape)), z)
        magnitude = np.abs(z)
    return z / magnitude


def gaussian_randomization(
    sol: SdpSolution,
    cm: CascadeMatrices,
    gamma_min_bar: float,
    sigma2: float,
    n_samples: int = 200,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[PhaseShiftVector, bool]:
    """
    Recover unit-modulus phases from a relaxed solution.

    Draws `z ~ CN(0, Xi)`, projects every entry onto the unit circle and adds the projection of the dominant
    eigenvector. The candidate with the largest RIS-only sum rate among those meeting the QoS constraints is kept;
    if none meets them the best candidate is returned with the flag `False`. The global phase is fixed so that the
    first element equals 1.

    Returns:
        `Tuple[PhaseShiftVector, bool]`: the phases and whether they meet the QoS constraints.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    if sol.xi_matrix is None:
        raise ValueError("cannot randomize an infeasible SDP solution")
    rng = rng if rng is not None else np.random.default_rng(0)
    xi = sol.xi_matrix
    m = xi.shape[0]
    eigenvalues, eigenvectors = np.linalg.eigh(xi)
    factor = eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))
    white = (rng.standard_normal((n_samples, m)) + 1j * rng.standard_normal((n_samples, m))) / np.sqrt(2.0)
    samples = white @ factor.T
    candidates = np.vstack([eigenvectors[:, -1][None, :], samples])
    candidates = _unit_modulus(candidates, rng)
    candidates = candidates * np.conj(candidates[:, :1])
    rates, feasible = _rank_candidates(candidates, cm, gamma_min_bar, sigma2)
    pool = np.flatnonzero(feasible) if feasible.any() else np.arange(len(candidates))
    best = pool[int(np.argmax(rates[pool]))]
    logger.debug(
        f"Randomization: {int(feasible.sum())}/{len(candidates)} candidates meet QoS, best rate {rates[best]:.6g}"
    )
    return PhaseShiftVector.from_xi(candidates[best]), bool(feasible[best])


def reduced_sum_rate(
    channels: ChannelRealization, phases: PhaseShiftVector, ps: PowerSplit, strong_index: int = 0
) -> float:
    """Sum rate over the RIS paths alone, with `ps.rho_i` on `strong_index`."""
    weak_index = 1 - strong_index
    cm = build_cascade_matrices(channels.cascade(strong_index), channels.cascade(weak_index), ps)
    xi = phases.xi
    return dc_objective(np.outer(xi, xi.conj()), cm, channels.noise_power_w)


def passive_beamforming(
    channels: ChannelRealization,
    ps: PowerSplit,
    cfg: ScenarioConfig,
    phases: Optional[PhaseShiftVector] = None,
    rng: Optional[np.random.Generator] = None,
) -> BeamformingResult:
    """
    RIS phases maximizing the sum rate for a fixed power split.

    Convex-concave iterations linearize the interference term at the current relaxed matrix and solve the relaxed
    program until the relaxed rate changes by less than `cfg.solver.tol_ccp`. Unit-modulus phases are then
    recovered by Gaussian randomization. The direct links do not enter the optimization, but they are included in the
    reported sum rate: if the recovered phases do worse than `phases` on that rate, `phases` is kept.

    Args:
        channels ([`ChannelRealization`]):
            Channel draw with at least one RIS element.
        ps ([`PowerSplit`]):
            Fixed power split, `rho_i` on the stronger terminal.
        cfg ([`ScenarioConfig`]):
            Provides the solver options and `gamma_min_bar`.
        phases ([`PhaseShiftVector`], *optional*):
            Incoming phases; all ones by default.
        rng (`np.random.Generator`, *optional*):
            Source of the randomization samples.
    """
    m = channels.num_elements
    if m < 1:
        raise ValueError("passive beamforming needs at least one RIS element")
    solver = cfg.solver
    sigma2 = channels.noise_power_w
    gamma_min_bar = cfg.resolved_gamma_min_bar
    incoming = phases if phases is not None else PhaseShiftVector.ones(m)
    incoming_rate = evaluate_link(channels, incoming, ps).sum_rate

    strong, weak, _ = sic_order(*channels.effective_gains(incoming))
    h_i, h_j = channels.cascade(strong), channels.cascade(weak)
    if not (np.any(h_i) and np.any(h_j)):
        raise ValueError("cascaded channels must be nonzero")
    cm = build_cascade_matrices(h_i, h_j, ps)

    xi_vector = incoming.xi
    xi_k = np.outer(xi_vector, xi_vector.conj())
    xi_hat_k = xi_vector.copy()
    program = RelaxedProgram(cm, gamma_min_bar, sigma2, solver)
    value = dc_objective(xi_k, cm, sigma2)
    with_qos, qos_relaxed = True, False
    last: Optional[SdpSolution] = None
    objectives = []
    for k in range(solver.ccp_iters):
        majorant = ccp_linearize(xi_k, cm, sigma2)
        sol = program.solve(majorant, with_qos, xi_hat_k)
        if not sol.feasible and k == 0 and with_qos:
            logger.warning("Relaxed beamforming problem infeasible with QoS on the RIS-only gains, dropping QoS")
            with_qos, qos_relaxed = False, True
            sol = program.solve(majorant, with_qos, xi_hat_k)
        if not sol.feasible:
            break
        sol.qos_relaxed = qos_relaxed
        new_value = dc_objective(sol.xi_matrix, cm, sigma2)
        if k > 0 and new_value < value - 1e-9:
            logger.debug(f"CCP iteration {k + 1} lowered the relaxed rate, stopping")
            break
        change = new_value - value
        last, xi_k, value = sol, sol.xi_matrix, new_value
        if sol.xi_hat is not None:
            xi_hat_k = sol.xi_hat
        objectives.append(new_value)
        logger.debug(f"CCP iteration {k + 1}: relaxed rate {new_value:.8g} ({sol.solver_status})")
        if k > 0 and abs(change) < solver.tol_ccp:
            break

    if last is None:
        logger.warning("Relaxed beamforming problem infeasible, keeping the incoming phases")
        return BeamformingResult(incoming, incoming_rate, "infeasible", qos_relaxed, False, objectives)

    rng = rng if rng is not None else np.random.default_rng(0)
    recovered, qos_met = gaussian_randomization(last, cm, gamma_min_bar, sigma2, solver.randomization_samples, rng)
    recovered_rate = evaluate_link(channels, recovered, ps).sum_rate
    if recovered_rate < incoming_rate:
        logger.debug(f"Recovered phases give {recovered_rate:.6g} < {incoming_rate:.6g}, keeping the incoming phases")
        return BeamformingResult(incoming, incoming_rate, "kept-incoming", qos_relaxed, qos_met, objectives)
    return BeamformingResult(recovered, recovered_rate, "improved", qos_relaxed, qos_met, objectives)


def beamforming_oracle_grid(
    channels: ChannelRealization,
    ps: PowerSplit,
    grid_points: int = 360,
    gamma_min_bar: float = 0.0,
    strong_index: int = 0,
) -> PhaseShiftVector:
    """
    Exhaustive search of the RIS-only sum rate over a uniform phase grid, the first element fixed to 1. Meant as a
    reference for tests with at most 3 elements. Grid points meeting the QoS constraints are preferred.
    """
    m = channels.num_elements
    if not 1 <= m <= 3:
        raise ValueError(f"the phase grid oracle supports 1 to 3 RIS elements, got {m}")
    if grid_points < 2:
        raise ValueError(f"grid_points must be >= 2, got {grid_points}")
    if m == 1:
        return PhaseShiftVector.ones(1)
    weak_index = 1 - strong_index
    cm = build_cascade_matrices(channels.cascade(strong_index), channels.cascade(weak_index), ps)
    angles = np.linspace(0.0, 2 * np.pi, grid_points, endpoint=False)
    mesh = np.meshgrid(*([angles] * (m - 1)), indexing="ij")
    free = np.stack([np.exp(1j * a.reshape(-1)) for a in mesh], axis=1)
    candidates = np.hstack([np.ones((free.shape[0], 1), dtype=complex), free])
    rates, feasible = _rank_candidates(candidates, cm, gamma_min_bar, channels.noise_power_w)
    pool = np.flatnonzero(feasible) if feasible.any() else np.arange(len(candidates))
    best = pool[int(np.argmax(rates[pool]))]
    return PhaseShiftVector.from_xi(candidates[best])
