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

import math

import numpy as np
import pytest

from unittest import TestCase, mock
from parameterized import parameterized

from risnoma.simulation.config import ScenarioConfig, SolverConfig
from risnoma.simulation.noma import EffectiveGains, PowerSplit, check_constraints, energy_efficiency, rate, sinr_strong, sinr_weak
from risnoma.simulation.power_alloc import (
    DualVariables,
    InfeasibleAllocationError,
    PowerProblem,
    RootContext,
    ScaCoefficients,
    constraint_slacks,
    dinkelbach_power_allocation,
    dual_update,
    kkt_polynomial,
    kkt_root,
    lagrangian_value,
    power_oracle_grid,
    repair_power_split,
    sca_coefficients,
    select_root,
    stationary_rho_j,
)
from .testing_utils import slow


LN2 = math.log(2.0)


def _ee(ps, gains, sigma2):
    return energy_efficiency(rate(sinr_strong(ps, gains, sigma2)) + rate(sinr_weak(ps, gains, sigma2)), ps)


def _random_instances(count, seed=0, gamma_min=0.2):
    rng = np.random.default_rng(seed)
    instances = []
    while len(instances) < count:
        o_j = rng.uniform(0.2, 2.0)
        gains = EffectiveGains(o_j + rng.uniform(0.0, 4.0), o_j)
        problem = PowerProblem(sigma2=1.0, p_l_w=rng.uniform(2.0, 20.0), p_t_w=20.0, p_c_w=1.0, gamma_min=gamma_min)
        if problem.is_feasible(gains):
            instances.append((gains, problem))
    return instances


# Psi = 0.5 on both terminals; the Omegas do not enter the stationarity condition.
_HALF_SCA = ScaCoefficients(psi_i=0.5, psi_j=0.5, omega_i=0.0, omega_j=0.0)


class PowerProblemTestCase(TestCase):
    def test_from_config(self):
        problem = PowerProblem.from_config(ScenarioConfig(p_t_dbm=40.0, noise_power_w=2.0))
        self.assertAlmostEqual(problem.p_t_w, 10.0)
        self.assertEqual(problem.p_l_w, problem.p_t_w)
        self.assertEqual(problem.sigma2, 2.0)
        self.assertAlmostEqual(problem.gamma_min, math.sqrt(2) - 1)

    def test_max_delta(self):
        self.assertEqual(PowerProblem(1.0, 2.0, 1.0).max_delta, 0.5)
        self.assertEqual(PowerProblem(1.0, 1.0, 3.0).max_delta, 1.0)

    def test_min_delta(self):
        problem = PowerProblem(1.0, 1.0, 1.0, gamma_min=1.0)
        self.assertAlmostEqual(problem.min_delta(EffectiveGains(4.0, 2.0)), 1.0)
        self.assertTrue(problem.is_feasible(EffectiveGains(4.0, 2.0)))
        self.assertFalse(problem.is_feasible(EffectiveGains(4.0, 1.0)))

    def test_invalid(self):
        with pytest.raises(ValueError, match="sigma2"):
            PowerProblem(0.0, 1.0, 1.0)


class ScaTestCase(TestCase):
    def test_lower_bound(self):
        rng = np.random.default_rng(0)
        for expansion, gamma in rng.uniform(1e-3, 1e3, size=(5000, 2)):
            sca = sca_coefficients(expansion, expansion)
            bound = sca.psi_i * math.log2(gamma) + sca.omega_i
            self.assertLessEqual(bound, math.log2(1 + gamma) + 1e-12)

    def test_tight_at_expansion_point(self):
        for gamma in (1e-3, 0.5, 1.0, 40.0, 1e4):
            sca = sca_coefficients(gamma, 2 * gamma)
            self.assertAlmostEqual(sca.surrogate_rate(gamma, 2 * gamma), rate(gamma) + rate(2 * gamma), delta=1e-12)

    def test_psi_range(self):
        sca = sca_coefficients(3.0, 0.25)
        self.assertAlmostEqual(sca.psi_i, 0.75)
        self.assertAlmostEqual(sca.psi_j, 0.2)

    def test_nonpositive_sinr(self):
        with pytest.raises(ValueError):
            sca_coefficients(0.0, 1.0)


class KktTestCase(TestCase):
    def test_closed_form_root(self):
        roots = kkt_root(DualVariables(), _HALF_SCA, EffectiveGains(4.0, 1.0), 1.0, 1.0, 1.0, 0.0)
        self.assertEqual(len(roots), 1)
        # rho^2 + rho - 0.5 / ln 2 = 0
        expected = (-1 + math.sqrt(1 + 2 / LN2)) / 2
        self.assertAlmostEqual(roots[0], expected, places=12)
        self.assertAlmostEqual(roots[0], 0.4855, delta=1e-4)

    def test_residual_at_roots(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            duals = DualVariables(*rng.uniform(0.0, 0.5, size=4))
            sca = sca_coefficients(*rng.uniform(0.1, 20.0, size=2))
            o_j = rng.uniform(0.1, 2.0)
            gains = EffectiveGains(o_j + rng.uniform(0.0, 3.0), o_j)
            args = (duals, sca, gains, rng.uniform(0.0, 2.0), rng.uniform(0.5, 5.0), 1.0, rng.uniform(0.0, 1.0))
            poly = kkt_polynomial(*args)
            for root in kkt_root(*args):
                self.assertTrue(0.0 < root < 1.0)
                self.assertLess(abs(poly.residual(root)), 1e-9 * max(1.0, abs(poly.a2), abs(poly.a1), abs(poly.a0)))

    def test_double_root(self):
        sca = ScaCoefficients(psi_i=0.25 * LN2, psi_j=LN2, omega_i=0.0, omega_j=0.0)
        duals = DualVariables(lambda1=0.25)
        poly = kkt_polynomial(duals, sca, EffectiveGains(8.0, 4.0), 1.0, 1.0, 1.0, 0.0)
        self.assertAlmostEqual(poly.a2, 4.0, places=12)
        self.assertAlmostEqual(poly.a1, -2.0, places=12)
        self.assertAlmostEqual(poly.a0, 0.25, places=12)
        roots = kkt_root(duals, sca, EffectiveGains(8.0, 4.0), 1.0, 1.0, 1.0, 0.0)
        self.assertGreaterEqual(len(roots), 1)
        for root in roots:
            self.assertAlmostEqual(root, 0.25, delta=1e-6)

    def test_printed_form_matches_derived_at_unit_noise(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            duals = DualVariables(*rng.uniform(0.0, 0.3, size=4))
            psi_i, psi_j = rng.uniform(0.1, 0.9, size=2)
            printed = ScaCoefficients(psi_i, psi_j, 0.0, 0.0)
            derived = ScaCoefficients(psi_i * LN2, psi_j * LN2, 0.0, 0.0)
            gains = EffectiveGains(3.0, 1.0)
            phi, gamma_min = rng.uniform(0.0, 2.0), rng.uniform(0.0, 1.0)
            np.testing.assert_allclose(
                kkt_root(duals, printed, gains, phi, 1.0, 1.0, gamma_min, form="printed"),
                kkt_root(duals, derived, gains, phi, 1.0, 1.0, gamma_min, form="derived"),
                rtol=1e-9,
                atol=1e-12,
            )

    def test_unknown_form(self):
        with pytest.raises(ValueError, match="form"):
            kkt_polynomial(DualVariables(), _HALF_SCA, EffectiveGains(4.0, 1.0), 1.0, 1.0, 1.0, 0.0, form="exact")

    def test_root_maximizes_lagrangian(self):
        gains, problem = EffectiveGains(4.0, 1.0), PowerProblem(1.0, 1.0, 1.0)
        context = RootContext(DualVariables(), _HALF_SCA, gains, 1.0, problem)
        best = select_root(kkt_root(DualVariables(), _HALF_SCA, gains, 1.0, 1.0, 1.0, 0.0), context)
        grid = np.linspace(0.001, 0.999, 999)
        values = [
            lagrangian_value(PowerSplit(x, best.rho_j, 1.0), DualVariables(), _HALF_SCA, gains, 1.0, 0.0, 1.0, 1.0)
            for x in grid
        ]
        self.assertAlmostEqual(best.rho_i, grid[int(np.argmax(values))], delta=1e-3)

    def test_stationary_rho_j(self):
        sca = ScaCoefficients(0.5 * LN2, 0.5 * LN2, 0.0, 0.0)
        self.assertAlmostEqual(stationary_rho_j(DualVariables(), sca, EffectiveGains(4.0, 1.0), 1.0, 1.0), 0.5)
        growing = DualVariables(lambda2=5.0)
        self.assertEqual(stationary_rho_j(growing, sca, EffectiveGains(4.0, 1.0), 1.0, 1.0), 1.0)

    def test_select_root_fallback(self):
        context = RootContext(DualVariables(), _HALF_SCA, EffectiveGains(4.0, 1.0), 1.0, PowerProblem(1.0, 1.0, 1.0))
        best = select_root([-0.2, 1.5], context)
        self.assertIn(best.rho_i, (1e-6, 0.5, 1.0 - 1e-6))

    def test_complement_split_rule(self):
        context = RootContext(
            DualVariables(), _HALF_SCA, EffectiveGains(4.0, 1.0), 1.0, PowerProblem(1.0, 1.0, 1.0),
            split_rule="complement",
        )
        best = select_root([0.3], context)
        self.assertAlmostEqual(best.rho_i + best.rho_j, 1.0)


class DualUpdateTestCase(TestCase):
    def test_projection(self):
        duals = dual_update(DualVariables(lambda1=0.05, step_scale=0.1), [1.0, 0.0, 0.0, 0.0], 1)
        self.assertEqual(duals.lambda1, 0.0)
        duals = dual_update(DualVariables(step_scale=0.1), [-1.0, 0.0, 0.0, -2.0], 4)
        self.assertAlmostEqual(duals.lambda1, 0.05)
        self.assertAlmostEqual(duals.lambda4, 0.1)

    def test_converges_on_toy_problem(self):
        # maximize ln x - x subject to x >= 2: the response to lambda is x = 1 / (1 - lambda), lambda* = 0.5
        duals = DualVariables(step_scale=0.1)
        for k in range(1, 501):
            x = 1.0 / (1.0 - duals.lambda1)
            duals = dual_update(duals, [x - 2.0, 0.0, 0.0, 0.0], k)
        self.assertAlmostEqual(duals.lambda1, 0.5, delta=1e-3)

    def test_invalid(self):
        with pytest.raises(ValueError, match="k must be"):
            dual_update(DualVariables(), [0.0] * 4, 0)
        with pytest.raises(ValueError, match="4 constraint slacks"):
            dual_update(DualVariables(), [0.0] * 3, 1)
        with pytest.raises(ValueError, match="multipliers"):
            DualVariables(lambda1=-1.0)


class RepairTestCase(TestCase):
    def test_lift_onto_qos(self):
        gains, problem = EffectiveGains(4.0, 2.0), PowerProblem(1.0, 1.0, 1.0, gamma_min=0.5)
        ps = repair_power_split(PowerSplit(0.01, 0.01, 1.0), gains, problem)
        self.assertTrue(check_constraints(ps, gains, 1.0, 0.5, 1.0).holds(0.5))
        self.assertAlmostEqual(ps.rho_i, 0.125)

    def test_budget_face(self):
        gains, problem = EffectiveGains(4.0, 2.0), PowerProblem(1.0, 1.0, 1.0, gamma_min=0.5)
        ps = repair_power_split(PowerSplit(0.9, 0.9, 1.0), gains, problem)
        self.assertAlmostEqual(ps.delta, 1.0, places=12)
        self.assertTrue(check_constraints(ps, gains, 1.0, 0.5, 1.0).holds(0.5))

    def test_budget_below_transmit_power(self):
        gains, problem = EffectiveGains(4.0, 2.0), PowerProblem(1.0, 2.0, 1.0, gamma_min=0.1)
        ps = repair_power_split(PowerSplit(0.5, 0.5, 2.0), gains, problem)
        self.assertLessEqual(ps.delta, 0.5 + 1e-12)

    def test_infeasible(self):
        with pytest.raises(InfeasibleAllocationError):
            repair_power_split(PowerSplit(0.5, 0.5, 1.0), EffectiveGains(4.0, 1.0), PowerProblem(1.0, 1.0, 1.0, gamma_min=1.0))

    def test_slacks(self):
        gains, problem = EffectiveGains(4.0, 2.0), PowerProblem(1.0, 1.0, 1.0, gamma_min=1.0)
        np.testing.assert_allclose(constraint_slacks(PowerSplit(0.25, 0.75, 1.0), gains, problem), [0, 0, 0, 0], atol=1e-12)


class DinkelbachTestCase(TestCase):
    def test_single_feasible_point(self):
        gains, problem = EffectiveGains(4.0, 2.0), PowerProblem(1.0, 1.0, 1.0, gamma_min=1.0)
        grid = power_oracle_grid(gains, problem, resolution=129)
        self.assertEqual((grid.rho_i, grid.rho_j), (0.25, 0.75))
        ps, _ = dinkelbach_power_allocation(gains, problem)
        self.assertAlmostEqual(ps.rho_i, 0.25, delta=1e-9)
        self.assertAlmostEqual(ps.rho_j, 0.75, delta=1e-9)

    def test_matches_grid_oracle(self):
        for gains, problem in _random_instances(8):
            ps, state = dinkelbach_power_allocation(gains, problem)
            ee = _ee(ps, gains, problem.sigma2)
            oracle = _ee(power_oracle_grid(gains, problem, resolution=1000), gains, problem.sigma2)
            self.assertGreaterEqual(ee, oracle * (1 - 1e-3))
            self.assertTrue(check_constraints(ps, gains, 1.0, problem.gamma_min, problem.p_t_w).holds(problem.gamma_min))
            self.assertTrue(state.converged)
            self.assertLess(abs(state.eta), SolverConfig().tol_eta)

    def test_phi_non_decreasing(self):
        for gains, problem in _random_instances(5, seed=3):
            _, state = dinkelbach_power_allocation(gains, problem)
            phis = [state.phi_initial] + [entry[0] for entry in state.trace]
            self.assertTrue(all(b >= a - 1e-9 for a, b in zip(phis, phis[1:])))

    def test_phi_is_energy_efficiency(self):
        gains, problem = _random_instances(1, seed=4)[0]
        ps, state = dinkelbach_power_allocation(gains, problem)
        self.assertAlmostEqual(state.phi, _ee(ps, gains, problem.sigma2), delta=1e-5)

    def test_eta_non_increasing(self):
        for gains, problem in _random_instances(20, seed=8):
            _, state = dinkelbach_power_allocation(gains, problem)
            etas = [entry[1] for entry in state.trace]
            self.assertTrue(all(b <= a + 1e-6 for a, b in zip(etas, etas[1:])), etas)

    def test_starting_at_the_optimum_is_a_fixed_point(self):
        for gains, problem in _random_instances(5, seed=9):
            _, reference = dinkelbach_power_allocation(gains, problem)
            ps, state = dinkelbach_power_allocation(gains, problem, phi0=reference.phi)
            self.assertGreaterEqual(state.iteration, 1)
            self.assertLess(abs(state.trace[0][1]), 1e-3)
            self.assertAlmostEqual(_ee(ps, gains, 1.0), reference.phi, delta=1e-3 * reference.phi)

    def test_rejected_update_is_not_convergence(self):
        gains, problem = EffectiveGains(4.0, 2.0), PowerProblem(1.0, 1.0, 1.0, gamma_min=0.0)
        with mock.patch(
            "risnoma.simulation.power_alloc._sca",
            side_effect=lambda start, gains, phi, problem, solver: problem.split(1e-6, 1e-6),
        ):
            ps, state = dinkelbach_power_allocation(gains, problem)
        self.assertTrue(state.rejected)
        self.assertFalse(state.converged)
        self.assertEqual(state.iteration, 0)
        self.assertLess(state.eta, -SolverConfig().tol_eta)
        self.assertGreater(_ee(ps, gains, 1.0), state.phi_initial * (1 - 1e-9))

    def test_initial_phi(self):
        gains, problem = _random_instances(1, seed=5)[0]
        ps, state = dinkelbach_power_allocation(gains, problem, phi0=0.0)
        self.assertEqual(state.phi_initial, 0.0)
        reference, _ = dinkelbach_power_allocation(gains, problem)
        self.assertAlmostEqual(_ee(ps, gains, 1.0), _ee(reference, gains, 1.0), delta=1e-3 * _ee(reference, gains, 1.0))

    def test_noise_scaling_invariance(self):
        gains, problem = EffectiveGains(3.0, 1.0), PowerProblem(1.0, 5.0, 5.0, gamma_min=0.3)
        scaled_gains = EffectiveGains(3e-13, 1e-13)
        scaled = PowerProblem(1e-13, 5.0, 5.0, gamma_min=0.3)
        ps, _ = dinkelbach_power_allocation(gains, problem)
        scaled_ps, _ = dinkelbach_power_allocation(scaled_gains, scaled)
        self.assertAlmostEqual(ps.rho_i, scaled_ps.rho_i, delta=1e-4)
        self.assertAlmostEqual(ps.rho_j, scaled_ps.rho_j, delta=1e-4)

    @parameterized.expand([
        ("printed", SolverConfig(kkt_form="printed")),
        ("complement", SolverConfig(split_rule="complement")),
    ])
    def test_solver_variants_stay_feasible(self, _, solver):
        for gains, problem in _random_instances(3, seed=6):
            ps, _ = dinkelbach_power_allocation(gains, problem, solver)
            self.assertTrue(check_constraints(ps, gains, 1.0, problem.gamma_min, problem.p_t_w).holds(problem.gamma_min))
            self.assertGreater(_ee(ps, gains, 1.0), 0.0)

    def test_infeasible(self):
        with pytest.raises(InfeasibleAllocationError):
            dinkelbach_power_allocation(EffectiveGains(4.0, 1.0), PowerProblem(1.0, 1.0, 1.0, gamma_min=1.0))

    @slow
    def test_matches_grid_oracle_many_instances(self):
        for gains, problem in _random_instances(100, seed=7):
            ps, _ = dinkelbach_power_allocation(gains, problem)
            oracle = _ee(power_oracle_grid(gains, problem, resolution=2000), gains, problem.sigma2)
            self.assertGreaterEqual(_ee(ps, gains, problem.sigma2), oracle * (1 - 1e-3))


class OracleTestCase(TestCase):
    def test_resolution(self):
        with pytest.raises(ValueError, match="resolution"):
            power_oracle_grid(EffectiveGains(1.0, 1.0), PowerProblem(1.0, 1.0, 1.0), resolution=50)

    def test_infeasible(self):
        with pytest.raises(InfeasibleAllocationError):
            power_oracle_grid(EffectiveGains(4.0, 1.0), PowerProblem(1.0, 1.0, 1.0, gamma_min=1.0), resolution=100)
