import math

import numpy as np
import pytest

from oracles import grid_search, random_feasible_cases, throughput_curve
from securetas.channel import AntennaConfig, LinkBudget
from securetas.optimizer import (
    optimize,
    stationarity_residual,
    sweep,
    throughput,
)
from securetas.secrecy import (
    SecurityConstraints,
    is_feasible,
    max_rb_closed_form,
    max_rb_exact,
    min_re_for_secrecy,
)
from securetas.specfun import DomainError

CASES = random_feasible_cases(seed=314, count=10)


def unpack(case):
    n_a, n_b, n_e, g_b, g_e, sigma, eps = case
    return SecurityConstraints(sigma, eps), AntennaConfig(n_a, n_b, n_e), LinkBudget(g_b, g_e)


class TestResidual:
    def test_left_edge(self):
        c, b = AntennaConfig(3, 2, 1), LinkBudget(10, 1)
        r_e = 0.7
        y = (2**r_e - 1) / 10
        expected = 1 - ((1 - math.exp(-y) * (1 + y)) ** 3)
        assert stationarity_residual(r_e + 1e-12, r_e, c, b) == pytest.approx(expected, abs=1e-9)
        assert expected > 0

    def test_domain(self):
        with pytest.raises(DomainError):
            stationarity_residual(1.0, 1.0, AntennaConfig(1, 1, 1), LinkBudget(1, 1))

    @pytest.mark.parametrize("case", CASES)
    def test_sign_change_in_wide_bracket(self, case):
        s, c, b = unpack(case)
        r_e = min_re_for_secrecy(s, c, b)
        assert stationarity_residual(r_e + 1e-6, r_e, c, b) > 0
        # far enough that p_suc has collapsed, near enough to avoid underflow
        far = max(r_e + 1.0, math.log2(1 + b.gamma_bar_b * (5 * c.n_b + 10)))
        assert stationarity_residual(far, r_e, c, b) < 0

    def test_matches_finite_difference(self):
        rng = np.random.default_rng(99)
        h = 1e-5
        for _ in range(100):
            c = AntennaConfig(*(int(v) for v in rng.integers(1, 5, 3)))
            b = LinkBudget(10 ** rng.uniform(0, 2), 1.0)
            r_e = rng.uniform(0.1, 2.0)
            r_b = r_e + rng.uniform(0.05, 6.0)
            fd = (throughput(r_b + h, r_e, c, b) - throughput(r_b - h, r_e, c, b)) / (2 * h)
            res = stationarity_residual(r_b, r_e, c, b)
            assert res == pytest.approx(fd, abs=1e-6)
            if abs(fd) > 1e-6:
                assert np.sign(res) == np.sign(fd)


class TestOptimize:
    @pytest.mark.parametrize("case", CASES)
    def test_grid_oracle(self, case):
        s, c, b = unpack(case)
        sol = optimize(s, c, b)
        _, t_best = grid_search(sol.r_e, sol.r_b_max, c.n_a, c.n_b, b.gamma_bar_b)
        assert abs(sol.t_s_star - t_best) <= 1e-6
        assert sol.t_s_star >= t_best - 1e-12

    @pytest.mark.parametrize("case", CASES)
    def test_solution_invariants(self, case):
        s, c, b = unpack(case)
        sol = optimize(s, c, b)
        assert sol.feasible
        assert sol.r_e < sol.r_b_star <= max_rb_exact(s, c, b)
        assert sol.achieved_p_so <= s.epsilon + 1e-9
        assert sol.achieved_p_suc >= s.sigma - 1e-9
        assert sol.t_s_star == pytest.approx(sol.r_s_star * sol.achieved_p_suc, abs=1e-12)
        assert sol.mu_star == pytest.approx(2**sol.r_b_star - 1, rel=1e-12)
        if sol.binding == "interior":
            assert abs(sol.residual) <= 1e-8
            for d in (-1e-3, 1e-3):
                r = min(sol.r_b_star + d, sol.r_b_max)
                assert throughput(r, sol.r_e, c, b) <= sol.t_s_star
        else:
            assert sol.binding == "qos-ceiling"
            assert sol.residual > 0

    def test_ceiling_binds_for_strict_qos(self):
        s, c, b = SecurityConstraints(0.999, 0.4), AntennaConfig(2, 2, 1), LinkBudget(100, 0.5)
        sol = optimize(s, c, b)
        assert sol.binding == "qos-ceiling"
        assert sol.r_b_star == max_rb_exact(s, c, b)
        # unconstrained maximizer lies to the right of the ceiling
        r_free, _ = grid_search(sol.r_e, sol.r_e + 20, c.n_a, c.n_b, b.gamma_bar_b, step=1e-3)
        assert r_free > sol.r_b_max

    def test_infeasible(self):
        s, c, b = SecurityConstraints(0.99, 0.01), AntennaConfig(1, 1, 4), LinkBudget(1, 1)
        assert not is_feasible(s, c, b)
        sol = optimize(s, c, b)
        assert sol.binding == "infeasible" and not sol.feasible
        assert sol.t_s_star == 0.0 and sol.r_s_star == 0.0
        assert math.isnan(sol.residual)
        assert sol.achieved_p_so > s.epsilon

    def test_closed_form_ceiling_can_overshoot(self):
        s, c, b = SecurityConstraints(0.999, 0.4), AntennaConfig(2, 3, 1), LinkBudget(100, 0.5)
        exact = optimize(s, c, b)
        loose = optimize(s, c, b, rb_bound="closed-form")
        assert loose.r_b_max == pytest.approx(max_rb_closed_form(s, c, b))
        assert loose.r_b_max > exact.r_b_max
        assert loose.achieved_p_suc < s.sigma

    def test_single_antenna_uniform(self):
        s, c, b = SecurityConstraints(0.6, 0.2), AntennaConfig(1, 1, 1), LinkBudget(100, 1)
        sol = optimize(s, c, b)
        _, t_best = grid_search(sol.r_e, sol.r_b_max, 1, 1, 100.0)
        assert sol.t_s_star == pytest.approx(t_best, abs=1e-6)


def second_differences(sol, c, b, points=50):
    width = sol.r_b_max - sol.r_e
    h = width / (2 * (points + 1))
    r = np.linspace(sol.r_e + h, sol.r_b_max - h, points)
    f = lambda x: throughput_curve(x, sol.r_e, c.n_a, c.n_b, b.gamma_bar_b)
    return f(r + h) - 2 * f(r) + f(r - h)


def test_concavity_on_admissible_interval():
    for case in random_feasible_cases(seed=7, count=20):
        s, c, b = unpack(case)
        sol = optimize(s, c, b)
        assert np.max(second_differences(sol, c, b)) <= 1e-9


def test_low_qos_floor_not_concave_but_optimizer_exact():
    # Below sigma ~ 0.45 the admissible interval can pass the inflection of
    # the success probability; the optimizer must still find the maximum.
    s, c, b = SecurityConstraints(0.31, 0.255), AntennaConfig(6, 5, 1), LinkBudget(159.63, 1.0)
    sol = optimize(s, c, b)
    assert np.max(second_differences(sol, c, b)) > 1e-3
    _, t_best = grid_search(sol.r_e, sol.r_b_max, 6, 5, 159.63)
    assert abs(sol.t_s_star - t_best) <= 1e-6


class TestSweep:
    base = SecurityConstraints(0.9, 0.1)
    cfg = AntennaConfig(4, 2, 2)
    lb = LinkBudget(10.0, 1.0)

    def test_epsilon_nondecreasing(self):
        rows = sweep("epsilon", np.linspace(0.01, 0.5, 25), self.base, self.cfg, self.lb)
        t = [r.solution.t_s_star for r in rows]
        assert all(y >= x - 1e-12 for x, y in zip(t, t[1:]))

    def test_gamma_nondecreasing(self):
        rows = sweep("gamma_bar_b", 10 ** (np.arange(0, 31) / 10), self.base, self.cfg, self.lb)
        t = [r.solution.t_s_star for r in rows]
        assert all(y >= x - 1e-12 for x, y in zip(t, t[1:]))
        assert rows[0].lb.gamma_bar_b == 1.0

    def test_sigma_nonincreasing(self):
        rows = sweep("sigma", np.linspace(0.5, 0.99, 25), self.base, self.cfg, self.lb)
        t = [r.solution.t_s_star for r in rows]
        assert all(y <= x + 1e-12 for x, y in zip(t, t[1:]))

    def test_configs_and_infeasible_rows(self):
        grid = [AntennaConfig(1, 1, 4), AntennaConfig(4, 2, 2)]
        rows = sweep("config", grid, SecurityConstraints(0.95, 0.05), self.cfg, LinkBudget(3, 1))
        assert [r.cfg for r in rows] == grid
        assert rows[0].solution.binding == "infeasible"
        assert rows[1].solution.feasible

    def test_workers_preserve_order(self):
        grid = list(np.linspace(0.05, 0.4, 8))
        serial = sweep("epsilon", grid, self.base, self.cfg, self.lb)
        parallel = sweep("epsilon", grid, self.base, self.cfg, self.lb, workers=2)
        assert [r.solution for r in serial] == [r.solution for r in parallel]

    def test_rejects(self):
        with pytest.raises(ValueError):
            sweep("sigma", [], self.base, self.cfg, self.lb)
        with pytest.raises(ValueError):
            sweep("rho", [1.0], self.base, self.cfg, self.lb)
