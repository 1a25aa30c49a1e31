"""Secure-throughput maximization over the transmission rate.

With the protection rate pinned at its minimum ``r_e`` and the on-off
threshold at ``2**r_b - 1``, the throughput is a function of ``r_b`` alone:

    T(r_b) = (r_b - r_e) * (1 - P(n_b, y)**n_a),   y = (2**r_b - 1) / gamma_bar_b

on ``r_e < r_b <= r_b_max``. Its derivative is exactly

    1 - P(n_b, y)**n_a - beta * y**(n_b - 1) * exp(-y) * P(n_b, y)**(n_a - 1),
    beta = ln 2 * n_a * (r_b - r_e) * 2**r_b / (Gamma(n_b) * gamma_bar_b),

which :func:`stationarity_residual` evaluates. The maximizer is found by
bisection on the sign of that derivative, after a coarse scan brackets
each place where it turns from positive to negative.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Iterable, Literal, Sequence

from .channel import AntennaConfig, LinkBudget, eve_snr_sf, legit_snr_sf
from .secrecy import (
    LN2,
    RbBound,
    SecurityConstraints,
    max_rb,
    min_re_for_secrecy,
    snr_threshold,
)
from .specfun import DomainError, _gamma_pair

__all__ = [
    "ConvergenceError",
    "ThroughputSolution",
    "SweepRow",
    "throughput",
    "stationarity_residual",
    "optimize",
    "sweep",
]

Binding = Literal["interior", "qos-ceiling", "infeasible"]
Axis = Literal["sigma", "epsilon", "gamma_bar_b", "config"]
AXES = ("sigma", "epsilon", "gamma_bar_b", "config")


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class ThroughputSolution:
    """Optimal operating point.

    ``binding`` is ``"interior"`` when the derivative vanishes inside the
    admissible interval, ``"qos-ceiling"`` when throughput is still rising
    at the rate ceiling, and ``"infeasible"`` when no positive secrecy rate
    meets both constraints. Infeasible solutions carry zero confidential
    rate and throughput; their ``achieved_p_so`` is the outage that even
    ``r_s -> 0`` at the rate ceiling would incur, and ``residual`` is NaN.
    """

    r_b_star: float
    r_s_star: float
    r_e: float
    mu_star: float
    t_s_star: float
    achieved_p_suc: float
    achieved_p_so: float
    binding: Binding
    residual: float
    r_b_max: float
    rb_bound: RbBound
    iterations: int

    @property
    def feasible(self) -> bool:
        return self.binding != "infeasible"

    def as_dict(self) -> dict:
        return asdict(self)


def throughput(r_b: float, r_e: float, cfg: AntennaConfig, lb: LinkBudget) -> float:
    """``(r_b - r_e) * p_success(2**r_b - 1)``."""
    return (r_b - r_e) * legit_snr_sf(snr_threshold(r_b), cfg, lb)


def stationarity_residual(r_b: float, r_e: float, cfg: AntennaConfig, lb: LinkBudget) -> float:
    """Derivative of :func:`throughput` with respect to ``r_b``.

    Positive while throughput is still rising.
    """
    if not r_b > r_e:
        raise DomainError(f"r_b must exceed r_e, got r_b={r_b!r}, r_e={r_e!r}")
    y = snr_threshold(r_b) / lb.gamma_bar_b
    p, _ = _gamma_pair(cfg.n_b, y)
    lhs = legit_snr_sf(snr_threshold(r_b), cfg, lb)
    if y == 0:
        density = 1.0 if cfg.n_b == 1 else 0.0
    else:
        density = math.exp((cfg.n_b - 1) * math.log(y) - y - math.lgamma(cfg.n_b))
    # beta without the Gamma(n_b) divisor, which is folded into density
    beta = LN2 * cfg.n_a * (r_b - r_e) * 2.0**r_b / lb.gamma_bar_b
    return lhs - beta * density * p ** (cfg.n_a - 1)


def _bisect_stationary(
    r_e: float,
    lo: float,
    hi: float,
    cfg: AntennaConfig,
    lb: LinkBudget,
    xtol: float,
    max_iter: int,
) -> tuple[float, int]:
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        if stationarity_residual(mid, r_e, cfg, lb) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= xtol:
            return 0.5 * (lo + hi), it
    raise ConvergenceError(f"bisection did not reach xtol={xtol} in {max_iter} iterations")


def optimize(
    constraints: SecurityConstraints,
    cfg: AntennaConfig,
    lb: LinkBudget,
    rb_bound: RbBound = "exact",
    xtol: float = 1e-12,
    max_iter: int = 200,
    scan_points: int = 64,
) -> ThroughputSolution:
    """Maximize secure throughput subject to the success and secrecy constraints.

    Args:
        constraints: Success floor and secrecy-outage ceiling.
        cfg: Antenna counts.
        lb: Average SNRs.
        rb_bound: Rate ceiling to enforce. ``"closed-form"`` may exceed the
            exact ceiling when ``n_b >= 2``, in which case the returned
            point can violate the success floor.
        xtol: Bisection tolerance on ``r_b``.
        max_iter: Bisection iteration cap.
        scan_points: Grid intervals used to bracket sign changes of the
            derivative before bisecting.

    Returns:
        The optimal :class:`ThroughputSolution`. Infeasibility is reported
        through ``binding`` rather than raised.

    Raises:
        ConvergenceError: If bisection exhausts ``max_iter``.
    """
    r_e = min_re_for_secrecy(constraints, cfg, lb)
    r_b_max = max_rb(constraints, cfg, lb, rb_bound)

    if not r_e < r_b_max:
        mu = snr_threshold(r_b_max)
        return ThroughputSolution(
            r_b_star=r_b_max,
            r_s_star=0.0,
            r_e=r_e,
            mu_star=mu,
            t_s_star=0.0,
            achieved_p_suc=legit_snr_sf(mu, cfg, lb),
            achieved_p_so=eve_snr_sf(mu, cfg, lb),
            binding="infeasible",
            residual=math.nan,
            r_b_max=r_b_max,
            rb_bound=rb_bound,
            iterations=0,
        )

    lo = r_e + min(1e-9, 0.5 * (r_b_max - r_e))
    # Candidates: the ceiling plus every local maximum found by bracketing
    # the +/- sign changes of the derivative on a coarse grid. Throughput is
    # concave for the usual success floors, giving a single bracket, but
    # floors below ~0.45 can reach past an inflection point.
    grid = [lo + (r_b_max - lo) * k / scan_points for k in range(scan_points + 1)]
    signs = [stationarity_residual(r, r_e, cfg, lb) > 0 for r in grid]
    candidates: list[tuple[float, Binding, int]] = []
    if signs[-1]:
        candidates.append((r_b_max, "qos-ceiling", 0))
    if not signs[0]:
        candidates.append((lo, "interior", 0))
    for a, b, sa, sb in zip(grid, grid[1:], signs, signs[1:]):
        if sa and not sb:
            root, it = _bisect_stationary(r_e, a, b, cfg, lb, xtol, max_iter)
            candidates.append((root, "interior", it))
    r_b, binding, iterations = max(candidates, key=lambda c: throughput(c[0], r_e, cfg, lb))

    r_s = r_b - r_e
    mu = snr_threshold(r_b)
    p_suc = legit_snr_sf(mu, cfg, lb)
    return ThroughputSolution(
        r_b_star=r_b,
        r_s_star=r_s,
        r_e=r_e,
        mu_star=mu,
        t_s_star=r_s * p_suc,
        achieved_p_suc=p_suc,
        achieved_p_so=eve_snr_sf(snr_threshold(r_e), cfg, lb),
        binding=binding,
        residual=stationarity_residual(r_b, r_e, cfg, lb),
        r_b_max=r_b_max,
        rb_bound=rb_bound,
        iterations=iterations,
    )


@dataclass(frozen=True)
class SweepRow:
    axis: Axis
    value: float | AntennaConfig
    constraints: SecurityConstraints
    cfg: AntennaConfig
    lb: LinkBudget
    solution: ThroughputSolution


def _row(args) -> SweepRow:
    axis, value, constraints, cfg, lb, rb_bound = args
    if axis == "sigma":
        constraints = replace(constraints, sigma=value)
    elif axis == "epsilon":
        constraints = replace(constraints, epsilon=value)
    elif axis == "gamma_bar_b":
        lb = replace(lb, gamma_bar_b=value)
    else:
        cfg = value
    return SweepRow(axis, value, constraints, cfg, lb, optimize(constraints, cfg, lb, rb_bound))


def sweep(
    axis: Axis,
    grid: Sequence[float] | Iterable[AntennaConfig],
    constraints: SecurityConstraints,
    cfg: AntennaConfig,
    lb: LinkBudget,
    rb_bound: RbBound = "exact",
    workers: int = 1,
) -> list[SweepRow]:
    """Optimize once per grid point along one axis, holding the rest fixed.

    ``gamma_bar_b`` values are linear. For ``axis="config"`` the grid holds
    :class:`AntennaConfig` instances. Rows come back in grid order whatever
    ``workers`` is; infeasible points are kept with ``binding="infeasible"``.
    """
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    grid = list(grid)
    if not grid:
        raise ValueError("sweep grid is empty")
    jobs = [(axis, v, constraints, cfg, lb, rb_bound) for v in grid]
    if workers <= 1:
        return [_row(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_row, jobs))
