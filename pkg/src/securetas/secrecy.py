"""Reliability and secrecy metrics for fixed wiretap codes.

A code with transmission rate ``r_b`` and confidential rate ``r_s`` spends
``r_e = r_b - r_s`` bits/s/Hz confusing the eavesdropper. Bob decodes
whenever his SNR exceeds ``mu >= 2**r_b - 1``; information leaks whenever
Eve's SNR exceeds ``2**r_e - 1``.

Two ceilings on ``r_b`` under a success-probability floor are provided:
an exact one through the inverse incomplete gamma function, and the
closed form obtained from the bound ``(1 - exp(-z/alpha))**a <= P(a, z)``.
Because that bound sits *below* ``P``, the closed form can overshoot the
exact ceiling when ``n_b >= 2``; the two coincide for ``n_b = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .channel import AntennaConfig, LinkBudget, eve_snr_sf, legit_snr_sf
from .specfun import (
    DomainError,
    _gamma_pair,
    gamma_bound_alpha,
    inv_reg_lower_gamma,
    inv_reg_upper_gamma,
)

__all__ = [
    "RatePolicy",
    "SecurityConstraints",
    "Feasibility",
    "p_success",
    "p_secrecy_outage",
    "throughput_at",
    "secure_throughput",
    "max_rb_exact",
    "max_rb_closed_form",
    "max_rb",
    "min_re_for_secrecy",
    "tradeoff_sigma_bound",
    "is_feasible",
]

LN2 = math.log(2.0)
RbBound = Literal["exact", "closed-form"]


def snr_threshold(rate: float) -> float:
    """``2**rate - 1``, the SNR needed to support ``rate`` bits/s/Hz."""
    return math.expm1(rate * LN2)


def rate_for_snr(snr: float) -> float:
    return math.log1p(snr) / LN2


@dataclass(frozen=True)
class RatePolicy:
    """Wiretap code rates and the on-off threshold.

    ``mu`` defaults to the smallest admissible threshold ``2**r_b - 1``.
    """

    r_b: float
    r_s: float
    mu: float | None = None

    def __post_init__(self) -> None:
        if not (self.r_s > 0 and math.isfinite(self.r_b)):
            raise DomainError(f"r_s must be > 0, got {self.r_s!r}")
        if not self.r_s < self.r_b:
            raise DomainError(
                f"r_s must be < r_b (leakage-protection rate r_b - r_s must be > 0), "
                f"got r_b={self.r_b!r}, r_s={self.r_s!r}"
            )
        if self.mu is None:
            object.__setattr__(self, "mu", snr_threshold(self.r_b))
        # small slack so a mu echoed through decimal text still validates
        elif not self.mu >= snr_threshold(self.r_b) * (1 - 1e-12):
            raise DomainError(
                f"mu must be >= 2**r_b - 1 = {snr_threshold(self.r_b):.6g}, got {self.mu!r}"
            )

    @property
    def r_e(self) -> float:
        return self.r_b - self.r_s


@dataclass(frozen=True)
class SecurityConstraints:
    """Success floor ``sigma`` and secrecy-outage ceiling ``epsilon``, both in (0, 1)."""

    sigma: float
    epsilon: float

    def __post_init__(self) -> None:
        for name in ("sigma", "epsilon"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise DomainError(f"{name} must lie in the open interval (0, 1), got {value!r}")


def p_success(mu: float, cfg: AntennaConfig, lb: LinkBudget) -> float:
    """Probability that Bob's SNR exceeds the on-off threshold ``mu``."""
    if not mu >= 0:
        raise DomainError(f"mu must be >= 0, got {mu!r}")
    return legit_snr_sf(mu, cfg, lb)


def p_secrecy_outage(r_b: float, r_s: float, cfg: AntennaConfig, lb: LinkBudget) -> float:
    """Probability that Eve's channel supports more than ``r_b - r_s``."""
    if not r_s > 0:
        raise DomainError(f"r_s must be > 0, got {r_s!r}")
    if not r_b > r_s:
        raise DomainError(f"r_b must exceed r_s, got r_b={r_b!r}, r_s={r_s!r}")
    return eve_snr_sf(snr_threshold(r_b - r_s), cfg, lb)


def throughput_at(r_s: float, mu: float, cfg: AntennaConfig, lb: LinkBudget) -> float:
    """``r_s * p_success(mu)`` without checking that ``(r_s, mu)`` form a valid policy."""
    if not r_s >= 0:
        raise DomainError(f"r_s must be >= 0, got {r_s!r}")
    return r_s * p_success(mu, cfg, lb)


def secure_throughput(policy: RatePolicy, cfg: AntennaConfig, lb: LinkBudget) -> float:
    return throughput_at(policy.r_s, policy.mu, cfg, lb)


def max_rb_exact(constraints: SecurityConstraints, cfg: AntennaConfig, lb: LinkBudget) -> float:
    """Largest ``r_b`` whose success probability at ``mu = 2**r_b - 1`` is at least sigma.

    Returns 0.0 when sigma is so close to one that the threshold underflows.
    """
    target = (1.0 - constraints.sigma) ** (1.0 / cfg.n_a)
    mu = lb.gamma_bar_b * inv_reg_lower_gamma(cfg.n_b, target)
    return rate_for_snr(mu)


def max_rb_closed_form(
    constraints: SecurityConstraints, cfg: AntennaConfig, lb: LinkBudget
) -> float:
    """Closed-form rate ceiling ``log2(1 + gamma_bar_b * alpha * log(1/xi))``.

    Here ``alpha = Gamma(n_b + 1)**(1/n_b)`` and
    ``xi = 1 - (1 - sigma)**(1/(n_a n_b))``.
    """
    root = (1.0 - constraints.sigma) ** (1.0 / (cfg.n_a * cfg.n_b))
    alpha = gamma_bound_alpha(cfg.n_b)
    return rate_for_snr(lb.gamma_bar_b * alpha * -math.log1p(-root))


def max_rb(
    constraints: SecurityConstraints,
    cfg: AntennaConfig,
    lb: LinkBudget,
    rb_bound: RbBound = "exact",
) -> float:
    if rb_bound == "exact":
        return max_rb_exact(constraints, cfg, lb)
    if rb_bound == "closed-form":
        return max_rb_closed_form(constraints, cfg, lb)
    raise ValueError(f"unknown rb_bound {rb_bound!r}")


def min_re_for_secrecy(
    constraints: SecurityConstraints, cfg: AntennaConfig, lb: LinkBudget
) -> float:
    """Smallest protection rate ``r_e`` keeping the secrecy outage at or below epsilon.

    The throughput-maximizing confidential rate for a given ``r_b`` is
    ``r_b - min_re_for_secrecy(...)``.
    """
    # Solve Q(n_e, z) = epsilon directly, so tiny epsilon keeps its digits.
    z = inv_reg_upper_gamma(cfg.n_e, constraints.epsilon)
    return rate_for_snr(lb.gamma_bar_e * z)


def tradeoff_sigma_bound(
    epsilon: float,
    cfg: AntennaConfig,
    rho: float,
    path: RbBound = "closed-form",
) -> float:
    """Supremum of success floors compatible with a positive secrecy rate.

    With ``z = P^-1(n_e, 1 - epsilon)`` the closed-form path evaluates
    ``1 - (1 - exp(-z / (rho * alpha)))**(n_a * n_b)``; the exact path
    evaluates ``1 - P(n_b, z / rho)**n_a``, which is the boundary of
    :func:`is_feasible`.

    Args:
        epsilon: Secrecy outage ceiling in (0, 1).
        cfg: Antenna counts.
        rho: Ratio of Bob's to Eve's average SNR (linear).
        path: ``"closed-form"`` or ``"exact"``.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    if not (rho > 0 and math.isfinite(rho)):
        raise DomainError(f"rho must be finite and > 0, got {rho!r}")
    z = inv_reg_upper_gamma(cfg.n_e, epsilon)
    if path == "closed-form":
        alpha = gamma_bound_alpha(cfg.n_b)
        base = math.exp(-z / (rho * alpha))
        return -math.expm1(cfg.n_a * cfg.n_b * math.log1p(-base)) if base < 1 else 1.0
    if path == "exact":
        p, q = _gamma_pair(cfg.n_b, z / rho)
        if p < 0.5:
            return 1.0 - p**cfg.n_a
        return -math.expm1(cfg.n_a * math.log1p(-q))
    raise ValueError(f"unknown path {path!r}")


@dataclass(frozen=True)
class Feasibility:
    """Whether a positive secrecy rate can meet both constraints.

    ``rate_margin`` is the exact rate ceiling minus the protection rate;
    ``sigma_margin`` is the exact trade-off bound minus sigma. Both are
    positive exactly when ``feasible`` is true. ``closed_form_feasible``
    repeats the verdict with the closed-form rate ceiling.
    """

    feasible: bool
    rate_margin: float
    sigma_margin: float
    closed_form_feasible: bool
    r_e: float
    r_b_max: float

    def __bool__(self) -> bool:
        return self.feasible


def is_feasible(
    constraints: SecurityConstraints, cfg: AntennaConfig, lb: LinkBudget
) -> Feasibility:
    r_e = min_re_for_secrecy(constraints, cfg, lb)
    r_b_max = max_rb_exact(constraints, cfg, lb)
    r_b_cf = max_rb_closed_form(constraints, cfg, lb)
    sigma_bound = tradeoff_sigma_bound(constraints.epsilon, cfg, lb.rho, path="exact")
    return Feasibility(
        feasible=r_e < r_b_max,
        rate_margin=r_b_max - r_e,
        sigma_margin=sigma_bound - constraints.sigma,
        closed_form_feasible=r_e < r_b_cf,
        r_e=r_e,
        r_b_max=r_b_max,
    )
