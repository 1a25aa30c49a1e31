"""Regularized incomplete gamma function, its inverse, and related constants.

All functions are scalar and pure. The forward function uses the power
series below ``a + 1`` and a Lentz continued fraction for the complement
above it, so both tails keep full absolute accuracy.
"""

from __future__ import annotations

import math
from statistics import NormalDist

__all__ = [
    "DomainError",
    "log_gamma",
    "reg_lower_gamma",
    "reg_upper_gamma",
    "inv_reg_lower_gamma",
    "gamma_bound_alpha",
]

_EPS = 2.220446049250313e-16
_TINY = 1e-300
_MAX_TERMS = 100_000


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


def _check_shape(a: float) -> None:
    if not a > 0 or math.isinf(a):
        raise DomainError(f"shape parameter must be finite and > 0, got {a!r}")


def log_gamma(a: float) -> float:
    """Natural log of the gamma function for ``a > 0``."""
    _check_shape(a)
    return math.lgamma(a)


def _log_prefactor(a: float, z: float) -> float:
    # log(z^a e^-z / Gamma(a))
    return a * math.log(z) - z - math.lgamma(a)


def _lower_series(a: float, z: float) -> float:
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_TERMS):
        ap += 1.0
        term *= z / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(_log_prefactor(a, z))
    raise ArithmeticError(f"series for P({a}, {z}) did not converge")


def _upper_cf(a: float, z: float) -> float:
    # Modified Lentz evaluation of the continued fraction for Q(a, z).
    b = z + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_TERMS):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h * math.exp(_log_prefactor(a, z))
    raise ArithmeticError(f"continued fraction for Q({a}, {z}) did not converge")


def _gamma_pair(a: float, z: float) -> tuple[float, float]:
    """Return ``(P(a, z), Q(a, z))`` with the small one computed directly."""
    _check_shape(a)
    if not z >= 0:
        raise DomainError(f"argument must be >= 0, got {z!r}")
    if z == 0:
        return 0.0, 1.0
    if math.isinf(z):
        return 1.0, 0.0
    if z < a + 1.0:
        p = _lower_series(a, z)
        return p, 1.0 - p
    q = _upper_cf(a, z)
    return 1.0 - q, q


def reg_lower_gamma(a: float, z: float) -> float:
    """Regularized lower incomplete gamma function ``P(a, z)``.

    Args:
        a: Shape, ``a > 0``.
        z: Argument, ``z >= 0``.

    Returns:
        ``gamma(a, z) / Gamma(a)``, a probability in ``[0, 1]``.

    Raises:
        DomainError: If ``a <= 0`` or ``z < 0``.
    """
    return _gamma_pair(a, z)[0]


def reg_upper_gamma(a: float, z: float) -> float:
    """Complement ``Q(a, z) = 1 - P(a, z)``, accurate when it is small."""
    return _gamma_pair(a, z)[1]


def _initial_guess(a: float, p: float) -> float:
    # Wilson-Hilferty; falls back to the small-z series leading term.
    t = NormalDist().inv_cdf(p)
    s = 1.0 / (9.0 * a)
    z = a * (1.0 - s + t * math.sqrt(s)) ** 3
    if z <= 0 or not math.isfinite(z):
        z = math.exp((math.log(p) + math.lgamma(a + 1.0)) / a)
    return z


def _inv_gamma(a: float, p: float, q: float, max_iter: int = 300) -> float:
    """Solve ``P(a, z) = p`` given both ``p`` and its complement ``q``.

    Newton steps are kept inside a shrinking bracket; any step that would
    leave it is replaced by bisection. When ``p > 0.5`` the residual is
    taken on the upper tail so that values of ``p`` near one stay resolved.
    """
    use_upper = p > 0.5

    def residual(z: float) -> float:
        lo_val, up_val = _gamma_pair(a, z)
        return q - up_val if use_upper else lo_val - p

    lo = 0.0
    hi = max(_initial_guess(a, p), 1.0)
    while residual(hi) <= 0:
        lo = hi
        hi *= 2.0
        if hi > 1e300:
            raise ArithmeticError(f"cannot bracket inverse of P({a}, .) at {p}")

    z = min(max(_initial_guess(a, p), lo), hi)
    if not lo < z < hi:
        z = 0.5 * (lo + hi)
    for _ in range(max_iter):
        f = residual(z)
        if f == 0:
            return z
        if f > 0:
            hi = z
        else:
            lo = z
        if hi - lo <= 4 * _EPS * hi:
            return 0.5 * (lo + hi)
        dens = math.exp((a - 1.0) * math.log(z) - z - math.lgamma(a)) if z > 0 else 0.0
        step_ok = dens > 0 and math.isfinite(dens)
        if step_ok:
            z_new = z - f / dens
            step_ok = lo < z_new < hi
        if step_ok:
            if abs(z_new - z) <= 4 * _EPS * z_new:
                return z_new
            z = z_new
        else:
            z = 0.5 * (lo + hi)
    raise ArithmeticError(f"inverse of P({a}, .) at {p} did not converge")


def inv_reg_lower_gamma(a: float, p: float) -> float:
    """Inverse of :func:`reg_lower_gamma` in its second argument.

    Returns ``z >= 0`` with ``P(a, z) = p``. ``p`` must lie in ``[0, 1)``;
    at ``p = 1`` the threshold diverges and a :class:`DomainError` is raised.
    """
    _check_shape(a)
    if not 0.0 <= p < 1.0:
        raise DomainError(f"probability must lie in [0, 1), got {p!r}")
    if p == 0.0:
        return 0.0
    return _inv_gamma(a, p, 1.0 - p)


def inv_reg_upper_gamma(a: float, q: float) -> float:
    """Solve ``Q(a, z) = q`` for ``q`` in ``(0, 1]``.

    Used where the caller holds a small tail probability directly, which
    avoids the cancellation of forming ``1 - q`` first.
    """
    _check_shape(a)
    if not 0.0 < q <= 1.0:
        raise DomainError(f"tail probability must lie in (0, 1], got {q!r}")
    if q == 1.0:
        return 0.0
    return _inv_gamma(a, 1.0 - q, q)


def gamma_bound_alpha(a: float) -> float:
    """Scale ``Gamma(1 + a) ** (1 / a)`` of the bound ``(1 - exp(-z / alpha)) ** a <= P(a, z)``."""
    _check_shape(a)
    return math.exp(math.lgamma(1.0 + a) / a)
