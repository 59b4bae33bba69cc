"""Received-power thresholds at the warden and the resulting covert rates.

A threshold ``P`` is the largest received power at the warden for which
the average covert probability stays at or above ``1 - epsilon``.  Closed
forms exist for the log-uniform prior and for the Gaussian surrogate of the
log-normal prior; :func:`p_threshold_oracle` inverts the numeric
average-covert-probability curve of any prior by bisection and serves as
the independent check on both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .metrics import _check_epsilon, worst_case_power_bound, xi_avg_numeric
from .noise import GaussianApprox, LogUniformModel, NoiseModel, gaussian_approx_params
from .special import (ConvergenceError, DomainError, Tolerance, bisect,
                      db_to_linear, erf, erfinv)

ORACLE_TOL = Tolerance(abs_tol=0.0, rel_tol=1e-11, max_iter=200)
MAX_BRACKET_GROWTH = 1e3


@dataclass(frozen=True)
class CovertnessRequirement:
    epsilon: float
    delta: Optional[float] = None

    def __post_init__(self):
        _check_epsilon(self.epsilon)
        if self.delta is not None and not 0.0 < self.delta < 1.0:
            raise DomainError(f"delta must lie in (0, 1), got {self.delta!r}")


@dataclass(frozen=True)
class LinkGeometry:
    r_b: float
    r_w: float
    alpha: float
    sigma_b_sq: float

    def __post_init__(self):
        for name in ("r_b", "r_w", "alpha", "sigma_b_sq"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive, got {value!r}")

    @classmethod
    def from_db(cls, r_b, r_w, alpha, sigma_b_db) -> "LinkGeometry":
        return cls(r_b, r_w, alpha, db_to_linear(sigma_b_db))

    def transmit_power(self, power_at_warden: float) -> float:
        return power_at_warden * self.r_w ** self.alpha


def p_threshold_logu(model: LogUniformModel, epsilon: float) -> float:
    """``(rho**(2 eps - 1) - 1/rho) sigma_n^2`` for the log-uniform prior."""
    _check_epsilon(epsilon)
    rho = model.rho
    return max((rho ** (2.0 * epsilon - 1.0) - 1.0 / rho) * model.sigma_n_sq, 0.0)


def _branch_point(phi1, phi2, phi3) -> float:
    return erf(phi1 / math.sqrt(2.0 * phi2)) / phi3


def p_threshold_logn_approx(model, epsilon: float) -> float:
    """Threshold of the Gaussian surrogate of a log-normal prior.

    Below the branch point the optimal window sits centred on the mean;
    above it the window is pinned to start at zero power.
    """
    _check_epsilon(epsilon)
    base = model.base if isinstance(model, GaussianApprox) else model
    p = gaussian_approx_params(base)
    root = math.sqrt(2.0 * p.phi2)
    if epsilon < _branch_point(p.phi1, p.phi2, p.phi3):
        return 2.0 * root * erfinv(p.phi3 * epsilon)
    arg = erf(p.phi1 / root) - 2.0 * p.phi3 * epsilon
    if arg <= -1.0:
        raise DomainError(
            f"epsilon={epsilon!r} is too close to 1 for the truncated surrogate: "
            f"erfinv argument {arg!r} <= -1")
    return p.phi1 - root * erfinv(arg)


def _scale(model: NoiseModel) -> float:
    if isinstance(model, LogUniformModel):
        return worst_case_power_bound(model)
    if isinstance(model, GaussianApprox):
        return model.params.phi1
    return model.nominal


def p_threshold_oracle(model: NoiseModel, epsilon: float,
                       tol: Tolerance = ORACLE_TOL) -> float:
    """Threshold found by bisecting the numerically optimised ``xi_avg``.

    Uses only the prior CDF and the generic threshold search, never the
    closed-form optimal threshold.
    """
    _check_epsilon(epsilon)
    target = 1.0 - epsilon
    f = lambda p_w: xi_avg_numeric(model, p_w)
    scale = hi = _scale(model)
    # log-uniform: xi_avg is exactly 0 at the support width, so no growth needed
    if not isinstance(model, LogUniformModel):
        while f(hi) >= target:
            hi *= 2.0
            if hi > MAX_BRACKET_GROWTH * scale:
                raise ConvergenceError(
                    f"no power up to {hi:.3g} pushes xi_avg below {target}",
                    estimate=hi)
    return bisect(f, 0.0, hi, target, tol)


def covert_threshold(model: NoiseModel, epsilon: float) -> float:
    """Closed-form threshold for the prior: exact for log-uniform, surrogate otherwise."""
    if isinstance(model, LogUniformModel):
        return p_threshold_logu(model, epsilon)
    return p_threshold_logn_approx(model, epsilon)


def covert_rate(threshold_at_willie: float, geometry: LinkGeometry) -> float:
    """Bits per real channel use at the largest covert transmit power."""
    if threshold_at_willie < 0:
        raise DomainError(f"threshold must be nonnegative, got {threshold_at_willie!r}")
    snr = geometry.transmit_power(threshold_at_willie) / (
        geometry.r_b ** geometry.alpha * geometry.sigma_b_sq)
    return 0.5 * math.log1p(snr) / math.log(2.0)
