"""Covertness measures under a noise-power prior.

In the asymptotic regime the warden's error sum is 0 exactly when the true
noise power falls in the window ``[gamma - p_w, gamma]`` and 1 otherwise.
Averaging over the prior therefore gives

    xi(gamma) = 1 - [F(gamma) - F(gamma - p_w)]

with ``F`` the prior CDF, and the warden picks ``gamma`` to place the
width-``p_w`` window over as much prior mass as possible.  The average
covert probability is that minimum, and the covert outage probability is
the captured mass itself, so the two always sum to one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .detector import asymptotic_xi
from .noise import GaussianApprox, LogUniformModel, NoiseModel
from .special import DomainError, Tolerance, erf, integrate, minimize_scalar

GAMMA_TOL = Tolerance(abs_tol=0.0, rel_tol=1e-12, max_iter=500)
# Prior mass ignored at each end when bracketing the warden's threshold.
BRACKET_MASS = 1e-9


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class CovertnessReport:
    gamma_star: float
    xi_avg: float
    p_out: float
    xi_up: float
    method: Method

    def to_dict(self) -> dict:
        return {
            "gamma_star": self.gamma_star,
            "xi_avg": self.xi_avg,
            "p_out": self.p_out,
            "xi_up": self.xi_up,
            "method": self.method.value,
        }


def _check_pw(p_w):
    if not (p_w >= 0 and math.isfinite(p_w)):
        raise DomainError(f"p_w must be finite and nonnegative, got {p_w!r}")


def _check_epsilon(epsilon):
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon!r}")


def window_mass(model: NoiseModel, p_w: float, gamma):
    """Prior probability that the noise power lies in ``[gamma - p_w, gamma]``."""
    g = np.asarray(gamma, dtype=float)
    mass = model.cdf(g) - model.cdf(np.maximum(g - p_w, 0.0))
    return mass


def xi_avg_at_gamma(model: NoiseModel, p_w: float, gamma):
    """Average error sum over the prior for a fixed threshold ``gamma``."""
    _check_pw(p_w)
    val = np.clip(1.0 - window_mass(model, p_w, gamma), 0.0, 1.0)
    return float(val) if np.ndim(val) == 0 else val


def xi_avg_at_gamma_quadrature(model: NoiseModel, p_w: float, gamma: float,
                               tol: Tolerance = Tolerance(1e-13, 1e-12, 200)) -> float:
    """Oracle: integrate the 0/1 error surface against the prior density.

    Independent of the CDF-window identity; splits the integral at the
    indicator's jump points and the model's support edges.
    """
    _check_pw(p_w)
    lo, hi = model.support()
    f = lambda s: asymptotic_xi(s, gamma, p_w) * float(model.pdf(s))
    return integrate(f, lo, hi, tol, breakpoints=(gamma - p_w, gamma))


def _gamma_bracket(model: NoiseModel, p_w: float) -> tuple[float, float]:
    lo = float(model.quantile(BRACKET_MASS))
    hi = float(model.quantile(1.0 - BRACKET_MASS)) + p_w
    return lo, hi


def numeric_gamma(model: NoiseModel, p_w: float,
                  tol: Tolerance = GAMMA_TOL) -> tuple[float, float]:
    """Grid-and-refine search for the warden's best threshold.

    Returns ``(gamma, xi)``.  Works for any model; it is the production path
    for the exact log-normal prior and the oracle path for the others.
    """
    _check_pw(p_w)
    lo, hi = _gamma_bracket(model, p_w)
    objective = lambda g: xi_avg_at_gamma(model, p_w, g)
    return minimize_scalar(objective, lo, hi, tol, vectorized=True)


def optimal_gamma(model: NoiseModel, p_w: float) -> float:
    """The warden's threshold minimising the average error sum."""
    _check_pw(p_w)
    if isinstance(model, LogUniformModel):
        return p_w + model.sigma_n_sq / model.rho
    if isinstance(model, GaussianApprox):
        phi1 = model.params.phi1
        return max(phi1 + p_w / 2.0, p_w)
    return numeric_gamma(model, p_w)[0]


def _xi_avg_logu(model: LogUniformModel, p_w: float) -> float:
    rho, s2 = model.rho, model.sigma_n_sq
    if p_w >= (rho - 1.0 / rho) * s2:
        return 0.0
    # log(rho^2 s2 / (rho p_w + s2)) / (2 log rho), written to be exact at p_w = 0
    val = 1.0 - math.log1p(rho * p_w / s2) / (2.0 * math.log(rho))
    return min(max(val, 0.0), 1.0)


def _xi_avg_gauss(model: GaussianApprox, p_w: float) -> float:
    p = model.params
    root = math.sqrt(2.0 * p.phi2)
    if p_w < 2.0 * p.phi1:
        val = 1.0 - erf(p_w / (2.0 * root)) / p.phi3
    else:
        val = 1.0 - (erf(p.phi1 / root) - erf((p.phi1 - p_w) / root)) / (2.0 * p.phi3)
    return min(max(val, 0.0), 1.0)


def xi_avg(model: NoiseModel, p_w: float) -> CovertnessReport:
    """Average covert probability at the warden's optimal threshold.

    Closed forms for the log-uniform prior and the Gaussian surrogate; the
    exact log-normal prior goes through the numeric threshold search.
    """
    _check_pw(p_w)
    if isinstance(model, LogUniformModel):
        value, method = _xi_avg_logu(model, p_w), Method.CLOSED_FORM
        gamma = optimal_gamma(model, p_w)
    elif isinstance(model, GaussianApprox):
        value, method = _xi_avg_gauss(model, p_w), Method.CLOSED_FORM
        gamma = optimal_gamma(model, p_w)
    else:
        gamma, value = numeric_gamma(model, p_w)
        method = Method.QUADRATURE
    return CovertnessReport(gamma_star=gamma, xi_avg=value, p_out=1.0 - value,
                            xi_up=xi_up(model, p_w), method=method)


def xi_avg_numeric(model: NoiseModel, p_w: float) -> float:
    """Average covert probability from the generic grid search only."""
    return numeric_gamma(model, p_w)[1]


def p_out(model: NoiseModel, p_w: float, epsilon: float) -> float:
    """Covert outage probability at the warden's optimal threshold.

    With infinitely many samples the error sum is 0 or 1, so the event
    ``xi < 1 - epsilon`` does not depend on ``epsilon`` and the outage is
    ``1 - xi_avg``.  ``epsilon`` is still validated so that callers written
    against finite-sample variants keep the same signature.
    """
    _check_epsilon(epsilon)
    return xi_avg(model, p_w).p_out


def xi_up(model: NoiseModel, p_w: float) -> float:
    """Worst-case (min over gamma, max over noise power) error sum.

    Bounded prior: 1 while no single threshold can cover the whole support,
    0 once ``p_w >= (rho - 1/rho) sigma_n^2``.  Unbounded priors always
    leave noise powers outside any window, so the value is 1.
    """
    _check_pw(p_w)
    if isinstance(model, LogUniformModel):
        return 1.0 if p_w < worst_case_power_bound(model) else 0.0
    return 1.0


def worst_case_power_bound(model: LogUniformModel) -> float:
    """Largest ``p_w`` keeping the worst-case measure at 1: ``(rho - 1/rho) sigma_n^2``."""
    return (model.rho - 1.0 / model.rho) * model.sigma_n_sq
