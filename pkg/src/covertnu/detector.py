"""Radiometer (energy detector) used by the warden.

The warden averages ``|y[n]|^2`` over N real samples and declares a
transmission when the average exceeds a threshold ``gamma``.  For finite N
the error probabilities use the central-limit normal approximations of the
statistic under each hypothesis.  As N grows the total error ``p_fa + p_md``
collapses to an indicator: zero when ``gamma`` lies between the noise power
and the signal-plus-noise power, one otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .special import DomainError, q_function


@dataclass(frozen=True)
class DetectionScenario:
    """Received signal power at the warden and the sample count.

    ``n_samples=None`` stands for the asymptotic (N -> infinity) regime.
    """

    p_w: float
    n_samples: Optional[int] = None

    def __post_init__(self):
        if not self.p_w >= 0:
            raise DomainError(f"p_w must be nonnegative, got {self.p_w!r}")
        if self.n_samples is not None and self.n_samples < 1:
            raise DomainError(f"n_samples must be positive, got {self.n_samples!r}")

    @property
    def asymptotic(self) -> bool:
        return self.n_samples is None


@dataclass(frozen=True)
class DetectorErrors:
    p_fa: float
    p_md: float

    @property
    def xi(self) -> float:
        return self.p_fa + self.p_md


def test_statistic(samples) -> float:
    """Mean squared sample value, the radiometer's decision statistic."""
    arr = np.asarray(samples, dtype=float)
    if arr.size == 0:
        raise DomainError("test statistic needs at least one sample")
    return float(np.mean(arr * arr))


# Not a pytest test despite the name.
test_statistic.__test__ = False


def finite_n_errors(sigma_w_sq: float, gamma: float,
                    scenario: DetectionScenario) -> DetectorErrors:
    """CLT approximations of false-alarm and misdetection probabilities."""
    if scenario.asymptotic:
        raise DomainError("finite_n_errors needs a finite sample count")
    if not sigma_w_sq > 0:
        raise DomainError(f"sigma_w_sq must be positive, got {sigma_w_sq!r}")
    root = math.sqrt(2.0 / scenario.n_samples)
    busy = scenario.p_w + sigma_w_sq
    p_fa = q_function((gamma - sigma_w_sq) / (root * sigma_w_sq))
    # 1 - Q(z) written as Q(-z) to keep precision near 0
    p_md = q_function(-(gamma - busy) / (root * busy))
    return DetectorErrors(p_fa, p_md)


def asymptotic_xi(sigma_w_sq, gamma, p_w):
    """Total detection error as N -> infinity; 0 or 1.

    Zero exactly when ``sigma_w_sq <= gamma <= p_w + sigma_w_sq``.  Vectorised
    over ``sigma_w_sq`` and ``gamma``.
    """
    s = np.asarray(sigma_w_sq, dtype=float)
    g = np.asarray(gamma, dtype=float)
    hit = (s <= g) & (g <= p_w + s)
    out = np.where(hit, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out
