"""Prior distributions of the warden's noise power.

Three variants are supported:

``LogUniformModel``
    Bounded uncertainty.  The noise power in dB is uniform on
    ``[nominal_dB - rho_dB, nominal_dB + rho_dB]``, so the linear power has
    density ``1 / (2 ln(rho) x)`` on ``[sigma_n^2 / rho, rho sigma_n^2]``.

``LogNormalModel``
    Unbounded uncertainty.  The dB offset from the nominal power is
    zero-mean normal with standard deviation ``sigma_delta_db``.

``GaussianApprox``
    Moment-matched normal surrogate of a log-normal model, truncated to
    positive powers and renormalised.  Its mean, variance and truncation
    mass are the ``phi1, phi2, phi3`` constants returned by
    :func:`gaussian_approx_params`.

The bounded model is parameterised on the linear scale and the log-normal
model on the dB scale, matching how each is usually specified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special as _sp

from . import streams
from .special import K_DB, DomainError, db_to_linear, linear_to_db

# Mass left outside the finite integration window of an unbounded model.
TAIL_MASS = 1e-16


def _out(x, arr):
    return float(arr) if np.ndim(x) == 0 else arr


@dataclass(frozen=True)
class LogUniformModel:
    sigma_n_sq: float
    rho: float

    def __post_init__(self):
        if not (math.isfinite(self.sigma_n_sq) and self.sigma_n_sq > 0):
            raise DomainError(f"sigma_n_sq must be positive, got {self.sigma_n_sq!r}")
        if not (math.isfinite(self.rho) and self.rho > 1):
            raise DomainError(f"rho must exceed 1, got {self.rho!r}")

    @classmethod
    def from_db(cls, sigma_n_db: float, rho_db: float) -> "LogUniformModel":
        return cls(db_to_linear(sigma_n_db), db_to_linear(rho_db))

    @property
    def rho_db(self) -> float:
        return linear_to_db(self.rho)

    @property
    def nominal(self) -> float:
        return self.sigma_n_sq

    def support(self) -> tuple[float, float]:
        return self.sigma_n_sq / self.rho, self.rho * self.sigma_n_sq

    def pdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        lo, hi = self.support()
        inside = (x_arr >= lo) & (x_arr <= hi)
        safe = np.where(inside, x_arr, 1.0)
        return _out(x, np.where(inside, 1.0 / (2.0 * math.log(self.rho) * safe), 0.0))

    def cdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        safe = np.where(x_arr > 0, x_arr, 1.0)
        val = np.log(self.rho * safe / self.sigma_n_sq) / (2.0 * math.log(self.rho))
        return _out(x, np.where(x_arr > 0, np.clip(val, 0.0, 1.0), 0.0))

    def quantile(self, p):
        p_arr = np.asarray(p, dtype=float)
        return _out(p, self.sigma_n_sq / self.rho * np.power(self.rho, 2.0 * p_arr))

    def draw(self, rng, size):
        return self.quantile(streams.open_uniform(rng, size))


@dataclass(frozen=True)
class LogNormalModel:
    sigma_n_db: float
    sigma_delta_db: float

    def __post_init__(self):
        if not math.isfinite(self.sigma_n_db):
            raise DomainError(f"sigma_n_db must be finite, got {self.sigma_n_db!r}")
        if not (math.isfinite(self.sigma_delta_db) and self.sigma_delta_db > 0):
            raise DomainError(
                f"sigma_delta_db must be positive, got {self.sigma_delta_db!r}")

    @property
    def log_mean(self) -> float:
        """Mean of ln(sigma_w^2)."""
        return K_DB * self.sigma_n_db

    @property
    def log_std(self) -> float:
        return K_DB * self.sigma_delta_db

    @property
    def nominal(self) -> float:
        return db_to_linear(self.sigma_n_db)

    def support(self) -> tuple[float, float]:
        return float(self.quantile(TAIL_MASS)), float(self.quantile(1.0 - TAIL_MASS))

    def pdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        pos = x_arr > 0
        safe = np.where(pos, x_arr, 1.0)
        s = self.log_std
        z = (np.log(safe) - self.log_mean) / s
        val = np.exp(-0.5 * z * z) / (safe * math.sqrt(2.0 * math.pi) * s)
        return _out(x, np.where(pos, val, 0.0))

    def cdf(self, x):
        x_arr = np.asarray(x, dtype=float)
        pos = x_arr > 0
        safe = np.where(pos, x_arr, 1.0)
        val = _sp.ndtr((np.log(safe) - self.log_mean) / self.log_std)
        return _out(x, np.where(pos, val, 0.0))

    def quantile(self, p):
        p_arr = np.asarray(p, dtype=float)
        return _out(p, np.exp(self.log_mean + self.log_std * _sp.ndtri(p_arr)))

    def draw(self, rng, size):
        offset_db = self.sigma_delta_db * rng.standard_normal(size)
        return np.exp(K_DB * (self.sigma_n_db + offset_db))


@dataclass(frozen=True)
class GaussianApproxParams:
    phi1: float
    phi2: float
    phi3: float


def gaussian_approx_params(model: LogNormalModel) -> GaussianApproxParams:
    """Mean, variance and positive-part mass of the moment-matched normal."""
    k = K_DB
    mu_db, s2 = model.sigma_n_db, model.sigma_delta_db ** 2
    phi1 = math.exp(k * mu_db + k * k * s2 / 2.0)
    phi2 = math.expm1(k * k * s2) * math.exp(2.0 * k * mu_db + k * k * s2)
    phi3 = 0.5 * (1.0 - math.erf(-phi1 / math.sqrt(2.0 * phi2)))
    return GaussianApproxParams(phi1, phi2, phi3)


@dataclass(frozen=True)
class GaussianApprox:
    base: LogNormalModel

    @property
    def params(self) -> GaussianApproxParams:
        return gaussian_approx_params(self.base)

    @property
    def nominal(self) -> float:
        return self.base.nominal

    def support(self) -> tuple[float, float]:
        p = self.params
        sd = math.sqrt(p.phi2)
        return max(0.0, p.phi1 - 9.0 * sd), p.phi1 + 9.0 * sd

    def pdf(self, x):
        p = self.params
        x_arr = np.asarray(x, dtype=float)
        val = np.exp(-((x_arr - p.phi1) ** 2) / (2.0 * p.phi2)) / (
            math.sqrt(2.0 * math.pi * p.phi2) * p.phi3)
        return _out(x, np.where(x_arr > 0, val, 0.0))

    def cdf(self, x):
        p = self.params
        sd = math.sqrt(p.phi2)
        x_arr = np.asarray(x, dtype=float)
        val = (_sp.ndtr((x_arr - p.phi1) / sd) - _sp.ndtr(-p.phi1 / sd)) / p.phi3
        return _out(x, np.where(x_arr > 0, np.clip(val, 0.0, 1.0), 0.0))

    def quantile(self, q):
        p = self.params
        sd = math.sqrt(p.phi2)
        q_arr = np.asarray(q, dtype=float)
        lower = _sp.ndtr(-p.phi1 / sd)
        return _out(q, p.phi1 + sd * _sp.ndtri(lower + q_arr * p.phi3))

    def draw(self, rng, size):
        return np.maximum(self.quantile(streams.open_uniform(rng, size)),
                          np.finfo(float).tiny)


NoiseModel = Union[LogUniformModel, LogNormalModel, GaussianApprox]


def pdf(model: NoiseModel, x):
    return model.pdf(x)


def cdf(model: NoiseModel, x):
    return model.cdf(x)


def quantile(model: NoiseModel, p):
    return model.quantile(p)


def sample(model: NoiseModel, rng_seed: int, count: int, workers: int = 1) -> np.ndarray:
    """Draw ``count`` noise powers, deterministically for a given seed.

    Log-uniform and the Gaussian surrogate use inverse-CDF sampling; the
    log-normal draws a normal dB offset and exponentiates.
    """
    if count < 1:
        raise DomainError(f"count must be positive, got {count!r}")
    parts = streams.map_blocks(model.draw, rng_seed, int(count), workers=workers)
    return np.concatenate(parts)
