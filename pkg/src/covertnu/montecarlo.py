"""Seeded Monte Carlo estimators used to cross-check the analytic results.

Two levels of simulation are provided.  The prior-level estimators draw
noise powers from a :mod:`covertnu.noise` model and average the asymptotic
0/1 error surface; the sample-level :func:`simulate_detector` generates the
raw received sequences and runs the radiometer on them.

Proportions carry a normal-approximation confidence half-width
``z * sqrt(p (1 - p) / n)``.  When fewer than ten trials fall on either side
the plug-in ``p`` is replaced by the Wilson centre ``(c + z^2/2)/(n + z^2)``
so the interval does not collapse to zero width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import noise, streams
from .detector import asymptotic_xi
from .metrics import _check_epsilon, optimal_gamma
from .noise import LogUniformModel, NoiseModel
from .special import ConvergenceError, Tolerance, bisect
from .thresholds import MAX_BRACKET_GROWTH, _scale

MC_TOL = Tolerance(abs_tol=0.0, rel_tol=1e-9, max_iter=200)
# Upper bound on floats generated per block of detector trials.
_DETECTOR_BLOCK_FLOATS = 1 << 20


@dataclass(frozen=True)
class MonteCarloConfig:
    seed: int = 0
    trials: int = 100_000
    confidence_z: float = 3.0
    workers: int = 1

    def __post_init__(self):
        if self.trials < 100:
            raise ValueError(f"trials must be at least 100, got {self.trials!r}")
        if not self.confidence_z > 0:
            raise ValueError("confidence_z must be positive")


@dataclass(frozen=True)
class EstimateWithCI:
    estimate: float
    half_width: float
    trials: int

    @property
    def low(self) -> float:
        return self.estimate - self.half_width

    @property
    def high(self) -> float:
        return self.estimate + self.half_width

    def contains(self, value: float) -> bool:
        return self.low <= value <= self.high


def proportion(count: int, trials: int, z: float) -> EstimateWithCI:
    count, trials = int(count), int(trials)
    p_hat = count / trials
    if min(count, trials - count) < 10:
        p_use = (count + 0.5 * z * z) / (trials + z * z)
    else:
        p_use = p_hat
    return EstimateWithCI(p_hat, z * math.sqrt(p_use * (1.0 - p_use) / trials), trials)


def _draws(model: NoiseModel, cfg: MonteCarloConfig) -> np.ndarray:
    return noise.sample(model, cfg.seed, cfg.trials, workers=cfg.workers)


def _detected_count(draws, p_w, gamma) -> int:
    """Number of noise draws for which the warden makes no error."""
    return int(np.count_nonzero(asymptotic_xi(draws, gamma, p_w) == 0.0))


def estimate_xi_avg(model: NoiseModel, p_w: float, gamma: Optional[float],
                    cfg: MonteCarloConfig) -> EstimateWithCI:
    """Empirical average error sum; ``gamma=None`` uses the optimal threshold."""
    if gamma is None:
        gamma = optimal_gamma(model, p_w)
    hits = _detected_count(_draws(model, cfg), p_w, gamma)
    return proportion(cfg.trials - hits, cfg.trials, cfg.confidence_z)


def estimate_p_out(model: NoiseModel, p_w: float, epsilon: float,
                   cfg: MonteCarloConfig, gamma: Optional[float] = None) -> EstimateWithCI:
    """Empirical covert outage: fraction of draws with error sum below ``1 - epsilon``.

    Uses the same draws as :func:`estimate_xi_avg` for the same seed, so the
    two estimates sum to exactly one.
    """
    _check_epsilon(epsilon)
    if gamma is None:
        gamma = optimal_gamma(model, p_w)
    xi = asymptotic_xi(_draws(model, cfg), gamma, p_w)
    outages = int(np.count_nonzero(xi < 1.0 - epsilon))
    return proportion(outages, cfg.trials, cfg.confidence_z)


class _CommonDraws:
    """Empirical average error sum on one fixed, sorted draw set."""

    def __init__(self, model: NoiseModel, cfg: MonteCarloConfig):
        self.model = model
        self.sorted = np.sort(_draws(model, cfg))
        self.n = self.sorted.size

    def xi(self, p_w: float) -> float:
        gamma = optimal_gamma(self.model, p_w)
        upper = np.searchsorted(self.sorted, gamma, side="right")
        lower = np.searchsorted(self.sorted, gamma - p_w, side="left")
        return (self.n - int(upper - lower)) / self.n

    def threshold(self, target: float, tol: Tolerance) -> float:
        scale = hi = _scale(self.model)
        if isinstance(self.model, LogUniformModel):
            # the window covers the whole support once p_w reaches its width
            hi = scale * (1.0 + 1e-12)
        while self.xi(hi) > target:
            hi *= 2.0
            if hi > MAX_BRACKET_GROWTH * scale:
                raise ConvergenceError(
                    f"no power up to {hi:.3g} pushes the empirical xi below {target}",
                    estimate=hi)
        return bisect(self.xi, 0.0, hi, target, tol)


def mc_threshold(model: NoiseModel, epsilon: float, cfg: MonteCarloConfig,
                 tol: Tolerance = MC_TOL) -> float:
    """Power threshold from bisection on a common-random-numbers estimate.

    One draw set is reused for every trial power.  Because the optimal
    windows are nested in ``p_w``, the empirical average error sum is then a
    nonincreasing step function and bisection returns the smallest power at
    which it reaches ``1 - epsilon``.
    """
    _check_epsilon(epsilon)
    return _CommonDraws(model, cfg).threshold(1.0 - epsilon, tol)


def mc_threshold_ci(model: NoiseModel, epsilon: float, cfg: MonteCarloConfig,
                    tol: Tolerance = MC_TOL) -> EstimateWithCI:
    """:func:`mc_threshold` plus a half-width from inverting the proportion CI."""
    _check_epsilon(epsilon)
    common = _CommonDraws(model, cfg)
    target = 1.0 - epsilon
    estimate = common.threshold(target, tol)
    hw = proportion(round(target * cfg.trials), cfg.trials, cfg.confidence_z).half_width
    lo = common.threshold(min(target + hw, 1.0), tol) if target + hw < 1.0 else 0.0
    hi = common.threshold(max(target - hw, 0.0), tol)
    return EstimateWithCI(estimate, 0.5 * (hi - lo), cfg.trials)


def simulate_detector(sigma_w_sq: float, p_w: float, n_samples: int, gamma: float,
                      cfg: MonteCarloConfig) -> tuple[EstimateWithCI, EstimateWithCI]:
    """Empirical false-alarm and misdetection rates of the radiometer.

    Each trial draws N noise-only samples and N samples of
    ``sqrt(p_w) x + v`` with ``x ~ N(0, 1)`` and ``v ~ N(0, sigma_w_sq)``, and
    compares the mean square of each against ``gamma``.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be positive, got {n_samples!r}")
    if not sigma_w_sq > 0:
        raise ValueError(f"sigma_w_sq must be positive, got {sigma_w_sq!r}")
    sd = math.sqrt(sigma_w_sq)
    amp = math.sqrt(p_w)
    per_block = max(1, _DETECTOR_BLOCK_FLOATS // n_samples)

    def run(rng, m):
        idle = sd * rng.standard_normal((m, n_samples))
        false_alarms = np.count_nonzero(np.mean(idle * idle, axis=1) > gamma)
        x = rng.standard_normal((m, n_samples))
        y = amp * x + sd * rng.standard_normal((m, n_samples))
        misses = np.count_nonzero(np.mean(y * y, axis=1) <= gamma)
        return false_alarms, misses

    parts = streams.map_blocks(run, cfg.seed, cfg.trials, per_block, cfg.workers)
    fa = sum(p[0] for p in parts)
    md = sum(p[1] for p in parts)
    z = cfg.confidence_z
    return proportion(fa, cfg.trials, z), proportion(md, cfg.trials, z)
