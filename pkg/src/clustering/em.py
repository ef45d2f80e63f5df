"""EM for a univariate Gaussian mixture, the parametric benchmark."""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import logsumexp
from scipy.stats import norm

from ..model.exceptions import DataError, ValidationError
from ..model.types import DensityGrid
from .constants import EM_MAX_ITER, EM_TOL, EM_VARIANCE_FLOOR, WEIGHT_SUM_TOLERANCE
from .kmeans import kmeans_plusplus


@dataclass(frozen=True, eq=False)
class GaussianMixtureFit:
    """Fitted weights, means and variances, components sorted by mean."""
    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    loglik: float
    iterations: int
    loglik_trace: Tuple[float, ...] = ()

    def __post_init__(self):
        if abs(float(np.sum(self.weights)) - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ValidationError(f"Mixture weights sum to {np.sum(self.weights)}, not 1")
        if np.any(np.asarray(self.variances) <= 0):
            raise ValidationError("Mixture variances must be positive")

    @property
    def m(self) -> int:
        return len(self.weights)


def _e_step(y, weights, means, variances):
    log_joint = np.log(weights) + norm.logpdf(y[:, None], means, np.sqrt(variances))
    log_marginal = logsumexp(log_joint, axis=1)
    return float(log_marginal.sum()), np.exp(log_joint - log_marginal[:, None])


def em_gaussian_1d(y, m: int, seed: Optional[int] = None, max_iter: int = EM_MAX_ITER,
                   tol: float = EM_TOL) -> GaussianMixtureFit:
    """Fit an m-component Gaussian mixture to y by expectation-maximization.

    Starts from k-means++ centers with equal weights and the pooled
    variance; stops when the relative log-likelihood gain drops below
    ``tol`` or after ``max_iter`` M-steps. Variances are floored at
    1e-6 times the sample variance.
    """
    y = np.asarray(y, dtype=float).ravel()
    if not np.all(np.isfinite(y)):
        raise DataError("EM input contains non-finite values")
    if m < 1:
        raise ValidationError(f"Component count must be >= 1, got {m}")
    if len(y) < 2 * m:
        raise ValidationError(f"EM needs at least {2 * m} observations for {m} components, got {len(y)}")

    n = len(y)
    pooled = float(np.var(y))
    floor = EM_VARIANCE_FLOOR * pooled if pooled > 0 else EM_VARIANCE_FLOOR
    rng = np.random.default_rng(seed)
    weights = np.full(m, 1.0 / m)
    means = kmeans_plusplus(y[:, None], m, rng)[:, 0]
    variances = np.full(m, max(pooled, floor))

    loglik, resp = _e_step(y, weights, means, variances)
    trace = [loglik]
    iterations = 0
    for iterations in range(1, max_iter + 1):
        mass = np.maximum(resp.sum(axis=0), np.finfo(float).tiny)
        weights = mass / mass.sum()
        means = resp.T @ y / mass
        variances = np.maximum((resp * (y[:, None] - means) ** 2).sum(axis=0) / mass, floor)

        new_loglik, resp = _e_step(y, weights, means, variances)
        trace.append(new_loglik)
        converged = new_loglik - loglik < tol * abs(loglik)
        loglik = new_loglik
        if converged:
            break

    order = np.argsort(means, kind="stable")
    logging.debug(f"EM converged in {iterations} iterations, loglik {loglik:.6f}")
    return GaussianMixtureFit(weights[order], means[order], variances[order], loglik, iterations,
                              tuple(trace))


def gaussian_density_grid(fit: GaussianMixtureFit, component: int, grid: DensityGrid) -> DensityGrid:
    """Normal density of one fitted component tabulated on the grid."""
    if not 1 <= component <= fit.m:
        raise ValidationError(f"Component must lie in 1..{fit.m}, got {component}")
    i = component - 1
    return grid.with_values(norm.pdf(grid.abscissae, fit.means[i], np.sqrt(fit.variances[i])))
