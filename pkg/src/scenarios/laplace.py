"""Level-set thresholds of the two-component Laplace covariate mixture."""

import math
from dataclasses import dataclass

import numpy as np

from ..model.exceptions import ValidationError


@dataclass(frozen=True)
class LaplaceThresholds:
    """Levels between which {alpha_1 g_1 + alpha_2 g_2 >= t} has two components."""
    t_star: float
    t_upper_1: float
    t_upper_2: float
    valid: bool

    @property
    def t_upper(self) -> float:
        return min(self.t_upper_1, self.t_upper_2)


def laplace_thresholds(alpha1: float, sigma: float, ell: float) -> LaplaceThresholds:
    if not 0 < alpha1 < 1:
        raise ValidationError(f"alpha1 must lie in (0, 1), got {alpha1}")
    if not sigma > 0 or not ell > 0:
        raise ValidationError(f"sigma and ell must be positive, got sigma={sigma}, ell={ell}")
    alpha2 = 1.0 - alpha1
    t_star = math.sqrt(alpha1 * alpha2) / sigma * math.exp(-ell / (2.0 * sigma))
    decay = math.exp(-ell / sigma)
    t_upper_1 = (alpha1 + alpha2 * decay) / (2.0 * sigma)
    t_upper_2 = (alpha2 + alpha1 * decay) / (2.0 * sigma)
    log_odds = math.log(alpha1 / alpha2)
    return LaplaceThresholds(t_star, t_upper_1, t_upper_2, -ell / sigma < log_odds < ell / sigma)


def laplace_mixture_density(x, alpha1: float, sigma: float, ell: float, mu1: float = 0.0):
    """alpha_1 Laplace(mu1, sigma) + alpha_2 Laplace(mu1 + ell, sigma) at x."""
    x = np.asarray(x, dtype=float)
    g1 = np.exp(-np.abs(x - mu1) / sigma) / (2.0 * sigma)
    g2 = np.exp(-np.abs(x - mu1 - ell) / sigma) / (2.0 * sigma)
    return alpha1 * g1 + (1.0 - alpha1) * g2


def count_super_level_intervals(values, t: float) -> int:
    """Number of maximal runs of consecutive grid values >= t."""
    above = np.asarray(values) >= t
    if not np.any(above):
        return 0
    starts = np.flatnonzero(above[1:] & ~above[:-1])
    return int(above[0]) + len(starts)


def scan_level_set(alpha1: float, sigma: float, ell: float, t: float, points: int = 20001) -> int:
    """Count super-level intervals of the mixture on a fine grid around both modes."""
    pad = 12.0 * sigma
    grid = np.union1d(np.linspace(-pad, ell + pad, points), [0.0, ell])
    return count_super_level_intervals(laplace_mixture_density(grid, alpha1, sigma, ell), t)
