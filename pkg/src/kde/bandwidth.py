"""Bandwidth policies and data-driven bandwidth selection."""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from ..model.exceptions import ValidationError
from .constants import (FIXED, IQR_SCALE, LSCV, LSCV_CANDIDATE_COUNT, LSCV_FACTOR_RANGE,
                        SILVERMAN, SILVERMAN_EXPONENT, SILVERMAN_FACTOR)
from .exceptions import DegenerateSampleError

_SQRT_4PI = np.sqrt(4.0 * np.pi)
_SQRT_2PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class BandwidthPolicy:
    """How the bandwidth h of each component estimate is chosen.

    ``lscv`` without candidates searches multipliers of the Silverman
    bandwidth of the same points.
    """
    kind: str
    h: Optional[float] = None
    candidates: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.kind == FIXED:
            if self.h is None or not self.h > 0 or not np.isfinite(self.h):
                raise ValidationError(f"Fixed bandwidth must be positive, got {self.h}")
        elif self.kind == LSCV:
            if self.candidates is not None:
                candidates = tuple(float(c) for c in self.candidates)
                if not candidates:
                    raise ValidationError("LSCV candidate list is empty")
                if any(not c > 0 for c in candidates):
                    raise ValidationError("LSCV candidates must be positive")
                if any(b <= a for a, b in zip(candidates, candidates[1:])):
                    raise ValidationError("LSCV candidates must be strictly increasing")
                object.__setattr__(self, 'candidates', candidates)
        elif self.kind != SILVERMAN:
            raise ValidationError(f"Unknown bandwidth policy: {self.kind}")

    @classmethod
    def fixed(cls, h: float) -> "BandwidthPolicy":
        return cls(FIXED, h=float(h))

    @classmethod
    def silverman(cls) -> "BandwidthPolicy":
        return cls(SILVERMAN)

    @classmethod
    def lscv(cls, candidates=None) -> "BandwidthPolicy":
        return cls(LSCV, candidates=None if candidates is None else tuple(candidates))

    @classmethod
    def parse(cls, text: str) -> "BandwidthPolicy":
        """Parse ``silverman``, ``lscv`` or ``fixed:H``."""
        text = text.strip().lower()
        if text == SILVERMAN:
            return cls.silverman()
        if text == LSCV:
            return cls.lscv()
        if text.startswith(FIXED + ":"):
            try:
                return cls.fixed(float(text.split(":", 1)[1]))
            except ValueError:
                raise ValidationError(f"Invalid fixed bandwidth: {text}")
        raise ValidationError(f"Unknown bandwidth policy: {text} (use silverman, lscv or fixed:H)")

    def __str__(self) -> str:
        if self.kind == FIXED:
            return f"{FIXED}:{self.h!r}"
        return self.kind


def _check_spread(points: np.ndarray) -> None:
    if len(np.unique(points)) < 2:
        raise DegenerateSampleError(f"degenerate sample: {len(points)} point(s) with fewer than 2 distinct values")


def silverman_bandwidth(points) -> float:
    """Silverman's rule of thumb, 1.06 * min(sd, IQR/1.34) * N^(-1/5)."""
    points = np.asarray(points, dtype=float).ravel()
    _check_spread(points)
    sigma = np.std(points, ddof=1)
    q75, q25 = np.percentile(points, [75, 25])
    iqr = q75 - q25
    # heavy ties can make the IQR vanish while the sample still spreads
    spread = min(sigma, iqr / IQR_SCALE) if iqr > 0 else sigma
    return float(SILVERMAN_FACTOR * spread * len(points) ** SILVERMAN_EXPONENT)


def lscv_score(points, h: float) -> float:
    """Least-squares cross-validation criterion for a Gaussian kernel.

    Evaluates int f_h^2 - (2/n) sum_k f_{h,-k}(Y_k) in closed form: the
    convolution of two Gaussian kernels is a Gaussian of variance 2.
    """
    points = np.asarray(points, dtype=float).ravel()
    n = len(points)
    u2 = ((points[:, None] - points[None, :]) / h) ** 2
    integral_f2 = np.sum(np.exp(-u2 / 4.0)) / (n * n * h * _SQRT_4PI)
    off_diagonal = (np.sum(np.exp(-u2 / 2.0)) - n) / _SQRT_2PI
    leave_one_out = off_diagonal / ((n - 1) * h)
    return float(integral_f2 - 2.0 * leave_one_out / n)


def lscv_candidates(points, policy: BandwidthPolicy) -> np.ndarray:
    """Candidate bandwidths searched by the LSCV policy."""
    if policy.candidates is not None:
        return np.asarray(policy.candidates)
    lo, hi = LSCV_FACTOR_RANGE
    return silverman_bandwidth(points) * np.geomspace(lo, hi, LSCV_CANDIDATE_COUNT)


def select_bandwidth(points, policy: BandwidthPolicy) -> float:
    """Bandwidth for one component sample under the given policy."""
    if policy.kind == FIXED:
        return policy.h

    points = np.asarray(points, dtype=float).ravel()
    _check_spread(points)
    if policy.kind == SILVERMAN:
        return silverman_bandwidth(points)

    candidates = lscv_candidates(points, policy)
    scores = np.array([lscv_score(points, h) for h in candidates])
    best = int(np.argmin(scores))
    logging.debug(f"LSCV picked h={candidates[best]:.6g} among {len(candidates)} candidates")
    return float(candidates[best])
