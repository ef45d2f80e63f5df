"""Covariates and response variables built from 9-instant consumption curves."""

import logging
from typing import Optional, Tuple

import numpy as np

from ..model.exceptions import DataError, ValidationError
from .constants import (CURVE_LENGTH, SYNTHETIC_BASE_RANGE, SYNTHETIC_DIP_PROFILE,
                        SYNTHETIC_NOISE_RANGE, V54_CONVENTIONS, V54_LITERAL)


def relative_variation(curves: np.ndarray, i: int, j: int) -> np.ndarray:
    """v_ij = (Z_j - Z_i) / Z_i with 1-based instants."""
    return (curves[:, j - 1] - curves[:, i - 1]) / curves[:, i - 1]


def erdf_features(curves, convention: str = V54_LITERAL) -> Tuple[np.ndarray, np.ndarray]:
    """Return (X, Y): the n x 2 covariates and the n x 6 derived variables.

    literal:  v54 = (Z4 - Z5) / Z5, v65 = (Z5 - Z6) / Z6
    forward:  v54 = (Z5 - Z4) / Z4, v65 = (Z6 - Z5) / Z5
    """
    if convention not in V54_CONVENTIONS:
        raise ValidationError(f"Unknown variation convention '{convention}', "
                              f"expected one of {', '.join(V54_CONVENTIONS)}")
    curves = np.asarray(curves, dtype=float)
    if curves.ndim != 2 or curves.shape[1] != CURVE_LENGTH:
        raise DataError(f"Expected curves with {CURVE_LENGTH} columns, got shape {curves.shape}")
    invalid = ~np.all(np.isfinite(curves) & (curves > 0), axis=1)
    if np.any(invalid):
        row = int(np.flatnonzero(invalid)[0]) + 1
        raise DataError(f"Curve in row {row} has a nonpositive or missing consumption")

    if convention == V54_LITERAL:
        v54 = relative_variation(curves, 5, 4)
        v65 = relative_variation(curves, 6, 5)
    else:
        v54 = relative_variation(curves, 4, 5)
        v65 = relative_variation(curves, 5, 6)
    x = np.column_stack([np.minimum(v54, v65), v54 + v65])

    before = curves[:, 0:3].mean(axis=1)
    during = curves[:, 3:6].mean(axis=1)
    after = curves[:, 6:9].mean(axis=1)
    y = np.column_stack([
        before,
        during,
        after,
        (during - before) / before,
        (after - before) / before,
        (after - during) / during,
    ])
    return x, y


def synthetic_erdf_curves(n: int = 200, seed: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Curves with a flat base level, half of them dipping over instants 4..6.

    Returns the n x 9 curves and their construction labels (1 = dip, 2 = flat).
    """
    if int(n) != n or n < 2 or n % 2:
        raise ValidationError(f"The curve fixture needs an even n >= 2, got {n}")
    n = int(n)
    rng = np.random.default_rng(seed)
    labels = np.repeat([1, 2], n // 2)
    rng.shuffle(labels)

    base = rng.uniform(*SYNTHETIC_BASE_RANGE, size=n)
    profile = np.ones((n, CURVE_LENGTH))
    profile[labels == 1, 3:6] = SYNTHETIC_DIP_PROFILE
    noise = rng.uniform(*SYNTHETIC_NOISE_RANGE, size=(n, CURVE_LENGTH))
    logging.debug(f"Synthetic curves: {int(np.sum(labels == 1))} dipping of {n}")
    return base[:, None] * profile * noise, labels
