"""Interval rule for the two-uniform toy model."""

import numpy as np

from ..model.constants import INTERVAL
from ..model.exceptions import ValidationError
from ..model.types import ClusterAssignment


def interval_cluster(x) -> ClusterAssignment:
    """Label 1 below 1 - lambda, 2 from 1 on, 0 in between, with lambda = 2 - max(x)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 2 and x.shape[1] == 1:
        x = x[:, 0]
    if x.ndim != 1 or len(x) == 0:
        raise ValidationError("The interval rule needs a nonempty univariate covariate")

    lam = 2.0 - float(np.max(x))
    labels = np.zeros(len(x), dtype=int)
    labels[x <= 1.0 - lam] = 1
    labels[x >= 1.0] = 2
    return ClusterAssignment(labels, 2, INTERVAL, extras={"lambda": lam})
