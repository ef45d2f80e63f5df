"""Immutable domain types used by every estimator and metric."""

import itertools
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import List, Mapping, Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from .constants import MAX_PERMUTATION_ORDER, RADIUS_GRAPH, UNASSIGNED_LABEL
from .exceptions import ValidationError


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """Density values tabulated on lo + j*(hi-lo)/(G-1), j = 0..G-1."""
    lo: float
    hi: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValidationError("Grid values must be one-dimensional")
        if len(values) < 2:
            raise ValidationError(f"Grid needs at least 2 points, got {len(values)}")
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)) or not self.lo < self.hi:
            raise ValidationError(f"Grid requires lo < hi, got [{self.lo}, {self.hi}]")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValidationError("Grid values must be finite and nonnegative")
        object.__setattr__(self, 'lo', float(self.lo))
        object.__setattr__(self, 'hi', float(self.hi))
        object.__setattr__(self, 'values', _frozen(values))

    @property
    def g(self) -> int:
        return len(self.values)

    @property
    def abscissae(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.g)

    @property
    def step(self) -> float:
        return (self.hi - self.lo) / (self.g - 1)

    def same_support(self, other: "DensityGrid") -> bool:
        """Whether both grids share lo, hi and G."""
        return self.lo == other.lo and self.hi == other.hi and self.g == other.g

    def with_values(self, values: np.ndarray) -> "DensityGrid":
        """Return a grid on the same abscissae carrying new values."""
        values = np.asarray(values, dtype=float)
        if values.shape != (self.g,):
            raise ValidationError(f"Expected {self.g} values, got shape {values.shape}")
        return DensityGrid(self.lo, self.hi, values)

    def integral(self) -> float:
        """Trapezoidal mass over [lo, hi]."""
        return float(trapezoid(self.values, dx=self.step))


def make_grid(lo: float, hi: float, g: int) -> DensityGrid:
    """Grid skeleton with g equally spaced abscissae and zero values."""
    if not lo < hi:
        raise ValidationError(f"Grid requires lo < hi, got [{lo}, {hi}]")
    if int(g) != g or g < 2:
        raise ValidationError(f"Grid needs an integer number of points >= 2, got {g}")
    return DensityGrid(lo, hi, np.zeros(int(g)))


@dataclass(frozen=True, eq=False)
class LabeledSample:
    """Observations (Y_k, X_k) with optional true component labels I_k."""
    y: np.ndarray
    x: np.ndarray
    m: int
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        x = np.asarray(self.x, dtype=float)
        if y.ndim != 1 or len(y) < 1:
            raise ValidationError("y must be a nonempty vector")
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        if x.ndim != 2 or x.shape[1] < 1:
            raise ValidationError("x must be a vector or an n x d matrix")
        if x.shape[0] != len(y):
            raise ValidationError(f"y has {len(y)} rows but x has {x.shape[0]}")
        if int(self.m) != self.m or self.m < 2:
            raise ValidationError(f"A mixture needs at least 2 components, got {self.m}")
        object.__setattr__(self, 'y', _frozen(y))
        object.__setattr__(self, 'x', _frozen(x))
        object.__setattr__(self, 'm', int(self.m))

        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != y.shape:
                raise ValidationError(f"labels have shape {labels.shape}, expected {y.shape}")
            if not np.all(labels == np.round(labels)):
                raise ValidationError("labels must be integers")
            labels = labels.astype(int)
            if np.any(labels < 1) or np.any(labels > self.m):
                raise ValidationError(f"labels must lie in 1..{self.m}")
            object.__setattr__(self, 'labels', _frozen(labels))

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def d(self) -> int:
        return self.x.shape[1]

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    def hide_labels(self) -> "LabeledSample":
        """Copy of the sample as a clusterer sees it."""
        return LabeledSample(self.y, self.x, self.m)


@dataclass(frozen=True)
class Permutation:
    """Bijection on 1..M; mapping[i - 1] is the image of i."""
    mapping: Tuple[int, ...]

    def __post_init__(self):
        mapping = tuple(int(v) for v in self.mapping)
        if sorted(mapping) != list(range(1, len(mapping) + 1)):
            raise ValidationError(f"Not a permutation of 1..{len(mapping)}: {mapping}")
        object.__setattr__(self, 'mapping', mapping)

    @classmethod
    def identity(cls, m: int) -> "Permutation":
        return cls(tuple(range(1, m + 1)))

    @property
    def m(self) -> int:
        return len(self.mapping)

    def __call__(self, label: int) -> int:
        return UNASSIGNED_LABEL if label == UNASSIGNED_LABEL else self.mapping[label - 1]

    def apply(self, labels: np.ndarray) -> np.ndarray:
        """Relabel a label vector; label 0 stays 0."""
        lookup = np.array((UNASSIGNED_LABEL,) + self.mapping)
        return lookup[np.asarray(labels, dtype=int)]

    def inverse(self) -> "Permutation":
        inverse = [0] * self.m
        for i, image in enumerate(self.mapping, start=1):
            inverse[image - 1] = i
        return Permutation(tuple(inverse))


def enumerate_permutations(m: int) -> List[Permutation]:
    """All m! permutations of 1..m in lexicographic order."""
    if int(m) != m or not 1 <= m <= MAX_PERMUTATION_ORDER:
        raise ValidationError(
            f"Permutation enumeration supports 1 <= m <= {MAX_PERMUTATION_ORDER}, got {m}; "
            "larger M needs maximum-weight bipartite matching on the confusion matrix")
    return [Permutation(p) for p in itertools.permutations(range(1, int(m) + 1))]


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    """Predicted labels in 0..M from one clusterer, plus its diagnostics."""
    predicted: np.ndarray
    m: int
    method: str
    radius: Optional[float] = None
    inertia: Optional[float] = None
    extras: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        predicted = np.asarray(self.predicted)
        if predicted.ndim != 1 or len(predicted) < 1:
            raise ValidationError("predicted labels must be a nonempty vector")
        if not np.all(predicted == np.round(predicted)):
            raise ValidationError("predicted labels must be integers")
        predicted = predicted.astype(int)
        if np.any(predicted < 0) or np.any(predicted > self.m):
            raise ValidationError(f"predicted labels must lie in 0..{self.m}")
        if self.radius is not None and not self.radius >= 0:
            raise ValidationError(f"radius must be nonnegative, got {self.radius}")
        if self.method == RADIUS_GRAPH:
            if np.any(predicted == UNASSIGNED_LABEL):
                raise ValidationError("radius-graph clustering never rejects observations")
            if len(np.unique(predicted)) != self.m:
                raise ValidationError(f"radius-graph clustering must fill all {self.m} clusters")
        object.__setattr__(self, 'predicted', _frozen(predicted))
        object.__setattr__(self, 'extras', MappingProxyType(dict(self.extras)))

    @property
    def n(self) -> int:
        return len(self.predicted)

    @property
    def rejected(self) -> int:
        """Size of the reject cluster C_0."""
        return int(np.sum(self.predicted == UNASSIGNED_LABEL))

    def support_counts(self) -> np.ndarray:
        """N_i for i = 1..M."""
        return np.bincount(self.predicted, minlength=self.m + 1)[1:]

    def relabel(self, permutation: Permutation) -> "ClusterAssignment":
        """Assignment with every label i replaced by permutation(i)."""
        if permutation.m != self.m:
            raise ValidationError(f"Permutation acts on {permutation.m} labels, assignment has {self.m}")
        return ClusterAssignment(permutation.apply(self.predicted), self.m, self.method,
                                 radius=self.radius, inertia=self.inertia, extras=dict(self.extras))
