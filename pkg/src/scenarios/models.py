"""Scenario parameterizations: the Gaussian mixture for Y and the covariate families for X."""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from ..model.exceptions import ValidationError


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not value > 0 or not np.isfinite(value):
        raise ValidationError(f"{name} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class GaussianMixtureY:
    """Y | I = i ~ N(means[i], variances[i]) with P(I = i) = weights[i]."""
    weights: Tuple[float, ...]
    means: Tuple[float, ...]
    variances: Tuple[float, ...]

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        means = tuple(float(v) for v in self.means)
        variances = tuple(_positive("variance", v) for v in self.variances)
        if not len(weights) == len(means) == len(variances) or len(weights) < 1:
            raise ValidationError("weights, means and variances must have the same nonzero length")
        if any(not w > 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-12:
            raise ValidationError(f"weights must be positive and sum to 1, got {weights}")
        object.__setattr__(self, 'weights', weights)
        object.__setattr__(self, 'means', means)
        object.__setattr__(self, 'variances', variances)

    @classmethod
    def separated(cls, delta: float) -> "GaussianMixtureY":
        """3/4 N(-delta, 1) + 1/4 N(delta, 1), the EM-comparison model."""
        return cls((0.75, 0.25), (-float(delta), float(delta)), (1.0, 1.0))

    @classmethod
    def balanced(cls) -> "GaussianMixtureY":
        """1/2 N(-1, 1) + 1/2 N(1, 1), the clusterer-comparison model."""
        return cls((0.5, 0.5), (-1.0, 1.0), (1.0, 1.0))

    @property
    def m(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class UniformX:
    """g1 = 1 on (0, 1), g2 = 1/2 on (1 + delta, 3 + delta)."""
    delta: float
    name = "uniform"
    dim = 1

    def __post_init__(self):
        _positive("delta", self.delta)

    def draw(self, labels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        u = rng.random(len(labels))
        return np.where(labels == 1, u, 1.0 + self.delta + 2.0 * u)[:, None]


@dataclass(frozen=True)
class LaplaceX:
    """Laplace(mu1, sigma) and Laplace(mu1 + ell, sigma)."""
    ell: float
    sigma: float = 1.0
    mu1: float = 1.0
    name = "laplace"
    dim = 1

    def __post_init__(self):
        _positive("ell", self.ell)
        _positive("sigma", self.sigma)

    def draw(self, labels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        centers = np.where(labels == 1, self.mu1, self.mu1 + self.ell)
        return (centers + rng.laplace(0.0, self.sigma, len(labels)))[:, None]


@dataclass(frozen=True)
class ToyUniformX:
    """g1 = 1 on [0, 1], g2 = 1 on [1 - lam, 2 - lam]."""
    lam: float
    name = "toy_uniform"
    dim = 1

    def __post_init__(self):
        if not 0 <= self.lam < 1:
            raise ValidationError(f"lam must lie in [0, 1), got {self.lam}")

    def draw(self, labels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        u = rng.random(len(labels))
        return np.where(labels == 1, u, 1.0 - self.lam + u)[:, None]


@dataclass(frozen=True)
class CircleSquareX:
    """N((a, 0), I_2) against the uniform law on [-1, 1]^2."""
    a: float
    name = "circle_square"
    dim = 2

    def __post_init__(self):
        _positive("a", self.a)

    def draw(self, labels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        n = len(labels)
        gaussian = rng.standard_normal((n, 2)) + np.array([self.a, 0.0])
        square = rng.uniform(-1.0, 1.0, (n, 2))
        return np.where((labels == 1)[:, None], gaussian, square)


@dataclass(frozen=True)
class ConcentricX:
    """Uniform laws on the annuli r1 +- eps and r2 +- eps around the origin."""
    r2: float
    r1: float = 0.3
    eps: float = 0.15
    name = "concentric"
    dim = 2

    def __post_init__(self):
        for name in ("r1", "r2", "eps"):
            _positive(name, getattr(self, name))
        if self.r1 - self.eps < 0:
            raise ValidationError(f"Inner annulus crosses the origin: r1={self.r1}, eps={self.eps}")
        if not self.r2 > self.r1 + 2 * self.eps:
            raise ValidationError(f"Annuli overlap: need r2 > r1 + 2 eps, got r2={self.r2}")

    def draw(self, labels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        centers = np.where(labels == 1, self.r1, self.r2)
        inner2 = (centers - self.eps) ** 2
        outer2 = (centers + self.eps) ** 2
        # area-uniform: the squared radius is uniform between the squared bounds
        rho = np.sqrt(inner2 + rng.random(len(labels)) * (outer2 - inner2))
        theta = rng.uniform(0.0, 2.0 * np.pi, len(labels))
        return np.column_stack([rho * np.cos(theta), rho * np.sin(theta)])


CovariateModel = Union[UniformX, LaplaceX, ToyUniformX, CircleSquareX, ConcentricX]


@dataclass(frozen=True)
class ScenarioSpec:
    """One simulation scenario: mixture for Y, covariate family for X, and sample size."""
    y_model: GaussianMixtureY
    x_model: CovariateModel
    n: int
    m: int = 2

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"Sample size must be a positive integer, got {self.n}")
        if self.m != 2 or self.y_model.m != self.m:
            raise ValidationError(f"Scenarios have exactly 2 components, got m={self.m}, "
                                  f"y_model with {self.y_model.m}")
