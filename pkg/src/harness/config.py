"""Experiment configuration: ``key = value`` files, defaults and echo."""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

from .. import __version__
from ..clustering.constants import SIGMA_AUTO, SIGMA_SEARCH
from ..clustering.interval import interval_cluster
from ..clustering.kmeans import kmeans_cluster
from ..clustering.radius import radius_graph_cluster
from ..clustering.spectral import spectral_cluster
from ..kde.bandwidth import BandwidthPolicy
from ..model.constants import INTERVAL, KMEANS, RADIUS_GRAPH, SPECTRAL
from ..model.exceptions import ValidationError
from ..model.types import ClusterAssignment
from ..scenarios.constants import DEFAULT_ANNULUS_HALF_WIDTH, DEFAULT_INNER_RADIUS
from ..scenarios.models import (CircleSquareX, ConcentricX, GaussianMixtureY, LaplaceX, ScenarioSpec,
                                ToyUniformX, UniformX)
from .constants import (CONFIG_KEYS, DEFAULT_REPLICATIONS, DEFAULT_SAMPLE_SIZE, DEFAULT_SEED, GRID_AUTO,
                        Y_MODEL_BALANCED, Y_MODEL_SEPARATED)
from .exceptions import ConfigError

CLUSTERER_NAMES = (RADIUS_GRAPH, KMEANS, SPECTRAL, INTERVAL)

DEFAULTS = {
    "scenario": UniformX.name,
    "n": str(DEFAULT_SAMPLE_SIZE),
    "m": "2",
    "y_model": Y_MODEL_SEPARATED,
    "y_delta": "1.0",
    "delta": "0.1",
    "ell": "4.5",
    "sigma_x": "1.0",
    "mu1": "1.0",
    "lam": "",
    "a": "3.0",
    "r1": repr(DEFAULT_INNER_RADIUS),
    "r2": "0.75",
    "eps": repr(DEFAULT_ANNULUS_HALF_WIDTH),
    "clusterers": RADIUS_GRAPH,
    "bandwidth": "silverman",
    "replications": str(DEFAULT_REPLICATIONS),
    "seed": str(DEFAULT_SEED),
    "grid": GRID_AUTO,
    "include_em": "false",
    "output": "",
    "workers": "1",
}

# scenario name -> keys its covariate model reads
SCENARIO_KEYS = {
    UniformX.name: ("delta",),
    LaplaceX.name: ("ell", "sigma_x", "mu1"),
    ToyUniformX.name: ("lam",),
    CircleSquareX.name: ("a",),
    ConcentricX.name: ("r1", "r2", "eps"),
}

Grid = Tuple[float, float, int]


@dataclass(frozen=True)
class ClustererSpec:
    """A clusterer name plus its width setting (spectral only)."""
    name: str
    sigma: Optional[Union[float, str]] = None

    def __post_init__(self):
        if self.name not in CLUSTERER_NAMES:
            raise ValidationError(f"Unknown clusterer '{self.name}', expected one of {', '.join(CLUSTERER_NAMES)}")
        if self.name == SPECTRAL:
            sigma = SIGMA_AUTO if self.sigma is None else self.sigma
            if isinstance(sigma, str) and sigma not in (SIGMA_AUTO, SIGMA_SEARCH):
                raise ValidationError(f"Spectral width must be positive, 'auto' or 'search', got {sigma}")
            if not isinstance(sigma, str):
                sigma = float(sigma)
                if not sigma > 0:
                    raise ValidationError(f"Spectral width must be positive, got {sigma}")
            object.__setattr__(self, 'sigma', sigma)
        elif self.sigma is not None:
            raise ValidationError(f"Clusterer '{self.name}' takes no width")

    @classmethod
    def parse(cls, text: str) -> "ClustererSpec":
        """Parse ``radius_graph``, ``kmeans``, ``interval`` or ``spectral[:auto|search|SIGMA]``."""
        name, _, option = text.strip().lower().partition(":")
        if not option:
            return cls(name)
        if name != SPECTRAL:
            raise ValidationError(f"Clusterer '{name}' takes no option, got '{text}'")
        if option in (SIGMA_AUTO, SIGMA_SEARCH):
            return cls(name, option)
        try:
            return cls(name, float(option))
        except ValueError:
            raise ValidationError(f"Invalid spectral width '{option}'")

    def __str__(self) -> str:
        if self.name != SPECTRAL:
            return self.name
        return f"{SPECTRAL}:{self.sigma if isinstance(self.sigma, str) else repr(self.sigma)}"

    def cluster(self, x: np.ndarray, m: int, seed: Optional[int] = None) -> ClusterAssignment:
        """Run the clusterer on the covariates."""
        if self.name == RADIUS_GRAPH:
            return radius_graph_cluster(x, m)
        if self.name == KMEANS:
            return kmeans_cluster(x, m, seed=seed)
        if self.name == SPECTRAL:
            return spectral_cluster(x, m, sigma=self.sigma, seed=seed)
        x = np.asarray(x, dtype=float)
        if x.ndim == 2 and x.shape[1] != 1:
            raise ValidationError(f"The interval clusterer needs one-dimensional covariates, got d={x.shape[1]}")
        if m != 2:
            raise ValidationError(f"The interval clusterer separates exactly 2 clusters, got m={m}")
        return interval_cluster(x.ravel())


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines a Monte Carlo experiment."""
    scenario: ScenarioSpec
    clusterers: Tuple[ClustererSpec, ...]
    bandwidth: BandwidthPolicy
    replications: int = DEFAULT_REPLICATIONS
    master_seed: int = DEFAULT_SEED
    grid: Optional[Grid] = None
    include_em: bool = False
    output_path: Optional[str] = None
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'clusterers', tuple(self.clusterers))
        if not self.clusterers:
            raise ConfigError("At least one clusterer is required")
        labels = [str(c) for c in self.clusterers]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"Clusterers are listed twice: {', '.join(labels)}")
        if int(self.replications) != self.replications or self.replications < 1:
            raise ConfigError(f"replications must be a positive integer, got {self.replications}")
        if int(self.master_seed) != self.master_seed or self.master_seed < 0:
            raise ConfigError(f"seed must be a nonnegative integer, got {self.master_seed}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ConfigError(f"workers must be a positive integer, got {self.workers}")
        if self.grid is not None:
            lo, hi, g = self.grid
            if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi or int(g) != g or g < 2:
                raise ConfigError(f"Grid needs lo < hi and at least 2 points, got {self.grid}")
            object.__setattr__(self, 'grid', (float(lo), float(hi), int(g)))


def parse_grid(text: str) -> Optional[Grid]:
    """``auto`` or ``LO:HI:G``."""
    text = text.strip().lower()
    if text == GRID_AUTO:
        return None
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"Grid must be 'auto' or LO:HI:G, got '{text}'")
    try:
        lo, hi, g = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"Grid must be 'auto' or LO:HI:G, got '{text}'")
    if not lo < hi or g < 2:
        raise ConfigError(f"Grid needs lo < hi and at least 2 points, got '{text}'")
    return lo, hi, g


def format_grid(grid: Optional[Grid]) -> str:
    if grid is None:
        return GRID_AUTO
    lo, hi, g = grid
    return f"{lo!r}:{hi!r}:{g}"


def load_config_text(text: str) -> Dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        if not sep or not key:
            raise ConfigError(f"expected 'key = value', got '{raw.strip()}'", line=line_number)
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown key '{key}'", line=line_number)
        if key in values:
            raise ConfigError(f"key '{key}' given twice", line=line_number)
        values[key] = value.strip()
    return values


def load_config(path: str) -> Dict[str, str]:
    with open(path, 'r', encoding='utf-8') as f:
        values = load_config_text(f.read())
    logging.debug(f"Loaded {len(values)} configuration keys from {path}")
    return values


class _Values:
    """Typed access to merged string settings, naming the key on failure."""

    def __init__(self, values: Mapping[str, str]):
        self.values = values

    def text(self, key: str) -> str:
        return self.values[key].strip()

    def as_float(self, key: str) -> float:
        try:
            value = float(self.text(key))
        except ValueError:
            raise ConfigError(f"'{key}' must be a number, got '{self.values[key]}'")
        if not math.isfinite(value):
            raise ConfigError(f"'{key}' must be finite, got '{self.values[key]}'")
        return value

    def as_int(self, key: str) -> int:
        try:
            return int(self.text(key))
        except ValueError:
            raise ConfigError(f"'{key}' must be an integer, got '{self.values[key]}'")

    def as_bool(self, key: str) -> bool:
        text = self.text(key).lower()
        if text in ("true", "yes", "1"):
            return True
        if text in ("false", "no", "0"):
            return False
        raise ConfigError(f"'{key}' must be true or false, got '{self.values[key]}'")


def _build_scenario(v: _Values) -> ScenarioSpec:
    y_kind = v.text("y_model").lower()
    if y_kind == Y_MODEL_SEPARATED:
        y_model = GaussianMixtureY.separated(v.as_float("y_delta"))
    elif y_kind == Y_MODEL_BALANCED:
        y_model = GaussianMixtureY.balanced()
    else:
        raise ConfigError(f"'y_model' must be {Y_MODEL_SEPARATED} or {Y_MODEL_BALANCED}, got '{y_kind}'")

    n = v.as_int("n")
    scenario = v.text("scenario").lower()
    if scenario == UniformX.name:
        x_model = UniformX(v.as_float("delta"))
    elif scenario == LaplaceX.name:
        x_model = LaplaceX(v.as_float("ell"), sigma=v.as_float("sigma_x"), mu1=v.as_float("mu1"))
    elif scenario == ToyUniformX.name:
        lam = v.as_float("lam") if v.text("lam") else 1.0 / math.sqrt(n)
        x_model = ToyUniformX(lam)
    elif scenario == CircleSquareX.name:
        x_model = CircleSquareX(v.as_float("a"))
    elif scenario == ConcentricX.name:
        x_model = ConcentricX(v.as_float("r2"), r1=v.as_float("r1"), eps=v.as_float("eps"))
    else:
        raise ConfigError(f"Unknown scenario '{scenario}', expected one of {', '.join(SCENARIO_KEYS)}")
    return ScenarioSpec(y_model, x_model, n, m=v.as_int("m"))


def build_config(values: Mapping[str, str], overrides: Optional[Mapping[str, Optional[str]]] = None
                 ) -> ExperimentConfig:
    """Merge defaults, file values and overrides (overrides win) into a config."""
    merged = dict(DEFAULTS)
    for source in (values, overrides or {}):
        for key, value in source.items():
            if value is None:
                continue
            if key not in CONFIG_KEYS:
                raise ConfigError(f"unknown key '{key}'")
            merged[key] = str(value)
    v = _Values(merged)

    clusterers = tuple(ClustererSpec.parse(item) for item in v.text("clusterers").split(",") if item.strip())
    return ExperimentConfig(
        scenario=_build_scenario(v),
        clusterers=clusterers,
        bandwidth=BandwidthPolicy.parse(v.text("bandwidth")),
        replications=v.as_int("replications"),
        master_seed=v.as_int("seed"),
        grid=parse_grid(v.text("grid")),
        include_em=v.as_bool("include_em"),
        output_path=v.text("output") or None,
        workers=v.as_int("workers"),
    )


def config_to_mapping(config: ExperimentConfig) -> Dict[str, str]:
    """Render the settings that determine the results, in key order.

    The output path and worker count are left out: they never change results.
    """
    scenario = config.scenario
    x_model = scenario.x_model
    mapping = {
        "scenario": x_model.name,
        "n": str(scenario.n),
        "m": str(scenario.m),
    }
    if scenario.y_model == GaussianMixtureY.balanced():
        mapping["y_model"] = Y_MODEL_BALANCED
    else:
        y_delta = scenario.y_model.means[1]
        if scenario.y_model != GaussianMixtureY.separated(y_delta):
            raise ConfigError("Only the separated and balanced Y models can be written to a config file")
        mapping["y_model"] = Y_MODEL_SEPARATED
        mapping["y_delta"] = repr(y_delta)

    attributes = {"sigma_x": "sigma"}
    for key in SCENARIO_KEYS[x_model.name]:
        mapping[key] = repr(float(getattr(x_model, attributes.get(key, key))))

    mapping.update({
        "clusterers": ",".join(str(c) for c in config.clusterers),
        "bandwidth": str(config.bandwidth),
        "replications": str(config.replications),
        "seed": str(config.master_seed),
        "grid": format_grid(config.grid),
        "include_em": "true" if config.include_em else "false",
    })
    return {key: mapping[key] for key in CONFIG_KEYS if key in mapping}


def render_config(config: ExperimentConfig) -> str:
    """Config echo readable by load_config_text."""
    lines = [f"# twostep-mixture {__version__} experiment configuration"]
    lines += [f"{key} = {value}" for key, value in config_to_mapping(config).items()]
    return "\n".join(lines) + "\n"
