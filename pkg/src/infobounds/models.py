"""Probability-model abstractions: priors, outcome spaces, conditional models
and the weight functions that generate the bound family."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np
from scipy import stats

from .errors import LengthMismatchError, NonFiniteError
from .grids import ParameterGrid, interp_on_grid, quadrature

#: Allowed deviation of the grid quadrature of a prior density from 1.
NORMALIZATION_TOL = 1e-6

#: Default per-side tail mass discarded when truncating an infinite-support prior.
DEFAULT_TAIL_MASS = 1e-12

#: Default relative/absolute step for finite-difference scores.
DEFAULT_SCORE_STEP = 1e-5


# ---------------------------------------------------------------------------
# Outcome spaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiscreteOutcomes:
    """Finite, duplicate-free collection of outcome labels."""

    outcomes: tuple

    def __post_init__(self):
        if len(self.outcomes) == 0:
            raise ValueError("outcome list must be non-empty")
        if len(set(self.outcomes)) != len(self.outcomes):
            raise ValueError("outcome list contains duplicates")

    def __contains__(self, x):
        return x in self.outcomes


@dataclass(frozen=True)
class ContinuousOutcomes:
    """Uniform grid over a continuous outcome interval."""

    x_min: float
    x_max: float
    n_x: int

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be < x_max")
        if self.n_x < 3:
            raise ValueError("n_x must be >= 3")

    @cached_property
    def grid(self) -> ParameterGrid:
        return ParameterGrid(self.x_min, self.x_max, self.n_x)


OutcomeSpace = Union[DiscreteOutcomes, ContinuousOutcomes]


# ---------------------------------------------------------------------------
# Conditional model
# ---------------------------------------------------------------------------


class ConditionalModel:
    """Behavioral contract for a conditional outcome model p(x | theta).

    Wraps a log-density callable and, optionally, an analytic score
    (d/dtheta of the log-density). Without an analytic score, central finite
    differences with a scale-aware step are used.

    Both callables must accept a scalar outcome together with a scalar or
    ndarray ``theta`` and broadcast accordingly; grid sweeps rely on this.
    """

    def __init__(
        self,
        log_pdf: Callable,
        outcome_space: OutcomeSpace,
        score: Callable | None = None,
        score_step: float = DEFAULT_SCORE_STEP,
    ):
        self._log_pdf = log_pdf
        self._score = score
        self.outcome_space = outcome_space
        self.score_step = float(score_step)

    @property
    def score_kind(self) -> str:
        return "analytic" if self._score is not None else "finite_difference"

    def log_pdf(self, x, theta):
        return self._log_pdf(x, theta)

    def pdf(self, x, theta):
        return np.exp(self._log_pdf(x, theta))

    def score(self, x, theta):
        if self._score is not None:
            return self._score(x, theta)
        th = np.asarray(theta, dtype=float)
        h = np.maximum(self.score_step, self.score_step * np.abs(th))
        out = (self._log_pdf(x, th + h) - self._log_pdf(x, th - h)) / (2.0 * h)
        if np.ndim(theta) == 0:
            return float(out)
        return out


def discrete_probability_matrix(model: ConditionalModel, thetas) -> np.ndarray:
    """Stack p(x | theta) for every outcome: shape (n_outcomes, len(thetas))."""
    space = model.outcome_space
    if not isinstance(space, DiscreteOutcomes):
        raise LengthMismatchError("model does not have a discrete outcome space")
    th = np.atleast_1d(np.asarray(thetas, dtype=float))
    return np.stack([np.exp(model.log_pdf(x, th)) for x in space.outcomes])


# ---------------------------------------------------------------------------
# Priors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiniteSupport:
    """The parameter is confined to [lower, upper] with certainty."""

    lower: float
    upper: float


@dataclass(frozen=True)
class TruncatedInfinite:
    """Infinite-support density truncated to the grid.

    ``tail_mass_bound`` records the total probability mass discarded by the
    truncation; it bounds the quadrature error of prior-weighted integrals.
    """

    tail_mass_bound: float


SupportKind = Union[FiniteSupport, TruncatedInfinite]


@dataclass(frozen=True, eq=False)
class Prior:
    """Differentiable parameter density tabulated on a grid.

    Attributes
    ----------
    grid : ParameterGrid
    density : ndarray
        p(theta) at each node, nonnegative, integrating to 1 within
        ``NORMALIZATION_TOL`` under the grid quadrature.
    derivative : ndarray
        dp/dtheta at each node.
    support : FiniteSupport or TruncatedInfinite
    """

    grid: ParameterGrid
    density: np.ndarray
    derivative: np.ndarray
    support: SupportKind

    def __post_init__(self):
        dens = np.asarray(self.density, dtype=float).copy()
        deriv = np.asarray(self.derivative, dtype=float).copy()
        for name, arr in (("density", dens), ("derivative", deriv)):
            if arr.shape != (self.grid.n_points,):
                raise LengthMismatchError(
                    f"{name} must have one value per node, got shape {arr.shape}"
                )
            if not np.all(np.isfinite(arr)):
                raise NonFiniteError(f"prior {name} contains NaN or infinity")
        if dens.min() < 0.0:
            raise ValueError("prior density must be nonnegative")
        mass = quadrature(dens, self.grid)
        if abs(mass - 1.0) > NORMALIZATION_TOL:
            raise ValueError(f"prior density integrates to {mass!r}, not 1")
        if isinstance(self.support, FiniteSupport):
            slop = 1e-12 * max(1.0, abs(self.grid.theta_min), abs(self.grid.theta_max))
            if (
                abs(self.support.lower - self.grid.theta_min) > slop
                or abs(self.support.upper - self.grid.theta_max) > slop
            ):
                raise ValueError("finite support must coincide with the grid interval")
        dens.setflags(write=False)
        deriv.setflags(write=False)
        object.__setattr__(self, "density", dens)
        object.__setattr__(self, "derivative", deriv)

    def density_at(self, theta: float) -> float:
        return interp_on_grid(self.grid, self.density, theta)

    def derivative_at(self, theta: float) -> float:
        return interp_on_grid(self.grid, self.derivative, theta)


def uniform_prior(theta_min: float, theta_max: float, n_points: int = 2001) -> Prior:
    """Uniform density on [theta_min, theta_max]; the finite-support prior."""
    grid = ParameterGrid(theta_min, theta_max, n_points)
    dens = np.full(n_points, 1.0 / grid.span)
    return Prior(grid, dens, np.zeros(n_points), FiniteSupport(theta_min, theta_max))


def gaussian_prior(
    mean: float,
    sigma: float,
    n_points: int = 2001,
    tail_mass: float = DEFAULT_TAIL_MASS,
    lower: float | None = None,
    upper: float | None = None,
) -> Prior:
    """Normal density truncated where the per-side tail mass drops below
    ``tail_mass``.

    ``lower`` / ``upper`` clip the truncation window further (for example to
    keep a positivity constraint on the parameter); the extra discarded mass
    is folded into the recorded ``tail_mass_bound``.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    dist = stats.norm(loc=mean, scale=sigma)
    lo = dist.ppf(tail_mass)
    hi = dist.isf(tail_mass)
    if lower is not None:
        lo = max(lo, float(lower))
    if upper is not None:
        hi = min(hi, float(upper))
    if not lo < hi:
        raise ValueError("truncation window is empty")
    grid = ParameterGrid(lo, hi, n_points)
    dens = dist.pdf(grid.nodes)
    deriv = -(grid.nodes - mean) / sigma**2 * dens
    discarded = float(dist.cdf(lo) + dist.sf(hi))
    return Prior(grid, dens, deriv, TruncatedInfinite(discarded))


def gamma_prior(
    shape: float,
    scale: float,
    n_points: int = 2001,
    tail_mass: float = DEFAULT_TAIL_MASS,
) -> Prior:
    """Gamma density truncated at ``tail_mass`` per side; support is theta > 0."""
    if shape <= 0 or scale <= 0:
        raise ValueError("shape and scale must be positive")
    dist = stats.gamma(a=shape, scale=scale)
    lo = float(dist.ppf(tail_mass))
    hi = float(dist.isf(tail_mass))
    grid = ParameterGrid(lo, hi, n_points)
    dens = dist.pdf(grid.nodes)
    deriv = dens * ((shape - 1.0) / grid.nodes - 1.0 / scale)
    discarded = float(dist.cdf(lo) + dist.sf(hi))
    return Prior(grid, dens, deriv, TruncatedInfinite(discarded))


# ---------------------------------------------------------------------------
# Weight functions
# ---------------------------------------------------------------------------

BOXCAR = "boxcar"
PRIOR_MATCHED = "prior"
CUSTOM = "custom"

_WEIGHT_KINDS = (BOXCAR, PRIOR_MATCHED, CUSTOM)


@dataclass(frozen=True, eq=False)
class WeightFunction:
    """Nonnegative weight f(theta) and its derivative on a grid.

    The boxcar kind carries its boundary jumps analytically (they enter the
    bounds as boundary probability terms, never as numerical derivatives),
    so its tabulated derivative is identically zero.
    """

    grid: ParameterGrid
    values: np.ndarray
    derivative: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in _WEIGHT_KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}")
        vals = np.asarray(self.values, dtype=float).copy()
        deriv = np.asarray(self.derivative, dtype=float).copy()
        for name, arr in (("values", vals), ("derivative", deriv)):
            if arr.shape != (self.grid.n_points,):
                raise LengthMismatchError(
                    f"weight {name} must have one value per node, got {arr.shape}"
                )
            if not np.all(np.isfinite(arr)):
                raise NonFiniteError(f"weight {name} contains NaN or infinity")
        if vals.min() < 0.0:
            raise ValueError("weight values must be nonnegative")
        vals.setflags(write=False)
        deriv.setflags(write=False)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "derivative", deriv)

    def value_at(self, theta: float) -> float:
        return interp_on_grid(self.grid, self.values, theta)


def boxcar_weight(grid: ParameterGrid) -> WeightFunction:
    """Indicator weight: 1 on the grid interval, 0 outside."""
    n = grid.n_points
    return WeightFunction(grid, np.ones(n), np.zeros(n), BOXCAR)


def prior_weight(prior: Prior) -> WeightFunction:
    """Weight matched to the prior density itself."""
    return WeightFunction(prior.grid, prior.density, prior.derivative, PRIOR_MATCHED)


def gaussian_weight(grid: ParameterGrid, center: float, width: float) -> WeightFunction:
    """Unnormalized Gaussian bump; a smooth custom weight that decays at the
    grid boundaries when ``width`` is small against the grid span."""
    if width <= 0:
        raise ValueError("width must be positive")
    z = (grid.nodes - center) / width
    vals = np.exp(-0.5 * z * z)
    deriv = -z / width * vals
    return WeightFunction(grid, vals, deriv, CUSTOM)
