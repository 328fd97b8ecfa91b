"""Worked physical systems: the overdamped trapped particle, single-qubit
phase estimation, a tunable discrete exponential-family model, and the
feedback-demon work-budget checker."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import logsumexp

from .bounds import BoundReport, bound_theorem1
from .errors import NonPositiveDiffusionError
from .information import pmi
from .models import (
    ConditionalModel,
    ContinuousOutcomes,
    DiscreteOutcomes,
    Prior,
    uniform_prior,
)
from .quantum import Povm, StateFamily, quantum_conditional_model

#: Half-width of the outcome grid in units of the widest conditional sigma.
LANGEVIN_GRID_SIGMAS = 8.0

#: Default outcome-grid resolution for the trapped-particle model.
LANGEVIN_GRID_POINTS = 4001


# ---------------------------------------------------------------------------
# Overdamped particle in a harmonic trap
# ---------------------------------------------------------------------------


def langevin_model(
    diffusion: float,
    theta_min: float = 0.5,
    n_x: int = LANGEVIN_GRID_POINTS,
) -> ConditionalModel:
    """Steady-state position model of an overdamped particle in a harmonic
    trap of unknown stiffness theta.

    The stationary law is Gaussian with variance D/theta:

        log p(x | theta) = 0.5 * log(theta / (2 pi D)) - theta x^2 / (2 D)

    with analytic score 1/(2 theta) - x^2/(2 D). The outcome grid spans
    ``LANGEVIN_GRID_SIGMAS`` standard deviations of the widest conditional
    (the one at ``theta_min``), which keeps the unresolved tail mass far
    below quadrature error.
    """
    if diffusion <= 0:
        raise NonPositiveDiffusionError(f"diffusion must be positive, got {diffusion}")
    if theta_min <= 0:
        raise ValueError("theta_min must be positive")
    d = float(diffusion)
    x_max = LANGEVIN_GRID_SIGMAS * math.sqrt(d / theta_min)

    def log_pdf(x, theta):
        th = np.asarray(theta, dtype=float)
        return 0.5 * np.log(th / (2.0 * np.pi * d)) - th * np.square(x) / (2.0 * d)

    def score(x, theta):
        th = np.asarray(theta, dtype=float)
        out = 1.0 / (2.0 * th) - np.square(x) / (2.0 * d)
        if np.ndim(theta) == 0 and np.ndim(x) == 0:
            return float(out)
        return out

    space = ContinuousOutcomes(-x_max, x_max, n_x)
    return ConditionalModel(log_pdf, space, score=score)


@dataclass(frozen=True, eq=False)
class LangevinScenario:
    """Trap-stiffness estimation setup: a diffusion constant and a prior."""

    diffusion: float
    prior: Prior
    n_x: int = LANGEVIN_GRID_POINTS

    def __post_init__(self):
        if self.diffusion <= 0:
            raise NonPositiveDiffusionError("diffusion must be positive")
        if self.prior.grid.theta_min <= 0:
            raise ValueError("trap stiffness prior must be supported on theta > 0")

    def model(self) -> ConditionalModel:
        return langevin_model(self.diffusion, self.prior.grid.theta_min, self.n_x)


# ---------------------------------------------------------------------------
# Single-qubit phase estimation
# ---------------------------------------------------------------------------

QUBIT_THETA_MAX = math.pi / 2.0


def sigma_x_povm() -> Povm:
    plus = 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)
    minus = 0.5 * np.array([[1, -1], [-1, 1]], dtype=complex)
    return Povm((plus, minus))


def sigma_y_povm() -> Povm:
    plus = 0.5 * np.array([[1, -1j], [1j, 1]], dtype=complex)
    minus = 0.5 * np.array([[1, 1j], [-1j, 1]], dtype=complex)
    return Povm((plus, minus))


def sigma_z_povm() -> Povm:
    zero = np.diag([1.0, 0.0]).astype(complex)
    one = np.diag([0.0, 1.0]).astype(complex)
    return Povm((zero, one))


def qubit_phase_family() -> StateFamily:
    """Pure family (|0> + e^{-i theta} |1>)/sqrt(2) as density matrices.

    The global phase of the underlying rotation is dropped; density
    matrices are phase-invariant, and keeping it would only inject complex
    drift into finite differences.
    """

    def rho_of(theta: float) -> np.ndarray:
        phase = np.exp(1j * theta)
        return 0.5 * np.array([[1.0, phase], [np.conj(phase), 1.0]])

    def drho_of(theta: float) -> np.ndarray:
        phase = np.exp(1j * theta)
        return 0.5 * np.array([[0.0, 1j * phase], [-1j * np.conj(phase), 0.0]])

    return StateFamily(rho_of, drho_of)


def qubit_phase_scenario(povm: Povm | None = None) -> tuple[StateFamily, Povm]:
    """Phase-estimation scenario: the |+> probe family plus a measurement.

    Defaults to the sigma-x projective measurement, whose outcomes we label
    "+" and "-".
    """
    if povm is None:
        povm = sigma_x_povm()
    if povm.dim != 2:
        raise ValueError("qubit scenario needs a dimension-2 POVM")
    return qubit_phase_family(), povm


@dataclass(frozen=True, eq=False)
class QubitPhaseScenario:
    """Phase window and measurement choice for the qubit probe."""

    theta_min: float = 0.0
    theta_max: float = QUBIT_THETA_MAX
    povm: Povm | None = None

    def __post_init__(self):
        if not (0.0 <= self.theta_min < self.theta_max <= QUBIT_THETA_MAX + 1e-12):
            raise ValueError(
                f"phase window must lie inside [0, {QUBIT_THETA_MAX}], "
                f"got [{self.theta_min}, {self.theta_max}]"
            )

    def prior(self, n_points: int = 2001) -> Prior:
        return uniform_prior(self.theta_min, self.theta_max, n_points)

    def measurement(self, outcomes: tuple | None = None):
        return qubit_measurement_model(self.povm, outcomes)


def qubit_measurement_model(povm: Povm | None = None, outcomes: tuple | None = None):
    """Measured qubit phase family as (ConditionalModel, sensitivity)."""
    family, povm = qubit_phase_scenario(povm)
    if outcomes is None and len(povm) == 2:
        outcomes = ("+", "-")
    return quantum_conditional_model(family, povm, outcomes=outcomes)


# ---------------------------------------------------------------------------
# Discrete exponential-family model
# ---------------------------------------------------------------------------


def discrete_exponential_model(log_weights, coefficients) -> ConditionalModel:
    """K-outcome model p(k | theta) proportional to w_k * exp(c_k * theta).

    Smooth, strictly positive, with analytic score c_k minus the mean of c
    under p(. | theta). Equal coefficients give a theta-independent model
    with arbitrary fixed outcome probabilities.
    """
    lw = np.asarray(log_weights, dtype=float)
    c = np.asarray(coefficients, dtype=float)
    if lw.shape != c.shape or lw.ndim != 1 or lw.size < 2:
        raise ValueError("log_weights and coefficients must be equal-length 1-d, size >= 2")

    def _logits(th: np.ndarray) -> np.ndarray:
        shape = (lw.size,) + (1,) * th.ndim
        return lw.reshape(shape) + c.reshape(shape) * th[None, ...]

    def log_pdf(k, theta):
        th = np.asarray(theta, dtype=float)
        logits = _logits(th)
        return lw[k] + c[k] * th - logsumexp(logits, axis=0)

    def score(k, theta):
        th = np.asarray(theta, dtype=float)
        logits = _logits(th)
        probs = np.exp(logits - logsumexp(logits, axis=0, keepdims=True))
        shape = (lw.size,) + (1,) * th.ndim
        mean_c = (probs * c.reshape(shape)).sum(axis=0)
        out = c[k] - mean_c
        if np.ndim(theta) == 0:
            return float(out)
        return out

    space = DiscreteOutcomes(tuple(range(lw.size)))
    return ConditionalModel(log_pdf, space, score=score)


# ---------------------------------------------------------------------------
# Feedback-demon work budget
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DemonRecord:
    """One feedback trajectory: inverse temperature, extracted work, free
    energy change, the measurement outcome and the true parameter."""

    beta: float
    work_extracted: float
    delta_free_energy: float
    outcome: object
    theta: float

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")

    @property
    def lhs(self) -> float:
        """Work budget beta * (W_ext - delta_F) in units of k_B T."""
        return self.beta * (self.work_extracted - self.delta_free_energy)


@dataclass(frozen=True)
class DemonCheck:
    """Verdict on one record against the information and bound budgets."""

    lhs: float
    pmi: float
    bound: float
    sagawa_ueda_ok: bool
    chained_ok: bool


def demon_work_check(
    record: DemonRecord,
    model: ConditionalModel,
    prior: Prior,
    sensitivity: Callable | None = None,
    tolerance: float = 1e-9,
) -> DemonCheck:
    """Check a supplied feedback record against the trajectory work budget.

    ``sagawa_ueda_ok`` tests the information budget lhs <= pmi;
    ``chained_ok`` tests the weaker, measurement-free budget lhs <= bound,
    where the bound is the finite-support PMI bound at the record's
    (outcome, theta) — classical when ``sensitivity`` is None, quantum
    otherwise. The checker verifies consistency of supplied records; it
    does not simulate feedback.
    """
    report: BoundReport = bound_theorem1(
        model, prior, record.outcome, record.theta, sensitivity
    )
    lhs = record.lhs
    info = pmi(model, prior, record.outcome, record.theta)
    return DemonCheck(
        lhs=lhs,
        pmi=info,
        bound=report.bound,
        sagawa_ueda_ok=lhs <= info + tolerance,
        chained_ok=lhs <= report.bound + tolerance,
    )
