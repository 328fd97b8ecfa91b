import math

import numpy as np
import pytest

import infobounds as ib

# Closed-form oracles for the trapped-particle model, D = 1:
#   p(x=0 | theta)       = sqrt(theta / 2 pi)
#   p(x=0), uniform prior on [a, b]:
#       (2/3) (b^{3/2} - a^{3/2}) / sqrt(2 pi) / (b - a)
SQRT_2PI = math.sqrt(2 * math.pi)
LANGEVIN_MARGINAL_0 = (2.0 / 3.0) * (1.5**1.5 - 0.5**1.5) / SQRT_2PI  # 0.3945706...

# Qubit sigma-x "+" marginal under the uniform prior on [0, pi/2]:
#   (2/pi) * integral cos^2(theta/2) = 1/2 + 1/pi
QUBIT_MARGINAL_PLUS = 0.5 + 1.0 / math.pi

# Mutual information goldens, frozen from an independent 10x-resolution
# double-quadrature oracle (see test_acceptance.py for the oracle itself).
LANGEVIN_MI_GOLDEN = 0.022814262187239167
QUBIT_MI_GOLDEN = 0.0876522728601367


# ---------------------------------------------------------------------------
# marginal
# ---------------------------------------------------------------------------


def test_marginal_theta_independent_model(flat3):
    prior = ib.uniform_prior(0.0, 1.0, 501)
    expected = np.array([0.2, 0.3, 0.5])
    for k, q in enumerate(expected):
        assert ib.marginal(flat3, prior, k) == pytest.approx(q, abs=1e-9)


def test_marginal_langevin(langevin_uniform):
    model, prior = langevin_uniform
    assert ib.marginal(model, prior, 0.0) == pytest.approx(LANGEVIN_MARGINAL_0, abs=5e-7)


def test_marginal_qubit(qubit):
    model, _, prior = qubit
    assert ib.marginal(model, prior, "+") == pytest.approx(QUBIT_MARGINAL_PLUS, abs=1e-7)


def test_marginals_sum_to_one(softmax3):
    prior = ib.uniform_prior(0.0, 1.0, 501)
    total = sum(ib.marginal(softmax3, prior, k) for k in range(3))
    assert total == pytest.approx(1.0, abs=1e-6)


def test_marginal_degenerate(langevin_uniform):
    model, prior = langevin_uniform
    # far outside every conditional: the density underflows to zero
    with pytest.raises(ib.DegenerateMarginalError):
        ib.marginal(model, prior, 60.0)


# ---------------------------------------------------------------------------
# pmi
# ---------------------------------------------------------------------------


def test_pmi_theta_independent_is_zero(flat3):
    prior = ib.uniform_prior(0.0, 1.0, 501)
    for k in range(3):
        for theta in (0.0, 0.37, 1.0):
            assert ib.pmi(flat3, prior, k, theta) == pytest.approx(0.0, abs=1e-9)


def test_pmi_langevin(langevin_uniform):
    model, prior = langevin_uniform
    expected = 0.5 * math.log(1.0 / (2 * math.pi)) - math.log(LANGEVIN_MARGINAL_0)
    assert ib.pmi(model, prior, 0.0, 1.0) == pytest.approx(expected, abs=2e-6)


def test_pmi_qubit(qubit):
    model, _, prior = qubit
    expected = -math.log(QUBIT_MARGINAL_PLUS)
    assert ib.pmi(model, prior, "+", 0.0) == pytest.approx(expected, abs=1e-7)


def test_pmi_zero_likelihood(qubit):
    model, _, prior = qubit
    with pytest.raises(ib.ZeroLikelihoodError):
        ib.pmi(model, prior, "-", 0.0)


# ---------------------------------------------------------------------------
# sfi
# ---------------------------------------------------------------------------


def test_sfi_theta_independent_is_zero(flat3):
    assert ib.sfi(flat3, 1, 0.4) == 0.0


def test_sfi_langevin_values(langevin_uniform):
    model, _ = langevin_uniform
    # score at (0, 1) is 1/(2 theta) = 1/2
    assert ib.sfi(model, 0.0, 1.0) == pytest.approx(0.25, abs=1e-12)
    # root of the score: x^2 = D / theta
    assert ib.sfi(model, math.sqrt(1.0 / 0.8), 0.8) == pytest.approx(0.0, abs=1e-15)


# ---------------------------------------------------------------------------
# surprisal
# ---------------------------------------------------------------------------


def test_surprisal_uniform_priors():
    assert ib.surprisal(ib.uniform_prior(0.0, 1.0), 0.3) == pytest.approx(0.0, abs=1e-12)
    assert ib.surprisal(ib.uniform_prior(0.5, 1.5), 1.0) == pytest.approx(0.0, abs=1e-12)


def test_surprisal_standard_normal():
    prior = ib.gaussian_prior(0.0, 1.0)
    assert ib.surprisal(prior, 0.0) == pytest.approx(math.log(SQRT_2PI), abs=1e-9)


def test_surprisal_outside_support():
    prior = ib.uniform_prior(0.0, 1.0)
    with pytest.raises(ib.OutsideSupportError):
        ib.surprisal(prior, 2.0)


# ---------------------------------------------------------------------------
# fisher information
# ---------------------------------------------------------------------------


def test_fisher_theta_independent_is_zero(flat3):
    assert ib.fisher_information(flat3, 0.6) == pytest.approx(0.0, abs=1e-15)


def test_fisher_langevin(langevin_uniform):
    model, _ = langevin_uniform
    # Gaussian-moment oracle: E(1/(2 theta) - x^2/2)^2 with E x^2 = 1/theta,
    # E x^4 = 3/theta^2 gives 1/(2 theta^2).
    assert ib.fisher_information(model, 1.0) == pytest.approx(0.5, abs=1e-3)
    assert ib.fisher_information(model, 0.8) == pytest.approx(1 / (2 * 0.64), abs=1e-3)


def test_fisher_qubit(qubit):
    model, _, _ = qubit
    # (d p_+)^2/p_+ + (d p_-)^2/p_- with p_+ = cos^2(theta/2) is identically 1
    assert ib.fisher_information(model, math.pi / 2) == pytest.approx(1.0, abs=1e-6)
    assert ib.fisher_information(model, 0.3) == pytest.approx(1.0, abs=1e-8)


def test_fisher_softmax_variance_oracle(softmax3):
    # For p_k proportional to w_k e^{c_k theta}, the Fisher information is
    # the variance of c under p(. | theta).
    theta = 0.7
    c = np.array([-1.0, 0.0, 1.0])
    p = np.array([float(np.exp(softmax3.log_pdf(k, theta))) for k in range(3)])
    var = float((p * c**2).sum() - (p * c).sum() ** 2)
    assert ib.fisher_information(softmax3, theta) == pytest.approx(var, rel=1e-12)


def test_fisher_unnormalized_outcome_grid():
    model = ib.langevin_model(1.0, theta_min=0.5)
    clipped = ib.ConditionalModel(
        model.log_pdf, ib.ContinuousOutcomes(-1.0, 1.0, 101), score=model.score
    )
    with pytest.raises(ib.UnnormalizedOutcomeSpaceError):
        ib.fisher_information(clipped, 0.5)


def test_expected_sfi_equals_fisher(softmax3):
    # identical by construction; guards refactoring
    grid = ib.ParameterGrid(0.0, 1.0, 101)
    for theta in grid.nodes[::10]:
        manual = sum(
            float(np.exp(softmax3.log_pdf(k, theta))) * ib.sfi(softmax3, k, theta)
            for k in range(3)
        )
        assert abs(manual - ib.fisher_information(softmax3, float(theta))) <= 1e-10


# ---------------------------------------------------------------------------
# mutual information
# ---------------------------------------------------------------------------


def test_mi_theta_independent_is_zero(flat3):
    prior = ib.uniform_prior(0.0, 1.0, 501)
    assert ib.mutual_information(flat3, prior) == pytest.approx(0.0, abs=1e-8)


def test_mi_qubit_golden(qubit):
    model, _, prior = qubit
    assert ib.mutual_information(model, prior) == pytest.approx(QUBIT_MI_GOLDEN, abs=1e-7)


def test_mi_langevin_golden(langevin_uniform):
    model, prior = langevin_uniform
    assert ib.mutual_information(model, prior) == pytest.approx(LANGEVIN_MI_GOLDEN, abs=1e-7)


def test_mi_nonnegative(langevin_gaussian):
    model, prior = langevin_gaussian
    assert ib.mutual_information(model, prior) >= -1e-6


def test_mi_equals_average_pmi(softmax3):
    # definitional identity at the working resolution
    prior = ib.uniform_prior(0.0, 1.0, 501)
    total = 0.0
    for k in range(3):
        pmi_nodes = np.array(
            [ib.pmi(softmax3, prior, k, t) for t in prior.grid.nodes]
        )
        pdf = np.exp(np.asarray(softmax3.log_pdf(k, prior.grid.nodes)))
        total += ib.quadrature(prior.density * pdf * pmi_nodes, prior.grid)
    assert abs(total - ib.mutual_information(softmax3, prior)) <= 1e-10
