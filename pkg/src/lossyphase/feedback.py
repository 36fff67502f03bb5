"""Locally optimal choice of the controlled phase.

The controlled phase for the next detection is the one maximizing the
expected sharpness, i.e. the sum over outcomes of the magnitude of the
predicted first-harmonic coefficient of the unnormalized posterior.  For
single photons the three candidate phases are available in closed form;
multi-photon states use a grid search with golden-section refinement.
"""

from __future__ import annotations

import numpy as np

from lossyphase import _engine
from lossyphase.detection import OutcomeLikelihoodTable
from lossyphase.posterior import PhaseDistribution

__all__ = [
    "expected_sharpness",
    "optimal_theta_numeric",
    "optimal_theta_single_photon",
    "single_photon_candidates",
]


def expected_sharpness(
    prior: PhaseDistribution, table: OutcomeLikelihoodTable, theta: float
) -> float:
    """Predicted sharpness after the next detection at controlled phase theta.

    Sums |first harmonic of prior * likelihood| over every outcome in the
    table; outcomes carrying no phase information (total loss) contribute a
    theta-independent constant.
    """
    cmat, _ = _engine.table_matrix(table)
    batch = prior.coeffs[None, :]
    return float(
        _engine.expected_sharpness_batch(batch, cmat, np.array([theta]))[0]
    )


def optimal_theta_numeric(
    prior: PhaseDistribution, table: OutcomeLikelihoodTable
) -> float:
    """Maximize the expected sharpness over theta in [0, 2pi).

    64-point coarse grid plus golden-section refinement to 1e-6 rad, ties
    broken toward the smallest theta.
    """
    cmat, _ = _engine.table_matrix(table)
    return float(_engine.numeric_theta_batch(prior.coeffs[None, :], cmat)[0])


def single_photon_candidates(prior: PhaseDistribution) -> np.ndarray:
    """The three closed-form candidate phases (theta_0, theta_+, theta_-)."""
    batch = prior.coeffs[None, :]
    n_c = batch.shape[1]
    center = (n_c - 1) // 2
    pad = np.pad(batch, ((0, 0), (2, 2)))
    # a, b: projections of e^{i phi}, e^{2i phi} onto the prior
    a = pad[0, center + 3]
    b = 0.5 * pad[0, center + 4]
    c = 0.5 * pad[0, center + 2]
    c1 = (np.conj(a) * c) ** 2 - (a * np.conj(b)) ** 2 \
        + 4.0 * (abs(b) ** 2 - abs(c) ** 2) * np.conj(b) * c
    c2 = -2j * np.imag(a * a * np.conj(b) * np.conj(c))
    if c1 == 0.0:
        raise ZeroDivisionError("candidate phases are degenerate (c1 = 0)")
    root = np.sqrt(c2 * c2 + abs(c1) ** 2)
    return np.mod(
        np.array(
            [
                np.angle(b * np.conj(a) - np.conj(c) * a),
                np.angle(np.sqrt((c2 + root) / c1)),
                np.angle(np.sqrt((c2 - root) / c1)),
            ]
        ),
        2.0 * np.pi,
    )


def optimal_theta_single_photon(prior: PhaseDistribution) -> float:
    """Best controlled phase before a single-photon detection.

    Evaluates the closed-form candidates and keeps the winner; a flat prior
    returns 0 by convention and degenerate coefficients fall back to the
    numeric search.  Loss only shifts the objective by a constant, so the
    result is valid for every eta.
    """
    return float(_engine.closed_form_theta_batch(prior.coeffs[None, :])[0])
