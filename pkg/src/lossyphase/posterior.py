"""Bayesian phase posterior as a truncated Fourier series.

The distribution over the unknown phase is stored as

    P(phi) = (1/2pi) sum_{j=-J..J} a_j exp(-i j phi),

with a_0 = 1 when normalized.  A Bayes update multiplies by a detection
likelihood, which is a correlation of the two coefficient vectors; the
harmonic cutoff grows by N - L per detection and is never truncated below
the exact degree.  The sharpness mu = |<e^{i phi}>| is the magnitude of the
first-harmonic coefficient, and the Holevo variance is mu^-2 - 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from lossyphase.detection import Outcome, OutcomeLikelihoodTable

__all__ = [
    "PhaseDistribution",
    "flat_prior",
    "bayes_update",
    "sharpness",
    "holevo_variance",
]

_HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class PhaseDistribution:
    """Coefficients a_j over j = -J..J; coeffs[J + j] holds a_j."""

    max_harmonic: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape != (2 * self.max_harmonic + 1,):
            raise ValueError(
                f"expected {2 * self.max_harmonic + 1} coefficients, got {c.shape}"
            )
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    def coefficient(self, j: int) -> complex:
        """a_j, zero outside the stored band."""
        if abs(j) > self.max_harmonic:
            return 0.0 + 0.0j
        return complex(self.coeffs[self.max_harmonic + j])

    def density(self, phi) -> np.ndarray:
        """P(phi) evaluated pointwise (phi may be an array)."""
        phi = np.asarray(phi, dtype=float)
        j = np.arange(-self.max_harmonic, self.max_harmonic + 1)
        vals = np.tensordot(self.coeffs, np.exp(-1j * np.multiply.outer(j, phi)), 1)
        return vals.real / (2.0 * math.pi)

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1]))))

    def to_json_dict(self) -> dict:
        return {
            "max_harmonic": self.max_harmonic,
            "re": [float(v.real) for v in self.coeffs],
            "im": [float(v.imag) for v in self.coeffs],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "PhaseDistribution":
        c = np.array(data["re"], dtype=complex) + 1j * np.array(data["im"])
        return cls(data["max_harmonic"], c)


def flat_prior() -> PhaseDistribution:
    """The uniform distribution 1/2pi (a_0 = 1, J = 0)."""
    return PhaseDistribution(0, np.ones(1, dtype=complex))


def likelihood_update_vector(
    table: OutcomeLikelihoodTable, outcome: Outcome, theta: float
) -> np.ndarray:
    """Likelihood of `outcome` at controlled phase theta, as coefficients of
    exp(-i j phi) (ready to correlate with posterior coefficients).

    P_{L,k}(phi, theta) = sum_d c_d e^{id(phi-theta)}; as a function of phi
    this is sum_j [c_{-j} e^{ij theta}] e^{-ij phi}.
    """
    c = table.coeffs.get(Outcome(*outcome))
    if c is None:
        raise KeyError(f"outcome {outcome} not in table")
    n_det = table.n_photons - outcome[0]
    d = np.arange(-n_det, n_det + 1)
    return (c * np.exp(-1j * d * theta))[::-1]


def convolve_coeffs(post: np.ndarray, update: np.ndarray) -> np.ndarray:
    """Coefficient vector of the product of two Fourier series.

    Both arguments and the result are coefficient vectors of e^{-ij phi}
    centered on j = 0; plain full convolution of the index bands.
    """
    return np.convolve(post, update)


def bayes_update(
    prior: PhaseDistribution,
    table: OutcomeLikelihoodTable,
    outcome: Outcome,
    theta: float,
) -> PhaseDistribution:
    """Posterior after observing `outcome` with controlled phase theta.

    Multiplies the prior by the likelihood Fourier series and renormalizes
    so a_0 = 1.  A likelihood that is identically zero (a structurally
    impossible outcome, e.g. photon loss at eta = 1) is rejected.
    """
    upd = likelihood_update_vector(table, outcome, theta)
    raw = convolve_coeffs(prior.coeffs, upd)
    mid = len(raw) // 2
    norm = raw[mid].real
    if norm <= 0.0 or not np.any(np.abs(upd) > 0.0):
        raise ValueError(f"degenerate update: outcome {outcome} has zero likelihood")
    return PhaseDistribution(mid, raw / norm)


def sharpness(dist: PhaseDistribution) -> float:
    """mu = |<e^{i phi}>| = |a_1| (= |a_{-1}| by Hermitian symmetry)."""
    return abs(dist.coefficient(1))


def holevo_variance(dist: PhaseDistribution) -> float:
    """mu^-2 - 1, with +inf for a flat (mu = 0) distribution."""
    mu = sharpness(dist)
    if mu < 1e-15:
        return math.inf
    return 1.0 / (mu * mu) - 1.0
