"""Outcome probabilities of the lossy interferometer.

Photon loss is modeled by a fictitious beam splitter of transmissivity eta
in each arm (equal loss).  A detection outcome is the pair (L, k): L photons
lost in total, k photons counted at the second output port of the final
50/50 beam splitter.  Every probability P_{L,k}(phi, theta) depends on the
phases only through x = phi - theta and is stored as a short Fourier series

    P_{L,k}(phi, theta) = sum_d c_d exp(i d (phi - theta)),  |d| <= N - L.

Port-labeling convention: the output beam splitter is taken real,
b1+ -> (d1+ + d2+)/sqrt(2) and b2+ -> (d1+ - d2+)/sqrt(2), and k counts
photons in the d2 port.  For the symmetric single-photon input this gives
the fringes P(k=0) = eta (1 + cos x)/2 and P(k=1) = eta (1 - cos x)/2.
The companion brute-force simulator `oracle_probabilities` uses the same
convention and provides an independent check of the closed-form table.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from lossyphase.states import TwoModeState

__all__ = [
    "Outcome",
    "OutcomeLikelihoodTable",
    "a_coefficient",
    "build_likelihood_table",
    "oracle_probabilities",
    "evaluate_outcome",
]

ORACLE_MAX_PHOTONS = 6
_CLAMP_TOL = 1e-12


class Outcome(NamedTuple):
    lost: int
    detected_k: int


def a_coefficient(n_photons: int, lost: int, r: int, m: int, eta: float) -> float:
    """Amplitude weight A_{N,L,r,m} of the traced loss channel.

    A = sqrt(eta^(N-L) (1-eta)^L C(N-r-m, N-L-r) C(r+m, r)) for the matrix
    element connecting the input component with r+m photons in arm 2 to the
    surviving component |N-L-r, r>.
    """
    n, L = n_photons, lost
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta={eta} outside [0, 1]")
    if not (0 <= L <= n and 0 <= m <= L and 0 <= r <= n - L):
        raise ValueError(f"indices (N={n}, L={L}, r={r}, m={m}) out of range")
    return math.sqrt(
        eta ** (n - L)
        * (1.0 - eta) ** L
        * math.comb(n - r - m, n - L - r)
        * math.comb(r + m, r)
    )


def _port_sum(n_det: int, r: int, k: int) -> float:
    """Signed binomial sum from expanding the real 50/50 output splitter."""
    total = 0.0
    for r2 in range(max(0, k - n_det + r), min(r, k) + 1):
        total += (-1) ** r2 * math.comb(n_det - r, k - r2) * math.comb(r, r2)
    return total


@dataclass(frozen=True)
class OutcomeLikelihoodTable:
    """Fourier coefficients of every P_{L,k} for one input state and eta.

    coeffs[outcome] is the complex vector c_d ordered d = -(N-L)..(N-L);
    Hermitian symmetry c_{-d} = conj(c_d) holds because probabilities are
    real.
    """

    n_photons: int
    eta: float
    coeffs: dict[Outcome, np.ndarray]

    @property
    def outcomes(self) -> list[Outcome]:
        return list(self.coeffs)

    def harmonic_order(self, outcome: Outcome) -> int:
        return self.n_photons - outcome.lost

    def probability(self, outcome: Outcome, phi: float, theta: float) -> float:
        return evaluate_outcome(self, outcome, phi, theta)

    def all_probabilities(self, phi: float, theta: float) -> dict[Outcome, float]:
        return {o: evaluate_outcome(self, o, phi, theta) for o in self.coeffs}

    def to_json_dict(self) -> dict:
        return {
            "n_photons": self.n_photons,
            "eta": self.eta,
            "entries": [
                {
                    "L": o.lost,
                    "k": o.detected_k,
                    "re": [float(v.real) for v in c],
                    "im": [float(v.imag) for v in c],
                }
                for o, c in self.coeffs.items()
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "OutcomeLikelihoodTable":
        coeffs = {}
        for e in data["entries"]:
            c = np.array(e["re"], dtype=complex) + 1j * np.array(e["im"])
            coeffs[Outcome(e["L"], e["k"])] = c
        return cls(data["n_photons"], data["eta"], coeffs)


def iter_outcomes(n_photons: int) -> Iterator[Outcome]:
    """All (L, k) with 0 <= L <= N and 0 <= k <= N - L; 6 for N=2, 15 for N=4."""
    for lost in range(n_photons + 1):
        for k in range(n_photons - lost + 1):
            yield Outcome(lost, k)


def build_likelihood_table(state: TwoModeState, eta: float) -> OutcomeLikelihoodTable:
    """Closed-form detection probabilities grouped by harmonic d = s - r.

    The phase factors Psi_k = psi_k e^{i(N-k)phi} e^{ik theta} make the
    (r, s) cross term carry e^{i(s-r)(phi-theta)}, so each outcome reduces
    to a vector over d.  The m / r / s / port sums factorize per m into an
    outer product of one weight vector with itself.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta={eta} outside [0, 1]")
    n = state.n_photons
    psi = state.amplitudes
    coeffs: dict[Outcome, np.ndarray] = {}
    for lost in range(n + 1):
        n_det = n - lost
        half = 0.5 ** n_det
        for k in range(n_det + 1):
            pre = half * math.factorial(n_det - k) * math.factorial(k)
            c = np.zeros(2 * n_det + 1, dtype=complex)
            for m in range(lost + 1):
                # weight[r] collects everything that depends on r alone
                w = np.array(
                    [
                        psi[r + m]
                        * a_coefficient(n, lost, r, m, eta)
                        * _port_sum(n_det, r, k)
                        / math.sqrt(math.factorial(n_det - r) * math.factorial(r))
                        for r in range(n_det + 1)
                    ]
                )
                for d in range(-n_det, n_det + 1):
                    lo, hi = max(0, -d), min(n_det, n_det - d)
                    acc = 0.0 + 0.0j
                    for r in range(lo, hi + 1):
                        acc += w[r] * np.conj(w[r + d])
                    c[d + n_det] += acc
            coeffs[Outcome(lost, k)] = pre * c
    return OutcomeLikelihoodTable(n, eta, coeffs)


def evaluate_outcome(
    table: OutcomeLikelihoodTable, outcome: Outcome, phi: float, theta: float
) -> float:
    """P_{L,k}(phi, theta) from the Fourier series, clamped to >= 0."""
    c = table.coeffs.get(Outcome(*outcome))
    if c is None:
        raise KeyError(f"outcome {outcome} not in table")
    n_det = table.n_photons - outcome[0]
    d = np.arange(-n_det, n_det + 1)
    val = np.sum(c * np.exp(1j * d * (phi - theta)))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"probability has imaginary part {val.imag}")
    p = val.real
    if p < -_CLAMP_TOL:
        raise ValueError(f"probability {p} below clamping tolerance")
    return max(p, 0.0)


def _linear_form_power(terms: list[tuple[complex, int]], power: int,
                       shape: tuple[int, ...]) -> np.ndarray:
    """(sum_i coeff_i * mode_i)^power as a dense monomial-coefficient array."""
    out = np.zeros(shape, dtype=complex)
    exps = [idx for _, idx in terms]
    cfs = [cf for cf, _ in terms]
    for split in itertools.product(range(power + 1), repeat=len(terms) - 1):
        if sum(split) > power:
            continue
        counts = list(split) + [power - sum(split)]
        coef = math.factorial(power)
        mono = [0] * len(shape)
        for cnt, cf, idx in zip(counts, cfs, exps):
            coef /= math.factorial(cnt)
            coef *= cf ** cnt
            mono[idx] += cnt
        out[tuple(mono)] += coef
    return out


def oracle_probabilities(
    state: TwoModeState, eta: float, phi: float, theta: float
) -> dict[Outcome, float]:
    """Brute-force detection probabilities by explicit 4-mode simulation.

    Applies the arm phases, expands both loss beam splitters into explicit
    loss modes, applies the real 50/50 output splitter, and marginalizes
    |amplitude|^2 over loss-mode configurations.  Independent of the
    Fourier-table construction; limited to N <= ORACLE_MAX_PHOTONS.
    """
    n = state.n_photons
    if n > ORACLE_MAX_PHOTONS:
        raise ValueError(f"oracle limited to N <= {ORACLE_MAX_PHOTONS}")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta={eta} outside [0, 1]")
    root_t = math.sqrt(eta / 2.0)
    root_l = 1j * math.sqrt(1.0 - eta)
    # modes: (d1, d2, c1, c2); b1 -> rt (d1 + d2) + rl c1, b2 -> rt (d1 - d2) + rl c2
    b1 = [(root_t, 0), (root_t, 1), (root_l, 2)]
    b2 = [(root_t, 0), (-root_t, 1), (root_l, 3)]
    shape = (n + 1,) * 4
    poly = np.zeros(shape, dtype=complex)
    for k in range(n + 1):
        amp = (
            state.amplitudes[k]
            * np.exp(1j * ((n - k) * phi + k * theta))
            / math.sqrt(math.factorial(n - k) * math.factorial(k))
        )
        poly += amp * _mono_product(
            _linear_form_power(b1, n - k, shape),
            _linear_form_power(b2, k, shape),
            shape,
        )
    probs = {o: 0.0 for o in iter_outcomes(n)}
    for e1, e2, l1, l2 in itertools.product(range(n + 1), repeat=4):
        coef = poly[e1, e2, l1, l2]
        if coef == 0.0:
            continue
        fock = coef * math.sqrt(
            math.factorial(e1) * math.factorial(e2)
            * math.factorial(l1) * math.factorial(l2)
        )
        probs[Outcome(l1 + l2, e2)] += abs(fock) ** 2
    return probs


def _mono_product(a: np.ndarray, b: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Polynomial product of two monomial-coefficient arrays, truncated to shape."""
    out = np.zeros(shape, dtype=complex)
    nz_a = np.argwhere(a)
    nz_b = np.argwhere(b)
    for ia in nz_a:
        for ib in nz_b:
            idx = tuple(ia + ib)
            if all(i < s for i, s in zip(idx, shape)):
                out[idx] += a[tuple(ia)] * b[tuple(ib)]
    return out
