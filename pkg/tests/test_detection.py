import json
import math

import numpy as np
import pytest

from lossyphase.detection import (
    Outcome,
    OutcomeLikelihoodTable,
    a_coefficient,
    build_likelihood_table,
    evaluate_outcome,
    iter_outcomes,
    oracle_probabilities,
)
from lossyphase.states import TwoModeState, make_loss_resistant, make_single_photon


def random_state(rng, n):
    return TwoModeState(n, rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1))


class TestACoefficient:
    def test_lossless_is_one(self):
        assert a_coefficient(2, 0, 0, 0, 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_all_lost_example(self):
        # N=2, L=2, r=0, m=1, eta=0.5: sqrt(0.25 * C(1,0) * C(1,0)) = 0.5
        assert a_coefficient(2, 2, 0, 1, 0.5) == pytest.approx(0.5, abs=1e-15)

    def test_eta_zero_vanishes_unless_all_lost(self):
        assert a_coefficient(3, 2, 0, 1, 0.0) == 0.0
        assert a_coefficient(3, 3, 0, 2, 0.0) != 0.0

    @pytest.mark.parametrize(
        "args", [(2, 3, 0, 0), (2, 1, 2, 0), (2, 1, 0, 2), (2, -1, 0, 0)]
    )
    def test_out_of_range_rejected(self, args):
        with pytest.raises(ValueError):
            a_coefficient(*args, 0.5)

    def test_eta_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            a_coefficient(2, 0, 0, 0, 1.5)


class TestTableStructure:
    def test_outcome_counts(self):
        t2 = build_likelihood_table(make_loss_resistant(1, 1.7), 0.6)
        t4 = build_likelihood_table(make_loss_resistant(2, 1.3), 0.6)
        assert len(t2.outcomes) == 6
        assert len(t4.outcomes) == 15

    def test_hermitian_symmetry(self):
        rng = np.random.default_rng(5)
        for n in (1, 2, 3, 4):
            table = build_likelihood_table(random_state(rng, n), 0.4)
            for c in table.coeffs.values():
                assert np.max(np.abs(c - np.conj(c[::-1]))) < 1e-12

    def test_harmonic_band_matches_surviving_photons(self):
        table = build_likelihood_table(make_loss_resistant(2, 0.9), 0.5)
        for o, c in table.coeffs.items():
            assert len(c) == 2 * (4 - o.lost) + 1

    def test_lossless_limit(self):
        table = build_likelihood_table(make_loss_resistant(1, 1.3), 1.0)
        for o in table.outcomes:
            if o.lost >= 1:
                assert evaluate_outcome(table, o, 0.7, 0.1) == 0.0
        total = sum(
            evaluate_outcome(table, o, 0.7, 0.1)
            for o in table.outcomes if o.lost == 0
        )
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_noon_lost_photon_has_no_phase_information(self):
        table = build_likelihood_table(make_loss_resistant(1, 0.0), 0.6)
        for o, c in table.coeffs.items():
            if o.lost == 1:
                nd = 2 - o.lost
                for d in range(-nd, nd + 1):
                    if d != 0:
                        assert abs(c[d + nd]) < 1e-15

    def test_single_photon_loss_probability(self):
        table = build_likelihood_table(make_single_photon(), 0.6)
        for phi, theta in ((0.0, 0.0), (1.2, 0.4), (4.0, 2.7)):
            assert evaluate_outcome(table, (1, 0), phi, theta) == pytest.approx(
                0.4, abs=1e-14
            )

    def test_loss_marginal_is_binomial(self):
        eta = 0.6
        table = build_likelihood_table(make_loss_resistant(2, 1.3), eta)
        for lost in range(5):
            total = sum(
                evaluate_outcome(table, o, 0.321, 0.987)
                for o in table.outcomes if o.lost == lost
            )
            expect = math.comb(4, lost) * eta ** (4 - lost) * (1 - eta) ** lost
            assert total == pytest.approx(expect, abs=1e-12)


class TestOracleEquivalence:
    @pytest.mark.parametrize("n", [1, 2, 4])
    @pytest.mark.parametrize("eta", [0.25, 0.6, 1.0])
    def test_family_states_match_oracle(self, n, eta):
        state = {1: make_single_photon(), 2: make_loss_resistant(1, 1.7),
                 4: make_loss_resistant(2, 1.3)}[n]
        table = build_likelihood_table(state, eta)
        rng = np.random.default_rng(n * 100 + int(eta * 10))
        for _ in range(16):
            phi, theta = rng.uniform(0.0, 2.0 * math.pi, 2)
            oracle = oracle_probabilities(state, eta, phi, theta)
            for o in iter_outcomes(n):
                assert abs(
                    oracle[o] - evaluate_outcome(table, o, phi, theta)
                ) <= 1e-10

    def test_random_complex_states_match_oracle(self):
        rng = np.random.default_rng(77)
        for n in (2, 3, 5):
            for eta in (0.15, 0.85):
                state = random_state(rng, n)
                table = build_likelihood_table(state, eta)
                phi, theta = rng.uniform(0.0, 2.0 * math.pi, 2)
                oracle = oracle_probabilities(state, eta, phi, theta)
                for o in iter_outcomes(n):
                    assert abs(
                        oracle[o] - evaluate_outcome(table, o, phi, theta)
                    ) <= 1e-10

    def test_oracle_guard(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            oracle_probabilities(random_state(rng, 7), 0.5, 0.0, 0.0)

    def test_single_photon_lossless_point(self):
        probs = oracle_probabilities(make_single_photon(), 1.0, 0.0, 0.0)
        values = sorted(probs[o] for o in iter_outcomes(1) if o.lost == 0)
        assert values[0] == pytest.approx(0.0, abs=1e-12)
        assert values[1] == pytest.approx(1.0, abs=1e-12)

    def test_noon_super_resolution_period(self):
        state = make_loss_resistant(1, 0.0)
        p0 = oracle_probabilities(state, 1.0, 0.0, 0.0)
        p_half = oracle_probabilities(state, 1.0, math.pi / 2.0, 0.0)
        p_pi = oracle_probabilities(state, 1.0, math.pi, 0.0)
        mid = Outcome(0, 1)
        assert abs(p0[mid] - p_half[mid]) > 0.1      # fringe moves within period pi
        assert p0[mid] == pytest.approx(p_pi[mid], abs=1e-12)


class TestEvaluation:
    def test_completeness(self):
        rng = np.random.default_rng(9)
        for chi in (0.0, 0.5, 1.0, 1.7, 2.0):
            for n in (1, 2):
                for eta in (0.0, 0.3, 0.6, 1.0):
                    state = make_loss_resistant(n, chi)
                    table = build_likelihood_table(state, eta)
                    for _ in range(4):
                        phi, theta = rng.uniform(0.0, 2.0 * math.pi, 2)
                        total = sum(
                            evaluate_outcome(table, o, phi, theta)
                            for o in table.outcomes
                        )
                        assert total == pytest.approx(1.0, abs=1e-12)

    def test_shift_covariance(self):
        table = build_likelihood_table(make_loss_resistant(1, 1.1), 0.7)
        for o in table.outcomes:
            a = evaluate_outcome(table, o, 1.9, 0.6)
            b = evaluate_outcome(table, o, 1.3, 0.0)
            assert a == pytest.approx(b, abs=1e-14)

    def test_unknown_outcome_rejected(self):
        table = build_likelihood_table(make_single_photon(), 0.6)
        with pytest.raises(KeyError):
            evaluate_outcome(table, (5, 0), 0.0, 0.0)

    def test_nonnegative_clamp(self):
        table = build_likelihood_table(make_loss_resistant(1, 0.0), 1.0)
        xs = np.linspace(0.0, 2.0 * math.pi, 512)
        for o in table.outcomes:
            for x in xs:
                assert evaluate_outcome(table, o, float(x), 0.0) >= 0.0


def test_json_round_trip():
    table = build_likelihood_table(make_loss_resistant(2, 1.3), 0.6)
    doc = json.loads(json.dumps(table.to_json_dict()))
    assert doc["n_photons"] == 4
    assert doc["eta"] == 0.6
    assert len(doc["entries"]) == 15
    entry = doc["entries"][0]
    assert set(entry) == {"L", "k", "re", "im"}
    back = OutcomeLikelihoodTable.from_json_dict(doc)
    for o, c in table.coeffs.items():
        assert np.allclose(back.coeffs[o], c, atol=0.0)
