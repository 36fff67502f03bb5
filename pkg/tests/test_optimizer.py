import math

import pytest

from lossyphase.optimizer import (
    PARETO_CSV_HEADER,
    enumerate_plans,
    optimize,
    pareto_csv,
    sql_baseline,
)


class TestEnumeration:
    def test_small_exhaustive_case(self):
        plans = enumerate_plans(2, 1.0)
        keys = [(p.n1, p.n2, p.chi2, p.n4) for p in plans]
        assert keys == [(2, 0, 0.0, 0), (0, 1, 0.0, 0), (0, 1, 1.0, 0),
                        (0, 1, 2.0, 0)]

    def test_n9_contains_paper_row(self):
        plans = enumerate_plans(9, 0.1, eta=0.6)
        assert any(
            (p.n1, p.n2, p.chi2, p.n4) == (7, 1, 1.7, 0) for p in plans
        )

    def test_n13_contains_paper_row(self):
        plans = enumerate_plans(13, 0.1, eta=0.6)
        assert any(
            (p.n1, p.n2, p.chi2, p.n4, p.chi4) == (7, 1, 1.7, 1, 1.3)
            for p in plans
        )

    def test_budget_conserved(self):
        for total in (4, 9, 13):
            for plan in enumerate_plans(total, 0.5):
                assert plan.total_photons == total

    def test_all_single_photon_plan_present(self):
        for total in (1, 5, 12):
            plans = enumerate_plans(total, 0.5)
            assert any(p.n1 == total and p.n2 == 0 and p.n4 == 0 for p in plans)

    def test_validation(self):
        with pytest.raises(ValueError):
            enumerate_plans(0, 0.1)
        with pytest.raises(ValueError):
            enumerate_plans(4, 0.0)


class TestOptimize:
    def test_best_never_worse_than_sql(self):
        result = optimize(4, 1.0, chi_grid_step=0.5)
        assert result.best_variance <= sql_baseline(4, 1.0) + 1e-12

    def test_deterministic(self):
        a = optimize(3, 0.7, chi_grid_step=0.5)
        b = optimize(3, 0.7, chi_grid_step=0.5)
        assert a.best_plan == b.best_plan
        assert a.best_variance == b.best_variance
        assert [(p, r.mu) for p, r in a.pareto_table] == [
            (p, r.mu) for p, r in b.pareto_table
        ]

    def test_best_matches_table_minimum(self):
        res = optimize(4, 0.6, chi_grid_step=0.5)
        table_min = min(r.holevo_variance for _, r in res.pareto_table)
        assert res.best_variance == table_min

    def test_monte_carlo_evaluator(self):
        res = optimize(2, 0.8, chi_grid_step=1.0, evaluator="mc",
                       mc_trials=2_000, mc_seed=5)
        assert all(r.method == "monte_carlo" for _, r in res.pareto_table)

    def test_branch_guard_identifies_offending_plan(self):
        # N=17 all-single-photon needs 3^17 > 1e8 exact records; the error
        # must name the plan that tripped the guard.
        from lossyphase.sequences import BranchGuardError
        with pytest.raises(BranchGuardError, match="n1=17"):
            optimize(17, 0.6, chi_grid_step=2.0, evaluator="exact")


class TestSqlBaseline:
    def test_single_photon_value(self):
        assert sql_baseline(1, 0.6) == pytest.approx(
            4.0 / 0.36 - 1.0, abs=1e-9
        )

    def test_invalid_photon_count(self):
        with pytest.raises(ValueError):
            sql_baseline(0, 0.6)


def test_pareto_csv_format():
    res = optimize(2, 0.9, chi_grid_step=1.0)
    text = pareto_csv(res)
    lines = text.strip().split("\n")
    assert lines[0] == PARETO_CSV_HEADER
    assert lines[0] == "n1,n2,chi2,n4,chi4,eta,mu,holevo_variance,branches,method"
    assert len(lines) == 1 + len(res.pareto_table)
    first = lines[1].split(",")
    assert first[0] == "2" and first[-1] == "exact_with_speedup"


def test_json_dict_shape():
    res = optimize(2, 0.9, chi_grid_step=1.0)
    doc = res.to_json_dict()
    assert doc["total_photons"] == 2
    assert set(doc["best_plan"]) == {"n1", "n2", "chi2", "n4", "chi4", "eta"}
    assert len(doc["pareto_table"]) == len(res.pareto_table)
    assert math.isfinite(doc["best_variance"])
