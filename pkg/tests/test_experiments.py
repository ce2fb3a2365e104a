import csv
import json
import math

import pytest
from scipy.stats import binom

from semcert.experiments import (
    DEFAULT_PARAMS,
    Scenario,
    StaticRunRecord,
    TimeseriesConfig,
    TradeoffPoint,
    TwoPopulationModel,
    calibrate_moderate_shift,
    emit_results,
    emit_static_summary,
    run_static,
    run_timeseries,
    run_tradeoff,
)
from semcert.simagents import Condition
from semcert.stats import wilson_upper

SMALL = dict(per_term_size=80, audit_pool_size=120, heldout_size=100)

TINY_TS = TimeseriesConfig(epochs=5, drift_epoch=2, n_runs=2,
                           audit_pool_size=120, per_term_size=80,
                           heldout_size=80, recert_pool_size=200,
                           recert_per_term=150)


class TestRunStatic:
    def test_deterministic(self):
        first = run_static(Condition.NOISE_ONLY, 3, DEFAULT_PARAMS, 5, **SMALL)
        second = run_static(Condition.NOISE_ONLY, 3, DEFAULT_PARAMS, 5, **SMALL)
        assert first == second

    def test_summary_math(self):
        records, summary = run_static(Condition.MODERATE_DRIFT, 5,
                                      DEFAULT_PARAMS, 5, **SMALL)
        assert summary.n_runs == 5
        assert summary.unguarded_mean == pytest.approx(
            sum(r.unguarded_rate for r in records) / 5)
        assert summary.core_mean == pytest.approx(
            sum(r.core_size for r in records) / 5)
        measured = [r.guarded_rate for r in records if r.guarded_measurable]
        if measured:
            assert summary.guarded_mean == pytest.approx(sum(measured) / len(measured))
        assert summary.empty_core_runs == sum(1 for r in records if r.core_size == 0)

    def test_moderate_diverges_more_than_noise_only(self):
        _, noise = run_static(Condition.NOISE_ONLY, 8, DEFAULT_PARAMS, 5, **SMALL)
        _, moderate = run_static(Condition.MODERATE_DRIFT, 8, DEFAULT_PARAMS, 5, **SMALL)
        assert moderate.unguarded_mean > noise.unguarded_mean + 0.02

    def test_rejects_zero_runs(self):
        with pytest.raises(ValueError):
            run_static(Condition.NOISE_ONLY, 0)


class TestRunTimeseries:
    def test_structure_and_flags(self):
        records = run_timeseries(Scenario.FROZEN, DEFAULT_PARAMS, seed=3,
                                 cfg=TINY_TS)
        assert [r.epoch for r in records] == list(range(5))
        assert all(r.scenario == "frozen" for r in records)
        assert [r.drifted for r in records] == [False, False, True, True, True]

    def test_baseline_never_flags_drift(self):
        records = run_timeseries(Scenario.BASELINE, DEFAULT_PARAMS, seed=3,
                                 cfg=TINY_TS)
        assert not any(r.drifted for r in records)

    def test_deterministic(self):
        one = run_timeseries(Scenario.RECERT, DEFAULT_PARAMS, seed=3, cfg=TINY_TS)
        two = run_timeseries(Scenario.RECERT, DEFAULT_PARAMS, seed=3, cfg=TINY_TS)
        assert one == two

    def test_drift_epoch_validation(self):
        with pytest.raises(ValueError):
            TimeseriesConfig(epochs=5, drift_epoch=7)


class TestRunTradeoff:
    def test_no_filtering_limit(self):
        points = run_tradeoff([0.5], [0.9999], TwoPopulationModel(0.01, 0.30),
                              k_audit=120)
        point = points[0]
        assert point.coverage == pytest.approx(1.0, abs=1e-6)
        assert point.guarded_disagreement == pytest.approx(
            point.unguarded_baseline, abs=1e-6)

    def test_zero_threshold_passes_nothing(self):
        point = run_tradeoff([0.5], [0.0], TwoPopulationModel(0.01, 0.30))[0]
        assert point.coverage == 0.0
        assert point.guarded_disagreement == 0.0

    def test_exact_matches_reference_binomial(self):
        k, delta = 120, 0.05
        point = run_tradeoff([0.8], [0.05], TwoPopulationModel(0.01, 0.30),
                             k_audit=k, delta=delta)[0]
        cstar = max(c for c in range(k + 1) if wilson_upper(c, k, delta) <= 0.05)
        expected_cov = 0.8 * binom.cdf(cstar, k, 0.01) + 0.2 * binom.cdf(cstar, k, 0.30)
        assert point.coverage == pytest.approx(expected_cov, abs=1e-12)
        assert point.guarded_disagreement == pytest.approx(0.01, abs=5e-4)

    def test_monotone_in_threshold(self):
        taus = [round(0.01 * i, 10) for i in range(1, 21)]
        points = run_tradeoff([0.7], taus, TwoPopulationModel(0.01, 0.30))
        covs = [p.coverage for p in points]
        gds = [p.guarded_disagreement for p in points]
        assert all(b >= a - 1e-12 for a, b in zip(covs, covs[1:]))
        assert all(b >= a - 1e-12 for a, b in zip(gds, gds[1:]))

    def test_monte_carlo_cross_check(self):
        points = run_tradeoff([0.5], [0.03, 0.08], TwoPopulationModel(0.01, 0.30),
                              n_mc=40000, mc_seed=2)
        for p in points:
            assert p.coverage_mc == pytest.approx(p.coverage, abs=0.005)
            assert p.guarded_mc == pytest.approx(p.guarded_disagreement, abs=0.005)

    def test_rejects_empty_grids(self):
        with pytest.raises(ValueError):
            run_tradeoff([], [0.05])
        with pytest.raises(ValueError):
            run_tradeoff([0.5], [])


class TestCalibration:
    def test_sweep_picks_nearest_shift(self):
        result = calibrate_moderate_shift(shifts=(10.0, 30.5), target=0.074,
                                          n_runs=6, base_seed=0,
                                          heldout_size=200)
        assert result["best_shift"] == 30.5
        assert len(result["table"]) == 2

    def test_shipped_default_hits_band(self):
        result = calibrate_moderate_shift(shifts=(30.5,), n_runs=25,
                                          base_seed=3)
        assert 0.065 <= result["best_mean_unguarded"] <= 0.085


class TestEmitResults:
    def test_static_files(self, tmp_path):
        records, summary = run_static(Condition.NOISE_ONLY, 3, DEFAULT_PARAMS,
                                      5, **SMALL)
        paths = emit_results(records, tmp_path)
        assert [p.name for p in paths] == ["static_runs.csv", "static_runs.json"]
        with open(paths[0], newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 3
        assert set(rows[0]) == {"condition", "seed", "core_size",
                                "unguarded_rate", "guarded_rate",
                                "guarded_measurable", "certified_terms"}
        emit_static_summary([summary], tmp_path)
        with open(tmp_path / "static_summary.csv", newline="") as fh:
            srows = list(csv.reader(fh))
        assert srows[0] == ["condition", "unguarded", "guarded", "core"]
        assert len(srows) == 2

    def test_timeseries_files(self, tmp_path):
        records = run_timeseries(Scenario.BASELINE, DEFAULT_PARAMS, seed=3,
                                 cfg=TINY_TS)
        paths = emit_results(records, tmp_path)
        with open(paths[0], newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert {r["scenario"] for r in rows} == {"baseline"}
        assert [int(r["epoch"]) for r in rows] == list(range(5))

    def test_tradeoff_files(self, tmp_path):
        points = run_tradeoff([0.5, 0.9], [0.02, 0.05], TwoPopulationModel())
        paths = emit_results(points, tmp_path)
        payload = json.loads(paths[1].read_text())
        assert len(payload) == 4
        assert {round(p["pi"], 2) for p in payload} == {0.5, 0.9}

    def test_empty_records_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_results([], tmp_path)
