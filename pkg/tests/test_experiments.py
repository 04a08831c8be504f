import math

import pytest

from iglab.connectivity import is_connected
from iglab.errors import InvalidParameterError
from iglab.experiments import (
    ExperimentConfig,
    degree_law_test,
    coupling_validity_rate,
    dominance_test,
    gap_test,
    run_resilience_trials,
    sweep_experiment,
    wilson_interval,
)
from iglab.generators import gen_model_graph, trial_rng
from iglab.theory import ModelParams, alpha_from_params, predicted_limit_prob


def test_wilson_interval_examples():
    lo, hi = wilson_interval(0, 10)
    assert lo == 0.0 and 0.2 < hi < 0.35
    lo, hi = wilson_interval(10, 10)
    assert hi == pytest.approx(1.0) and 0.65 < lo < 0.8
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert hi - lo == pytest.approx(2 * 1.96 * math.sqrt(0.25 / 100), rel=0.05)


def test_wilson_interval_validation():
    with pytest.raises(InvalidParameterError):
        wilson_interval(5, 0)
    with pytest.raises(InvalidParameterError):
        wilson_interval(5, 4)


def test_trivial_regimes():
    # f = 0 kills every edge; complete-graph parameters survive everything
    dead = ExperimentConfig(
        params=ModelParams(n=30, K=3, P=10, d=1, f=0.0, g=1.0),
        m=0, trials=20, base_seed=7,
    )
    assert run_resilience_trials(dead, workers=1).successes == 0
    full = ExperimentConfig(
        params=ModelParams(n=10, K=2, P=2, d=1, f=1.0, g=1.0),
        m=3, trials=20, base_seed=7,
    )
    res = run_resilience_trials(full, workers=1)
    assert res.successes == 20
    assert res.empirical_prob == 1.0


def test_worker_count_does_not_change_results():
    cfg = ExperimentConfig(
        params=ModelParams(n=60, K=4, P=20, d=2, f=0.9, g=0.9),
        m=0, trials=40, base_seed=11,
    )
    serial = run_resilience_trials(cfg, workers=1)
    parallel = run_resilience_trials(cfg, workers=4)
    assert serial.successes == parallel.successes
    assert serial.to_dict()["empirical_prob"] == parallel.to_dict()["empirical_prob"]


def test_m_zero_matches_plain_connectivity():
    cfg = ExperimentConfig(
        params=ModelParams(n=40, K=3, P=15, d=1, f=0.8, g=0.6),
        m=0, trials=60, base_seed=13,
    )
    res = run_resilience_trials(cfg, workers=1)
    direct = sum(
        is_connected(gen_model_graph(cfg.params, trial_rng(cfg.base_seed, i)))
        for i in range(cfg.trials)
    )
    assert res.successes == direct


def test_sweep_rows_carry_per_point_predictions():
    base = ModelParams(n=200, K=4, P=30, d=1, f=1.0, g=0.5)
    cfg = ExperimentConfig(params=base, m=0, trials=10, base_seed=3,
                           sweep=("g", (0.3, 0.6, 0.9)))
    rows = sweep_experiment(cfg, workers=1)
    assert [r.sweep_value for r in rows] == [0.3, 0.6, 0.9]
    for r in rows:
        assert r.sweep_param == "g"
        assert r.params.g == r.sweep_value
        expect_alpha = alpha_from_params(r.params, 0)
        assert r.alpha == pytest.approx(expect_alpha)
        assert r.predicted_limit == pytest.approx(predicted_limit_prob(expect_alpha, 0))
        assert r.ci_low <= r.empirical_prob <= r.ci_high
        assert r.critical is not None and r.critical.axis == "g"
    # the shared critical value is the g solving the zero-offset equation
    assert rows[0].critical.value == rows[1].critical.value


def test_sweep_requires_axis():
    cfg = ExperimentConfig(params=ModelParams(n=10, K=2, P=5, d=1, f=1.0, g=1.0),
                           m=0, trials=5, base_seed=0)
    with pytest.raises(InvalidParameterError):
        sweep_experiment(cfg)


def test_degree_law_report_smoke():
    params = ModelParams(n=300, K=5, P=100, d=1, f=1.0, g=0.9)
    report = degree_law_test(params, trials=150, base_seed=21, hs=(0, 1))
    assert len(report.entries) == 2
    for entry in report.entries:
        assert 0.0 <= entry.tv_distance <= 1.0
        assert 0.0 <= entry.p_value <= 1.0
        assert entry.lam >= 0.0
    # dense regime: isolated nodes should be rare in both law and data
    iso = report.entries[0]
    assert iso.mean_count <= iso.lam + 5 * math.sqrt(iso.lam + 1) + 1


def test_dominance_report_smoke():
    params = ModelParams(n=100, K=4, P=30, d=1, f=1.0, g=0.8)
    report = dominance_test(params, trials=120, k=1, base_seed=5)
    assert report.z < report.p_model or report.z < 1.0  # z is a probability
    assert 0.0 <= report.p_model <= 1.0 and 0.0 <= report.p_er <= 1.0
    assert report.holds  # generous margin at these sizes
    assert report.difference == pytest.approx(report.p_model - report.p_er)


def test_gap_report_smoke_and_cost_guard():
    params = ModelParams(n=60, K=4, P=30, d=1, f=1.0, g=0.6)
    report = gap_test(params, trials=100, k=2, base_seed=9)
    assert report.occurrences == report.frequency * report.trials
    assert report.ci_low <= report.frequency <= report.ci_high
    with pytest.raises(InvalidParameterError):
        gap_test(params, trials=1, k=4, base_seed=0)


def test_coupling_report_smoke():
    report = coupling_validity_rate(200, 50, 500, 2, trials=10, base_seed=2)
    assert report.trials == 10
    assert report.containment_checked == report.valid_trials
    assert 0.0 <= report.validity_rate <= 1.0
    assert report.x > 0


def test_config_validation():
    params = ModelParams(n=10, K=2, P=5, d=1, f=1.0, g=1.0)
    with pytest.raises(InvalidParameterError):
        ExperimentConfig(params=params, m=-1, trials=5, base_seed=0)
    with pytest.raises(InvalidParameterError):
        ExperimentConfig(params=params, m=0, trials=0, base_seed=0)
