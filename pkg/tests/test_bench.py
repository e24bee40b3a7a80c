import json
import math
from dataclasses import replace

import numpy as np
import pytest

from sparse_prior.bench import (
    ALGORITHM_NAMES,
    CSV_COLUMNS,
    AllTrialsDegenerateError,
    ExperimentConfig,
    msd,
    p_recovered,
    render_csv,
    run_convergence,
    run_experiment,
    run_single,
    run_sweep,
    run_trial,
    squared_deviation,
    summary_dict,
    support_overlap,
)
from sparse_prior.thresholding import Support


SMALL = dict(
    n=24,
    trials=3,
    group_sizes=(18, 4, 2),
    group_probs=(1 / 18, 0.25, 0.5),
    noise_variance=1e-3,
    m=12,
    m_values=(8, 12),
    sigma_values=(1e-3, 1e-2),
    max_iters=12,
    seed=7,
)


@pytest.fixture(scope="module")
def small_config():
    return ExperimentConfig(**SMALL)


@pytest.fixture(scope="module")
def small_m_table(small_config):
    return run_sweep(small_config, "m")


class TestExperimentConfig:
    def test_defaults(self):
        cfg = ExperimentConfig()
        assert cfg.n == 240 and cfg.m == 70 and cfg.trials == 1000
        assert cfg.algorithms == ALGORITHM_NAMES
        assert cfg.m_values == (40, 50, 60, 70, 80)

    def test_sequences_coerced_to_tuples(self):
        cfg = ExperimentConfig(
            n=10,
            group_sizes=[8, 2],
            group_probs=[0.25, 0.5],
            m_values=[4, 6],
            sigma_values=[1e-3],
            m=6,
            algorithms=["niht", "omp"],
        )
        assert cfg.group_sizes == (8, 2)
        assert cfg.m_values == (4, 6)
        assert cfg.algorithms == ("niht", "omp")

    @pytest.mark.parametrize(
        "kwargs, fragment",
        [
            (dict(c=1.5), "c:"),
            (dict(kappa_scaled=0.5), "kappa_scaled"),
            (dict(trials=0), "trials"),
            (dict(n=0), "n:"),
            (dict(seed=-1), "seed"),
            (dict(m=0), "m:"),
            (dict(m=500), "m:"),
            (dict(group_sizes=(100, 100)), "group_sizes"),
            (dict(group_probs=(0.1, 0.1, 0.1, 1.5)), r"\(0, 1\]"),
            (dict(m_values=()), "m_values"),
            (dict(m_values=(40, 999)), "m_values"),
            (dict(sigma_values=()), "sigma_values"),
            (dict(sigma_values=(1e-3, -1.0)), "sigma_values"),
            (dict(noise_variance=-1.0), "noise_variance"),
            (dict(matrix_variance=0.0), "matrix_variance"),
            (dict(algorithms=()), "roster"),
            (dict(algorithms=("niht", "frobnicate")), "unknown name"),
            (dict(algorithms=("niht", "niht")), "duplicates"),
            (dict(lw_alpha=-2.0), "lw_alpha"),
            (dict(alpha_mode="never"), "alpha_mode"),
        ],
    )
    def test_rejects_bad_values(self, kwargs, fragment):
        with pytest.raises(ValueError, match=fragment):
            ExperimentConfig(**kwargs)

    def test_solver_and_baseline_views(self):
        cfg = ExperimentConfig(beta=0.3, lw_alpha=0.2)
        assert cfg.solver_config().beta == 0.3
        assert cfg.baseline_config().lw_alpha == 0.2


class TestScores:
    def test_support_overlap_fraction(self):
        true = Support((0, 2, 5, 7))
        est = Support((2, 3, 7))
        assert support_overlap(true, est) == 0.5
        assert support_overlap(true, true) == 1.0

    def test_support_overlap_empty_true(self):
        with pytest.raises(ValueError, match="empty true support"):
            support_overlap(Support(()), Support((1,)))

    def test_squared_deviation_value(self):
        x = np.array([3.0, 0.0, 4.0])
        xhat = np.array([3.0, 0.0, 0.0])
        assert squared_deviation(x, xhat) == pytest.approx(16.0 / 25.0)
        assert squared_deviation(x, x) == 0.0

    def test_squared_deviation_errors(self):
        with pytest.raises(ValueError, match="shape mismatch"):
            squared_deviation(np.ones(3), np.ones(4))
        with pytest.raises(ValueError, match="all-zero"):
            squared_deviation(np.zeros(3), np.ones(3))

    def test_aggregates(self):
        trues = [Support((0, 1)), Support((2, 3))]
        ests = [Support((0, 1)), Support((2, 9))]
        assert p_recovered(trues, ests) == 0.75
        sigs = [np.array([1.0, 0.0]), np.array([0.0, 2.0])]
        fits = [np.array([1.0, 0.0]), np.array([0.0, 0.0])]
        assert msd(sigs, fits) == 0.5
        with pytest.raises(ValueError, match="equally many"):
            p_recovered(trues, ests[:1])
        with pytest.raises(ValueError, match="equally many"):
            msd([], [])


class TestRunTrial:
    def test_deterministic(self, small_config):
        a = run_trial(small_config, 12, 1e-3, 0)
        b = run_trial(small_config, 12, 1e-3, 0)
        assert a.sparsity == b.sparsity
        for name in small_config.algorithms:
            assert a.metrics[name].overlap == b.metrics[name].overlap
            assert a.metrics[name].deviation == b.metrics[name].deviation

    def test_trial_count_changes_nothing_per_index(self, small_config):
        wider = replace(small_config, trials=50)
        a = run_trial(small_config, 12, 1e-3, 1)
        b = run_trial(wider, 12, 1e-3, 1)
        for name in small_config.algorithms:
            assert a.metrics[name].deviation == b.metrics[name].deviation

    def test_metric_ranges(self, small_config):
        record = run_trial(small_config, 12, 1e-3, 2)
        assert set(record.metrics) == set(small_config.algorithms)
        assert record.sparsity >= 1
        for name, cell in record.metrics.items():
            assert 0.0 <= cell.overlap <= 1.0
            assert cell.deviation >= 0.0
            assert cell.iterations >= 1
            assert cell.wall_time >= 0.0
        assert record.metrics["oracle"].overlap == 1.0

    def test_failure_recorded_not_raised(self):
        cfg = ExperimentConfig(
            n=3,
            trials=1,
            group_sizes=(3,),
            group_probs=(1.0,),
            m=1,
            m_values=(1,),
            algorithms=("oracle",),
        )
        record = run_trial(cfg, 1, 1e-3, 0)
        cell = record.metrics["oracle"]
        assert math.isnan(cell.overlap) and math.isnan(cell.deviation)
        assert cell.flag is not None and "support" in cell.flag


class TestSweep:
    def test_shape_and_order(self, small_config, small_m_table):
        table = small_m_table
        assert table.kind == "sweep-m"
        assert table.sweep_var == "m"
        assert table.master_seed == small_config.seed
        assert len(table.rows) == 2 * len(small_config.algorithms)
        expected = [
            (float(v), name)
            for v in (8, 12)
            for name in sorted(small_config.algorithms)
        ]
        assert [(r.value, r.algorithm) for r in table.rows] == expected
        assert all(r.sweep_var == "m" for r in table.rows)

    def test_row_invariants(self, small_config, small_m_table):
        for row in small_m_table.rows:
            assert row.trials == small_config.trials
            assert 0.0 <= row.p_recovered <= 1.0
            assert row.msd >= 0.0
            assert row.p_recovered_se >= 0.0 and row.msd_se >= 0.0
            if row.algorithm == "oracle":
                assert row.p_recovered == 1.0

    def test_rerun_is_byte_identical(self, small_config, small_m_table):
        again = run_sweep(small_config, "m")
        assert render_csv(again) == render_csv(small_m_table)

    def test_parallel_matches_serial(self, small_config, small_m_table):
        parallel = run_sweep(small_config, "m", workers=2)
        assert render_csv(parallel) == render_csv(small_m_table)

    def test_noise_sweep_labels(self, small_config):
        table = run_sweep(small_config, "noise")
        assert table.kind == "sweep-noise"
        assert table.sweep_var == "noise_variance"
        values = [r.value for r in table.rows]
        assert values == sorted(values)
        assert set(values) == {1e-3, 1e-2}

    def test_bad_kind(self, small_config):
        with pytest.raises(ValueError, match="'m' or 'noise'"):
            run_sweep(small_config, "sideways")

    def test_bad_worker_count(self, small_config):
        with pytest.raises(ValueError, match="workers"):
            run_sweep(small_config, "m", workers=0)


class TestConvergence:
    def test_roster_filtered_to_iterative(self):
        cfg = ExperimentConfig(
            **{**SMALL, "algorithms": ("niht", "omp", "oracle"), "max_iters": 6}
        )
        table = run_convergence(cfg)
        assert table.kind == "convergence"
        assert table.sweep_var == "iteration"
        assert {r.algorithm for r in table.rows} == {"niht"}
        assert [r.value for r in table.rows] == [float(l) for l in range(1, 7)]

    def test_all_baseline_roster_rejected(self):
        cfg = ExperimentConfig(**{**SMALL, "algorithms": ("omp", "oracle")})
        with pytest.raises(ValueError, match="iterative"):
            run_convergence(cfg)

    def test_scores_finite_and_bounded(self):
        cfg = ExperimentConfig(
            **{**SMALL, "algorithms": ("niht", "rka-niht"), "max_iters": 5}
        )
        table = run_convergence(cfg)
        assert len(table.rows) == 5 * 2
        for row in table.rows:
            assert 0.0 <= row.p_recovered <= 1.0
            assert row.msd >= 0.0
            assert row.trials == cfg.trials


class TestRunSingle:
    def test_one_row_per_algorithm(self, small_config):
        table = run_single(small_config)
        assert table.kind == "single"
        assert table.sweep_var == "m"
        assert len(table.rows) == len(small_config.algorithms)
        for row in table.rows:
            assert row.value == float(small_config.m)
            assert row.trials == 1
            assert row.p_recovered_se == 0.0
            assert row.msd_se == 0.0


class TestDegenerateRuns:
    def test_all_trials_degenerate_raises(self):
        cfg = ExperimentConfig(
            n=3,
            trials=2,
            group_sizes=(3,),
            group_probs=(1.0,),
            m=1,
            m_values=(1,),
            algorithms=("oracle",),
        )
        with pytest.raises(AllTrialsDegenerateError):
            run_sweep(cfg, "m")
        with pytest.raises(AllTrialsDegenerateError):
            run_single(cfg)


class TestRendering:
    def test_csv_layout(self, small_m_table):
        csv = render_csv(small_m_table)
        lines = csv.split("\n")
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert lines[-1] == ""  # trailing newline
        assert len(lines) == 1 + len(small_m_table.rows) + 1
        assert "\r" not in csv
        first = lines[1].split(",")
        assert first[0] == "m"
        assert first[2] == format(small_m_table.rows[0].value, ".12g")
        assert first[8] == str(small_m_table.rows[0].trials)

    def test_summary_dict_layout(self, small_config, small_m_table):
        summary = summary_dict(small_m_table)
        assert set(summary) == {"kind", "sweep_var", "master_seed", "config", "rows"}
        assert summary["master_seed"] == small_config.seed
        assert summary["config"]["n"] == small_config.n
        assert len(summary["rows"]) == len(small_m_table.rows)
        encoded = json.dumps(summary, sort_keys=True)
        assert json.loads(encoded)["kind"] == "sweep-m"

    def test_summary_has_no_timestamps(self, small_m_table):
        text = json.dumps(summary_dict(small_m_table)).lower()
        for needle in ("time", "date", "host"):
            assert needle not in text


class TestRunExperiment:
    def test_dispatch(self, small_config):
        assert run_experiment(small_config, "single").kind == "single"
        with pytest.raises(ValueError, match="kind"):
            run_experiment(small_config, "warp")
