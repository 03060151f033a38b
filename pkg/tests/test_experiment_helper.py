import csv
import math
import statistics

import numpy as np
import pytest
from pytest import approx

from common.helpers.experiment_helper import (
    AGGREGATE_HEADER,
    RAW_HEADER,
    ExperimentHelper,
    load_sizes,
    parse_distribution,
    pareto_inverse_cdf,
    sample_pareto,
)
from common.helpers.policy_helper import knee_alpha_search
from common.models.experiment import ExperimentConfig, ResultTable, default_alpha_grid
from common.models.job import JobSet
from exceptions.experiment_exceptions import (
    DistributionSpecParseException,
    ExperimentIOException,
    InvalidExperimentConfigException,
    SizesFileException,
)


def small_config(**overrides):
    settings = dict(
        n_servers=1000.0,
        n_jobs=10,
        p_values=[0.05, 0.5, 0.99],
        n_seeds=3,
        base_seed=7,
        policies=["hesrpt", "srpt", "equi", "hell", "knee"],
    )
    settings.update(overrides)
    return ExperimentConfig(**settings)


def read_rows(path):
    with open(path, newline="") as handle:
        return list(csv.reader(handle))


@pytest.fixture(scope="module")
def small_table():
    return ExperimentHelper(run_id="small").run_matrix(small_config())


def test_pareto_inverse_cdf():
    assert pareto_inverse_cdf(0.5, 1.5, 1.0) == approx(2 ** (2 / 3))
    assert pareto_inverse_cdf(0.5, 1.5, 1.0) == approx(1.5874, abs=1e-4)
    assert pareto_inverse_cdf(1.0, 2.0, 3.0) == 3.0


def test_sample_pareto_is_seeded_and_supported():
    first = sample_pareto(1.5, 2.0, 1000, seed=11)
    assert first == sample_pareto(1.5, 2.0, 1000, seed=11)
    assert first != sample_pareto(1.5, 2.0, 1000, seed=12)
    assert min(first) >= 2.0


def test_sample_pareto_moments():
    samples = np.array(sample_pareto(1.5, 1.0, 1_000_000, seed=42))
    assert float(np.median(samples)) == approx(2 ** (1 / 1.5), abs=0.01)
    assert float(samples.mean()) == approx(3.0, abs=0.2)


@pytest.mark.parametrize("shape, scale", [(0.0, 1.0), (1.5, -1.0)])
def test_sample_pareto_rejects_bad_parameters(shape, scale):
    with pytest.raises(InvalidExperimentConfigException):
        sample_pareto(shape, scale, 10, seed=0)


def test_parse_distribution():
    assert parse_distribution("pareto:shape=1.5,scale=1") == (1.5, 1.0)
    assert parse_distribution("Pareto:shape=2") == (2.0, 1.0)
    assert parse_distribution("pareto: scale=4, shape=1.2") == (1.2, 4.0)


@pytest.mark.parametrize(
    "spec", ["normal:mu=0", "pareto", "pareto:scale=1", "pareto:shape=x", "pareto:shape=1,loc=2"]
)
def test_parse_distribution_rejects_malformed(spec):
    with pytest.raises(DistributionSpecParseException):
        parse_distribution(spec)


def test_load_sizes(tmp_path):
    path = tmp_path / "jobs.csv"
    path.write_text("size\n3.5\n1\n2.25\n")
    assert load_sizes(str(path)) == [3.5, 1.0, 2.25]


@pytest.mark.parametrize("body", ["x\n1\n", "size\n1\nabc\n", "size\n1\n-2\n", "size\n"])
def test_load_sizes_rejects_bad_files(tmp_path, body):
    path = tmp_path / "jobs.csv"
    path.write_text(body)
    with pytest.raises(SizesFileException):
        load_sizes(str(path))


def test_load_sizes_missing_file(tmp_path):
    with pytest.raises(ExperimentIOException):
        load_sizes(str(tmp_path / "missing.csv"))


def test_config_defaults():
    config = ExperimentConfig()
    assert config.n_servers == 1_000_000
    assert config.n_jobs == 500
    assert config.p_values == [0.05, 0.3, 0.5, 0.9, 0.99]
    assert config.policies == ["hesrpt", "srpt", "equi", "hell", "knee"]
    assert len(config.knee_alpha_grid) == 40
    assert config.knee_alpha_grid[0] == approx(1e-6)
    assert config.knee_alpha_grid[-1] == approx(1e3)


def test_config_alpha_grid_follows_scale():
    config = ExperimentConfig(pareto_scale=10.0)
    assert config.knee_alpha_grid == approx(default_alpha_grid(10.0))
    assert config.knee_alpha_grid[0] == approx(1e-5)


def test_config_seeds():
    assert small_config(base_seed=100, n_seeds=3).seeds == [100, 101, 102]


@pytest.mark.parametrize(
    "overrides",
    [
        {"p_values": [0.5, 1.0]},
        {"p_values": []},
        {"p_values": [0.5, 0.5]},
        {"n_jobs": 0},
        {"n_seeds": 0},
        {"n_servers": -1.0},
        {"policies": ["hesrpt", "fifo"]},
        {"policies": ["srpt", "SRPT"]},
        {"knee_alpha_grid": [1.0, 0.0]},
        {"hell_granularity": 0},
        {"workers": 0},
    ],
)
def test_config_rejects_invalid_values(overrides):
    with pytest.raises(InvalidExperimentConfigException):
        small_config(**overrides)


def test_run_matrix_shape_and_order(small_table):
    config = small_config()
    assert len(small_table.rows) == 5 * 3 * 3
    keys = [(row.policy, row.p, row.seed) for row in small_table.rows]
    expected = [(policy, p, seed) for policy in config.policies for p in config.p_values for seed in config.seeds]
    assert keys == expected
    assert len(small_table.aggregates) == 5 * 3
    assert not any(row.failed for row in small_table.rows)


def test_run_matrix_hesrpt_is_best_in_every_cell(small_table):
    cells = {}
    for row in small_table.rows:
        cells.setdefault((row.p, row.seed), {})[row.policy] = row.mean_flow_time
    for cell, by_policy in cells.items():
        best = by_policy["hesrpt"]
        for policy, value in by_policy.items():
            assert best <= value * (1 + 1e-9), (cell, policy)


def test_run_matrix_ratios(small_table):
    for row in small_table.aggregates:
        assert row.ratio_to_hesrpt >= 1 - 1e-9
        if row.policy == "hesrpt":
            assert row.ratio_to_hesrpt == 1.0


def test_run_matrix_records_knee_threshold(small_table):
    grid = small_config().knee_alpha_grid
    for row in small_table.rows:
        if row.policy == "knee":
            assert row.knee_alpha in grid
        else:
            assert row.knee_alpha is None


def test_run_matrix_knee_rows_report_the_best_alpha_run(small_table):
    config = small_config()
    workloads = ExperimentHelper().workloads(config)
    for row in small_table.rows:
        if row.policy == "knee" and row.seed == config.seeds[0]:
            jobs = JobSet.from_sizes(workloads[row.seed])
            alpha, total = knee_alpha_search(jobs, row.p, config.n_servers, None, config.knee_alpha_grid)
            assert row.knee_alpha == alpha
            assert row.total_flow_time == approx(total, rel=1e-12)


def test_run_matrix_medians(small_table):
    for aggregate in small_table.aggregates:
        values = [
            row.mean_flow_time
            for row in small_table.rows
            if row.policy == aggregate.policy and row.p == aggregate.p
        ]
        assert aggregate.median_mean_flow_time == statistics.median(values)


def test_equi_is_near_optimal_for_flat_speedup():
    table = ExperimentHelper().run_matrix(
        small_config(n_jobs=50, n_servers=10_000.0, p_values=[0.05], policies=["hesrpt", "equi"])
    )
    equi = next(row for row in table.aggregates if row.policy == "equi")
    assert 1.0 <= equi.ratio_to_hesrpt <= 1.1


def test_srpt_is_near_optimal_for_steep_speedup():
    table = ExperimentHelper().run_matrix(
        small_config(n_jobs=50, n_servers=10_000.0, p_values=[0.99], policies=["hesrpt", "srpt"])
    )
    srpt = next(row for row in table.aggregates if row.policy == "srpt")
    assert srpt.ratio_to_hesrpt <= 1.05


def test_ratios_use_closed_form_without_hesrpt_rows():
    table = ExperimentHelper().run_matrix(small_config(policies=["equi"], p_values=[0.5]))
    assert [row.policy for row in table.rows] == ["equi"] * 3
    assert table.aggregates[0].ratio_to_hesrpt >= 1 - 1e-9


def test_run_matrix_is_deterministic(tmp_path):
    config = small_config(policies=["hesrpt", "srpt", "equi", "hell"], p_values=[0.3, 0.9])
    helper = ExperimentHelper(run_id="golden")
    first = helper.emit(helper.run_matrix(config), str(tmp_path / "a"))
    second = helper.emit(helper.run_matrix(config), str(tmp_path / "b"))
    for name in ("raw", "aggregate", "plot"):
        with open(first[name], "rb") as a, open(second[name], "rb") as b:
            assert a.read() == b.read()


def test_parallel_and_serial_runs_write_identical_bytes(tmp_path):
    helper = ExperimentHelper()
    serial = helper.emit(helper.run_matrix(small_config(policies=["hesrpt", "equi"])), str(tmp_path / "s"))
    parallel = helper.emit(
        helper.run_matrix(small_config(policies=["hesrpt", "equi"], workers=2)), str(tmp_path / "p")
    )
    for name in ("raw", "aggregate", "plot"):
        with open(serial[name], "rb") as a, open(parallel[name], "rb") as b:
            assert a.read() == b.read()


def test_emit_files(small_table, tmp_path):
    written = ExperimentHelper().emit(small_table, str(tmp_path / "results"))

    raw = read_rows(written["raw"])
    assert raw[0] == RAW_HEADER
    assert len(raw) == 1 + 45

    aggregate = read_rows(written["aggregate"])
    assert aggregate[0] == AGGREGATE_HEADER
    assert len(aggregate) == 1 + 5 * 3

    plot = read_rows(written["plot"])
    assert plot[0] == ["policy", "p=0.05", "p=0.5", "p=0.99"]
    assert [row[0] for row in plot[1:]] == ["hesrpt", "srpt", "equi", "hell", "knee"]
    assert plot[1][1:] == ["1.0", "1.0", "1.0"]


def test_emit_empty_table(tmp_path):
    written = ExperimentHelper().emit(ResultTable(), str(tmp_path))
    assert read_rows(written["raw"]) == [RAW_HEADER]
    assert read_rows(written["aggregate"]) == [AGGREGATE_HEADER]
    assert read_rows(written["plot"]) == [["policy"]]


def test_emit_to_unwritable_path(small_table, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    with pytest.raises(ExperimentIOException):
        ExperimentHelper().emit(small_table, str(blocker / "results"))


@pytest.mark.slow
def test_full_scale_policy_comparison():
    table = ExperimentHelper(run_id="full-scale").run_matrix(ExperimentConfig())
    ratio = {(row.policy, row.p): row.ratio_to_hesrpt for row in table.aggregates}

    cells = {}
    for row in table.rows:
        cells.setdefault((row.p, row.seed), {})[row.policy] = row.mean_flow_time
    for by_policy in cells.values():
        assert by_policy["hesrpt"] <= min(by_policy.values()) * (1 + 1e-9)

    assert ratio[("srpt", 0.05)] >= 5
    assert ratio[("srpt", 0.99)] <= 1.05
    assert ratio[("equi", 0.05)] <= 1.1
    assert ratio[("equi", 0.99)] >= 1.6

    srpt = [ratio[("srpt", p)] for p in table.p_values]
    assert all(b <= a * (1 + 1e-9) for a, b in zip(srpt, srpt[1:]))
    for policy in ("srpt", "equi"):
        assert max(ratio[(policy, p)] for p in table.p_values) >= 1.25
    assert not any(math.isnan(value) for value in ratio.values())
