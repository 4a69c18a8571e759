import io
import json
import math

import numpy as np
import pytest

from swarm_spsa.harness import (
    METHODS,
    SUMMARY_HEADER,
    TRACE_HEADER,
    build_spec,
    downsample_trace,
    export_results,
    run_experiment,
    single_run,
    summarize,
    write_trace_csv,
)


def small_spec(method="bpso", function="sphere", dim=3, runs=3, **overrides):
    cfg = {"max_iter": 40, "swarm_size": 6}
    cfg.update(overrides)
    return build_spec(method, function, dim, runs=runs, base_seed=5, overrides=cfg)


class TestSummarize:
    def test_three_values(self):
        mu, sigma = summarize([1.0, 2.0, 3.0])
        assert mu == 2.0
        assert sigma == pytest.approx(1.0, rel=1e-15)

    def test_single_value(self):
        assert summarize([5.0]) == (5.0, 0.0)

    def test_constant_list(self):
        mu, sigma = summarize([2.5] * 40)
        assert mu == 2.5
        assert sigma == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            summarize([])

    def test_against_exact_two_pass_oracle(self):
        # naive two-pass oracle with exact summation, mixed magnitudes
        rng = np.random.default_rng(31)
        values = rng.lognormal(mean=0.0, sigma=6.0, size=1_000_000)
        mu, sigma = summarize(values)
        oracle_mu = math.fsum(values) / len(values)
        oracle_sigma = math.sqrt(math.fsum((v - oracle_mu) ** 2 for v in values) / (len(values) - 1))
        assert mu == pytest.approx(oracle_mu, rel=1e-12)
        assert sigma == pytest.approx(oracle_sigma, rel=1e-12)

    def test_oracle_agreement_on_random_lists(self):
        rng = np.random.default_rng(32)
        for _ in range(50):
            values = rng.normal(scale=10.0 ** rng.integers(-3, 4), size=rng.integers(2, 200))
            mu, sigma = summarize(values)
            oracle_mu = math.fsum(values) / len(values)
            oracle_var = math.fsum((v - oracle_mu) ** 2 for v in values) / (len(values) - 1)
            assert mu == pytest.approx(oracle_mu, rel=1e-12, abs=1e-15)
            assert sigma == pytest.approx(math.sqrt(oracle_var), rel=1e-12, abs=1e-15)


class TestRunExperiment:
    def test_single_run_statistics(self):
        result = run_experiment(small_spec(runs=1))
        assert result.mu == result.finals[0]
        assert result.sigma == 0.0

    def test_deterministic(self):
        a = run_experiment(small_spec(runs=4))
        b = run_experiment(small_spec(runs=4))
        assert a.finals == b.finals
        assert a.eval_totals == b.eval_totals
        assert a.traces == b.traces

    def test_run_isolation_by_seed(self):
        # run i of the experiment is reproducible alone via base_seed + i
        spec = small_spec(runs=4)
        result = run_experiment(spec)
        record = single_run(spec, 2)
        assert record.final_true_fitness == result.finals[2]
        assert record.seed == spec.base_seed + 2

    def test_parallel_matches_serial(self):
        spec = small_spec(runs=4)
        serial = run_experiment(spec, n_jobs=1)
        parallel = run_experiment(spec, n_jobs=2)
        assert serial.finals == parallel.finals
        assert serial.traces == parallel.traces

    def test_every_method_runs(self):
        for method in METHODS:
            result = run_experiment(small_spec(method=method, runs=2))
            assert len(result.finals) == 2
            assert all(np.isfinite(result.finals))

    def test_unknown_ids_rejected(self):
        with pytest.raises(ValueError):
            build_spec("nope", "sphere", 3)
        with pytest.raises(ValueError):
            build_spec("bpso", "ackley", 3)


class TestDownsample:
    def test_short_trace_unchanged(self):
        trace = [(i, float(10 - i), 2 * i) for i in range(1, 11)]
        assert downsample_trace(trace) == trace

    def test_long_trace_capped_and_keeps_last(self):
        trace = [(i, float(i), i) for i in range(1, 5001)]
        rows = downsample_trace(trace, max_rows=1000)
        assert len(rows) <= 1001
        assert rows[-1] == trace[-1]
        iters = [r[0] for r in rows]
        assert iters == sorted(iters)


class TestExport:
    def test_summary_header_and_determinism(self):
        result = run_experiment(small_spec(runs=2))
        a, b = io.StringIO(), io.StringIO()
        export_results(result, "csv", a)
        export_results(result, "csv", b)
        assert a.getvalue() == b.getvalue()
        lines = a.getvalue().splitlines()
        assert lines[0] == SUMMARY_HEADER
        row = lines[1].split(",")
        assert row[0] == "bpso"
        assert row[1] == "sphere"
        assert row[2] == "3"
        assert int(row[4]) == 2
        assert lines[-1].startswith("# config ")

    def test_config_embedded_and_parseable(self):
        result = run_experiment(small_spec(runs=2))
        sink = io.StringIO()
        export_results(result, "csv", sink)
        comment = [l for l in sink.getvalue().splitlines() if l.startswith("# config")][0]
        cfg = json.loads(comment.split(": ", 1)[1])
        assert cfg["base_seed"] == 5
        assert cfg["pso"]["swarm_size"] == 6

    def test_json_mirrors_summary_fields(self):
        result = run_experiment(small_spec(runs=2))
        sink = io.StringIO()
        export_results(result, "json", sink)
        payload = json.loads(sink.getvalue())
        assert len(payload) == 1
        entry = payload[0]
        assert entry["mu"] == result.mu
        assert entry["sigma"] == result.sigma
        assert entry["finals"] == result.finals
        assert entry["config"]["method"] == "bpso"

    def test_trace_csv_rows_increase(self):
        result = run_experiment(small_spec(runs=2))
        sink = io.StringIO()
        write_trace_csv(result.traces, sink)
        lines = sink.getvalue().splitlines()
        assert lines[0] == TRACE_HEADER
        per_run: dict[int, list[int]] = {}
        for line in lines[1:]:
            if line.startswith("#"):
                continue
            run, iteration, _, evals = line.split(",")
            per_run.setdefault(int(run), []).append((int(iteration), int(evals)))
        for rows in per_run.values():
            iters = [r[0] for r in rows]
            evals = [r[1] for r in rows]
            assert iters == sorted(iters) and len(set(iters)) == len(iters)
            assert evals == sorted(evals) and len(set(evals)) == len(evals)

    def test_bad_format_rejected(self):
        result = run_experiment(small_spec(runs=1))
        with pytest.raises(ValueError):
            export_results(result, "xml", io.StringIO())

    def test_io_error_includes_destination(self):
        result = run_experiment(small_spec(runs=1))
        with pytest.raises(OSError, match="no/such/dir"):
            export_results(result, "csv", "no/such/dir/out.csv")

    def test_file_round_trip(self, tmp_path):
        result = run_experiment(small_spec(runs=2))
        path = tmp_path / "summary.csv"
        export_results(result, "csv", path)
        export_results(result, "csv", tmp_path / "summary2.csv")
        assert path.read_bytes() == (tmp_path / "summary2.csv").read_bytes()


class TestBuildSpec:
    def test_chi_methods_get_constriction(self):
        from swarm_spsa.swarm import Constriction, LinearInertia
        assert isinstance(build_spec("bpso-chi", "sphere", 3).pso.inertia, Constriction)
        assert isinstance(build_spec("bpso", "sphere", 3).pso.inertia, LinearInertia)

    def test_omega_override_switches_to_fixed(self):
        from swarm_spsa.swarm import FixedInertia
        spec = build_spec("bpso", "sphere", 3, overrides={"omega": 0.7})
        assert spec.pso.inertia == FixedInertia(0.7)

    def test_function_tuning_applied(self):
        from swarm_spsa.defaults import SPSA_TUNING
        spec = build_spec("spsa-pso-2", "rastrigin", 3)
        assert (spec.spsa.a, spec.spsa.c) == SPSA_TUNING["rastrigin"]

    def test_explicit_gains_override_tuning(self):
        spec = build_spec("spsa-pso-2", "rastrigin", 3, overrides={"a": 9.0, "c": 0.25})
        assert (spec.spsa.a, spec.spsa.c) == (9.0, 0.25)

    def test_spsa_steps_follow_max_iter(self):
        spec = build_spec("spsa", "sphere", 3, overrides={"max_iter": 123})
        assert spec.spsa.steps == 123
