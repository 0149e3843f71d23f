import numpy as np
import pytest

from tdbounds import (
    ValidationError,
    derive_stream,
    parse_power_config,
    parse_timing_config,
    run_power_experiment,
    run_timing_experiment,
    simulate_study,
    write_power_csv,
    write_timing_csv,
)
from tdbounds.experiments import POWER_METHODS, PowerScenario, TimingScenario

from oracles import splitmix_reference


class TestSimulateStudy:
    def test_planted_block_scaled(self):
        st = simulate_study(20, 10, 0.1, derive_stream(1, 0))
        assert st.m == 20
        assert st.labels[:2] == ("h1", "h2")
        # planted p-values are uniforms times 0.1/20
        assert np.all(st.pvalues[:10] <= 0.005)
        assert np.any(st.pvalues[10:] > 0.005)

    def test_matches_reference_stream(self):
        u = np.asarray(splitmix_reference(7, 3, 15))
        st = simulate_study(15, 4, 0.5, derive_stream(7, 3))
        np.testing.assert_array_equal(st.pvalues[4:], u[4:])
        np.testing.assert_array_equal(st.pvalues[:4], u[:4] * (0.5 / 15))

    def test_same_stream_same_study(self):
        a = simulate_study(30, 5, 0.2, derive_stream(2, 9))
        b = simulate_study(30, 5, 0.2, derive_stream(2, 9))
        assert a == b

    def test_zero_false_is_raw_uniforms(self):
        st = simulate_study(12, 0, 0.1, derive_stream(3, 0))
        np.testing.assert_array_equal(
            st.pvalues, np.asarray(splitmix_reference(3, 0, 12))
        )

    def test_validation(self):
        s = derive_stream(1, 0)
        with pytest.raises(ValidationError, match="n_false"):
            simulate_study(5, 6, 0.1, s)
        with pytest.raises(ValidationError, match="n_false"):
            simulate_study(5, -1, 0.1, s)
        with pytest.raises(ValidationError, match="signal_scale"):
            simulate_study(5, 1, 0.0, s)
        with pytest.raises(ValidationError, match="signal_scale"):
            simulate_study(5, 1, 1.5, s)
        with pytest.raises(ValidationError, match="m"):
            simulate_study(0, 0, 0.1, s)


class TestScenarioValidation:
    def test_power_defaults(self):
        sc = PowerScenario()
        assert sc.m_grid == (20, 50, 100, 200, 500, 1000)
        assert sc.n_false == 10 and sc.reps == 500

    def test_n_false_must_fit_smallest_m(self):
        with pytest.raises(ValidationError, match="smallest grid size"):
            PowerScenario(m_grid=(5, 100), n_false=10)

    def test_power_field_checks(self):
        with pytest.raises(ValidationError, match="reps"):
            PowerScenario(reps=0)
        with pytest.raises(ValidationError, match="alpha"):
            PowerScenario(alpha=0.0)
        with pytest.raises(ValidationError, match="m_grid"):
            PowerScenario(m_grid=(0,), n_false=0)

    def test_timing_defaults(self):
        sc = TimingScenario()
        assert sc.closure_m_grid == tuple(range(2, 13))
        assert sc.runs == 3
        assert sc.local_tests == ("simes", "fisher")

    def test_timing_field_checks(self):
        with pytest.raises(ValidationError, match="runs"):
            TimingScenario(runs=2)
        with pytest.raises(ValidationError, match="closure_m_grid"):
            TimingScenario(closure_m_grid=(30,))
        with pytest.raises(ValidationError, match="local test"):
            TimingScenario(local_tests=("simes", "stouffer"))
        with pytest.raises(ValidationError, match="local_tests"):
            TimingScenario(local_tests=())
        with pytest.raises(ValidationError, match="local_tests"):
            TimingScenario(local_tests=("simes", "simes"))


class TestPowerExperiment:
    def test_small_run_shape_and_determinism(self):
        sc = PowerScenario(m_grid=(20, 40), n_false=3, reps=5, seed=11)
        rows = run_power_experiment(sc)
        assert [(r.m, r.method) for r in rows] == [
            (20, "closed_testing"),
            (20, "mr_envelope"),
            (40, "closed_testing"),
            (40, "mr_envelope"),
        ]
        again = run_power_experiment(sc)
        assert rows == again

    def test_methods_paired_on_same_studies(self):
        # replicate r of cell g uses stream (g << 32) | r; reproduce one
        # cell by hand and check the closed-testing mean
        from tdbounds import AnalysisConfig, preprocess, shortcut_bound

        sc = PowerScenario(m_grid=(25,), n_false=4, reps=3, seed=5)
        rows = run_power_experiment(sc)
        ct_row = next(r for r in rows if r.method == "closed_testing")
        bounds = []
        for r in range(3):
            study = simulate_study(25, 4, 0.1, derive_stream(5, r))
            state = preprocess(study, AnalysisConfig(alpha=0.05))
            bounds.append(shortcut_bound(state, study.full_set()).d)
        assert ct_row.mean_bound == pytest.approx(np.mean(bounds))

    def test_single_rep_zero_se(self):
        sc = PowerScenario(m_grid=(20,), n_false=2, reps=1)
        rows = run_power_experiment(sc)
        assert all(r.se == 0.0 for r in rows)

    def test_cache_dir_reused(self, tmp_path):
        sc = PowerScenario(m_grid=(20,), n_false=2, reps=2)
        rows = run_power_experiment(sc, cache_dir=tmp_path)
        assert (tmp_path / "lambda_m20.txt").exists()
        assert run_power_experiment(sc, cache_dir=tmp_path) == rows

    def test_methods_constant(self):
        assert POWER_METHODS == ("closed_testing", "mr_envelope")


class TestTimingExperiment:
    def test_row_structure(self):
        sc = TimingScenario(
            closure_m_grid=(2, 3), shortcut_m_grid=(5000,), local_tests=("simes",)
        )
        rows = run_timing_experiment(sc)
        assert [(r.method, r.local_test, r.m) for r in rows] == [
            ("closure", "simes", 2),
            ("closure", "simes", 3),
            ("shortcut", "simes", 5000),
        ]
        assert all(r.seconds > 0 for r in rows)

    def test_both_tests_timed(self):
        sc = TimingScenario(closure_m_grid=(3,), shortcut_m_grid=(2000,))
        rows = run_timing_experiment(sc)
        assert {(r.method, r.local_test) for r in rows} == {
            ("closure", "simes"),
            ("closure", "fisher"),
            ("shortcut", "simes"),
        }


class TestCsvOutput:
    def test_power_csv_layout(self, tmp_path):
        sc = PowerScenario(m_grid=(20,), n_false=2, reps=2, seed=3)
        rows = run_power_experiment(sc)
        path = tmp_path / "power.csv"
        write_power_csv(rows, sc, path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# power m_grid=20 n_false=2")
        assert "reps=2" in lines[0] and "seed=3" in lines[0]
        assert lines[1] == "m,method,mean_bound,se,reps,alpha,seed"
        assert len(lines) == 2 + len(rows)
        first = lines[2].split(",")
        assert first[0] == "20" and first[1] == "closed_testing"
        assert first[4:] == ["2", "0.050000000000000003", "3"]

    def test_power_csv_byte_identical(self, tmp_path):
        sc = PowerScenario(m_grid=(20, 30), n_false=2, reps=3)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_power_csv(run_power_experiment(sc), sc, a)
        write_power_csv(run_power_experiment(sc), sc, b)
        assert a.read_bytes() == b.read_bytes()

    def test_timing_csv_layout(self, tmp_path):
        sc = TimingScenario(
            closure_m_grid=(2,), shortcut_m_grid=(2000,), local_tests=("simes",)
        )
        rows = run_timing_experiment(sc)
        path = tmp_path / "timing.csv"
        write_timing_csv(rows, sc, path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# timing closure_m_grid=2 shortcut_m_grid=2000")
        assert lines[1] == "method,local_test,m,seconds"
        assert len(lines) == 2 + len(rows)
        assert lines[2].startswith("closure,simes,2,")


class TestConfigParsing:
    def test_power_round_trip(self):
        sc = parse_power_config(
            "# comment\nm_grid = 20, 50\nn_false=4\nreps=10\nalpha=0.1\nseed=9\n"
            "signal_scale=0.25\n"
        )
        assert sc == PowerScenario(
            m_grid=(20, 50), n_false=4, reps=10, alpha=0.1, seed=9, signal_scale=0.25
        )

    def test_power_defaults_when_empty(self):
        assert parse_power_config("") == PowerScenario()

    def test_timing_round_trip(self):
        sc = parse_timing_config(
            "closure_m_grid=2,3,4\nshortcut_m_grid=1000\nlocal_tests=simes\nruns=4\n"
        )
        assert sc == TimingScenario(
            closure_m_grid=(2, 3, 4), shortcut_m_grid=(1000,), local_tests=("simes",), runs=4
        )

    def test_unknown_key_named_in_error(self):
        with pytest.raises(ValidationError, match="unknown power config key 'foo'"):
            parse_power_config("foo=1\n")
        with pytest.raises(ValidationError, match="unknown timing config key 'bar'"):
            parse_timing_config("bar=1\n")

    def test_malformed_line_numbered(self):
        with pytest.raises(ValidationError, match="line 2"):
            parse_power_config("reps=10\nnot a pair\n")

    def test_bad_number_named(self):
        with pytest.raises(ValidationError, match="reps must be an integer"):
            parse_power_config("reps=ten\n")
        with pytest.raises(ValidationError, match="alpha must be a number"):
            parse_power_config("alpha=a\n")
