import json

import numpy as np
import pytest

from tickcast.cli import main
from tickcast.config import ConfigError, load_config, parse_synthetic
from tickcast.data import SyntheticSpec, gen_synthetic, load_ticks, write_ticks
from tickcast.engine import PipelineConfig, run
from tickcast.errors import BadSpec, EmptyFile, ParseError, UnsortedTimestamps
from tickcast.lob import WindowPlan
from tickcast.report import REPORT_COLUMNS, TRACE_COLUMNS, emit, read_trace

HEADER = "ts_ns,bid_px,ask_px,bid_sz,ask_sz\n"


def _write(tmp_path, body, name="t.csv"):
    p = tmp_path / name
    p.write_text(body)
    return p


class TestLoad:
    @pytest.mark.example
    def test_three_rows(self, tmp_path):
        p = _write(tmp_path, HEADER + "1,99.99,100.01,5,7\n2,100.0,100.02,1,1\n3,100.0,100.02,0,3\n")
        s = load_ticks(p)
        assert len(s) == 3
        assert s[0].ask_px == 100.01 and s[0].bid_vol == 5 and s[2].ask_vol == 3
        assert s.symbol == "t"

    @pytest.mark.example
    def test_negative_price_line(self, tmp_path):
        p = _write(tmp_path, HEADER + "1,99.99,100.01,5,7\n2,-1,100.02,1,1\n")
        with pytest.raises(ParseError) as exc:
            load_ticks(p)
        assert exc.value.line == 3

    @pytest.mark.example
    def test_empty(self, tmp_path):
        with pytest.raises(EmptyFile):
            load_ticks(_write(tmp_path, ""))
        with pytest.raises(EmptyFile):
            load_ticks(_write(tmp_path, HEADER, "h.csv"))

    @pytest.mark.parametrize("body,line", [
        ("1,1,2,3\n", 2),
        ("1,abc,2,3,4\n", 2),
        ("1,1,2,3,4\n2,1,nan,3,4\n", 3),
        ("1,1,2,-3,4\n", 2),
    ])
    def test_malformed(self, tmp_path, body, line):
        with pytest.raises(ParseError) as exc:
            load_ticks(_write(tmp_path, HEADER + body))
        assert exc.value.line == line

    def test_bad_header(self, tmp_path):
        with pytest.raises(ParseError) as exc:
            load_ticks(_write(tmp_path, "ts,bid,ask,bs,as\n1,1,2,3,4\n"))
        assert exc.value.line == 1

    def test_unsorted(self, tmp_path):
        with pytest.raises(UnsortedTimestamps):
            load_ticks(_write(tmp_path, HEADER + "5,1,2,3,4\n4,1,2,3,4\n"))

    def test_round_trip(self, tmp_path):
        s = gen_synthetic(SyntheticSpec(n_events=200, seed=4))
        write_ticks(s, tmp_path / "x.csv")
        back = load_ticks(tmp_path / "x.csv")
        for col in ("ts", "ask_px", "bid_px", "ask_vol", "bid_vol"):
            np.testing.assert_array_equal(getattr(back, col), getattr(s, col))


class TestSynthetic:
    @pytest.mark.example
    def test_deterministic(self):
        a, b = gen_synthetic(SyntheticSpec(n_events=600, seed=7)), gen_synthetic(SyntheticSpec(n_events=600, seed=7))
        np.testing.assert_array_equal(a.mid, b.mid)
        np.testing.assert_array_equal(a.ask_vol, b.ask_vol)
        np.testing.assert_array_equal(a.ts, b.ts)

    @pytest.mark.example
    def test_spread(self):
        s = gen_synthetic(SyntheticSpec(n_events=300, jitter_prob=0.0))
        np.testing.assert_allclose(s.ask_px - s.bid_px, 0.02, atol=1e-9)
        s = gen_synthetic(SyntheticSpec(n_events=300))
        ticks = (s.ask_px - s.bid_px) / 0.01
        np.testing.assert_allclose(ticks, np.round(ticks), atol=1e-6)
        assert set(np.round(ticks).astype(int)) == {2, 3}

    @pytest.mark.example
    def test_ar1_autocorrelation(self):
        m = gen_synthetic(SyntheticSpec(n_events=10000, seed=1)).mid
        x = m - m.mean()
        assert np.dot(x[1:], x[:-1]) / np.dot(x, x) == pytest.approx(0.95, abs=0.05)

    @pytest.mark.parametrize("model", ["random_walk", "ar1", "rbf_mixture"])
    def test_models(self, model):
        s = gen_synthetic(SyntheticSpec(model=model, n_events=500, seed=2))
        assert len(s) == 500 and np.all(s.bid_px > 0) and np.all(np.diff(s.ts) >= 0)
        assert s.n_crossed == 0

    def test_bad_spec(self):
        with pytest.raises(BadSpec):
            gen_synthetic(SyntheticSpec(phi=1.0))
        with pytest.raises(BadSpec):
            gen_synthetic(SyntheticSpec(model="garch"))
        with pytest.raises(BadSpec):
            gen_synthetic(SyntheticSpec(n_events=50), min_events=105)

    def test_spec_string(self):
        spec = parse_synthetic("rbf_mixture:n=1200,phi=0.9,sigma=0.02,seed=3")
        assert (spec.model, spec.n_events, spec.phi, spec.noise, spec.seed) == ("rbf_mixture", 1200, 0.9, 0.02, 3)
        with pytest.raises(ConfigError):
            parse_synthetic("ar1:nonsense=1")


class TestConfig:
    def test_defaults_match_pipeline(self):
        assert load_config(environ={}).pipeline() == PipelineConfig()

    def test_unknown_key(self, tmp_path):
        p = _write(tmp_path, "window = 50\nbogus = 1\n", "c.cfg")
        with pytest.raises(ConfigError, match="bogus"):
            load_config(p, environ={})

    def test_precedence(self, tmp_path):
        p = _write(tmp_path, "# comment\nseed = 3\nwindow = 60\n", "c.cfg")
        assert load_config(p, environ={})["seed"] == 3
        assert load_config(p, environ={"TICKCAST_SEED": "11"})["seed"] == 11
        cfg = load_config(p, {"seed": 12}, environ={"TICKCAST_SEED": "11"})
        assert cfg["seed"] == 12 and cfg.pipeline().window.window_len == 60

    def test_invalid_values(self):
        with pytest.raises(ConfigError):
            load_config(overrides={"window": "abc"}, environ={})
        with pytest.raises(ConfigError):
            load_config(overrides={"learning_rate": "0"}, environ={})
        with pytest.raises(ConfigError):
            load_config(overrides={"format_version": "2"}, environ={})


@pytest.fixture(scope="module")
def small_run():
    s = gen_synthetic(SyntheticSpec(n_events=250, seed=6))
    return run(s, PipelineConfig(window=WindowPlan(30)))


class TestEmit:
    def test_report_rows(self, small_run, tmp_path):
        paths = emit(small_run, tmp_path)
        lines = paths["report"].read_text().splitlines()
        assert lines[0] == ",".join(REPORT_COLUMNS)
        assert len(lines) == 11
        summary = json.loads(paths["summary"].read_text())
        trace_rows = paths["trace"].read_text().splitlines()
        assert len(trace_rows) - 1 == summary["n_predicted"] == len(small_run.trace)
        assert trace_rows[0] == ",".join(TRACE_COLUMNS)

    def test_byte_identical(self, tmp_path):
        s = gen_synthetic(SyntheticSpec(n_events=250, seed=6))
        cfg = PipelineConfig(window=WindowPlan(30))
        a, b = emit(run(s, cfg), tmp_path / "a", {"seed": 0}), emit(run(s, cfg), tmp_path / "b", {"seed": 0})
        for k in a:
            assert a[k].read_bytes() == b[k].read_bytes()

    def test_trace_round_trip(self, small_run, tmp_path):
        assert tuple(read_trace(emit(small_run, tmp_path)["trace"])) == small_run.trace

    def test_six_significant_digits(self, small_run, tmp_path):
        row = emit(small_run, tmp_path)["report"].read_text().splitlines()[1].split(",")
        for cell in row[2:]:
            assert len(cell.replace(".", "").replace("-", "").split("e")[0].lstrip("0")) <= 6


class TestCli:
    def test_run_synthetic(self, tmp_path, capsys):
        out = tmp_path / "o"
        code = main(["run", "--synthetic", "ar1:n=250,seed=2", "--window", "30", "--out", str(out), "--plot"])
        assert code == 0
        assert {p.name for p in out.iterdir()} == {"report.csv", "trace.csv", "summary.json", "forecast.svg"}
        assert "SELECTED" in capsys.readouterr().out
        summary = json.loads((out / "summary.json").read_text())
        assert summary["config"]["window"] == 30 and summary["n_events"] == 250

    def test_run_input_file(self, tmp_path):
        write_ticks(gen_synthetic(SyntheticSpec(n_events=200, seed=3)), tmp_path / "in.csv")
        assert main(["run", "--input", str(tmp_path / "in.csv"), "--window", "25", "--out", str(tmp_path / "o"),
                     "--set", "n_trees=10"]) == 0

    def test_errors_exit_2(self, tmp_path, capsys):
        assert main(["run", "--input", str(tmp_path / "missing.csv"), "--out", str(tmp_path)]) == 2
        assert main(["run", "--synthetic", "ar1:n=50", "--out", str(tmp_path)]) == 2
        assert main(["run", "--out", str(tmp_path)]) == 2
        assert main(["run", "--synthetic", "ar1", "--set", "nope=1"]) == 2
        assert "error" in capsys.readouterr().err

    def test_bench(self, capsys):
        assert main(["bench", "--steps", "5", "--feature-set", "simple", "--budget-ms", "1000"]) == 0
        assert "median_ms" in capsys.readouterr().out
