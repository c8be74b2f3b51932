import json
import os

import numpy as np
import pytest

from coulombflow.cli import main
from coulombflow.csvio import read_csv, write_csv
from coulombflow.config import ConfigError, load_config


def write_config(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


SIM_DOC = {
    "grid": {"dim": 1, "n": 64},
    "solver": {
        "m": 1.0,
        "epsilon": "auto",
        "t_end": 0.5,
        "output_times": [0.1, 0.2, 0.3, 0.4, 0.5],
    },
    "initial_condition": {"kind": "cosine", "base": 1.0, "amplitudes": [0.5]},
    "outputs": {"formats": ["csv", "svg"]},
}


class TestConfigValidation:
    def test_unknown_section_rejected(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", {**SIM_DOC, "extra": {}})
        with pytest.raises(ConfigError, match="extra"):
            load_config(cfg)

    def test_unknown_key_named(self, tmp_path):
        doc = json.loads(json.dumps(SIM_DOC))
        doc["solver"]["viscosity"] = 1.0
        cfg = write_config(tmp_path / "c.json", doc)
        with pytest.raises(ConfigError, match="solver.'viscosity'|viscosity"):
            load_config(cfg)

    def test_floor_required_for_fast_diffusion(self, tmp_path):
        doc = json.loads(json.dumps(SIM_DOC))
        doc["solver"]["m"] = 0.5
        cfg = write_config(tmp_path / "c.json", doc)
        with pytest.raises(ConfigError, match="floor_m_lt_1"):
            load_config(cfg)

    def test_bad_json_is_config_error(self, tmp_path):
        p = tmp_path / "broken.json"
        p.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(str(p))

    def test_cli_exit_2_on_bad_config(self, tmp_path):
        doc = json.loads(json.dumps(SIM_DOC))
        doc["grid"]["dim"] = 3
        cfg = write_config(tmp_path / "c.json", doc)
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


class TestSimulate:
    def test_artifacts_and_schema(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", SIM_DOC)
        out = tmp_path / "out"
        assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
        names = sorted(os.listdir(out))
        assert "observables.csv" in names
        assert "support.csv" in names
        assert "run_meta.json" in names
        assert "observables.svg" in names
        snapshots = [n for n in names if n.startswith("u_")]
        assert len(snapshots) == 6  # t = 0 plus five requested times
        header, cols = read_csv(out / "observables.csv")
        assert header == [
            "t", "mass", "min", "max", "l1", "l2", "linf",
            "energy", "dissipation", "grad_sup",
        ]
        assert np.max(np.abs(cols["mass"] - cols["mass"][0])) <= 1e-11
        kheader, kcols = read_csv(out / "k_0.100000.csv")
        assert kheader == ["s", "u_star", "k"]
        assert np.all(np.diff(kcols["u_star"]) <= 1e-12)

    def test_constant_config_constant_columns(self, tmp_path):
        doc = json.loads(json.dumps(SIM_DOC))
        doc["initial_condition"] = {"kind": "constant", "value": 1.5}
        cfg = write_config(tmp_path / "c.json", doc)
        out = tmp_path / "out"
        assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
        _, cols = read_csv(out / "observables.csv")
        for name in ("mass", "min", "max", "l1"):
            assert np.max(np.abs(cols[name] - 1.5)) < 1e-12

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_config(tmp_path / "c.json", SIM_DOC)
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert main(["simulate", "--config", cfg, "--out", str(out1)]) == 0
        assert main(["simulate", "--config", cfg, "--out", str(out2)]) == 0
        for name in ("observables.csv", "support.csv", "u_0.500000.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_from_file_roundtrip(self, tmp_path):
        vals = np.abs(np.sin(np.arange(64)) + 1.1)
        src = tmp_path / "ic.csv"
        np.savetxt(src, vals, delimiter=",")
        doc = json.loads(json.dumps(SIM_DOC))
        doc["initial_condition"] = {"kind": "from_file", "path": str(src)}
        cfg = write_config(tmp_path / "c.json", doc)
        out = tmp_path / "out"
        assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
        _, cols = read_csv(out / "u_0.000000.csv")
        assert cols["value"] == pytest.approx(vals)

    def test_wrong_file_length_rejected(self, tmp_path):
        src = tmp_path / "ic.csv"
        np.savetxt(src, np.ones(10), delimiter=",")
        doc = json.loads(json.dumps(SIM_DOC))
        doc["initial_condition"] = {"kind": "from_file", "path": str(src)}
        cfg = write_config(tmp_path / "c.json", doc)
        assert main(["simulate", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


class TestFronts:
    def test_single_m1_matches_exponential(self, tmp_path):
        doc = {
            "fronts": {"mode": "single", "m": 1.0, "ubar": 1.0, "s1": 0.25, "s2": 0.75, "t_end": 1.0},
            "outputs": {"formats": ["csv"]},
        }
        cfg = write_config(tmp_path / "c.json", doc)
        out = tmp_path / "out"
        assert main(["fronts", "--mode", "single", "--config", cfg, "--out", str(out)]) == 0
        _, cols = read_csv(out / "fronts.csv")
        assert cols["s1"] == pytest.approx(0.25 * np.exp(-cols["t"]), abs=1e-8)
        assert cols["s2"] == pytest.approx(1 - 0.25 * np.exp(-cols["t"]), abs=1e-8)

    def test_double_frozen_endpoints(self, tmp_path):
        doc = {
            "fronts": {
                "mode": "double", "m": 2.0, "ubar": 1.0, "alpha": 0.5,
                "s1": 0.0, "s2": 0.3, "s3": 0.7, "s4": 1.0, "t_end": 0.5,
            },
            "outputs": {"formats": ["csv"]},
        }
        cfg = write_config(tmp_path / "c.json", doc)
        out = tmp_path / "out"
        assert main(["fronts", "--mode", "double", "--config", cfg, "--out", str(out)]) == 0
        _, cols = read_csv(out / "fronts.csv")
        assert np.max(np.abs(cols["s1"])) == 0.0
        assert np.max(np.abs(cols["s4"] - 1.0)) == 0.0

    def test_super_hypothesis_violation_exit_2(self, tmp_path, capsys):
        doc = {
            "fronts": {
                "mode": "super", "m": 2.0, "ubar": 1.0, "C": 1.5, "alpha": 0.8,
                "s2": 0.35, "s3": 0.48, "t_end": 0.5,
            },
            "outputs": {"formats": ["csv"]},
        }
        cfg = write_config(tmp_path / "c.json", doc)
        assert main(["fronts", "--mode", "super", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
        err = capsys.readouterr().err
        assert "C * ubar" in err


class TestVerifyCommand:
    def test_negative_control_exit_1(self, tmp_path):
        doc = {"verify": {"suite": "negative-control"}, "outputs": {}}
        cfg = write_config(tmp_path / "c.json", doc)
        out = tmp_path / "out"
        assert main(["verify", "--config", cfg, "--out", str(out)]) == 1
        report = json.loads((out / "report.json").read_text())
        assert report["summary"]["fail"] >= 1

    def test_empty_suite_exit_0_with_warning(self, tmp_path, capsys):
        doc = {"verify": {"suite": "empty"}, "outputs": {}}
        cfg = write_config(tmp_path / "c.json", doc)
        out = tmp_path / "out"
        assert main(["verify", "--config", cfg, "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["summary"]["total"] == 0
        assert report["warnings"]
        assert "zero checks" in capsys.readouterr().err

    def test_unknown_suite_exit_2(self, tmp_path):
        doc = {"verify": {"suite": "no-such-suite"}, "outputs": {}}
        cfg = write_config(tmp_path / "c.json", doc)
        assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 2


class TestPlot:
    def test_plot_from_csv(self, tmp_path):
        src = tmp_path / "data.csv"
        t = np.linspace(0, 1, 20)
        write_csv(src, ["t", "a", "b"], [t, np.exp(-t), np.cos(t)])
        out = tmp_path / "plot.svg"
        assert main(["plot", "--in", str(src), "--out", str(out), "--x", "t", "--y", "a,b"]) == 0
        body = out.read_text()
        assert body.startswith("<svg")
        assert body.count("<polyline") == 2

    def test_empty_csv_exit_2(self, tmp_path):
        src = tmp_path / "empty.csv"
        src.write_text("")
        assert main(["plot", "--in", str(src), "--out", str(tmp_path / "p.svg"), "--x", "t", "--y", "a"]) == 2

    def test_missing_column_exit_2(self, tmp_path):
        src = tmp_path / "d.csv"
        write_csv(src, ["t", "a"], [np.arange(3.0), np.arange(3.0)])
        assert main(["plot", "--in", str(src), "--out", str(tmp_path / "p.svg"), "--x", "t", "--y", "zz"]) == 2


class TestCsvRoundTrip:
    def test_seventeen_digit_roundtrip(self, tmp_path):
        rng = np.random.default_rng(7)
        vals = rng.uniform(-1, 1, 50) * 10.0 ** rng.integers(-8, 8, 50)
        p = tmp_path / "rt.csv"
        write_csv(p, ["v"], [vals])
        _, cols = read_csv(p)
        assert np.array_equal(cols["v"], vals)


class TestEnvThreads:
    def test_threads_env_default(self, monkeypatch):
        from coulombflow.cli import _default_jobs

        monkeypatch.delenv("COULOMBFLOW_THREADS", raising=False)
        assert _default_jobs() == 1
        monkeypatch.setenv("COULOMBFLOW_THREADS", "3")
        assert _default_jobs() == 3
        monkeypatch.setenv("COULOMBFLOW_THREADS", "junk")
        assert _default_jobs() == 1
