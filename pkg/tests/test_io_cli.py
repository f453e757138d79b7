import math
import subprocess
import sys
from dataclasses import replace

import numpy as np
import pytest
import yaml

from fastlight.cli import main
from fastlight.config import ConfigError, config_to_dict, load_config, save_config
from fastlight.io import load_trace, read_table, write_table, write_trace
from fastlight.medium import intensity_gain
from fastlight.pulse import GridSpec, PulseSpec, SampledTrace, synthesize

from conftest import TWO_PI_MHZ


def write_yaml(path, data):
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    return path


def test_default_config_sign_mapping(default_config):
    gain = default_config.seed_channel.lines[0]
    assert default_config.medium.seed_lines[0].alpha_per_m == -175.0
    assert gain.strength == 175.0
    assert gain.hwhm == pytest.approx(20 * TWO_PI_MHZ)
    strengths = [ln.strength for ln in default_config.conjugate_channel.lines]
    assert strengths == [175.0, -95.0]


def test_config_round_trip(tmp_path, default_config):
    path = tmp_path / "cfg.yaml"
    save_config(default_config, path)
    again = load_config(path)
    assert again == default_config
    assert config_to_dict(again) == config_to_dict(default_config)
    # absorption-coefficient signs restored on serialization
    assert yaml.safe_load(path.read_text())["medium"]["seed_lines"][0]["alpha_per_m"] == -175.0


def test_zero_hwhm_rejected(tmp_path, default_config):
    data = config_to_dict(default_config)
    data["medium"]["seed_lines"][0]["gamma_mhz"] = 0.0
    with pytest.raises(ConfigError, match="hwhm must be positive"):
        load_config(write_yaml(tmp_path / "c.yaml", data))


@pytest.mark.parametrize(
    "mutate, match",
    [
        (lambda d: d["pulse"].update(colour="red"), "unknown key"),
        (lambda d: d.update(extra={}), "unknown section"),
        (lambda d: d.pop("grid"), "missing section"),
        (lambda d: d["medium"]["seed_lines"][0].pop("alpha_per_m"), "missing key 'alpha_per_m'"),
        (lambda d: d["medium"].update(length_m=-1.0), "length"),
        (lambda d: d["grid"].update(n_points=1000), "power of two"),
        (lambda d: d["geometry"].update(coupling="lots"), "geometry.coupling"),
        (lambda d: d["medium"]["conjugate_lines"][0].update(alpha_per_m=0.0), "zero-strength"),
    ],
)
def test_strict_validation(tmp_path, default_config, mutate, match):
    data = config_to_dict(default_config)
    mutate(data)
    with pytest.raises(ConfigError, match=match):
        load_config(write_yaml(tmp_path / "c.yaml", data))


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "nope.yaml")


def test_trace_round_trip(tmp_path):
    tr = synthesize(PulseSpec(200e-9, 1.0, 2e-6), GridSpec(4e-6, 4096))
    write_trace(tmp_path / "t.csv", tr)
    back = load_trace(tmp_path / "t.csv")
    assert np.array_equal(back.samples, tr.samples)
    assert back.t_start == tr.t_start
    assert back.dt == pytest.approx(tr.dt, rel=1e-12)


def test_jittered_trace_rejected(tmp_path):
    t = np.arange(64) * 1e-9
    t[10] += 1e-3 * 1e-9
    np.savetxt(tmp_path / "j.txt", np.column_stack([t, np.ones(64)]))
    with pytest.raises(ValueError, match="non-uniform time grid"):
        load_trace(tmp_path / "j.txt")


def test_short_trace_rejected(tmp_path):
    np.savetxt(tmp_path / "s.txt", np.column_stack([np.arange(10.0), np.ones(10)]))
    with pytest.raises(ValueError, match="need at least 16"):
        load_trace(tmp_path / "s.txt")


def test_table_round_trip_exact(tmp_path):
    rng = np.random.default_rng(0)
    vals = rng.standard_normal((5, 3)) * 10.0 ** rng.integers(-12, 12, (5, 3))
    write_table(tmp_path / "x.csv", ("a", "b", "c"), vals, {"note": 1.5})
    meta, cols, rows = read_table(tmp_path / "x.csv")
    assert cols == ["a", "b", "c"]
    assert meta == {"note": "1.5"}
    assert np.array_equal(np.array(rows, dtype=float), vals)


def test_cli_no_args(capsys):
    assert main([]) == 1
    assert "usage" in capsys.readouterr().err


def test_cli_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 1
    assert "usage" in capsys.readouterr().err


def test_cli_bad_config_exit_1(tmp_path, default_config):
    data = config_to_dict(default_config)
    data["medium"]["seed_lines"][0]["gamma_mhz"] = 0.0
    cfg = write_yaml(tmp_path / "c.yaml", data)
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "o.csv")]) == 1


def test_cli_wraparound_exit_2(tmp_path, default_config):
    cfg = replace(default_config, pulse=replace(default_config.pulse, center_ns=300.0))
    save_config(cfg, tmp_path / "c.yaml")
    assert main(["propagate", "--config", str(tmp_path / "c.yaml"), "--out", str(tmp_path / "o.csv")]) == 2


def test_cli_sweep_header_and_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--config", "default", "--out", str(a)]) == 0
    assert main(["sweep", "--config", "default", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    meta, cols, rows = read_table(a)
    assert float(meta["seed_conjugate_separation_hz"]) == 6e9
    assert len(rows) == 81


def test_cli_out_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("FASTLIGHT_OUT_DIR", str(tmp_path))
    assert main(["traces", "--config", "default", "--out", "fig2.csv", "--delta", "17"]) == 0
    meta, cols, rows = read_table(tmp_path / "fig2.csv")
    assert cols == ["time_s", "reference", "seed", "conjugate"]
    assert float(meta["scale_reference"]) == 1.0


def test_cli_propagate_and_search(tmp_path):
    assert main(["propagate", "--config", "default", "--out", str(tmp_path / "p.csv"), "--channel", "conjugate"]) == 0
    assert main(["search-max", "--config", "default", "--out", str(tmp_path / "s.csv"), "--cap", "0.01"]) == 0
    _, cols, rows = read_table(tmp_path / "s.csv")
    assert cols == ["distortion_cap", "delta_hz", "conjugate_advance_s"]
    assert float(rows[0][2]) > 0


def test_cli_analyze_identical(tmp_path):
    tr = synthesize(PulseSpec(200e-9, 1.0, 2e-6), GridSpec(4e-6, 4096))
    write_trace(tmp_path / "r.csv", tr)
    write_trace(tmp_path / "o.csv", tr)
    out = tmp_path / "m.csv"
    rc = main(["analyze", "--reference", str(tmp_path / "r.csv"), "--trace", str(tmp_path / "o.csv"), "--out", str(out)])
    assert rc == 0
    _, cols, rows = read_table(out)
    row = dict(zip(cols, rows[0]))
    assert float(row["peak_advance"]) == 0.0
    assert float(row["peak_advance_sigma"]) == 0.0


def test_cli_analyze_noisy_trace(tmp_path):
    rng = np.random.default_rng(4)
    grid = GridSpec(4e-6, 4096)
    ref = synthesize(PulseSpec(200e-9, 1.0, 2e-6), grid)
    out = synthesize(PulseSpec(200e-9, 0.5, 2e-6 - 30e-9), grid)
    for name, tr in (("r.csv", ref), ("o.csv", out)):
        write_trace(tmp_path / name, tr.with_samples(tr.samples + 2e-3 * rng.standard_normal(len(tr))))
    assert main(["analyze", "--reference", str(tmp_path / "r.csv"), "--trace", str(tmp_path / "o.csv"),
                 "--out", str(tmp_path / "m.csv")]) == 0
    _, cols, rows = read_table(tmp_path / "m.csv")
    row = dict(zip(cols, map(float, rows[0])))
    assert 0 < row["peak_advance_sigma"] < 10e-9
    assert abs(row["peak_advance"] - 30e-9) < 5 * row["peak_advance_sigma"] + 1e-9


def test_cli_fit_lineshape(tmp_path, default_config):
    ch = default_config.conjugate_channel
    f = np.linspace(-150e6, 150e6, 301)
    np.savetxt(tmp_path / "spec.txt", np.column_stack([f, intensity_gain(ch, 2 * np.pi * f)]),
               header="detuning_hz gain")
    out = tmp_path / "fit.csv"
    assert main(["fit-lineshape", "--input", str(tmp_path / "spec.txt"), "--out", str(out)]) == 0
    meta, cols, rows = read_table(out)
    assert meta["converged"] == "1"
    assert float(rows[0][1]) == pytest.approx(-175.0, rel=1e-8)
    assert float(rows[1][3]) == pytest.approx(23.0, rel=1e-8)


def test_cli_fit_power(tmp_path):
    p = np.array([0.1, 0.2, 0.5, 1.0])
    np.savetxt(tmp_path / "pw.txt", np.column_stack([p, 40e-9 - 6e-9 * np.log(p)]), delimiter=",")
    out = tmp_path / "pw.csv"
    assert main(["fit-power", "--input", str(tmp_path / "pw.txt"), "--out", str(out)]) == 0
    _, cols, rows = read_table(out)
    assert float(rows[0][1]) == pytest.approx(-6e-9, rel=1e-10)


def test_cli_fit_power_insufficient(tmp_path):
    np.savetxt(tmp_path / "pw.txt", [[1.0, 1e-9], [2.0, 2e-9]])
    assert main(["fit-power", "--input", str(tmp_path / "pw.txt"), "--out", str(tmp_path / "o.csv")]) == 1


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "fastlight"], capture_output=True, text=True)
    assert res.returncode == 1
    assert "usage" in res.stderr
