import json

import numpy as np
import pytest

from pbgspec import cli
from pbgspec.config import RunConfig, load_config, parse_config
from pbgspec.errors import ParseError, ValidationError
from pbgspec.presets import figure_config, figure_configs
from pbgspec.reservoir import Variant
from pbgspec.spectra import Normalization, Scheme


def _write(tmp_path, data, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return path


FIG2_DOTTED = {"scheme": "lambda", "model": "isotropic_edge", "g": 1, "gamma": 1, "delta_g": 0}


class TestConfig:
    def test_defaults(self, tmp_path):
        cfg = load_config(_write(tmp_path, FIG2_DOTTED))
        assert cfg.emitter.scheme is Scheme.LAMBDA
        assert cfg.emitter.model.variant is Variant.ISOTROPIC_EDGE
        assert (cfg.grid.min, cfg.grid.max, cfg.grid.n) == (-6.0, 6.0, 4001)
        assert cfg.normalization is Normalization.RAW

    def test_345_state(self, tmp_path):
        data = {"scheme": "driven", "model": "isotropic_edge", "omega": 1, "delta": -1.5,
                "b2_0": 0.6, "b3_0": 0.8}
        cfg = load_config(_write(tmp_path, data))
        assert cfg.emitter.b2_0 ** 2 + cfg.emitter.b3_0 ** 2 == pytest.approx(1.0)

    @pytest.mark.parametrize("patch, field", [
        ({"model": "smoothed_edge", "epsilon": -0.1}, "epsilon"),
        ({"colour": "red"}, "colour"),
        ({"gamma": 0}, "gamma"),
        ({"grid_n": 1}, "grid_n"),
        ({"grid_n": 10.5}, "grid_n"),
        ({"omega": 1.0}, "omega"),
        ({"g": "one"}, "g"),
        ({"normalization": "area"}, "normalization"),
        ({"dt": 0}, "dt"),
        ({"scheme": "vee"}, "scheme"),
    ])
    def test_invalid(self, tmp_path, patch, field):
        with pytest.raises(ValidationError) as err:
            load_config(_write(tmp_path, dict(FIG2_DOTTED, **patch)))
        assert err.value.field == field

    @pytest.mark.parametrize("text", ["{bad", "[1, 2]"])
    def test_malformed(self, tmp_path, text):
        with pytest.raises(ParseError):
            load_config(_write(tmp_path, text))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_config(tmp_path / "nope.json")

    @pytest.mark.parametrize("fig_id", range(2, 10))
    def test_dump_roundtrip(self, fig_id):
        for _, emitter in figure_configs(fig_id):
            cfg = RunConfig(emitter, output="x.csv")
            again = parse_config(json.loads(cfg.dumps()))
            assert again == cfg


class TestPresets:
    def test_captions(self):
        f5 = figure_config(5, "full")
        assert f5.model.variant is Variant.LORENTZIAN_DEFECT
        assert (f5.model.delta_g, f5.model.delta_c, f5.model.gamma_c) == (-1.0, -2.0, 1.0)
        f8 = figure_config(8, "dashed")
        assert (f8.omega, f8.delta, f8.b2_0, f8.model.delta_c) == (1.0, -1.5, 1.0, -2.5)
        assert figure_config(3, "dotted").model.epsilon == 0.3

    def test_unknown(self):
        with pytest.raises(ValidationError):
            figure_config(10, "dotted")
        with pytest.raises(ValidationError):
            figure_config(2, "dashdot")


class TestCommands:
    def test_spectrum_csv(self, tmp_path):
        cfg = load_config(_write(tmp_path, dict(FIG2_DOTTED, grid_n=5)))
        summary = cli.cmd_spectrum(cfg, tmp_path / "s.csv")
        raw = (tmp_path / "s.csv").read_bytes()
        assert b"\r" not in raw
        lines = raw.decode().splitlines()
        assert lines[0] == "delta_lambda,S" and len(lines) == 6
        assert lines[3] == "0,0"
        assert summary["peaks"] == 2 and summary["zeros"] == [0.0]
        assert json.loads((tmp_path / "s.json").read_text())["zeros"] == [0.0]

    def test_peak_normalization(self, tmp_path):
        cfg = load_config(_write(tmp_path, dict(FIG2_DOTTED, grid_n=101, normalization="peak")))
        cli.cmd_spectrum(cfg, tmp_path / "p.csv")
        values = np.loadtxt(tmp_path / "p.csv", delimiter=",", skiprows=1)[:, 1]
        assert values.max() == 1.0

    def test_figure_2(self, tmp_path):
        summary = cli.cmd_figure(2, tmp_path)
        for curve, dg in (("dotted", 0.0), ("dashed", 1.0), ("full", -1.0)):
            rec = summary["curves"][curve]
            assert rec["peaks"] == 2 and rec["zeros"] == [pytest.approx(dg, abs=1e-6)]
            assert (tmp_path / f"fig2_{curve}.csv").exists()
        assert "runtime_ms" not in json.loads((tmp_path / "fig2_summary.json").read_text())

    def test_figure_reload(self, tmp_path):
        cli.cmd_figure(7, tmp_path)
        cfg = load_config(tmp_path / "fig7_full.json")
        cli.cmd_spectrum(cfg, tmp_path / "again.csv")
        assert (tmp_path / "again.csv").read_bytes() == (tmp_path / "fig7_full.csv").read_bytes()

    def test_oracle_short(self, tmp_path):
        data = dict(FIG2_DOTTED, grid_n=121, t_max=60, dt=0.02, delta_g=1.0)
        summary = cli.cmd_oracle(load_config(_write(tmp_path, data)), tmp_path / "o.csv")
        assert summary["max_rel_err"] < 0.05 and summary["warnings"] == []

    def test_darklines(self, tmp_path):
        data = {"scheme": "driven", "model": "delta_defect", "g1": 1, "delta_c": -2.5, "omega": 1,
                "delta": -1.5}
        summary = cli.cmd_darklines(load_config(_write(tmp_path, data)))
        assert [d["position"] for d in summary["predicted"]] == [0.0, -2.5, -1.5]
        assert summary["zeros"] == [-2.5, -1.5, 0.0]


class TestMain:
    def test_exit_codes(self, tmp_path, capsys):
        bad = _write(tmp_path, dict(FIG2_DOTTED, model="smoothed_edge", epsilon=-1))
        assert cli.main(["spectrum", "--config", str(bad), "--out", str(tmp_path / "x.csv")]) == 3
        assert "epsilon" in capsys.readouterr().err
        assert cli.main(["darklines", "--config", str(tmp_path / "missing.json")]) == 2
        assert cli.main(["spectrum", "--config", str(_write(tmp_path, FIG2_DOTTED))]) == 3

    def test_output_from_config(self, tmp_path, capsys):
        path = _write(tmp_path, dict(FIG2_DOTTED, grid_n=11, output="sub/out.csv"))
        assert cli.main(["spectrum", "--config", str(path), "--normalize", "peak"]) == 0
        assert json.loads(capsys.readouterr().out)["normalization"] == "peak"
        assert (tmp_path / "sub" / "out.csv").exists()

    def test_figure_argument_range(self):
        with pytest.raises(SystemExit):
            cli.main(["figure", "--id", "11", "--outdir", "x"])

    def test_atomic_write_leaves_no_temp(self, tmp_path):
        cli.write_atomic(tmp_path / "a.txt", "x\n")
        assert [p.name for p in tmp_path.iterdir()] == ["a.txt"]
