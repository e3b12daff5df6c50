import hashlib
import json
import math
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from squeezecav.errors import ConfigError, DatasetInvariantError
from squeezecav.scenario_runner import (
    FigureDataset,
    RunConfig,
    config_from_dict,
    emit_csv,
    parse_config,
    run_scenario,
)

REPO = Path(__file__).resolve().parent.parent


def read_csv(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    head = lines[0].split(",")
    rows = [[float(v) for v in line.split(",")] for line in lines[1:]]
    return head, np.asarray(rows)


def hash_dir(path):
    return {
        p.name: hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(Path(path).iterdir())
    }


class TestParseConfig:
    def test_defaults_applied(self):
        cfg = parse_config('{"mode":"steady","g_values":[0.8]}')
        assert cfg == RunConfig(mode="steady", g_values=(0.8,))
        assert cfg.dtau == 1e-3
        assert cfg.sample_every == 10
        assert cfg.fock_dim == 64

    def test_missing_g_values(self):
        with pytest.raises(ConfigError) as err:
            parse_config('{"mode":"evolve"}')
        assert err.value.key == "g_values"

    def test_threshold_sweep_config(self):
        cfg = parse_config(
            '{"mode":"threshold","g_values":[1,5,10,50,100],"delta_values":[0.1,0.2]}'
        )
        assert cfg.g_values == (1.0, 5.0, 10.0, 50.0, 100.0)
        assert cfg.delta_values == (0.1, 0.2)

    def test_unknown_key_named(self):
        with pytest.raises(ConfigError) as err:
            parse_config('{"mode":"steady","g_values":[0.1],"dt":0.1}')
        assert err.value.key == "dt"

    def test_invalid_json(self):
        with pytest.raises(ConfigError):
            parse_config("{not json")

    @pytest.mark.parametrize(
        "raw,key",
        [
            ({"mode": "explode"}, "mode"),
            ({"mode": "steady", "g_values": []}, "g_values"),
            ({"mode": "steady", "g_values": [-1.0]}, "g_values"),
            ({"mode": "steady", "g_values": [0.5], "dtau": 0}, "dtau"),
            ({"mode": "steady", "g_values": [0.5], "sample_every": 0}, "sample_every"),
            ({"mode": "steady", "g_values": [0.5], "fock_dim": 1}, "fock_dim"),
            ({"mode": "steady", "g_values": [0.5], "tau_end": -2}, "tau_end"),
            ({"mode": "evolve", "g_values": [0.5], "initial_state": [1, 2]}, "initial_state"),
            ({"mode": "threshold", "g_values": [2.0]}, "delta_values"),
            ({"mode": "steady", "g_values": [0.5], "output_dir": ""}, "output_dir"),
        ],
    )
    def test_rejections_name_the_key(self, raw, key):
        with pytest.raises(ConfigError) as err:
            config_from_dict(raw)
        assert err.value.key == key

    def test_tau_end_mode_defaults(self):
        assert parse_config('{"mode":"evolve","g_values":[1]}').resolved_tau_end() == 20.0
        assert parse_config('{"mode":"oracle-compare","g_values":[1]}').resolved_tau_end() == 5.0


class TestEmitCsv:
    def test_format(self, tmp_path):
        ds = FigureDataset(name="demo", columns={"tau": [0.0, 1.0], "x": [1.0 / 3.0, math.nan]})
        path = emit_csv(ds, tmp_path)
        text = path.read_text(encoding="utf-8")
        assert text.startswith("tau,x\n")
        assert "\r" not in text
        assert text.endswith("\n")
        row = text.splitlines()[1].split(",")
        # full double precision round-trips
        assert float(row[1]) == 1.0 / 3.0

    def test_empty_column_refused(self, tmp_path):
        with pytest.raises(DatasetInvariantError):
            emit_csv(FigureDataset(name="bad", columns={"x": []}), tmp_path)

    def test_ragged_refused(self, tmp_path):
        with pytest.raises(DatasetInvariantError):
            emit_csv(FigureDataset(name="bad", columns={"x": [1.0], "y": [1.0, 2.0]}), tmp_path)

    def test_no_columns_refused(self, tmp_path):
        with pytest.raises(DatasetInvariantError):
            emit_csv(FigureDataset(name="bad", columns={}), tmp_path)

    def test_byte_identical_rewrites(self, tmp_path):
        ds = FigureDataset(name="demo", columns={"x": np.linspace(0, 1, 7)})
        a = emit_csv(ds, tmp_path).read_bytes()
        b = emit_csv(ds, tmp_path).read_bytes()
        assert a == b


class TestEvolveMode:
    def test_dataset_schema_and_determinism(self, tmp_path):
        raw = {
            "mode": "evolve", "g_values": [0.5], "tau_end": 1.0,
            "dtau": 0.01, "sample_every": 5,
        }
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        run_scenario(config_from_dict({**raw, "output_dir": str(out_a)}))
        run_scenario(config_from_dict({**raw, "output_dir": str(out_b)}))
        head, rows = read_csv(out_a / "evolve_g0.5.csv")
        assert head == ["tau", "u", "n_th", "dx", "dy", "dxdy", "n_mean", "n_svs", "g2"]
        assert rows.shape == (21, 9)
        hashes_a, hashes_b = hash_dir(out_a), hash_dir(out_b)
        assert hashes_a == hashes_b
        assert set(hashes_a) == {"evolve_g0.5.csv", "manifest.json"}

    def test_manifest_contents(self, tmp_path):
        cfg = config_from_dict({
            "mode": "evolve", "g_values": [0.3], "tau_end": 0.5,
            "dtau": 0.01, "output_dir": str(tmp_path),
        })
        report = run_scenario(cfg)
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["mode"] == "evolve"
        assert manifest["files"] == ["evolve_g0.3.csv"]
        assert manifest["failures"] == []
        checks = manifest["invariant_checks"]["evolve g=0.3"]
        assert checks["positivity"] and checks["uncertainty_floor"]
        assert report.failures == []

    def test_weak_pumping_saturates_strong_grows(self, tmp_path):
        # qualitative figure-level invariant at tau_end = 50: sub-critical
        # curves flatten (the residual motion is the e^{-(1-g)tau} tail,
        # about 2e-5 at g = 0.8) while n_th keeps growing at g = 1.2
        cfg = config_from_dict({
            "mode": "evolve", "g_values": [0.8, 1.2], "tau_end": 50.0,
            "sample_every": 100, "output_dir": str(tmp_path),
        })
        run_scenario(cfg)
        _, weak = read_csv(tmp_path / "evolve_g0.8.csv")
        tail = int(0.9 * (len(weak) - 1))
        assert abs(weak[-1, 1] - weak[tail, 1]) < 1e-4   # u
        assert abs(weak[-1, 2] - weak[tail, 2]) < 1e-4   # n_th
        _, strong = read_csv(tmp_path / "evolve_g1.2.csv")
        assert np.all(np.diff(strong[:, 2]) > 0.0)
        assert strong[-1, 2] > 1.5 * strong[tail, 2]

    def test_custom_initial_state(self, tmp_path):
        cfg = config_from_dict({
            "mode": "evolve", "g_values": [0.0], "tau_end": 0.2, "dtau": 0.01,
            "initial_state": [0.4, 0.0, 0.1], "output_dir": str(tmp_path),
        })
        run_scenario(cfg)
        _, rows = read_csv(tmp_path / "evolve_g0.csv")
        assert rows[0, 1] == 0.4 and rows[0, 2] == 0.1
        assert rows[-1, 1] < 0.4  # pump off: squeezing decays


class TestSteadyMode:
    def test_table(self, tmp_path):
        cfg = config_from_dict({
            "mode": "steady", "g_values": [0.8, 0.0], "output_dir": str(tmp_path),
        })
        run_scenario(cfg)
        head, rows = read_csv(tmp_path / "steady.csv")
        assert head == ["g", "u_ss", "n_th_ss", "n_mean_ss", "dx_ss", "dy_ss", "product_ss", "g2_ss"]
        assert rows[0, 0] == 0.0  # sorted by g
        # unpumped row: vacuum state, unit noise, correlation undefined
        assert np.all(rows[0, 1:4] == 0.0)
        assert np.all(rows[0, 4:7] == 1.0)
        assert math.isnan(rows[0, 7])
        assert rows[1, 2] == pytest.approx(1.0 / 3.0, rel=1e-12)

    def test_supercritical_recorded_as_failure(self, tmp_path):
        cfg = config_from_dict({
            "mode": "steady", "g_values": [0.5, 1.5], "output_dir": str(tmp_path),
        })
        report = run_scenario(cfg)
        assert len(report.failures) == 1
        assert report.failures[0]["error"] == "NoSteadyStateError"
        _, rows = read_csv(tmp_path / "steady.csv")
        assert rows.shape[0] == 1  # the valid row still emitted
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["failures"][0]["unit"] == "steady g=1.5"


class TestThresholdMode:
    def test_table(self, tmp_path):
        cfg = config_from_dict({
            "mode": "threshold", "g_values": [5.0, 10.0], "delta_values": [0.2],
            "tau_end": 2.0, "output_dir": str(tmp_path),
        })
        run_scenario(cfg)
        head, rows = read_csv(tmp_path / "threshold.csv")
        assert head == ["g", "delta", "tau_star", "dx", "product", "g2"]
        assert rows.shape == (2, 6)
        for g, _, tau_star, dx, product, g2 in rows:
            assert dx == pytest.approx(1.2 / math.sqrt(1.0 + g), abs=1e-8)
            assert product >= 1.0
            assert g2 > 2.0
        assert rows[0, 2] > rows[1, 2]  # earlier threshold at stronger pump


class TestOracleCompareMode:
    def test_report_row(self, tmp_path):
        cfg = config_from_dict({
            "mode": "oracle-compare", "g_values": [0.5], "tau_end": 0.5,
            "sample_every": 50, "fock_dim": 16, "output_dir": str(tmp_path),
        })
        run_scenario(cfg)
        head, rows = read_csv(tmp_path / "oracle_compare.csv")
        assert head == ["g", "dx_dev", "dy_dev", "n_mean_dev", "g2_dev",
                        "trace_distance_max", "tau_compared"]
        assert rows[0, 1] < 1e-6
        assert rows[0, 5] < 1e-6
        assert rows[0, 6] == pytest.approx(0.5)


@pytest.fixture(scope="module")
def figure_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("figs")
    cfg = config_from_dict({
        "mode": "figures", "dtau": 0.02, "sample_every": 5,
        "output_dir": str(out),
    })
    run_scenario(cfg)
    return out


class TestFiguresMode:
    def test_all_datasets_written(self, figure_dir):
        names = {p.name for p in figure_dir.iterdir()}
        assert names == {
            "fig1a.csv", "fig1b.csv", "fig2a.csv", "fig2b.csv", "fig2c.csv",
            "fig3a.csv", "fig3b.csv", "fig4.csv", "fig4-inset.csv",
            "fig5a.csv", "fig5b.csv", "fig6.csv", "manifest.json",
        }

    def test_fig1a_header_golden(self, figure_dir):
        text = (figure_dir / "fig1a.csv").read_text(encoding="utf-8")
        assert text.splitlines()[0] == "tau,u_g0.8,u_g1.0,u_g1.2"

    GOLDEN_HEADERS = {
        "fig1a": "tau,u_g0.8,u_g1.0,u_g1.2",
        "fig1b": "tau,n_th_g0.8,n_th_g1.0,n_th_g1.2",
        "fig2a": "tau,dx,dy,dxdy,n_mean,n_svs",
        "fig2b": "tau,dx,dy,dxdy,n_mean,n_svs",
        "fig2c": "tau,dx,dy,dxdy,n_mean,n_svs",
        "fig3a": "tau,dx_g0.4,dx_g0.6,dx_g0.8,dx_ss_g0.4,dx_ss_g0.6,dx_ss_g0.8",
        "fig3b": "tau,dy_g0.4,dy_g0.6,dy_g0.8,dy_ss_g0.4,dy_ss_g0.6,dy_ss_g0.8",
        "fig4": "g,g2_ss,n_mean_ss,n_th_ss",
        "fig4-inset": "n_mean,g2_sts,g2_svs",
        "fig5a": "tau,dx_g5,dx_g10,dx_g50,dx_g100,dx_ss_g5,dx_ss_g10,dx_ss_g50,dx_ss_g100",
        "fig5b": "g,product_delta0.1,product_delta0.2",
        "fig6": "g,g2_delta0.1,g2_delta0.2",
    }

    def test_all_headers_golden(self, figure_dir):
        for name, expected in self.GOLDEN_HEADERS.items():
            first = (figure_dir / f"{name}.csv").read_text(encoding="utf-8").splitlines()[0]
            assert first == expected, name

    def test_fig4_steady_state_columns(self, figure_dir):
        head, rows = read_csv(figure_dir / "fig4.csv")
        g = rows[:, 0]
        assert g[0] == pytest.approx(0.01) and g[-1] == pytest.approx(0.99)
        k = np.searchsorted(g, 0.8)
        assert rows[k, 2] == pytest.approx(8.0 / 9.0, rel=1e-9)   # n_mean_ss
        assert rows[k, 3] == pytest.approx(1.0 / 3.0, rel=1e-9)   # n_th_ss

    def test_fig3a_reference_lines(self, figure_dir):
        head, rows = read_csv(figure_dir / "fig3a.csv")
        assert head[:4] == ["tau", "dx_g0.4", "dx_g0.6", "dx_g0.8"]
        ref = rows[:, head.index("dx_ss_g0.4")]
        assert np.all(ref == ref[0])
        assert ref[0] == pytest.approx(1.0 / math.sqrt(1.4), rel=1e-12)
        # curves approach their reference lines from above
        assert abs(rows[-1, 1] - ref[0]) < 5e-3

    def test_fig4_inset_ratio(self, figure_dir):
        head, rows = read_csv(figure_dir / "fig4-inset.csv")
        assert head == ["n_mean", "g2_sts", "g2_svs"]
        assert rows[0, 2] / rows[0, 1] == pytest.approx(2.0, abs=0.05)

    def test_fig6_limits(self, figure_dir):
        head, rows = read_csv(figure_dir / "fig6.csv")
        assert head == ["g", "g2_delta0.1", "g2_delta0.2"]
        # g2 near 3 for strong pumping, large toward g = 1
        assert rows[-1, 1] == pytest.approx(3.0, abs=0.3)
        assert rows[0, 1] > rows[-1, 1]


class TestCli:
    def _run(self, args, cwd):
        env = dict(os.environ, PYTHONPATH=str(REPO / "src"))
        return subprocess.run(
            [sys.executable, "-m", "squeezecav", *args],
            capture_output=True, text=True, cwd=cwd, env=env,
        )

    def test_steady_run_exit_zero(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"g_values": [0.8]}')
        proc = self._run(["steady", "--config", str(cfg), "--out", str(tmp_path / "o")], tmp_path)
        assert proc.returncode == 0, proc.stderr
        assert (tmp_path / "o" / "steady.csv").exists()
        assert "steady.csv" in proc.stdout

    def test_missing_required_key_exit_two(self, tmp_path):
        proc = self._run(["evolve"], tmp_path)
        assert proc.returncode == 2
        assert "g_values" in proc.stderr

    def test_unknown_key_exit_two(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"g_values": [0.8], "bogus": 1}')
        proc = self._run(["steady", "--config", str(cfg)], tmp_path)
        assert proc.returncode == 2
        assert "bogus" in proc.stderr

    def test_solver_failure_exit_three(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"g_values": [1.5]}')
        proc = self._run(["steady", "--config", str(cfg), "--out", str(tmp_path / "o")], tmp_path)
        assert proc.returncode == 3
        assert "NoSteadyStateError" in proc.stderr

    def test_unreadable_config_exit_four(self, tmp_path):
        proc = self._run(["steady", "--config", str(tmp_path / "absent.json")], tmp_path)
        assert proc.returncode == 4

    def test_flags_override_config(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"g_values": [0.5], "tau_end": 1.0, "dtau": 0.01, "sample_every": 5}')
        out = tmp_path / "o"
        proc = self._run(
            ["evolve", "--config", str(cfg), "--out", str(out), "--tau-end", "0.5"],
            tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        _, rows = read_csv(out / "evolve_g0.5.csv")
        assert rows[-1, 0] == pytest.approx(0.5)

    def test_help_documents_schema(self, tmp_path):
        proc = self._run(["--help"], tmp_path)
        assert proc.returncode == 0
        for key in ("g_values", "delta_values", "fock_dim", "output_dir", "exit codes"):
            assert key in proc.stdout
