"""CLI behaviour: outputs, manifests, precedence, and exit codes."""

import csv
import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from banditfolio.cli import main, parse_manifest

from conftest import FIXTURE_CSV


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def run_cli(capsys, *argv):
    rc = main(list(argv))
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


class TestRunCommand:
    def test_writes_reports_without_figures(self, tmp_path, capsys):
        out = tmp_path / "out"
        rc, stdout, _ = run_cli(
            capsys, "run", "--data", str(FIXTURE_CSV), "--tau", "50",
            "--seed", "3", "--out", str(out), "--no-plots",
        )
        assert rc == 0
        names = sorted(p.name for p in out.iterdir())
        assert names == ["cw_curve.csv", "metrics.csv", "result.json", "selections.csv"]
        assert "run complete: 150 traded periods, seed 3" in stdout
        assert "wrote" in stdout

    def test_renders_figure_by_default(self, tmp_path, capsys):
        out = tmp_path / "out"
        rc, _, _ = run_cli(
            capsys, "run", "--data", str(FIXTURE_CSV), "--tau", "50",
            "--out", str(out),
        )
        assert rc == 0
        png = out / "cw_curve.png"
        assert png.is_file()
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"

    def test_result_json_is_byte_identical_across_runs(self, tmp_path, capsys):
        args = ["run", "--data", str(FIXTURE_CSV), "--tau", "60", "--seed", "11", "--no-plots"]
        rc1, _, _ = run_cli(capsys, *args, "--out", str(tmp_path / "a"))
        rc2, _, _ = run_cli(capsys, *args, "--out", str(tmp_path / "b"))
        assert rc1 == rc2 == 0
        a = (tmp_path / "a" / "result.json").read_bytes()
        b = (tmp_path / "b" / "result.json").read_bytes()
        assert a == b
        assert a.endswith(b"\n")

    def test_csv_values_round_trip_exactly(self, tmp_path, capsys):
        out = tmp_path / "out"
        run_cli(
            capsys, "run", "--data", str(FIXTURE_CSV), "--tau", "50",
            "--seed", "2", "--out", str(out), "--no-plots",
        )
        result = json.loads((out / "result.json").read_text())
        header, rows = read_csv(out / "metrics.csv")
        metrics = dict(zip(header, rows[0]))
        rep = result["report"]
        assert float(metrics["sr"]) == rep["sharpe"]
        assert float(metrics["sr_x100"]) == rep["sharpe_x100"]
        assert float(metrics["cw"]) == rep["cumulative_wealth"]
        assert float(metrics["mdd_abs"]) == rep["max_drawdown_abs"]
        assert float(metrics["mdd_rel"]) == rep["max_drawdown_rel"]
        assert float(metrics["vo"]) == rep["volatility_annualized"]

        header, rows = read_csv(out / "cw_curve.csv")
        assert header == ["period", "date", "cw"]
        assert [int(r[0]) for r in rows] == list(range(51, 201))
        assert [r[1] for r in rows] == result["traded_dates"]
        assert [float(r[2]) for r in rows] == result["cw_curve"]

        header, rows = read_csv(out / "selections.csv")
        assert header == [
            "period", "arm", "theta_BH", "theta_SA", "theta_EW", "theta_VW", "theta_MV",
            "success_count", "outcome",
        ]
        assert len(rows) == 200
        assert [float(rows[0][i]) for i in range(2, 7)] == result["selections"][0]["thetas"]

    def test_roster_flag_narrows_outputs(self, tmp_path, capsys):
        out = tmp_path / "out"
        rc, _, _ = run_cli(
            capsys, "run", "--data", str(FIXTURE_CSV), "--tau", "50",
            "--arms", "EW,MV", "--c", "2", "--out", str(out), "--no-plots",
        )
        assert rc == 0
        header, rows = read_csv(out / "selections.csv")
        assert header[2:4] == ["theta_EW", "theta_MV"]
        assert {r[1] for r in rows} <= {"EW", "MV"}

    def test_insufficient_history_exits_nonzero(self, tmp_path, capsys):
        rc, _, stderr = run_cli(
            capsys, "run", "--data", str(FIXTURE_CSV), "--tau", "200",
            "--out", str(tmp_path / "out"), "--no-plots",
        )
        assert rc == 1
        assert "insufficient history" in stderr

    def test_missing_data_file_exits_nonzero(self, tmp_path, capsys):
        rc, _, stderr = run_cli(
            capsys, "run", "--data", str(tmp_path / "nope.csv"),
            "--out", str(tmp_path / "out"), "--no-plots",
        )
        assert rc == 1
        assert stderr.startswith("error:")


class TestManifest:
    def write_manifest(self, tmp_path, body):
        shutil.copy(FIXTURE_CSV, tmp_path / "two_asset_returns.csv")
        mf = tmp_path / "run.manifest"
        mf.write_text(body, encoding="utf-8")
        return mf

    def test_manifest_drives_run_and_flags_win(self, tmp_path, capsys):
        mf = self.write_manifest(
            tmp_path,
            "# demo settings\n"
            "data = two_asset_returns.csv\n"
            "tau = 30\n"
            "c = 2\n"
            "seed = 7\n",
        )
        out = tmp_path / "out"
        rc, _, _ = run_cli(
            capsys, "run", "--manifest", str(mf), "--tau", "40",
            "--out", str(out), "--no-plots",
        )
        assert rc == 0
        cfg = json.loads((out / "result.json").read_text())["config"]
        assert cfg["tau"] == 40  # flag overrides manifest
        assert cfg["c"] == 2  # manifest value survives
        assert cfg["seed"] == 7

    def test_relative_paths_resolve_against_manifest_dir(self, tmp_path, capsys, monkeypatch):
        mf = self.write_manifest(
            tmp_path, "data = two_asset_returns.csv\ntau = 30\nout = produced\n"
        )
        elsewhere = tmp_path / "elsewhere"
        elsewhere.mkdir()
        monkeypatch.chdir(elsewhere)
        rc, _, _ = run_cli(capsys, "run", "--manifest", str(mf), "--no-plots")
        assert rc == 0
        assert (tmp_path / "produced" / "result.json").is_file()
        assert not (elsewhere / "produced").exists()

    def test_unknown_key_rejected(self, tmp_path, capsys):
        mf = self.write_manifest(tmp_path, "data = two_asset_returns.csv\nfoo = 1\n")
        rc, _, stderr = run_cli(capsys, "run", "--manifest", str(mf), "--no-plots")
        assert rc == 1
        assert "unknown manifest key 'foo'" in stderr

    def test_duplicate_key_rejected(self, tmp_path, capsys):
        mf = self.write_manifest(tmp_path, "data = x.csv\ntau = 5\ntau = 6\n")
        rc, _, stderr = run_cli(capsys, "run", "--manifest", str(mf), "--no-plots")
        assert rc == 1
        assert "duplicate manifest key 'tau'" in stderr

    def test_non_integer_value_rejected(self, tmp_path, capsys):
        mf = self.write_manifest(tmp_path, "data = two_asset_returns.csv\ntau = soon\n")
        rc, _, stderr = run_cli(capsys, "run", "--manifest", str(mf), "--no-plots")
        assert rc == 1
        assert "tau must be an integer" in stderr

    def test_plots_key_disables_figures(self, tmp_path, capsys):
        mf = self.write_manifest(
            tmp_path,
            "data = two_asset_returns.csv\ntau = 50\nplots = false\n",
        )
        out = tmp_path / "out"
        rc, _, _ = run_cli(capsys, "run", "--manifest", str(mf), "--out", str(out))
        assert rc == 0
        assert not (out / "cw_curve.png").exists()

    def test_parse_manifest_comments_and_spacing(self, tmp_path):
        mf = tmp_path / "m"
        mf.write_text("\n# c\n  tau=5\nc =  2 \n\n", encoding="utf-8")
        assert parse_manifest(mf) == {"tau": "5", "c": "2"}


class TestSweepCommand:
    def test_grid_outputs_and_summary_means(self, tmp_path, capsys):
        out = tmp_path / "out"
        rc, stdout, _ = run_cli(
            capsys, "sweep", "--data", str(FIXTURE_CSV), "--tau", "60",
            "--c-list", "1,3", "--seeds", "0,1", "--out", str(out), "--no-plots",
        )
        assert rc == 0
        assert "sweep complete: 4 runs (2 c values x 2 seeds)" in stdout

        header, rows = read_csv(out / "sweep.csv")
        assert header == ["c", "seed", "sr", "cw", "mdd_rel", "vo"]
        assert [(int(r[0]), int(r[1])) for r in rows] == [(1, 0), (1, 1), (3, 0), (3, 1)]

        sheader, srows = read_csv(out / "sweep_summary.csv")
        assert sheader[:3] == ["c", "sr_mean", "sr_std"]
        assert [int(r[0]) for r in srows] == [1, 3]
        for srow in srows:
            block = [r for r in rows if r[0] == srow[0]]
            srs = np.array([float(r[2]) for r in block])
            assert float(srow[1]) == srs.mean()
            assert float(srow[2]) == srs.std()

    def test_sweep_figure_by_default(self, tmp_path, capsys):
        out = tmp_path / "out"
        rc, _, _ = run_cli(
            capsys, "sweep", "--data", str(FIXTURE_CSV), "--tau", "60",
            "--c-list", "1,2", "--seeds", "0", "--out", str(out),
        )
        assert rc == 0
        assert (out / "sweep.png").is_file()

    def test_seed_derivation_from_n_seeds(self, tmp_path, capsys):
        out = tmp_path / "out"
        rc, _, _ = run_cli(
            capsys, "sweep", "--data", str(FIXTURE_CSV), "--tau", "60",
            "--c-list", "2", "--seed", "5", "--n-seeds", "3",
            "--out", str(out), "--no-plots",
        )
        assert rc == 0
        _, rows = read_csv(out / "sweep.csv")
        assert [int(r[1]) for r in rows] == [5, 6, 7]

    def test_duplicate_seeds_rejected(self, tmp_path, capsys):
        rc, _, stderr = run_cli(
            capsys, "sweep", "--data", str(FIXTURE_CSV), "--tau", "60",
            "--c-list", "1", "--seeds", "1,1", "--out", str(tmp_path / "o"), "--no-plots",
        )
        assert rc == 1
        assert "duplicate seeds" in stderr

    def test_sweep_rows_match_solo_run(self, tmp_path, capsys):
        out = tmp_path / "sweep"
        run_cli(
            capsys, "sweep", "--data", str(FIXTURE_CSV), "--tau", "60",
            "--c-list", "3", "--seeds", "9", "--out", str(out), "--no-plots",
        )
        solo = tmp_path / "solo"
        run_cli(
            capsys, "run", "--data", str(FIXTURE_CSV), "--tau", "60",
            "--c", "3", "--seed", "9", "--out", str(solo), "--no-plots",
        )
        _, rows = read_csv(out / "sweep.csv")
        rep = json.loads((solo / "result.json").read_text())["report"]
        assert float(rows[0][2]) == rep["sharpe"]
        assert float(rows[0][3]) == rep["cumulative_wealth"]


class TestValidateCommand:
    def test_complete_panel(self, capsys):
        rc, stdout, _ = run_cli(capsys, "validate", "--data", str(FIXTURE_CSV))
        assert rc == 0
        assert "kept 2 of 2 assets" in stdout
        assert "periods: 200 (1990-01 .. 2006-08)" in stdout
        assert "dropped" not in stdout

    def test_sentinel_column_reported_dropped(self, tmp_path, capsys):
        csv_path = tmp_path / "gap.csv"
        csv_path.write_text(
            "date,A,B\n1990-01,1.0,2.0\n1990-02,-99.0,1.0\n1990-03,0.5,0.5\n",
            encoding="utf-8",
        )
        rc, stdout, _ = run_cli(capsys, "validate", "--data", str(csv_path))
        assert rc == 0
        assert "kept 1 of 2 assets" in stdout
        assert "dropped (incomplete): A" in stdout

    def test_price_file_reports_return_periods(self, tmp_path, capsys):
        csv_path = tmp_path / "px.csv"
        csv_path.write_text(
            "date,X,Y\nd1,10,20\nd2,11,19\nd3,12,21\n", encoding="utf-8"
        )
        rc, stdout, _ = run_cli(
            capsys, "validate", "--data", str(csv_path), "--format", "prices"
        )
        assert rc == 0
        assert "periods: 3" in stdout
        assert "return periods after conversion: 2" in stdout

    def test_missing_file(self, tmp_path, capsys):
        rc, _, stderr = run_cli(capsys, "validate", "--data", str(tmp_path / "no.csv"))
        assert rc == 1
        assert stderr.startswith("error:")


class TestConsoleEntry:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "banditfolio.cli", "validate", "--data", str(FIXTURE_CSV)],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "kept 2 of 2 assets" in proc.stdout
