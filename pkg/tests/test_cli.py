import csv
import hashlib
import json

import pytest

from doalf.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, main
from doalf.config import ConfigError, load_config


def fast_config(tmp_path, extra=""):
    path = tmp_path / "fast.ini"
    path.write_text(
        "[experiment]\npreset = fig9\nnum_test_points = 40\nsamples_per_rp = 5\n"
        "[scenario]\nrp_interval = 10\n" + extra,
        encoding="utf-8",
    )
    return str(path)


def read_table(path):
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    return list(csv.DictReader(lines))


class TestConfig:
    def test_preset_name(self):
        assert load_config("fig9").methods()[-1].label == "doalf"

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[match]\nneighbours = 3\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_file_overrides_preset(self, tmp_path):
        cfg = load_config(fast_config(tmp_path))
        assert cfg.experiment().num_test_points == 40
        assert cfg.scenario().rp_interval_m == 10


class TestExitCodes:
    def test_usage(self):
        assert main([]) == EXIT_USAGE
        assert main(["frobnicate"]) == EXIT_USAGE

    def test_missing_config(self, tmp_path):
        assert main(["simulate", str(tmp_path / "nope.ini"), "--out", str(tmp_path)]) == EXIT_USAGE

    def test_missing_database(self, tmp_path):
        assert main(["locate", str(tmp_path / "nope.csv"), "-m", "1,2"]) == EXIT_IO

    def test_bad_workers(self, tmp_path):
        assert main(["simulate", "fig9", "--workers", "0", "--out", str(tmp_path)]) == EXIT_USAGE


class TestBuildAndLocate:
    @pytest.fixture
    def db_path(self, tmp_path):
        out = tmp_path / "db.csv"
        assert main(["build-db", fast_config(tmp_path), "--out", str(out), "--seed", "3"]) == EXIT_OK
        return out

    def test_deterministic(self, tmp_path, db_path):
        again = tmp_path / "again.csv"
        main(["build-db", fast_config(tmp_path), str(again), "--seed", "3"])
        assert again.read_bytes() == db_path.read_bytes()
        other = tmp_path / "other.csv"
        main(["build-db", fast_config(tmp_path), str(other), "--seed", "4"])
        assert other.read_bytes() != db_path.read_bytes()

    def test_manifest_checksum(self, db_path):
        manifest = json.loads((db_path.parent / "db.csv.manifest.json").read_text())
        assert manifest["outputs"]["db.csv"] == hashlib.sha256(db_path.read_bytes()).hexdigest()
        assert manifest["seed"] == 3

    def test_locate_nn_returns_row(self, db_path, capsys):
        row = [l for l in db_path.read_text().splitlines() if not l.startswith(("#", "x"))][7]
        x, y, *features = row.split(",")
        assert main(["locate", str(db_path), "-m", ",".join(features), "--method", "nn"]) == EXIT_OK
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "x_hat,y_hat"
        assert [float(v) for v in out[1].split(",")] == [float(x), float(y)]

    def test_locate_errors(self, db_path):
        assert main(["locate", str(db_path), "-m", "-50,-60,10"]) == EXIT_USAGE
        assert main(["locate", str(db_path), "-m", ",".join(["-60"] * 4 + ["0"] * 4),
                     "--k", "1000"]) == EXIT_USAGE


class TestSimulate:
    def test_outputs(self, tmp_path):
        out = tmp_path / "run"
        assert main(["simulate", fast_config(tmp_path), str(out)]) == EXIT_OK
        summary = read_table(out / "summary.csv")
        assert [r["method"] for r in summary] == ["nn", "knn", "wknn", "doalf"]
        assert all(float(r["mean_error_m"]) > 0 for r in summary)
        cdf_rows = read_table(out / "cdf.csv")
        assert len(cdf_rows) == 200
        assert all(float(cdf_rows[-1][m]) == 1.0 for m in ("nn", "knn", "wknn", "doalf"))
        assert (out / "summary.csv").read_text().startswith("# doalf")
        manifest = json.loads((out / "manifest.json").read_text())
        for name, digest in manifest["outputs"].items():
            assert hashlib.sha256((out / name).read_bytes()).hexdigest() == digest

    def test_cross_preset_methods(self, tmp_path):
        cfg = fast_config(tmp_path, "[match]\nmethods = doalf@mmwave60,wknn@mmwave60,wknn@wifi24\nk = 6\n")
        assert main(["simulate", cfg, str(tmp_path / "o")]) == EXIT_OK
        labels = [r["method"] for r in read_table(tmp_path / "o" / "summary.csv")]
        assert labels == ["doalf@mmwave60", "wknn@mmwave60", "wknn@wifi24"]

    def test_workers_identical(self, tmp_path):
        cfg = fast_config(tmp_path)
        main(["simulate", cfg, str(tmp_path / "a"), "--workers", "1"])
        main(["simulate", cfg, str(tmp_path / "b"), "--workers", "4"])
        for name in ("summary.csv", "cdf.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_empty_methods(self, tmp_path):
        cfg = fast_config(tmp_path, "[match]\nmethods =\n")
        assert main(["simulate", cfg, str(tmp_path / "o")]) == EXIT_USAGE

    def test_rssi_table(self, tmp_path):
        path = tmp_path / "rssi.ini"
        path.write_text("[experiment]\npreset = fig7\n[scenario]\nrp_interval = 20\n")
        assert main(["simulate", str(path), str(tmp_path / "r")]) == EXIT_OK
        rows = read_table(tmp_path / "r" / "rssi_comparison.csv")
        assert rows and set(rows[0]) == {"x", "y", "ap", "rssi_mmwave60_dbm", "rssi_wifi24_dbm"}


class TestSweep:
    @pytest.mark.parametrize("axis", ["rp_interval", "ap_count"])
    def test_four_row_tables(self, tmp_path, axis):
        cfg = fast_config(tmp_path, "[match]\nmethods = doalf\n")
        values = "5,6,7,8" if axis == "rp_interval" else "3,4,5,6"
        assert main(["sweep", cfg, str(tmp_path / "s"), "--axis", axis, "--values", values]) == EXIT_OK
        rows = read_table(tmp_path / "s" / f"sweep_{axis}.csv")
        assert [float(r["axis_value"]) for r in rows] == [float(v) for v in values.split(",")]
        if axis == "rp_interval":
            for r in rows:
                assert float(r["error_minus_interval_m"]) == pytest.approx(
                    float(r["mean_error_m"]) - float(r["axis_value"]), abs=1e-8)

    def test_unknown_axis(self, tmp_path):
        assert main(["sweep", fast_config(tmp_path), str(tmp_path), "--axis", "colour",
                     "--values", "1,2"]) == EXIT_USAGE


class TestCrlbMap:
    def test_grid_and_flags(self, tmp_path):
        out = tmp_path / "map.csv"
        assert main(["crlb-map", "fig9", str(out), "--step", "10"]) == EXIT_OK
        rows = read_table(out)
        assert len(rows) == 121
        corners = {(0.0, 0.0), (100.0, 0.0), (0.0, 100.0), (100.0, 100.0)}
        for r in rows:
            xy = (float(r["x"]), float(r["y"]))
            if xy in corners:
                assert r["singular_flag"] == "1" and r["crlb_numeric"] == ""
            elif r["crlb_numeric"]:
                assert float(r["crlb_numeric"]) > 0

    def test_bad_step(self, tmp_path):
        assert main(["crlb-map", "fig9", str(tmp_path / "m.csv"), "--step", "0"]) == EXIT_USAGE
