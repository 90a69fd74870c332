import json
import subprocess
import sys

import numpy as np

from gausswork import phasespace as ps


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "gausswork", *args],
        capture_output=True, text=True, cwd=cwd,
    )


def write_covariance(path, gamma):
    with open(path, "w", encoding="utf-8") as fh:
        ps.write_covariance_text(np.asarray(gamma, dtype=float), fh)


class TestSample:
    def test_vacuum_rows_and_determinism(self, tmp_path):
        args = ("sample", "--n", "6", "--m", "1", "--z-profile", "vacuum",
                "--samples", "10", "--seed", "3")
        first = run_cli(*args)
        second = run_cli(*args)
        assert first.returncode == 0
        assert first.stdout == second.stdout
        lines = first.stdout.splitlines()
        assert len(lines) == 11
        assert all(line.split(",")[8] == "0.0" for line in lines[1:])

    def test_json_format(self):
        result = run_cli("sample", "--n", "4", "--z-profile", "uniform:1.2",
                         "--samples", "2", "--format", "json")
        rows = json.loads(result.stdout)
        assert len(rows) == 2
        assert rows[0]["n_modes_full"] == 4
        assert rows[1]["sample_index"] == 1

    def test_missing_required_flag(self):
        result = run_cli("sample", "--n", "4", "--samples", "2")
        assert result.returncode == 2
        assert "z-profile" in result.stderr

    def test_bad_profile(self):
        result = run_cli("sample", "--n", "4", "--z-profile", "gauss:2", "--samples", "1")
        assert result.returncode == 2


class TestSweep:
    def test_thread_count_does_not_change_bytes(self, tmp_path):
        base = ("sweep", "--n-grid", "6,12", "--m", "1", "--z-profile", "uniform:1.5",
                "--samples", "150", "--seed", "11")
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        assert run_cli(*base, "--threads", "1", "--out", str(out1)).returncode == 0
        assert run_cli(*base, "--threads", "2", "--out", str(out2)).returncode == 0
        assert out1.read_bytes() == out2.read_bytes()
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_summary_structure(self, tmp_path):
        out = tmp_path / "s.json"
        run_cli("sweep", "--n-grid", "6,12", "--z-profile", "uniform:1.5",
                "--samples", "100", "--seed", "2", "--epsilon", "0.05,0.1",
                "--out", str(out))
        summary = json.loads(out.read_text())
        assert [b["n"] for b in summary["per_n"]] == [6, 12]
        assert [t["epsilon"] for t in summary["per_n"][0]["tails"]] == [0.05, 0.1]
        assert "delta_slope" in summary and "warnings" in summary

    def test_decreasing_grid_rejected(self):
        result = run_cli("sweep", "--n-grid", "12,6", "--z-profile", "vacuum",
                         "--samples", "5")
        assert result.returncode == 2

    def test_tail_fractions_rederivable_from_csv(self, tmp_path):
        out = tmp_path / "s.json"
        run_cli("sweep", "--n-grid", "6,12", "--z-profile", "uniform:1.8",
                "--samples", "250", "--seed", "13", "--epsilon", "0.02,0.1",
                "--out", str(out))
        summary = json.loads(out.read_text())
        rows = (tmp_path / "s.csv").read_text().splitlines()[1:]
        works = {}
        for row in rows:
            cells = row.split(",")
            works.setdefault(int(cells[1]), []).append(float(cells[8]))
        for block in summary["per_n"]:
            per_n = works[block["n"]]
            for tail in block["tails"]:
                fraction = sum(1 for w in per_n if w > tail["epsilon"]) / len(per_n)
                assert tail["fraction"] == fraction


class TestMoments:
    def test_json_fields(self):
        result = run_cli("moments", "--n", "4", "--z-profile", "uniform:1.2",
                         "--samples", "200", "--seed", "5")
        reports = json.loads(result.stdout)
        assert len(reports) == 3
        for report in reports:
            assert list(report) == [
                "quantity", "analytic", "estimate", "std_error", "n_samples", "z_ratio",
            ]
            assert report["n_samples"] == 200

    def test_vacuum_zero_z_ratio(self):
        result = run_cli("moments", "--n", "4", "--z-profile", "vacuum",
                         "--samples", "50", "--seed", "1")
        reports = json.loads(result.stdout)
        by_name = {r["quantity"]: r for r in reports}
        assert by_name["tr_gamma"]["z_ratio"] == 0.0
        assert by_name["tr_gamma_sq"]["z_ratio"] == 0.0

    def test_flat_profile_rejected(self):
        result = run_cli("moments", "--n", "4", "--z-profile", "flat:10",
                         "--samples", "50")
        assert result.returncode == 2


class TestValidate:
    def test_default_suite_passes(self):
        result = run_cli("validate", "--lipschitz-pairs", "50")
        assert result.returncode == 0
        assert "FAIL" not in result.stdout

    def test_asymmetric_file_names_symmetry(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1\n1.0 0.5\n0.0 1.0\n")
        result = run_cli("validate", "--cov", str(path))
        assert result.returncode == 1
        assert "symmetry" in result.stderr

    def test_unphysical_file_names_uncertainty(self, tmp_path):
        path = tmp_path / "tight.txt"
        write_covariance(path, 0.25 * np.eye(2))
        result = run_cli("validate", "--cov", str(path))
        assert result.returncode == 1
        assert "uncertainty" in result.stderr

    def test_good_file(self, tmp_path):
        path = tmp_path / "ok.txt"
        write_covariance(path, np.eye(4) / 2)
        assert run_cli("validate", "--cov", str(path)).returncode == 0


class TestPurify:
    def test_vacuum(self, tmp_path):
        src, dst = tmp_path / "in.txt", tmp_path / "out.txt"
        write_covariance(src, np.eye(2) / 2)
        assert run_cli("purify", str(src), str(dst)).returncode == 0
        with open(dst) as fh:
            pure = ps.read_covariance_text(fh)
        assert np.allclose(pure, np.eye(4) / 2, atol=1e-12)

    def test_unit_thermal_cross_entries(self, tmp_path):
        src, dst = tmp_path / "in.txt", tmp_path / "out.txt"
        write_covariance(src, np.eye(2))
        assert run_cli("purify", str(src), str(dst)).returncode == 0
        assert "0.8660254037844386" in dst.read_text()

    def test_malformed_file(self, tmp_path):
        src = tmp_path / "junk.txt"
        src.write_text("not a matrix\n")
        result = run_cli("purify", str(src), str(tmp_path / "o.txt"))
        assert result.returncode == 2

    def test_unphysical_input(self, tmp_path):
        src = tmp_path / "tight.txt"
        write_covariance(src, 0.1 * np.eye(2))
        assert run_cli("purify", str(src), str(tmp_path / "o.txt")).returncode == 2

    def test_missing_file(self, tmp_path):
        assert run_cli("purify", str(tmp_path / "nope.txt"), "o.txt").returncode == 2


class TestConfigFile:
    def test_flags_override_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("n=4\nz_profile=vacuum\nsamples=3\nseed=9\n")
        result = run_cli("sample", "--config", str(cfg), "--z-profile", "uniform:1.1")
        lines = result.stdout.splitlines()
        assert len(lines) == 4
        assert lines[1].split(",")[4] == "uniform:1.1"
        assert lines[1].split(",")[5] == "9"

    def test_dash_keys_accepted(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("n-grid=6,12\nz-profile=vacuum\nsamples=5\n")
        out = tmp_path / "s.json"
        assert run_cli("sweep", "--config", str(cfg), "--out", str(out)).returncode == 0

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("banana=1\n")
        result = run_cli("sample", "--config", str(cfg), "--n", "4",
                         "--z-profile", "vacuum", "--samples", "1")
        assert result.returncode == 2
        assert "banana" in result.stderr
