import numpy as np
import pytest

from mimo3d import cli, dropfile
from mimo3d.experiment import CSV_HEADER, FLOPS_CSV_HEADER

SMALL_INI = """
[array]
n_azimuth = 4
n_elevation = 2

[experiment]
users = 3
streams_per_user = 2
seeds = 2
pu_granularities = 1,2

[channel]
n_rb_total = 2
"""


@pytest.fixture()
def small_config(tmp_path):
    path = tmp_path / "small.ini"
    path.write_text(SMALL_INI)
    return str(path)


class TestRunVerb:
    def test_writes_csv(self, small_config, tmp_path):
        out = tmp_path / "rows.csv"
        code = cli.main(["run", "--config", small_config, "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 1 + 2 * 4 * 2 * 3

    def test_byte_identical_across_runs_and_threads(self, small_config, tmp_path, monkeypatch):
        out1, out2, out3 = (tmp_path / f"r{i}.csv" for i in range(3))
        cli.main(["run", "--config", small_config, "--out", str(out1)])
        cli.main(["run", "--config", small_config, "--out", str(out2)])
        monkeypatch.setenv("MR_THREADS", "8")
        cli.main(["run", "--config", small_config, "--out", str(out3)])
        assert out1.read_bytes() == out2.read_bytes()
        assert out1.read_bytes() == out3.read_bytes()

    def test_stdout_default(self, small_config, capsys):
        cli.main(["run", "--config", small_config, "--seeds", "1"])
        captured = capsys.readouterr()
        assert captured.out.startswith(CSV_HEADER)

    def test_seed_override_row_count(self, small_config, tmp_path):
        out = tmp_path / "rows.csv"
        cli.main(["run", "--config", small_config, "--out", str(out), "--seeds", "1"])
        assert len(out.read_text().splitlines()) == 1 + 1 * 4 * 2 * 3

    def test_figures(self, small_config, tmp_path):
        out = tmp_path / "rows.csv"
        figs = tmp_path / "figs"
        code = cli.main(["run", "--config", small_config, "--out", str(out),
                         "--figures", str(figs)])
        assert code == 0
        names = sorted(p.name for p in figs.iterdir())
        assert names == ["rate_by_normalization.png", "rate_by_pu_granularity.png"]
        assert all((figs / n).stat().st_size > 1000 for n in names)

    def test_figures_default_beside_csv(self, small_config, tmp_path):
        out = tmp_path / "rows.csv"
        cli.main(["run", "--config", small_config, "--out", str(out), "--figures"])
        assert (tmp_path / "rate_by_normalization.png").exists()

    def test_config_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text("[experiment]\nstreams_per_user = 99\n")
        assert cli.main(["run", "--config", str(bad)]) == 2

    def test_strict_with_degenerate_rows(self, tmp_path):
        bad = tmp_path / "degenerate.ini"
        bad.write_text(
            "[array]\nn_azimuth = 4\nn_elevation = 2\nn_pol = 1\npol_slants_deg = 0\n"
            "[user_array]\nn_pol = 1\npol_slants_deg = 0\n"
            "[experiment]\nusers = 1\nstreams_per_user = 2\nseeds = 1\n"
            "methods = direct\nnormalizations = per_stream\n"
            "[channel]\nn_rb_total = 1\nn_sc_per_rb = 1\nn_rays = 1\nn_subpaths = 1\n"
            "subpath_spread_az_deg = 0\nsubpath_spread_zen_deg = 0\n"
        )
        out = tmp_path / "rows.csv"
        assert cli.main(["run", "--config", str(bad), "--out", str(out)]) == 0
        assert "degenerate-rank" in out.read_text()
        assert cli.main(["run", "--config", str(bad), "--out", str(out), "--strict"]) == 1


class TestFlopsVerb:
    def test_sweep_csv(self, tmp_path):
        out = tmp_path / "flops.csv"
        code = cli.main(["flops", "--sweep", "2,4,8", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == FLOPS_CSV_HEADER
        assert len(lines) == 1 + 3 * 4

    def test_rectangular_sweep_and_figure(self, tmp_path):
        out = tmp_path / "flops.csv"
        figs = tmp_path / "figs"
        code = cli.main(["flops", "--sweep", "4x2,8x4", "--out", str(out),
                         "--figures", str(figs)])
        assert code == 0
        assert (figs / "flops_vs_antennas.png").stat().st_size > 1000

    def test_bad_sweep(self):
        assert cli.main(["flops", "--sweep", " , "]) == 2

    def test_breakdown_text(self, capsys):
        assert cli.main(["flops", "--breakdown"]) == 0
        out = capsys.readouterr().out
        assert "[direct]" in out and "[method2]" in out
        block = out.split("[method1]")[1].split("[")[0]
        fields = dict(
            line.split("=") for line in block.strip().splitlines() if "=" in line
        )
        assert int(fields["svd_calls"]) == 2
        assert int(fields["total"]) == sum(
            int(fields[k]) for k in ("gram", "matmul", "scale", "sum", "qr",
                                     "svd_su", "svd_sv")
        )


class TestGenReplay:
    def test_roundtrip(self, small_config, tmp_path):
        drop = tmp_path / "drop.mr3d"
        assert cli.main(["gen", "--config", small_config, "--seed", "42",
                         "--out", str(drop)]) == 0
        tensor = dropfile.load_drop(str(drop))
        assert tensor.seed == 42
        assert tensor.h.shape == (3, 24, 8, 16)

        out = tmp_path / "replay.csv"
        assert cli.main(["replay", "--tensor", str(drop), "--config", small_config,
                         "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 1 + 4 * 2 * 3
        assert all(line.split(",")[1] == "42" for line in lines[1:])

    def test_replay_deterministic(self, small_config, tmp_path):
        drop = tmp_path / "drop.mr3d"
        cli.main(["gen", "--config", small_config, "--out", str(drop)])
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        cli.main(["replay", "--tensor", str(drop), "--config", small_config, "--out", str(a)])
        cli.main(["replay", "--tensor", str(drop), "--config", small_config, "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_replay_rejects_mismatched_config(self, small_config, tmp_path):
        drop = tmp_path / "drop.mr3d"
        cli.main(["gen", "--config", small_config, "--out", str(drop)])
        other = tmp_path / "other.ini"
        other.write_text("[array]\nn_azimuth = 8\nn_elevation = 8\n")
        assert cli.main(["replay", "--tensor", str(drop), "--config", str(other)]) == 2
        shrunk = tmp_path / "shrunk.ini"
        shrunk.write_text(SMALL_INI.replace("n_rb_total = 2", "n_rb_total = 1"))
        assert cli.main(["replay", "--tensor", str(drop), "--config", str(shrunk)]) == 2

    def test_gen_default_seed_derived(self, small_config, tmp_path):
        drop = tmp_path / "drop.mr3d"
        cli.main(["gen", "--config", small_config, "--out", str(drop)])
        from mimo3d.experiment import derive_drop_seed

        assert dropfile.load_drop(str(drop)).seed == derive_drop_seed(1, 0)
