import json

import numpy as np
import pytest

from selftrap.cli import OUTPUT_DIR_ENV, RunConfig, execute, main, parse_t_list
from selftrap.errors import ParameterError
from selftrap.serialize import parse_csv


class TestParseTList:
    def test_log_range(self):
        values = parse_t_list("0.05:10:log:20")
        assert len(values) == 20
        assert values[0] == pytest.approx(0.05)
        assert values[-1] == pytest.approx(10.0)
        ratios = np.diff(np.log(values))
        assert np.allclose(ratios, ratios[0])

    def test_lin_range(self):
        assert parse_t_list("1:3:lin:3") == pytest.approx([1.0, 2.0, 3.0])

    def test_comma_list(self):
        assert parse_t_list("0.5,0.2,0.1") == pytest.approx([0.5, 0.2, 0.1])

    @pytest.mark.parametrize(
        "bad", ["1:2:geo:5", "1:2:log", "a,b", "1:2:log:0", "-1,2", "0:2:log:5"]
    )
    def test_rejects_malformed(self, bad):
        with pytest.raises(ParameterError):
            parse_t_list(bad)


class TestCommands:
    def test_solve_writes_profile_and_summary(self, tmp_path):
        code = main(
            ["solve", "--T", "1", "--u0", "1", "--points", "257",
             "--output-dir", str(tmp_path)]
        )
        assert code == 0
        names, cols = parse_csv((tmp_path / "profile.csv").read_text())
        assert names == ["q", "rho", "R", "U"]
        assert len(cols["q"]) == 257
        summary = json.loads((tmp_path / "profile.summary.json").read_text())
        assert summary["units"] == {"hbar": 1, "mass": 1}
        assert summary["parameters"]["seed"] == 42
        assert summary["results"]["L_m"] == pytest.approx(0.9627446, rel=1e-5)

    def test_sweep_csv(self, tmp_path):
        code = main(
            ["sweep", "--u0", "1", "--T-list", "0.5:2:log:3", "--points", "257",
             "--output-dir", str(tmp_path)]
        )
        assert code == 0
        names, cols = parse_csv((tmp_path / "sweep.csv").read_text())
        assert names == ["T", "L_m", "U_bar", "entropy", "Z"]
        assert len(cols["T"]) == 3
        assert np.all(np.diff(cols["L_m"]) < 0)

    def test_zerot_with_wall_sentinel(self, tmp_path):
        code = main(
            ["zerot", "--ubar0", "1", "--points", "65", "--output-dir", str(tmp_path)]
        )
        assert code == 0
        text = (tmp_path / "zerot.csv").read_text()
        assert text.splitlines()[1].endswith(",inf")

    def test_evolve_outputs(self, tmp_path):
        code = main(
            ["evolve", "--ubar0", "1", "--vc", "2", "--t-final", "0.02",
             "--dt", "1e-3", "--points", "1024", "--stride", "10",
             "--output-dir", str(tmp_path)]
        )
        assert code == 0
        names, cols = parse_csv((tmp_path / "evolution.csv").read_text())
        assert names == ["t", "q", "rho", "re_psi", "im_psi"]
        shape = json.loads((tmp_path / "evolution.shape.json").read_text())
        assert shape["truncated"] is False
        assert len(shape["times"]) == len(shape["norm_drifts"])
        summary = json.loads((tmp_path / "evolution.summary.json").read_text())
        assert summary["results"]["E_avg"] == 3
        assert summary["results"]["p_avg"] == 2

    def test_json_format(self, tmp_path):
        code = main(
            ["solve", "--T", "1", "--u0", "1", "--points", "129",
             "--format", "json", "--output-dir", str(tmp_path)]
        )
        assert code == 0
        data = json.loads((tmp_path / "profile.json").read_text())
        assert sorted(data) == ["R", "U", "q", "rho"]
        assert len(data["q"]) == 129

    def test_shift_potential_option(self, tmp_path):
        main(
            ["solve", "--T", "1", "--u0", "1", "--points", "129",
             "--shift-potential", "--output-dir", str(tmp_path)]
        )
        _, cols = parse_csv((tmp_path / "profile.csv").read_text())
        assert cols["U"].min() == 0.0

    def test_output_dir_env_default(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
        assert main(["solve", "--T", "1", "--u0", "1", "--points", "129"]) == 0
        assert (tmp_path / "profile.csv").exists()

    def test_out_basename_override(self, tmp_path):
        main(
            ["solve", "--T", "1", "--u0", "1", "--points", "129",
             "--out", "fig1", "--output-dir", str(tmp_path)]
        )
        assert (tmp_path / "fig1.csv").exists()
        assert (tmp_path / "fig1.summary.json").exists()


class TestExitCodes:
    def test_invalid_parameter_exits_2(self, tmp_path):
        assert main(
            ["solve", "--T", "-1", "--u0", "1", "--output-dir", str(tmp_path)]
        ) == 2

    def test_even_point_count_exits_2(self, tmp_path):
        assert main(
            ["solve", "--T", "1", "--u0", "1", "--points", "128",
             "--output-dir", str(tmp_path)]
        ) == 2

    def test_unwritable_output_exits_1(self, tmp_path, capsys):
        blocker = tmp_path / "not-a-dir"
        blocker.write_text("x")
        code = main(
            ["solve", "--T", "1", "--u0", "1", "--points", "129",
             "--output-dir", str(blocker)]
        )
        assert code == 1
        err = capsys.readouterr().err
        assert '"error"' in err and '"message"' in err

    def test_usage_error_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["solve", "--T", "1"])  # missing --u0
        assert exc.value.code == 2


class TestDeterminism:
    def test_identical_runs_byte_identical(self, tmp_path):
        dirs = [tmp_path / "a", tmp_path / "b"]
        for d in dirs:
            execute(
                RunConfig(
                    command="solve", T=1.0, u0=1.0, points=257, output_dir=str(d)
                )
            )
        for name in ("profile.csv", "profile.summary.json"):
            assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()
