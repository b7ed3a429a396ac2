"""
End-to-end runs of the command-line front door on fixture inputs.
"""

import json
import math

import numpy as np
import pytest

import cli
import config
from tools.field_tools import Grid2D, ScalarField2D
from tools.io_tools import write_scalar_csv, write_trajectory

pytestmark = pytest.mark.e2e


def _outputs(directory, suffix):
    return sorted(directory.glob(f"*{suffix}"))


def _load(path):
    return json.loads(path.read_text())


class TestSimulate:
    """Test the simulate subcommand."""

    def test_zero_steps_reproduce_input(self, tmp_path):
        """Test that a zero-step 2D Euler run writes the initial vorticity unchanged."""
        grid = Grid2D(0.0, 2 * math.pi, 0.0, math.pi, 17, 9)
        omega = ScalarField2D.from_function(grid, lambda z1, z2: np.sin(z1) * np.sin(z2))
        src = write_scalar_csv(tmp_path / "omega.csv", omega)
        out = tmp_path / "out"
        code = cli.run(["-o", str(out), "simulate", "--system", "euler2d", "--input", f"omega={src}", "--steps", "0"])
        assert code == 0
        (snap,) = _outputs(out, "-omega-00000.csv")
        assert snap.read_bytes() == src.read_bytes()
        (config_file,) = _outputs(out, "-config.json")
        prefix = config_file.name[: -len("-config.json")]
        assert snap.name.startswith(prefix)
        report = _load(out / f"{prefix}-conservation.json")
        assert report["system"] == "euler2d"
        assert report["times"] == [0.0]

    def test_missing_field(self, tmp_path, capsys):
        """Test that the Boussinesq system needs h."""
        grid = Grid2D(0.0, 2 * math.pi, 0.0, math.pi, 17, 9)
        src = write_scalar_csv(tmp_path / "omega.csv", ScalarField2D(grid, np.zeros(grid.shape)))
        code = cli.run(["-o", str(tmp_path / "out"), "simulate", "--system", "boussinesq", "--input", f"omega={src}"])
        assert code == 3
        assert "missing ['h']" in capsys.readouterr().err

    def test_missing_input_file(self, tmp_path, capsys):
        """Test a nonexistent input path."""
        code = cli.run(["-o", str(tmp_path), "simulate", "--system", "euler2d", "--input", "omega=nope.csv"])
        assert code == 3
        assert "no such file" in capsys.readouterr().err


class TestRescale:
    """Test the rescale subcommand on a hand-written trajectory."""

    def test_sequence_and_window(self, tmp_path):
        """Test centre extraction and the rescaled window file."""
        grid = Grid2D(-1.0, 1.0, -1.0, 1.0, 33, 33)
        u1 = ScalarField2D.from_function(grid, lambda z1, z2: 10.0 * np.exp(-(z1**2 + z2**2)))
        u2 = ScalarField2D(grid, np.zeros(grid.shape))
        manifest = write_trajectory(tmp_path / "traj", "t", [0.0, 0.1], [{"u1": u1, "u2": u2}] * 2)
        out = tmp_path / "out"
        code = cli.run(["-o", str(out), "rescale", "--trajectory", str(manifest), "--window-nodes", "9"])
        assert code == 0
        (seq_file,) = _outputs(out, "-sequence.json")
        seq = _load(seq_file)
        assert seq["alpha"] == 0.5
        assert [c["index"] for c in seq["centers"]] == [0, 1]
        assert seq["centers"][0]["x"] == [0.0, 0.0]
        assert seq["centers"][0]["Q"] == pytest.approx(10.0)
        (window,) = _outputs(out, "-rescaled.csv")
        assert window.read_text().startswith("# grid n1=9 n2=9")

    def test_index_outside_sequence(self, tmp_path, capsys):
        """Test that a sequence entry past the end is an input error."""
        grid = Grid2D(-1.0, 1.0, -1.0, 1.0, 33, 33)
        u1 = ScalarField2D.from_function(grid, lambda z1, z2: 10.0 * np.exp(-(z1**2 + z2**2)))
        u2 = ScalarField2D(grid, np.zeros(grid.shape))
        manifest = write_trajectory(tmp_path / "traj", "t", [0.0, 0.1], [{"u1": u1, "u2": u2}] * 2)
        code = cli.run(["-o", str(tmp_path / "out"), "rescale", "--trajectory", str(manifest),
                        "--window-nodes", "9", "--index", "99"])
        assert code == 3
        assert "--index 99" in capsys.readouterr().err


class TestCertify:
    """Test the certify subcommand through ansatz manifests."""

    def test_planted_sector(self, tmp_path, write_planted_manifest):
        """Test a planted sector profile routed to the Boussinesq certifiers."""
        manifest = write_planted_manifest("sector")
        out = tmp_path / "out"
        code = cli.run(["-o", str(out), "certify", "--ansatz", str(manifest), "--prop", "sector_integral_test"])
        assert code == 0
        (report_file,) = _outputs(out, "-sector_integral_test.json")
        report = _load(report_file)
        assert report["verdict"] == "ContradictionFound"
        assert _outputs(out, "-proots.csv")
        route = _load(_outputs(out, "-route.json")[0])
        assert route["regime"] == "Critical"

    def test_trivial_profile_exit_code(self, tmp_path, write_planted_manifest):
        """Test exit code 2 when every requested certifier fails its hypotheses."""
        manifest = write_planted_manifest("sector")
        csv = tmp_path / "sector-profiles.csv"
        lines = csv.read_text().splitlines()
        header, columns, rows = lines[0], lines[1], lines[2:]
        names = columns.removeprefix("# columns ").split(",")
        k = 4 + names.index("W")
        zeroed = []
        for row in rows:
            cells = row.split(",")
            cells[k] = "0.0"
            zeroed.append(",".join(cells))
        csv.write_text("\n".join([header, columns, *zeroed]) + "\n")
        code = cli.run(["-o", str(tmp_path / "out"), "certify", "--ansatz", str(manifest),
                        "--prop", "sector_integral_test"])
        assert code == 2

    def test_no_route_exit_code(self, tmp_path, write_planted_manifest):
        """Test exit code 2 for an interior velocity blow-up centre."""
        manifest = write_planted_manifest("odd_limit", center="interior")
        out = tmp_path / "out"
        assert cli.run(["-o", str(out), "certify", "--ansatz", str(manifest)]) == 2
        assert _load(_outputs(out, "-route.json")[0])["proposition"] == "none"

    def test_auto_route_odd_limit(self, tmp_path, write_planted_manifest):
        """Test the automatic route for a boundary velocity blow-up."""
        manifest = write_planted_manifest("odd_limit")
        out = tmp_path / "out"
        assert cli.run(["-o", str(out), "certify", "--ansatz", str(manifest)]) == 0
        assert _load(_outputs(out, "-odd_limit_test.json")[0])["verdict"] == "ContradictionFound"

    def test_missing_alpha(self, tmp_path, capsys, write_planted_manifest):
        """Test that a manifest without alpha is an input error naming the field."""
        manifest = write_planted_manifest("sector")
        data = _load(manifest)
        del data["alpha"]
        manifest.write_text(json.dumps(data))
        code = cli.run(["-o", str(tmp_path / "out"), "certify", "--ansatz", str(manifest)])
        assert code == 3
        assert "alpha" in capsys.readouterr().err

    def test_unknown_certifier(self, tmp_path, write_planted_manifest):
        """Test an unknown --prop name."""
        manifest = write_planted_manifest("sector")
        assert cli.run(["-o", str(tmp_path / "out"), "certify", "--ansatz", str(manifest), "--prop", "magic"]) == 3

    def test_rerun_is_byte_identical(self, tmp_path, write_planted_manifest):
        """Test that the same inputs give the same hash and the same report bytes."""
        manifest = write_planted_manifest("odd_limit")
        out = tmp_path / "out"
        assert cli.run(["-o", str(out), "certify", "--ansatz", str(manifest)]) == 0
        first = {p.name: p.read_bytes() for p in out.iterdir()}
        assert cli.run(["-o", str(out), "certify", "--ansatz", str(manifest)]) == 0
        second = {p.name: p.read_bytes() for p in out.iterdir()}
        assert second == first


class TestValidateAndReport:
    """Test validate and report."""

    def test_validate_writes_report(self, tmp_path, write_planted_manifest):
        """Test the validation report of a planted ansatz."""
        manifest = write_planted_manifest("rectangle")
        out = tmp_path / "out"
        assert cli.run(["-o", str(out), "validate", "--ansatz", str(manifest)]) == 0
        report = _load(_outputs(out, "-validation.json")[0])
        assert report["regime"] == "Critical"

    def test_report_summary(self, tmp_path, write_planted_manifest):
        """Test the summary of certificate reports."""
        manifest = write_planted_manifest("odd_limit")
        out = tmp_path / "out"
        cli.run(["-o", str(out), "certify", "--ansatz", str(manifest)])
        (report_file,) = _outputs(out, "-odd_limit_test.json")
        summary_dir = tmp_path / "summary"
        assert cli.run(["-o", str(summary_dir), "report", str(report_file)]) == 0
        summary = _load(_outputs(summary_dir, "-summary.json")[0])
        assert summary["reports"][0]["verdict"] == "ContradictionFound"


class TestDatacheck:
    """Test pointwise consistency of ingested patches."""

    def test_flagged_node(self, tmp_path, write_datacheck_patch):
        """Test that the mismatched node is reported with its mesh index."""
        out = tmp_path / "out"
        code = cli.run(["-o", str(out), "datacheck", "--profiles", str(write_datacheck_patch("mismatch"))])
        assert code == 0
        report = _load(_outputs(out, "-datacheck.json")[0])
        assert report["nodes_checked"] == 9
        assert [f["node"] for f in report["flagged"]] == [[36, 720]]
        assert report["flagged"][0]["mismatch"] == pytest.approx(1.0235e-5, rel=1e-6)

    def test_negative_vorticity(self, tmp_path, write_datacheck_patch):
        """Test that a tiny negative W in the open quadrant is listed."""
        out = tmp_path / "out"
        cli.run(["-o", str(out), "datacheck", "--profiles", str(write_datacheck_patch("negative"))])
        report = _load(_outputs(out, "-datacheck.json")[0])
        assert report["negative_w"] == [{"node": [3, 709], "value": -2.9778e-18}]
        assert report["flagged"] == []

    def test_rectangle_screening(self, tmp_path, write_datacheck_patch):
        """Test the rectangle with a strict interior maximum."""
        out = tmp_path / "out"
        cli.run(["-o", str(out), "datacheck", "--profiles", str(write_datacheck_patch("rectangle"))])
        (rect,) = _load(_outputs(out, "-datacheck.json")[0])["rectangles"]
        assert rect["max_node"] == [20, 711]
        assert rect["max_value"] == 2.3461e-16
        assert rect["location"] == "interior"
        assert rect["corners"] == [[19, 710], [21, 710], [21, 712], [19, 712]]

    def test_missing_columns(self, tmp_path, capsys, unit_grid):
        """Test a profile file without the derivative columns."""
        path = write_scalar_csv(tmp_path / "w.csv", ScalarField2D(unit_grid, np.zeros(unit_grid.shape)))
        assert cli.run(["-o", str(tmp_path / "out"), "datacheck", "--profiles", str(path)]) == 3
        assert "columns" in capsys.readouterr().err


class TestUsage:
    """Test argument errors and environment defaults."""

    def test_unknown_flag(self, tmp_path, capsys):
        """Test that argparse errors map to the input-error exit code."""
        assert cli.run(["-o", str(tmp_path), "certify", "--bogus"]) == 3
        assert "error:" in capsys.readouterr().err

    def test_threads_from_environment(self, tmp_path, mocker, write_planted_manifest):
        """Test that BLOWUP_LAB_THREADS lands in the frozen run configuration."""
        mocker.patch.object(config, "_env_threads", "4")
        manifest = write_planted_manifest("odd_limit")
        out = tmp_path / "out"
        cli.run(["-o", str(out), "certify", "--ansatz", str(manifest)])
        saved = _load(_outputs(out, "-config.json")[0])
        assert saved["run"]["threads"] == 4
        assert saved["defaults"]["cli"]["threads"] == 4
