# Copyright 2023 c0fec0de
#
# This file is part of fracspde.
#
# fracspde is free software: you can redistribute it and/or modify it under
# the terms of the GNU Lesser General Public License as published by the Free
# Software Foundation, either version 3 of the License, or (at your option) any
# later version.
#
# fracspde is distributed in the hope that it will be useful, but WITHOUT
# ANY WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS
# FOR A PARTICULAR PURPOSE. See the GNU General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public License along
# with fracspde. If not, see <https://www.gnu.org/licenses/>.

"""Experiment Command Line Interface Testing."""

from pytest import fixture, mark

from .util import chdir, cli, read_csv, read_json, write_config

GRID = {"x_min": -8.0, "x_max": 8.0, "nx": 64, "t_max": 1.0, "nt": 8}


@fixture
def workdir(tmp_path):
    """Run inside a temporary directory."""
    with chdir(tmp_path):
        yield tmp_path


def test_ml(workdir):
    """Mittag-Leffler table with its bounds."""
    config = write_config(workdir / "ml.json", ml={"betas": [0.5], "x_min": 0.1, "x_max": 10.0, "points": 5})
    assert cli(["ml", "-c", str(config), "-o", "out"])[-2:] == ["1 checks passed. Artifacts in 'out'.", ""]
    rows = read_csv(workdir / "out" / "ml_table.csv")
    assert len(rows) == 5
    assert rows[0]["beta"] == "0.5"
    assert rows[0]["z"] == "-0.1"
    for row in rows:
        assert float(row["lower"]) <= float(row["value"]) <= float(row["upper"])
    summary = read_json(workdir / "out" / "summary.json")
    assert summary["command"] == "ml"
    assert summary["checks"] == {"special_fn.sandwich": True}
    manifest = read_json(workdir / "out" / "manifest.json")
    assert manifest["config"]["command"] == "ml"
    assert manifest["seed_lineage"]["seed"] == 0


def test_kernel(workdir):
    """Kernel table with mass and L² row checks."""
    grid = {**GRID, "t_max": 2.0}
    config = write_config(workdir / "kernel.json", params={"beta": 0.5}, grid=grid)
    assert cli(["kernel", "-c", str(config), "-o", "out"])[-2:] == ["2 checks passed. Artifacts in 'out'.", ""]
    rows = read_csv(workdir / "out" / "kernel_table.csv")
    assert len(rows) == 8 * 129
    assert list(rows[0]) == ["i", "j", "t", "x", "G"]
    report = read_csv(workdir / "out" / "kernel_report.csv")
    assert [row["check"] for row in report] == ["kernel.table_mass", "kernel.table_l2_rows"]
    assert all(row["passed"] == "true" for row in report)


def test_renewal(workdir):
    """Renewal solution with its asymptote and the configured output directory."""
    cli(["config", "set", "output_dir", "results", "--user"])
    config = write_config(workdir / "renewal.json", renewal={"points": 64})
    assert cli(["renewal", "-c", str(config)])[-2:] == ["1 checks passed. Artifacts in 'results'.", ""]
    rows = read_csv(workdir / "results" / "renewal.csv")
    assert len(rows) == 64
    assert float(rows[-1]["tilted"]) > float(rows[0]["tilted"]) > 0
    summary = read_json(workdir / "results" / "summary.json")
    assert summary["passed"]
    assert list(summary["diagnostics"]) == ["renewal.drift"]
    assert (workdir / "results" / "renewal_diagnostics.csv").exists()


def test_simulate_noise_free(workdir):
    """σ ≡ 0 reproduces the initial data exactly."""
    config = write_config(
        workdir / "sim.json", params={"beta": 0.5}, grid=GRID, nonlinearity={"lambda": 0.0}, replicas=4
    )
    assert cli(["simulate", "-c", str(config), "-o", "out"])[-2:] == ["6 checks passed. Artifacts in 'out'.", ""]
    rows = read_csv(workdir / "out" / "moments.csv")
    assert len(rows) == 5 * 9
    assert {row["estimate"] for row in rows} == {"1.0"}
    assert {row["x"] for row in rows} == {"-5.375", "-2.625", "0.125", "2.625", "5.375"}
    assert {row["replicas"] for row in rows} == {"4"}


def test_simulate_rerun(workdir):
    """A manifest reproduces the run byte by byte."""
    config = write_config(workdir / "sim.json", params={"beta": 0.5}, grid=GRID, replicas=20, seed=42)
    cli(["simulate", "-c", str(config), "-o", "first", "--tol", "se_bands=100"])
    manifest = workdir / "first" / "manifest.json"
    assert read_json(manifest)["config"]["tolerances"]["se_bands"] == 100.0
    cli(["simulate", "-c", str(manifest), "-o", "second"])
    first = (workdir / "first" / "moments.csv").read_bytes()
    assert first == (workdir / "second" / "moments.csv").read_bytes()
    cli(["simulate", "-c", str(manifest), "-o", "third", "--seed", "43"])
    assert first != (workdir / "third" / "moments.csv").read_bytes()


@mark.parametrize(
    "content",
    [
        {"replicas": 0},
        {"bogus": 1},
        {"grid": {"x_min": 1.0, "x_max": -1.0}},
        {"nonlinearity": {"lambda": -1.0}},
    ],
)
def test_invalid_config(workdir, content):
    """Invalid configurations exit with status 2."""
    write_config(workdir / "bad.json", **content)
    output = cli(["simulate", "-c", "bad.json"], exit_code=2)
    assert output[0] == "Error: Experiment configuration 'bad.json' is invalid:"
    assert not (workdir / "fracspde-out").exists()


def test_invalid_json(workdir):
    """Unparsable files exit with status 2."""
    path = workdir / "broken.json"
    path.write_text("{", encoding="utf-8")
    cli(["renewal", "-c", str(path)], exit_code=2)


@mark.parametrize("option", [["--tol", "nope=1"], ["--tol", "se_bands"], ["--tol", "se_bands=-1"], ["--seed", "-1"]])
def test_invalid_override(workdir, option):
    """Invalid command line overrides exit with status 2."""
    output = cli(["renewal", *option], exit_code=2)
    assert output[0] == "Error: Experiment configuration is invalid:"


def test_numerical_error(workdir):
    """Numerical failures exit with status 3."""
    config = write_config(workdir / "sim.json", params={"alpha": 1.5}, grid=GRID, replicas=2)
    output = cli(["simulate", "-c", str(config), "-o", "out"], exit_code=3)
    assert output[0].startswith("Error: simulate:")
    assert "requires alpha=2 and d=1" in output[0]


def test_usage_errors(workdir):
    """Click rejects unknown suites and missing files."""
    cli(["verify", "--suite", "bogus"], exit_code=2)
    cli(["simulate", "-c", "missing.json"], exit_code=2)


def test_verify_kernel(workdir):
    """The kernel suite passes with default tolerances."""
    config = write_config(workdir / "verify.json", params={"beta": 0.5}, grid={**GRID, "t_max": 2.0})
    output = cli(["verify", "--suite", "kernel", "-c", str(config), "-o", "out"])
    assert output[-2:] == ["26 checks passed. Artifacts in 'out'.", ""]
    report = read_csv(workdir / "out" / "kernel_report.csv")
    assert len(report) == 26
    assert all(row["passed"] == "true" for row in report)
    names = [row["check"] for row in report]
    assert names[:3] == ["kernel.gaussian[t=0.25]", "kernel.gaussian[t=1.0]", "kernel.gaussian[t=4.0]"]
    assert "kernel.spectral_agreement" in names
    assert "kernel.exp_moment[beta=0.75 lambda=1.0 s=0.5]" in names
    assert names[-2:] == ["kernel.table_mass", "kernel.table_l2_rows"]
    assert read_json(workdir / "out" / "summary.json")["passed"]


def test_verify_renewal(workdir):
    """The renewal suite passes with default tolerances."""
    output = cli(["verify", "--suite", "renewal", "-o", "out"])
    assert output[-2:] == ["19 checks passed. Artifacts in 'out'.", ""]
    report = read_csv(workdir / "out" / "renewal_report.csv")
    assert len(report) == 19
    assert all(row["passed"] == "true" for row in report)
    names = {row["check"] for row in report}
    for theta in (0.25, 0.5, 0.75):
        assert f"renewal.asymptote[theta={theta}]" in names
        assert f"renewal.tilted_equivalence[theta={theta}]" in names
        assert f"renewal.scheme_agreement[theta={theta}]" in names
    diagnostics = read_csv(workdir / "out" / "renewal_diagnostics.csv")
    assert [row["check"] for row in diagnostics] == [
        "renewal.picard_contraction[above]",
        "renewal.picard_contraction[below]",
    ]
