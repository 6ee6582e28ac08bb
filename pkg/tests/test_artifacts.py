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

"""Artifact Writer Testing."""

import json
import math

import numpy as np

from fracspde.artifacts import (
    REPORT_FIELDS,
    CheckResult,
    csv_text,
    format_value,
    json_text,
    summarize,
    write_csv,
    write_json,
    write_report,
)
from fracspde.datamodel import ModelParams


def test_format_value():
    """Shortest round-tripping text."""
    assert format_value(1 / 3) == "0.3333333333333333"
    assert format_value(np.float64(2.5)) == "2.5"
    assert format_value(np.int64(7)) == "7"
    assert format_value(np.bool_(False)) == "false"
    assert format_value(math.nan) == "nan"
    assert format_value("region[-1.0:1.0]") == "region[-1.0:1.0]"


def test_csv_text():
    """Missing values are empty, extra keys are dropped."""
    text = csv_text([{"t": 1.0, "f": 2.0, "other": 3}, {"t": 2.0}], ("t", "f"))
    assert text == "t,f\n1.0,2.0\n2.0,\n"


def test_json_text():
    """Sorted keys, numpy values and models."""
    text = json_text({"z": np.arange(2), "params": ModelParams(beta=0.5), "flag": np.bool_(True)})
    data = json.loads(text)
    assert list(data) == ["flag", "params", "z"]
    assert data == {"flag": True, "params": {"alpha": 2.0, "beta": 0.5, "d": 1, "nu": 1.0}, "z": [0, 1]}
    assert text.endswith("}\n")


def test_checks():
    """Check constructors."""
    assert CheckResult.compare("a", 1.0, 1.0, 0.0).passed
    assert not CheckResult.compare("a", 1.1, 1.0, 0.05).passed
    assert CheckResult.compare("a", 101.0, 100.0, 0.02, relative=True).passed
    assert not CheckResult.compare("a", math.nan, 1.0, 1.0).passed
    below = CheckResult.below("b", 0.5, 1.0)
    assert below.passed
    assert below.reference == 1.0
    assert below.tolerance is None
    assert not CheckResult.below("b", 2.0, 1.0).passed
    assert CheckResult.flag("c", True).value is None


def test_summarize():
    """Overall pass only if every check passed."""
    checks = [CheckResult.flag("a", True), CheckResult.flag("b", True)]
    assert summarize(checks) == {"checks": {"a": True, "b": True}, "failed": [], "passed": True}
    assert not summarize([*checks, CheckResult.flag("c", False)])["passed"]


def test_write(tmp_path):
    """Files are created with their parent directories and rewritten identically."""
    path = tmp_path / "out" / "table.csv"
    write_csv(path, [{"t": 0.1}], ("t",))
    first = path.read_bytes()
    write_csv(path, [{"t": 0.1}], ("t",))
    assert path.read_bytes() == first == b"t\n0.1\n"

    report = write_report(tmp_path / "report.csv", [CheckResult.compare("kernel.mass", 1.0, 1.0, 1e-4)])
    lines = report.read_text(encoding="utf-8").splitlines()
    assert lines == [",".join(REPORT_FIELDS), "kernel.mass,1.0,1.0,0.0001,true"]

    summary = write_json(tmp_path / "summary.json", {"b": 1, "a": 2})
    assert summary.read_text(encoding="utf-8") == '{\n  "a": 2,\n  "b": 1\n}\n'
