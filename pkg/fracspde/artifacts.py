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

"""
CSV And JSON Artifacts.

Every file is written through :any:`atomic_update_or_create_path`. Floats are rendered with ``repr``, the
shortest text which round-trips, so reruns produce byte-identical files.

>>> format_value(0.1), format_value(True), format_value(None)
('0.1', 'true', '')
"""

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Iterable, List, Mapping, Optional, Sequence

import numpy as np
from pydantic import BaseModel as PydanticBaseModel

from ._basemodel import BaseModel
from ._pathlock import atomic_update_or_create_path

REPORT_FIELDS = ("check", "value", "reference", "tolerance", "passed")
MOMENT_FIELDS = ("t", "x", "p", "estimate", "stderr", "replicas", "seed")
KERNEL_FIELDS = ("i", "j", "t", "x", "G")
RENEWAL_FIELDS = ("t", "f", "tilted")
ML_FIELDS = ("beta", "z", "value", "lower", "upper")
FRONT_FIELDS = ("theta", "t", "proxy")


class CheckResult(BaseModel):
    """
    Outcome Of One Verification Check.

    Args:
        check: Check name, ``<module>.<property>[<case>]``.
        value: Computed value.
        reference: Value compared against.
        tolerance: Allowed deviation.
        passed: Outcome.

    >>> CheckResult(check="kernel.mass", value=1.0, reference=1.0, tolerance=1e-4, passed=True)
    CheckResult(check='kernel.mass', value=1.0, reference=1.0, tolerance=0.0001, passed=True)
    """

    check: str
    value: Optional[float] = None
    reference: Optional[float] = None
    tolerance: Optional[float] = None
    passed: bool

    @staticmethod
    def compare(check: str, value: float, reference: float, tolerance: float, relative: bool = False) -> "CheckResult":
        """
        Check ``|value - reference| <= tolerance``, scaled by ``|reference|`` if ``relative``.

        >>> CheckResult.compare("x", 1.01, 1.0, 0.02, relative=True).passed
        True
        """
        scale = abs(reference) if relative else 1.0
        passed = math.isfinite(value) and abs(value - reference) <= tolerance * scale
        return CheckResult(check=check, value=value, reference=reference, tolerance=tolerance, passed=passed)

    @staticmethod
    def below(check: str, value: float, limit: float) -> "CheckResult":
        """Check ``value <= limit``."""
        return CheckResult(check=check, value=value, reference=limit, passed=bool(value <= limit))

    @staticmethod
    def flag(check: str, passed: bool, value: Optional[float] = None) -> "CheckResult":
        """Boolean check."""
        return CheckResult(check=check, value=value, passed=bool(passed))


def format_value(value: Any) -> str:
    """CSV text of ``value``."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def csv_text(rows: Iterable[Mapping[str, Any]], fieldnames: Sequence[str]) -> str:
    """
    CSV text with header row and LF line endings.

    >>> print(csv_text([{"t": 0.5, "f": 1.0, "tilted": 2}], RENEWAL_FIELDS), end="")
    t,f,tilted
    0.5,1.0,2
    """
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(fieldnames), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({name: format_value(row.get(name)) for name in fieldnames})
    return buffer.getvalue()


def write_csv(path: Path, rows: Iterable[Mapping[str, Any]], fieldnames: Sequence[str]) -> Path:
    """Write ``rows`` to the CSV file ``path``."""
    text = csv_text(rows, fieldnames)
    path.parent.mkdir(parents=True, exist_ok=True)
    with atomic_update_or_create_path(path) as tmp_path:
        tmp_path.write_text(text, encoding="utf-8", newline="")
    return path


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, PydanticBaseModel):
        return obj.model_dump(mode="json")
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"{obj!r} is not JSON serializable")


def json_text(obj: Any) -> str:
    """
    JSON text with sorted keys.

    >>> print(json_text({"b": 1, "a": np.float64(0.5)}), end="")
    {
      "a": 0.5,
      "b": 1
    }
    """
    return json.dumps(obj, default=_jsonable, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(path: Path, obj: Any) -> Path:
    """Write ``obj`` to the JSON file ``path``."""
    text = json_text(obj)
    path.parent.mkdir(parents=True, exist_ok=True)
    with atomic_update_or_create_path(path) as tmp_path:
        tmp_path.write_text(text, encoding="utf-8", newline="")
    return path


def write_report(path: Path, checks: Iterable[CheckResult]) -> Path:
    """Write ``checks`` as report CSV."""
    return write_csv(path, (check.model_dump() for check in checks), REPORT_FIELDS)


def summarize(checks: List[CheckResult]) -> dict:
    """
    Summary with pass/fail per check.

    >>> summarize([CheckResult.flag("a", True), CheckResult.flag("b", False)])["failed"]
    ['b']
    """
    return {
        "checks": {check.check: check.passed for check in checks},
        "failed": [check.check for check in checks if not check.passed],
        "passed": all(check.passed for check in checks),
    }
