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
Logging To The Terminal.

Records go to stderr, so result listings on stdout stay clean. With ``-vv`` every line carries
the seconds since start and the emitting module, which helps when following long replica runs.
"""
import logging
from typing import Dict, Tuple

import click

_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)

# level: (label style, message style)
_STYLES: Dict[int, Tuple[dict, dict]] = {
    logging.DEBUG: ({"bold": True, "dim": True}, {"fg": "cyan", "dim": True}),
    logging.INFO: ({"bold": True, "dim": True}, {"fg": "blue", "dim": True}),
    logging.WARNING: ({"fg": "yellow", "bold": True}, {"fg": "yellow"}),
    logging.ERROR: ({"fg": "red", "bold": True}, {"fg": "red"}),
    logging.CRITICAL: ({"fg": "red", "bold": True}, {"fg": "red", "bold": True}),
}


class LogHandler(logging.Handler):
    """Echo records via click and remember whether an error was logged."""

    def __init__(self):
        super().__init__()
        self.has_errors = False

    def emit(self, record):
        """Emit Message."""
        self.has_errors = self.has_errors or record.levelno >= logging.ERROR
        click.echo(self.format(record), err=True)


class LogFormatter(logging.Formatter):
    """
    Prefix every message line with the level and, on request, elapsed time and module.

    >>> record = logging.makeLogRecord({"levelno": logging.INFO, "levelname": "INFO", "msg": "a\\nb"})
    >>> print(LogFormatter(color=False).format(record))
    INFO:    a
    INFO:    b
    """

    def __init__(self, color: bool, detailed: bool = False):
        super().__init__()
        self.color = color
        self.detailed = detailed

    def format(self, record):
        """Format Message."""
        label = f"{record.levelname}:".ljust(8)
        if self.detailed:
            label = f"{label} {record.relativeCreated / 1000:8.3f}s [{record.module}]"
        lines = record.getMessage().splitlines() or [""]
        if self.color:
            label_style, msg_style = _STYLES.get(record.levelno, _STYLES[logging.DEBUG])
            label = click.style(label, **label_style)
            lines = [click.style(line, **msg_style) for line in lines]
        return "\n".join(f"{label} {line}" for line in lines)


def setup_logging(color: bool, verbose: int) -> LogHandler:
    """Install a :any:`LogHandler` on the root logger, with the level chosen by ``verbose``."""
    handler = LogHandler()
    handler.setFormatter(LogFormatter(color, detailed=verbose > 1))
    root = logging.getLogger()
    root.setLevel(_LEVELS[min(verbose, len(_LEVELS) - 1)])
    root.handlers = [handler]
    return handler
