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

"""Locked And Atomic Artifact Writes."""

import os
from contextlib import contextmanager
from datetime import timedelta
from pathlib import Path
from threading import Event, Thread
from typing import Iterator
from uuid import uuid4

from flufl.lock import Lock

from ._util import LOGGER

_LIFETIME = timedelta(seconds=5)


class _Refresher(Thread):
    """Refresh ``lock`` until stopped."""

    def __init__(self, lock: Lock):
        super().__init__(daemon=True)
        self.lock = lock
        self.stopped = Event()

    def run(self):
        while not self.stopped.wait(timeout=1):
            self.lock.refresh(lifetime=_LIFETIME)


@contextmanager
def path_lock(path: Path) -> Iterator[None]:
    """
    Hold an exclusive lock on ``path``.

    The lock file lives next to ``path``. A background thread refreshes it while the caller
    works, so a crashed process releases it after a few seconds.

    >>> from tempfile import TemporaryDirectory
    >>> with TemporaryDirectory() as tmp_dir:
    ...     path = Path(tmp_dir) / "report.csv"
    ...     with path_lock(path):
    ...         path.write_text("check,passed")
    12

    Not reentrant within one process.
    """
    lock_path = path.with_name(f"{path.name}-fracspde.lock")
    lock_path.parent.mkdir(parents=True, exist_ok=True)
    lock = Lock(str(lock_path), lifetime=_LIFETIME)
    lock.lock()
    refresher = _Refresher(lock)
    refresher.start()
    try:
        yield
    finally:
        refresher.stopped.set()
        refresher.join()
        lock.unlock()


@contextmanager
def atomic_update_or_create_path(path: Path) -> Iterator[Path]:
    """
    Write the file ``path`` atomically.

    Yields a temporary sibling path. Once the caller returns without error, the temporary file
    replaces ``path`` in a single rename. Readers see either the old or the new content.

    >>> from tempfile import TemporaryDirectory
    >>> with TemporaryDirectory() as tmp_dir:
    ...     path = Path(tmp_dir) / "out" / "manifest.json"
    ...     with atomic_update_or_create_path(path) as tmp_path:
    ...         tmp_path.write_text("{}")
    ...     path.read_text()
    2
    '{}'

    Nothing is written if the caller does not create the temporary file.
    """
    with path_lock(path):
        tmp_path = path.with_name(f"{path.name}-{uuid4()}")
        try:
            yield tmp_path
            if tmp_path.exists():
                os.replace(tmp_path, path)
                LOGGER.debug("wrote %s", path)
        finally:
            if tmp_path.exists():
                tmp_path.unlink()
