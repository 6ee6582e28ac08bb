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

"""Locked And Atomic Writes."""

from threading import Thread

from fracspde._pathlock import atomic_update_or_create_path, path_lock


def _files(path):
    return sorted(item.name for item in path.iterdir() if not item.name.endswith(".lock"))


def test_path_lock(tmp_path):
    """Two writers are serialized."""
    path = tmp_path / "report.csv"
    order = []

    def writer(name):
        with path_lock(path):
            order.append(f"{name}-enter")
            path.write_text(name, encoding="utf-8")
            order.append(f"{name}-leave")

    threads = [Thread(target=writer, args=(name,)) for name in ("a", "b")]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()
    assert sorted(order) == ["a-enter", "a-leave", "b-enter", "b-leave"]
    assert order[0][0] == order[1][0]
    assert path.read_text(encoding="utf-8") in ("a", "b")


def test_atomic_updates_on_file(tmp_path):
    """Test if atomic file updates work."""
    path = tmp_path / "out" / "summary.json"
    path.parent.mkdir()

    with atomic_update_or_create_path(path) as tmp:
        assert not tmp.exists()
        tmp.write_text("{}", encoding="utf-8")
    assert path.read_text(encoding="utf-8") == "{}"

    with atomic_update_or_create_path(path) as tmp:
        tmp.write_text('{"passed": true}', encoding="utf-8")
        assert path.read_text(encoding="utf-8") == "{}"
    assert path.read_text(encoding="utf-8") == '{"passed": true}'
    assert _files(path.parent) == ["summary.json"]


def test_atomic_update_failure(tmp_path):
    """A failing writer leaves the old content."""
    path = tmp_path / "moments.csv"
    path.write_text("old", encoding="utf-8")
    try:
        with atomic_update_or_create_path(path) as tmp:
            tmp.write_text("new", encoding="utf-8")
            raise RuntimeError("interrupted")
    except RuntimeError:
        pass
    assert path.read_text(encoding="utf-8") == "old"
    assert _files(tmp_path) == ["moments.csv"]


def test_atomic_create_without_input(tmp_path):
    """Test if using the atomic create works if no file is created."""
    path = tmp_path / "test.txt"

    with atomic_update_or_create_path(path):
        pass

    assert not path.exists()
