from __future__ import annotations

import os
from pathlib import Path

from .exceptions import LockError


class FileLock:
    """Exclusive lock held by creating ``path`` with ``O_EXCL``.

    A stale lock left by a crashed process must be removed by hand; the
    file holds the owner's pid to help with that.
    """

    def __init__(self, path, what: str = "resource"):
        self.path = Path(path)
        self.what = what
        self._fd = None

    def __enter__(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        try:
            self._fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise LockError(f"{self.what} is locked by another writer: {self.path}") from None
        os.write(self._fd, str(os.getpid()).encode())
        return self

    def __exit__(self, *exc):
        os.close(self._fd)
        self.path.unlink(missing_ok=True)
