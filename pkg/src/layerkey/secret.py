"""Wipeable byte buffers for key material and rendered secrets.

CPython gives no control over copies made of immutable ``bytes`` or
``str`` objects, so every secret this package produces lives in a
``bytearray`` owned by a :class:`SecretBuffer`. The buffer is overwritten
with zeros through ``ctypes.memset`` when it is wiped explicitly, when a
``with`` block exits (normally or by exception), and as a last resort when
the object is garbage collected.
"""

from __future__ import annotations

import ctypes
import hmac
from typing import Iterator


def wipe(buf: bytearray) -> None:
    """Zero ``buf`` in place. Length is preserved."""
    n = len(buf)
    if n:
        ctypes.memset((ctypes.c_char * n).from_buffer(buf), 0, n)


class SecretBuffer:
    """Owns a mutable byte buffer and guarantees it is zeroed on release."""

    __slots__ = ("_buf",)

    def __init__(self, data: bytes | bytearray | memoryview | int = 0) -> None:
        self._buf = bytearray(data)

    @classmethod
    def adopt(cls, buf: bytearray) -> "SecretBuffer":
        """Take ownership of ``buf`` without copying it."""
        obj = cls.__new__(cls)
        obj._buf = buf
        return obj

    @property
    def buffer(self) -> bytearray:
        return self._buf

    def view(self) -> memoryview:
        return memoryview(self._buf)

    def __len__(self) -> int:
        return len(self._buf)

    def __iter__(self) -> Iterator[int]:
        return iter(self._buf)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SecretBuffer):
            return hmac.compare_digest(self._buf, other._buf)
        if isinstance(other, (bytes, bytearray)):
            return hmac.compare_digest(self._buf, other)
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"{type(self).__name__}(<{len(self._buf)} bytes redacted>)"

    def wipe(self) -> None:
        wipe(self._buf)

    @property
    def is_wiped(self) -> bool:
        return not any(self._buf)

    def __enter__(self) -> "SecretBuffer":
        return self

    def __exit__(self, *exc: object) -> None:
        self.wipe()

    def __del__(self) -> None:
        buf = getattr(self, "_buf", None)
        if buf is not None:
            wipe(buf)
