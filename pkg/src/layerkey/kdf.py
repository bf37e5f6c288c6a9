"""Input normalization, salt preprocessing and the chained Argon2id derivation.

A master secret and an ordered list of context layers are reduced to a
single 32-byte key::

    K0 = utf8(normalize(master))
    Ki = Argon2id(K(i-1), salt(Li), m, t, p, 32)     for i = 1..n

Only one predecessor key is alive at any point of the chain; every
intermediate is zeroed as soon as its successor exists, and on error.
"""

from __future__ import annotations

import hashlib
import os
import unicodedata
from dataclasses import dataclass
from typing import Iterable, Sequence

from argon2.low_level import Type, error_to_str, ffi, lib

from .secret import SecretBuffer, wipe

KEY_LEN = 32
MIN_SALT_LEN = 16
ARGON2_VERSION = 0x13


class KdfError(Exception):
    """Base class for derivation errors."""


class EmptyAfterNormalization(KdfError, ValueError):
    """An input was empty once whitespace was trimmed."""


class KdfFailure(KdfError):
    """Argon2 rejected its parameters or failed to run."""


def normalize(raw: str) -> str:
    """Trim surrounding whitespace, then apply Unicode NFC."""
    value = unicodedata.normalize("NFC", raw.strip())
    if not value:
        raise EmptyAfterNormalization("input is empty after normalization")
    return value


def make_salt(layer: str) -> bytes:
    """Salt bytes for one layer.

    Layers of at least 16 UTF-8 bytes are used verbatim; shorter ones are
    expanded to 64 bytes with BLAKE2b-512.
    """
    data = layer.encode("utf-8")
    if not data:
        raise EmptyAfterNormalization("layer is empty")
    if len(data) >= MIN_SALT_LEN:
        return data
    return hashlib.blake2b(data, digest_size=64).digest()


@dataclass(frozen=True)
class KdfParams:
    memory_kib: int
    iterations: int
    lanes: int
    out_len: int = KEY_LEN

    def __post_init__(self) -> None:
        if self.out_len != KEY_LEN:
            raise ValueError(f"out_len must be {KEY_LEN}, got {self.out_len}")
        if not 1 <= self.lanes <= 0xFFFFFF:
            raise ValueError(f"lanes must be in [1, 2^24 - 1], got {self.lanes}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.memory_kib < 8 * self.lanes:
            raise ValueError(
                f"memory_kib must be >= 8 * lanes ({8 * self.lanes}), got {self.memory_kib}"
            )

    @property
    def memory_mib(self) -> float:
        return self.memory_kib / 1024


STANDARD = KdfParams(memory_kib=64 * 1024, iterations=16, lanes=6)
PARANOID = KdfParams(memory_kib=128 * 1024, iterations=32, lanes=6)
PROFILES = {"standard": STANDARD, "paranoid": PARANOID}

# Fast parameters for exercising chain logic in tests and the audit suite.
# Deliberately absent from PROFILES so the CLI cannot select it.
REDUCED = KdfParams(memory_kib=8 * 1024, iterations=1, lanes=1)


class MasterSecret(SecretBuffer):
    """UTF-8 bytes of the normalized master secret."""

    __slots__ = ()

    @classmethod
    def from_text(cls, raw: str) -> "MasterSecret":
        return cls(normalize(raw).encode("utf-8"))


class DerivedKey(SecretBuffer):
    """A 32-byte chain output."""

    __slots__ = ()

    def __init__(self, data: bytes | bytearray | memoryview | int = KEY_LEN) -> None:
        super().__init__(data)
        if len(self._buf) != KEY_LEN:
            n = len(self._buf)
            self.wipe()
            raise ValueError(f"derived key must be {KEY_LEN} bytes, got {n}")


@dataclass(frozen=True)
class LayerSequence:
    layers: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.layers:
            raise ValueError("at least one layer is required")
        for layer in self.layers:
            if normalize(layer) != layer:
                raise ValueError("layers must be normalized; use LayerSequence.from_raw")

    @classmethod
    def from_raw(cls, raw: Iterable[str]) -> "LayerSequence":
        return cls(tuple(normalize(s) for s in raw))

    def __len__(self) -> int:
        return len(self.layers)

    def __iter__(self):
        return iter(self.layers)


def _default_threads(lanes: int) -> int:
    return max(1, min(lanes, os.cpu_count() or 1))


def argon2id_step(
    key_material: bytes | bytearray | SecretBuffer,
    salt: bytes,
    params: KdfParams,
    *,
    threads: int | None = None,
) -> DerivedKey:
    """One raw Argon2id (v0x13) invocation writing straight into a DerivedKey.

    ``threads`` only controls scheduling; the output depends on
    ``params.lanes`` alone.
    """
    if isinstance(key_material, SecretBuffer):
        key_material = key_material.buffer
    if not key_material:
        raise ValueError("key material must be non-empty")
    if len(salt) < MIN_SALT_LEN:
        raise ValueError(f"salt must be at least {MIN_SALT_LEN} bytes")

    out = DerivedKey()
    # from_buffer on a bytes object is read-only; bytearray keeps the
    # password pointer on memory we are able to wipe.
    pwd_src = key_material if isinstance(key_material, bytearray) else bytearray(key_material)
    try:
        ctx = ffi.new("argon2_context *")
        out_c = ffi.from_buffer("uint8_t[]", out.buffer)
        pwd_c = ffi.from_buffer("uint8_t[]", pwd_src)
        salt_c = ffi.from_buffer("uint8_t[]", salt)
        ctx.out = out_c
        ctx.outlen = KEY_LEN
        ctx.pwd = pwd_c
        ctx.pwdlen = len(pwd_src)
        ctx.salt = salt_c
        ctx.saltlen = len(salt)
        ctx.secret = ffi.NULL
        ctx.secretlen = 0
        ctx.ad = ffi.NULL
        ctx.adlen = 0
        ctx.t_cost = params.iterations
        ctx.m_cost = params.memory_kib
        ctx.lanes = params.lanes
        ctx.threads = threads if threads is not None else _default_threads(params.lanes)
        ctx.version = ARGON2_VERSION
        ctx.allocate_cbk = ffi.NULL
        ctx.free_cbk = ffi.NULL
        ctx.flags = lib.ARGON2_DEFAULT_FLAGS
        rc = lib.argon2_ctx(ctx, Type.ID.value)
    except BaseException:
        out.wipe()
        raise
    finally:
        if pwd_src is not key_material:
            wipe(pwd_src)
    if rc != lib.ARGON2_OK:
        out.wipe()
        raise KdfFailure(f"argon2id failed: {error_to_str(rc)}")
    return out


def derive_chain(
    master: MasterSecret,
    layers: LayerSequence | Sequence[str],
    params: KdfParams = STANDARD,
    *,
    threads: int | None = None,
) -> DerivedKey:
    """Fold Argon2id over the layers, starting from the master secret bytes."""
    if not isinstance(layers, LayerSequence):
        layers = LayerSequence.from_raw(layers)
    salts = [make_salt(layer) for layer in layers]

    current: SecretBuffer = master
    try:
        for salt in salts:
            nxt = argon2id_step(current, salt, params, threads=threads)
            if current is not master:
                current.wipe()
            current = nxt
    except BaseException:
        if current is not master:
            current.wipe()
        raise
    assert isinstance(current, DerivedKey)
    return current
