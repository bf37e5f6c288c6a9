"""Render a derived key as a mnemonic phrase or a password.

The key seeds a ChaCha20 keystream (all-zero 96-bit nonce, block counter
starting at 0). Fixed-width samples are read from the stream in order and
mapped to an index in ``[0, n)`` by rejection: a sample ``r`` is kept only
when ``r < T`` with ``T = floor(2**b / n) * n``, and the index is
``r % n``. Every accepted index has exactly ``T / n`` preimages, so the
output is uniform.

Mnemonic words use 16-bit samples (two keystream bytes, little-endian);
password characters use single bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms

from .kdf import KEY_LEN, DerivedKey
from .secret import SecretBuffer, wipe
from .wordlist import WORD_COUNT, Wordlist, load_and_verify

# A-Z, a-z, 0-9, then 28 specials.
ALPHABET = (
    "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    "abcdefghijklmnopqrstuvwxyz"
    "0123456789"
    "!@#$%^&*()_+-=[]{}|;:,.<>?/~"
)
WORD_SEPARATOR = "-"

# Keystream bytes one generate_* call may consume before giving up.
MAX_KEYSTREAM_BYTES = 1 << 20

_BLOCK = 64
_ZERO_BLOCKS = bytes(_BLOCK * 16)


class KeystreamExhausted(RuntimeError):
    """The rejection loop hit the keystream consumption guard."""


@dataclass(frozen=True)
class RejectionSpec:
    bits: int
    n: int
    threshold: int

    def __post_init__(self) -> None:
        if self.bits < 1 or not 1 <= self.n <= 1 << self.bits:
            raise ValueError(f"need 1 <= n <= 2^bits, got bits={self.bits} n={self.n}")
        if self.threshold != ((1 << self.bits) // self.n) * self.n:
            raise ValueError("threshold must equal floor(2^bits / n) * n")

    @classmethod
    def for_range(cls, bits: int, n: int) -> "RejectionSpec":
        if bits < 1 or not 1 <= n <= 1 << bits:
            raise ValueError(f"need 1 <= n <= 2^bits, got bits={bits} n={n}")
        return cls(bits, n, ((1 << bits) // n) * n)

    @property
    def space(self) -> int:
        return 1 << self.bits

    def accept(self, sample: int) -> int | None:
        """Index for ``sample``, or None when it falls in the rejection zone."""
        if sample < self.threshold:
            return sample % self.n
        return None


MNEMONIC_SPEC = RejectionSpec.for_range(16, WORD_COUNT)
PASSWORD_SPEC = RejectionSpec.for_range(8, len(ALPHABET))


class KeystreamReader:
    """Sequential reader over the ChaCha20 keystream for (key, zero nonce).

    Keystream bytes are produced a few blocks at a time into a private
    buffer that is wiped on refill and on close.
    """

    def __init__(self, key: DerivedKey | bytes | bytearray, limit: int | None = MAX_KEYSTREAM_BYTES) -> None:
        raw = key.buffer if isinstance(key, SecretBuffer) else key
        if len(raw) != KEY_LEN:
            raise ValueError(f"key must be {KEY_LEN} bytes")
        # 16-byte nonce argument: 32-bit LE block counter, then the 96-bit nonce.
        self._enc = Cipher(algorithms.ChaCha20(raw, bytes(16)), mode=None).encryptor()
        self._buf = bytearray(len(_ZERO_BLOCKS))
        self._pos = len(self._buf)
        self.position = 0
        self.limit = limit

    def _refill(self) -> None:
        wipe(self._buf)
        self._enc.update_into(_ZERO_BLOCKS, self._buf)
        self._pos = 0

    def read(self, n: int) -> bytearray:
        if self.limit is not None and self.position + n > self.limit:
            raise KeystreamExhausted(
                f"rejection sampling consumed more than {self.limit} keystream bytes"
            )
        out = bytearray(n)
        filled = 0
        while filled < n:
            if self._pos == len(self._buf):
                self._refill()
            take = min(n - filled, len(self._buf) - self._pos)
            out[filled:filled + take] = self._buf[self._pos:self._pos + take]
            self._pos += take
            filled += take
        self.position += n
        return out

    def next_u8(self) -> int:
        b = self.read(1)
        v = b[0]
        wipe(b)
        return v

    def next_u16(self) -> int:
        b = self.read(2)
        v = b[0] | (b[1] << 8)
        wipe(b)
        return v

    def next_sample(self, bits: int) -> int:
        if bits == 8:
            return self.next_u8()
        if bits == 16:
            return self.next_u16()
        raise ValueError(f"unsupported sample width {bits}")

    def close(self) -> None:
        wipe(self._buf)
        self._pos = len(self._buf)
        self._enc = None

    def __enter__(self) -> "KeystreamReader":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


def sample_uniform(reader: KeystreamReader, spec: RejectionSpec) -> int:
    """Draw samples until one lands below the threshold; return it mod n."""
    while True:
        index = spec.accept(reader.next_sample(spec.bits))
        if index is not None:
            return index


class MnemonicPhrase(SecretBuffer):
    """Hyphen-joined words, held as UTF-8 in a wipeable buffer."""

    __slots__ = ("count",)

    @property
    def entropy(self) -> float:
        return entropy_bits("mnemonic", self.count)

    def reveal(self) -> str:
        return self.buffer.decode("ascii")


class PasswordString(SecretBuffer):
    __slots__ = ("count",)

    @property
    def entropy(self) -> float:
        return entropy_bits("password", self.count)

    def reveal(self) -> str:
        return self.buffer.decode("ascii")


def generate_mnemonic(key: DerivedKey, count: int, wordlist: Wordlist | None = None) -> MnemonicPhrase:
    if count < 1:
        raise ValueError("word count must be >= 1")
    wordlist = wordlist or load_and_verify()
    with KeystreamReader(key) as reader:
        indices = [sample_uniform(reader, MNEMONIC_SPEC) for _ in range(count)]
    words = [wordlist.words[i] for i in indices]
    # Sized up front: growing a bytearray may leave stale copies behind.
    buf = bytearray(sum(map(len, words)) + count - 1)
    out = MnemonicPhrase.adopt(buf)
    out.count = count
    pos = 0
    for i, word in enumerate(words):
        if i:
            buf[pos] = ord(WORD_SEPARATOR)
            pos += 1
        buf[pos:pos + len(word)] = word.encode("ascii")
        pos += len(word)
    indices.clear()
    words.clear()
    return out


def generate_password(key: DerivedKey, length: int) -> PasswordString:
    if length < 1:
        raise ValueError("password length must be >= 1")
    table = ALPHABET.encode("ascii")
    buf = bytearray(length)
    out = PasswordString.adopt(buf)
    out.count = length
    try:
        with KeystreamReader(key) as reader:
            for i in range(length):
                buf[i] = table[sample_uniform(reader, PASSWORD_SPEC)]
    except BaseException:
        out.wipe()
        raise
    return out


def entropy_bits(mode: str, count: int) -> float:
    """Bits carried by ``count`` uniform words or characters."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if mode == "mnemonic":
        return count * math.log2(WORD_COUNT)
    if mode == "password":
        return count * math.log2(len(ALPHABET))
    raise ValueError(f"unknown mode {mode!r}")
