"""The embedded EFF Large Wordlist and its integrity checks.

The asset is the EFF file exactly as published (``NNNNN<TAB>word`` lines,
dice indices included). Its SHA-256 is pinned below; the same checks run
when the package is built (see ``setup.py``) and every time the list is
loaded, so an unverified list cannot be constructed.
"""

from __future__ import annotations

import hashlib
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

WORD_COUNT = 7776
EXPECTED_SHA256 = "addd35536511597a02fa0a9ff1e5284677b8883b83e986e43f15a3db996b903e"
KNOWN_INDICES = {0: "abacus", 469: "balance", 3695: "life", 7775: "zoom"}
ASSET = "eff_large_wordlist.txt"


class WordlistError(Exception):
    check = "wordlist"


class IntegrityFailure(WordlistError):
    check = "sha256"


class CountMismatch(WordlistError):
    check = "count"


class DuplicateWord(WordlistError):
    check = "uniqueness"


class SpotCheckFailure(WordlistError):
    check = "known-index"


@dataclass(frozen=True)
class Wordlist:
    words: tuple[str, ...]
    digest: bytes

    def __len__(self) -> int:
        return len(self.words)

    def __getitem__(self, index: int) -> str:
        return word_at(self, index)

    def __contains__(self, word: object) -> bool:
        return word in self._index

    @property
    def _index(self) -> frozenset[str]:
        return _word_set(self.words)


@lru_cache(maxsize=4)
def _word_set(words: tuple[str, ...]) -> frozenset[str]:
    return frozenset(words)


def parse_eff(raw: bytes) -> tuple[str, ...]:
    try:
        text = raw.decode("ascii")
    except UnicodeDecodeError as exc:
        raise IntegrityFailure(f"non-ASCII byte at offset {exc.start}") from None
    words = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].isdigit():
            raise WordlistError(f"line {lineno}: expected 'NNNNN<TAB>word'")
        words.append(parts[1].strip())
    return tuple(words)


def verify(raw: bytes) -> Wordlist:
    """Run all integrity checks over a serialized list and return it."""
    words = parse_eff(raw)
    if len(words) != WORD_COUNT:
        raise CountMismatch(f"expected {WORD_COUNT} words, got {len(words)}")
    dups = [w for w, c in Counter(words).items() if c > 1]
    if dups:
        raise DuplicateWord(f"duplicate words: {', '.join(sorted(dups)[:5])}")
    for index, expected in KNOWN_INDICES.items():
        if words[index] != expected:
            raise SpotCheckFailure(
                f"word {index} is {words[index]!r}, expected {expected!r}"
            )
    digest = hashlib.sha256(raw).digest()
    if digest.hex() != EXPECTED_SHA256:
        raise IntegrityFailure(
            f"SHA-256 mismatch: expected {EXPECTED_SHA256}, got {digest.hex()}"
        )
    return Wordlist(words=words, digest=digest)


def read_asset() -> bytes:
    return resources.files(__package__).joinpath("data", ASSET).read_bytes()


@lru_cache(maxsize=1)
def load_and_verify() -> Wordlist:
    return verify(read_asset())


def word_at(wl: Wordlist, index: int) -> str:
    if not 0 <= index < WORD_COUNT:
        raise IndexError(f"word index {index} out of range [0, {WORD_COUNT})")
    return wl.words[index]
