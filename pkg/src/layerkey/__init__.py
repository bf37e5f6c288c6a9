"""Stateless hierarchical secret derivation.

A master secret is chained through Argon2id once per context layer and the
resulting 256-bit key is rendered as an EFF-wordlist mnemonic or a
password by bias-free rejection sampling over a ChaCha20 keystream.
"""

from .kdf import (
    PARANOID,
    PROFILES,
    STANDARD,
    DerivedKey,
    KdfParams,
    LayerSequence,
    MasterSecret,
    derive_chain,
    make_salt,
    normalize,
)
from .sampler import ALPHABET, entropy_bits, generate_mnemonic, generate_password
from .wordlist import load_and_verify

__all__ = [
    "ALPHABET",
    "PARANOID",
    "PROFILES",
    "STANDARD",
    "DerivedKey",
    "KdfParams",
    "LayerSequence",
    "MasterSecret",
    "derive_chain",
    "entropy_bits",
    "generate_mnemonic",
    "generate_password",
    "load_and_verify",
    "make_salt",
    "normalize",
]
