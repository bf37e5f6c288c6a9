import hashlib
import unicodedata

import pytest
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.kdf.argon2 import Argon2id as OpenSSLArgon2id
from hypothesis import given, settings
from hypothesis import strategies as st

from layerkey import kdf
from layerkey.kdf import (
    PARANOID,
    REDUCED,
    STANDARD,
    DerivedKey,
    EmptyAfterNormalization,
    KdfFailure,
    KdfParams,
    LayerSequence,
    MasterSecret,
    argon2id_step,
    derive_chain,
    make_salt,
    normalize,
)
from layerkey.secret import SecretBuffer

# BLAKE2b-512(b"out"), computed with OpenSSL's BLAKE2b through `cryptography`.
BLAKE2B_OUT = bytes.fromhex(
    "8b41f2c447a3b7f268b40473b925f50058ca3ff595c5cdd85de3f0c820c14c1f"
    "e42a42fb27ac8a3dcc91b9f9143464f82b8aa4849b8240855661bca4b4855270"
)


def openssl_argon2id(password, salt, params):
    return OpenSSLArgon2id(
        salt=salt, length=32, iterations=params.iterations,
        lanes=params.lanes, memory_cost=params.memory_kib,
    ).derive(bytes(password))


class TestNormalize:
    def test_trims(self):
        assert normalize("  balance  ") == "balance"

    def test_composes_nfd(self):
        assert normalize("cafe\u0301") == "caf\u00e9"

    def test_nfc_idempotent(self):
        assert normalize("caf\u00e9") == "caf\u00e9"

    @pytest.mark.parametrize("raw", ["", "   ", "\t\n", "　"])
    def test_empty_rejected(self, raw):
        with pytest.raises(EmptyAfterNormalization):
            normalize(raw)

    @given(st.text(min_size=1))
    def test_properties(self, raw):
        try:
            v = normalize(raw)
        except EmptyAfterNormalization:
            assert not unicodedata.normalize("NFC", raw.strip())
            return
        assert v == unicodedata.normalize("NFC", v)
        assert v == v.strip()
        assert normalize(v) == v


class TestSalt:
    def test_sixteen_bytes_pass_through(self):
        assert make_salt("exactly-16-bytes") == b"exactly-16-bytes"

    def test_short_layer_hashed(self):
        assert make_salt("out") == BLAKE2B_OUT

    def test_oracle_digest_is_independent(self):
        h = hashes.Hash(hashes.BLAKE2b(64))
        h.update(b"out")
        assert h.finalize() == BLAKE2B_OUT

    def test_fifteen_bytes_hashed(self):
        s = make_salt("fifteen-bytes!!")
        assert len(s) == 64
        assert s == hashlib.blake2b(b"fifteen-bytes!!", digest_size=64).digest()

    def test_multibyte_length_counts_bytes(self):
        layer = "\u00e9" * 8  # 8 characters, 16 UTF-8 bytes
        assert make_salt(layer) == layer.encode()

    @given(st.text(min_size=1, max_size=40).filter(lambda s: s.encode()))
    def test_salt_length_invariant(self, layer):
        s = make_salt(layer)
        n = len(layer.encode())
        assert len(s) == (n if n >= 16 else 64)


class TestParams:
    def test_profiles(self):
        assert (STANDARD.memory_kib, STANDARD.iterations, STANDARD.lanes, STANDARD.out_len) == (65536, 16, 6, 32)
        assert (PARANOID.memory_kib, PARANOID.iterations, PARANOID.lanes, PARANOID.out_len) == (131072, 32, 6, 32)

    def test_reduced_not_selectable(self):
        assert REDUCED not in kdf.PROFILES.values()

    @pytest.mark.parametrize("kw", [
        dict(memory_kib=47, iterations=1, lanes=6),
        dict(memory_kib=64, iterations=0, lanes=1),
        dict(memory_kib=64, iterations=1, lanes=0),
        dict(memory_kib=64, iterations=1, lanes=1, out_len=64),
    ])
    def test_structural_minima(self, kw):
        with pytest.raises(ValueError):
            KdfParams(**kw)

    def test_custom_params(self):
        p = KdfParams(memory_kib=48, iterations=2, lanes=6)
        assert len(argon2id_step(b"k", b"s" * 16, p)) == 32


class TestArgon2idStep:
    def test_matches_openssl(self, reduced):
        salt = make_salt("out")
        key = argon2id_step(b"life", salt, reduced)
        assert key == openssl_argon2id(b"life", salt, reduced)

    def test_matches_openssl_multilane(self):
        p = KdfParams(memory_kib=256, iterations=3, lanes=6)
        key = argon2id_step(b"some key", b"sixteen byte slt", p)
        assert key == openssl_argon2id(b"some key", b"sixteen byte slt", p)

    def test_deterministic(self, reduced):
        a = argon2id_step(b"k", make_salt("x"), reduced)
        b = argon2id_step(b"k", make_salt("x"), reduced)
        assert a == b

    def test_salt_sensitive(self, reduced):
        assert argon2id_step(b"k", make_salt("x"), reduced) != argon2id_step(b"k", make_salt("y"), reduced)

    def test_thread_count_does_not_matter(self):
        p = KdfParams(memory_kib=1024, iterations=2, lanes=6)
        outs = {argon2id_step(b"k", b"s" * 16, p, threads=t).buffer.hex() for t in (1, 2, 6)}
        assert len(outs) == 1

    def test_library_rejection_surfaces_as_kdf_failure(self, reduced):
        with pytest.raises(KdfFailure):
            argon2id_step(b"k", b"s" * 16, reduced, threads=0)

    def test_accepts_secret_buffer(self, reduced):
        m = MasterSecret.from_text("life")
        assert argon2id_step(m, make_salt("out"), reduced) == argon2id_step(b"life", make_salt("out"), reduced)
        assert m.buffer == b"life"

    def test_rejects_empty_key_and_short_salt(self, reduced):
        with pytest.raises(ValueError):
            argon2id_step(b"", b"s" * 16, reduced)
        with pytest.raises(ValueError):
            argon2id_step(b"k", b"short", reduced)


class TestChain:
    def test_single_layer_equals_step(self, reduced):
        chain = derive_chain(MasterSecret.from_text("life"), ["out"], reduced)
        assert chain == argon2id_step(b"life", make_salt("out"), reduced)

    def test_composition(self, reduced):
        layers = ["out", "of", "balance"]
        chain = derive_chain(MasterSecret.from_text("life"), layers, reduced)
        k = b"life"
        for layer in layers:
            k = openssl_argon2id(k, make_salt(layer), reduced)
        assert chain == k

    def test_master_is_normalized(self, reduced):
        a = derive_chain(MasterSecret.from_text("  caf\u00e9\n"), ["x"], reduced)
        b = derive_chain(MasterSecret.from_text("cafe\u0301"), ["x"], reduced)
        assert a == b

    def test_order_sensitive(self, reduced):
        m = MasterSecret.from_text("life")
        assert derive_chain(m, ["out", "of"], reduced) != derive_chain(m, ["of", "out"], reduced)

    def test_nfd_nfc_layers_equal(self, reduced):
        m = MasterSecret.from_text("life")
        assert derive_chain(m, ["cafe\u0301"], reduced) == derive_chain(m, ["caf\u00e9"], reduced)

    def test_salt_boundary_both_derive(self, reduced):
        m = MasterSecret.from_text("life")
        a = derive_chain(m, ["fifteen-bytes!!"], reduced)
        b = derive_chain(m, ["exactly-16-bytes"], reduced)
        assert len(a) == len(b) == 32 and a != b

    def test_duplicate_adjacent_layers_accepted(self, reduced):
        m = MasterSecret.from_text("life")
        assert derive_chain(m, ["x", "x"], reduced) != derive_chain(m, ["x"], reduced)

    def test_no_layers_rejected(self, reduced):
        with pytest.raises(ValueError):
            derive_chain(MasterSecret.from_text("life"), [], reduced)

    def test_empty_layer_rejected(self, reduced):
        with pytest.raises(EmptyAfterNormalization):
            derive_chain(MasterSecret.from_text("life"), ["a", "  "], reduced)

    def test_unnormalized_sequence_rejected(self):
        with pytest.raises(ValueError):
            LayerSequence((" padded ",))

    def test_master_survives_chain(self, reduced):
        m = MasterSecret.from_text("life")
        derive_chain(m, ["a", "b"], reduced)
        assert m.buffer == b"life"

    def test_intermediates_wiped(self, reduced, monkeypatch):
        produced = []
        real = kdf.argon2id_step

        def spy(*a, **kw):
            k = real(*a, **kw)
            produced.append(k)
            return k

        monkeypatch.setattr(kdf, "argon2id_step", spy)
        final = derive_chain(MasterSecret.from_text("life"), ["a", "b", "c"], reduced)
        assert len(produced) == 3
        assert all(k.is_wiped for k in produced[:-1])
        assert produced[-1] is final and not final.is_wiped

    def test_intermediate_wiped_on_error(self, reduced, monkeypatch):
        produced = []
        real = kdf.argon2id_step

        def failing(*a, **kw):
            if len(produced) == 2:
                raise KdfFailure("injected")
            k = real(*a, **kw)
            produced.append(k)
            return k

        monkeypatch.setattr(kdf, "argon2id_step", failing)
        with pytest.raises(KdfFailure):
            derive_chain(MasterSecret.from_text("life"), ["a", "b", "c"], reduced)
        assert all(k.is_wiped for k in produced)

    @settings(max_examples=10, deadline=None)
    @given(st.lists(st.text(min_size=1, max_size=20).filter(lambda s: s.strip()), min_size=1, max_size=3))
    def test_composition_property(self, layers):
        p = KdfParams(memory_kib=64, iterations=1, lanes=1)
        chain = derive_chain(MasterSecret.from_text("m"), layers, p)
        k = b"m"
        for layer in layers:
            k = openssl_argon2id(k, make_salt(normalize(layer)), p)
        assert chain == k


def test_derived_key_length_enforced():
    with pytest.raises(ValueError):
        DerivedKey(b"short")
    assert isinstance(DerivedKey(), SecretBuffer)
