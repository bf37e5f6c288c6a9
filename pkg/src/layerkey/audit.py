"""Executable verification suite.

Each check raises a subclass of :class:`AuditFailure` naming what broke;
:func:`run_audit` collects them into one report for the CLI.
"""

from __future__ import annotations

import hashlib
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .kdf import PARANOID, REDUCED, STANDARD, KdfParams, MasterSecret, derive_chain
from .sampler import (
    ALPHABET,
    MNEMONIC_SPEC,
    PASSWORD_SPEC,
    KeystreamReader,
    RejectionSpec,
    generate_mnemonic,
    generate_password,
    sample_uniform,
)
from .wordlist import WORD_COUNT, load_and_verify

ALPHA = 0.05


class AuditFailure(Exception):
    kind = "audit"


class VectorMismatch(AuditFailure):
    kind = "regression"

    def __init__(self, vector_id: str, expected: str, actual: str) -> None:
        super().__init__(f"{vector_id}: expected prefix {expected!r}, got {actual!r}")
        self.vector_id = vector_id
        self.expected = expected
        self.actual = actual


class NondeterminismDetected(AuditFailure):
    kind = "determinism"


class UniformityRejected(AuditFailure):
    kind = "uniformity"


class InsufficientSamples(AuditFailure, ValueError):
    kind = "uniformity"


class OracleMismatch(AuditFailure):
    kind = "oracle"


# --- regression vectors -----------------------------------------------------


@dataclass(frozen=True)
class RegressionVector:
    id: str
    master: str
    layers: tuple[str, ...]
    params: KdfParams
    mode: str
    count: int
    expected_prefix: str
    slow: bool = False

    def __post_init__(self) -> None:
        if len(self.expected_prefix) > 40:
            raise ValueError("expected_prefix is at most 40 characters")

    def render(self) -> str:
        with derive_chain(MasterSecret.from_text(self.master), self.layers, self.params) as key:
            if self.mode == "mnemonic":
                out = generate_mnemonic(key, self.count)
            else:
                out = generate_password(key, self.count)
            with out:
                return out.reveal()


_LOB = ("out", "of", "balance")

PUBLISHED_VECTORS = (
    RegressionVector("standard-mnemonic-8", "life", _LOB, STANDARD, "mnemonic", 8,
                     "eagle-huskiness-septum-defection"),
    RegressionVector("paranoid-mnemonic-24", "life", _LOB, PARANOID, "mnemonic", 24,
                     "vigorous-purebred-exclusion-defa", slow=True),
    RegressionVector("standard-password-20", "life", _LOB, STANDARD, "password", 20,
                     "6n=rX.k:Qs+)6e5oa-Z:"),
)

# Frozen from this implementation under the reduced profile. They cover the
# verbatim-salt path (layers of 16+ bytes), multi-byte UTF-8 and long
# outputs, which the published vectors do not reach.
PINNED_VECTORS = (
    RegressionVector("reduced-long-layers", "correct horse battery staple",
                     ("exactly-16-bytes", "fifteen-bytes!!", "ключ-доступа"),
                     REDUCED, "mnemonic", 12,
                     "carat-cheer-laundry-gala-stem-subdivide-"),
    RegressionVector("reduced-password-64", "café", ("naïve",),
                     REDUCED, "password", 64,
                     "Yi<3+o}fe;0.].1(TQ:.:BC-S*MM?f@GxlmlTgh/"),
)


@dataclass
class RegressionResult:
    vector: RegressionVector
    actual: str

    @property
    def passed(self) -> bool:
        return self.actual.startswith(self.vector.expected_prefix)


def run_regressions(vectors: Sequence[RegressionVector] | None = None,
                    include_slow: bool = True) -> list[RegressionResult]:
    """Render every vector; raise VectorMismatch on the first miss."""
    load_and_verify()
    if vectors is None:
        vectors = PUBLISHED_VECTORS + PINNED_VECTORS
    results = []
    for v in vectors:
        if v.slow and not include_slow:
            continue
        r = RegressionResult(v, v.render())
        if not r.passed:
            raise VectorMismatch(v.id, v.expected_prefix, r.actual[:40])
        results.append(r)
    return results


# --- determinism ------------------------------------------------------------


@dataclass
class DeterminismReport:
    runs: int
    distinct_outputs: int
    digest: str


def determinism_run(master: str, layers: Sequence[str], params: KdfParams = REDUCED,
                    runs: int = 100) -> DeterminismReport:
    """Derive the same key ``runs`` times and count distinct outputs."""
    if runs < 2:
        raise ValueError("runs must be >= 2")
    digests = set()
    for _ in range(runs):
        with derive_chain(MasterSecret.from_text(master), layers, params) as key:
            digests.add(hashlib.sha256(key.buffer).hexdigest())
    report = DeterminismReport(runs, len(digests), next(iter(digests)))
    if report.distinct_outputs != 1:
        raise NondeterminismDetected(f"{report.distinct_outputs} distinct outputs in {runs} runs")
    return report


# --- statistical uniformity -------------------------------------------------


def sample_key(index: int) -> bytearray:
    """Fast stand-in for a uniform 32-byte key: BLAKE2b-512 over a counter."""
    h = hashlib.blake2b(b"layerkey/uniformity-keys/" + index.to_bytes(8, "little"), digest_size=64)
    return bytearray(h.digest()[:32])


def chi2_sf_wilson_hilferty(x: float, dof: int) -> float:
    """Upper-tail probability of a chi-squared variate (normal approximation)."""
    if x <= 0:
        return 1.0
    c = 2.0 / (9.0 * dof)
    z = ((x / dof) ** (1.0 / 3.0) - (1.0 - c)) / math.sqrt(c)
    return 0.5 * math.erfc(z / math.sqrt(2.0))


@dataclass
class UniformityReport:
    categories: int
    observations: int
    chi2_statistic: float
    degrees_of_freedom: int
    p_value: float
    alpha: float = ALPHA

    @property
    def rejected(self) -> bool:
        return self.p_value < self.alpha


def chi_squared(counts: Sequence[int], categories: int) -> UniformityReport:
    total = sum(counts)
    expected = total / categories
    stat = sum((c - expected) ** 2 for c in counts) / expected
    dof = categories - 1
    return UniformityReport(categories, total, stat, dof, chi2_sf_wilson_hilferty(stat, dof))


Draw = Callable[[KeystreamReader], int]


def rejection_draw(reader: KeystreamReader) -> int:
    return sample_uniform(reader, MNEMONIC_SPEC)


def modulo_draw(reader: KeystreamReader) -> int:
    """Deliberately biased: reduce a 16-bit sample mod n with no rejection."""
    return reader.next_u16() % WORD_COUNT


def chi_squared_uniformity(sample_count: int = 10_000, words_per_sample: int = 8,
                           draw: Draw = rejection_draw) -> UniformityReport:
    """Tally word indices over ``sample_count`` phrases from distinct keys."""
    if sample_count * words_per_sample < 10 * WORD_COUNT:
        raise InsufficientSamples(
            f"need at least {10 * WORD_COUNT} words for an expected count of 10 per category"
        )
    counts = [0] * WORD_COUNT
    for i in range(sample_count):
        with KeystreamReader(sample_key(i)) as reader:
            for _ in range(words_per_sample):
                counts[draw(reader)] += 1
    return chi_squared(counts, WORD_COUNT)


@dataclass
class RejectionObservation:
    outputs: int
    draws: int
    rejections: int

    @property
    def rejection_rate(self) -> float:
        return self.rejections / self.draws

    @property
    def samples_per_output(self) -> float:
        return self.draws / self.outputs


def observe_rejections(spec: RejectionSpec, outputs: int, per_key: int = 256) -> RejectionObservation:
    """Count raw draws needed for ``outputs`` accepted samples."""
    draws = accepted = 0
    i = 0
    while accepted < outputs:
        with KeystreamReader(sample_key(1_000_000 + i), limit=None) as reader:
            taken = 0
            while taken < per_key and accepted < outputs:
                draws += 1
                if spec.accept(reader.next_sample(spec.bits)) is not None:
                    accepted += 1
                    taken += 1
        i += 1
    return RejectionObservation(accepted, draws, draws - accepted)


# --- exhaustive oracle ------------------------------------------------------


@dataclass
class OracleReport:
    bits: int
    n: int
    threshold: int
    accepted: int
    rejected: int
    preimages: dict[int, int] = field(repr=False)


def enumerate_rejection(bits: int, n: int) -> OracleReport:
    """Push every possible sample through the acceptance rule."""
    spec = RejectionSpec.for_range(bits, n)
    hits: Counter[int] = Counter()
    rejected = 0
    for r in range(1 << bits):
        idx = spec.accept(r)
        if idx is None:
            rejected += 1
        else:
            hits[idx] += 1
    return OracleReport(bits, n, spec.threshold, sum(hits.values()), rejected, dict(hits))


def small_scale_oracle() -> list[OracleReport]:
    reports = []
    for bits, n in ((4, 6), (8, 90), (8, 256), (16, WORD_COUNT)):
        rep = enumerate_rejection(bits, n)
        k = (1 << bits) // n
        if set(rep.preimages) != set(range(n)) or set(rep.preimages.values()) != {k}:
            raise OracleMismatch(f"(b={bits}, n={n}): outputs do not each have {k} preimages")
        if rep.rejected != (1 << bits) - k * n:
            raise OracleMismatch(f"(b={bits}, n={n}): {rep.rejected} rejections")
        reports.append(rep)
    if reports[0].threshold != 12 or reports[0].rejected != 4:
        raise OracleMismatch("(b=4, n=6): expected T=12 with 4 rejections")
    if len(ALPHABET) != 90 or PASSWORD_SPEC.threshold != 180 or MNEMONIC_SPEC.threshold != 62208:
        raise OracleMismatch("sampler thresholds drifted from 180 / 62208")
    return reports


# --- driver -----------------------------------------------------------------


@dataclass
class CheckResult:
    kind: str
    name: str
    passed: bool
    detail: str
    seconds: float


def run_audit(full: bool = False, log: Callable[[str], None] | None = None) -> list[CheckResult]:
    """Run every audit class. ``full`` adds the Paranoid-profile vector."""
    results: list[CheckResult] = []

    def check(kind: str, name: str, fn: Callable[[], str]) -> None:
        t0 = time.perf_counter()
        try:
            detail, ok = fn(), True
        except AuditFailure as exc:
            detail, ok = str(exc), False
        res = CheckResult(kind, name, ok, detail, time.perf_counter() - t0)
        results.append(res)
        if log:
            log(f"{'PASS' if ok else 'FAIL'} [{kind}] {name}: {detail} ({res.seconds:.1f}s)")

    def oracle() -> str:
        reps = small_scale_oracle()
        return ", ".join(f"(b={r.bits}, n={r.n}) T={r.threshold}" for r in reps)

    def regressions() -> str:
        rs = run_regressions(include_slow=full)
        return f"{len(rs)} vectors match"

    def determinism() -> str:
        rep = determinism_run("life", _LOB, REDUCED, 100)
        return f"{rep.runs} runs, {rep.distinct_outputs} distinct output"

    def uniformity() -> str:
        rep = chi_squared_uniformity(10_000, 8)
        if rep.rejected:
            raise UniformityRejected(f"chi2={rep.chi2_statistic:.1f} p={rep.p_value:.4f}")
        return f"chi2={rep.chi2_statistic:.1f} dof={rep.degrees_of_freedom} p={rep.p_value:.4f}"

    def negative_control() -> str:
        rep = chi_squared_uniformity(10_000, 8, draw=modulo_draw)
        if not rep.rejected:
            raise UniformityRejected(
                f"modulo-biased sampler not detected: chi2={rep.chi2_statistic:.1f} p={rep.p_value:.4f}"
            )
        return f"bias detected, chi2={rep.chi2_statistic:.1f} p={rep.p_value:.2e}"

    check("oracle", "exhaustive rejection enumeration", oracle)
    check("regression", "known-answer vectors", regressions)
    check("determinism", "100 repeated derivations", determinism)
    check("uniformity", "chi-squared, 10000 x 8 words", uniformity)
    check("uniformity", "modulo-bias negative control", negative_control)
    return results
