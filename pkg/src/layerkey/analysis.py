"""Attack-cost and sampling arithmetic.

Brute force against a master secret of ``e`` bits costs, on average, half
the search space: ``2**(e-1) * tau`` seconds for ``tau`` seconds per
Argon2id evaluation. Cluster and memory-bound variants divide that by the
number of concurrent evaluations. Years are Julian (365.25 days).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .wordlist import WORD_COUNT

SECONDS_PER_YEAR = 31_557_600

Model = Literal["single", "cluster", "memory_bound"]


@dataclass(frozen=True)
class AttackScenario:
    entropy_bits: float
    tau: float
    gpu_count: int = 1
    coordination_overhead: float = 0.0
    gpu_memory_mib: int = 40_000
    memory_per_hash_mib: int = 128

    def __post_init__(self) -> None:
        if not self.entropy_bits > 0:
            raise ValueError("entropy_bits must be positive")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.gpu_count < 1:
            raise ValueError("gpu_count must be >= 1")
        if not 0 <= self.coordination_overhead < 1:
            raise ValueError("coordination_overhead must be in [0, 1)")
        if self.gpu_memory_mib <= 0 or self.memory_per_hash_mib <= 0:
            raise ValueError("memory sizes must be positive")


@dataclass(frozen=True)
class CostEstimate:
    seconds: float
    model: Model = "single"

    @property
    def years(self) -> float:
        return self.seconds / SECONDS_PER_YEAR


def brute_force_estimate(entropy_bits: float, tau: float) -> CostEstimate:
    if not (entropy_bits > 0 and tau > 0):
        raise ValueError("entropy_bits and tau must be positive")
    return CostEstimate(2.0 ** (entropy_bits - 1) * tau, "single")


def cluster_estimate(base: CostEstimate, gpu_count: int, overhead: float) -> CostEstimate:
    if gpu_count < 1:
        raise ValueError("gpu_count must be >= 1")
    if not 0 <= overhead < 1:
        raise ValueError("overhead must be in [0, 1)")
    return CostEstimate(base.seconds / gpu_count * (1 + overhead), "cluster")


def memory_bound_instances(gpu_memory_mib: int, memory_per_hash_mib: int) -> int:
    """How many Argon2 instances fit in one device's memory."""
    if gpu_memory_mib <= 0 or memory_per_hash_mib <= 0:
        raise ValueError("memory sizes must be positive")
    return gpu_memory_mib // memory_per_hash_mib


def memory_bound_estimate(entropy_bits: float, tau: float, total_instances: int) -> CostEstimate:
    if total_instances < 1:
        raise ValueError("total_instances must be >= 1")
    single = brute_force_estimate(entropy_bits, tau)
    return CostEstimate(single.seconds / total_instances, "memory_bound")


def estimate_all(s: AttackScenario) -> dict[str, CostEstimate]:
    single = brute_force_estimate(s.entropy_bits, s.tau)
    per_gpu = memory_bound_instances(s.gpu_memory_mib, s.memory_per_hash_mib)
    return {
        "single": single,
        "cluster": cluster_estimate(single, s.gpu_count, s.coordination_overhead),
        "memory_bound": memory_bound_estimate(
            s.entropy_bits, s.tau, max(1, per_gpu * s.gpu_count)
        ),
    }


@dataclass(frozen=True)
class RejectionStats:
    threshold: int
    rejection_rate: float
    expected_samples: float


def rejection_stats(bits: int, n: int) -> RejectionStats:
    space = 1 << bits
    if not 1 <= n <= space:
        raise ValueError(f"need 1 <= n <= 2^bits, got n={n}")
    threshold = (space // n) * n
    return RejectionStats(threshold, 1 - threshold / space, space / threshold)


# Verdict bands for master secret entropy.
MINIMUM_BITS = 80
SECURE_BITS = 128


class UnknownSource(ValueError):
    pass


@dataclass(frozen=True)
class EntropyGuidance:
    bits: float
    verdict: str
    upper_bound: bool = False

    def __str__(self) -> str:
        prefix = "< " if self.upper_bound else ""
        return f"{prefix}{self.bits:.1f} bits ({self.verdict})"


def _verdict(bits: float) -> str:
    if bits >= SECURE_BITS:
        return "secure"
    if bits >= MINIMUM_BITS:
        return "minimum"
    return "insufficient"


def entropy_guidance(source: str, amount: int | None = None) -> EntropyGuidance:
    """Entropy of a master secret source and whether it is adequate.

    ``source`` is one of ``urandom_16_bytes``, ``eff_words`` (``amount``
    words), ``csprng_bits`` (``amount`` bits) or ``human_password``.
    """
    if source == "urandom_16_bytes":
        bits = 128.0
    elif source == "eff_words":
        if amount is None or amount < 0:
            raise ValueError("eff_words needs a non-negative word count")
        bits = amount * math.log2(WORD_COUNT)
    elif source == "csprng_bits":
        if amount is None or amount < 0:
            raise ValueError("csprng_bits needs a non-negative bit count")
        bits = float(amount)
    elif source == "human_password":
        # Only an upper bound is meaningful for human-chosen passwords.
        return EntropyGuidance(40.0, "insufficient", upper_bound=True)
    else:
        raise UnknownSource(f"unknown entropy source {source!r}")
    return EntropyGuidance(bits, _verdict(bits))


def sci(value: float, digits: int = 3) -> str:
    """Scientific notation with ``digits`` significant figures, e.g. 2.39e+16."""
    return f"{value:.{digits - 1}e}"
