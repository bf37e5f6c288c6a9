"""Wall-clock timing of full-strength chain derivations."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field

from .kdf import PROFILES, MasterSecret, derive_chain

# Single-layer and 3-layer medians (ms) measured on an Apple M1 Pro, for
# orientation only; they are not comparable across machines.
REFERENCE_MS = {
    ("standard", 1): 544,
    ("standard", 3): 1613,
    ("paranoid", 1): 2273,
    ("paranoid", 3): 6697,
}

_THROWAWAY_MASTER = "benchmark master secret, not a real one"
_THROWAWAY_LAYERS = ("bench-layer-one", "bench-layer-two", "bench-layer-three")


@dataclass
class Timing:
    profile: str
    layers: int
    samples_ms: list[float] = field(default_factory=list)

    @property
    def median_ms(self) -> float:
        return statistics.median(self.samples_ms)


@dataclass
class BenchReport:
    timings: dict[tuple[str, int], Timing]

    def median(self, profile: str, layers: int) -> float:
        return self.timings[(profile, layers)].median_ms

    def ratios(self) -> dict[str, float]:
        out = {}
        profiles = {p for p, _ in self.timings}
        for p in sorted(profiles):
            if (p, 1) in self.timings and (p, 3) in self.timings:
                out[f"{p} 3-layer/1-layer"] = self.median(p, 3) / self.median(p, 1)
        if ("standard", 1) in self.timings and ("paranoid", 1) in self.timings:
            out["paranoid/standard 1-layer"] = self.median("paranoid", 1) / self.median("standard", 1)
        return out


def _time_once(profile: str, layers: int) -> float:
    master = MasterSecret.from_text(_THROWAWAY_MASTER)
    t0 = time.perf_counter()
    key = derive_chain(master, _THROWAWAY_LAYERS[:layers], PROFILES[profile])
    elapsed = (time.perf_counter() - t0) * 1000
    key.wipe()
    master.wipe()
    return elapsed


def run_bench(repeats: int = 5, profiles: tuple[str, ...] = ("standard", "paranoid"),
              layer_counts: tuple[int, ...] = (1, 3)) -> BenchReport:
    """Median wall time per (profile, layer count).

    Configurations are timed round-robin after one untimed warm-up per
    profile, so slow drift in machine speed hits every configuration alike
    instead of skewing the ratios.
    """
    if repeats < 3:
        raise ValueError("repeats must be >= 3")
    timings = {(p, n): Timing(p, n) for p in profiles for n in layer_counts}
    for p in profiles:
        _time_once(p, 1)
    for _ in range(repeats):
        for (p, n), t in timings.items():
            t.samples_ms.append(_time_once(p, n))
    return BenchReport(timings)
