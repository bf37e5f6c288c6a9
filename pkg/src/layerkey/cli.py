"""Command-line entry point.

Secrets are only ever read from a prompt or standard input, never from
arguments. The derived secret is the only thing written to stdout.
"""

from __future__ import annotations

import argparse
import getpass
import sys
from typing import Callable, TextIO

from . import analysis
from .kdf import PROFILES, KdfError, LayerSequence, MasterSecret, derive_chain, normalize
from .sampler import entropy_bits, generate_mnemonic, generate_password
from .secret import SecretBuffer

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_KDF = 3
EXIT_AUDIT = 4

LIMITS = {"mnemonic": 24, "password": 64}
DEFAULT_COUNT = {
    ("standard", "mnemonic"): 8,
    ("paranoid", "mnemonic"): 24,
    ("standard", "password"): 20,
    ("paranoid", "password"): 48,
}


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read_layers(readline: Callable[[int], str | None]) -> list[str]:
    """Collect layers until a blank line (after trimming) or EOF."""
    layers = []
    while True:
        line = readline(len(layers) + 1)
        if line is None or not line.strip():
            return layers
        layers.append(normalize(line))


def read_piped(stream: TextIO) -> tuple[str | None, list[str]]:
    """First line is the master secret, following lines are layers."""
    first = stream.readline()
    if not first:
        return None, []
    master = first.rstrip("\r\n")

    def readline(_: int) -> str | None:
        line = stream.readline()
        return line.rstrip("\r\n") if line else None

    return master, _read_layers(readline)


def read_interactive(stream: TextIO | None = None,
                     prompt_secret: Callable[[str], str] | None = None) -> tuple[str | None, list[str]]:
    if stream is None:
        stream = sys.stdin
    if prompt_secret is None:
        def prompt_secret(p: str) -> str:
            return getpass.getpass(p, stream=sys.stderr)

    master = prompt_secret("Master secret: ")
    if not master.strip():
        return None, []
    confirm = prompt_secret("Confirm master secret: ")
    if confirm != master:
        raise UsageError("master secret confirmation does not match")

    def readline(i: int) -> str | None:
        print(f"Layer {i} (empty line to finish): ", end="", file=sys.stderr, flush=True)
        line = stream.readline()
        return line.rstrip("\r\n") if line else None

    return master, _read_layers(readline)


def cmd_derive(args: argparse.Namespace) -> int:
    limit = LIMITS[args.mode]
    count = args.count if args.count is not None else DEFAULT_COUNT[(args.profile, args.mode)]
    if not 1 <= count <= limit:
        _err(f"error: --count for {args.mode} must be in [1, {limit}]")
        return EXIT_USAGE

    interactive = not args.non_interactive and sys.stdin.isatty()
    try:
        raw_master, raw_layers = read_interactive() if interactive else read_piped(sys.stdin)
    except UsageError as exc:
        _err(f"error: {exc}")
        return EXIT_USAGE
    if raw_master is None or not raw_master.strip():
        _err("error: master secret is empty")
        return EXIT_USAGE
    if not raw_layers:
        _err("error: at least one layer is required")
        return EXIT_USAGE

    master = MasterSecret.from_text(raw_master)
    del raw_master
    layers = LayerSequence(tuple(raw_layers))
    with master:
        try:
            key = derive_chain(master, layers, PROFILES[args.profile])
        except KdfError as exc:
            _err(f"error: key derivation failed ({type(exc).__name__})")
            return EXIT_KDF
    with key:
        out: SecretBuffer
        if args.mode == "mnemonic":
            out = generate_mnemonic(key, count)
        else:
            out = generate_password(key, count)
    with out:
        sys.stdout.flush()
        sys.stdout.buffer.write(out.buffer)
        sys.stdout.buffer.write(b"\n")
        sys.stdout.buffer.flush()
    if not args.quiet:
        bits = entropy_bits(args.mode, count)
        _err(f"{bits:.1f} bits of entropy, {len(layers)} layer{'s' if len(layers) != 1 else ''}, "
             f"{args.profile} profile")
    return EXIT_OK


def cmd_audit(args: argparse.Namespace) -> int:
    from .audit import run_audit

    results = run_audit(full=args.full, log=lambda line: print(line, flush=True))
    failed = sorted({r.kind for r in results if not r.passed})
    if failed:
        _err(f"audit failed: {', '.join(failed)}")
        return EXIT_AUDIT
    print("audit passed")
    return EXIT_OK


def estimate_report(s: analysis.AttackScenario) -> list[tuple[str, float, float]]:
    est = analysis.estimate_all(s)
    return [(name, e.seconds, e.years) for name, e in est.items()]


def cmd_estimate(args: argparse.Namespace) -> int:
    try:
        scenario = analysis.AttackScenario(
            entropy_bits=args.entropy_bits,
            tau=args.tau,
            gpu_count=args.gpus,
            coordination_overhead=args.overhead,
            gpu_memory_mib=args.gpu_mem_mib,
            memory_per_hash_mib=args.mem_per_hash_mib,
        )
    except ValueError as exc:
        _err(f"error: {exc}")
        return EXIT_USAGE
    rows = estimate_report(scenario)
    per_gpu = analysis.memory_bound_instances(scenario.gpu_memory_mib, scenario.memory_per_hash_mib)
    if args.format == "kv":
        print(f"instances_per_gpu={per_gpu}")
        print(f"total_instances={per_gpu * scenario.gpu_count}")
        for name, seconds, years in rows:
            print(f"{name}.seconds={analysis.sci(seconds)}")
            print(f"{name}.years={analysis.sci(years)}")
        return EXIT_OK
    print(f"entropy {scenario.entropy_bits:g} bits, tau {scenario.tau:g} s/hash, "
          f"{scenario.gpu_count} GPU(s), overhead {scenario.coordination_overhead:.0%}, "
          f"{per_gpu} instances/GPU")
    print(f"{'model':<14}{'seconds':>12}{'years':>12}")
    for name, seconds, years in rows:
        print(f"{name:<14}{analysis.sci(seconds):>12}{analysis.sci(years):>12}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    from .bench import REFERENCE_MS, run_bench

    if args.repeats < 3:
        _err("error: --repeats must be >= 3")
        return EXIT_USAGE
    profiles = ("standard", "paranoid") if args.profile == "both" else (args.profile,)
    report = run_bench(args.repeats, profiles)
    print(f"{'profile':<10}{'layers':>7}{'median ms':>12}{'ref ms':>9}")
    for (profile, n), t in report.timings.items():
        print(f"{profile:<10}{n:>7}{t.median_ms:>12.0f}{REFERENCE_MS[(profile, n)]:>9}")
    for name, value in report.ratios().items():
        print(f"ratio {name}: {value:.2f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="layerkey", description="Stateless hierarchical secret derivation.")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("derive", help="derive a mnemonic or password")
    d.add_argument("--profile", choices=sorted(PROFILES), default="standard")
    d.add_argument("--mode", choices=("mnemonic", "password"), default="mnemonic")
    d.add_argument("--count", type=int, help="words (1-24) or characters (1-64)")
    d.add_argument("--non-interactive", action="store_true",
                   help="read master secret and layers line by line from stdin")
    d.add_argument("--quiet", action="store_true", help="print nothing but the secret")
    d.set_defaults(func=cmd_derive)

    a = sub.add_parser("audit", help="run the verification suite")
    a.add_argument("--full", action="store_true", help="include the Paranoid-profile vector")
    a.set_defaults(func=cmd_audit)

    e = sub.add_parser("estimate", help="brute-force cost estimates")
    e.add_argument("--entropy-bits", type=float, required=True)
    e.add_argument("--tau", type=float, required=True, help="seconds per hash")
    e.add_argument("--gpus", type=int, default=1)
    e.add_argument("--overhead", type=float, default=0.0)
    e.add_argument("--gpu-mem-mib", type=int, default=40_000)
    e.add_argument("--mem-per-hash-mib", type=int, default=128)
    e.add_argument("--format", choices=("text", "kv"), default="text")
    e.set_defaults(func=cmd_estimate)

    b = sub.add_parser("bench", help="time full-strength derivations")
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--profile", choices=("standard", "paranoid", "both"), default="both")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        _err("interrupted")
        return 130


if __name__ == "__main__":
    sys.exit(main())
