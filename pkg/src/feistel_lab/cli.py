"""Command-line front end.

Subcommands: encrypt, decrypt, attack, advantage, badprob, uniformity,
matrix, bench. Every randomized run carries an explicit seed: pass --seed,
set FEISTEL_LAB_SEED, or let the tool draw one (it is printed to stderr and
echoed in the JSON so the run can be replayed byte for byte).

Exit codes: 0 success, 1 usage error, 2 empirical check failure (a measured
value violating its bound or significance level).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .bench import ALL_KINDS, BenchConfig, report_csv, run_bench
from .bits import BitString
from .distinguisher import (
    attack_source_heavy,
    attack_target_heavy,
    attack_ufn2_2k,
    attack_ufn2_even_k,
    fresh_ideal_factory,
    fresh_ufn_factory,
    report_from_counts,
)
from .distinguisher import advantage_counts as _advantage_counts
from .feistel import UfnKind, UfnParams, ggm_ufn, ideal_ufn
from .prbg import derive_seed
from .statcheck import (
    BadEventSpec,
    bad_event_bound,
    bad_event_counts,
    build_ufn2_matrix,
    gf2_nonsingular,
    secure_rounds,
    uniformity_counts,
    watched_rounds,
)
from .stats import chi_square_critical, chi_square_statistic, wilson_halfwidth

SEED_ENV_VAR = "FEISTEL_LAB_SEED"
SCHEMA_VERSION = 1

_ATTACKS = {
    "src-k1": (UfnKind.SOURCE_HEAVY, attack_source_heavy),
    "tgt-k1": (UfnKind.TARGET_HEAVY, attack_target_heavy),
    "ufn2-even": (UfnKind.UFN2, attack_ufn2_even_k),
    "ufn2-2k": (UfnKind.UFN2, attack_ufn2_2k),
}


class UsageError(Exception):
    pass


class CheckFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _default_attack_rounds(name: str, k: int) -> int:
    if name in ("src-k1", "tgt-k1"):
        return k + 1
    if name == "ufn2-2k":
        return 2 * k
    # The XOR-sum relation holds at every round count; target the count that
    # would otherwise be considered safe.
    return 2 * k + 1


def _resolve_seed(args: argparse.Namespace) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from exc
    seed = int.from_bytes(os.urandom(8), "big")
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload: dict, out_path: str | None) -> None:
    body = dict(payload)
    body["schema"] = SCHEMA_VERSION
    _emit(json.dumps(body, sort_keys=True, separators=(",", ":")) + "\n", out_path)


def _chunk_ranges(total: int, jobs: int) -> list[tuple[int, int]]:
    jobs = max(1, min(jobs, total))
    base = total // jobs
    extra = total % jobs
    ranges = []
    start = 0
    for i in range(jobs):
        count = base + (1 if i < extra else 0)
        ranges.append((start, count))
        start += count
    return ranges


def _run_chunked(worker, cfg: dict, trials: int, jobs: int, combine):
    """Run a per-range worker over the trial indices, optionally in parallel.

    Per-trial seeds are derived from absolute indices, so the aggregate does
    not depend on the chunking.
    """
    ranges = _chunk_ranges(trials, jobs)
    if len(ranges) == 1 or jobs <= 1:
        parts = [worker(cfg, start, count) for start, count in ranges]
    else:
        with ProcessPoolExecutor(max_workers=len(ranges)) as pool:
            futures = [pool.submit(worker, cfg, start, count) for start, count in ranges]
            parts = [f.result() for f in futures]
    return combine(parts)


def _game_pieces(cfg: dict):
    kind = UfnKind(cfg["kind"])
    params = UfnParams(kind, cfg["n"], cfg["k"], cfg["rounds"])
    _, machine_factory = _ATTACKS[cfg["name"]]
    machine = machine_factory(cfg["n"], cfg["k"])
    return machine, fresh_ufn_factory(params), fresh_ideal_factory(params.state_bits)


def _advantage_worker(cfg: dict, start: int, count: int) -> tuple[int, int]:
    machine, builder_a, builder_b = _game_pieces(cfg)
    return _advantage_counts(machine, builder_a, builder_b, cfg["seed"], start, count)


def _badprob_worker(cfg: dict, start: int, count: int) -> int:
    spec = BadEventSpec.for_structure(UfnKind(cfg["kind"]), cfg["k"], cfg["m"])
    return bad_event_counts(spec, cfg["n"], cfg["k"], cfg["seed"], start, count, cfg["shaping"])


def _uniformity_worker(cfg: dict, start: int, count: int) -> list[int]:
    return uniformity_counts(
        UfnKind(cfg["kind"]), cfg["n"], cfg["k"], cfg["rounds"], cfg["seed"], start, count
    )


def _parse_block(text: str) -> BitString:
    try:
        return BitString.parse(text)
    except ValueError as exc:
        raise UsageError(f"bad block {text!r}: {exc}") from exc


def _build_cipher(args: argparse.Namespace):
    kind = UfnKind(args.kind)
    params = UfnParams(kind, args.n, args.k, args.rounds)
    key_hex = args.key
    try:
        master = BitString(4 * len(key_hex), int(key_hex, 16))
    except ValueError as exc:
        raise UsageError(f"--key must be hex digits, got {key_hex!r}") from exc
    if args.prf == "ggm":
        if master.width % params.r != 0:
            raise UsageError(
                f"key width {master.width} is not divisible by {params.r} rounds; "
                "pad the key or change the round count"
            )
        return ggm_ufn(params, master, mode=args.expander)
    return ideal_ufn(params, derive_seed("cli-key", master))


def _cmd_encrypt(args: argparse.Namespace) -> int:
    perm = _build_cipher(args)
    block = _parse_block(args.block)
    if block.width != perm.width:
        raise UsageError(f"input is {block.width} bits but the state is {perm.width}")
    _emit(perm.encrypt(block).text() + "\n", args.out)
    return 0


def _cmd_decrypt(args: argparse.Namespace) -> int:
    perm = _build_cipher(args)
    block = _parse_block(args.block)
    if block.width != perm.width:
        raise UsageError(f"input is {block.width} bits but the state is {perm.width}")
    _emit(perm.decrypt(block).text() + "\n", args.out)
    return 0


def _check_attack_combo(name: str, k: int) -> None:
    if name == "ufn2-even" and k % 2 != 0:
        raise UsageError(f"attack {name} requires even k, got {k}")
    if name == "ufn2-2k" and k % 2 == 0:
        raise UsageError(f"attack {name} requires odd k, got {k}")


def _run_game(args: argparse.Namespace, rounds: int) -> int:
    seed = _resolve_seed(args)
    _check_attack_combo(args.name, args.k)
    target_kind, _ = _ATTACKS[args.name]
    kind = UfnKind(args.kind) if getattr(args, "kind", None) else target_kind
    cfg = {
        "name": args.name,
        "kind": kind.value,
        "n": args.n,
        "k": args.k,
        "rounds": rounds,
        "seed": seed,
    }
    # Validate the configuration eagerly so usage errors beat worker failures.
    _game_pieces(cfg)

    def combine(parts):
        ones_a = sum(p[0] for p in parts)
        ones_b = sum(p[1] for p in parts)
        return report_from_counts(ones_a, ones_b, args.trials, seed)

    report = _run_chunked(_advantage_worker, cfg, args.trials, args.jobs, combine)
    payload = report.to_json_dict()
    payload.update({"name": args.name, "kind": kind.value, "n": args.n, "k": args.k,
                    "rounds": rounds})
    _emit_json(payload, args.out)
    return 0


def _cmd_attack(args: argparse.Namespace) -> int:
    rounds = args.rounds if args.rounds is not None else _default_attack_rounds(args.name, args.k)
    return _run_game(args, rounds)


def _cmd_advantage(args: argparse.Namespace) -> int:
    return _run_game(args, args.rounds)


def _cmd_badprob(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    kind = UfnKind(args.kind)
    if kind is UfnKind.BALANCED:
        raise UsageError("badprob applies to the unbalanced structures only")
    spec = BadEventSpec.for_structure(kind, args.k, args.m)
    cfg = {"kind": kind.value, "n": args.n, "k": args.k, "m": args.m,
           "seed": seed, "shaping": args.shaping}
    hits = _run_chunked(_badprob_worker, cfg, args.trials, args.jobs, sum)
    empirical = hits / args.trials
    ci = wilson_halfwidth(hits, args.trials)
    bound = bad_event_bound(kind, args.n, args.k, args.m)
    payload = {
        "kind": kind.value,
        "n": args.n,
        "k": args.k,
        "m": args.m,
        "trials": args.trials,
        "seed": seed,
        "shaping": args.shaping,
        "watched_rounds": list(watched_rounds(kind, args.k)),
        "bound": bound,
        "empirical": empirical,
        "ci": ci,
    }
    _emit_json(payload, args.out)
    if empirical > bound + 3 * ci:
        raise CheckFailure(
            f"empirical collision rate {empirical:.6f} exceeds bound {bound:.6f} "
            f"plus 3 half-widths ({3 * ci:.6f})"
        )
    return 0


def _cmd_uniformity(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    kind = UfnKind(args.kind)
    state_bits = (args.k + 1) * args.n
    if state_bits > 12:
        raise UsageError(f"state space of {state_bits} bits is too large to bin (max 12)")
    rounds = args.rounds if args.rounds is not None else secure_rounds(kind, args.k)
    cfg = {"kind": kind.value, "n": args.n, "k": args.k, "rounds": rounds, "seed": seed}

    def combine(parts: list[list[int]]) -> list[int]:
        total = parts[0]
        for extra in parts[1:]:
            total = [a + b for a, b in zip(total, extra)]
        return total

    bins = _run_chunked(_uniformity_worker, cfg, args.trials, args.jobs, combine)
    statistic = chi_square_statistic(bins)
    dof = len(bins) - 1
    critical = chi_square_critical(dof, args.significance)
    passed = statistic < critical
    payload = {
        "kind": kind.value,
        "n": args.n,
        "k": args.k,
        "rounds": rounds,
        "trials": args.trials,
        "seed": seed,
        "dof": dof,
        "statistic": statistic,
        "critical": critical,
        "significance": args.significance,
        "discarded": 0,
        "passed": passed,
    }
    _emit_json(payload, args.out)
    if not passed:
        raise CheckFailure(
            f"chi-square statistic {statistic:.2f} exceeds the {args.significance} "
            f"critical value {critical:.2f} at {dof} dof"
        )
    return 0


def _cmd_matrix(args: argparse.Namespace) -> int:
    matrix = build_ufn2_matrix(args.k)
    _emit_json({"k": args.k, "nonsingular": gf2_nonsingular(matrix)}, args.out)
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    mode = {"mem": "memoized", "ggm": "ggm"}[args.mode]
    cfg = BenchConfig(
        n=args.n,
        k=args.k,
        prf_mode=mode,
        workload=args.workload,
        seed=seed,
        kinds=ALL_KINDS,
        ell=args.ell,
        exhaust=False if args.analytic else None,
        table_cap=args.table_cap,
    )
    report = run_bench(cfg)
    _emit_json(report.to_json_dict(), args.out)
    csv_path = args.csv
    if csv_path is None and args.out:
        root, _ = os.path.splitext(args.out)
        csv_path = root + ".csv"
    if csv_path:
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write(report_csv(report))
    return 0


def _add_structure_flags(p: argparse.ArgumentParser, with_kind: bool = True) -> None:
    if with_kind:
        p.add_argument("--kind", choices=[k.value for k in UfnKind],
                       help="structure kind")
    p.add_argument("--n", type=int, required=True, help="sub-block width in bits")
    p.add_argument("--k", type=int, required=True, help="block ratio")


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help=f"run seed (falls back to ${SEED_ENV_VAR}, then a fresh one)")
    p.add_argument("--out", default=None, help="write output to this file instead of stdout")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes for trial loops (deterministic aggregation)")


def build_parser() -> _Parser:
    parser = _Parser(prog="feistel-lab",
                     description="Unbalanced Feistel permutation laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, handler in (("encrypt", _cmd_encrypt), ("decrypt", _cmd_decrypt)):
        p = sub.add_parser(name, help=f"{name} one block")
        p.add_argument("--kind", choices=[k.value for k in UfnKind], required=True)
        p.add_argument("--n", type=int, required=True, help="sub-block width in bits")
        p.add_argument("--k", type=int, required=True, help="block ratio")
        p.add_argument("--rounds", type=int, required=True)
        p.add_argument("--key", required=True, help="hex master key")
        p.add_argument("--in", dest="block", required=True, help="block as width:hex")
        p.add_argument("--prf", choices=["ggm", "ideal"], default="ggm",
                       help="round-function realization keyed from --key")
        p.add_argument("--expander", choices=["fast", "bbs"], default="fast",
                       help="generator behind the ggm realization")
        p.add_argument("--out", default=None)
        p.set_defaults(func=handler)

    p = sub.add_parser("attack", help="run a distinguisher against its target build and an ideal permutation")
    p.add_argument("--name", choices=sorted(_ATTACKS), required=True)
    _add_structure_flags(p, with_kind=False)
    p.add_argument("--rounds", type=int, default=None,
                   help="rounds of the target build (default: the attackable count)")
    p.add_argument("--trials", type=int, default=10000)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_attack, kind=None)

    p = sub.add_parser("advantage", help="acceptance-gap game at an explicit round count")
    p.add_argument("--name", choices=sorted(_ATTACKS), required=True)
    _add_structure_flags(p)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("--trials", type=int, default=10000)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_advantage)

    p = sub.add_parser("badprob", help="empirical collision-event probability vs its bound")
    _add_structure_flags(p)
    p.add_argument("--m", type=int, required=True, help="oracle queries per trial")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--shaping", choices=["adversarial", "uniform"], default="adversarial")
    _add_common_flags(p)
    p.set_defaults(func=_cmd_badprob)

    p = sub.add_parser("uniformity", help="chi-square output uniformity over fresh keys")
    _add_structure_flags(p)
    p.add_argument("--rounds", type=int, default=None,
                   help="rounds (default: the minimal secure count)")
    p.add_argument("--trials", type=int, default=100000)
    p.add_argument("--significance", type=float, default=0.01)
    _add_common_flags(p)
    p.set_defaults(func=_cmd_uniformity)

    p = sub.add_parser("matrix", help="rank of the widened-structure mixing matrix")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_matrix)

    p = sub.add_parser("bench", help="memory/time comparison across structures")
    p.add_argument("--mode", choices=["mem", "ggm"], required=True)
    _add_structure_flags(p, with_kind=False)
    p.add_argument("--workload", type=int, default=256)
    p.add_argument("--ell", type=int, default=None, help="total key bits shared by all structures")
    p.add_argument("--analytic", action="store_true",
                   help="skip table exhaustion; report closed-form figures")
    p.add_argument("--table-cap", type=int, default=1 << 24)
    p.add_argument("--csv", default=None, help="also write a CSV mirror here")
    _add_common_flags(p)
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
