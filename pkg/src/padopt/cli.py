"""Command-line interface.

Subcommands: ``gen`` (synthetic dataset), ``solve`` (compute a scheme),
``eval`` (re-measure a saved scheme), ``attack`` (simulate the one-try
attacker), ``oracle`` (brute-force ground truth), ``bench`` (sweep
algorithms over c values).  Exit codes: 0 success, 1 validation error,
2 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from contextlib import contextmanager

import numpy as np

from . import __version__
from .attack import simulate_attacker
from .bench import SOLVERS, run_bench, write_bench_csv
from .datasets import SyntheticSpec, generate_synthetic, load_dataset, write_dataset
from .exceptions import InternalCheckError, ValidationError
from .metrics import evaluate
from .oracle import brute_force_pop, grid_search_prp
from .problem import (
    OutputAlphabet,
    problem_from_multiplier,
    problem_from_per_file_multipliers,
    server_identity_reduction,
)
from .scheme_io import load_scheme, scheme_to_dict


@contextmanager
def _out(args):
    if args.output is None or args.output == "-":
        yield sys.stdout
        return
    fh = open(args.output, "w", encoding="utf-8", newline="")
    try:
        yield fh
    finally:
        fh.close()


def _read_floats(path) -> list[float]:
    with open(path, "r", encoding="utf-8") as fh:
        return [float(line) for line in fh if line.strip()]


def _read_ints(path) -> list[int]:
    with open(path, "r", encoding="utf-8") as fh:
        return [int(line) for line in fh if line.strip()]


def _build_problem(args):
    files = load_dataset(args.dataset)
    if args.per_file_c is not None and args.alphabet is not None:
        raise ValidationError("--per-file-c and --alphabet cannot be combined")
    if args.alphabet is not None:
        alphabet = OutputAlphabet(np.asarray(_read_ints(args.alphabet), np.int64))
        return server_identity_reduction(
            files, alphabet, args.c, strict_lstar_bound=args.strict_lstar_bound
        )
    if args.per_file_c is not None:
        return problem_from_per_file_multipliers(files, _read_floats(args.per_file_c))
    return problem_from_multiplier(files, args.c)


def _cmd_gen(args) -> int:
    spec = SyntheticSpec(
        n=args.n,
        size_min=args.size_min,
        size_max=args.size_max,
        zipf_exponent=args.zipf_exponent,
        seed=args.seed,
        frequency_assignment=args.frequency_assignment,
    )
    files = generate_synthetic(spec)
    with _out(args) as fh:
        write_dataset(files, fh)
    return 0


def _cmd_solve(args) -> int:
    problem = _build_problem(args)
    joint = SOLVERS[args.algorithm](problem)
    if args.alphabet is not None:
        source = {"kind": "shared-alphabet", "c": args.c, "path": args.alphabet}
    elif args.per_file_c is not None:
        source = {"kind": "per-file", "path": args.per_file_c}
    else:
        source = {"kind": "multiplier", "c": args.c}
    doc = scheme_to_dict(joint, args.algorithm, source)
    doc["report"] = evaluate(joint, secret=args.secret).to_dict()
    with _out(args) as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    return 0


def _cmd_eval(args) -> int:
    doc = load_scheme(args.scheme)
    report = evaluate(doc.joint, secret=args.secret)
    with _out(args) as fh:
        json.dump({"algorithm": doc.algorithm, **report.to_dict()}, fh, indent=1)
        fh.write("\n")
    return 0


def _cmd_attack(args) -> int:
    doc = load_scheme(args.scheme)
    trace = simulate_attacker(
        doc.joint.problem,
        doc.joint,
        trials=args.trials,
        seed=args.seed,
        checkpoint_every=args.checkpoint_every,
    )
    payload = {
        "trials": trace.trials,
        "seed": trace.seed,
        "theoretical_optimum": trace.theoretical_optimum,
        "empirical_success_rate": trace.final_rate,
        "checkpoints": [list(c) for c in trace.checkpoints],
    }
    with _out(args) as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    return 0


def _cmd_oracle(args) -> int:
    problem = _build_problem(args)
    result = brute_force_pop(problem)
    payload = {
        "min_vulnerability": result.min_vulnerability,
        "min_shannon_bits": result.min_shannon_bits,
        "min_bandwidth_among_vulnerability_optimal": (
            result.min_bandwidth_among_vulnerability_optimal
        ),
        "optimal_scheme_count": result.optimal_scheme_count,
        "witness_vulnerability": list(result.witness_vulnerability.assignment),
        "witness_shannon": list(result.witness_shannon.assignment),
        "witness_bandwidth": list(result.witness_bandwidth.assignment),
    }
    if args.resolution is not None:
        payload["grid_min_vulnerability"] = grid_search_prp(problem, args.resolution)
        payload["grid_resolution"] = args.resolution
    with _out(args) as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    return 0


def _cmd_bench(args) -> int:
    files = load_dataset(args.dataset)
    records = run_bench(files, args.c, algorithms=args.algorithms, parallel=args.parallel)
    with _out(args) as fh:
        write_bench_csv(records, fh)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="padopt",
        description="Padding schemes minimizing what a size-watching attacker learns.",
    )
    parser.add_argument("--version", action="version", version=f"padopt {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a synthetic dataset CSV")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--size-min", type=int, default=1024)
    gen.add_argument("--size-max", type=int, default=10_000_000)
    gen.add_argument("--zipf-exponent", type=float, default=1.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument(
        "--frequency-assignment",
        choices=["random", "inverse-size"],
        default="random",
    )
    gen.add_argument("--output", default=None)
    gen.set_defaults(func=_cmd_gen)

    def add_problem_args(cmd):
        cmd.add_argument("dataset", help="size,frequency CSV")
        cmd.add_argument("--c", type=float, default=1.1, help="padding bound")
        cmd.add_argument("--per-file-c", default=None, help="file of per-file bounds")
        cmd.add_argument(
            "--alphabet", default=None, help="file of shared output sizes"
        )
        cmd.add_argument("--strict-lstar-bound", action="store_true")

    solve = sub.add_parser("solve", help="compute and save a padding scheme")
    add_problem_args(solve)
    solve.add_argument("--algorithm", choices=sorted(SOLVERS), default="popre")
    solve.add_argument("--secret", choices=["file", "size"], default="file")
    solve.add_argument("--output", default=None)
    solve.set_defaults(func=_cmd_solve)

    ev = sub.add_parser("eval", help="re-measure a saved scheme")
    ev.add_argument("scheme", help="scheme JSON document")
    ev.add_argument("--secret", choices=["file", "size"], default="file")
    ev.add_argument("--output", default=None)
    ev.set_defaults(func=_cmd_eval)

    attack = sub.add_parser("attack", help="simulate the one-try attacker")
    attack.add_argument("scheme", help="scheme JSON document")
    attack.add_argument("--trials", type=int, default=100_000)
    attack.add_argument("--seed", type=int, default=0)
    attack.add_argument("--checkpoint-every", type=int, default=1000)
    attack.add_argument("--output", default=None)
    attack.set_defaults(func=_cmd_attack)

    oracle = sub.add_parser("oracle", help="brute-force ground truth")
    add_problem_args(oracle)
    oracle.add_argument(
        "--resolution",
        type=int,
        default=None,
        help="also grid-search randomized schemes at this resolution",
    )
    oracle.add_argument("--output", default=None)
    oracle.set_defaults(func=_cmd_oracle)

    bench = sub.add_parser("bench", help="sweep algorithms over c values")
    bench.add_argument("dataset")
    bench.add_argument("--c", type=float, nargs="*", default=[], help="c values")
    bench.add_argument(
        "--algorithms", nargs="+", choices=sorted(SOLVERS), default=sorted(SOLVERS)
    )
    bench.add_argument("--parallel", action="store_true")
    bench.add_argument("--output", default=None)
    bench.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InternalCheckError, AssertionError) as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
