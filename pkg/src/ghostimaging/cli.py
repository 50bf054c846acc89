"""Command-line entry point.

Exit codes: 0 success, 1 domain error (one ``error: ...`` line on stderr),
2 usage error (argparse prints the grammar).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import experiments, patterns
from .hadamard import hadamard, to_text, verify_hadamard
from .exceptions import GhostImagingError, InvalidArgumentError

KIND_ALIASES = {
    "pseudo": patterns.PSEUDO_HADAMARD,
    "special": patterns.SPECIAL_HADAMARD,
    "random": patterns.RANDOM_BINARY,
    **{k: k for k in patterns.KINDS},
}


def _kind(value: str) -> str:
    try:
        return KIND_ALIASES[value]
    except KeyError:
        raise argparse.ArgumentTypeError(
            f"invalid kind {value!r} (choose from {', '.join(sorted(KIND_ALIASES))})"
        ) from None


def _positive_int(value: str) -> int:
    try:
        n = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{value!r} is not an integer") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"{value!r} must be >= 1")
    return n


def _shape(value: str) -> tuple[int, int]:
    try:
        n1, n2 = (int(v) for v in value.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"shape must look like ROWSxCOLS, got {value!r}") from None
    if n1 < 1 or n2 < 1:
        raise argparse.ArgumentTypeError(f"shape dimensions must be >= 1, got {value!r}")
    return n1, n2


def _int_list(value: str) -> list[int]:
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}") from None


def _variant(value: str):
    parts = value.split(":")
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError(f"variant must be KIND:COUNT[:raw], got {value!r}")
    kind = _kind(parts[0])
    count = _positive_int(parts[1])
    if len(parts) == 3:
        if parts[2] != "raw":
            raise argparse.ArgumentTypeError(f"unknown variant flag {parts[2]!r}")
        return (kind, count, False)
    return (kind, count)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghostimaging",
        description="Hadamard and Special-Hadamard computational ghost imaging simulator.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log per-trial progress")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help):
        p = sub.add_parser(name, help=help, description=help)
        p.add_argument("--seed", type=int, default=0,
                       help="base RNG seed (default 0; recorded in outputs)")
        return p

    p = add("gen-hadamard", "print a Hadamard matrix as a +/- grid")
    p.add_argument("--order", type=_positive_int, required=True)
    p.add_argument("--output", help="write to this file instead of stdout")

    p = add("gen-patterns", "write pattern images and a manifest")
    p.add_argument("--kind", type=_kind, required=True,
                   help="pseudo | special | random (or the full kind name)")
    p.add_argument("--k", type=_positive_int,
                   help="measurement count (Hadamard order for pseudo/special)")
    p.add_argument("--n", type=_positive_int, help="pixel count (special/random)")
    p.add_argument("--m", type=_positive_int, help="alias of --k for random patterns")
    p.add_argument("--shape", type=_shape, help="pattern image shape ROWSxCOLS")
    p.add_argument("--output-dir", default="patterns")

    p = add("simulate", "run one experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir")
    p.add_argument("--trials", type=_positive_int)

    p = add("sweep", "MSE versus Special-Hadamard K")
    p.add_argument("--config", required=True)
    p.add_argument("--k-values", type=_int_list, required=True, help="e.g. 8192,16384,32768")
    p.add_argument("--output-dir")
    p.add_argument("--trials", type=_positive_int)

    p = add("compare", "compare pattern families at fixed sigma")
    p.add_argument("--config", required=True)
    p.add_argument("--variant", type=_variant, action="append", required=True,
                   help="KIND:COUNT[:raw]; repeatable")
    p.add_argument("--output-dir")
    p.add_argument("--trials", type=_positive_int)

    p = add("verify", "check H H^T = n I for a constructed matrix")
    p.add_argument("--order", type=_positive_int, required=True)

    p = add("preset", "reproduce a figure-level study")
    p.add_argument("name", choices=experiments.PRESETS)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--trials", type=_positive_int)
    return parser


def _load_config(args, seed_given: bool) -> experiments.ExperimentConfig:
    config = experiments.ExperimentConfig.from_json(args.config)
    if args.output_dir:
        config.output_dir = args.output_dir
    if config.output_dir is None:
        config.output_dir = "."
    if args.trials:
        config.seeds = None
        config.trials = args.trials
    if seed_given:
        config.seeds = None
        config.base_seed = args.seed
    return config


def _cmd_gen_hadamard(args) -> int:
    text = to_text(hadamard(args.order)) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        print(f"wrote {args.output} order={args.order}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_gen_patterns(args) -> int:
    kind = args.kind
    count = args.k or args.m
    if kind == patterns.PSEUDO_HADAMARD:
        if count is None:
            raise InvalidArgumentError("pseudo patterns need --k")
        P = patterns.pseudo_hadamard(count)
    elif kind == patterns.SPECIAL_HADAMARD:
        if count is None or args.n is None:
            raise InvalidArgumentError("special patterns need --k and --n")
        P = patterns.special_hadamard(count, args.n, seed=args.seed)
    else:
        if count is None or args.n is None:
            raise InvalidArgumentError("random patterns need --n and --m (or --k)")
        P = patterns.random_binary(args.n, count, seed=args.seed)
    if args.shape and args.shape[0] * args.shape[1] != P.rows:
        raise InvalidArgumentError(f"shape {args.shape} does not hold {P.rows} pixels")
    paths = patterns.save_patterns(P, args.output_dir, args.shape)
    print(f"wrote {len(paths)} patterns kind={P.kind} rows={P.rows} cols={P.cols} "
          f"seed={P.seed} dir={args.output_dir}")
    return 0


def _print_report(report: experiments.ExperimentReport) -> None:
    for t in report.trials:
        print(f"trial label={t.label} seed={t.seed} mse={t.mse!r}")
    print(f"median_mse={report.median_mse!r} mean_mse={report.mean_mse!r}")


def _cmd_simulate(args, seed_given) -> int:
    config = _load_config(args, seed_given)
    report = experiments.run_single(config)
    _print_report(report)
    return 0


def _cmd_sweep(args, seed_given) -> int:
    config = _load_config(args, seed_given)
    curve, _ = experiments.sweep_k(config, args.k_values)
    for k, m in curve:
        print(f"K={k} median_mse={m!r}")
    return 0


def _cmd_compare(args, seed_given) -> int:
    config = _load_config(args, seed_given)
    rows, _ = experiments.compare_patterns(config, args.variant)
    for row in rows:
        print(f"label={row['label']} kind={row['kind']} count={row['count']} "
              f"median_mse={row['median_mse']!r}")
    return 0


def _cmd_verify(args) -> int:
    if verify_hadamard(hadamard(args.order)):
        print(f"OK order={args.order}")
        return 0
    print(f"FAIL order={args.order}")
    return 1


def _cmd_preset(args) -> int:
    result = experiments.run_preset(args.name, args.output_dir, seed=args.seed, trials=args.trials)
    print(json.dumps(result, sort_keys=True, default=float))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    seed_given = any(a == "--seed" or a.startswith("--seed=") for a in argv)
    try:
        if args.command == "gen-hadamard":
            return _cmd_gen_hadamard(args)
        if args.command == "gen-patterns":
            return _cmd_gen_patterns(args)
        if args.command == "simulate":
            return _cmd_simulate(args, seed_given)
        if args.command == "sweep":
            return _cmd_sweep(args, seed_given)
        if args.command == "compare":
            return _cmd_compare(args, seed_given)
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_preset(args)
    except (GhostImagingError, OSError) as exc:
        message = " ".join(str(exc).split())
        print(f"error: type={type(exc).__name__} message={json.dumps(message)}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
