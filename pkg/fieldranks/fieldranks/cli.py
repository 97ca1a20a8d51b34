# Copyright (c) 2024 Contributors
# All rights reserved.

import argparse
import logging
import sys

import msgspec

from .commands import COMMANDS, run_command
from .errors import FieldRanksError, InconclusiveEstimate, InequalityViolation
from .reports import FORMATS
from .settings import all_cores, load_settings

logger = logging.getLogger("fieldranks")

LOG_LEVELS = [logging.WARNING, logging.INFO, logging.DEBUG]


def _shape(text: str) -> list[int]:
    try:
        shape = [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"shape must be comma-separated integers, got {text!r}")
    if len(shape) < 2 or min(shape) < 1:
        raise argparse.ArgumentTypeError(f"shape needs at least two positive sizes, got {text!r}")
    return shape


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fieldranks", description="Exact tensor ranks over finite fields.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logging.")
    parser.add_argument("--threads", type=int, default=None, help="Worker processes (default: all cores).")
    parser.add_argument("--budget", type=int, default=None, help="Cap on enumerated points.")
    parser.add_argument("--format", choices=FORMATS, default="json")
    parser.add_argument("--output", default=None, help="Directory that also receives each report as a file.")
    parser.add_argument("--config", default=None, help="TOML file with guard and budget settings.")
    commands = parser.add_subparsers(dest="command", required=True)

    ar = commands.add_parser("ar", help="Analytic rank by exact zero counting.")
    ar.add_argument("file")
    ar.add_argument("--mode", type=int, action="append", help="1-based mode to contract away (repeatable).")
    ar.add_argument("--char-check", action="store_true", help="Also evaluate the character sum.")

    gr = commands.add_parser("gr", help="Geometric rank estimate along the extension tower.")
    gr.add_argument("file")
    gr.add_argument("--mode", type=int, default=None)
    gr.add_argument("--lmax", type=int, default=3)

    rank = commands.add_parser("rank", help="Exact slice, partition or cp-rank with a certificate.")
    rank.add_argument("file")
    rank.add_argument("--kind", choices=sorted(COMMANDS["rank"].SEARCHES), default="slice")
    rank.add_argument("--subrank", type=int, default=None, help="Also decide whether Id_s restricts from T.")

    stability = commands.add_parser("stability", help="Analytic rank under base change.")
    stability.add_argument("file")
    stability.add_argument("--l", type=int, default=2)
    stability.add_argument("--mode", type=int, default=None)

    matmul = commands.add_parser("matmul-table", help="Analytic and geometric rank of <n,n,n>.")
    matmul.add_argument("--n", type=int, default=2)
    matmul.add_argument("--lmax", type=int, default=3)
    matmul.add_argument("--q", type=int, default=2)

    audit = commands.add_parser("audit", help="Seeded checks of the rank identities and inequalities.")
    audit.add_argument("--shape", type=_shape, default=[2, 2, 2])
    audit.add_argument("--q", type=int, default=2)
    audit.add_argument("--count", type=int, default=25)
    audit.add_argument("--seed", type=int, default=0)
    audit.add_argument("--probes", type=int, default=2, help="Samples that also run the exact searches.")

    subspace = commands.add_parser("subspace", help="Slice rank of a subspace of tensors.")
    subspace.add_argument("file")
    subspace.add_argument("--k", type=int, default=None)
    subspace.add_argument("--tw", action="store_true", help="Also compute the slice rank of its order-(d+2) tensor.")

    construct = commands.add_parser("construct", help="Interpolation certificates for extension fields.")
    construct.add_argument("--kind", choices=["interp", "pushforward", "subrank", "monotonicity"], required=True)
    construct.add_argument("--d", type=int, default=3)
    construct.add_argument("--l", type=int, default=2)
    construct.add_argument("--n", type=int, default=2)
    construct.add_argument("--q", type=int, default=2)
    return parser


def main(argv: list[str] | None = None, stream=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; 2 is reserved for guards
        return 1 if exc.code else 0
    logging.basicConfig(level=LOG_LEVELS[min(args.verbose, 2)], stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        settings = load_settings(args.config, workers=args.threads or all_cores(), budget=args.budget)
        run_command(args, settings, stream)
    except InequalityViolation as exc:
        logger.error("%s", exc)
        sys.stderr.write(msgspec.json.format(msgspec.json.encode(exc.dump), indent=2).decode("utf-8") + "\n")
        return exc.exit_code
    except InconclusiveEstimate as exc:
        logger.error("%s", exc)
        if exc.estimate is not None:
            sys.stderr.write(msgspec.json.encode(exc.estimate.to_dict()).decode("utf-8") + "\n")
        return exc.exit_code
    except FieldRanksError as exc:
        logger.error("%s", exc)
        return exc.exit_code
    except (ValueError, OSError, msgspec.DecodeError) as exc:
        logger.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
