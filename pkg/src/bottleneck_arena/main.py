"""Command-line entry point for the bottleneck arena workbench."""

import argparse
import json
import logging
import sys
from typing import Optional

from . import __version__
from .config.loader import load_config
from .engine.generators import Family
from .errors import ArenaError
from .models.game import CostModel
from .models.reports import Schedule, SupportMode
from .workbench.runner import Workbench, poa_row
from .workbench.serialization import parse_instance, parse_routing
from .workbench.storage import read_text, report_text, write_output
from .workbench.tables import (
    chain_frame,
    classification_frame,
    frame_to_csv,
    sweep_frame,
    trace_frame,
)

logger = logging.getLogger(__name__)


def parse_range(text: str) -> list[int]:
    """'3..8', '3,5,7' or '4'."""
    try:
        if ".." in text:
            lo, hi = (int(part) for part in text.split("..", 1))
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid range {text!r}; use A..B or a comma list") from None


def parse_models(text: str) -> list[CostModel]:
    try:
        return [CostModel.from_label(part) for part in text.split(",") if part.strip()]
    except ArenaError as exc:
        raise argparse.ArgumentTypeError(exc.message) from None


def parse_model(text: str) -> CostModel:
    models = parse_models(text)
    if len(models) != 1:
        raise argparse.ArgumentTypeError(f"expected one cost model, got {text!r}")
    return models[0]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", default=None, help="Path to config file (YAML or JSON)")
    common.add_argument("-v", "--verbose", action="store_true", help="Enable verbose logging")
    common.add_argument("-o", "--out", default=None, help="Write the result here instead of stdout")
    common.add_argument("--timing", action="store_true", help="Include wall-clock timing in the report")

    parser = argparse.ArgumentParser(
        prog="bottleneck-arena",
        description="Game engine and analysis workbench for bottleneck routing games",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[common], help="Build an instance file from a family")
    gen.add_argument("--family", type=Family, choices=list(Family), required=True)
    gen.add_argument("--k", type=int, help="counterexample size")
    gen.add_argument("--players", type=int)
    gen.add_argument("--links", type=int)
    gen.add_argument("--rows", type=int)
    gen.add_argument("--cols", type=int)
    gen.add_argument("--nodes", type=int)
    gen.add_argument("--edges", type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--model", type=parse_model, default="expsum", help="cost model label (default expsum)")

    val = sub.add_parser("validate", parents=[common], help="Report every problem in an instance file")
    val.add_argument("instance")

    brd = sub.add_parser("brd", parents=[common], help="Run best response dynamics")
    brd.add_argument("instance")
    brd.add_argument("--schedule", type=Schedule, choices=list(Schedule), default=None)
    brd.add_argument("--max-steps", type=int, default=None)
    brd.add_argument("--start", default="lexfirst", help="lexfirst or random:SEED")
    brd.add_argument("--seed", type=int, default=None, help="seed for the random schedule")
    brd.add_argument("--csv", default=None, help="Also write the move trace as CSV")

    opt = sub.add_parser("optimal", parents=[common], help="Minimum bottleneck congestion C*")
    opt.add_argument("instance")

    ver = sub.add_parser("verify", parents=[common], help="Nash check of a routing file")
    ver.add_argument("instance")
    ver.add_argument("routing")

    enum = sub.add_parser("enumerate", parents=[common], help="Enumerate pure Nash routings")
    enum.add_argument("instance")
    enum.add_argument("--profile-cap", type=int, default=None)

    poa = sub.add_parser("poa", parents=[common], help="Price of anarchy and stability")
    poa.add_argument("instance")
    poa.add_argument("--csv", default=None, help="Also write a one-row CSV")
    poa.add_argument("--family", default="instance", help="family label for the CSV row")
    poa.add_argument("--k", type=int, default=0, help="family parameter for the CSV row")

    chain = sub.add_parser("chain", parents=[common], help="Expansion chain of a Nash routing")
    chain.add_argument("instance")
    chain.add_argument("--routing", default=None, help="Nash routing file (default: dynamics end point)")
    chain.add_argument("--opt", default=None, help="optimal routing file (default: solver witness)")
    chain.add_argument("--root", default="top-cost", help="comma list of player ids or top-cost")
    chain.add_argument("--support", type=SupportMode, choices=list(SupportMode), default=SupportMode.GREEDY)
    chain.add_argument("--csv", default=None)

    cls = sub.add_parser("classify", parents=[common], help="Stage and type of every player")
    cls.add_argument("instance")
    cls.add_argument("--routing", default=None)
    cls.add_argument("--csv", default=None)

    sweep = sub.add_parser("sweep", parents=[common], help="poa over a family range, as CSV")
    sweep.add_argument(
        "--family", type=Family, choices=[Family.COUNTEREXAMPLE, Family.PARALLEL], default=Family.COUNTEREXAMPLE
    )
    sweep.add_argument("--k", type=parse_range, required=True, help="A..B or comma list (players for parallel)")
    sweep.add_argument("--links", type=int, default=2)
    sweep.add_argument("--models", type=parse_models, default="linear,expsum")
    return parser


def _run(args: argparse.Namespace, argv: list[str]) -> None:
    config = load_config(args.config)
    bench = Workbench(config, command=tuple(argv), timing=args.timing)
    digits = config.output.float_digits

    if args.command == "generate":
        spec = bench.gen_spec(
            family=args.family,
            cost_model=args.model,
            k=args.k,
            players=args.players,
            links=args.links,
            rows=args.rows,
            cols=args.cols,
            nodes=args.nodes,
            edges=args.edges,
            seed=args.seed,
        )
        write_output(bench.generate(spec), args.out)
        return

    if args.command == "sweep":
        rows = bench.sweep(args.family, args.k, args.models, args.links)
        write_output(frame_to_csv(sweep_frame(rows), digits), args.out)
        return

    if args.command == "validate":
        report = bench.validate(read_text(args.instance))
        write_output(report_text(report), args.out)
        if not report.payload["valid"]:
            raise SystemExit(1)
        return

    inst = parse_instance(read_text(args.instance))
    csv_text = None
    if args.command == "brd":
        report, trace = bench.brd(inst, args.schedule, args.max_steps, args.start, args.seed)
        csv_text = frame_to_csv(trace_frame(trace), digits)
    elif args.command == "optimal":
        report = bench.optimal(inst)
    elif args.command == "verify":
        report = bench.verify(inst, parse_routing(read_text(args.routing), inst))
    elif args.command == "enumerate":
        report = bench.enumerate(inst, args.profile_cap)
    elif args.command == "poa":
        report, equilibria = bench.poa(inst)
        row = poa_row(args.family, args.k, inst.cost_model, equilibria)
        csv_text = frame_to_csv(sweep_frame([row]), digits)
    elif args.command == "chain":
        nash = parse_routing(read_text(args.routing), inst) if args.routing else None
        opt = parse_routing(read_text(args.opt), inst) if args.opt else None
        report, chain = bench.chain(inst, nash, opt, args.root, args.support)
        csv_text = frame_to_csv(chain_frame(chain), digits)
    else:
        nash = parse_routing(read_text(args.routing), inst) if args.routing else None
        report, classification = bench.classify(inst, nash)
        csv_text = frame_to_csv(classification_frame(classification), digits)

    write_output(report_text(report), args.out)
    if csv_text is not None and args.csv:
        write_output(csv_text, args.csv)


def cli_main(argv: Optional[list[str]] = None) -> int:
    """Exit code 0 on success, 1 on domain errors, 2 on usage errors."""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    )
    logger.info("Running %s", args.command)
    try:
        _run(args, argv)
    except ArenaError as exc:
        logger.error("%s failed: [%s] %s", args.command, exc.code, exc.message)
        print(json.dumps(exc.to_payload(), sort_keys=True, default=str), file=sys.stderr)
        return 1
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    except OSError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    logger.info("%s finished", args.command)
    return 0


def main() -> int:
    return cli_main()


if __name__ == "__main__":
    sys.exit(main())
