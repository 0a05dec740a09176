import argparse
import asyncio
import sys
import uvloop
from dotenv import load_dotenv
load_dotenv()

from src.cli.benchmark import add_benchmark_arguments, run_benchmark
from src.cli.commands import add_fit_arguments, run_evaluate, run_fit, run_simulate
from src.synthgen.scenarios import SCENARIOS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="issvd", description="Multi-view biclustering with stability selection")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic benchmark dataset")
    p.add_argument("--scenario", choices=SCENARIOS, default="scenario1")
    p.add_argument("--case", type=int, default=1)
    p.add_argument("--scalar", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(handler=run_simulate)

    p = sub.add_parser("bicluster", help="fit biclusters to delimited view files")
    p.add_argument("views", nargs="+", help="one delimited matrix file per view")
    p.add_argument("--out", required=True, help="result document path")
    p.add_argument("--header", action="store_true", help="files start with a header line")
    p.add_argument("--row-labels", dest="row_labels", action="store_true", help="first column holds sample labels")
    p.add_argument("--assign-unclustered", dest="assign_unclustered", action="store_true")
    add_fit_arguments(p)
    p.set_defaults(handler=run_fit)

    p = sub.add_parser("evaluate", help="score a result against a truth document")
    p.add_argument("--result", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--out", help="metrics document path (stdout if omitted)")
    p.set_defaults(handler=run_evaluate)

    p = sub.add_parser("benchmark", help="Monte Carlo grid of simulate, fit and evaluate")
    add_benchmark_arguments(p)
    add_fit_arguments(p)
    p.set_defaults(handler=None)

    return parser


def main(argv=None) -> int:
    """
    Parses the command line and runs one subcommand; the benchmark runs on a uvloop event loop.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # usage errors exit with 2
        return int(e.code or 0)

    if args.command == "benchmark":
        asyncio.set_event_loop_policy(uvloop.EventLoopPolicy())
        return asyncio.run(run_benchmark(args))

    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
