import argparse
import functools
import sys
import numpy as np
import yaml
from pathlib import Path
from typing import Callable, Dict
from src.core.errors import ISSVDError, NumericalError
from src.core.views import STANDARDIZATIONS
from src.cli.documents import (
    biclusters_from_result,
    biclusters_from_truth,
    metrics_document,
    read_document,
    result_document,
    truth_document,
    write_document,
)
from src.cli.files import load_views, save_views
from src.issvd.assign import assign_unclustered
from src.issvd.model import ISSVD
from src.metrics.scores import score_biclusters
from src.parameters import FitConfig
from src.synthgen.scenarios import generate
from src.utils.misc import Stopwatch, datetime_now as dt_now

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

# argparse dests; identical to the YAML keys
FIT_FLAGS = (
    "nbicluster", "vthr", "pceru", "pcerv", "ssthr", "size", "steps", "pointwise", "standr",
    "row_overlap", "col_overlap", "rows_nc", "cols_nc", "merr", "iters", "seed", "grid_size", "verbose",
)


def exit_codes(command: Callable[[argparse.Namespace], int]) -> Callable[[argparse.Namespace], int]:
    """
    Maps library errors to exit codes: 2 for input, configuration and schema
    problems, 3 for numerical failures.
    """

    @functools.wraps(command)
    def wrapper(args: argparse.Namespace) -> int:
        try:
            return command(args)
        except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as e:
            print(f"{dt_now()}: numerical failure: {e}", file=sys.stderr)
            return EXIT_NUMERICAL
        except (ISSVDError, OSError) as e:
            print(f"{dt_now()}: {e}", file=sys.stderr)
            return EXIT_INPUT

    return wrapper


def add_fit_arguments(parser: argparse.ArgumentParser) -> None:
    """
    Flags named after the YAML parameters; unset flags fall back to the
    parameters file, then to the defaults.
    """
    bool_flag = argparse.BooleanOptionalAction
    g = parser.add_argument_group("fit parameters")
    g.add_argument("--config", help="YAML parameters file")
    g.add_argument("--nbicluster", type=int, help="maximum number of biclusters")
    g.add_argument("--vthr", type=float, help="cumulative variance threshold for choosing K")
    g.add_argument("--pceru", type=float, help="per-comparison error rate for samples")
    g.add_argument("--pcerv", type=float, nargs="+", help="per-comparison error rate per view")
    g.add_argument("--ssthr", type=float, nargs=2, metavar=("MIN", "MAX"), help="selection threshold range")
    g.add_argument("--size", type=float, help="subsample fraction")
    g.add_argument("--steps", type=int, help="subsamples per probability estimate")
    g.add_argument("--pointwise", action=bool_flag, default=None, help="bisect a single penalty instead of the full path")
    g.add_argument("--standr", choices=STANDARDIZATIONS, help="standardization of every view")
    g.add_argument("--row-overlap", dest="row_overlap", action=bool_flag, default=None)
    g.add_argument("--col-overlap", dest="col_overlap", action=bool_flag, default=None)
    g.add_argument("--rows-nc", dest="rows_nc", action=bool_flag, default=None, help="allow mixed signs among rows")
    g.add_argument("--cols-nc", dest="cols_nc", action=bool_flag, default=None, help="allow mixed signs among columns")
    g.add_argument("--merr", type=float, help="convergence tolerance")
    g.add_argument("--iters", type=int, help="maximum alternations per layer")
    g.add_argument("--seed", type=int, help="master seed for subsampling")
    g.add_argument("--grid-size", dest="grid_size", type=int, help="penalty grid size in full-path mode")
    g.add_argument("--verbose", action=bool_flag, default=None)


def build_config(args: argparse.Namespace) -> FitConfig:
    config = FitConfig.from_yaml(args.config) if getattr(args, "config", None) else FitConfig()
    overrides = {name: getattr(args, name) for name in FIT_FLAGS if getattr(args, name, None) is not None}
    return config.updated(overrides) if overrides else config


@exit_codes
def run_fit(args: argparse.Namespace) -> int:
    """
    bicluster: load the views, fit, optionally assign unclustered samples, and
    write the result document.
    """
    config = build_config(args)
    print(f"{dt_now()}: loading {len(args.views)} view(s)")
    data = load_views(args.views, header=args.header, row_labels=args.row_labels)
    print(f"{dt_now()}: fitting n={data.n}, dims={data.dims}")

    timer = Stopwatch()
    model = ISSVD(config).fit(data)
    if args.assign_unclustered:
        model = assign_unclustered(model, data)
    seconds = timer.elapsed

    doc = result_document(model, seconds, data.view_names, data.sample_ids)
    write_document(doc, args.out)
    print(f"{dt_now()}: {model.K_detected} bicluster(s) in {seconds:.2f}s -> {args.out}")
    for line in model.diagnostics:
        print(f"{dt_now()}: note: {line}")
    return EXIT_OK


@exit_codes
def run_simulate(args: argparse.Namespace) -> int:
    """
    simulate: write one delimited file per view plus the truth document.
    """
    data, truth = generate(args.scenario, args.case, args.scalar, args.sigma, args.seed)
    out_dir = Path(args.out_dir)
    names = [f"view{d + 1}" for d in range(data.n_views)]
    paths = [str(out_dir / f"{name}.csv") for name in names]

    save_views(data, paths)
    write_document(truth_document(truth, names), str(out_dir / "truth.yaml"))
    print(f"{dt_now()}: {args.scenario} n={data.n}, dims={data.dims}, K={truth.K} -> {out_dir}")
    return EXIT_OK


@exit_codes
def run_evaluate(args: argparse.Namespace) -> int:
    """
    evaluate: score a result document against a truth document.
    """
    result = read_document(args.result, "result")
    truth_doc = read_document(args.truth, "truth")

    est, unclustered = biclusters_from_result(result, args.result)
    truth = biclusters_from_truth(truth_doc, args.truth)
    report = score_biclusters(est, truth, unclustered)
    doc = metrics_document(report, args.result, args.truth)

    if args.out:
        write_document(doc, args.out)
        print(f"{dt_now()}: f_score={report.f_score:.3f} -> {args.out}")
    else:
        sys.stdout.write(yaml.safe_dump(doc, sort_keys=False))
    return EXIT_OK

