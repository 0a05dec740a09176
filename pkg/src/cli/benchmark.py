import argparse
import asyncio
import os
import sys
import numpy as np
import orjson
import pandas as pd
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from pathlib import Path
from typing import Dict, List, Sequence
from src.cli.commands import EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK, build_config
from src.core.errors import ConfigError, ISSVDError, NumericalError
from src.issvd.model import ISSVD
from src.metrics.scores import evaluate
from src.parameters import FitConfig
from src.synthgen.scenarios import SCENARIOS, generate
from src.utils.misc import Stopwatch, datetime_now as dt_now, env_int

CELL_COLUMNS = ["scenario", "case", "scalar", "sigma"]
METRICS = ["relevance", "recovery", "f_score", "fp", "fn", "unclustered", "k_detected"]


def add_benchmark_arguments(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("grid")
    g.add_argument("--scenario", nargs="+", choices=SCENARIOS, default=["scenario1"])
    g.add_argument("--case", type=int, nargs="+", default=[1], help="scenario 1 cases")
    g.add_argument("--scalar", type=float, nargs="+", default=[1.0], help="scenario 1 view-2 scalars")
    g.add_argument("--sigma", type=float, nargs="+", default=[0.1], help="noise levels")
    g.add_argument("--replicates", type=int, default=50)
    g.add_argument("--seed-base", dest="seed_base", type=int, default=0)
    g.add_argument("--workers", type=int, default=None, help="process count (ISSVD_THREADS, else CPU count)")
    g.add_argument("--out-dir", dest="out_dir", required=True)
    g.add_argument("--timing", action="store_true", help="add wall-time columns to the outputs")


def grid_cells(scenarios: Sequence[str], cases: Sequence[int], scalars: Sequence[float], sigmas: Sequence[float]) -> List[Dict]:
    """
    Expands the grid. Only scenario 1 varies case and scalar; the outlier
    scenario has fixed noise and appears once.
    """
    cells = []
    for scenario in scenarios:
        if scenario == "scenario1":
            combos = product(cases, scalars, sigmas)
        elif scenario == "scenario2":
            combos = ((0, 1.0, s) for s in sigmas)
        else:
            combos = [(0, 1.0, 0.1)]
        cells.extend({"scenario": scenario, "case": int(c), "scalar": float(a), "sigma": float(s)} for c, a, s in combos)
    return cells


def replicate_seed(seed_base: int, cell: int, replicate: int) -> int:
    """Seed of one replicate; independent of scheduling order."""
    return int(np.random.SeedSequence([seed_base, cell, replicate]).generate_state(1)[0])


def run_replicate(task: Dict) -> Dict:
    """
    One generate, fit and evaluate cycle; runs inside a worker process.
    """
    timer = Stopwatch()
    data, truth = generate(task["scenario"], task["case"], task["scalar"], task["sigma"], task["seed"])
    config = FitConfig.from_settings(task["settings"]).updated({"seed": task["seed"]})
    model = ISSVD(config).fit(data)
    report = evaluate(model, truth.biclusters)

    return {
        **{k: task[k] for k in CELL_COLUMNS},
        "replicate": task["replicate"],
        "seed": task["seed"],
        "relevance": float(report.relevance),
        "recovery": float(report.recovery),
        "f_score": float(report.f_score),
        "fp": float(report.fp_rate),
        "fn": float(report.fn_rate),
        "unclustered": int(report.unclustered_count),
        "k_detected": int(report.k_detected),
        "seconds": float(timer.elapsed),
    }


def summarize(rows: List[Dict], timing: bool = False) -> pd.DataFrame:
    """
    One row per grid cell with `<metric>_mean` and `<metric>_std` columns.
    """
    metrics = METRICS + (["seconds"] if timing else [])
    columns = CELL_COLUMNS + ["replicates"] + [f"{m}_{s}" for m in metrics for s in ("mean", "std")]
    if not rows:
        return pd.DataFrame(columns=columns)

    raw = pd.DataFrame(rows)
    grouped = raw.groupby(CELL_COLUMNS, sort=False)
    table = grouped[metrics].agg(["mean", "std"])
    table.columns = [f"{m}_{s}" for m, s in table.columns]
    table = table.fillna(0.0)
    table.insert(0, "replicates", grouped.size())
    return table.reset_index()[columns]


async def run_grid(tasks: List[Dict], workers: int) -> List[Dict]:
    """
    Runs every replicate; results keep the order of `tasks`.
    """
    if workers <= 1:
        return [run_replicate(t) for t in tasks]

    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(await asyncio.gather(*(loop.run_in_executor(pool, run_replicate, t) for t in tasks)))


def write_outputs(rows: List[Dict], table: pd.DataFrame, out_dir: str, timing: bool) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    table.to_csv(out / "summary.csv", index=False, float_format="%.10g", lineterminator="\n")
    with open(out / "replicates.jsonl", "wb") as f:
        for row in rows:
            if not timing:
                row = {k: v for k, v in row.items() if k != "seconds"}
            f.write(orjson.dumps(row, option=orjson.OPT_APPEND_NEWLINE))


async def run_benchmark(args: argparse.Namespace) -> int:
    """
    benchmark: simulate, fit and evaluate every replicate of every grid cell,
    then write `summary.csv` and `replicates.jsonl` under the output directory.
    """
    try:
        if args.replicates < 0:
            raise ConfigError(f"replicates must be non-negative, got {args.replicates}")
        settings = build_config(args).to_settings()
        cells = grid_cells(args.scenario, args.case, args.scalar, args.sigma)
        tasks = [
            {**cell, "replicate": r, "seed": replicate_seed(args.seed_base, c, r), "settings": settings}
            for c, cell in enumerate(cells)
            for r in range(args.replicates)
        ]
        workers = args.workers or env_int("ISSVD_THREADS", os.cpu_count() or 1)

        print(f"{dt_now()}: {len(cells)} cell(s) x {args.replicates} replicate(s) on {workers} worker(s)")
        rows = await run_grid(tasks, min(workers, max(len(tasks), 1)))
        table = summarize(rows, args.timing)
        write_outputs(rows, table, args.out_dir, args.timing)
        print(f"{dt_now()}: {len(table)} row(s) -> {args.out_dir}")
        return EXIT_OK

    except (NumericalError, np.linalg.LinAlgError, FloatingPointError) as e:
        print(f"{dt_now()}: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ISSVDError, OSError) as e:
        print(f"{dt_now()}: {e}", file=sys.stderr)
        return EXIT_INPUT
