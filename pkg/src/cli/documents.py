import yaml
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple
from src.core.errors import InputFileError, SchemaVersionError
from src.core.types import Bicluster, BiclusterModel
from src.metrics.scores import MetricsReport
from src.synthgen.scenarios import GroundTruth

SCHEMA_VERSION = 1

# Indices inside documents are 1-based; the library is 0-based throughout.
# Per-view lists are positional, in the order of the "views" names.


def _one_based_(idx: Iterable[int]) -> List[int]:
    return [int(i) + 1 for i in sorted(idx)]


def _zero_based_(idx: Iterable[int], path: str, what: str) -> List[int]:
    out = [int(i) - 1 for i in idx]
    if any(i < 0 for i in out):
        raise InputFileError(f"{what} holds an index below 1", path)
    return out


def _view_names_(names: Optional[Sequence[str]], D: int) -> List[str]:
    return list(names) if names else [f"view{d + 1}" for d in range(D)]


def result_document(
    model: BiclusterModel,
    seconds: float,
    view_names: Optional[Sequence[str]] = None,
    sample_ids: Optional[Sequence[str]] = None,
) -> Dict:
    """
    Hierarchical record of a fit: configuration echo, layers with their index
    lists per view, memberships, convergence flags and wall-time.
    """
    views = _view_names_(view_names, len(model.dims))
    layers = []
    for k, layer in enumerate(model.layers, start=1):
        layers.append({
            "layer": k,
            "rows": _one_based_(layer.stable_rows),
            "cols": [_one_based_(c) for c in layer.stable_cols],
            "s": [float(x) for x in layer.s],
            "lambda_u": float(layer.lambda_u),
            "lambda_v": [float(x) for x in layer.lambda_v],
            "pi_u": float(layer.pi_u),
            "pi_v": [float(x) for x in layer.pi_v],
            "iterations": int(layer.iterations),
            "converged": bool(layer.converged),
        })

    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "result",
        "config": dict(model.config),
        "n": int(model.n),
        "views": views,
        "dims": [int(p) for p in model.dims],
        "K_selected": int(model.k_selected),
        "K_detected": int(model.K_detected),
        "converged": all(layer.converged for layer in model.layers),
        "wall_time_seconds": round(float(seconds), 6),
        "layers": layers,
        "membership": {
            "rows": [int(x) for x in model.row_membership],
            "cols": [[int(x) for x in c] for c in model.col_membership],
        },
        "assigned_rows": _one_based_(i for i, a in enumerate(model.assigned) if a),
        "sample_ids": list(sample_ids) if sample_ids else None,
        "diagnostics": list(model.diagnostics),
    }


def truth_document(truth: GroundTruth, view_names: Optional[Sequence[str]] = None) -> Dict:
    D = len(truth.biclusters[0].cols) if truth.biclusters else 0
    views = _view_names_(view_names, D)
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "truth",
        "scenario": truth.scenario,
        "params": dict(truth.params),
        "noise_sigma": float(truth.noise_sigma),
        "scalar": float(truth.scalar),
        "views": views,
        "biclusters": [{"rows": _one_based_(b.rows), "cols": [_one_based_(c) for c in b.cols]} for b in truth.biclusters],
    }


def metrics_document(report: MetricsReport, result_path: str = "", truth_path: str = "") -> Dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "metrics",
        "result": str(result_path),
        "truth": str(truth_path),
        "relevance": float(report.relevance),
        "recovery": float(report.recovery),
        "f_score": float(report.f_score),
        "fp": float(report.fp_rate),
        "fn": float(report.fn_rate),
        "unclustered": int(report.unclustered_count),
        "K_detected": int(report.k_detected),
    }


def write_document(doc: Dict, path: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(doc, f, sort_keys=False, default_flow_style=None, allow_unicode=True)


def read_document(path: str, kind: str) -> Dict:
    """
    Loads a YAML document and checks its schema version and kind.

    Raises
    ------
    SchemaVersionError
        The document was written under a different schema version.
    InputFileError
        The file is missing, malformed, or of another kind.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = yaml.safe_load(f)
    except OSError as e:
        raise InputFileError(e.strerror or "cannot be read", path) from e
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line, column = (mark.line + 1, mark.column + 1) if mark is not None else (None, None)
        raise InputFileError(f"malformed YAML ({getattr(e, 'problem', e)})", path, line, column) from e

    if not isinstance(doc, dict):
        raise InputFileError("expected a YAML mapping", path)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaVersionError(f"{path}: schema version {doc.get('schema_version')!r}, expected {SCHEMA_VERSION}")
    if doc.get("kind") != kind:
        raise InputFileError(f"expected a {kind} document, found {doc.get('kind')!r}", path)
    return doc


def _bicluster_(entry: Dict, D: int, path: str) -> Bicluster:
    cols = entry.get("cols")
    if not isinstance(cols, list) or len(cols) != D:
        raise InputFileError(f"bicluster needs a list of column indices for each of {D} view(s)", path)
    return Bicluster(
        rows=_zero_based_(entry.get("rows") or [], path, "rows"),
        cols=tuple(_zero_based_(c or [], path, f"cols of view {d + 1}") for d, c in enumerate(cols)),
    )


def biclusters_from_result(doc: Dict, path: str = "<result>") -> Tuple[List[Bicluster], int]:
    """
    The layer biclusters of a result document and its unclustered sample count.
    """
    D = len(doc.get("dims") or [])
    est = [_bicluster_(layer, D, path) for layer in doc.get("layers") or []]
    rows = (doc.get("membership") or {}).get("rows") or []
    return est, sum(1 for x in rows if int(x) == 0)


def biclusters_from_truth(doc: Dict, path: str = "<truth>") -> List[Bicluster]:
    entries = doc.get("biclusters") or []
    if not entries:
        raise InputFileError("truth document lists no biclusters", path)
    D = len(doc.get("views") or entries[0].get("cols") or [])
    return [_bicluster_(entry, D, path) for entry in entries]
