import re
import numpy as np
import pandas as pd
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple
from src.core.errors import InputFileError
from src.core.types import MultiViewData

_RAGGED_ = re.compile(r"Expected (\d+) fields in line (\d+), saw (\d+)")


def sniff_delimiter(path: str) -> str:
    """
    Tab if the first non-empty line holds a tab, comma otherwise.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    return "\t" if "\t" in line else ","
    except UnicodeDecodeError as e:
        raise InputFileError(f"not valid UTF-8 ({e.reason})", path) from e
    except OSError as e:
        raise InputFileError(e.strerror or "cannot be read", path) from e
    raise InputFileError("file is empty", path)


def read_matrix(path: str, header: bool = False, row_labels: bool = False) -> Tuple[np.ndarray, Optional[List[str]]]:
    """
    Reads one delimited numeric matrix.

    Parameters
    ----------
    path : str
        UTF-8 file, comma or tab separated, '.' decimal point.
    header : bool
        First line holds column names and is skipped.
    row_labels : bool
        First column holds sample labels.

    Returns
    -------
    Tuple[np.ndarray, Optional[List[str]]]
        The float64 matrix and the row labels (None without a label column).

    Raises
    ------
    InputFileError
        On ragged rows or non-numeric cells, with the 1-based line and column.
    """
    sep = sniff_delimiter(path)
    first_line = 2 if header else 1
    first_col = 2 if row_labels else 1

    try:
        frame = pd.read_csv(
            path,
            sep=sep,
            header=0 if header else None,
            index_col=0 if row_labels else None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
            encoding="utf-8",
        )
    except pd.errors.ParserError as e:
        found = _RAGGED_.search(str(e))
        if found:
            expected, line, saw = (int(g) for g in found.groups())
            raise InputFileError(f"ragged row: expected {expected} fields, saw {saw}", path, line, expected + 1) from e
        raise InputFileError(str(e), path) from e
    except pd.errors.EmptyDataError as e:
        raise InputFileError("file has no data rows", path) from e

    if frame.shape[0] == 0 or frame.shape[1] == 0:
        raise InputFileError("file has no data rows", path)

    # Short rows come back padded with NaN
    short = frame.isna().to_numpy()
    if short.any():
        i, j = np.argwhere(short)[0]
        raise InputFileError(f"ragged row: expected {frame.shape[1]} fields", path, first_line + int(i), first_col + int(j))

    numeric = frame.apply(lambda col: pd.to_numeric(col.str.strip(), errors="coerce")).to_numpy(dtype=np.float64)
    bad = ~np.isfinite(numeric)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        cell = frame.iat[int(i), int(j)]
        raise InputFileError(f"non-numeric or non-finite cell '{cell}'", path, first_line + int(i), first_col + int(j))

    # to_numeric only locates bad cells; values are parsed by numpy
    try:
        values = np.char.strip(frame.to_numpy(dtype=str)).astype(np.float64)
    except ValueError as e:
        raise InputFileError(f"unparseable number ({e})", path) from e

    labels = [str(s) for s in frame.index] if row_labels else None
    return values, labels


def _unique_names_(stems: Sequence[str]) -> Tuple[str, ...]:
    """
    File stems as view names, suffixed `_2`, `_3`, ... where two files share one.
    """
    seen: Dict[str, int] = {}
    out = []
    for stem in stems:
        seen[stem] = seen.get(stem, 0) + 1
        out.append(stem if seen[stem] == 1 else f"{stem}_{seen[stem]}")
    return tuple(out)


def load_views(
    paths: Sequence[str],
    header: bool = False,
    row_labels: bool = False,
    view_names: Optional[Sequence[str]] = None,
) -> MultiViewData:
    """
    Loads D delimited files into a MultiViewData.

    Rows are aligned by position, or by label when `row_labels` is set, in which
    case every file must carry the same labels and rows follow the first file's order.
    """
    if not paths:
        raise InputFileError("no view files given", "<none>")

    views, ids = [], None
    for path in paths:
        X, labels = read_matrix(path, header, row_labels)

        if row_labels:
            if len(set(labels)) != len(labels):
                dup = next(s for s in labels if labels.count(s) > 1)
                raise InputFileError(f"duplicate row label '{dup}'", path)
            if ids is None:
                ids = labels
            else:
                if set(labels) != set(ids):
                    missing = sorted(set(ids) ^ set(labels))[0]
                    raise InputFileError(f"row labels differ from {paths[0]} (e.g. '{missing}')", path)
                order = {s: i for i, s in enumerate(labels)}
                X = X[[order[s] for s in ids]]
        elif views and X.shape[0] != views[0].shape[0]:
            raise InputFileError(f"{X.shape[0]} rows but {paths[0]} has {views[0].shape[0]}", path)

        views.append(X)

    names = tuple(view_names) if view_names else _unique_names_([Path(p).stem for p in paths])
    return MultiViewData(views=tuple(views), sample_ids=tuple(ids) if ids else None, view_names=names)


def save_views(data: MultiViewData, paths: Sequence[str], header: bool = False, row_labels: bool = False, sep: str = ",") -> None:
    """
    Writes each view to its own delimited file with round-trip exact floats.
    """
    if len(paths) != data.n_views:
        raise InputFileError(f"{len(paths)} output paths for {data.n_views} views", str(paths[0]) if paths else "<none>")

    ids = data.sample_ids or tuple(f"s{i + 1}" for i in range(data.n))
    names = data.view_names or tuple(f"view{d + 1}" for d in range(data.n_views))

    for X, name, path in zip(data.views, names, paths):
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame(X, index=list(ids), columns=[f"{name}_{j + 1}" for j in range(X.shape[1])])
        frame.to_csv(path, sep=sep, header=header, index=row_labels, float_format="%.17g", lineterminator="\n")
