import yaml
from dataclasses import dataclass, fields, replace
from typing import Dict, Optional, Tuple
from src.core.errors import ConfigError
from src.core.views import STANDARDIZATIONS


@dataclass(frozen=True)
class FitConfig:
    """
    Tunables of the iSSVD fit, with defaults taken from the simulation settings
    (standr = False, pointwise = True, steps = 100, size = 0.5, ssthr = [0.6, 0.8],
    nbicluster = 5, pceru = 0.1, pcerv = 0.1 per view, merr = 0.0001, iters = 100).

    Attributes
    ----------
    K_max : int
        User cap on the number of layers (`nbicluster`).
    variance_threshold : float
        Cumulative variance fraction used to pick K from the spectra (`vthr`).
    pceru : float
        Per-comparison error rate for u; E(u) = pceru * n.
    pcerv : Optional[Tuple[float, ...]]
        Per-view error rates for v^(d); None means 0.1 for every view.
    pi_range : Tuple[float, float]
        Target range [π_min, π_max] for the selection threshold (`ssthr`).
    subsample_fraction : float
        Fraction of the subsampled dimension kept per draw (`size`).
    n_subsamples : int
        I = J, subsamples per probability estimate (`steps`).
    pointwise : bool
        Bisection on a single λ when True, full λ path otherwise.
    standardize : str
        One of none, center, scale, center_scale, frobenius (`standr`).
    row_overlap, col_overlap : bool
        Allow a sample (variable) to appear in more than one layer.
    rows_nc, cols_nc : bool
        Allow coefficients of both signs inside a layer's row (column) set.
    merr : float
        Convergence tolerance.
    max_iters : int
        Alternations per layer (`iters`).
    seed : int
        Master seed for every subsample draw.
    grid_size : int
        Number of λ values on the full path.
    verbose : bool
        Print timestamped progress lines.
    """

    K_max: int = 5
    variance_threshold: float = 0.9
    pceru: float = 0.1
    pcerv: Optional[Tuple[float, ...]] = None
    pi_range: Tuple[float, float] = (0.6, 0.8)
    subsample_fraction: float = 0.5
    n_subsamples: int = 100
    pointwise: bool = True
    standardize: str = "none"
    row_overlap: bool = False
    col_overlap: bool = False
    rows_nc: bool = True
    cols_nc: bool = True
    merr: float = 1e-4
    max_iters: int = 100
    seed: int = 0
    grid_size: int = 100
    verbose: bool = False

    # YAML / CLI names
    _aliases_ = {
        "nbicluster": "K_max",
        "vthr": "variance_threshold",
        "ssthr": "pi_range",
        "size": "subsample_fraction",
        "steps": "n_subsamples",
        "standr": "standardize",
        "iters": "max_iters",
    }

    def __post_init__(self) -> None:
        if self.pcerv is not None:
            pcerv = (float(self.pcerv),) if isinstance(self.pcerv, (int, float)) else tuple(float(x) for x in self.pcerv)
            object.__setattr__(self, "pcerv", pcerv)
        object.__setattr__(self, "pi_range", tuple(float(x) for x in self.pi_range))
        self.validate()

    def validate(self) -> None:
        """
        Raises ConfigError if any field breaks its documented range.
        """
        if int(self.K_max) < 1:
            raise ConfigError("K_max (nbicluster) must be a positive integer")
        if not 0 < self.variance_threshold <= 1:
            raise ConfigError("variance_threshold (vthr) must lie in (0, 1]")
        if len(self.pi_range) != 2:
            raise ConfigError("pi_range (ssthr) must hold exactly two values")
        lo, hi = self.pi_range
        if not (0.5 < lo <= hi <= 1.0):
            raise ConfigError(f"pi_range (ssthr) must satisfy 0.5 < min <= max <= 1, got {self.pi_range}")
        if not 0 < self.subsample_fraction < 1:
            raise ConfigError("subsample_fraction (size) must lie in (0, 1)")
        if int(self.n_subsamples) < 1:
            raise ConfigError("n_subsamples (steps) must be a positive integer")
        if self.pceru <= 0:
            raise ConfigError("pceru must be positive")
        if self.pcerv is not None and any(x <= 0 for x in self.pcerv):
            raise ConfigError("every pcerv entry must be positive")
        if self.standardize not in STANDARDIZATIONS:
            raise ConfigError(f"standardize (standr) must be one of {STANDARDIZATIONS}")
        if self.merr <= 0:
            raise ConfigError("merr must be positive")
        if int(self.max_iters) < 1:
            raise ConfigError("max_iters (iters) must be a positive integer")
        if int(self.grid_size) < 2:
            raise ConfigError("grid_size must be at least 2")

    def pcerv_for(self, n_views: int) -> Tuple[float, ...]:
        """
        Per-view error rates for `n_views` views; a single rate is broadcast.
        """
        if self.pcerv is None:
            return (0.1,) * n_views
        if len(self.pcerv) == 1:
            return self.pcerv * n_views
        if len(self.pcerv) != n_views:
            raise ConfigError(f"pcerv has {len(self.pcerv)} entries for {n_views} views")
        return self.pcerv

    @staticmethod
    def _cast_(name: str, raw):
        if name == "standardize":
            # standr = False/True are the historical spellings of none/center_scale
            if isinstance(raw, bool):
                raw = "center_scale" if raw else "none"
            return str(raw).lower()
        if name in ("pcerv", "pi_range"):
            return tuple(float(x) for x in raw) if isinstance(raw, (list, tuple)) else (float(raw),)
        if name in ("K_max", "n_subsamples", "max_iters", "seed", "grid_size"):
            return int(raw)
        if name in ("pointwise", "row_overlap", "col_overlap", "rows_nc", "cols_nc", "verbose"):
            return raw if isinstance(raw, bool) else str(raw).lower() in ("1", "true", "yes")
        return float(raw)

    @classmethod
    def _load_settings_(cls, settings: Dict) -> Dict:
        """
        Casts a dictionary of settings (YAML names or field names) into field values.
        """
        known = {f.name: f for f in fields(cls)}
        values = {}

        for key, raw in (settings or {}).items():
            name = cls._aliases_.get(key, key)
            if name not in known:
                raise ConfigError(f"unknown parameter '{key}'")
            if raw is None:
                continue

            try:
                values[name] = cls._cast_(name, raw)
            except (TypeError, ValueError) as e:
                raise ConfigError(f"parameter '{key}' has an invalid value {raw!r}") from e

        return values

    @classmethod
    def from_settings(cls, settings: Dict) -> "FitConfig":
        return cls(**cls._load_settings_(settings))

    @classmethod
    def from_yaml(cls, path: str) -> "FitConfig":
        """
        Loads a parameters file such as `parameters.yaml.example`.
        """
        try:
            with open(path, "r") as f:
                settings = yaml.safe_load(f)
        except OSError as e:
            raise ConfigError(f"{path}: {e.strerror or 'cannot be read'}") from e
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}: malformed YAML ({getattr(e, 'problem', e)})") from e
        if settings is not None and not isinstance(settings, dict):
            raise ConfigError(f"{path}: expected a mapping of parameters")
        return cls.from_settings(settings or {})

    def updated(self, settings: Dict) -> "FitConfig":
        """
        Returns a copy with `settings` (YAML or field names) applied on top.
        """
        return replace(self, **self._load_settings_(settings))

    def to_settings(self, n_views: Optional[int] = None) -> Dict:
        """
        The configuration under its table names, for provenance echoes.
        """
        pcerv = self.pcerv_for(n_views) if n_views else self.pcerv
        return {
            "nbicluster": int(self.K_max),
            "vthr": float(self.variance_threshold),
            "pceru": float(self.pceru),
            "pcerv": list(pcerv) if pcerv is not None else None,
            "ssthr": list(self.pi_range),
            "size": float(self.subsample_fraction),
            "steps": int(self.n_subsamples),
            "pointwise": bool(self.pointwise),
            "standr": self.standardize,
            "row_overlap": bool(self.row_overlap),
            "col_overlap": bool(self.col_overlap),
            "rows_nc": bool(self.rows_nc),
            "cols_nc": bool(self.cols_nc),
            "merr": float(self.merr),
            "iters": int(self.max_iters),
            "seed": int(self.seed),
            "grid_size": int(self.grid_size),
        }
