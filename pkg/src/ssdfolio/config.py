"""Run configuration (JSON)."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import pandas as pd

from .errors import ConfigError
from .metrics import DIVISORS
from .pca import MODES
from .ssd import FORMULATIONS, MODELS

PHASE_NAMES = ("neutral", "bullish", "bearish")
PATH_FIELDS = ("prices", "ratios", "sectors", "benchmark")


@dataclass
class PhaseSpec:
    name: str
    start: str
    end: str


@dataclass
class RunConfig:
    prices: Optional[str] = None
    ratios: Optional[str] = None
    sectors: Optional[str] = None
    benchmark: Optional[str] = None
    models: list = field(default_factory=lambda: list(MODELS))
    alpha: float = 0.5
    bound: float = 0.3
    sector_weights: dict = field(default_factory=dict)
    pca_mode: str = "correlation"
    variance_target: float = 0.80
    component_cap: int = 4
    extraction_until: Optional[str] = None
    extraction_refresh: bool = False
    lookback_quarters: int = 4
    standardize: bool = True
    formulation: str = "cuts"
    benchmark_mode: str = "auto"
    rf: float = 0.0
    divisor: str = "paper"
    levels: list = field(default_factory=lambda: [0.95, 0.97])
    in_len: int = 52
    out_len: int = 13
    step: int = 4
    phases: list = field(default_factory=list)
    seed: int = 42

    def __post_init__(self):
        self.phases = [p if isinstance(p, PhaseSpec) else PhaseSpec(**p) for p in self.phases]
        self.models = list(self.models)
        self.levels = [float(a) for a in self.levels]

    # ---------------------------------------------------------------- io
    @classmethod
    def from_dict(cls, raw: dict, base_dir: Optional[Path] = None) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ConfigError(f"unknown configuration key(s): {unknown}")
        raw = dict(raw)
        if base_dir is not None:
            for key in PATH_FIELDS:
                if raw.get(key):
                    p = Path(raw[key])
                    raw[key] = str(p if p.is_absolute() else (base_dir / p).resolve())
        try:
            return cls(**raw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigError(f"{path}: file not found") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from None
        return cls.from_dict(raw, path.parent)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    # ---------------------------------------------------------- validation
    def validate(self, check_paths: bool = True) -> "RunConfig":
        if not self.models:
            raise ConfigError("no models selected")
        bad = [m for m in self.models if m not in MODELS]
        if bad:
            raise ConfigError(f"unknown model(s) {bad}; choose from {list(MODELS)}")
        if len(set(self.models)) != len(self.models):
            raise ConfigError("duplicate model names")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 < self.bound <= 1.0:
            raise ConfigError(f"bound must lie in (0, 1], got {self.bound}")
        if not self.levels or any(not 0.0 < a < 1.0 for a in self.levels):
            raise ConfigError(f"confidence levels must lie in (0, 1), got {self.levels}")
        if len({round(100 * a) for a in self.levels}) != len(self.levels):
            raise ConfigError("confidence levels must differ at percent resolution")
        if self.pca_mode not in MODES:
            raise ConfigError(f"pca_mode must be one of {MODES}")
        if not 0.0 < self.variance_target <= 1.0:
            raise ConfigError("variance_target must lie in (0, 1]")
        if self.component_cap < 1:
            raise ConfigError("component_cap must be >= 1")
        if self.lookback_quarters < 1:
            raise ConfigError("lookback_quarters must be >= 1")
        if self.formulation not in FORMULATIONS:
            raise ConfigError(f"formulation must be one of {FORMULATIONS}")
        if self.benchmark_mode not in ("auto", "index", "proxy"):
            raise ConfigError("benchmark_mode must be auto, index or proxy")
        if self.divisor not in DIVISORS:
            raise ConfigError(f"divisor must be one of {DIVISORS}")
        if self.in_len < 2 or self.out_len < 1 or self.step < 1:
            raise ConfigError("window lengths must be positive (in_len >= 2)")
        for sector, ws in self.sector_weights.items():
            if len(ws) != 4 or any(float(w) < 0 for w in ws):
                raise ConfigError(f"sector_weights[{sector!r}] needs four nonnegative numbers")
        for p in self.phases:
            if p.name not in PHASE_NAMES:
                raise ConfigError(f"phase name {p.name!r} not in {PHASE_NAMES}")
            try:
                start, end = pd.Timestamp(p.start), pd.Timestamp(p.end)
            except ValueError as exc:
                raise ConfigError(f"phase {p.name}: {exc}") from None
            if end < start:
                raise ConfigError(f"phase {p.name}: end before start")
        if self.extraction_until is not None:
            try:
                pd.Timestamp(self.extraction_until)
            except ValueError as exc:
                raise ConfigError(f"extraction_until: {exc}") from None
        if check_paths:
            for key in ("prices", "ratios", "sectors"):
                if not getattr(self, key):
                    raise ConfigError(f"missing data path {key!r}")
            for key in PATH_FIELDS:
                value = getattr(self, key)
                if value and not Path(value).is_file():
                    raise ConfigError(f"{key} file not found: {value}")
        return self
