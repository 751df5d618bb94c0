"""Run configuration: JSON files with a schema version, merged with CLI flags."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid or out-of-range configuration."""


@dataclass
class RunConfig:
    alpha: float = 0.2
    lam: float = 0.1
    M: int = 2
    rho: int = 12
    seed: int | None = None
    nodes_per_band: int = 256
    threads: int = 1
    out: str | None = None
    params: dict = field(default_factory=dict)

    def validate(self, model: bool = False, stochastic: bool = False) -> "RunConfig":
        if not 0.0 < self.alpha < 0.5:
            raise ConfigError(f"alpha={self.alpha} outside (0, 1/2)")
        if model and not 0.125 < self.alpha < 0.25:
            raise ConfigError(f"alpha={self.alpha} outside the model range (1/8, 1/4)")
        if self.M < 2 or int(self.M) != self.M:
            raise ConfigError("M must be an integer >= 2")
        if self.rho < 0:
            raise ConfigError("rho must be non-negative")
        if self.nodes_per_band < 1:
            raise ConfigError("nodes_per_band must be positive")
        if self.threads < 1:
            raise ConfigError("threads must be positive")
        if self.lam < 0:
            raise ConfigError("lambda must be non-negative")
        if stochastic and self.seed is None:
            raise ConfigError("this command needs --seed")
        return self

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schema"] = SCHEMA_VERSION
        return d

    def digest(self) -> str:
        """Hash of the resolved configuration (output path excluded)."""
        d = self.to_dict()
        d.pop("out", None)
        blob = json.dumps(d, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def load_config(path: str | Path) -> dict:
    data = json.loads(Path(path).read_text())
    if data.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"config schema must be {SCHEMA_VERSION}, got {data.get('schema')!r}")
    return data


def resolve(file_values: dict | None, flag_values: dict) -> RunConfig:
    """Config file first, then every flag that was given explicitly on top."""
    known = {f.name for f in fields(RunConfig)}
    merged: dict = {}
    params: dict = {}
    for src in (file_values or {}, flag_values):
        for k, v in src.items():
            if k == "schema" or v is None:
                continue
            if k == "lambda":
                k = "lam"
            if k == "params":
                params.update(v)
            elif k in known:
                merged[k] = v
            else:
                params[k] = v
    return RunConfig(**merged, params=params)
