"""Run configuration: budgets, tolerances, cache location, seeds, threads.

The config file is a flat `key = value` text format (# starts a comment).
Recognized keys match the RunConfig field names. Flags override the file;
the environment variables SHEAFSUMS_CACHE_DIR and SHEAFSUMS_THREADS override
both for their respective fields.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field, fields, replace


@dataclass(frozen=True)
class RunConfig:
    max_evaluations: int = 100_000_000
    max_family: int = 1 << 22
    dlog_cap: int = 1 << 22
    fit_tolerance: float = 1e-6      # relative to max |S_m|
    zscore_threshold: float = 4.0
    systematic_coeff: float = 10.0   # c_sys * p^(-1/2) equidistribution allowance
    cache_dir: str | None = None
    seed: int = 0
    threads: int = 1
    output: str = "json"

    def __post_init__(self):
        if self.max_evaluations <= 0 or self.max_family <= 0 or self.threads <= 0:
            raise ValueError("caps and thread count must be positive")
        if self.output not in ("json", "csv", "text"):
            raise ValueError(f"unknown output format {self.output!r}")

    def hash(self) -> str:
        payload = {f.name: getattr(self, f.name) for f in fields(self)}
        return hashlib.sha256(json.dumps(payload, sort_keys=True, default=str).encode()).hexdigest()[:16]

    def with_overrides(self, **kw):
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw) if kw else self


_INT_KEYS = {"max_evaluations", "max_family", "dlog_cap", "seed", "threads"}
_FLOAT_KEYS = {"fit_tolerance", "zscore_threshold", "systematic_coeff"}


def load_config(path=None, **overrides) -> RunConfig:
    """Config from file (optional) + keyword overrides + env overrides."""
    values = {}
    if path:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected key = value")
                key, _, val = line.partition("=")
                key, val = key.strip(), val.strip()
                if key in _INT_KEYS:
                    values[key] = int(val)
                elif key in _FLOAT_KEYS:
                    values[key] = float(val)
                elif key in ("cache_dir", "output"):
                    values[key] = val
                else:
                    raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    values.update({k: v for k, v in overrides.items() if v is not None})
    if os.environ.get("SHEAFSUMS_CACHE_DIR"):
        values["cache_dir"] = os.environ["SHEAFSUMS_CACHE_DIR"]
    if os.environ.get("SHEAFSUMS_THREADS"):
        values["threads"] = int(os.environ["SHEAFSUMS_THREADS"])
    return RunConfig(**values)


DEFAULT = RunConfig()
