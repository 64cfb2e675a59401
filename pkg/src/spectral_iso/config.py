"""Shared tolerance and runtime settings."""
from __future__ import annotations

import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Config:
    # relative tolerances, scaled by max(1, ||A||_inf) where noted
    cluster_tol: float = 1e-7
    tol: float = 1e-7
    zero_tol: float = 1e-7
    rank_tol: float = 1e-9
    orth_tol: float = 1e-10
    oracle_cap: int = 12
    workers: int = 1
    fmt: str = "json"

    def __post_init__(self):
        for name in ("cluster_tol", "tol", "zero_tol", "rank_tol", "orth_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.oracle_cap > 16:
            raise ValueError("oracle_cap must be at most 16")
        if self.fmt not in ("json", "text"):
            raise ValueError("fmt must be json or text")

    def with_(self, **kw) -> "Config":
        return replace(self, **kw)


DEFAULT = Config()


def from_env(base: Config = DEFAULT) -> Config:
    val = os.environ.get("SPECTRAL_ISO_TOL")
    if val:
        return base.with_(tol=float(val))
    return base
