"""Run-wide configuration: scalar mode and numerical tolerances."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace


class Mode:
    """Scalar arithmetic mode for structural decisions.

    EXACT runs rank/regularity/multiplicity decisions over rationals and is
    only available when the inputs carry exact rational entries.  FLOAT uses
    double precision with the thresholds in ToleranceConfig.  AUTO picks EXACT
    whenever the operands have exact payloads.
    """

    EXACT = "exact"
    FLOAT = "float"
    AUTO = "auto"


@dataclass(frozen=True)
class ToleranceConfig:
    eps_rank: float = 1e-9      # relative singular-value threshold for rank
    eps_def: float = 1e-9       # smallest-eigenvalue threshold for definiteness
    eps_geom: float = 1e-8      # sample-point feasibility slack
    max_iter: int = 400         # iteration cap for the definiteness searches
    seed: int = 0               # seed for the deterministic multi-start ladder

    def __post_init__(self) -> None:
        if self.eps_rank <= 0 or self.eps_def <= 0 or self.eps_geom <= 0:
            raise ValueError("tolerances must be strictly positive")
        if self.max_iter <= 0:
            raise ValueError("max_iter must be positive")


@dataclass(frozen=True)
class RunConfig:
    """CLI-facing configuration: flags > environment > defaults."""

    mode: str = Mode.AUTO
    tol: ToleranceConfig = field(default_factory=ToleranceConfig)
    output: str = "json"        # json | dot | table
    jobs: int = 1

    @staticmethod
    def from_env() -> "RunConfig":
        tol = ToleranceConfig(
            eps_rank=float(os.environ.get("SELBERG_EPS_RANK", 1e-9)),
            eps_def=float(os.environ.get("SELBERG_EPS_DEF", 1e-9)),
            eps_geom=float(os.environ.get("SELBERG_EPS_GEOM", 1e-8)),
            max_iter=int(os.environ.get("SELBERG_MAX_ITER", 400)),
            seed=int(os.environ.get("SELBERG_SEED", 0)),
        )
        return RunConfig(mode=os.environ.get("SELBERG_MODE", Mode.AUTO), tol=tol)

    def with_overrides(self, **kw) -> "RunConfig":
        tol_keys = {k: v for k, v in kw.items() if k in ToleranceConfig.__dataclass_fields__ and v is not None}
        run_keys = {k: v for k, v in kw.items() if k in RunConfig.__dataclass_fields__ and v is not None}
        cfg = replace(self, **run_keys)
        if tol_keys:
            cfg = replace(cfg, tol=replace(cfg.tol, **tol_keys))
        return cfg


DEFAULT_TOL = ToleranceConfig()
