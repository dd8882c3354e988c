"""Runtime configuration.

A single :class:`Settings` object collects every tunable of the toolkit:
quadrature tolerances, dyadic grid depths, lattice resolution, the hyperbolic
metric scale, the symbol battery used by the experiment harness, output
directory and RNG seed.  Unknown keys are rejected so a stale config file
fails loudly; the published JSON schema lives in ``docs/config.schema.json``.
"""

from __future__ import annotations

import json
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field

from .errors import ConfigError

# Metric convention: beta(z, w) = 2*kappa*artanh(rho).  kappa = 1/2 is the
# classical normalisation and is used everywhere except the gap-weight
# construction, which only closes under kappa = 1.
DEFAULT_KAPPA = 0.5
GAP_WEIGHT_KAPPA = 1.0


class BatteryConfig(BaseModel):
    """Symbol and weight batteries driving the experiment harness."""

    model_config = ConfigDict(extra="forbid")

    analytic_symbols: list[str] = Field(
        default=["z", "z2", "log_inv", "lacunary", "frac_sing"])
    mixed_symbols: list[str] = Field(
        default=["z", "log_inv", "re_z", "hyp_dist", "radial_log"])
    weights: list[str] = Field(default=["std:alpha=0", "std:alpha=1"])
    lacunary_terms: int = 8          # top exponent k in sum of z^(2^k)
    frac_sing_degree: int = 48       # truncation degree of (1-z)^(-0.3)
    log_inv_degree: int = 512        # truncation degree of log(1/(1-z))


class Settings(BaseModel):
    """Validated global configuration; see module docstring."""

    model_config = ConfigDict(extra="forbid")

    quad_rel_tol: float = 1e-10
    dyadic_depth: int = 14           # default k_max for |z| = 1 - 2^-k grids
    radial_dyadic_depth: int = 20    # deeper grids for cheap radial-only runs
    lattice_delta: float = 0.7
    lattice_max_level: int = 6
    kappa: float = DEFAULT_KAPPA
    band_limit: float = 100.0
    slope_tol: float = 0.1
    divergence_factor: float = 1e3
    hankel_dims: list[int] = Field(default=[16, 32, 64])
    v_transform_power: int = 3       # exponent n of the weight (1-|z|)^n
    mc_trials: int = 200
    mc_degree: int = 32
    seed: int = 20240
    output_dir: str = "results"
    jobs: int = 0                    # 0 = use available cores
    battery: BatteryConfig = Field(default_factory=BatteryConfig)

    @classmethod
    def load(cls, path: str | Path) -> "Settings":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            return cls.model_validate(raw)
        except Exception as exc:  # pydantic.ValidationError
            raise ConfigError(f"invalid config {path}: {exc}") from exc

    def dump_schema(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.model_json_schema(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8")


DEFAULTS = Settings()
