"""Pydantic request/response models for the compute service.

Weights and symbols travel as the same compact name grammar the CLI uses
(std:alpha=..., exp:c=..., counterexample:default, poly:..., re_z, ...);
structured weight documents are accepted too.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field


class WeightDoc(BaseModel):
    model_config = ConfigDict(extra="forbid")
    name: str | None = None
    kind: Literal["standard", "exponential", "piecewise", "expression"]
    params: dict[str, Any] = Field(default_factory=dict)


class ClassifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    weight: str | WeightDoc
    k_max: int = 14
    x_pow_max: int = 12


class ClassifyResponse(BaseModel):
    weight: str
    verdicts: dict[str, str]
    constants: dict[str, float | None]
    diagnostics: dict[str, Any] = Field(default_factory=dict)


class KernelNormRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    weight: str | WeightDoc
    nu: str | WeightDoc
    p: float = 2.0
    N: int = 1
    z: list[float] | None = None     # moduli; default dyadic grid
    k_max: int = 8
    with_bound: bool = True          # also return the closed-form comparison


class KernelNormRow(BaseModel):
    z: float
    norm: float
    bound: float | None = None


class KernelNormResponse(BaseModel):
    rows: list[KernelNormRow]


class ProjectRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    weight: str | WeightDoc
    symbol: str
    n_max: int = 64


class ProjectResponse(BaseModel):
    coefficients_re: list[float]
    coefficients_im: list[float]


class VTransformRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    weight: str | WeightDoc
    nu: str | WeightDoc
    symbol: str
    z_re: list[float] = Field(default_factory=lambda: [0.0])
    z_im: list[float] | None = None
    n_max: int = 128
    sup_over_lattice: bool = False


class VTransformResponse(BaseModel):
    values_re: list[float]
    values_im: list[float]
    sup: float | None = None


class HankelNormRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    weight: str | WeightDoc
    symbol: str
    p: float = 2.0
    d: int = 64
    trials: int = 200                # Monte-Carlo trials when p != 2
    seed: int = 20240


class HankelNormResponse(BaseModel):
    p: float
    d: int
    value: float
    value_half: float | None = None
    kind: Literal["exact_p2", "monte_carlo_lower_bound"]


class BmoRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    weight: str | WeightDoc
    symbol: str
    p: float = 2.0
    r: float = 1.0
    lattice_delta: float = 0.7
    lattice_level: int = 6


class BmoResponse(BaseModel):
    bmo: float
    ba: float
    bo: float | None = None
    degenerate_points: int = 0
    lattice_points: int = 0


class ExperimentRunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    depth: int | None = None
    band_limit: float | None = None
    weights: list[str] | None = None
    symbols: list[str] | None = None
    exponents: list[float] | None = None
    params: dict[str, Any] = Field(default_factory=dict)
    persist: bool = False


class ExperimentSummary(BaseModel):
    name: str
    verdict: str
    reports: list[dict] = Field(default_factory=list)
    tables: dict[str, Any] = Field(default_factory=dict)


class ErrorBody(BaseModel):
    error: str
    kind: str
