"""Request/response models for the compute service.

The wire formats here are shared by the HTTP endpoints and the CLI client:
functions as {"type": "pwl"|"step"|"preset", ...} and capacities as
{"distortion": ..., "p": ...}.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..capacities import DistortedLebesgue, capacity_from_spec
from ..choquet import QuadratureConfig, default_tolerance
from ..functions import Function, function_from_spec


class FunctionSpec(BaseModel):
    type: Literal["pwl", "step", "preset"]
    nodes: Optional[list[float]] = None
    values: Optional[list[float]] = None
    name: Optional[str] = None
    n_nodes: Optional[int] = None

    def build(self) -> Function:
        return function_from_spec(self.model_dump(exclude_none=True))


class CapacitySpec(BaseModel):
    distortion: str
    p: Optional[float] = None

    def build(self) -> DistortedLebesgue:
        return capacity_from_spec(self.model_dump(exclude_none=True))


class QuadratureSpec(BaseModel):
    gauss_order: int = 8
    max_subdivisions: int = 12
    tolerance: Optional[float] = None  # None: engine default (env-overridable)

    def build(self) -> QuadratureConfig:
        return QuadratureConfig(
            gauss_order=self.gauss_order,
            max_subdivisions=self.max_subdivisions,
            tolerance=self.tolerance if self.tolerance is not None else default_tolerance(),
        )


class IntegrateRequest(BaseModel):
    function: FunctionSpec
    capacity: CapacitySpec
    window: Optional[tuple[float, float]] = None  # default: the whole of [0, 1]
    quadrature: Optional[QuadratureSpec] = None


class IntegrateResponse(BaseModel):
    value: float
    error_estimate: float
    panels_used: int
    converged: bool


class VolterraRequest(BaseModel):
    function: FunctionSpec
    capacity: CapacitySpec
    grid_size: int = Field(default=1025, ge=2)
    quadrature: Optional[QuadratureSpec] = None


class VolterraResponse(BaseModel):
    xs: list[float]
    values: list[float]


class OrbitRequest(BaseModel):
    capacity: CapacitySpec
    n: int = Field(ge=0)
    grid_size: int = Field(default=1025, ge=2)
    quadrature: Optional[QuadratureSpec] = None


class OrbitResponse(BaseModel):
    xs: list[float]
    iterates: list[list[float]]  # iterates[k] = V^k applied to the constant one
    closed_forms: Optional[list[list[float]]] = None  # only for exp-saturation
    budgets: list[float]


class NormRequest(BaseModel):
    function: FunctionSpec
    p: float = Field(ge=1.0)
    capacity: CapacitySpec
    quadrature: Optional[QuadratureSpec] = None


class NormResponse(BaseModel):
    lp_norm: float


class OpnormRequest(BaseModel):
    grid_size: int = Field(default=1025, ge=64)
    iterations: int = Field(default=200, ge=1)


class OpnormResponse(BaseModel):
    estimate: float
    reference: float


class CheckRequest(BaseModel):
    suite: str
    seed: int = 42
    samples: int = Field(default=200, ge=1)
    quadrature: Optional[QuadratureSpec] = None


class CheckResponse(BaseModel):
    suite: str
    seed: int
    samples: int
    violations: list[dict]
    violation_count: int
    worst_margin: float
    tolerance: float
    checks: int
    expect_violations: bool
    ok: bool
    runtime_ms: float


class SpanTarget(BaseModel):
    name: str
    function: FunctionSpec


class SpanRequest(BaseModel):
    targets: list[SpanTarget]
    n_max: int = Field(ge=1)
    capacity: CapacitySpec
    grid_size: int = Field(default=257, ge=2)
    operator: Literal["v", "u"] = "v"
    quadrature: Optional[QuadratureSpec] = None


class SpanRow(BaseModel):
    n: int
    target: str
    residual: float


class SpanResponse(BaseModel):
    rows: list[SpanRow]
