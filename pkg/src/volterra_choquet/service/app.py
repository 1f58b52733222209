"""FastAPI service wrapping the core package.

Each endpoint delegates to a plain handler function; the CLI calls the same
handlers in-process, so HTTP is an optional transport, not a dependency of
the computation.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from ..choquet import choquet_integral
from ..functions import preset
from ..intervals import IntervalUnion, interval_union
from ..spaces import LpConfig, lp_norm
from ..verify import run_suite, span_residual
from ..volterra import (
    CLASSICAL_NORM_REFERENCE,
    apply_volterra,
    classical_opnorm,
    iterate_volterra,
    orbit_closed_form,
)
from .schemas import (
    CheckRequest,
    CheckResponse,
    IntegrateRequest,
    IntegrateResponse,
    NormRequest,
    NormResponse,
    OpnormRequest,
    OpnormResponse,
    OrbitRequest,
    OrbitResponse,
    SpanRequest,
    SpanResponse,
    SpanRow,
    VolterraRequest,
    VolterraResponse,
)


def handle_integrate(req: IntegrateRequest) -> IntegrateResponse:
    window = IntervalUnion.full() if req.window is None else interval_union([req.window])
    cfg = req.quadrature.build() if req.quadrature else None
    res = choquet_integral(req.function.build(), window, req.capacity.build(), cfg)
    return IntegrateResponse(
        value=res.value,
        error_estimate=res.error_estimate,
        panels_used=res.panels_used,
        converged=res.converged,
    )


def handle_volterra(req: VolterraRequest) -> VolterraResponse:
    cfg = req.quadrature.build() if req.quadrature else None
    vf = apply_volterra(req.function.build(), req.capacity.build(), req.grid_size, cfg)
    return VolterraResponse(xs=vf.nodes.tolist(), values=vf.values.tolist())


def handle_orbit(req: OrbitRequest) -> OrbitResponse:
    cfg = req.quadrature.build() if req.quadrature else None
    mu = req.capacity.build()
    record = iterate_volterra(preset("one"), req.n, mu, req.grid_size, cfg)
    xs = record.grid
    closed = None
    if mu.gamma.kind == "exp-saturation":
        closed = [np.asarray(orbit_closed_form(k, xs)).tolist() for k in range(1, req.n + 1)]
    return OrbitResponse(
        xs=xs.tolist(),
        iterates=[it.values.tolist() for it in record.iterates],
        closed_forms=closed,
        budgets=record.budgets,
    )


def handle_norm(req: NormRequest) -> NormResponse:
    cfg = req.quadrature.build() if req.quadrature else None
    value = lp_norm(req.function.build(), LpConfig(req.p), req.capacity.build(), cfg)
    return NormResponse(lp_norm=value)


def handle_opnorm(req: OpnormRequest) -> OpnormResponse:
    estimate = classical_opnorm(req.grid_size, req.iterations)
    return OpnormResponse(estimate=estimate, reference=CLASSICAL_NORM_REFERENCE)


def handle_check(req: CheckRequest) -> CheckResponse:
    cfg = req.quadrature.build() if req.quadrature else None
    report = run_suite(req.suite, req.seed, req.samples, cfg)
    return CheckResponse(**report.to_dict())


def handle_span(req: SpanRequest) -> SpanResponse:
    cfg = req.quadrature.build() if req.quadrature else None
    mu = req.capacity.build()
    targets = [t.function.build() for t in req.targets]
    results = span_residual(targets, req.n_max, mu, req.grid_size, req.operator, cfg)
    rows = [
        SpanRow(n=n, target=req.targets[i].name, residual=residual)
        for i, per_target in enumerate(results)
        for n, residual in per_target
    ]
    return SpanResponse(rows=rows)


app = FastAPI(
    title="volterra-choquet",
    description="Choquet integration and Volterra operator analysis as a service",
)


def _guard(fn, req):
    try:
        return fn(req)
    except (ValueError, TypeError) as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/integrate", response_model=IntegrateResponse)
def integrate(req: IntegrateRequest) -> IntegrateResponse:
    return _guard(handle_integrate, req)


@app.post("/volterra", response_model=VolterraResponse)
def volterra(req: VolterraRequest) -> VolterraResponse:
    return _guard(handle_volterra, req)


@app.post("/orbit", response_model=OrbitResponse)
def orbit(req: OrbitRequest) -> OrbitResponse:
    return _guard(handle_orbit, req)


@app.post("/norm", response_model=NormResponse)
def norm(req: NormRequest) -> NormResponse:
    return _guard(handle_norm, req)


@app.post("/opnorm", response_model=OpnormResponse)
def opnorm(req: OpnormRequest) -> OpnormResponse:
    return _guard(handle_opnorm, req)


@app.post("/check", response_model=CheckResponse)
def check(req: CheckRequest) -> CheckResponse:
    return _guard(handle_check, req)


@app.post("/span", response_model=SpanResponse)
def span(req: SpanRequest) -> SpanResponse:
    return _guard(handle_span, req)
