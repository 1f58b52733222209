"""Command-line client for the compute service.

Every subcommand builds the same request model the HTTP endpoint accepts,
runs it in-process by default (or POSTs it to ``--server``), and renders
the response with fixed 9-significant-digit float formatting so identical
invocations produce byte-identical output.

Exit codes: 0 success (for ``check``: the suite behaved as expected),
1 unexpected suite outcome, 2 invalid spec or arguments, 3 engine
tolerance failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
from pydantic import BaseModel, ValidationError

from .service import schemas
from .service.app import (
    handle_check,
    handle_integrate,
    handle_norm,
    handle_opnorm,
    handle_orbit,
    handle_span,
    handle_volterra,
)

EXIT_OK = 0
EXIT_SUITE_FAILED = 1
EXIT_BAD_SPEC = 2
EXIT_TOLERANCE = 3

_ENDPOINTS = {
    schemas.IntegrateRequest: ("/integrate", handle_integrate, schemas.IntegrateResponse),
    schemas.VolterraRequest: ("/volterra", handle_volterra, schemas.VolterraResponse),
    schemas.OrbitRequest: ("/orbit", handle_orbit, schemas.OrbitResponse),
    schemas.NormRequest: ("/norm", handle_norm, schemas.NormResponse),
    schemas.OpnormRequest: ("/opnorm", handle_opnorm, schemas.OpnormResponse),
    schemas.CheckRequest: ("/check", handle_check, schemas.CheckResponse),
    schemas.SpanRequest: ("/span", handle_span, schemas.SpanResponse),
}


def fmt9(x: float) -> str:
    """Fixed formatting: 9 significant digits."""
    return f"{float(x):.9g}"


def _json9(value):
    """Recursively round floats to 9 significant digits for JSON output."""
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return float(fmt9(value))
    if isinstance(value, dict):
        return {k: _json9(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json9(v) for v in value]
    return value


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _dispatch(request: BaseModel, server: str | None):
    path, handler, response_model = _ENDPOINTS[type(request)]
    if server is None:
        return handler(request)
    import httpx

    reply = httpx.post(server.rstrip("/") + path, json=request.model_dump(), timeout=600.0)
    if reply.status_code != 200:
        detail = reply.json().get("detail", reply.text) if reply.content else reply.text
        raise ValueError(f"server rejected request: {detail}")
    return response_model.model_validate(reply.json())


def _parse_spec(raw: str, shorthand) -> dict:
    """A spec argument is inline JSON, @file, or a shorthand string."""
    raw = raw.strip()
    if raw.startswith("@"):
        text = Path(raw[1:]).read_text()
        return json.loads(text)
    if raw.startswith("{"):
        return json.loads(raw)
    return shorthand(raw)


def _function_shorthand(raw: str) -> dict:
    if raw.startswith("preset:"):
        name = raw.split(":", 1)[1]
        return {"type": "preset", "name": name}
    raise ValueError(f"not a function spec: {raw!r} (use preset:NAME, inline JSON, or @file)")


def _capacity_shorthand(raw: str) -> dict:
    if ":" in raw:
        kind, param = raw.split(":", 1)
        return {"distortion": kind, "p": float(param)}
    return {"distortion": raw}


def _function_spec(raw: str) -> schemas.FunctionSpec:
    return schemas.FunctionSpec.model_validate(_parse_spec(raw, _function_shorthand))


def _capacity_spec(raw: str) -> schemas.CapacitySpec:
    return schemas.CapacitySpec.model_validate(_parse_spec(raw, _capacity_shorthand))


def _quad_spec(tolerance: float | None) -> schemas.QuadratureSpec | None:
    return None if tolerance is None else schemas.QuadratureSpec(tolerance=tolerance)


def _echo_json(payload: dict) -> None:
    click.echo(json.dumps(_json9(payload)))


def _echo_csv(header: list[str], rows) -> None:
    click.echo(",".join(header))
    for row in rows:
        click.echo(",".join(cell if isinstance(cell, str) else fmt9(cell) for cell in row))


@click.group()
@click.option("--server", default=None, metavar="URL", help="Send requests to a running service instead of computing in-process.")
@click.pass_context
def cli(ctx: click.Context, server: str | None) -> None:
    """Choquet integration and Volterra operator analysis."""
    ctx.obj = server


def _run(ctx: click.Context, request: BaseModel):
    try:
        return _dispatch(request, ctx.obj)
    except (ValueError, TypeError, ValidationError) as exc:
        _fail(str(exc), EXIT_BAD_SPEC)


@cli.command()
@click.option("--f", "function", required=True, help="Function spec (preset:NAME, JSON, or @file).")
@click.option("--capacity", required=True, help="Capacity spec (NAME, NAME:P, JSON, or @file).")
@click.option("--on", "window", default=None, metavar="A,B", help="Integrate over [a, b] instead of [0, 1].")
@click.option("--tolerance", type=float, default=None, help="Absolute quadrature tolerance.")
@click.pass_context
def integrate(ctx, function, capacity, window, tolerance):
    """Choquet integral of a function against a capacity."""
    try:
        win = None
        if window is not None:
            a, b = (float(part) for part in window.split(","))
            win = (a, b)
        request = schemas.IntegrateRequest(
            function=_function_spec(function),
            capacity=_capacity_spec(capacity),
            window=win,
            quadrature=_quad_spec(tolerance),
        )
    except (ValueError, ValidationError, OSError, json.JSONDecodeError) as exc:
        _fail(str(exc), EXIT_BAD_SPEC)
    res = _run(ctx, request)
    _echo_json({"value": res.value, "error_estimate": res.error_estimate})
    if not res.converged:
        _fail(f"quadrature tolerance not met (error estimate {fmt9(res.error_estimate)})", EXIT_TOLERANCE)


@cli.command()
@click.option("--f", "function", required=True, help="Function spec.")
@click.option("--capacity", required=True, help="Capacity spec.")
@click.option("--grid", default=1025, show_default=True, help="Number of grid nodes.")
@click.pass_context
def volterra(ctx, function, capacity, grid):
    """Tabulate V(f)(x) = (C)int_0^x f dmu as CSV."""
    try:
        request = schemas.VolterraRequest(
            function=_function_spec(function),
            capacity=_capacity_spec(capacity),
            grid_size=grid,
        )
    except (ValueError, ValidationError, OSError, json.JSONDecodeError) as exc:
        _fail(str(exc), EXIT_BAD_SPEC)
    res = _run(ctx, request)
    _echo_csv(["x", "Vf"], zip(res.xs, res.values))


@cli.command()
@click.option("--n", "depth", required=True, type=int, help="Number of applications of V.")
@click.option("--capacity", required=True, help="Capacity spec.")
@click.option("--grid", default=1025, show_default=True)
@click.pass_context
def orbit(ctx, depth, capacity, grid):
    """Orbit of the constant one under V, as CSV (plus closed forms for exp-saturation)."""
    try:
        request = schemas.OrbitRequest(
            capacity=_capacity_spec(capacity), n=depth, grid_size=grid
        )
    except (ValueError, ValidationError, OSError, json.JSONDecodeError) as exc:
        _fail(str(exc), EXIT_BAD_SPEC)
    res = _run(ctx, request)
    header = ["x"] + [f"orbit{k}" for k in range(len(res.iterates))]
    columns = [res.xs] + res.iterates
    if res.closed_forms is not None:
        header += [f"closed{k}" for k in range(1, len(res.closed_forms) + 1)]
        columns += res.closed_forms
    _echo_csv(header, zip(*columns))


@cli.command()
@click.option("--f", "function", required=True, help="Function spec.")
@click.option("--p", required=True, type=float, help="Norm exponent, p >= 1.")
@click.option("--capacity", required=True, help="Capacity spec.")
@click.pass_context
def norm(ctx, function, p, capacity):
    """Choquet L_p norm of a function."""
    try:
        request = schemas.NormRequest(
            function=_function_spec(function), p=p, capacity=_capacity_spec(capacity)
        )
    except (ValueError, ValidationError, OSError, json.JSONDecodeError) as exc:
        _fail(str(exc), EXIT_BAD_SPEC)
    res = _run(ctx, request)
    _echo_json({"lp_norm": res.lp_norm})


@cli.command()
@click.option("--grid", default=1025, show_default=True, help="Discretization cells (>= 64).")
@click.option("--iters", default=200, show_default=True, help="Power-iteration count.")
@click.pass_context
def opnorm(ctx, grid, iters):
    """Classical L2 operator-norm estimate (identity distortion only)."""
    try:
        request = schemas.OpnormRequest(grid_size=grid, iterations=iters)
    except ValidationError as exc:
        _fail(str(exc), EXIT_BAD_SPEC)
    res = _run(ctx, request)
    _echo_json({"estimate": res.estimate, "reference": res.reference})


@cli.command()
@click.option("--suite", required=True, help="Suite name (see docs; e.g. thm-4.1).")
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--samples", default=200, show_default=True, type=int)
@click.pass_context
def check(ctx, suite, seed, samples):
    """Run a property suite; exit 0 iff it behaves as expected."""
    try:
        request = schemas.CheckRequest(suite=suite, seed=seed, samples=samples)
    except ValidationError as exc:
        _fail(str(exc), EXIT_BAD_SPEC)
    res = _run(ctx, request)
    _echo_json(res.model_dump())
    if not res.ok:
        sys.exit(EXIT_SUITE_FAILED)


@cli.command()
@click.option("--targets", "targets_file", required=True, metavar="FILE", help="JSON list of {name, function} targets.")
@click.option("--n-max", default=8, show_default=True, type=int)
@click.option("--capacity", required=True, help="Capacity spec.")
@click.option("--grid", default=257, show_default=True)
@click.option("--operator", type=click.Choice(["v", "u"]), default="v", show_default=True, help="Orbit operator: V or U = I + V.")
@click.pass_context
def span(ctx, targets_file, n_max, capacity, grid, operator):
    """Best-approximation residuals of targets from orbit spans, as CSV."""
    try:
        raw = json.loads(Path(targets_file).read_text())
        if isinstance(raw, dict):
            raw = raw["targets"]
        targets = [schemas.SpanTarget.model_validate(entry) for entry in raw]
        request = schemas.SpanRequest(
            targets=targets,
            n_max=n_max,
            capacity=_capacity_spec(capacity),
            grid_size=grid,
            operator=operator,
        )
    except (ValueError, KeyError, ValidationError, OSError, json.JSONDecodeError) as exc:
        _fail(str(exc), EXIT_BAD_SPEC)
    res = _run(ctx, request)
    _echo_csv(["n", "target", "residual"], ((row.n, row.target, row.residual) for row in res.rows))


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the FastAPI service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


def main(argv=None) -> int:
    try:
        return cli.main(args=argv, standalone_mode=False) or 0
    except click.exceptions.UsageError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_BAD_SPEC
    except SystemExit as exc:  # raised by _fail and click
        return int(exc.code or 0)
    except click.exceptions.Abort:
        return 130


if __name__ == "__main__":
    sys.exit(main())
