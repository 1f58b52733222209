"""Piecewise-linear and step integrands on [0, 1].

Both classes carry exact range bounds and support exact superlevel-set
extraction, which is all the Choquet engine needs.  Pointwise algebra is
exact wherever the result stays in the class (sums, shifts, |f - g| with
root insertion) and interpolated on a refined grid where it does not
(powers, products).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .intervals import IntervalUnion, interval_union

# Subcells inserted per cell when interpolating non-piecewise-linear
# results (powers, products); error budget documented in spaces.  Wide
# cells are split further so coarse grids still resolve the curvature.
POWER_REFINE = 8
POWER_MAX_WIDTH = 1.0 / 256.0

_NODE_EPS = 1e-12


@dataclass(frozen=True)
class PiecewiseLinearFunction:
    """Linear interpolant through (nodes, values) with nodes spanning [0, 1]."""

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float).copy()
        values = np.asarray(self.values, dtype=float).copy()
        if nodes.ndim != 1 or nodes.shape != values.shape or nodes.size < 2:
            raise ValueError("need matching 1-d nodes/values with >= 2 entries")
        if abs(nodes[0]) > _NODE_EPS or abs(nodes[-1] - 1.0) > _NODE_EPS:
            raise ValueError("nodes must start at 0 and end at 1")
        nodes[0], nodes[-1] = 0.0, 1.0
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if not (np.all(np.isfinite(nodes)) and np.all(np.isfinite(values))):
            raise ValueError("nodes/values must be finite")
        nodes.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    @property
    def lower_bound(self) -> float:
        return float(self.values.min())

    @property
    def upper_bound(self) -> float:
        return float(self.values.max())

    def __call__(self, t):
        return evaluate(self, t)


@dataclass(frozen=True)
class StepFunction:
    """Right-open constant cells: value ``values[i]`` on [boundaries[i], boundaries[i+1]).

    The last cell is closed at 1, so f(1) equals the final cell value.
    """

    boundaries: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bounds = np.asarray(self.boundaries, dtype=float).copy()
        values = np.asarray(self.values, dtype=float).copy()
        if bounds.ndim != 1 or bounds.size < 2 or values.size != bounds.size - 1:
            raise ValueError("need m+1 boundaries for m cell values")
        if abs(bounds[0]) > _NODE_EPS or abs(bounds[-1] - 1.0) > _NODE_EPS:
            raise ValueError("boundaries must start at 0 and end at 1")
        bounds[0], bounds[-1] = 0.0, 1.0
        if np.any(np.diff(bounds) <= 0):
            raise ValueError("boundaries must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        bounds.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "boundaries", bounds)
        object.__setattr__(self, "values", values)

    @property
    def lower_bound(self) -> float:
        return float(self.values.min())

    @property
    def upper_bound(self) -> float:
        return float(self.values.max())

    def __call__(self, t):
        return evaluate(self, t)


Function = Union[PiecewiseLinearFunction, StepFunction]


def evaluate(f: Function, t):
    """Evaluate f at t (scalar or array), t must lie in [0, 1]."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("evaluation point outside [0, 1]")
    if isinstance(f, PiecewiseLinearFunction):
        out = np.interp(arr, f.nodes, f.values)
    else:
        idx = np.searchsorted(f.boundaries, arr, side="right") - 1
        idx = np.clip(idx, 0, f.values.size - 1)
        out = f.values[idx]
    return float(out) if np.isscalar(t) or arr.ndim == 0 else out


def superlevel(f: Function, beta: float) -> IntervalUnion:
    """The set {t : f(t) >= beta} as an interval union.

    Exact for piecewise-linear f (crossings solved per segment).  For step
    functions the closed realization is returned (cell closures), which
    differs from the right-open truth on at most finitely many points and
    is therefore interchangeable under any capacity built on length.
    """
    beta = float(beta)
    pieces: list[tuple[float, float]] = []
    if isinstance(f, PiecewiseLinearFunction):
        t, v = f.nodes, f.values
        for i in range(t.size - 1):
            t0, t1, v0, v1 = t[i], t[i + 1], v[i], v[i + 1]
            if v0 >= beta and v1 >= beta:
                pieces.append((t0, t1))
            elif v0 >= beta > v1:
                cross = t0 + (beta - v0) * (t1 - t0) / (v1 - v0)
                pieces.append((t0, min(max(cross, t0), t1)))
            elif v1 >= beta > v0:
                cross = t0 + (beta - v0) * (t1 - t0) / (v1 - v0)
                pieces.append((min(max(cross, t0), t1), t1))
    else:
        for i, c in enumerate(f.values):
            if c >= beta:
                pieces.append((f.boundaries[i], f.boundaries[i + 1]))
    return interval_union(pieces)


# ---------------------------------------------------------------------------
# segment arrays: the flat form the quadrature engine consumes
# ---------------------------------------------------------------------------

def segment_arrays(f: Function) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(t0, t1, v0, v1) per linear piece; steps become flat pieces."""
    if isinstance(f, PiecewiseLinearFunction):
        return f.nodes[:-1], f.nodes[1:], f.values[:-1], f.values[1:]
    return f.boundaries[:-1], f.boundaries[1:], f.values, f.values


def clip_segments(
    segs: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray],
    window: IntervalUnion,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Restrict segment arrays to an interval union (degenerate parts dropped)."""
    t0, t1, v0, v1 = segs
    outs = ([], [], [], [])
    for lo, hi in window.parts:
        if hi <= lo:
            continue  # zero length: contributes nothing to any superlevel length
        mask = (t1 > lo) & (t0 < hi)
        if not np.any(mask):
            continue
        a, b = np.maximum(t0[mask], lo), np.minimum(t1[mask], hi)
        span = t1[mask] - t0[mask]
        wa = (a - t0[mask]) / span
        wb = (b - t0[mask]) / span
        va = v0[mask] + wa * (v1[mask] - v0[mask])
        vb = v0[mask] + wb * (v1[mask] - v0[mask])
        outs[0].append(a)
        outs[1].append(b)
        outs[2].append(va)
        outs[3].append(vb)
    if not outs[0]:
        e = np.empty(0)
        return e, e, e, e
    return tuple(np.concatenate(o) for o in outs)  # type: ignore[return-value]


def superlevel_length_contributions(
    segs: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray],
    betas: np.ndarray,
) -> np.ndarray:
    """Per-segment lengths of {f >= beta}, shape (len(betas), n_segments).

    On each linear piece the covered fraction is an affine ramp in beta:
    clip((max(v0, v1) - beta) / |v1 - v0|, 0, 1), with the flat-piece limit
    an indicator.  Summing over segments gives the exact superlevel length.
    """
    t0, t1, v0, v1 = segs
    if t0.size == 0:
        return np.zeros((betas.size, 0))
    lengths = t1 - t0
    dv = v1 - v0
    vmax = np.maximum(v0, v1)
    b = np.asarray(betas, dtype=float)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.clip((vmax - b) / np.abs(dv), 0.0, 1.0)
    flat = dv == 0.0
    if np.any(flat):
        frac[:, flat] = (v0[flat] >= b).astype(float)
    return lengths * frac


def superlevel_lengths(
    segs: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray],
    betas: np.ndarray,
) -> np.ndarray:
    return superlevel_length_contributions(segs, betas).sum(axis=1)


def lebesgue_integral(f: Function) -> float:
    """Exact classical integral over [0, 1] (trapezoid on the exact grid)."""
    if isinstance(f, PiecewiseLinearFunction):
        return float(np.trapezoid(f.values, f.nodes))
    return float(np.sum(f.values * np.diff(f.boundaries)))


# ---------------------------------------------------------------------------
# pointwise algebra
# ---------------------------------------------------------------------------

def _merged_nodes(f: Function, g: Function) -> np.ndarray:
    a = f.nodes if isinstance(f, PiecewiseLinearFunction) else f.boundaries
    b = g.nodes if isinstance(g, PiecewiseLinearFunction) else g.boundaries
    return np.union1d(a, b)


def _same_kind(f: Function, g: Function) -> None:
    if type(f) is not type(g):
        raise ValueError("binary pointwise ops need operands of the same representation")


def _step_cell_values(f: StepFunction, boundaries: np.ndarray) -> np.ndarray:
    mids = 0.5 * (boundaries[:-1] + boundaries[1:])
    return evaluate(f, mids)


def add(f: Function, g: Function) -> Function:
    """Exact pointwise sum on the merged grid."""
    _same_kind(f, g)
    grid = _merged_nodes(f, g)
    if isinstance(f, PiecewiseLinearFunction):
        return PiecewiseLinearFunction(grid, evaluate(f, grid) + evaluate(g, grid))
    return StepFunction(grid, _step_cell_values(f, grid) + _step_cell_values(g, grid))


def subtract(f: Function, g: Function) -> Function:
    return add(f, scale(g, -1.0))


def scale(f: Function, a: float) -> Function:
    if isinstance(f, PiecewiseLinearFunction):
        return PiecewiseLinearFunction(f.nodes, a * f.values)
    return StepFunction(f.boundaries, a * f.values)


def shift(f: Function, c: float) -> Function:
    if isinstance(f, PiecewiseLinearFunction):
        return PiecewiseLinearFunction(f.nodes, f.values + c)
    return StepFunction(f.boundaries, f.values + c)


def absolute(f: Function) -> Function:
    """Exact |f|: sign-change roots become new nodes (PWL case)."""
    if isinstance(f, StepFunction):
        return StepFunction(f.boundaries, np.abs(f.values))
    t, v = f.nodes, f.values
    crossing = v[:-1] * v[1:] < 0.0
    if np.any(crossing):
        i = np.nonzero(crossing)[0]
        roots = t[i] - v[i] * (t[i + 1] - t[i]) / (v[i + 1] - v[i])
        grid = np.union1d(t, roots)
    else:
        grid = t
    return PiecewiseLinearFunction(grid, np.abs(np.interp(grid, t, v)))


def abs_diff(f: Function, g: Function) -> Function:
    """Exact |f - g| (merged grid plus the interior roots of f - g)."""
    return absolute(subtract(f, g))


def refine_grid(
    grid: np.ndarray,
    subcells: int = POWER_REFINE,
    max_width: float = POWER_MAX_WIDTH,
) -> np.ndarray:
    """Split every cell into >= subcells pieces, none wider than max_width."""
    pieces = []
    for i in range(grid.size - 1):
        width = grid[i + 1] - grid[i]
        n_sub = max(subcells, int(np.ceil(width / max_width)))
        pieces.append(np.linspace(grid[i], grid[i + 1], n_sub, endpoint=False))
    return np.concatenate(pieces + [grid[-1:]])


def power(f: Function, p: float, subcells: int = POWER_REFINE) -> Function:
    """f**p for f >= 0; PWL results are interpolants on a refined grid.

    The refined interpolant lies pointwise at or above the true power for
    p >= 1 (convexity per cell), which the norm-inequality suites rely on.
    """
    if f.lower_bound < -1e-12:
        raise ValueError("power requires a nonnegative function")
    if isinstance(f, StepFunction):
        return StepFunction(f.boundaries, np.maximum(f.values, 0.0) ** p)
    grid = refine_grid(f.nodes, subcells)
    vals = np.maximum(np.interp(grid, f.nodes, f.values), 0.0)
    return PiecewiseLinearFunction(grid, vals**p)


def product_interp(f: Function, g: Function, subcells: int = POWER_REFINE) -> Function:
    """Interpolant of f*g on the refined merged grid (exact for steps)."""
    _same_kind(f, g)
    if isinstance(f, StepFunction):
        grid = _merged_nodes(f, g)
        return StepFunction(grid, _step_cell_values(f, grid) * _step_cell_values(g, grid))
    grid = refine_grid(_merged_nodes(f, g), subcells)
    return PiecewiseLinearFunction(grid, evaluate(f, grid) * evaluate(g, grid))


def pointwise_map(op: str, f: Function, g: Function | None = None, **params) -> Function:
    """Dispatcher over the pointwise operations.

    op is one of ``abs-diff``, ``sum``, ``scale`` (param a), ``shift``
    (param c), ``power`` (param p).
    """
    if op == "abs-diff":
        if g is None:
            raise ValueError("abs-diff needs two operands")
        return abs_diff(f, g)
    if op == "sum":
        if g is None:
            raise ValueError("sum needs two operands")
        return add(f, g)
    if op == "scale":
        return scale(f, float(params["a"]))
    if op == "shift":
        return shift(f, float(params["c"]))
    if op == "power":
        return power(f, float(params["p"]))
    raise ValueError(f"unknown pointwise op: {op!r}")


def compose_monotone_map(phi: PiecewiseLinearFunction, f: Function) -> Function:
    """Exact phi(f) for a nondecreasing piecewise-linear map phi.

    Used to build comonotone pairs (f, phi(f)): monotone post-composition
    preserves ordering of values by construction.  New breakpoints are
    inserted wherever f crosses a node value of phi.
    """
    if np.any(np.diff(phi.values) < 0):
        raise ValueError("phi must be nondecreasing")
    if isinstance(f, StepFunction):
        return StepFunction(f.boundaries, np.interp(f.values, phi.nodes, phi.values))
    t, v = f.nodes, f.values
    extra: list[float] = []
    for level in phi.nodes:
        for i in range(t.size - 1):
            lo, hi = min(v[i], v[i + 1]), max(v[i], v[i + 1])
            if lo < level < hi:
                extra.append(t[i] + (level - v[i]) * (t[i + 1] - t[i]) / (v[i + 1] - v[i]))
    grid = np.union1d(t, np.asarray(extra)) if extra else t
    return PiecewiseLinearFunction(grid, np.interp(np.interp(grid, t, v), phi.nodes, phi.values))


# ---------------------------------------------------------------------------
# seeded generators and presets
# ---------------------------------------------------------------------------

_CLASS_IDS = {
    "nonneg-pwl": 1,
    "signed-pwl": 2,
    "nondecreasing": 3,
    "nonincreasing": 4,
    "step": 5,
    "unit-ball": 6,
}

_MIN_NODE_GAP = 1e-3


def _random_grid(rng: np.random.Generator, n_nodes: int) -> np.ndarray:
    for _ in range(100):
        interior = np.sort(rng.uniform(0.0, 1.0, n_nodes - 2))
        grid = np.concatenate(([0.0], interior, [1.0]))
        if n_nodes == 2 or np.min(np.diff(grid)) >= _MIN_NODE_GAP:
            return grid
    return np.linspace(0.0, 1.0, n_nodes)


def random_function(
    seed: int,
    klass: str,
    n_nodes: int,
    *,
    p: float | None = None,
    mu=None,
) -> Function:
    """Deterministic seeded generator for the property suites.

    ``unit-ball`` draws a nonnegative function and rescales it so its
    L_{p,mu} norm is at most 1 (norm computed by the spaces module); it
    requires the ``p`` and ``mu`` keywords.
    """
    if klass not in _CLASS_IDS:
        raise ValueError(f"unknown function class: {klass!r}")
    if n_nodes < 2:
        raise ValueError("n_nodes must be >= 2")
    rng = np.random.default_rng([_CLASS_IDS[klass], n_nodes, seed & 0x7FFFFFFF])
    grid = _random_grid(rng, n_nodes)
    if klass == "step":
        return StepFunction(grid, rng.uniform(0.0, 1.0, n_nodes - 1))
    if klass == "signed-pwl":
        return PiecewiseLinearFunction(grid, rng.uniform(-1.0, 1.0, n_nodes))
    vals = rng.uniform(0.0, 1.0, n_nodes)
    if klass == "nondecreasing":
        vals = np.sort(vals)
    elif klass == "nonincreasing":
        vals = np.sort(vals)[::-1]
    f = PiecewiseLinearFunction(grid, vals)
    if klass == "unit-ball":
        if p is None or mu is None:
            raise ValueError("unit-ball class needs p and mu")
        from .spaces import LpConfig, lp_norm  # deferred: spaces builds on this module

        nrm = lp_norm(f, LpConfig(p), mu)
        if nrm > 1.0:
            f = scale(f, 1.0 / nrm)
    return f


def comonotone_pair(seed: int, n_nodes: int = 8, map_nodes: int = 5) -> tuple[Function, Function]:
    """(f, phi(f)) with phi a random nondecreasing map: comonotone by construction."""
    f = random_function(seed, "nonneg-pwl", n_nodes)
    rng = np.random.default_rng([7, map_nodes, seed & 0x7FFFFFFF])
    phi = PiecewiseLinearFunction(
        _random_grid(rng, map_nodes), np.sort(rng.uniform(0.0, 1.0, map_nodes))
    )
    return f, compose_monotone_map(phi, f)


_PRESET_CURVES = {
    "one": lambda t: np.ones_like(t),
    "ramp": lambda t: t,
    "exp-gamma": lambda t: 1.0 - np.exp(-t),
    "sin-pi": lambda t: np.sin(math.pi * t),
    "square": lambda t: t**2,
}


def preset(name: str, n_nodes: int = 257) -> PiecewiseLinearFunction:
    """Named sample integrands, realized as interpolants on a uniform grid."""
    if name not in _PRESET_CURVES:
        raise ValueError(f"unknown preset: {name!r}")
    if name in ("one", "ramp"):
        n_nodes = 2  # already exactly piecewise linear
    grid = np.linspace(0.0, 1.0, n_nodes)
    return PiecewiseLinearFunction(grid, _PRESET_CURVES[name](grid))


def function_from_spec(spec: dict) -> Function:
    """Build a function from the wire format used by the CLI and service.

    {"type": "pwl", "nodes": [...], "values": [...]}
    {"type": "step", "nodes": [...], "values": [...]}   # nodes = cell boundaries
    {"type": "preset", "name": "one", "n_nodes": 257}
    """
    kind = spec.get("type")
    if kind == "preset":
        return preset(spec["name"], int(spec.get("n_nodes", 257)))
    if kind == "pwl":
        return PiecewiseLinearFunction(np.asarray(spec["nodes"]), np.asarray(spec["values"]))
    if kind == "step":
        return StepFunction(np.asarray(spec["nodes"]), np.asarray(spec["values"]))
    raise ValueError(f"unknown function spec type: {kind!r}")


def function_to_spec(f: Function) -> dict:
    if isinstance(f, PiecewiseLinearFunction):
        return {"type": "pwl", "nodes": f.nodes.tolist(), "values": f.values.tolist()}
    return {"type": "step", "nodes": f.boundaries.tolist(), "values": f.values.tolist()}
