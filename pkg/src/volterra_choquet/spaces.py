"""Choquet L_p norms and the Hoelder/Minkowski machinery.

Norms of piecewise-linear functions are computed through interpolants of
|f|^p on a refined grid.  Per-cell convexity of the power makes every such
interpolant an overestimate of the true |f|^p, and the margin helpers below
evaluate all of their operands on one shared refined grid; together this
keeps the checked inequalities mathematically exact up to engine tolerance,
with interpolation error only shifting how tight they look.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .capacities import Capacity, total_mass
from .choquet import IntegralResult, QuadratureConfig, choquet_integral
from .functions import (
    Function,
    PiecewiseLinearFunction,
    StepFunction,
    absolute,
    evaluate,
    power,
    refine_grid,
)
from .intervals import IntervalUnion


@dataclass(frozen=True)
class LpConfig:
    """Exponent p >= 1 with its conjugate (q = inf when p = 1)."""

    p: float

    def __post_init__(self):
        if self.p < 1.0:
            raise ValueError("p must be >= 1")

    @property
    def q(self) -> float:
        return math.inf if self.p == 1.0 else self.p / (self.p - 1.0)


def conjugate_power(base: float, q: float) -> float:
    """base**(1/q), with the q = inf convention base**0 = 1."""
    if math.isinf(q):
        return 1.0
    return float(base) ** (1.0 / q)


def _integral(f: Function, mu: Capacity, quad: QuadratureConfig | None) -> IntegralResult:
    return choquet_integral(f, IntervalUnion.full(), mu, quad)


def lp_norm(
    f: Function,
    cfg: LpConfig,
    mu: Capacity,
    quad: QuadratureConfig | None = None,
) -> float:
    """((C) integral of |f|^p d mu)**(1/p) over [0, 1]."""
    af = absolute(f)
    integrand = af if cfg.p == 1.0 else power(af, cfg.p)
    value = max(_integral(integrand, mu, quad).value, 0.0)
    return value ** (1.0 / cfg.p)


def uniform_norm(f: Function) -> float:
    """sup |f|; exact for both representations (attained at nodes/cells)."""
    return float(np.max(np.abs(f.values)))


def _shared_powers(
    f: Function, g: Function, exponents: tuple[float, ...]
) -> list[Function]:
    """Interpolants of |f|^a, |g|^b, |f*g| on one shared refined grid.

    exponents = (p, q); the third entry of the result is the |f*g|
    interpolant.  Step inputs are handled exactly on merged boundaries.
    """
    p, q = exponents
    if isinstance(f, StepFunction) and isinstance(g, StepFunction):
        grid = np.union1d(f.boundaries, g.boundaries)
        mids = 0.5 * (grid[:-1] + grid[1:])
        fv, gv = np.abs(evaluate(f, mids)), np.abs(evaluate(g, mids))
        return [
            StepFunction(grid, fv**p),
            StepFunction(grid, gv**q),
            StepFunction(grid, fv * gv),
        ]
    if isinstance(f, StepFunction) or isinstance(g, StepFunction):
        raise ValueError("margin helpers need operands of the same representation")
    grid = refine_grid(np.union1d(f.nodes, g.nodes))
    fv, gv = np.abs(evaluate(f, grid)), np.abs(evaluate(g, grid))
    return [
        PiecewiseLinearFunction(grid, fv**p),
        PiecewiseLinearFunction(grid, gv**q),
        PiecewiseLinearFunction(grid, fv * gv),
    ]


def holder_margin(
    f: Function,
    g: Function,
    cfg: LpConfig,
    mu: Capacity,
    quad: QuadratureConfig | None = None,
) -> float:
    """||f||_p * ||g||_q - (C) integral of |f g|; nonnegative for submodular mu."""
    if cfg.p <= 1.0:
        raise ValueError("Hoelder margin needs p > 1")
    q = cfg.q
    h_f, h_g, h_fg = _shared_powers(f, g, (cfg.p, q))
    norm_f = max(_integral(h_f, mu, quad).value, 0.0) ** (1.0 / cfg.p)
    norm_g = max(_integral(h_g, mu, quad).value, 0.0) ** (1.0 / q)
    cross = _integral(h_fg, mu, quad).value
    return norm_f * norm_g - cross


def minkowski_margin(
    f: Function,
    g: Function,
    cfg: LpConfig,
    mu: Capacity,
    quad: QuadratureConfig | None = None,
) -> float:
    """||f||_p + ||g||_p - ||f+g||_p, all on one shared refined grid."""
    if isinstance(f, StepFunction) != isinstance(g, StepFunction):
        raise ValueError("margin helpers need operands of the same representation")
    if isinstance(f, StepFunction):
        grid = np.union1d(f.boundaries, g.boundaries)
        pts = 0.5 * (grid[:-1] + grid[1:])
        build = lambda v: StepFunction(grid, v)  # noqa: E731
    else:
        grid = refine_grid(np.union1d(f.nodes, g.nodes))
        pts = grid
        build = lambda v: PiecewiseLinearFunction(grid, v)  # noqa: E731
    fv, gv = evaluate(f, pts), evaluate(g, pts)

    def norm_of(vals: np.ndarray) -> float:
        integrand = build(np.abs(vals) ** cfg.p)
        return max(_integral(integrand, mu, quad).value, 0.0) ** (1.0 / cfg.p)

    return norm_of(fv) + norm_of(gv) - norm_of(fv + gv)


def embedding_margin(
    f: Function,
    cfg: LpConfig,
    mu: Capacity,
    quad: QuadratureConfig | None = None,
) -> float:
    """||f||_p * mu([0,1])**(1/q) - ||f||_1 (the L_p into L_1 embedding)."""
    bound = lp_norm(f, cfg, mu, quad) * conjugate_power(total_mass(mu), cfg.q)
    return bound - lp_norm(f, LpConfig(1.0), mu, quad)
