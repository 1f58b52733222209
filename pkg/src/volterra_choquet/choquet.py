"""The Choquet integral engine.

The integral of a bounded f over a window A is computed from its level-set
form: the integral of mu({f >= beta} /\\ A) over beta > 0 plus the integral
of mu({f >= beta} /\\ A) - mu(A) over beta < 0, both restricted to the range
of f where the integrands are nonzero.  The beta axis is panelized at the
function's node values (where the superlevel-length kinks live) and each
panel is handled by globally adaptive Gauss-Legendre quadrature.

Two independent oracles live here as well: a sorted-sum evaluation for step
functions and a midpoint Riemann sum in beta, plus the monotone-integrand
convolution fast path for distorted Lebesgue measures.
"""

from __future__ import annotations

import heapq
import itertools
import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .capacities import Capacity, DistortedLebesgue, DistortionFunction, measure
from .functions import (
    Function,
    StepFunction,
    clip_segments,
    evaluate,
    segment_arrays,
    superlevel,
    superlevel_length_contributions,
    superlevel_lengths,
)
from .intervals import IntervalUnion, intersect

DEFAULT_TOLERANCE = 1e-9
TOLERANCE_ENV_VAR = "VOLTERRA_CHOQUET_QUAD_TOL"


def default_tolerance() -> float:
    """Engine default absolute tolerance, overridable via the environment."""
    raw = os.environ.get(TOLERANCE_ENV_VAR)
    if raw:
        tol = float(raw)
        if tol <= 0:
            raise ValueError(f"{TOLERANCE_ENV_VAR} must be positive, got {raw!r}")
        return tol
    return DEFAULT_TOLERANCE


@dataclass(frozen=True)
class QuadratureConfig:
    gauss_order: int = 8
    max_subdivisions: int = 12
    tolerance: float = field(default_factory=default_tolerance)

    def __post_init__(self):
        if self.gauss_order < 2:
            raise ValueError("gauss_order must be >= 2")
        if self.max_subdivisions < 0:
            raise ValueError("max_subdivisions must be >= 0")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    panels_used: int
    converged: bool = True

    def __post_init__(self):
        if self.error_estimate < 0:
            raise ValueError("error_estimate must be nonnegative")


@lru_cache(maxsize=32)
def _gauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panel_points(a: float, b: float, order: int) -> np.ndarray:
    """3*order nodes: the whole-panel rule followed by the two half rules."""
    x, _ = _gauss(order)
    h = 0.5 * (b - a)
    mids = (0.5 * (a + b), 0.25 * (3 * a + b), 0.25 * (a + 3 * b))
    return np.concatenate([mids[0] + h * x, mids[1] + 0.5 * h * x, mids[2] + 0.5 * h * x])


def _panel_reduce(vals: np.ndarray, a: float, b: float, order: int):
    """(two-half value, |whole - two-half|) from the _panel_points values."""
    _, w = _gauss(order)
    h = 0.5 * (b - a)
    k = order
    whole = h * (w @ vals[:k])
    halves = 0.5 * h * (w @ vals[k : 2 * k]) + 0.5 * h * (w @ vals[2 * k :])
    return halves, np.abs(whole - halves)


def _eval_panel(g, a: float, b: float, order: int):
    return _panel_reduce(g(_panel_points(a, b, order)), a, b, order)


# Cap on beta points per batched integrand call, to bound the (points x
# segments) work matrices (keeps them cache-sized).
_EVAL_BLOCK = 4096


def _eval_panels_batched(g, panels, order: int, block_points: int = _EVAL_BLOCK):
    """Evaluate many panels with few g calls; yields (value, err) per panel."""
    per = 3 * order
    step = max(1, block_points // per)
    out = []
    for start in range(0, len(panels), step):
        block = panels[start : start + step]
        pts = np.concatenate([_panel_points(a, b, order) for a, b in block])
        vals = g(pts)
        for j, (a, b) in enumerate(block):
            out.append(_panel_reduce(vals[j * per : (j + 1) * per], a, b, order))
    return out


def _adaptive(g, panels, tol: float, order: int, max_depth: int, block_points: int = _EVAL_BLOCK):
    """Globally adaptive integration over initial panels.

    Splits the panel with the worst error estimate until the accumulated
    estimate meets tol or every offender is at max_depth.  Works for scalar
    and batched (vector-valued) integrands alike.

    Returns (value, error_estimate, panels_used, converged).
    """
    counter = itertools.count()
    heap: list = []
    frozen: list = []
    err_total = None
    live = [(a, b) for a, b in panels if b > a]
    for (a, b), (val, err) in zip(live, _eval_panels_batched(g, live, order, block_points)):
        err_total = err if err_total is None else err_total + err
        heapq.heappush(heap, (-float(np.max(err)), next(counter), a, b, 0, val, err))
    if err_total is None:
        return 0.0, 0.0, 0, True

    while float(np.max(err_total)) > tol and heap:
        _, _, a, b, depth, val, err = heapq.heappop(heap)
        if depth >= max_depth:
            frozen.append((val, err))
            continue
        m = 0.5 * (a + b)
        err_total = err_total - err
        for lo, hi in ((a, m), (m, b)):
            v, e = _eval_panel(g, lo, hi, order)
            err_total = err_total + e
            heapq.heappush(heap, (-float(np.max(e)), next(counter), lo, hi, depth + 1, v, e))

    value = sum(entry[5] for entry in heap) + sum(v for v, _ in frozen)
    count = len(heap) + len(frozen)
    err = float(np.max(err_total))
    return value, err, count, err <= tol


def _breaks(values: np.ndarray, lo: float, hi: float) -> list[tuple[float, float]]:
    """Panels over [lo, hi] split at the distinct values falling inside."""
    vals = np.unique(values)
    inner = vals[(vals > lo) & (vals < hi)]
    pts = np.concatenate([[lo], inner, [hi]])
    return [(pts[i], pts[i + 1]) for i in range(pts.size - 1) if pts[i + 1] > pts[i]]


def _level_machinery(f: Function, window: IntervalUnion, mu: Capacity):
    """(g, kink_values): g maps beta arrays to mu({f >= beta} /\\ window)."""
    segs = clip_segments(segment_arrays(f), window)
    kinks = np.concatenate([segs[2], segs[3]]) if segs[0].size else np.zeros(1)
    if isinstance(mu, DistortedLebesgue):
        def g(betas: np.ndarray) -> np.ndarray:
            return mu.measure_of_lengths(superlevel_lengths(segs, betas))
    else:
        def g(betas: np.ndarray) -> np.ndarray:
            return np.array(
                [measure(mu, intersect(superlevel(f, float(b)), window)) for b in betas]
            )
    return g, kinks


def _two_part_integral(
    f: Function,
    window: IntervalUnion,
    mu: Capacity,
    cfg: QuadratureConfig,
    eq3: bool,
) -> IntegralResult:
    if window.is_empty:
        return IntegralResult(0.0, 0.0, 0, True)
    g, kinks = _level_machinery(f, window, mu)
    pos_hi = max(f.upper_bound, 0.0)
    neg_lo = min(f.lower_bound, 0.0)
    mu_window = measure(mu, window)

    n_ranges = (1 if pos_hi > 0 else 0) + (1 if neg_lo < 0 else 0)
    tol_share = cfg.tolerance / max(n_ranges, 1)
    value, err, panels = 0.0, 0.0, 0

    if pos_hi > 0:
        v, e, c, _ = _adaptive(
            g, _breaks(kinks, 0.0, pos_hi), tol_share, cfg.gauss_order, cfg.max_subdivisions
        )
        value, err, panels = value + v, err + e, panels + c
    if neg_lo < 0:
        if eq3:
            g_neg = g
        else:
            def g_neg(betas: np.ndarray) -> np.ndarray:
                return g(betas) - mu_window
        v, e, c, _ = _adaptive(
            g_neg, _breaks(kinks, neg_lo, 0.0), tol_share, cfg.gauss_order, cfg.max_subdivisions
        )
        value, err, panels = value + v, err + e, panels + c
        if eq3:
            value += neg_lo * mu_window
    return IntegralResult(float(value), float(err), panels, err <= cfg.tolerance)


def choquet_integral(
    f: Function,
    window: IntervalUnion,
    mu: Capacity,
    cfg: QuadratureConfig | None = None,
) -> IntegralResult:
    """Choquet integral of f over the interval union ``window``.

    The value follows the two-part level-set definition; the negative part
    integrates mu({f >= beta} /\\ A) - mu(A).  An empty window yields 0.
    """
    return _two_part_integral(f, window, mu, cfg or QuadratureConfig(), eq3=False)


def choquet_integral_eq3(
    f: Function,
    window: IntervalUnion,
    mu: Capacity,
    cfg: QuadratureConfig | None = None,
) -> IntegralResult:
    """Signed-decomposition cross-check path.

    Integrates mu({f >= beta} /\\ A) over both ranges without the mu(A)
    subtraction and adds min(f, 0)'s contribution as M' * mu(A); agrees with
    :func:`choquet_integral` up to quadrature error.
    """
    return _two_part_integral(f, window, mu, cfg or QuadratureConfig(), eq3=True)


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def discrete_choquet_sorted(f: StepFunction, mu: Capacity) -> float:
    """Exact sorted-sum Choquet integral of a step function over [0, 1].

    With distinct values v_(1) < ... < v_(r) and v_(0) = min(v_(1), 0):
    v_(0) * mu([0,1]) + sum_j (v_(j) - v_(j-1)) * mu({f >= v_(j)}).
    """
    if not isinstance(f, StepFunction):
        raise TypeError("sorted-sum oracle expects a step function")
    distinct = np.unique(f.values)
    prev = min(float(distinct[0]), 0.0)
    total = prev * measure(mu, IntervalUnion.full())
    for v in distinct:
        total += (float(v) - prev) * measure(mu, superlevel(f, float(v)))
        prev = float(v)
    return total


def oracle_beta_riemann(
    f: Function,
    window: IntervalUnion,
    mu: Capacity,
    n_beta: int,
    chunk: int = 1 << 16,
) -> float:
    """Midpoint Riemann sum in beta with n_beta uniform cells per range.

    Brute-force oracle: converges to the engine value as n_beta grows; used
    by tests, never by the engine.
    """
    if n_beta < 1:
        raise ValueError("n_beta must be >= 1")
    if window.is_empty:
        return 0.0
    g, _ = _level_machinery(f, window, mu)
    mu_window = measure(mu, window)
    pos_hi = max(f.upper_bound, 0.0)
    neg_lo = min(f.lower_bound, 0.0)

    def midpoint_sum(lo: float, hi: float, offset: float) -> float:
        width = (hi - lo) / n_beta
        total = 0.0
        for start in range(0, n_beta, chunk):
            idx = np.arange(start, min(start + chunk, n_beta), dtype=float)
            total += float(np.sum(g(lo + (idx + 0.5) * width) - offset))
        return total * width

    total = 0.0
    if pos_hi > 0:
        total += midpoint_sum(0.0, pos_hi, 0.0)
    if neg_lo < 0:
        total += midpoint_sum(neg_lo, 0.0, mu_window)
    return total


# ---------------------------------------------------------------------------
# monotone-integrand convolution fast path (distorted Lebesgue only)
# ---------------------------------------------------------------------------

def _check_monotone(f: Function, direction: str) -> None:
    if f.lower_bound < -1e-12:
        raise ValueError("convolution fast path requires f >= 0")
    vals = f.values
    diffs = np.diff(vals)
    if direction == "nondecreasing":
        ok = np.all(diffs >= -1e-12)
    elif direction == "nonincreasing":
        ok = np.all(diffs <= 1e-12)
    else:
        raise ValueError(f"unknown direction: {direction!r}")
    if not ok:
        raise ValueError(f"function is not {direction}")


def choquet_monotone(
    f: Function,
    x: float,
    gamma: DistortionFunction,
    direction: str,
    cfg: QuadratureConfig | None = None,
) -> IntegralResult:
    """(C) integral of f over [0, x] for monotone f >= 0 via convolution.

    Nondecreasing f uses the kernel gamma'(x - s); nonincreasing f uses
    gamma'(s).  When gamma has a known inverse the integral is evaluated in
    the substituted variable w = gamma(x - s) (resp. gamma(s)), which removes
    the kernel singularity of e.g. power distortions; otherwise the kernel is
    sampled directly at open Gauss nodes (never at 0).
    """
    cfg = cfg or QuadratureConfig()
    _check_monotone(f, direction)
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0:
        return IntegralResult(0.0, 0.0, 0, True)

    grid = f.nodes if not isinstance(f, StepFunction) else f.boundaries
    inner = grid[(grid > 0.0) & (grid < x)]
    cuts = np.concatenate([[0.0], inner, [x]])
    value, err, panels = 0.0, 0.0, 0
    substituted = gamma.inverse_fn is not None

    for a, b in zip(cuts[:-1], cuts[1:]):
        tol_cell = cfg.tolerance * (b - a) / x
        if substituted:
            if direction == "nondecreasing":
                w_lo, w_hi = float(gamma(x - b)), float(gamma(x - a))

                def h(w, xx=x):
                    s = np.clip(xx - gamma.inverse(w), 0.0, 1.0)
                    return evaluate(f, s)
            else:
                w_lo, w_hi = float(gamma(a)), float(gamma(b))

                def h(w):
                    return evaluate(f, np.clip(gamma.inverse(w), 0.0, 1.0))

            v, e, c, _ = _adaptive(
                h, [(w_lo, w_hi)], tol_cell, cfg.gauss_order, cfg.max_subdivisions
            )
        else:
            if direction == "nondecreasing":
                def h(s, xx=x):
                    return gamma.derivative(xx - s) * evaluate(f, s)
            else:
                def h(s):
                    return gamma.derivative(s) * evaluate(f, s)

            v, e, c, _ = _adaptive(h, [(a, b)], tol_cell, cfg.gauss_order, cfg.max_subdivisions)
        value, err, panels = value + v, err + e, panels + c
    return IntegralResult(float(value), float(err), panels, err <= cfg.tolerance)


# ---------------------------------------------------------------------------
# batched prefix integrals: choquet(f, [0, x]) for a whole grid of x at once
# ---------------------------------------------------------------------------

def batch_prefix_integrals(
    f: Function,
    mu: DistortedLebesgue,
    xs: np.ndarray,
    cfg: QuadratureConfig | None = None,
) -> tuple[np.ndarray, float, int, bool]:
    """Values of x -> (C) integral of f over [0, x] at every x in xs.

    Semantically identical to calling :func:`choquet_integral` per point,
    but the superlevel lengths for all prefixes come from one cumulative
    sum per beta, so the whole batch shares a single adaptive panel set.
    Returns (values, max error estimate, panels, converged).
    """
    cfg = cfg or QuadratureConfig()
    if not isinstance(mu, DistortedLebesgue):
        raise TypeError("batched prefixes need a distorted Lebesgue capacity")
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        return np.zeros(0), 0.0, 0, True
    if np.any(xs < 0.0) or np.any(xs > 1.0) or np.any(np.diff(xs) < 0):
        raise ValueError("xs must be sorted within [0, 1]")

    base = f.nodes if not isinstance(f, StepFunction) else f.boundaries
    grid = np.union1d(base, xs)
    if isinstance(f, StepFunction):
        mids = 0.5 * (grid[:-1] + grid[1:])
        v0 = v1 = evaluate(f, mids)
    else:
        v = np.interp(grid, f.nodes, f.values)
        v0, v1 = v[:-1], v[1:]
    segs = (grid[:-1], grid[1:], v0, v1)
    cols = np.searchsorted(grid, xs)
    kinks = np.concatenate([v0, v1])

    def cumulative(betas: np.ndarray) -> np.ndarray:
        contrib = superlevel_length_contributions(segs, betas)
        cum = np.cumsum(contrib, axis=1)
        cum = np.concatenate([np.zeros((betas.size, 1)), cum], axis=1)
        return cum[:, cols]

    def g_pos(betas: np.ndarray) -> np.ndarray:
        return mu.measure_of_lengths(cumulative(betas))

    mu_prefix = mu.measure_of_lengths(xs)

    def g_neg(betas: np.ndarray) -> np.ndarray:
        return mu.measure_of_lengths(cumulative(betas)) - mu_prefix[None, :]

    pos_hi = max(f.upper_bound, 0.0)
    neg_lo = min(f.lower_bound, 0.0)
    n_ranges = (1 if pos_hi > 0 else 0) + (1 if neg_lo < 0 else 0)
    tol_share = cfg.tolerance / max(n_ranges, 1)
    # keep each (points x segments) work matrix cache-sized
    block = max(3 * cfg.gauss_order, 250_000 // max(grid.size - 1, 1))

    values = np.zeros(xs.size)
    err, panels, converged = 0.0, 0, True
    if pos_hi > 0:
        v, e, c, ok = _adaptive(
            g_pos, _breaks(kinks, 0.0, pos_hi), tol_share, cfg.gauss_order,
            cfg.max_subdivisions, block,
        )
        values, err, panels, converged = values + v, err + e, panels + c, converged and ok
    if neg_lo < 0:
        v, e, c, ok = _adaptive(
            g_neg, _breaks(kinks, neg_lo, 0.0), tol_share, cfg.gauss_order,
            cfg.max_subdivisions, block,
        )
        values, err, panels, converged = values + v, err + e, panels + c, converged and ok
    # x = 0 integrates over a degenerate window: exactly zero
    values[xs == 0.0] = 0.0
    return values, float(err), panels, err <= cfg.tolerance
