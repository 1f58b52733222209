"""Named, seeded property suites for every theorem-level claim.

Each suite draws its instances deterministically from (name, seed, sample
index), evaluates one margin per check, and reports every witness whose
margin dips below the suite tolerance.  Margins are slack: for inequality
laws they equal "bound minus observed", for equality laws minus the
absolute deviation, so a healthy suite has worst margin >= -tolerance.
"""

from __future__ import annotations

import time
import zlib
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

import numpy as np

from . import capacities as caps
from .capacities import (
    CapacityLawReport,
    DistortedLebesgue,
    catalog,
    check_capacity_laws,
    custom_distortion,
    total_mass,
)
from .choquet import (
    QuadratureConfig,
    batch_prefix_integrals,
    choquet_integral,
    choquet_integral_eq3,
    choquet_monotone,
    discrete_choquet_sorted,
    oracle_beta_riemann,
)
from .functions import (
    Function,
    PiecewiseLinearFunction,
    StepFunction,
    add,
    comonotone_pair,
    evaluate,
    lebesgue_integral,
    preset,
    random_function,
    scale,
    shift,
    subtract,
)
from .intervals import IntervalUnion, intersect, interval_union
from .spaces import (
    LpConfig,
    conjugate_power,
    embedding_margin,
    holder_margin,
    lp_norm,
    minkowski_margin,
    uniform_norm,
)
from .volterra import (
    apply_volterra,
    iterate_volterra,
    lipschitz_norm_estimate,
    orbit_closed_form,
)

MAX_STORED_VIOLATIONS = 200

_CATALOG = catalog()


@dataclass
class SuiteReport:
    suite: str
    seed: int
    samples: int
    violations: list[dict] = field(default_factory=list)
    worst_margin: float = float("inf")
    runtime_ms: float = 0.0
    tolerance: float = 0.0
    checks: int = 0
    violation_count: int = 0
    expect_violations: bool = False

    @property
    def ok(self) -> bool:
        """Did the suite behave as expected (clean, or dirty when meant to be)."""
        return (self.violation_count > 0) == self.expect_violations

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seed": self.seed,
            "samples": self.samples,
            "violations": self.violations,
            "violation_count": self.violation_count,
            "worst_margin": self.worst_margin,
            "tolerance": self.tolerance,
            "checks": self.checks,
            "expect_violations": self.expect_violations,
            "ok": self.ok,
            "runtime_ms": self.runtime_ms,
        }


Check = tuple[str, float]  # (witness, margin)


def _rng(name: str, seed: int, *extra: int) -> np.random.Generator:
    return np.random.default_rng([zlib.crc32(name.encode()), seed & 0x7FFFFFFF, *extra])


def _seed(seed: int, i: int, salt: int = 0) -> int:
    return (seed * 1_000_003 + 97 * salt + i) & 0x7FFFFFFF


def _mu(i: int) -> DistortedLebesgue:
    return DistortedLebesgue(_CATALOG[i % len(_CATALOG)])


def _mixed_function(seed: int, i: int) -> Function:
    klass = ("signed-pwl", "step", "nonneg-pwl")[i % 3]
    f = random_function(_seed(seed, i), klass, 6 + (i % 7))
    if klass == "step" and i % 2:
        f = shift(f, -0.5)  # exercise signed steps too
    return f


def _window(name: str, seed: int, i: int) -> IntervalUnion:
    if i % 2 == 0:
        return IntervalUnion.full()
    return caps.random_interval_union(_rng(name, seed, i))


def _value(f, window, mu, cfg) -> float:
    return choquet_integral(f, window, mu, cfg).value


# ---------------------------------------------------------------------------
# suite bodies
# ---------------------------------------------------------------------------

def _suite_homogeneity(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    for i in range(n):
        mu = _mu(i)
        f = _mixed_function(seed, i)
        window = _window("homogeneity", seed, i)
        base = _value(f, window, mu, cfg)
        for a in (0.0, 0.5, 2.0, 10.0):
            got = _value(scale(f, a), window, mu, cfg)
            yield f"#{i} a={a} mu={mu.label}", -abs(got - a * base)


def _suite_translation(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    for i in range(n):
        mu = _mu(i)
        f = _mixed_function(seed, i)
        window = _window("translation", seed, i)
        base = _value(f, window, mu, cfg)
        m_w = mu.measure(window)
        for c in (-1.0, 1.0):
            got = _value(shift(f, c), window, mu, cfg)
            yield f"#{i} c={c} mu={mu.label}", -abs(got - base - c * m_w)


def _suite_monotonicity(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    for i in range(n):
        mu = _mu(i)
        f = random_function(_seed(seed, i), "signed-pwl", 8)
        bump = random_function(_seed(seed, i, 1), "nonneg-pwl", 6)
        window = _window("monotonicity", seed, i)
        lo = _value(f, window, mu, cfg)
        hi = _value(add(f, bump), window, mu, cfg)
        yield f"#{i} mu={mu.label}", hi - lo


def _suite_set_monotonicity(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    for i in range(n):
        mu = _mu(i)
        f = random_function(_seed(seed, i), "nonneg-pwl", 8)
        rng = _rng("set-monotonicity", seed, i)
        big = caps.random_interval_union(rng)
        small = intersect(big, caps.random_interval_union(rng))
        yield (
            f"#{i} mu={mu.label} A={small} B={big}",
            _value(f, big, mu, cfg) - _value(f, small, mu, cfg),
        )


def _suite_subadditivity(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    for i in range(n):
        mu = _mu(i)
        f = random_function(_seed(seed, i), "signed-pwl", 8)
        g = random_function(_seed(seed, i, 1), "signed-pwl", 7)
        window = _window("subadditivity", seed, i)
        margin = (
            _value(f, window, mu, cfg)
            + _value(g, window, mu, cfg)
            - _value(add(f, g), window, mu, cfg)
        )
        yield f"#{i} mu={mu.label}", margin


def _suite_comonotone(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    for i in range(n):
        mu = _mu(i)
        f, g = comonotone_pair(_seed(seed, i), n_nodes=6 + (i % 5))
        window = IntervalUnion.full()
        diff = (
            _value(add(f, g), window, mu, cfg)
            - _value(f, window, mu, cfg)
            - _value(g, window, mu, cfg)
        )
        yield f"#{i} mu={mu.label}", -abs(diff)


def _capacity_law_checks(report: CapacityLawReport, label: str) -> Iterator[Check]:
    yield f"{label} worst", report.worst_margin
    for v in report.violations:
        yield f"{label} {v.law}: {v.witness}", v.margin


def _suite_capacity_laws(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    per = max(1, n // len(_CATALOG))
    for idx, gamma in enumerate(_CATALOG):
        report = check_capacity_laws(DistortedLebesgue(gamma), _seed(seed, idx), per)
        yield from _capacity_law_checks(report, gamma.label)


def _suite_capacity_laws_square(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    # convex distortion: submodularity must fail on disjoint pairs
    square = custom_distortion(
        lambda t: t**2, lambda t: 2.0 * t, lambda w: np.sqrt(w), label="t^2"
    )
    report = check_capacity_laws(DistortedLebesgue(square, claims_submodular=False), seed, n)
    yield from _capacity_law_checks(report, "t^2")


def _suite_lebesgue_reduction(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    mu = DistortedLebesgue(_CATALOG[0])  # identity
    for i in range(n):
        f = _mixed_function(seed, i)
        got = _value(f, IntervalUnion.full(), mu, cfg)
        yield f"#{i}", -abs(got - lebesgue_integral(f))


def _suite_oracle_equivalence(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    for i in range(n):
        mu = _mu(i)
        rng = _rng("oracle-equivalence", seed, i)
        cells = int(rng.integers(3, 65))
        f = random_function(_seed(seed, i), "step", cells + 1)
        if i % 2:
            f = shift(f, -0.4)
        engine = _value(f, IntervalUnion.full(), mu, cfg)
        yield f"step #{i} mu={mu.label}", 1e-10 - abs(engine - discrete_choquet_sorted(f, mu))
    for j in range(max(1, n // 25)):
        mu = _mu(j + 1)
        f = random_function(_seed(seed, j, 2), "signed-pwl", 9)
        engine = _value(f, IntervalUnion.full(), mu, cfg)
        riemann = oracle_beta_riemann(f, IntervalUnion.full(), mu, 1 << 20)
        yield f"pwl #{j} mu={mu.label}", 1e-5 - abs(engine - riemann)


def _suite_fast_path(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    for i in range(n):
        mu = _mu(i)
        direction = "nondecreasing" if i % 2 == 0 else "nonincreasing"
        f = random_function(_seed(seed, i), direction, 7)
        rng = _rng("fast-path", seed, i)
        x = 1.0 if i % 3 == 0 else float(rng.uniform(0.05, 1.0))
        engine = _value(f, interval_union([(0.0, x)]), mu, cfg)
        conv = choquet_monotone(f, x, mu.gamma, direction, cfg).value
        yield f"#{i} {direction} x={x:.6f} mu={mu.label}", -abs(engine - conv)


def _suite_eq3(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    for i in range(n):
        mu = _mu(i)
        f = _mixed_function(seed, i)
        window = _window("eq3", seed, i)
        primary = choquet_integral(f, window, mu, cfg).value
        alt = choquet_integral_eq3(f, window, mu, cfg).value
        yield f"#{i} mu={mu.label}", -abs(primary - alt)


_PS = (1.5, 2.0, 3.0)


def _suite_holder(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    for i in range(n):
        mu = _mu(i)
        p = _PS[i % 3]
        f = random_function(_seed(seed, i), "signed-pwl", 7)
        g = random_function(_seed(seed, i, 1), "signed-pwl", 6)
        yield f"#{i} p={p} mu={mu.label}", holder_margin(f, g, LpConfig(p), mu, cfg)


def _suite_minkowski(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    ps = (1.0, 1.5, 2.0, 3.0)
    for i in range(n):
        mu = _mu(i)
        p = ps[i % 4]
        f = random_function(_seed(seed, i), "signed-pwl", 7)
        g = random_function(_seed(seed, i, 1), "signed-pwl", 6)
        yield f"#{i} p={p} mu={mu.label}", minkowski_margin(f, g, LpConfig(p), mu, cfg)


def _suite_embedding(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    for i in range(n):
        mu = _mu(i)
        p = _PS[i % 3]
        f = random_function(_seed(seed, i), "signed-pwl", 7)
        yield f"#{i} p={p} mu={mu.label}", embedding_margin(f, LpConfig(p), mu, cfg)


_PAIRS_PER_FUNCTION = 50


def _modulus_samples(
    name: str, seed: int, n: int, cfg: QuadratureConfig
) -> Iterator[tuple[int, DistortedLebesgue, float, float, np.ndarray, np.ndarray, float]]:
    """Shared sampling for the equicontinuity suites: unit-ball f, point pairs,
    prefix values of V f at all pair points."""
    for i in range(n):
        mu = _mu(i)
        p = _PS[i % 3]
        f = random_function(_seed(seed, i), "unit-ball", 8, p=p, mu=mu)
        norm_f = lp_norm(f, LpConfig(p), mu, cfg)
        rng = _rng(name, seed, i)
        pts = rng.uniform(0.0, 1.0, (_PAIRS_PER_FUNCTION, 2))
        xs = np.unique(pts)
        values, _, _, _ = batch_prefix_integrals(f, mu, xs, cfg)
        lookup = dict(zip(xs.tolist(), values.tolist()))
        vx = np.array([lookup[v] for v in pts[:, 0]])
        vy = np.array([lookup[v] for v in pts[:, 1]])
        yield i, mu, p, norm_f, pts, np.abs(vx - vy), float(np.max(np.abs(values)))


def _suite_thm_4_1(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    for i, mu, p, norm_f, pts, jumps, _ in _modulus_samples("thm-4.1", seed, n, cfg):
        q = LpConfig(p).q
        gaps = np.abs(pts[:, 1] - pts[:, 0])
        bounds = norm_f * mu.gamma(gaps) ** (1.0 / q)
        for k in range(pts.shape[0]):
            yield (
                f"f#{i} p={p} mu={mu.label} x={pts[k, 0]:.6f} y={pts[k, 1]:.6f}",
                float(bounds[k] - jumps[k]),
            )


def _suite_cor_4_2(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    for i, mu, p, _, pts, jumps, sup_v in _modulus_samples("cor-4.2", seed, n, cfg):
        q = LpConfig(p).q
        moduli = mu.gamma(np.abs(pts[:, 1] - pts[:, 0])) ** (1.0 / q)
        for k in range(pts.shape[0]):
            yield f"f#{i} p={p} mu={mu.label} pair {k}", float(moduli[k] - jumps[k])
        bound = conjugate_power(float(mu.gamma(1.0)), q)
        yield f"f#{i} p={p} mu={mu.label} uniform bound", bound - sup_v


_LIPSCHITZ_GRID = 33


def _lipschitz_pair(seed: int, i: int, mu, cfg: QuadratureConfig):
    f = random_function(_seed(seed, i), "signed-pwl", 8)
    g = random_function(_seed(seed, i, 1), "signed-pwl", 7)
    vf = apply_volterra(f, mu, _LIPSCHITZ_GRID, cfg)
    vg = apply_volterra(g, mu, _LIPSCHITZ_GRID, cfg)
    diff_v = PiecewiseLinearFunction(vf.nodes, vf.values - vg.values)
    return f, g, subtract(f, g), diff_v


def _suite_thm_5_1_i(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    for i in range(n):
        mu = _mu(i)
        _, _, diff, diff_v = _lipschitz_pair(seed, i, mu, cfg)
        cfg1 = LpConfig(1.0)
        bound = total_mass(mu) * lp_norm(diff, cfg1, mu, cfg)
        yield f"#{i} mu={mu.label}", bound - lp_norm(diff_v, cfg1, mu, cfg)


def _suite_thm_5_1_ii(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    for i in range(n):
        mu = _mu(i)
        _, _, diff, diff_v = _lipschitz_pair(seed, i, mu, cfg)
        yield f"#{i} mu={mu.label}", total_mass(mu) * uniform_norm(diff) - uniform_norm(diff_v)


def _suite_thm_5_1_iii(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    for i in range(n):
        mu = _mu(i)
        p = LpConfig(_PS[i % 3])
        _, _, diff, diff_v = _lipschitz_pair(seed, i, mu, cfg)
        bound = total_mass(mu) * lp_norm(diff, p, mu, cfg)
        yield f"#{i} p={p.p} mu={mu.label}", bound - lp_norm(diff_v, p, mu, cfg)


def _suite_lipschitz_kernel(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    from .functions import abs_diff

    for i in range(n):
        mu = _mu(i)
        f, g, diff, diff_v = _lipschitz_pair(seed, i, mu, cfg)
        bound = _value(abs_diff(f, g), IntervalUnion.full(), mu, cfg)
        yield f"#{i} mu={mu.label}", bound - uniform_norm(diff_v)


def _suite_remark_5_3(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    per = max(2, n // (2 * len(_CATALOG)))
    for idx, gamma in enumerate(_CATALOG):
        mu = DistortedLebesgue(gamma)
        for p in (1.0, 2.0):
            est = lipschitz_norm_estimate(
                mu, LpConfig(p), _seed(seed, idx, int(p)), per, grid_size=_LIPSCHITZ_GRID, quad=cfg
            )
            yield f"{gamma.label} p={p} estimate={est:.6f}", total_mass(mu) - est


ORBIT_BUDGET = 5e-5
_ORBIT_GRID = 1025


def _suite_thm_6_2(seed: int, n: int, cfg: QuadratureConfig) -> Iterator[Check]:
    depth = min(8, max(1, n))
    mu = DistortedLebesgue(caps.distortion("exp-saturation"))
    record = iterate_volterra(preset("one"), depth, mu, _ORBIT_GRID, cfg)
    xs = record.grid
    for k in range(1, depth + 1):
        dev = float(np.max(np.abs(record.iterates[k].values - orbit_closed_form(k, xs))))
        yield f"iterate {k} (budget {record.budgets[k]:.2e})", ORBIT_BUDGET - dev


_SUITE_TOLS = {
    "capacity-laws": 1e-12,
    "capacity-laws[t^2]": 1e-12,
    "homogeneity": 1e-8,
    "translation": 1e-8,
    "monotonicity": 1e-9,
    "set-monotonicity": 1e-8,
    "subadditivity": 1e-8,
    "comonotone": 1e-7,
    "lebesgue-reduction": 1e-10,
    "oracle-equivalence": 0.0,
    "fast-path": 1e-7,
    "eq3-decomposition": 1e-9,
    "holder": 1e-8,
    "minkowski": 1e-8,
    "embedding": 1e-8,
    "thm-4.1": 1e-7,
    "cor-4.2": 1e-7,
    "thm-5.1-i": 1e-7,
    "thm-5.1-ii": 1e-7,
    "thm-5.1-iii": 1e-7,
    "lipschitz-kernel": 1e-8,
    "remark-5.3": 1e-6,
    "thm-6.2": 0.0,
}

_SUITE_RUNNERS: dict[str, Callable[[int, int, QuadratureConfig], Iterable[Check]]] = {
    "capacity-laws": _suite_capacity_laws,
    "capacity-laws[t^2]": _suite_capacity_laws_square,
    "homogeneity": _suite_homogeneity,
    "translation": _suite_translation,
    "monotonicity": _suite_monotonicity,
    "set-monotonicity": _suite_set_monotonicity,
    "subadditivity": _suite_subadditivity,
    "comonotone": _suite_comonotone,
    "lebesgue-reduction": _suite_lebesgue_reduction,
    "oracle-equivalence": _suite_oracle_equivalence,
    "fast-path": _suite_fast_path,
    "eq3-decomposition": _suite_eq3,
    "holder": _suite_holder,
    "minkowski": _suite_minkowski,
    "embedding": _suite_embedding,
    "thm-4.1": _suite_thm_4_1,
    "cor-4.2": _suite_cor_4_2,
    "thm-5.1-i": _suite_thm_5_1_i,
    "thm-5.1-ii": _suite_thm_5_1_ii,
    "thm-5.1-iii": _suite_thm_5_1_iii,
    "lipschitz-kernel": _suite_lipschitz_kernel,
    "remark-5.3": _suite_remark_5_3,
    "thm-6.2": _suite_thm_6_2,
}

EXPECTED_TO_FAIL = frozenset({"capacity-laws[t^2]"})


def suite_names() -> list[str]:
    return sorted(_SUITE_RUNNERS)


def run_suite(
    name: str, seed: int, n_samples: int, cfg: QuadratureConfig | None = None
) -> SuiteReport:
    """Run one named suite; deterministic given (name, seed, n_samples)."""
    if name not in _SUITE_RUNNERS:
        raise ValueError(f"unknown suite: {name!r} (known: {', '.join(suite_names())})")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    cfg = cfg or QuadratureConfig()
    start = time.perf_counter()
    report = SuiteReport(
        suite=name,
        seed=seed,
        samples=n_samples,
        tolerance=_SUITE_TOLS[name],
        expect_violations=name in EXPECTED_TO_FAIL,
    )
    for witness, margin in _SUITE_RUNNERS[name](seed, n_samples, cfg):
        report.checks += 1
        report.worst_margin = min(report.worst_margin, margin)
        if margin < -report.tolerance:
            report.violation_count += 1
            if len(report.violations) < MAX_STORED_VIOLATIONS:
                report.violations.append({"witness": witness, "margin": margin})
    report.runtime_ms = (time.perf_counter() - start) * 1000.0
    return report


# ---------------------------------------------------------------------------
# cyclic-span residuals
# ---------------------------------------------------------------------------

def span_residual(
    targets: list[Function],
    n_max: int,
    mu,
    grid_size: int = 257,
    operator: str = "v",
    cfg: QuadratureConfig | None = None,
) -> list[list[tuple[int, float]]]:
    """Uniform-norm residuals of least-squares fits from span{orbit 0..n}.

    The orbit starts at the constant one.  ``operator`` selects V itself or
    U = I + V.  Rank deficiency falls through to the minimum-norm solution.

    Each reported residual is the best uniform-norm residual among the
    least-squares fits from span{0..k}, k <= n.  Every such fit lies in the
    larger span too, so enlarging the span never reports worse: the sequence
    is nonincreasing by construction, which the raw sup norm of the n-th
    l2-optimal fit alone would not be.

    Returns one (n, residual) list per target.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if operator not in ("v", "u"):
        raise ValueError("operator must be 'v' or 'u'")
    cfg = cfg or QuadratureConfig()
    xs = np.linspace(0.0, 1.0, grid_size)
    f0 = PiecewiseLinearFunction(xs, np.ones_like(xs))
    if operator == "v":
        elements = iterate_volterra(f0, n_max, mu, grid_size, cfg).iterates
    else:
        elements = [f0]
        for _ in range(n_max):
            prev = elements[-1]
            vprev = apply_volterra(prev, mu, grid_size, cfg)
            elements.append(PiecewiseLinearFunction(xs, prev.values + vprev.values))
    columns = np.stack([e.values for e in elements], axis=1)

    results = []
    for target in targets:
        y = evaluate(target, xs)
        rows = []
        best = np.inf
        for n in range(n_max + 1):
            coeffs, *_ = np.linalg.lstsq(columns[:, : n + 1], y, rcond=None)
            resid = columns[:, : n + 1] @ coeffs - y
            best = min(best, float(np.max(np.abs(resid))))
            rows.append((n, best))
        results.append(rows)
    return results


# ---------------------------------------------------------------------------
# p = 1 equicontinuity failure demonstration (data, not pass/fail)
# ---------------------------------------------------------------------------

def equicontinuity_failure_demo(
    scales: tuple[int, ...] = (2, 4, 8, 16, 32, 64, 128, 256),
) -> list[dict]:
    """Unit-L1-norm spikes under the identity distortion.

    Each spike has L1 norm exactly 1, yet V of the spike climbs from 0 to 1
    over a window of width 1/n: the oscillation at scale 1/n stays 1 while
    the scale shrinks, so no uniform modulus of continuity exists for p = 1.
    """
    mu = DistortedLebesgue(caps.distortion("identity"))
    out = []
    for n in scales:
        spike = StepFunction(np.array([0.0, 1.0 / n, 1.0]), np.array([float(n), 0.0]))
        norm1 = lp_norm(spike, LpConfig(1.0), mu)
        v_at_window = choquet_integral(spike, interval_union([(0.0, 1.0 / n)]), mu).value
        out.append(
            {
                "n": n,
                "window": 1.0 / n,
                "l1_norm": norm1,
                "oscillation_over_window": v_at_window,
            }
        )
    return out
