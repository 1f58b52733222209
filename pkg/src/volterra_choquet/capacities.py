"""Monotone set functions on interval unions.

The workhorse is the distorted Lebesgue family mu(A) = gamma(length(A))
with gamma nondecreasing, concave and gamma(0) = 0; every catalog member
is submodular and continuous, so the Choquet inequalities downstream
apply.  Arbitrary set functions are admitted through GeneralCapacity for
counterexample hunting.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .intervals import IntervalUnion, intersect, interval_union, union

CATALOG_KINDS = ("identity", "power", "moebius", "exp-saturation", "log", "sine")


@dataclass(frozen=True)
class DistortionFunction:
    """A distortion gamma with vectorized value/derivative (and inverse when known)."""

    kind: str
    value_fn: Callable[[np.ndarray], np.ndarray]
    derivative_fn: Callable[[np.ndarray], np.ndarray]
    inverse_fn: Callable[[np.ndarray], np.ndarray] | None = None
    p: float | None = None

    def __call__(self, t):
        return self.value_fn(np.asarray(t, dtype=float))

    def derivative(self, t):
        return self.derivative_fn(np.asarray(t, dtype=float))

    def inverse(self, w):
        if self.inverse_fn is None:
            raise ValueError(f"distortion {self.kind!r} has no inverse")
        return self.inverse_fn(np.asarray(w, dtype=float))

    @property
    def label(self) -> str:
        return f"power({self.p})" if self.kind == "power" else self.kind


def distortion(kind: str, p: float | None = None) -> DistortionFunction:
    """Catalog factory.  ``power`` needs an exponent p in (0, 1)."""
    if kind == "identity":
        return DistortionFunction("identity", lambda t: t, lambda t: np.ones_like(t), lambda w: w)
    if kind == "power":
        if p is None or not 0.0 < p < 1.0:
            raise ValueError("power distortion needs p in (0, 1)")
        return DistortionFunction(
            "power",
            lambda t, p=p: np.power(t, p),
            lambda t, p=p: p * np.power(t, p - 1.0),
            lambda w, p=p: np.power(w, 1.0 / p),
            p=p,
        )
    if kind == "moebius":
        return DistortionFunction(
            "moebius",
            lambda t: 2.0 * t / (1.0 + t),
            lambda t: 2.0 / (1.0 + t) ** 2,
            lambda w: w / (2.0 - w),
        )
    if kind == "exp-saturation":
        return DistortionFunction(
            "exp-saturation",
            lambda t: -np.expm1(-t),
            lambda t: np.exp(-t),
            lambda w: -np.log1p(-w),
        )
    if kind == "log":
        return DistortionFunction(
            "log", np.log1p, lambda t: 1.0 / (1.0 + t), np.expm1
        )
    if kind == "sine":
        # restricted to [0, 1], inside the concavity window [0, pi]
        return DistortionFunction(
            "sine",
            lambda t: np.sin(0.5 * t),
            lambda t: 0.5 * np.cos(0.5 * t),
            lambda w: 2.0 * np.arcsin(w),
        )
    raise ValueError(f"unknown distortion kind: {kind!r}")


def custom_distortion(
    value_fn: Callable,
    derivative_fn: Callable,
    inverse_fn: Callable | None = None,
    label: str = "custom",
) -> DistortionFunction:
    value0 = float(np.asarray(value_fn(np.asarray(0.0))))
    if abs(value0) > 1e-12:
        raise ValueError("distortion must satisfy gamma(0) = 0")
    return DistortionFunction(label, value_fn, derivative_fn, inverse_fn)


def catalog() -> list[DistortionFunction]:
    """One member per catalog kind (power fixed at its usual p = 1/2)."""
    return [
        distortion("identity"),
        distortion("power", 0.5),
        distortion("moebius"),
        distortion("exp-saturation"),
        distortion("log"),
        distortion("sine"),
    ]


@dataclass(frozen=True)
class DistortedLebesgue:
    """mu(A) = gamma(m(A)) with m the Lebesgue length."""

    gamma: DistortionFunction
    claims_submodular: bool = True
    claims_continuous: bool = True

    def measure(self, u: IntervalUnion) -> float:
        return float(self.gamma(u.length()))

    def measure_of_lengths(self, lengths: np.ndarray) -> np.ndarray:
        return self.gamma(lengths)

    @property
    def label(self) -> str:
        return f"distorted[{self.gamma.label}]"


@dataclass(frozen=True)
class GeneralCapacity:
    """Arbitrary set function on interval unions; laws are sampled, not assumed."""

    set_function: Callable[[IntervalUnion], float]
    claims_submodular: bool = False
    claims_continuous: bool = False
    name: str = "general"

    def measure(self, u: IntervalUnion) -> float:
        out = float(self.set_function(u))
        if out < 0.0:
            raise ValueError(f"capacity {self.name!r} returned a negative value: {out}")
        return out

    @property
    def label(self) -> str:
        return self.name


Capacity = Union[DistortedLebesgue, GeneralCapacity]


def measure(mu: Capacity, u: IntervalUnion) -> float:
    return mu.measure(u)


def total_mass(mu: Capacity) -> float:
    return mu.measure(IntervalUnion.full())


def capacity_from_spec(spec: dict) -> DistortedLebesgue:
    """{"distortion": "exp-saturation"} or {"distortion": "power", "p": 0.5}."""
    kind = spec.get("distortion")
    if kind is None:
        raise ValueError("capacity spec needs a 'distortion' field")
    return DistortedLebesgue(distortion(kind, spec.get("p")))


def capacity_to_spec(mu: DistortedLebesgue) -> dict:
    out = {"distortion": mu.gamma.kind}
    if mu.gamma.p is not None:
        out["p"] = mu.gamma.p
    return out


# ---------------------------------------------------------------------------
# sampled law checks
# ---------------------------------------------------------------------------

@dataclass
class LawViolation:
    law: str
    witness: str
    margin: float


@dataclass
class CapacityLawReport:
    capacity: str
    seed: int
    n_samples: int
    checks: int = 0
    violations: list[LawViolation] = field(default_factory=list)
    worst_margin: float = float("inf")
    runtime_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations


CONTINUITY_BUDGET = 1e-9
_LAW_TOL = 1e-12
_CHAIN_STEPS = 30


def random_interval_union(
    rng: np.random.Generator,
    max_parts: int = 3,
    min_len: float = 0.04,
    min_gap: float = 0.04,
) -> IntervalUnion:
    """A random union whose parts and gaps are comfortably separated."""
    k = int(rng.integers(1, max_parts + 1))
    for _ in range(60):
        pts = np.sort(rng.uniform(0.0, 1.0, 2 * k))
        widths = np.diff(pts)
        if np.all(widths[0::2] >= min_len) and np.all(widths[1::2] >= min_gap):
            return interval_union([(pts[2 * i], pts[2 * i + 1]) for i in range(k)])
    return interval_union([(0.25, 0.75)])


def _shrink(u: IntervalUnion, delta: float) -> IntervalUnion:
    return interval_union([(lo + delta, hi - delta) for lo, hi in u.parts if hi - lo > 2 * delta])


def _grow(u: IntervalUnion, delta: float) -> IntervalUnion:
    return interval_union([(max(lo - delta, 0.0), min(hi + delta, 1.0)) for lo, hi in u.parts])


def check_capacity_laws(mu: Capacity, seed: int, n_samples: int) -> CapacityLawReport:
    """Sample pair laws (monotonicity, submodularity, subadditivity) and
    finite continuity chains.  Violations are data, not errors.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    start = time.perf_counter()
    rng = np.random.default_rng([11, seed & 0x7FFFFFFF])
    report = CapacityLawReport(capacity=mu.label, seed=seed, n_samples=n_samples)

    def record(law: str, witness: str, margin: float) -> None:
        report.checks += 1
        report.worst_margin = min(report.worst_margin, margin)
        if margin < -_LAW_TOL:
            report.violations.append(LawViolation(law, witness, margin))

    for i in range(n_samples):
        a = random_interval_union(rng)
        b = random_interval_union(rng)
        sub = intersect(a, b)
        sup = union(a, b)
        ma, mb = mu.measure(a), mu.measure(b)
        m_sub, m_sup = mu.measure(sub), mu.measure(sup)

        record("monotonicity", f"#{i}: {sub} vs {a}", ma - m_sub)
        record("monotonicity", f"#{i}: {a} vs {sup}", m_sup - ma)
        record("submodularity", f"#{i}: A={a}, B={b}", ma + mb - m_sup - m_sub)
        record("subadditivity", f"#{i}: A={a}, B={b}", ma + mb - m_sup)

        if i % 10 == 0:
            # geometric gap-halving chains as a finite surrogate for
            # countable continuity from below/above
            target = mu.measure(a)
            delta0 = 0.01
            below = mu.measure(_shrink(a, delta0 / 2 ** (_CHAIN_STEPS - 1)))
            above = mu.measure(_grow(a, delta0 / 2 ** (_CHAIN_STEPS - 1)))
            record("continuity-below", f"#{i}: {a}", CONTINUITY_BUDGET - abs(below - target))
            record("continuity-above", f"#{i}: {a}", CONTINUITY_BUDGET - abs(above - target))

    report.runtime_ms = (time.perf_counter() - start) * 1000.0
    return report
