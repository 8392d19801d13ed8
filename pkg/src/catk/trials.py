"""Seeded randomized property runs over the model spaces.

Trial ``i`` of a run with seed ``s`` draws from ``default_rng([s, i])``, so a
failing trial can be replayed on its own from ``(s, i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cosq import QuadDistances, cosq_k, halve_in_model
from .conditions import k_euler_equality_sides
from .modelspace import (
    DEFAULT_TOL,
    Curvature,
    ModelPoint,
    angle_and_transport_oracle,
    as_curvature,
    geodesic_midpoint,
    model_distance,
    sample_coords,
)
from .spaces import convex_quadrangle

CHECKS = ("bound", "halving", "euler-eq", "transport")


@dataclass(frozen=True)
class TrialReport:
    check: str
    curvature: float
    dim: int
    n: int
    seed: int
    diam_cap: float | None
    tolerance: float
    max_residual: float
    failures: int
    first_failure: int | None

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "curvature": self.curvature,
            "dim": self.dim,
            "n": self.n,
            "seed": self.seed,
            "diam_cap": self.diam_cap,
            "tolerance": self.tolerance,
            "max_residual": self.max_residual,
            "failures": self.failures,
            "counterexample_seed": None if self.first_failure is None
            else [self.seed, self.first_failure],
            "verdict": "Holds" if self.passed else "Fails",
        }


def _points(c: Curvature, rng, k: int, cap, dim: int) -> list[ModelPoint]:
    return [ModelPoint(x, c) for x in sample_coords(c, k, rng, cap, dim)]


def _bound(c, rng, cap, dim) -> float:
    A, P, B, Q = _points(c, rng, 4, cap, dim)
    return max(abs(cosq_k(c, QuadDistances.from_points(A, P, B, Q))) - 1.0, 0.0)


def _halving(c, rng, cap, dim) -> float:
    A, P, B, Q = _points(c, rng, 4, cap, dim)
    M1, M2 = halve_in_model(A, P, B, Q)
    before = cosq_k(c, QuadDistances.from_points(A, P, B, Q))
    after = cosq_k(c, QuadDistances.from_points(A, M1, B, M2))
    return abs(before - after)


def _transport(c, rng, cap, dim) -> float:
    A, P, B, Q = _points(c, rng, 4, cap, dim)
    return abs(cosq_k(c, QuadDistances.from_points(A, P, B, Q))
               - angle_and_transport_oracle(A, P, B, Q))


def _euler_eq(c, rng, cap, dim) -> float:
    A, B, C, D = convex_quadrangle(c, rng)
    d = model_distance
    g = d(geodesic_midpoint(A, C), geodesic_midpoint(B, D))
    lhs, rhs = k_euler_equality_sides(c, d(A, B), d(B, C), d(C, D), d(D, A), d(A, C), d(B, D), g)
    return abs(lhs - rhs)


_RUNNERS: dict[str, Callable] = {
    "bound": _bound, "halving": _halving, "transport": _transport, "euler-eq": _euler_eq,
}


def default_cap(c, check: str) -> float | None:
    """Diameter cap used when none is given: ``pi/(2 kappa)`` for ``K > 0``."""
    c = as_curvature(c)
    return 0.5 * c.pi_over_kappa if c.K > 0 else None


def run_trials(check: str, c, n: int, seed: int = 0, dim: int = 3,
               diam_cap: float | None = None, tol: float = DEFAULT_TOL) -> TrialReport:
    """Run ``n`` trials of a model-space property and collect the worst residual."""
    c = as_curvature(c)
    if check not in _RUNNERS:
        raise ValueError(f"unknown check {check!r}; choose from {', '.join(CHECKS)}")
    if n < 1:
        raise ValueError("n must be positive")
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    if check == "halving" and c.K <= 0:
        raise ValueError("the halving check needs K > 0")
    if check == "euler-eq" and c.K == 0:
        raise ValueError("the K-Euler equality needs K != 0")
    if diam_cap is None:
        diam_cap = default_cap(c, check)
    if diam_cap is not None and (diam_cap <= 0 or (c.K > 0 and diam_cap > 0.5 * c.pi_over_kappa)):
        raise ValueError("diam_cap must be positive and at most pi/(2 kappa) when K > 0")
    runner = _RUNNERS[check]
    worst, failures, first = 0.0, 0, None
    for i in range(n):
        r = runner(c, np.random.default_rng([seed, i]), diam_cap, dim)
        if not math.isfinite(r) or r > tol:
            failures += 1
            first = i if first is None else first
        worst = max(worst, r) if math.isfinite(r) else math.inf
    return TrialReport(check, c.K, dim, n, seed, diam_cap, tol, worst, failures, first)
