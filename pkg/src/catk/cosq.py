"""The K-quadrilateral cosine of two bound vectors.

For bound vectors ``AP`` and ``BQ`` write ``x = AP``, ``y = BQ``, ``a = AB``,
``b = PQ``, ``d = PB`` and ``f = AQ``.  With ``C``/``S`` the regime cosine
and sine,

    K > 0:  (C b + C x C y) / (S x S y) - (C x + C d)(C y + C f) / ((1 + C a) S x S y)
    K < 0:  (C x + C d)(C y + C f) / ((1 + C a) S x S y) - (C b + C x C y) / (S x S y)
    K = 0:  (f^2 + d^2 - a^2 - b^2) / (2 x y)

In the model space this equals the cosine of the angle between ``BQ`` and
the parallel transport of ``AP`` along ``AB``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UndefinedCosqError
from .modelspace import (
    ModelPoint,
    _common_curvature,
    as_curvature,
    geodesic_midpoint,
    model_distance,
)

# canonical case order; roles are indices into (A, P, B, Q)
CASE_LABELS = ("I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX", "X", "XI", "XII")
_ROLE = {"A": 0, "P": 1, "B": 2, "Q": 3}
_CASE_VECTORS = {
    "I": ("AP", "BQ"), "II": ("AP", "QB"), "III": ("AB", "PQ"), "IV": ("AB", "QP"),
    "V": ("AQ", "PB"), "VI": ("AQ", "BP"), "VII": ("PA", "BQ"), "VIII": ("PA", "QB"),
    "IX": ("PB", "QA"), "X": ("PQ", "BA"), "XI": ("BA", "QP"), "XII": ("BP", "QA"),
}
# case label -> (tail1, head1, tail2, head2) as indices into (A, P, B, Q)
CASE_ROLES = {
    label: tuple(_ROLE[ch] for ch in v1 + v2) for label, (v1, v2) in _CASE_VECTORS.items()
}
# every ordering of four distinct points is one of the twelve cases or its swap
ORDER_TO_CASE = {}
for _label, (_t1, _h1, _t2, _h2) in CASE_ROLES.items():
    ORDER_TO_CASE[(_t1, _h1, _t2, _h2)] = _label
    ORDER_TO_CASE[(_t2, _h2, _t1, _h1)] = _label


@dataclass(frozen=True)
class QuadDistances:
    """Six distances of the bound-vector pair ``(AP, BQ)``."""

    x: float  # AP
    y: float  # BQ
    a: float  # AB
    b: float  # PQ
    d: float  # PB
    f: float  # AQ

    def swapped(self) -> "QuadDistances":
        """Distances of the pair ``(BQ, AP)``."""
        return QuadDistances(self.y, self.x, self.a, self.b, self.f, self.d)

    def as_tuple(self) -> tuple[float, ...]:
        return (self.x, self.y, self.a, self.b, self.d, self.f)

    @classmethod
    def from_matrix(cls, dist, A: int, P: int, B: int, Q: int) -> "QuadDistances":
        D = np.asarray(dist, dtype=float)
        return cls(D[A, P], D[B, Q], D[A, B], D[P, Q], D[P, B], D[A, Q])

    @classmethod
    def from_points(cls, A: ModelPoint, P: ModelPoint, B: ModelPoint,
                    Q: ModelPoint) -> "QuadDistances":
        return cls(model_distance(A, P), model_distance(B, Q), model_distance(A, B),
                   model_distance(P, Q), model_distance(P, B), model_distance(A, Q))


def cosq_values(c, x, y, a, b, d, f):
    """Vectorized quadrilateral cosine with no admissibility checks.

    Vanishing denominators produce ``inf``/``nan`` rather than errors.
    """
    c = as_curvature(c)
    x, y, a, b, d, f = (np.asarray(v, dtype=float) for v in (x, y, a, b, d, f))
    with np.errstate(divide="ignore", invalid="ignore"):
        if c.K == 0:
            return (f * f + d * d - a * a - b * b) / (2.0 * x * y)
        k = c.kappa
        if c.K > 0:
            cx, cy, ca, cb, cd, cf = (np.cos(k * v) for v in (x, y, a, b, d, f))
            sxy = np.sin(k * x) * np.sin(k * y)
            return (cb + cx * cy) / sxy - (cx + cd) * (cy + cf) / ((1.0 + ca) * sxy)
        cx, cy, ca, cb, cd, cf = (np.cosh(k * v) for v in (x, y, a, b, d, f))
        sxy = np.sinh(k * x) * np.sinh(k * y)
        return (cx + cd) * (cy + cf) / ((1.0 + ca) * sxy) - (cb + cx * cy) / sxy


def admissible(c, x, y, a):
    """Whether ``(x, y, a)`` meets the domain of the quadrilateral cosine.

    Both vectors must be non-zero; for ``K > 0`` the lengths ``x``, ``y``
    and ``a`` must also stay below ``pi/kappa``.
    """
    c = as_curvature(c)
    x, y, a = (np.asarray(v, dtype=float) for v in (x, y, a))
    ok = (x > 0) & (y > 0)
    if c.K > 0:
        lim = c.pi_over_kappa
        ok &= (x < lim) & (y < lim) & (a < lim)
    return ok


def cosq_k(c, q: QuadDistances) -> float:
    """Quadrilateral cosine of one bound-vector pair, validated."""
    c = as_curvature(c)
    if min(q.as_tuple()) < 0:
        raise UndefinedCosqError("distances must be nonnegative")
    if q.x <= 0 or q.y <= 0:
        raise UndefinedCosqError("bound vectors must be non-zero")
    if c.K > 0 and max(q.x, q.y, q.a) >= c.pi_over_kappa:
        raise UndefinedCosqError(
            f"x, y and a must be below pi/kappa = {c.pi_over_kappa} for K={c.K}"
        )
    value = float(cosq_values(c, *q.as_tuple()))
    if not np.isfinite(value):
        raise UndefinedCosqError(f"denominator vanishes for {q}")
    return value


@dataclass(frozen=True)
class CaseTable:
    """Quadrilateral cosines of the twelve main cases; ``nan`` where inadmissible."""

    values: np.ndarray
    admissible: np.ndarray

    def __getitem__(self, label: str) -> float:
        return float(self.values[CASE_LABELS.index(label)])

    def as_dict(self) -> dict[str, float | None]:
        return {
            label: (float(v) if ok else None)
            for label, v, ok in zip(CASE_LABELS, self.values, self.admissible)
        }


def twelve_cases(c, dist4) -> CaseTable:
    """Evaluate the twelve Table-1 pairs on a 4x4 matrix over labels ``(A, P, B, Q)``."""
    c = as_curvature(c)
    D = np.asarray(dist4, dtype=float)
    if D.shape != (4, 4):
        raise ValueError("expected a 4x4 distance matrix")
    values = np.full(12, np.nan)
    ok = np.zeros(12, dtype=bool)
    for i, label in enumerate(CASE_LABELS):
        q = QuadDistances.from_matrix(D, *CASE_ROLES[label])
        if not admissible(c, q.x, q.y, q.a):
            continue
        v = float(cosq_values(c, *q.as_tuple()))
        if np.isfinite(v):
            values[i], ok[i] = v, True
    return CaseTable(values, ok)


def halve_in_model(A: ModelPoint, P: ModelPoint, B: ModelPoint,
                   Q: ModelPoint) -> tuple[ModelPoint, ModelPoint]:
    """Midpoints of ``AP`` and ``BQ``; the pair ``(A M1, B M2)`` has the same cosine."""
    c = _common_curvature(A, P, B, Q)
    if c.K <= 0:
        raise ValueError("halving is defined here for positive curvature")
    if model_distance(A, P) == 0 or model_distance(B, Q) == 0:
        raise UndefinedCosqError("bound vectors must be non-zero")
    return geodesic_midpoint(A, P), geodesic_midpoint(B, Q)
