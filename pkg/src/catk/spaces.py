"""Concrete spaces and model-space configurations, plus random generators.

Everything here is a fixture factory: the named examples carry their
expected values and a citation string so that the test-suite and the
``reproduce`` command can compare against the printed tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .conditions import SemimetricSpace
from .cosq import CASE_LABELS, QuadDistances, cosq_k, twelve_cases
from .errors import GeometryError
from .modelspace import (
    Curvature,
    ModelPoint,
    as_curvature,
    distance_coords,
    exp_coords,
    geodesic_midpoint,
    geodesic_reflect,
    origin_coords,
    point_on_side_distance,
    sample_coords,
    tangent_coords,
    tangent_norm,
)

QUAD_LABELS = ("A", "P", "B", "Q")


# -- graph metrics ------------------------------------------------------------------

def t_graph(arm: float, bar: float, p_offset: float | None = None, subdivisions: int = 0,
            glue_label: str = "O") -> SemimetricSpace:
    """Path metric of a segment ``A-O`` glued to the middle ``O`` of a segment ``B-Q``.

    ``p_offset`` adds a point ``P`` on the arm at distance ``p_offset`` from
    ``A``.  ``subdivisions`` adds that many evenly spaced interior points to
    each of the three branches (labels ``a1.., b1.., q1..``).
    """
    if arm <= 0 or bar <= 0:
        raise ValueError("arm and bar must be positive")
    if p_offset is not None and not 0 < p_offset < arm:
        raise ValueError("p_offset must lie strictly between 0 and arm")
    if subdivisions < 0:
        raise ValueError("subdivisions must be nonnegative")
    # (label, branch, distance from the glue point); branch 0 is the glue point itself
    pts: list[tuple[str, int, float]] = [("A", 1, arm)]
    if p_offset is not None:
        pts.append(("P", 1, arm - p_offset))
    pts.append((glue_label, 0, 0.0))
    pts += [("B", 2, bar / 2), ("Q", 3, bar / 2)]
    for branch, length, prefix in ((1, arm, "a"), (2, bar / 2, "b"), (3, bar / 2, "q")):
        for i in range(1, subdivisions + 1):
            pts.append((f"{prefix}{i}", branch, length * i / (subdivisions + 1)))
    labels = [p[0] for p in pts]
    branch = np.array([p[1] for p in pts])
    r = np.array([p[2] for p in pts])
    same = (branch[:, None] == branch[None, :]) | (branch[:, None] == 0) | (branch[None, :] == 0)
    D = np.where(same, np.abs(r[:, None] - r[None, :]), r[:, None] + r[None, :])
    np.fill_diagonal(D, 0.0)
    return SemimetricSpace(tuple(labels), D)


_PAIR_ORDER = ((0, 1), (2, 3), (0, 2), (1, 3), (1, 2), (0, 3))


def four_point_space(labels: Sequence[str], distances) -> SemimetricSpace:
    """Four-point space from a mapping ``{(p, q): d}`` or six values.

    Six values follow the bound-vector layout ``(x, y, a, b, d, f)`` with the
    labels read as ``(A, P, B, Q)``: ``AP, BQ, AB, PQ, PB, AQ``.
    """
    labels = tuple(labels)
    if len(labels) != 4:
        raise ValueError("expected four labels")
    D = np.zeros((4, 4))
    if isinstance(distances, Mapping):
        seen = set()
        for (p, q), v in distances.items():
            i, j = labels.index(p), labels.index(q)
            D[i, j] = D[j, i] = float(v)
            seen.add(frozenset((i, j)))
        if len(seen) != 6:
            raise ValueError("all six pairs must be given")
    else:
        vals = [float(v) for v in distances]
        if len(vals) != 6:
            raise ValueError("expected six distances")
        for (i, j), v in zip(_PAIR_ORDER, vals):
            D[i, j] = D[j, i] = v
    return SemimetricSpace(labels, D)


# -- model-space configurations ----------------------------------------------------------

def _plane_point(c: Curvature, v) -> np.ndarray:
    """``exp`` at the origin of a 2D tangent vector."""
    c = as_curvature(c)
    v = np.asarray(v, dtype=float)
    if c.K == 0:
        return v.copy()
    return exp_coords(c, origin_coords(c, 2), np.append(v, 0.0))


def _unit_toward(c: Curvature, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    t = Y - X if c.K == 0 else tangent_coords(c, X, Y)
    n = float(tangent_norm(c, t))
    if n == 0:
        raise GeometryError("direction undefined for coincident points")
    return t / n


def _base_pair(c: Curvature, ab: float):
    """``A``, ``B`` symmetric about the origin along the first axis, and the
    unit tangent at ``A`` toward ``B`` plus the common normal direction."""
    A = _plane_point(c, (-ab / 2, 0.0))
    B = _plane_point(c, (ab / 2, 0.0))
    e = _unit_toward(c, A, B)
    n = np.zeros_like(A)
    n[1] = 1.0
    return A, B, e, n


def _check_base(c: Curvature, ab: float, *sides: float) -> None:
    if min(ab, *sides) <= 0:
        raise ValueError("lengths must be positive")
    # keeps every point within pi/(2 kappa) of the midpoint of AB
    if c.K > 0 and ab / 2 + max(sides) >= 0.5 * c.pi_over_kappa:
        raise ValueError("ab/2 + max(ap, bq) must stay below pi/(2 kappa)")


def symmetric_spherical_quad(c, ab: float, ap: float, theta: float,
                             eps: float = 0.0) -> SemimetricSpace:
    """``A, P, B, Q`` on ``S_K`` with ``Q`` the reflection of ``P`` through the
    midpoint of ``AB``; ``d(P, Q)`` is then increased by ``eps``.

    ``P`` sits at distance ``ap`` from ``A`` making angle ``theta`` with ``AB``.
    """
    c = as_curvature(c)
    if c.K <= 0:
        raise ValueError("symmetric_spherical_quad needs K > 0")
    if not (0 < ab < c.pi_over_kappa and 0 < ap < c.pi_over_kappa):
        raise ValueError("ab and ap must lie in (0, pi/kappa)")
    A, B, e, n = _base_pair(c, ab)
    P = exp_coords(c, A, ap * (math.cos(theta) * e + math.sin(theta) * n))
    O = geodesic_midpoint(ModelPoint(A, c), ModelPoint(B, c))
    Q = geodesic_reflect(ModelPoint(P, c), O).coords
    X = np.stack([A, P, B, Q])
    D = distance_coords(c, X[:, None, :], X[None, :, :])
    np.fill_diagonal(D, 0.0)
    D[1, 3] += eps
    D[3, 1] += eps
    return SemimetricSpace(QUAD_LABELS, D)


def levi_civita_trapezoid(c, ab: float, ap: float, bq: float, theta: float,
                          orientation: int = 1) -> tuple[ModelPoint, ...]:
    """Points ``(A, P, B, Q)`` of a Levi-Civita trapezoid in the model plane.

    ``orientation=+1`` makes ``exp_B^-1(Q)`` the parallel transport of
    ``exp_A^-1(P)`` along ``AB`` (cosine ``+1``); ``-1`` reverses it (cosine
    ``-1``).  The transport is realised by reflecting ``P`` through the
    midpoint ``O`` of ``AB``: the direction ``B -> P'`` is minus the
    transported direction of ``A -> P``.
    """
    c = as_curvature(c)
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    _check_base(c, ab, ap, bq)
    A, B, e, n = _base_pair(c, ab)
    P = exp_coords(c, A, ap * (math.cos(theta) * e + math.sin(theta) * n))
    pA, pB, pP = ModelPoint(A, c), ModelPoint(B, c), ModelPoint(P, c)
    P1 = geodesic_reflect(pP, geodesic_midpoint(pA, pB))
    u = _unit_toward(c, B, P1.coords)
    Q = exp_coords(c, B, -orientation * bq * u)
    return pA, pP, pB, ModelPoint(Q, c)


def parallelogramoid(c, e: float, f: float, phi: float) -> tuple[ModelPoint, ...]:
    """Quadrangle ``(A, B, C, D)`` whose diagonals ``AC`` and ``BD`` bisect each other.

    ``e`` and ``f`` are the diagonal lengths and ``phi`` the angle between
    them at the common midpoint.  Equivalently ``AD = CB`` with
    ``cosq(AD, CB) = -1``, the boundary case of the K-Euler inequality
    (the midpoint distance ``g`` is zero).
    """
    c = as_curvature(c)
    if e <= 0 or f <= 0:
        raise ValueError("diagonals must be positive")
    if c.K > 0 and max(e, f) >= c.pi_over_kappa:
        raise ValueError("diagonals must stay below pi/kappa")
    u = np.array([math.cos(phi), math.sin(phi)])
    pts = [_plane_point(c, (-e / 2, 0.0)), _plane_point(c, -f / 2 * u),
           _plane_point(c, (e / 2, 0.0)), _plane_point(c, f / 2 * u)]
    return tuple(ModelPoint(p, c) for p in pts)


def convex_quadrangle(c, rng: np.random.Generator, spread: float = 0.9) -> tuple[ModelPoint, ...]:
    """Random convex quadrangle in cyclic order.

    Vertices are drawn on a circle in a geodesic chart (gnomonic for
    ``K > 0``, Klein for ``K < 0``), where geodesics are straight lines, so
    convex position is preserved.  ``spread`` is the chart radius; it must
    be below 1 for ``K < 0``.
    """
    c = as_curvature(c)
    angles = np.sort(rng.uniform(0, 2 * np.pi, 4))
    gaps = np.diff(np.append(angles, angles[0] + 2 * np.pi))
    while gaps.max() >= np.pi or gaps.min() < 0.2:
        angles = np.sort(rng.uniform(0, 2 * np.pi, 4))
        gaps = np.diff(np.append(angles, angles[0] + 2 * np.pi))
    radius = spread * rng.uniform(0.3, 1.0)
    centre = rng.uniform(-1, 1, 2) * (spread - radius) / math.sqrt(2)
    uv = centre + radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    if c.K == 0:
        return tuple(ModelPoint(p, c) for p in uv)
    k = c.kappa
    h = np.concatenate([uv, np.ones((4, 1))], axis=1)
    if c.K > 0:
        X = h / (k * np.linalg.norm(h, axis=1, keepdims=True))
    else:
        if np.any(np.sum(uv * uv, axis=1) >= 1):
            raise ValueError("spread must keep the chart inside the unit disk")
        X = h / (k * np.sqrt(1 - np.sum(uv * uv, axis=1)))[:, None]
    return tuple(ModelPoint(p, c) for p in X)


# -- random spaces ------------------------------------------------------------------

def _is_metric(D: np.ndarray, tol: float = 0.0) -> bool:
    return bool(np.all(D[:, None, :] <= D[:, :, None] + D[None, :, :] + tol))


def random_metric_space(n: int, rng: np.random.Generator, max_dist: float,
                        min_frac: float = 0.2) -> SemimetricSpace:
    """Random metric with entries in ``[min_frac * max_dist, max_dist]``, by rejection."""
    if n < 1:
        raise ValueError("n must be positive")
    iu = np.triu_indices(n, 1)
    while True:
        lo = max_dist * rng.uniform(min_frac, 0.6)
        D = np.zeros((n, n))
        D[iu] = rng.uniform(lo, max_dist, len(iu[0]))
        D = D + D.T
        if _is_metric(D):
            return SemimetricSpace(tuple(f"p{i}" for i in range(n)), D)


def model_space_sample(c, n: int, rng: np.random.Generator, diam_cap: float | None = None,
                       dim: int = 2) -> SemimetricSpace:
    c = as_curvature(c)
    X = sample_coords(c, n, rng, diam_cap, dim)
    D = distance_coords(c, X[:, None, :], X[None, :, :])
    np.fill_diagonal(D, 0.0)
    return SemimetricSpace(tuple(f"p{i}" for i in range(n)), D)


def random_violating_semimetric(n: int, rng: np.random.Generator, max_dist: float,
                                excess: tuple[float, float] = (0.05, 0.5)) -> SemimetricSpace:
    """A metric on ``n >= 3`` points with one entry inflated past a triangle bound.

    The inflated entry stays at most ``max_dist``, so small ``max_dist`` keeps
    every triple's perimeter short.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    while True:
        base = random_metric_space(n, rng, 0.45 * max_dist).dist.copy()
        i, j = rng.choice(n, 2, replace=False)
        via = [k for k in range(n) if k not in (i, j)]
        bound = min(base[i, k] + base[k, j] for k in via)
        new = bound + rng.uniform(*excess) * bound
        if new <= max_dist:
            base[i, j] = base[j, i] = new
            return SemimetricSpace(tuple(f"p{i}" for i in range(n)), base)


# -- named worked examples ---------------------------------------------------------------

@dataclass(frozen=True)
class Expectation:
    """One printed or closed-form value and how to recompute it."""

    label: str
    expected: float
    tol: float
    citation: str
    compute: Callable[[], float] = field(repr=False, compare=False)
    printed: str | None = None

    def evaluate(self) -> tuple[float, bool]:
        value = float(self.compute())
        return value, abs(value - self.expected) <= self.tol


@dataclass(frozen=True)
class NamedExample:
    name: str
    space: SemimetricSpace
    curvature: Curvature
    citation: str
    expectations: tuple[Expectation, ...] = ()
    verdicts: Mapping[str, str] = field(default_factory=dict)
    note: str = ""


def printed_tolerance(printed: str) -> float:
    """Half a unit in the last printed decimal."""
    decimals = len(printed.split(".")[1]) if "." in printed else 0
    return 0.5 * 10.0 ** (-decimals)


def _table(prefix: str, c: Curvature, dist4, printed: Sequence[str], citation: str):
    table = lambda: twelve_cases(c, dist4)  # noqa: E731
    out = []
    for label, text in zip(CASE_LABELS, printed):
        out.append(Expectation(f"{prefix} case {label}", float(text), printed_tolerance(text),
                               citation, lambda label=label: table()[label], text))
    return out


def _pair_value(c: Curvature, s: SemimetricSpace, v1: str, v2: str) -> float:
    """``cosq`` of bound vectors given as two-letter label strings like ``"AP"``."""
    D, ix = s.dist, s.index
    U, V, W, Z = ix(v1[0]), ix(v1[1]), ix(v2[0]), ix(v2[1])
    return cosq_k(c, QuadDistances(D[U, V], D[W, Z], D[U, W], D[V, Z], D[V, W], D[U, Z]))


TABLE2 = ("1.496", "1.496", "-0.58", "1.496", "-0.58", "1.496",
          "-0.58", "-0.58", "-0.58", "-0.58", "1.496", "1.496")
TABLE3 = ("-1.168", "0.826", "0.871", "-0.107", "0.707", "-1.084",
          "0.826", "-1.404", "-1.202", "-0.107", "0.871", "0.707")
TABLE4 = ("1.0347", "-0.8133", "0.7495", "-0.9998", "0.4534", "-0.9133",
          "-0.8133", "0.1465", "-0.9511", "-0.9998", "0.7495", "0.4534")
TABLE5 = ("-1.184", "0.922", "0.522", "-0.944", "0.807", "-1.008",
          "0.922", "-1.077", "-1.003", "-0.944", "0.522", "0.807")
TABLE6 = ("0.0012", "0.2048", "-0.2865", "0.6466", "-0.2865", "0.2841",
          "0.0012", "0.2048", "0.6466", "0.2841", "-0.4756", "-0.4756")
TABLE7 = ("-0.0106", "-0.1647", "-0.6208", "0.3287", "-0.6208", "0.6406",
          "-0.0106", "-0.1647", "0.3287", "0.6406", "-0.4887", "-0.4887")

# relabelling of the five-point example into the bound-vector roles (A, P, B, Q)
CONCL_ROLES = {"A": "A", "P": "B", "B": "O", "Q": "C"}
CONCL_DISTANCES = {("A", "B"): 0.8, ("B", "C"): 1.0, ("C", "O"): 0.95,
                   ("A", "O"): 0.4, ("B", "O"): 0.4, ("A", "C"): 1.0}


def concl_space() -> SemimetricSpace:
    """Four-point space on ``A, B, C, O``, in that label order."""
    return four_point_space(("A", "B", "C", "O"), CONCL_DISTANCES)


def _quad_matrix(s: SemimetricSpace, roles: Mapping[str, str]) -> np.ndarray:
    return s.subspace([roles[r] for r in QUAD_LABELS]).dist


def ex_counter_1(eps: float, subdivisions: int = 0) -> NamedExample:
    c = Curvature(1.0)
    s = t_graph(math.pi / 4 + eps, math.pi / 2 + 2 * eps, p_offset=eps, subdivisions=subdivisions)
    cite = "Example 4.2"
    a = (1 + math.sin(2 * eps)) / (1 - math.sin(2 * eps))
    b = -(1 + math.sin(2 * eps)) * math.cos(eps) / ((1 - math.sin(eps)) * math.cos(2 * eps))
    return NamedExample(
        f"ex_counter_1(eps={eps:g})", s, c, cite,
        (Expectation("cosq(BQ,AP)", a, 1e-12, f"{cite}(a)", lambda: _pair_value(c, s, "BQ", "AP")),
         Expectation("cosq(BQ,PA)", b, 1e-12, f"{cite}(b)", lambda: _pair_value(c, s, "BQ", "PA"))),
        {"upper": "Fails", "lower": "Fails"},
    )


def registry(eps: float = 0.1, subdivisions: int = 0) -> list[NamedExample]:
    """Every worked example with its expected values and citations.

    ``subdivisions`` densifies the full T-graph examples; labelled distances
    are unchanged, so only the verdict scans see the extra points.
    """
    out = [ex_counter_1(eps, subdivisions)]

    c1, cm1 = Curvature(1.0), Curvature(-1.0)
    arm = math.pi / 4 + 0.1
    tg = t_graph(arm, 2 * arm, glue_label="P").subspace(QUAD_LABELS)
    out.append(NamedExample("exfpc_pos_a", tg, c1, "Table 2",
                            tuple(_table("Table 2", c1, tg.dist, TABLE2, "Table 2")),
                            {"upper": "Fails", "lower": "Holds"}))

    sq = symmetric_spherical_quad(c1, *SYMMETRIC_QUAD_PARAMS, eps=0.1)
    out.append(NamedExample(
        "exfpc_pos_b_qualitative", sq, c1, "Table 3",
        tuple(_table("Table 3", c1, sq.dist, TABLE3, "Table 3 (fitted parameters)")),
        {"upper": "Holds", "lower": "Fails"},
        "the figure's distances are not printed; (ab, ap, theta) = (pi/2, pi/4, pi/2) "
        "was recovered by a least-squares fit to the table and reproduces it",
    ))

    qa = four_point_space(QUAD_LABELS, (1, 1, 2, 2.697, 2.44, 2.44))
    out.append(NamedExample("exfpc_neg_a", qa, cm1, "Table 4",
                            tuple(_table("Table 4", cm1, qa.dist, TABLE4, "Table 4")),
                            {"upper": "Fails", "lower": "Holds"}))
    qb = four_point_space(QUAD_LABELS, (1, 1, 2, 3.027, 2.43, 2.43))
    out.append(NamedExample("exfpc_neg_b", qb, cm1, "Table 5",
                            tuple(_table("Table 5", cm1, qb.dist, TABLE5, "Table 5")),
                            {"upper": "Holds", "lower": "Fails"}))

    cs = concl_space()
    m = _quad_matrix(cs, CONCL_ROLES)
    ex = _table("Table 6", c1, m, TABLE6, "Table 6") + _table("Table 7", cm1, m, TABLE7, "Table 7")
    ex.append(Expectation("midpoint distance K=1", 0.9439, 5e-4, "concluding example",
                          lambda: point_on_side_distance(c1, 1.0, 1.0, 0.8, 0.5), "0.9439"))
    ex.append(Expectation("midpoint distance K=-1", 0.8944, 5e-4, "concluding example",
                          lambda: point_on_side_distance(cm1, 1.0, 1.0, 0.8, 0.5), "0.8944"))
    out.append(NamedExample("concl_remarks", cs, c1, "Tables 6 and 7", tuple(ex),
                            {"upper": "Holds", "lower": "Holds"}))

    t0 = t_graph(math.pi / 4, math.pi / 2, subdivisions=subdivisions)
    out.append(NamedExample(
        "ex_to_extr_th", t0, c1, "Example 7.2",
        (Expectation("cosq(PO,BQ) with P=A", 1.0, 1e-12, "Example 7.2",
                     lambda: _pair_value(c1, t0, "AO", "BQ"), "1"),),
        note="at eps=0 the point P of the T-graph coincides with A",
    ))
    return out


def get_example(name: str) -> NamedExample:
    for ex in registry():
        if ex.name == name or ex.name.split("(")[0] == name:
            return ex
    raise KeyError(name)


def example_names() -> list[str]:
    return [ex.name.split("(")[0] for ex in registry()]


# (ab, ap, theta) recovered by a least-squares fit of the symmetric construction to TABLE3
SYMMETRIC_QUAD_PARAMS = (math.pi / 2, math.pi / 4, math.pi / 2)
