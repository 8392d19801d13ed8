"""Decision procedures for four-point curvature conditions on finite data.

Every scan is vectorized over one fixed leading index at a time.  Chunks
are independent, so they may be farmed out to worker threads; the
reduction (counts, max margin, witness selection) is order-independent and
witnesses are sorted canonically, so reports do not depend on ``jobs``.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .cosq import ORDER_TO_CASE, admissible, cosq_values
from .errors import MalformedSpaceError
from .modelspace import DEFAULT_TOL, Curvature, ModelPoint, as_curvature, distance_coords


@dataclass(frozen=True, eq=False)
class SemimetricSpace:
    """Finite set of labelled points with a symmetric, positive-definite distance."""

    labels: tuple[str, ...]
    dist: np.ndarray

    def __post_init__(self):
        labels = tuple(str(lab) for lab in self.labels)
        D = np.array(self.dist, dtype=float)
        n = len(labels)
        if len(set(labels)) != n:
            raise MalformedSpaceError("labels must be unique")
        if D.shape != (n, n):
            raise MalformedSpaceError(f"expected a {n}x{n} matrix, got shape {D.shape}")
        if not np.all(np.isfinite(D)):
            raise MalformedSpaceError("distances must be finite")
        scale = max(1.0, float(np.abs(D).max(initial=0.0)))
        if np.any(np.abs(D - D.T) > 1e-12 * scale):
            i, j = np.argwhere(np.abs(D - D.T) > 1e-12 * scale)[0]
            raise MalformedSpaceError(
                f"matrix is not symmetric: d({labels[i]},{labels[j]})={D[i, j]} "
                f"but d({labels[j]},{labels[i]})={D[j, i]}"
            )
        if np.any(np.diag(D) != 0):
            raise MalformedSpaceError("diagonal entries must be zero")
        off = ~np.eye(n, dtype=bool)
        if np.any(D[off] <= 0):
            raise MalformedSpaceError("distinct points must be at positive distance")
        D = 0.5 * (D + D.T)
        D.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", D)

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def d(self, p: str, q: str) -> float:
        return float(self.dist[self.index(p), self.index(q)])

    def subspace(self, labels: Sequence[str]) -> "SemimetricSpace":
        idx = [self.index(lab) for lab in labels]
        return SemimetricSpace(tuple(labels), self.dist[np.ix_(idx, idx)])

    def diameter(self) -> float:
        return float(self.dist.max(initial=0.0))

    @classmethod
    def from_points(cls, points: Sequence[ModelPoint],
                    labels: Sequence[str] | None = None) -> "SemimetricSpace":
        c = points[0].curvature
        X = np.stack([p.coords for p in points])
        D = distance_coords(c, X[:, None, :], X[None, :, :])
        np.fill_diagonal(D, 0.0)
        if labels is None:
            labels = [f"p{i}" for i in range(len(points))]
        return cls(tuple(labels), D)


class Verdict(enum.Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    VACUOUS = "Vacuous"


class Witness(NamedTuple):
    points: tuple[str, ...]
    case: str
    value: float
    margin: float


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of a scan.

    ``admissible_count`` counts configurations inside the condition's domain;
    ``certified_count`` of those were not evaluated because they only involve
    a triple that embeds in the model plane, where the bound is automatic.
    ``skipped_count`` counts configurations outside the domain.
    """

    condition: str
    verdict: Verdict
    worst_margin: float
    witnesses: tuple[Witness, ...]
    admissible_count: int
    skipped_count: int
    violation_count: int = 0
    certified_count: int = 0

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "verdict": self.verdict.value,
            "worst_margin": _json_float(self.worst_margin),
            "admissible": self.admissible_count,
            "skipped": self.skipped_count,
            "certified": self.certified_count,
            "violations": self.violation_count,
            "witnesses": [
                {"points": list(w.points), "case": w.case, "value": _json_float(w.value),
                 "margin": _json_float(w.margin)}
                for w in self.witnesses
            ],
        }


def _json_float(v: float):
    return None if not math.isfinite(v) else float(v)


# -- scan plumbing ------------------------------------------------------------

@dataclass
class _Partial:
    admissible: int = 0
    skipped: int = 0
    certified: int = 0
    violations: int = 0
    worst: float = -math.inf
    candidates: list = field(default_factory=list)


def _top(margins: np.ndarray, limit: int | None) -> np.ndarray:
    """Indices of the largest margins, keeping every tie at the cut-off."""
    if limit is None or len(margins) <= limit:
        return np.arange(len(margins))
    if limit == 0:
        return np.arange(0)
    cut = np.partition(margins, len(margins) - limit)[len(margins) - limit]
    return np.flatnonzero(margins >= cut)


def _merge(name: str, parts: list[_Partial], limit: int | None,
           vacuous_if_empty: bool = True) -> ConditionReport:
    total = _Partial()
    for p in parts:
        total.admissible += p.admissible
        total.skipped += p.skipped
        total.certified += p.certified
        total.violations += p.violations
        total.worst = max(total.worst, p.worst)
        total.candidates.extend(p.candidates)
    wits = sorted(total.candidates, key=lambda w: (-w.margin, w.points, w.case))
    if limit is not None:
        wits = wits[:limit]
    if total.admissible == 0 and vacuous_if_empty:
        verdict = Verdict.VACUOUS
    elif total.violations:
        verdict = Verdict.FAILS
    else:
        verdict = Verdict.HOLDS
    return ConditionReport(name, verdict, total.worst, tuple(wits), total.admissible,
                           total.skipped, total.violations, total.certified)


def _run(chunk: Callable[[int], _Partial], n: int, jobs: int | None) -> list[_Partial]:
    if jobs is None or jobs <= 1 or n < 2:
        return [chunk(i) for i in range(n)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(chunk, range(n)))


def _grid(n: int):
    J, K, L = np.indices((n, n, n)).reshape(3, -1)
    return J, K, L


def _case_label(idx: tuple[int, int, int, int]) -> str:
    if len(set(idx)) < 4:
        return "triple"
    order = sorted(idx)
    return ORDER_TO_CASE[tuple(order.index(v) for v in idx)]


# -- metric check ---------------------------------------------------------------

def check_metric(s: SemimetricSpace, tol: float = DEFAULT_TOL,
                 max_witnesses: int | None = 10) -> ConditionReport:
    """Triangle inequality over all triples.

    A witness ``(X, Y, Z)`` means ``d(X, Z) > d(X, Y) + d(Y, Z)``; its value is
    the deficit ``d(X, Z) - d(X, Y) - d(Y, Z)``.
    """
    D = s.dist
    n = s.n
    parts = []
    for i in range(n):
        p = _Partial()
        for k in range(i + 1, n):
            js = np.array([j for j in range(n) if j != i and j != k], dtype=int)
            if js.size == 0:
                continue
            deficit = D[i, k] - D[i, js] - D[js, k]
            p.admissible += js.size
            p.worst = max(p.worst, float(deficit.max()))
            bad = np.flatnonzero(deficit > tol)
            p.violations += bad.size
            for b in bad:
                j = int(js[b])
                p.candidates.append(Witness((s.labels[i], s.labels[j], s.labels[k]), "triangle",
                                            float(deficit[b]), float(deficit[b])))
        parts.append(p)
    return _merge("metric", parts, max_witnesses, vacuous_if_empty=False)


# -- four-point cosq conditions -----------------------------------------------------

def _triple_embeds(c: Curvature, dij, dim, djm, tol: float):
    ok = (dij <= dim + djm + tol) & (dim <= dij + djm + tol) & (djm <= dij + dim + tol)
    if c.K > 0:
        ok &= dij + dim + djm < 2 * c.pi_over_kappa
    return ok


def _scan_cosq(c, s: SemimetricSpace, tol: float, side: str, max_witnesses: int | None,
               jobs: int | None) -> ConditionReport:
    c = as_curvature(c)
    if c.K == 0:
        raise ValueError("the four-point cosq conditions are scanned for K != 0")
    D = s.dist
    n = s.n
    J, K, L = _grid(n)

    def chunk(i: int) -> _Partial:
        p = _Partial()
        mask = (J != i) & (K != L)
        j, k, l = J[mask], K[mask], L[mask]
        x, y, a = D[i, j], D[k, l], D[i, k]
        inside = admissible(c, x, y, a)
        p.skipped = int((~inside).sum())
        j, k, l, x, y, a = (v[inside] for v in (j, k, l, x, y, a))
        p.admissible = int(j.size)
        k_in = (k == i) | (k == j)
        l_in = (l == i) | (l == j)
        shared = k_in | l_in
        # configurations on at most three points are automatic when the
        # triple embeds isometrically in the model plane
        m = np.where(k_in, l, k)
        certified = shared & ((k_in & l_in) | _triple_embeds(c, D[i, j], D[i, m], D[j, m], tol))
        p.certified = int(certified.sum())
        ev = ~certified
        j, k, l, x, y, a = (v[ev] for v in (j, k, l, x, y, a))
        if j.size == 0:
            return p
        vals = cosq_values(c, x, y, a, D[j, l], D[j, k], D[i, l])
        margin = vals - 1.0 if side == "upper" else -1.0 - vals
        margin = np.where(np.isfinite(margin), margin, np.inf)
        p.worst = float(margin.max())
        bad = np.flatnonzero(margin > tol)
        p.violations = int(bad.size)
        for b in bad[_top(margin[bad], max_witnesses)]:
            idx = (i, int(j[b]), int(k[b]), int(l[b]))
            p.candidates.append(Witness(tuple(s.labels[t] for t in idx), _case_label(idx),
                                        float(vals[b]), float(margin[b])))
        return p

    return _merge(side, _run(chunk, n, jobs), max_witnesses)


def check_upper(c, s: SemimetricSpace, tol: float = DEFAULT_TOL,
                max_witnesses: int | None = 10, jobs: int | None = None) -> ConditionReport:
    """``cosq_K(AP, BQ) <= 1`` for every admissible pair of non-zero bound vectors.

    Witness points are reported in ``(A, P, B, Q)`` order; for four distinct
    points the case is the Table-1 label relative to the points' order in
    the space.  ``worst_margin = max(cosq) - 1``.
    """
    return _scan_cosq(c, s, tol, "upper", max_witnesses, jobs)


def check_lower(c, s: SemimetricSpace, tol: float = DEFAULT_TOL,
                max_witnesses: int | None = 10, jobs: int | None = None) -> ConditionReport:
    """``cosq_K(AP, BQ) >= -1`` everywhere; ``worst_margin = -1 - min(cosq)``."""
    return _scan_cosq(c, s, tol, "lower", max_witnesses, jobs)


def check_one_sided(c, s: SemimetricSpace, tol: float = DEFAULT_TOL,
                    max_witnesses: int | None = 10,
                    jobs: int | None = None) -> tuple[ConditionReport, ConditionReport, Verdict]:
    upper = check_upper(c, s, tol, max_witnesses, jobs)
    lower = check_lower(c, s, tol, max_witnesses, jobs)
    if upper.holds or lower.holds:
        verdict = Verdict.HOLDS
    elif upper.verdict is Verdict.VACUOUS and lower.verdict is Verdict.VACUOUS:
        verdict = Verdict.VACUOUS
    else:
        verdict = Verdict.FAILS
    return upper, lower, verdict


# -- Gromov curvature classes -----------------------------------------------------

class Sign(enum.Enum):
    PLUS = "+"
    MINUS = "-"

    @classmethod
    def parse(cls, value) -> "Sign":
        if isinstance(value, Sign):
            return value
        v = str(value).strip().lower()
        if v in ("+", "plus", "p"):
            return cls.PLUS
        if v in ("-", "minus", "m"):
            return cls.MINUS
        raise ValueError(f"unknown sign {value!r}")


def _gromov_terms(c: Curvature, a12, a13, a14, a23, a24, a34):
    """``(lhs, rhs)`` of the K+ inequality; membership in K+ is ``lhs <= rhs``."""
    k = c.kappa
    if c.K > 0:
        C, S = np.cos, np.sin
        lhs = ((C(k * a23) + C(k * a12) * C(k * a34)) * (1 + C(k * a14))
               - (C(k * a12) + C(k * a24)) * (C(k * a34) + C(k * a13)))
    else:
        C, S = np.cosh, np.sinh
        lhs = ((C(k * a12) + C(k * a24)) * (C(k * a34) + C(k * a13))
               - (C(k * a23) + C(k * a12) * C(k * a34)) * (1 + C(k * a14)))
    rhs = S(k * a12) * S(k * a34) * (1 + C(k * a14))
    return lhs, rhs


def gromov_membership(c, sign, m, tol: float = DEFAULT_TOL) -> bool:
    """Whether the labelled 4x4 matrix ``m`` lies in the class ``K^sign(K)``.

    ``tol`` is a relative slack on the right-hand side.  For ``K > 0`` every
    entry must also be at most ``pi/(2 kappa)``.
    """
    c = as_curvature(c)
    if c.K == 0:
        raise ValueError("Gromov classes are defined here for K != 0")
    sign = Sign.parse(sign)
    M = np.asarray(m, dtype=float)
    if M.shape != (4, 4):
        raise ValueError("expected a 4x4 matrix")
    if np.any(np.abs(M - M.T) > 0) or np.any(np.diag(M) != 0) or np.any(M < 0):
        raise ValueError("matrix must be symmetric, nonnegative, with zero diagonal")
    if c.K > 0 and M.max() > 0.5 * c.pi_over_kappa * (1 + 1e-12):
        return False
    lhs, rhs = _gromov_terms(c, M[0, 1], M[0, 2], M[0, 3], M[1, 2], M[1, 3], M[2, 3])
    if sign is Sign.MINUS:
        lhs = -lhs
    return bool(lhs <= rhs + tol * abs(rhs))


def check_gromov_class(c, sign, s: SemimetricSpace, tol: float = DEFAULT_TOL,
                       max_witnesses: int | None = 10, jobs: int | None = None) -> ConditionReport:
    """Membership of every ordered 4-tuple of distinct points.

    Witness values are ``lhs/rhs`` of the class inequality, which is the
    quadrilateral cosine of ``(P1 P2, P4 P3)``; tuples rejected by the
    ``pi/(2 kappa)`` entry bound carry the case ``entry-bound`` and their
    largest entry as value.
    """
    c = as_curvature(c)
    if c.K == 0:
        raise ValueError("Gromov classes are defined here for K != 0")
    sign = Sign.parse(sign)
    D = s.dist
    n = s.n
    J, K, L = _grid(n)
    cap = 0.5 * c.pi_over_kappa * (1 + 1e-12) if c.K > 0 else math.inf

    def chunk(i: int) -> _Partial:
        p = _Partial()
        mask = (J != i) & (K != i) & (L != i) & (J != K) & (J != L) & (K != L)
        j, k, l = J[mask], K[mask], L[mask]
        p.admissible = int(j.size)
        if j.size == 0:
            return p
        entries = np.stack([D[i, j], D[i, k], D[i, l], D[j, k], D[j, l], D[k, l]])
        lhs, rhs = _gromov_terms(c, *entries)
        if sign is Sign.MINUS:
            lhs = -lhs
        biggest = entries.max(axis=0)
        over = biggest > cap
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = lhs / rhs
        value = np.where(sign is Sign.PLUS, ratio, -ratio)
        margin = np.where(over, biggest - cap, (lhs - rhs) / np.abs(rhs))
        margin = np.where(np.isfinite(margin), margin, np.inf)
        p.worst = float(margin.max())
        bad = np.flatnonzero(over | (lhs > rhs + tol * np.abs(rhs)))
        p.violations = int(bad.size)
        for b in bad[_top(margin[bad], max_witnesses)]:
            idx = (i, int(j[b]), int(k[b]), int(l[b]))
            labels = tuple(s.labels[t] for t in idx)
            if over[b]:
                p.candidates.append(Witness(labels, "entry-bound", float(biggest[b]), float(margin[b])))
            else:
                p.candidates.append(Witness(labels, f"K{sign.value}", float(value[b]),
                                            float(margin[b])))
        return p

    return _merge(f"gromov{sign.value}", _run(chunk, n, jobs), max_witnesses)


# -- K-Euler inequality -------------------------------------------------------------

def check_k_euler(c, s: SemimetricSpace, tol: float = DEFAULT_TOL,
                  max_witnesses: int | None = 10, jobs: int | None = None) -> ConditionReport:
    """K-quadrilateral inequality over every ordered quadruple of distinct points.

    ``K > 0``: ``sum cos(k side) <= 4 cos(k AC/2) cos(k BD/2)``; ``K < 0``:
    the cosh version with ``>=``.  For ``K = 0`` the classical form
    ``AB^2 + BC^2 + CD^2 + DA^2 >= AC^2 + BD^2`` is used.  The margin is the
    signed amount of violation; it is compared with ``tol * max(1, |rhs|)``.
    Witness points are ``(A, B, C, D)``.
    """
    c = as_curvature(c)
    D = s.dist
    n = s.n
    J, K, L = _grid(n)
    k_ = c.kappa

    def chunk(i: int) -> _Partial:
        p = _Partial()
        mask = (J != i) & (K != i) & (L != i) & (J != K) & (J != L) & (K != L)
        j, k, l = J[mask], K[mask], L[mask]
        p.admissible = int(j.size)
        if j.size == 0:
            return p
        sides = (D[i, j], D[j, k], D[k, l], D[l, i])
        ac, bd = D[i, k], D[j, l]
        if c.K > 0:
            lhs = sum(np.cos(k_ * v) for v in sides)
            rhs = 4 * np.cos(k_ * ac / 2) * np.cos(k_ * bd / 2)
            margin = lhs - rhs
        elif c.K < 0:
            lhs = sum(np.cosh(k_ * v) for v in sides)
            rhs = 4 * np.cosh(k_ * ac / 2) * np.cosh(k_ * bd / 2)
            margin = rhs - lhs
        else:
            lhs = sum(v * v for v in sides)
            rhs = ac * ac + bd * bd
            margin = rhs - lhs
        scale = np.maximum(1.0, np.abs(rhs))
        rel = margin / scale
        p.worst = float(margin.max())
        bad = np.flatnonzero(rel > tol)
        p.violations = int(bad.size)
        for b in bad[_top(margin[bad], max_witnesses)]:
            idx = (i, int(j[b]), int(k[b]), int(l[b]))
            p.candidates.append(Witness(tuple(s.labels[t] for t in idx), "euler",
                                        float(lhs[b] - rhs[b]), float(margin[b])))
        return p

    return _merge("euler", _run(chunk, n, jobs), max_witnesses)


def k_euler_equality_sides(c, a: float, b: float, cc: float, dd: float, e: float, f: float,
                           g: float) -> tuple[float, float]:
    """Both sides of ``sum C(side) = 4 C(e/2) C(f/2) C(g)`` for a model quadrangle.

    ``a..dd`` are the sides in cyclic order, ``e`` and ``f`` the diagonals and
    ``g`` the distance between the diagonals' midpoints.
    """
    c = as_curvature(c)
    if c.K == 0:
        raise ValueError("the K-Euler equality is stated for K != 0")
    k = c.kappa
    C = math.cos if c.K > 0 else math.cosh
    lhs = C(k * a) + C(k * b) + C(k * cc) + C(k * dd)
    rhs = 4 * C(k * e / 2) * C(k * f / 2) * C(k * g)
    return lhs, rhs


# -- weak convexity -----------------------------------------------------------------

@dataclass(frozen=True)
class WeakConvexityReport:
    eps: float
    lam: tuple[float, float]
    pair_count: int
    failing: tuple[tuple[str, str, float], ...]
    worst_deviation: float

    @property
    def pass_fraction(self) -> float:
        if self.pair_count == 0:
            return 1.0
        return 1.0 - len(self.failing) / self.pair_count

    @property
    def passed(self) -> bool:
        return not self.failing


def weak_convexity_scan(s: SemimetricSpace, eps: float,
                        lam: float | tuple[float, float] = 0.5) -> WeakConvexityReport:
    """Finite stand-in for weak convexity: approximate division points.

    For each ordered pair ``(A, B)`` with ``L = d(A, B)`` this finds the point
    ``C`` of the space and the ratio ``lambda`` within ``lam`` (a value or a
    closed interval) minimising
    ``max(|d(A, C) - lambda L|, |d(B, C) - (1 - lambda) L|)``.
    Pairs whose best deviation exceeds ``eps`` are reported as failing.
    The scan is meaningful for metric input.
    """
    lo, hi = (lam, lam) if np.isscalar(lam) else tuple(lam)
    if not 0.0 <= lo <= hi <= 1.0:
        raise ValueError("lam must lie in [0, 1]")
    D = s.dist
    n = s.n
    failing = []
    worst = 0.0
    for i in range(n):
        js = np.array([j for j in range(n) if j != i], dtype=int)
        if js.size == 0:
            continue
        L = D[i, js][:, None]
        u = D[i][None, :] / L
        w = 1.0 - D[js] / L
        lam_star = np.clip(0.5 * (u + w), lo, hi)
        dev = L * np.maximum(np.abs(u - lam_star), np.abs(w - lam_star))
        best = dev.min(axis=1)
        worst = max(worst, float(best.max()))
        for j, b in zip(js, best):
            if b > eps:
                failing.append((s.labels[i], s.labels[j], float(b)))
    return WeakConvexityReport(float(eps), (float(lo), float(hi)), n * (n - 1),
                               tuple(failing), worst)
