"""Trigonometry and geodesics of the constant-curvature model spaces.

Points of the sphere of curvature ``K > 0`` are stored as vectors of
Euclidean norm ``1/kappa``.  Points of hyperbolic space (``K < 0``) are
stored on the upper sheet ``<p, p> = -1/kappa**2`` of Minkowski space, with
the *last* coordinate timelike.  Flat points are plain Cartesian vectors.

All distance, interpolation and reflection kernels are written for stacked
coordinate arrays of shape ``(..., m)`` so that the property suites can run
tens of thousands of configurations at once; the public functions taking
:class:`ModelPoint` objects are thin validated wrappers around them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import (
    CurvatureMismatchError,
    GeometryError,
    InconsistentSidesError,
    NoUniqueGeodesicError,
    PointInvariantError,
    ReflectionUndefinedError,
)

DEFAULT_TOL = 1e-9

# relative tolerance for "is this point on the model surface"
_SURFACE_RTOL = 1e-9


class Regime(enum.Enum):
    POSITIVE = "positive"
    ZERO = "zero"
    NEGATIVE = "negative"


@dataclass(frozen=True)
class Curvature:
    """Signed sectional curvature ``K`` of a model space."""

    K: float

    def __post_init__(self):
        K = float(self.K)
        if not math.isfinite(K):
            raise ValueError(f"curvature must be finite, got {self.K!r}")
        object.__setattr__(self, "K", K)

    @property
    def kappa(self) -> float:
        return math.sqrt(abs(self.K))

    @property
    def regime(self) -> Regime:
        if self.K > 0:
            return Regime.POSITIVE
        if self.K < 0:
            return Regime.NEGATIVE
        return Regime.ZERO

    @property
    def pi_over_kappa(self) -> float:
        """Diameter of the sphere (``inf`` unless ``K > 0``)."""
        return math.pi / self.kappa if self.K > 0 else math.inf

    def __float__(self) -> float:
        return self.K


def as_curvature(c) -> Curvature:
    return c if isinstance(c, Curvature) else Curvature(c)


# -- regime dispatch ------------------------------------------------------

def cos_hat(c, s):
    """``cos(kappa s)``, ``cosh(kappa s)`` or ``1`` depending on the regime."""
    c = as_curvature(c)
    s = np.asarray(s, dtype=float)
    if c.K > 0:
        return np.cos(c.kappa * s)
    if c.K < 0:
        return np.cosh(c.kappa * s)
    return np.ones_like(s)


def sin_hat(c, s):
    """``sin(kappa s)``, ``sinh(kappa s)``, or ``s`` itself when ``K = 0``.

    The flat branch is the ``kappa -> 0`` limit of ``sin(kappa s)/kappa``;
    every identity used here is homogeneous in this function, so the
    missing factor of ``kappa`` never matters.
    """
    c = as_curvature(c)
    s = np.asarray(s, dtype=float)
    if c.K > 0:
        return np.sin(c.kappa * s)
    if c.K < 0:
        return np.sinh(c.kappa * s)
    return s


# -- triangles ------------------------------------------------------------

class TriangleSides(NamedTuple):
    a: float
    b: float
    c: float

    def validate(self, curvature, tol: float = DEFAULT_TOL) -> None:
        """Raise :class:`InconsistentSidesError` unless the sides fit in ``S_K``."""
        curv = as_curvature(curvature)
        a, b, c = self
        if min(a, b, c) < 0:
            raise InconsistentSidesError(f"negative side in {tuple(self)}")
        if a > b + c + tol or b > a + c + tol or c > a + b + tol:
            raise InconsistentSidesError(f"triangle inequality fails for {tuple(self)}")
        if curv.K > 0 and a + b + c >= 2 * curv.pi_over_kappa + tol:
            raise InconsistentSidesError(
                f"perimeter {a + b + c} is not below 2*pi/kappa for K={curv.K}"
            )


def _half_angle_terms(c: Curvature, a, b, cc):
    # tan^2(alpha/2) = sn(s-b) sn(s-c) / (sn(s) sn(s-a)); the two products sum
    # to sn(b) sn(c), which is evaluated directly for accuracy
    s = 0.5 * (a + b + cc)
    sn = lambda u: sin_hat(c, u)  # noqa: E731
    n0 = sn(s - b) * sn(s - cc)
    n1 = sn(s) * sn(s - a)
    return n0, n1, sn(b) * sn(cc)


def angles_from_sides(c, a, b, cc):
    """Vectorized angle opposite ``a``; no validation, ill-posed input gives nan."""
    c = as_curvature(c)
    a, b, cc = (np.asarray(v, dtype=float) for v in (a, b, cc))
    n0, n1, _ = _half_angle_terms(c, a, b, cc)
    with np.errstate(invalid="ignore"):
        return 2.0 * np.arctan2(np.sqrt(np.maximum(n0, 0.0)), np.sqrt(np.maximum(n1, 0.0)))


def law_of_cosines_angle(c, sides, tol: float = DEFAULT_TOL) -> float:
    """Angle (radians) opposite side ``a`` of a model triangle with sides ``(a, b, c)``.

    Uses the half-angle form of the cosine law, which stays accurate for
    angles near 0 and near pi.  Inputs whose implied ``cos(alpha)`` lies
    outside ``[-1 - tol, 1 + tol]`` raise :class:`InconsistentSidesError`;
    values inside that band are clamped.
    """
    c = as_curvature(c)
    a, b, cc = (float(v) for v in sides)
    if b <= 0 or cc <= 0:
        raise InconsistentSidesError("sides adjacent to the angle must be positive")
    if a < 0:
        raise InconsistentSidesError("negative side")
    if c.K > 0 and max(a, b, cc) >= c.pi_over_kappa:
        raise InconsistentSidesError(f"sides must be shorter than pi/kappa = {c.pi_over_kappa}")
    n0, n1, den = (float(v) for v in _half_angle_terms(c, a, b, cc))
    cos_alpha = 1.0 - 2.0 * n0 / den
    if not (-1.0 - tol <= cos_alpha <= 1.0 + tol):
        raise InconsistentSidesError(
            f"sides {(a, b, cc)} imply cos(alpha) = {cos_alpha:.3e} for K={c.K}"
        )
    return 2.0 * math.atan2(math.sqrt(max(n0, 0.0)), math.sqrt(max(n1, 0.0)))


def law_of_cosines_side(c, b: float, cc: float, alpha: float) -> float:
    """Length of the side opposite the angle ``alpha`` enclosed by sides ``b`` and ``cc``.

    For ``K > 0`` and ``b + cc > pi/kappa`` at ``alpha = pi`` the result is the
    length of the *shortest* arc, ``2 pi/kappa - (b + cc)``.
    """
    c = as_curvature(c)
    if b < 0 or cc < 0:
        raise GeometryError("side lengths must be nonnegative")
    if not 0.0 <= alpha <= math.pi:
        raise GeometryError("alpha must lie in [0, pi]")
    if c.K > 0 and max(b, cc) >= c.pi_over_kappa:
        raise GeometryError(f"sides must be shorter than pi/kappa = {c.pi_over_kappa}")
    u, v = 0.5 * (b + cc), 0.5 * abs(b - cc)
    hs, hc = math.sin(alpha / 2) ** 2, math.cos(alpha / 2) ** 2
    k = c.kappa
    if c.K > 0:
        s2 = math.sin(k * v) ** 2 * hc + math.sin(k * u) ** 2 * hs
        c2 = math.cos(k * v) ** 2 * hc + math.cos(k * u) ** 2 * hs
        return 2.0 * math.atan2(math.sqrt(s2), math.sqrt(c2)) / k
    if c.K < 0:
        s2 = math.sinh(k * v) ** 2 * hc + math.sinh(k * u) ** 2 * hs
        return 2.0 * math.asinh(math.sqrt(s2)) / k
    return 2.0 * math.sqrt(v * v * hc + u * u * hs)


def point_on_side_distance(c, a: float, b: float, cc: float, t: float,
                           tol: float = DEFAULT_TOL) -> float:
    """Distance from ``C`` to the point ``M`` of side ``AB`` with ``AM = t * AB``.

    ``a = BC``, ``b = AC``, ``cc = AB``.  Positive curvature uses
    ``cos kl = (cos ka sin ktc + cos kb sin k(1-t)c) / sin kc``, negative
    curvature its hyperbolic twin, flat space Stewart's theorem.
    """
    c = as_curvature(c)
    if cc <= 0:
        raise GeometryError("side AB must have positive length")
    if not 0.0 <= t <= 1.0:
        raise GeometryError("t must lie in [0, 1]")
    TriangleSides(a, b, cc).validate(c, tol)
    if c.K > 0 and max(a, b, cc) >= c.pi_over_kappa:
        raise InconsistentSidesError(f"sides must be shorter than pi/kappa = {c.pi_over_kappa}")
    k = c.kappa
    if c.K == 0:
        l2 = t * a * a + (1 - t) * b * b - t * (1 - t) * cc * cc
        return math.sqrt(max(l2, 0.0))
    if c.K > 0:
        cos_l = (math.cos(k * a) * math.sin(k * t * cc)
                 + math.cos(k * b) * math.sin(k * (1 - t) * cc)) / math.sin(k * cc)
        return math.acos(_clamp_unit(cos_l, tol)) / k
    cosh_l = (math.cosh(k * a) * math.sinh(k * t * cc)
              + math.cosh(k * b) * math.sinh(k * (1 - t) * cc)) / math.sinh(k * cc)
    if cosh_l < 1.0 - tol:
        raise InconsistentSidesError(f"cosh of the distance is {cosh_l}")
    return math.acosh(max(cosh_l, 1.0)) / k


def _clamp_unit(x: float, tol: float) -> float:
    if x > 1.0 + tol or x < -1.0 - tol:
        raise InconsistentSidesError(f"cosine argument {x} outside [-1, 1]")
    return min(1.0, max(-1.0, x))


def sper_ident_residual(c, x: float, y: float, z: float, alpha: float, beta: float) -> float:
    """LHS minus RHS of the triangle identity relating ``z = BC`` to ``x``, ``y``.

    ``x = AB``, ``y = AC``, ``z = BC``; ``alpha`` is the angle at ``A`` and
    ``beta`` the angle at ``B``.  The identity is
    ``S(z) = (C(y) + C(z)) / (1 + C(x)) * S(x) cos(beta) - S(y) cos(alpha + beta)``
    with ``S, C`` the regime sine and cosine (``S(s) = s``, ``C = 1`` when flat).
    """
    c = as_curvature(c)
    S = lambda s: float(sin_hat(c, s))  # noqa: E731
    C = lambda s: float(cos_hat(c, s))  # noqa: E731
    rhs = (C(y) + C(z)) / (1.0 + C(x)) * S(x) * math.cos(beta) - S(y) * math.cos(alpha + beta)
    return S(z) - rhs


# -- coordinate kernels ---------------------------------------------------

def minkowski(X, Y):
    """Lorentzian inner product with the last coordinate timelike."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    return np.sum(X[..., :-1] * Y[..., :-1], axis=-1) - X[..., -1] * Y[..., -1]


def distance_coords(c, X, Y):
    """Geodesic distance between stacked coordinate arrays."""
    c = as_curvature(c)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    k = c.kappa
    if c.K > 0:
        U, V = X * k, Y * k
        theta = 2.0 * np.arctan2(np.linalg.norm(U - V, axis=-1), np.linalg.norm(U + V, axis=-1))
        return theta / k
    if c.K < 0:
        D = X - Y
        m = np.maximum(minkowski(D, D), 0.0)
        return 2.0 * np.arcsinh(0.5 * k * np.sqrt(m)) / k
    return np.linalg.norm(X - Y, axis=-1)


def project_coords(c, X):
    """Push coordinates back onto the model surface (removes rounding drift)."""
    c = as_curvature(c)
    X = np.asarray(X, dtype=float)
    k = c.kappa
    if c.K > 0:
        return X / (k * np.linalg.norm(X, axis=-1, keepdims=True))
    if c.K < 0:
        return X / (k * np.sqrt(-minkowski(X, X))[..., None])
    return X


def interpolate_coords(c, X, Y, t):
    """Point at signed fraction ``t`` of the way from ``X`` to ``Y`` on their geodesic.

    ``t`` outside ``[0, 1]`` extends the geodesic beyond the endpoints.
    """
    c = as_curvature(c)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    t = np.asarray(t, dtype=float)[..., None]
    if c.K == 0:
        return X + t * (Y - X)
    theta = (c.kappa * distance_coords(c, X, Y))[..., None]
    small = theta < 1e-300
    th = np.where(small, 1.0, theta)
    if c.K > 0:
        w0 = np.sin((1 - t) * th) / np.sin(th)
        w1 = np.sin(t * th) / np.sin(th)
    else:
        w0 = np.sinh((1 - t) * th) / np.sinh(th)
        w1 = np.sinh(t * th) / np.sinh(th)
    out = w0 * X + w1 * Y
    out = np.where(small, X, out)
    return project_coords(c, out)


def reflect_coords(c, P, O):
    """Point ``P'`` such that ``O`` is the midpoint of ``P P'`` (no range checks)."""
    c = as_curvature(c)
    P = np.asarray(P, dtype=float)
    O = np.asarray(O, dtype=float)
    if c.K == 0:
        return 2.0 * O - P
    k2 = c.kappa ** 2
    if c.K > 0:
        ip = np.sum(P * O, axis=-1)[..., None]
        return project_coords(c, 2.0 * k2 * ip * O - P)
    ip = minkowski(P, O)[..., None]
    return project_coords(c, -2.0 * k2 * ip * O - P)


def tangent_coords(c, O, G):
    """Project ambient vectors ``G`` onto the tangent space at ``O``."""
    c = as_curvature(c)
    O = np.asarray(O, dtype=float)
    G = np.asarray(G, dtype=float)
    if c.K == 0:
        return G
    k2 = c.kappa ** 2
    if c.K > 0:
        return G - k2 * np.sum(G * O, axis=-1)[..., None] * O
    return G + k2 * minkowski(G, O)[..., None] * O


def tangent_norm(c, V):
    c = as_curvature(c)
    V = np.asarray(V, dtype=float)
    if c.K < 0:
        return np.sqrt(np.maximum(minkowski(V, V), 0.0))
    return np.linalg.norm(V, axis=-1)


def exp_coords(c, O, V):
    """Exponential map at ``O`` applied to the tangent vectors ``V``."""
    c = as_curvature(c)
    O = np.asarray(O, dtype=float)
    V = np.asarray(V, dtype=float)
    if c.K == 0:
        return O + V
    k = c.kappa
    r = tangent_norm(c, V)[..., None]
    safe = np.where(r > 0, r, 1.0)
    if c.K > 0:
        out = np.cos(k * r) * O + np.where(r > 0, np.sin(k * r) / (k * safe), 0.0) * V
    else:
        out = np.cosh(k * r) * O + np.where(r > 0, np.sinh(k * r) / (k * safe), 0.0) * V
    return project_coords(c, out)


def origin_coords(c, dim: int = 2) -> np.ndarray:
    """Base point: ``(0, ..., 0, 1/kappa)`` when curved, the zero vector when flat."""
    c = as_curvature(c)
    if c.K == 0:
        return np.zeros(dim)
    o = np.zeros(dim + 1)
    o[-1] = 1.0 / c.kappa
    return o


def _boost(c: Curvature, centre: np.ndarray, X: np.ndarray) -> np.ndarray:
    # pure Lorentz boost taking the origin to `centre`, applied row-wise to X
    k = c.kappa
    s, t = centre[:-1] * k, centre[-1] * k
    x, x0 = X[..., :-1] * k, X[..., -1] * k
    s2 = float(s @ s)
    sx = x @ s
    coef = (t - 1.0) / s2 if s2 > 0 else 0.0
    spatial = x + (coef * sx + x0)[..., None] * s
    time = sx + t * x0
    return np.concatenate([spatial, time[..., None]], axis=-1) / k


# -- points -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ModelPoint:
    """A point of ``S_K^n`` in the embedding described in the module docstring."""

    coords: np.ndarray
    curvature: Curvature

    def __post_init__(self):
        curv = as_curvature(self.curvature)
        coords = np.array(self.coords, dtype=float)
        if coords.ndim != 1 or not np.all(np.isfinite(coords)):
            raise PointInvariantError("coordinates must be a finite 1-d vector")
        k = curv.kappa
        if curv.K > 0:
            if abs(np.linalg.norm(coords) * k - 1.0) > _SURFACE_RTOL:
                raise PointInvariantError(f"|p| must equal 1/kappa = {1 / k}")
        elif curv.K < 0:
            if coords.size < 2:
                raise PointInvariantError("hyperboloid points need at least 2 coordinates")
            q = float(minkowski(coords, coords)) * k * k
            if abs(q + 1.0) > _SURFACE_RTOL * (1.0 + k * k * float(coords @ coords)):
                raise PointInvariantError("<p, p> must equal -1/kappa^2")
            if coords[-1] <= 0:
                raise PointInvariantError("hyperboloid points need a positive last coordinate")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "curvature", curv)

    @classmethod
    def lift(cls, c, v) -> "ModelPoint":
        """Nearest model point to ``v``: rescale onto the sphere, or lift onto the hyperboloid.

        For ``K < 0`` the argument is the spatial part only; the timelike
        coordinate is solved for.
        """
        c = as_curvature(c)
        v = np.asarray(v, dtype=float)
        if c.K > 0:
            return cls(v / (c.kappa * np.linalg.norm(v)), c)
        if c.K < 0:
            t = math.sqrt(1.0 / abs(c.K) + float(v @ v))
            return cls(np.append(v, t), c)
        return cls(v, c)

    def __repr__(self) -> str:
        return f"ModelPoint({np.array2string(self.coords, precision=6)}, K={self.curvature.K:g})"


def _common_curvature(*points: ModelPoint) -> Curvature:
    c = points[0].curvature
    for p in points[1:]:
        if p.curvature != c:
            raise CurvatureMismatchError(f"curvatures {c.K} and {p.curvature.K} differ")
        if p.coords.shape != points[0].coords.shape:
            raise CurvatureMismatchError("points live in model spaces of different dimension")
    return c


def model_distance(p: ModelPoint, q: ModelPoint) -> float:
    c = _common_curvature(p, q)
    return float(distance_coords(c, p.coords, q.coords))


def geodesic_interpolate(p: ModelPoint, q: ModelPoint, t: float) -> ModelPoint:
    """Point at distance ``t * d(p, q)`` from ``p`` along the shortest from ``p`` to ``q``.

    ``t`` may leave ``[0, 1]``, in which case the geodesic is extended.
    """
    c = _common_curvature(p, q)
    if c.K > 0 and math.pi - c.kappa * model_distance(p, q) <= DEFAULT_TOL:
        raise NoUniqueGeodesicError("antipodal points have no unique shortest")
    if t == 0:
        return p
    if t == 1:
        return q
    return ModelPoint(interpolate_coords(c, p.coords, q.coords, t), c)


def geodesic_midpoint(p: ModelPoint, q: ModelPoint) -> ModelPoint:
    return geodesic_interpolate(p, q, 0.5)


def geodesic_reflect(p: ModelPoint, o: ModelPoint) -> ModelPoint:
    """Point ``p'`` with ``o`` the midpoint of the shortest ``p p'``."""
    c = _common_curvature(p, o)
    if c.K > 0 and model_distance(p, o) >= 0.5 * c.pi_over_kappa:
        raise ReflectionUndefinedError(
            f"d(p, o) must be below pi/(2 kappa) = {0.5 * c.pi_over_kappa}"
        )
    return ModelPoint(reflect_coords(c, p.coords, o.coords), c)


def angle_and_transport_oracle(A: ModelPoint, P: ModelPoint, B: ModelPoint, Q: ModelPoint,
                               tol: float = DEFAULT_TOL) -> float:
    """``-cos`` of the angle ``P'BQ``, where ``P'`` is ``P`` reflected through the midpoint of ``AB``.

    Geometric counterpart of the quadrilateral cosine: the direction of
    ``BP'`` is minus the parallel transport of the direction ``AP``.
    """
    c = _common_curvature(A, P, B, Q)
    if model_distance(A, P) == 0 or model_distance(B, Q) == 0:
        raise GeometryError("bound vectors must be non-zero")
    O = geodesic_midpoint(A, B)
    P1 = geodesic_reflect(P, O)
    sides = TriangleSides(model_distance(P1, Q), model_distance(B, P1), model_distance(B, Q))
    return -math.cos(law_of_cosines_angle(c, sides, tol))


# -- sampling ---------------------------------------------------------------

def sample_coords(c, n: int, rng: np.random.Generator, diam_cap: float | None = None,
                  dim: int = 2) -> np.ndarray:
    """Draw ``n`` model points as an ``(n, m)`` coordinate array.

    Without a cap: uniform on the sphere, or Gaussian tangent vectors of
    scale ``1/kappa`` (``1`` when flat) around a random centre.  With a
    cap, every point lies in a geodesic ball of radius ``diam_cap / 2``, so
    all pairwise distances are at most ``diam_cap``.
    """
    c = as_curvature(c)
    if n < 1:
        raise ValueError("n must be at least 1")
    if diam_cap is not None:
        if diam_cap <= 0:
            raise ValueError("diam_cap must be positive")
        if c.K > 0 and diam_cap > 0.5 * c.pi_over_kappa * (1 + 1e-12):
            raise ValueError(f"diam_cap must not exceed pi/(2 kappa) = {0.5 * c.pi_over_kappa}")
    k = c.kappa
    if c.K > 0:
        centre = rng.standard_normal(dim + 1)
        centre /= k * np.linalg.norm(centre)
        if diam_cap is None:
            g = rng.standard_normal((n, dim + 1))
            return g / (k * np.linalg.norm(g, axis=1, keepdims=True))
        out: list[np.ndarray] = []
        have = 0
        while have < n:
            g = rng.standard_normal((4 * n + 16, dim + 1))
            g /= k * np.linalg.norm(g, axis=1, keepdims=True)
            keep = g[distance_coords(c, g, centre) <= 0.5 * diam_cap]
            out.append(keep)
            have += len(keep)
        return np.concatenate(out)[:n]

    if diam_cap is None:
        scale = 1.0 / k if k > 0 else 1.0
        tangent = rng.standard_normal((n, dim)) * scale
    else:
        direction = rng.standard_normal((n, dim))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        radius = 0.5 * diam_cap * rng.random(n) ** (1.0 / dim)
        tangent = direction * radius[:, None]
    centre_t = rng.standard_normal(dim) * (0.5 / k if k > 0 else 1.0)
    if c.K == 0:
        return centre_t + tangent
    o = origin_coords(c, dim)
    pts = exp_coords(c, o, np.concatenate([tangent, np.zeros((n, 1))], axis=1))
    centre = exp_coords(c, o, np.append(centre_t, 0.0))
    return project_coords(c, _boost(c, centre, pts))


def sample_model_points(c, n: int, seed: int, diam_cap: float | None = None,
                        dim: int = 2) -> list[ModelPoint]:
    """Deterministic-for-``seed`` sample of ``n`` points of ``S_K^dim``."""
    c = as_curvature(c)
    X = sample_coords(c, n, np.random.default_rng(seed), diam_cap, dim)
    return [ModelPoint(x, c) for x in X]
