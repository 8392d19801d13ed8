import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from catk.conditions import Verdict, check_lower, check_metric, check_upper
from catk.cosq import QuadDistances, cosq_k, twelve_cases
from catk.modelspace import model_distance
from catk.spaces import (
    CONCL_DISTANCES,
    SYMMETRIC_QUAD_PARAMS,
    TABLE3,
    convex_quadrangle,
    example_names,
    four_point_space,
    get_example,
    levi_civita_trapezoid,
    printed_tolerance,
    random_metric_space,
    random_violating_semimetric,
    registry,
    symmetric_spherical_quad,
    t_graph,
)

from conftest import CURVED


def pair(s, K, v1, v2):
    ix, D = s.index, s.dist
    U, V, W, Z = ix(v1[0]), ix(v1[1]), ix(v2[0]), ix(v2[1])
    return cosq_k(K, QuadDistances(D[U, V], D[W, Z], D[U, W], D[V, Z], D[V, W], D[U, Z]))


# -- T-graph ------------------------------------------------------------------------

def test_t_graph_distances():
    s = t_graph(2.0, 3.0, p_offset=0.5)
    assert s.labels == ("A", "P", "O", "B", "Q")
    assert s.d("A", "P") == 0.5 and s.d("P", "O") == 1.5
    assert s.d("B", "Q") == 3.0 and s.d("A", "B") == 3.5 and s.d("P", "Q") == 3.0
    assert check_metric(s).holds


def test_t_graph_subdivisions_are_path_metric():
    s = t_graph(1.0, 2.0, subdivisions=3)
    assert s.n == 4 + 9
    assert check_metric(s, tol=0).holds
    assert s.d("a1", "b1") == pytest.approx(0.25 + 0.25)
    assert s.d("A", "a3") == pytest.approx(0.25)


@pytest.mark.parametrize("args", [(0, 1), (1, -1), (1, 1, 1.0), (1, 1, 0.0)])
def test_t_graph_rejects_bad_offsets(args):
    with pytest.raises(ValueError):
        t_graph(*args)


@pytest.mark.parametrize("eps", [0.01, 0.05, 0.1, 0.2])
def test_t_graph_closed_forms(eps):
    s = t_graph(math.pi / 4 + eps, math.pi / 2 + 2 * eps, p_offset=eps)
    a = (1 + math.sin(2 * eps)) / (1 - math.sin(2 * eps))
    b = -(1 + math.sin(2 * eps)) * math.cos(eps) / ((1 - math.sin(eps)) * math.cos(2 * eps))
    assert pair(s, 1, "BQ", "AP") == pytest.approx(a, abs=1e-12)
    assert pair(s, 1, "BQ", "PA") == pytest.approx(b, abs=1e-12)


def test_t_graph_printed_values():
    s = t_graph(math.pi / 4 + 0.1, math.pi / 2 + 0.2, p_offset=0.1)
    # the closed form is 1.495849 (the quoted 1.4959 is off in the last digit)
    assert pair(s, 1, "BQ", "AP") == pytest.approx(1.4959, abs=1e-4)
    assert round(pair(s, 1, "BQ", "PA"), 3) == -1.352


def test_flat_t_graph_example():
    s = t_graph(math.pi / 4, math.pi / 2)
    assert s.diameter() == pytest.approx(math.pi / 2)
    assert pair(s, 1, "AO", "BQ") == pytest.approx(1.0, abs=1e-12)


# -- four-point spaces ------------------------------------------------------------------

def test_four_point_layouts_agree():
    a = four_point_space("APBQ", (1, 1, 2, 2.697, 2.44, 2.44))
    b = four_point_space("APBQ", {("A", "P"): 1, ("B", "Q"): 1, ("A", "B"): 2,
                                  ("P", "Q"): 2.697, ("P", "B"): 2.44, ("Q", "A"): 2.44})
    np.testing.assert_array_equal(a.dist, b.dist)
    assert round(twelve_cases(-1, a.dist)["I"], 4) == 1.0347


def test_four_point_space_needs_all_pairs():
    with pytest.raises(ValueError):
        four_point_space("ABCD", {("A", "B"): 1})
    with pytest.raises(ValueError):
        four_point_space("ABCD", (1, 2, 3))


def test_concluding_space_is_metric():
    s = four_point_space(("A", "B", "C", "O"), CONCL_DISTANCES)
    assert check_metric(s).holds


# -- symmetric spherical quadruple ----------------------------------------------------------

@given(st.floats(0.1, 1.5), st.floats(0.1, 1.2), st.floats(0.05, math.pi - 0.05))
def test_symmetric_quad_is_antiparallel(ab, ap, theta):
    # P must stay within pi/2 of the midpoint of AB for the reflection
    assume(math.cos(ab / 2) * math.cos(ap) + math.sin(ab / 2) * math.sin(ap) * math.cos(theta) > 1e-6)
    s = symmetric_spherical_quad(1, ab, ap, theta)
    assert twelve_cases(1, s.dist)["I"] == pytest.approx(-1.0, abs=1e-9)


def test_symmetric_quad_reproduces_table_three():
    s = symmetric_spherical_quad(1, *SYMMETRIC_QUAD_PARAMS, eps=0.1)
    tab = twelve_cases(1, s.dist)
    for v, text in zip(tab.values, TABLE3):
        assert abs(v - float(text)) <= printed_tolerance(text)


@pytest.mark.parametrize("dab", [-0.08, 0.0, 0.08])
@pytest.mark.parametrize("dap", [-0.08, 0.0, 0.08])
@pytest.mark.parametrize("dth", [-0.08, 0.0, 0.08])
def test_table_three_verdict_pattern_is_stable(dab, dap, dth):
    # the pattern is local: far from these parameters upper usually fails too
    ab, ap, th = SYMMETRIC_QUAD_PARAMS
    s = symmetric_spherical_quad(1, ab + dab, ap + dap, th + dth, eps=0.1)
    assert check_upper(1, s).verdict is Verdict.HOLDS
    assert check_lower(1, s).verdict is Verdict.FAILS
    assert check_metric(s).holds


def test_symmetric_quad_rejects_bad_input():
    with pytest.raises(ValueError):
        symmetric_spherical_quad(-1, 1, 1, 1)
    with pytest.raises(ValueError):
        symmetric_spherical_quad(1, 3.5, 1, 1)


# -- trapezoids ----------------------------------------------------------------------------

@pytest.mark.parametrize("K", [1.0, -1.0, 0.0, 2.5])
@pytest.mark.parametrize("orientation", [1, -1])
def test_trapezoid_cosine_is_extremal(K, orientation):
    rng = np.random.default_rng(9)
    cap = 0.5 * math.pi / math.sqrt(K) if K > 0 else 2.0
    for _ in range(20):
        ab = rng.uniform(0.05, cap)
        ap, bq = rng.uniform(0.05, cap - ab / 2, 2) if K > 0 else rng.uniform(0.05, 2.0, 2)
        pts = levi_civita_trapezoid(K, ab, ap, bq, rng.uniform(0, math.pi), orientation)
        assert cosq_k(K, QuadDistances.from_points(*pts)) == pytest.approx(orientation, abs=1e-9)


def test_collinear_trapezoid():
    A, P, B, Q = levi_civita_trapezoid(1, 0.4, 0.2, 0.3, 0.0, 1)
    assert model_distance(A, Q) == pytest.approx(0.7)
    assert model_distance(P, Q) == pytest.approx(0.5)


@pytest.mark.parametrize("K", CURVED)
def test_trapezoid_transport_matches_direct_frame(K):
    # along the first axis the normal direction is parallel, so the transported
    # direction at B is cos(theta) * (unit tangent away from A) + sin(theta) * normal
    from catk.modelspace import exp_coords, tangent_coords, tangent_norm

    ab, ap, bq, th = 0.6, 0.4, 0.5, 1.0
    A, P, B, Q = levi_civita_trapezoid(K, ab, ap, bq, th, 1)
    t = -tangent_coords(K, B.coords, A.coords)
    t = t / tangent_norm(K, t)
    n = np.zeros_like(t)
    n[1] = 1.0
    ref = exp_coords(K, B.coords, bq * (math.cos(th) * t + math.sin(th) * n))
    np.testing.assert_allclose(Q.coords, ref, atol=1e-12)


def test_trapezoid_rejects_long_sides():
    with pytest.raises(ValueError):
        levi_civita_trapezoid(1, 1.5, 1.0, 0.2, 0.3)
    with pytest.raises(ValueError):
        levi_civita_trapezoid(-1, 1.0, 1.0, 1.0, 0.3, orientation=0)


@pytest.mark.parametrize("K", CURVED)
def test_convex_quadrangle_is_convex(K):
    from catk.modelspace import distance_coords, interpolate_coords

    rng = np.random.default_rng(1)
    ts = np.linspace(0, 1, 801)
    for _ in range(10):
        A, B, C, D = (p.coords for p in convex_quadrangle(K, rng))
        # the diagonals cross: some point of AC is also on BD
        X = np.array([interpolate_coords(K, A, C, t) for t in ts])
        Y = np.array([interpolate_coords(K, B, D, t) for t in ts])
        assert distance_coords(K, X[:, None], Y[None]).min() < 5e-3


# -- random generators ---------------------------------------------------------------------

def test_random_generators():
    rng = np.random.default_rng(0)
    s = random_metric_space(6, rng, 1.5)
    assert check_metric(s, tol=0).holds and s.diameter() <= 1.5
    v = random_violating_semimetric(5, rng, 1.2)
    assert not check_metric(v).holds and v.diameter() <= 1.2


# -- registry ------------------------------------------------------------------------------

def test_registry_contents():
    names = example_names()
    assert len(names) >= 7
    for name in ("ex_counter_1", "exfpc_pos_a", "exfpc_pos_b_qualitative", "exfpc_neg_a",
                 "exfpc_neg_b", "concl_remarks", "ex_to_extr_th"):
        assert name in names
    with pytest.raises(KeyError):
        get_example("nope")


@pytest.mark.parametrize("example", registry(), ids=lambda e: e.name)
def test_registry_round_trip(example):
    assert example.citation
    for exp in example.expectations:
        assert exp.citation
        value, ok = exp.evaluate()
        assert ok, (exp.label, value, exp.expected)
    for cond, want in example.verdicts.items():
        check = check_upper if cond == "upper" else check_lower
        assert check(example.curvature, example.space, 1e-3).verdict.value == want


def test_table_entry_count():
    tables = [e for ex in registry() for e in ex.expectations if e.label.startswith("Table")]
    per_table = {t: sum(1 for e in tables if e.label.startswith(t + " "))
                 for t in ("Table 2", "Table 3", "Table 4", "Table 5", "Table 6", "Table 7")}
    assert set(per_table.values()) == {12}
