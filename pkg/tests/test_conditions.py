import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from catk.conditions import (
    SemimetricSpace,
    Sign,
    Verdict,
    check_gromov_class,
    check_k_euler,
    check_lower,
    check_metric,
    check_one_sided,
    check_upper,
    gromov_membership,
    k_euler_equality_sides,
    weak_convexity_scan,
)
from catk.errors import MalformedSpaceError
from catk.modelspace import model_distance
from catk.spaces import (
    concl_space,
    four_point_space,
    model_space_sample,
    parallelogramoid,
    random_metric_space,
    random_violating_semimetric,
    t_graph,
)

from conftest import CURVED, half_pi_cap

seeds = st.integers(0, 2**32 - 1)
QUAD = ("A", "P", "B", "Q")
NEG_A = four_point_space(QUAD, (1, 1, 2, 2.697, 2.44, 2.44))
NEG_B = four_point_space(QUAD, (1, 1, 2, 3.027, 2.43, 2.43))
ARM = math.pi / 4 + 0.1
POS_A = t_graph(ARM, 2 * ARM, glue_label="P").subspace(QUAD)
TABLE_TOL = 1e-3


def triple(a, b, c, labels=("X", "Y", "Z")):
    return SemimetricSpace(labels, [[0, a, b], [a, 0, c], [b, c, 0]])


# -- semimetric validation ----------------------------------------------------------

@pytest.mark.parametrize("labels,matrix", [
    (("a", "b"), [[0, 1], [2, 0]]),
    (("a", "b"), [[1, 1], [1, 0]]),
    (("a", "b"), [[0, 0], [0, 0]]),
    (("a", "b"), [[0, -1], [-1, 0]]),
    (("a", "b"), [[0, 1, 1], [1, 0, 1]]),
    (("a", "a"), [[0, 1], [1, 0]]),
    (("a", "b"), [[0, np.nan], [np.nan, 0]]),
])
def test_malformed_spaces_rejected(labels, matrix):
    with pytest.raises(MalformedSpaceError):
        SemimetricSpace(labels, matrix)


def test_space_is_immutable_and_subsettable():
    s = concl_space()
    with pytest.raises(ValueError):
        s.dist[0, 1] = 5
    sub = s.subspace(["O", "A"])
    assert sub.labels == ("O", "A") and sub.d("O", "A") == 0.4


# -- metric ---------------------------------------------------------------------------

def test_metric_examples():
    assert check_metric(concl_space()).verdict is Verdict.HOLDS
    assert check_metric(NEG_A).holds and check_metric(POS_A).holds
    rep = check_metric(triple(1, 3, 1))
    assert rep.verdict is Verdict.FAILS
    assert rep.witnesses[0].points == ("X", "Y", "Z")
    assert rep.witnesses[0].value == pytest.approx(1.0)


def test_tiny_spaces_are_metric():
    assert check_metric(SemimetricSpace(("a",), [[0]])).holds
    assert check_metric(SemimetricSpace(("a", "b"), [[0, 2], [2, 0]])).holds


# -- four-point conditions ------------------------------------------------------------------

def test_upper_examples():
    rep = check_upper(-1, NEG_A, TABLE_TOL)
    assert rep.verdict is Verdict.FAILS
    assert rep.witnesses[0].case == "I" and round(rep.witnesses[0].value, 4) == 1.0347
    rep = check_upper(1, concl_space(), TABLE_TOL)
    assert rep.holds and rep.worst_margin == pytest.approx(0.6466 - 1, abs=1e-4)
    rep = check_upper(1, POS_A, TABLE_TOL)
    assert rep.verdict is Verdict.FAILS and round(rep.witnesses[0].value, 3) == 1.496


def test_lower_examples():
    rep = check_lower(-1, NEG_A, TABLE_TOL)
    assert rep.holds and rep.worst_margin == pytest.approx(-1 + 0.9998, abs=1e-4)
    rep = check_lower(-1, NEG_B, TABLE_TOL)
    assert rep.verdict is Verdict.FAILS and round(rep.witnesses[0].value, 3) == -1.184
    rep = check_lower(1, POS_A, TABLE_TOL)
    assert rep.holds and rep.worst_margin == pytest.approx(-1 + 0.58, abs=5e-3)


def test_one_sided_examples():
    up, low, v = check_one_sided(-1, NEG_A, TABLE_TOL)
    assert v is Verdict.HOLDS and low.holds and not up.holds
    up, low, v = check_one_sided(-1, NEG_B, TABLE_TOL)
    assert v is Verdict.HOLDS and up.holds and not low.holds
    eps = 0.1
    tg = t_graph(math.pi / 4 + eps, math.pi / 2 + 2 * eps, p_offset=eps)
    up, low, v = check_one_sided(1, tg, TABLE_TOL)
    assert v is Verdict.FAILS
    assert up.worst_margin > 0 and low.worst_margin > 0


def test_counts_cover_every_bound_vector_pair():
    rep = check_upper(-1, NEG_A)
    assert rep.admissible_count + rep.skipped_count == 12 * 12
    assert rep.certified_count > 0


def test_vacuous_when_nothing_is_admissible():
    far = SemimetricSpace(("a", "b"), [[0, 3.5], [3.5, 0]])
    rep = check_upper(1, far)
    assert rep.verdict is Verdict.VACUOUS and rep.skipped_count == 4
    assert check_lower(-1, SemimetricSpace(("a",), [[0]])).verdict is Verdict.VACUOUS
    assert check_one_sided(1, far)[2] is Verdict.VACUOUS


def test_cosq_scans_need_curvature():
    with pytest.raises(ValueError):
        check_upper(0, NEG_A)


def test_witnesses_do_not_depend_on_partitioning():
    rng = np.random.default_rng(3)
    s = random_violating_semimetric(7, rng, 1.2)
    serial = check_lower(1, s, max_witnesses=None)
    threaded = check_lower(1, s, max_witnesses=None, jobs=4)
    assert serial == threaded
    capped = check_lower(1, s, max_witnesses=5, jobs=3)
    assert capped.witnesses == serial.witnesses[:5]
    assert capped.violation_count == serial.violation_count
    margins = [w.margin for w in serial.witnesses]
    assert margins == sorted(margins, reverse=True)


def test_model_quadruples_hold_both_ways():
    for K in CURVED:
        for seed in range(20):
            s = model_space_sample(K, 4, np.random.default_rng(seed), half_pi_cap(K), dim=3)
            assert check_upper(K, s).holds and check_lower(K, s).holds


@pytest.mark.parametrize("K", CURVED)
def test_upper_and_lower_agree_on_dense_model_samples(K):
    s = model_space_sample(K, 9, np.random.default_rng(11), half_pi_cap(K) or 2.0)
    assert check_upper(K, s).verdict is check_lower(K, s).verdict is Verdict.HOLDS


@given(seeds, st.sampled_from(CURVED), st.integers(3, 6))
def test_non_metric_fails_every_one_sided_check(seed, K, n):
    s = random_violating_semimetric(n, np.random.default_rng(seed), 1.2)
    assert not check_metric(s).holds
    up, low, v = check_one_sided(K, s)
    assert v is Verdict.FAILS
    assert up.verdict is low.verdict is Verdict.FAILS


# -- Gromov classes ---------------------------------------------------------------------

def test_membership_examples():
    s = concl_space()
    # P1 = A, P2 = B, P3 = C, P4 = O
    assert gromov_membership(1, "+", s.subspace(["A", "B", "C", "O"]).dist)
    # (P1 P2, P4 P3) = (AP, BQ)
    assert not gromov_membership(-1, Sign.PLUS, NEG_A.subspace(["A", "P", "Q", "B"]).dist)
    assert gromov_membership(-1, Sign.MINUS, NEG_A.subspace(["A", "P", "Q", "B"]).dist)
    h = math.pi / 2 + 0.01
    m = np.full((4, 4), 0.5)
    np.fill_diagonal(m, 0)
    m[0, 1] = m[1, 0] = m[2, 3] = m[3, 2] = h
    assert not gromov_membership(1, "plus", m)


def test_membership_input_checks():
    with pytest.raises(ValueError):
        gromov_membership(1, "+", np.ones((3, 3)))
    with pytest.raises(ValueError):
        gromov_membership(0, "+", np.zeros((4, 4)))
    with pytest.raises(ValueError):
        Sign.parse("sideways")


def test_gromov_class_examples():
    assert check_gromov_class(1, "+", concl_space()).holds
    rep = check_gromov_class(-1, "-", NEG_B, TABLE_TOL)
    assert rep.verdict is Verdict.FAILS and rep.witnesses[0].value < -1
    tiny = SemimetricSpace(("a", "b"), [[0, 1], [1, 0]])
    assert check_gromov_class(1, "+", tiny).verdict is Verdict.VACUOUS
    big = t_graph(1.0, 3.0)
    rep = check_gromov_class(1, "+", big)
    assert rep.verdict is Verdict.FAILS and rep.witnesses[0].case == "entry-bound"


@given(seeds, st.sampled_from(CURVED), st.integers(4, 6))
def test_gromov_matches_cosq_checkers(seed, K, n):
    rng = np.random.default_rng(seed)
    s = random_metric_space(n, rng, half_pi_cap(K) or 3.0)
    assert check_gromov_class(K, "+", s).verdict is check_upper(K, s).verdict
    assert check_gromov_class(K, "-", s).verdict is check_lower(K, s).verdict


# -- K-Euler ------------------------------------------------------------------------------

def line(*xs):
    xs = np.array(xs, dtype=float)
    return SemimetricSpace(tuple("ABCD"[: len(xs)]), np.abs(xs[:, None] - xs[None, :]))


def test_collinear_equality_form():
    lhs, rhs = k_euler_equality_sides(-1, 1, 1, 1, 3, 2, 2, 1)
    assert lhs == pytest.approx(4 * math.cosh(1) ** 3, abs=1e-12)
    assert rhs == pytest.approx(4 * math.cosh(1) ** 3, abs=1e-12)


def test_collinear_inequality_holds():
    assert check_k_euler(-1, line(0, 1, 2, 3)).holds
    assert check_k_euler(0, line(0, 1, 2, 3)).holds


@pytest.mark.parametrize("K", CURVED)
def test_euler_holds_on_model_quadruples(K):
    for seed in range(25):
        s = model_space_sample(K, 4, np.random.default_rng(seed), half_pi_cap(K), dim=3)
        assert check_k_euler(K, s).holds


def test_euler_fails_on_broken_triangle():
    s = SemimetricSpace(("X", "Y", "Z", "W"), [[0, 1, 3, 1.5], [1, 0, 1, 1.5],
                                                [3, 1, 0, 1.5], [1.5, 1.5, 1.5, 0]])
    rep = check_k_euler(-1, s)
    assert rep.verdict is Verdict.FAILS and rep.witnesses[0].margin > 0


@pytest.mark.parametrize("K", CURVED)
def test_parallelogramoid_is_on_the_boundary(K):
    A, B, C, D = parallelogramoid(K, 1.1, 0.8, 1.3)
    d = model_distance
    lhs, rhs = k_euler_equality_sides(K, d(A, B), d(B, C), d(C, D), d(D, A), d(A, C), d(B, D), 0.0)
    assert lhs == pytest.approx(rhs, abs=1e-12)
    s = SemimetricSpace(tuple("ABCD"), [[d(p, q) for q in (A, B, C, D)] for p in (A, B, C, D)])
    assert abs(check_k_euler(K, s).worst_margin) <= 1e-12


# -- weak convexity ------------------------------------------------------------------------

def test_grid_is_weakly_convex():
    rep = weak_convexity_scan(line(*np.linspace(0, 1, 11)[:4]), 0.2)
    assert rep.passed
    xs = np.linspace(0, 1, 11)
    grid = SemimetricSpace(tuple(f"g{i}" for i in range(11)), np.abs(xs[:, None] - xs[None]))
    rep = weak_convexity_scan(grid, 0.06)
    assert rep.passed and rep.pass_fraction == 1.0
    assert rep.worst_deviation == pytest.approx(0.05)


def test_two_points_are_not():
    s = SemimetricSpace(("a", "b"), [[0, 1], [1, 0]])
    assert not weak_convexity_scan(s, 0.49).passed
    assert weak_convexity_scan(s, 0.5).passed
    assert weak_convexity_scan(s, 0.1, lam=(0.0, 1.0)).passed


def test_sphere_sample_is_nearly_convex():
    s = model_space_sample(1, 500, np.random.default_rng(0), math.pi / 2)
    assert weak_convexity_scan(s, 0.15).pass_fraction >= 0.95


def test_lambda_window_validated():
    with pytest.raises(ValueError):
        weak_convexity_scan(concl_space(), 0.1, lam=(0.7, 0.2))


def test_zero_witness_cap_keeps_counts():
    s = random_violating_semimetric(5, np.random.default_rng(4), 1.2)
    full, none = check_upper(1, s), check_upper(1, s, max_witnesses=0)
    assert none.witnesses == () or none.witnesses == []
    assert (none.verdict, none.violation_count, none.worst_margin) == (
        full.verdict, full.violation_count, full.worst_margin)
