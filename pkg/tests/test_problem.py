import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from porcellio import (Continuous, Grid, PenaltyParams, Problem, evaluate_constraints,
                       himmelblau, indicator, penalized_cost, pressure_vessel,
                       split_double_sided)

PV_PSA_ROW = (0.8125, 0.4375, 42.0952, 176.8095)
PV_FASTF_ROW = (0.7782, 0.3846, 40.3196, 200.0)
HB_PSA_ROW = (79.9377, 33.8881, 28.5029, 41.3052, 41.7704)
HB_COVGA_ROW = (78.00, 33.00, 29.995, 45.00, 36.776)

finite = st.floats(-1e3, 1e3, allow_nan=False)


def one_constraint(g_value, f_value=0.0):
    return Problem(objective=lambda x: f_value + 0 * x[..., 0],
                   constraints=(lambda x: g_value + 0 * x[..., 0],),
                   domains=(Continuous(-1, 1),))


@pytest.mark.parametrize("g, expected", [(0.5, 1), (0.0, 0), (-3.2, 0)])
def test_indicator(g, expected):
    assert indicator(g) == expected


def test_indicator_vectorized():
    assert indicator(np.array([1.0, 0.0, -1.0])).tolist() == [1.0, 0.0, 0.0]


def test_penalized_cost_single_constraint():
    assert penalized_cost(one_constraint(2.0), [0.0], PenaltyParams(10)) == 40.0


def test_penalized_cost_pressure_vessel_psa_row():
    pv = pressure_vessel()
    cost = penalized_cost(pv, PV_PSA_ROW, PenaltyParams(1e12))
    assert cost == float(pv.evaluate(np.array(PV_PSA_ROW))[0])
    assert cost == pytest.approx(6063.2118, abs=1.0)


def test_penalty_params_reject_nonpositive():
    with pytest.raises(ValueError):
        PenaltyParams(0.0)


def test_evaluate_constraints_psa_row():
    rep = evaluate_constraints(pressure_vessel(), PV_PSA_ROW)
    g1, g2, _, g4 = rep.values
    assert g1 == pytest.approx(-6.26e-5, abs=1e-6)
    assert g2 == pytest.approx(-0.0359, abs=1e-4)
    assert g4 == pytest.approx(-63.1905, abs=1e-12)
    assert rep.feasible and rep.violated == [False] * 4


def test_evaluate_constraints_fastf_row_flags_g2_g3():
    rep = evaluate_constraints(pressure_vessel(), PV_FASTF_ROW)
    assert rep.violated == [False, True, True, False]
    assert not rep.feasible


def test_boundary_counts_as_feasible():
    rep = evaluate_constraints(one_constraint(0.0), [0.5])
    assert rep.feasible and rep.violated == [False]


def test_off_grid_point_is_not_feasible():
    # constraints satisfied, but x1 is not a multiple of 0.0625
    rep = evaluate_constraints(pressure_vessel(), (0.8, 0.4375, 40.0, 200.0))
    assert not rep.admissible and not rep.feasible


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        penalized_cost(pressure_vessel(), [1.0, 2.0])


def test_split_double_sided_himmelblau_psa_row():
    x = np.array(HB_PSA_ROW)
    g2 = himmelblau().clauses[1].func
    assert g2(x) == pytest.approx(100.4943, abs=1e-3)
    lo, hi = split_double_sided(g2, 90, 110)
    assert lo(x) <= 0 and hi(x) <= 0


def test_split_double_sided_covga_row_lower_violated():
    g3 = himmelblau().clauses[2].func
    lo, hi = split_double_sided(g3, 20, 25)
    assert lo(np.array(HB_COVGA_ROW)) == pytest.approx(1e-4, abs=5e-5)
    assert lo(np.array(HB_COVGA_ROW)) > 0


def test_split_degenerate_interval():
    lo, hi = split_double_sided(lambda x: 5.0, 5, 5)
    assert lo(None) == 0 and hi(None) == 0


def test_split_rejects_inverted_bounds():
    with pytest.raises(ValueError):
        split_double_sided(lambda x: x, 3, 1)


def test_split_feasibility_equivalence_random():
    rng = np.random.default_rng(11)
    g = lambda x: x[..., 0] * x[..., 1] - x[..., 2]  # noqa: E731
    lo, hi = split_double_sided(g, -2.0, 3.0)
    X = rng.uniform(-4, 4, size=(10_000, 3))
    both = (lo(X) <= 0) & (hi(X) <= 0)
    inside = (-2.0 <= g(X)) & (g(X) <= 3.0)
    assert np.array_equal(both, inside)


@given(st.lists(finite, min_size=1, max_size=6), finite)
def test_penalty_dominates_objective(gs, f):
    prob = Problem(objective=lambda x: f + 0 * x[..., 0],
                   constraints=tuple((lambda v: lambda x: v + 0 * x[..., 0])(v) for v in gs),
                   domains=(Continuous(0, 1),))
    cost = penalized_cost(prob, [0.5])
    assert cost >= f
    if all(v <= 0 for v in gs):
        assert cost == f


@given(st.floats(1e-3, 1e3), st.floats(1.0, 1e6), st.floats(1e-3, 50))
def test_penalty_monotone_in_gamma(g1, factor, g2):
    prob = one_constraint(g1 + g2)
    a = penalized_cost(prob, [0.0], PenaltyParams(1.0))
    b = penalized_cost(prob, [0.0], PenaltyParams(factor))
    assert b >= a


@settings(max_examples=200)
@given(st.tuples(*(st.floats(0.0625, 99 * 0.0625) for _ in range(2)),
                 st.floats(10, 200), st.floats(10, 200)))
def test_feasible_points_cost_is_objective_bitwise(x):
    pv = pressure_vessel()
    x = np.array(x)
    rep = evaluate_constraints(pv, x)
    if not any(rep.violated):
        assert penalized_cost(pv, x) == float(pv.evaluate(x)[0])


def test_scalar_callables_supported():
    prob = Problem(objective=lambda x: float(x[0] ** 2),
                   constraints=(lambda x: float(x[0] - 1),),
                   domains=(Continuous(-3, 3),), vectorized=False)
    assert penalized_cost(prob, [2.0], PenaltyParams(10)) == 4 + 10
    assert penalized_cost(prob, np.array([[0.5], [2.0]]), PenaltyParams(10)).tolist() == [0.25, 14]


def test_domain_validation():
    with pytest.raises(ValueError):
        Continuous(2, 1)
    with pytest.raises(ValueError):
        Grid(0.0, 1, 2)
    with pytest.raises(ValueError):
        Grid(0.1, 5, 2)
