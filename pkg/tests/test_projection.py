import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from porcellio import Continuous, Grid, project_box, project_domain, project_grid

PV_DOMAINS = (Grid(0.0625, 1, 99), Grid(0.0625, 1, 99),
              Continuous(10, 200), Continuous(10, 200))


def test_box_clamps_both_sides():
    assert project_box([10, 10], [200, 200], [5, 250]).tolist() == [10, 200]


def test_box_identity_inside():
    x = np.array([12.5, 150.0])
    assert np.array_equal(project_box([10, 10], [200, 200], x), x)


def test_box_matches_bruteforce_nearest_point():
    grid = np.arange(0, 1 + 1e-12, 1e-4)
    for x in (0.37, -0.2, 1.7, 0.99995):
        nearest = grid[np.argmin(np.abs(grid - x))]
        assert project_box([0.0], [1.0], [x])[0] == pytest.approx(nearest, abs=1e-4)


def test_box_dimension_mismatch():
    with pytest.raises(ValueError):
        project_box([0, 0], [1, 1], [0.5, 0.5, 0.5])


@pytest.mark.parametrize("x, expected", [(0.80, 0.8125), (0.01, 0.0625), (7.0, 6.1875)])
def test_grid_examples(x, expected):
    assert project_grid(0.0625, 1, 99, x) == expected


def test_grid_ties_round_away_from_zero():
    assert project_grid(1.0, -5, 5, 2.5) == 3.0
    assert project_grid(1.0, -5, 5, -2.5) == -3.0


def test_grid_matches_nearest_admissible_value():
    rng = np.random.default_rng(3)
    admissible = np.arange(1, 100) * 0.0625
    for x in rng.uniform(-1, 8, size=1000):
        y = project_grid(0.0625, 1, 99, x)
        best = np.min(np.abs(admissible - x))
        assert abs(y - x) == pytest.approx(best, abs=1e-12)
        assert y in admissible


def test_domain_mixed_example():
    # 0.40 / 0.0625 = 6.4 rounds to 6, the nearest multiple is 0.375
    out = project_domain(PV_DOMAINS, [0.80, 0.40, 5.0, 250.0])
    assert out.tolist() == [0.8125, 0.375, 10.0, 200.0]


def test_domain_all_continuous_equals_box():
    rng = np.random.default_rng(5)
    doms = (Continuous(-1, 2), Continuous(0, 3), Continuous(5, 6))
    X = rng.uniform(-5, 10, size=(200, 3))
    assert np.array_equal(project_domain(doms, X),
                          project_box([-1, 0, 5], [2, 3, 6], X))


def test_domain_dimension_mismatch():
    with pytest.raises(ValueError):
        project_domain(PV_DOMAINS, [1.0, 2.0])


def _random_points(n, seed):
    rng = np.random.default_rng(seed)
    return np.column_stack([rng.uniform(-2, 8, n), rng.uniform(-2, 8, n),
                            rng.uniform(-50, 300, n), rng.uniform(-50, 300, n)])


def test_domain_idempotent_and_admissible_10k():
    X = _random_points(10_000, 17)
    Y = project_domain(PV_DOMAINS, X)
    assert np.array_equal(project_domain(PV_DOMAINS, Y), Y)
    m = Y[:, :2] / 0.0625
    assert np.all(np.abs(m - np.round(m)) == 0)
    assert np.all((Y[:, :2] >= 0.0625) & (Y[:, :2] <= 99 * 0.0625))
    assert np.all((Y[:, 2:] >= 10) & (Y[:, 2:] <= 200))


def test_domain_identity_on_admissible_points():
    rng = np.random.default_rng(23)
    n = 10_000
    X = np.column_stack([rng.integers(1, 100, n) * 0.0625, rng.integers(1, 100, n) * 0.0625,
                         rng.uniform(10, 200, n), rng.uniform(10, 200, n)])
    assert np.array_equal(project_domain(PV_DOMAINS, X), X)


@given(st.floats(1e-3, 10), st.integers(-50, 50), st.integers(0, 50),
       st.floats(-1e3, 1e3, allow_nan=False))
def test_grid_idempotent(step, lo, width, x):
    y = project_grid(step, lo, lo + width, x)
    assert project_grid(step, lo, lo + width, y) == y
