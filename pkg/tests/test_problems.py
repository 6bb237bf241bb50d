import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import central_jacobian
from paretomtl.problems import (
    Logistic3Problem,
    ShiftedProblem,
    SyntheticProblem,
    finite_diff_check,
    numerical_jacobian,
)

E = np.e


@pytest.mark.parametrize(
    "a, theta, expected",
    [
        ((1, 1), [1.0], (0.0, 1 - E**-4)),
        ((1, 1), [0.0], (1 - E**-1, 1 - E**-1)),
        ((50, 1), [-1.0], (50 - 50 * E**-4, 0.0)),
    ],
)
def test_synthetic_evaluate_examples(a, theta, expected):
    p = SyntheticProblem(d=1, a=a)
    np.testing.assert_allclose(p.evaluate(theta), expected, rtol=1e-12, atol=1e-15)


def test_synthetic_jacobian_examples():
    p = SyntheticProblem(d=1)
    J = p.jacobian([0.0])
    # frozen from the central-difference oracle (step 1e-6): -0.73575888, 0.73575888
    np.testing.assert_allclose(J, [[-2 / E], [2 / E]], rtol=1e-12)
    np.testing.assert_allclose(J, central_jacobian(p.evaluate, [0.0]), rtol=1e-8)
    assert p.jacobian([1.0])[0, 0] == 0.0


def test_dimension_mismatch_raises():
    p = SyntheticProblem(d=3)
    with pytest.raises(ValueError):
        p.evaluate(np.zeros(2))
    with pytest.raises(ValueError):
        p.jacobian(np.zeros((3, 1)))


@pytest.mark.parametrize("d, a", [(0, (1, 1)), (2, (0, 1)), (2, (1, -1)), (2.5, (1, 1))])
def test_synthetic_rejects_bad_parameters(d, a):
    with pytest.raises(ValueError):
        SyntheticProblem(d=d, a=a)


def test_finite_diff_check_synthetic_d20():
    rng = np.random.default_rng(1)
    p = SyntheticProblem(d=20)
    assert finite_diff_check(p, rng.uniform(-0.5, 0.5, 20), step=1e-6) < 1e-5


@pytest.mark.parametrize("shared", [True, False])
def test_finite_diff_check_logistic(shared):
    rng = np.random.default_rng(2)
    p = Logistic3Problem(seed=3, shared=shared)
    theta = rng.normal(0, 0.3, p.n_params)
    assert finite_diff_check(p, theta, step=1e-6) < 1e-5


def test_finite_diff_check_rejects_zero_step():
    with pytest.raises(ValueError):
        finite_diff_check(SyntheticProblem(2), np.zeros(2), step=0.0)


def test_numerical_jacobian_matches_test_oracle():
    p = Logistic3Problem(n_samples=200, n_features=4, seed=0)
    theta = np.array([0.1, -0.2, 0.3, 0.0])
    np.testing.assert_allclose(numerical_jacobian(p, theta), central_jacobian(p.evaluate, theta), rtol=1e-12)


def test_jacobian_agrees_with_fd_at_100_points():
    rng = np.random.default_rng(0)
    for p in (SyntheticProblem(20), SyntheticProblem(5, (10, 1)), Logistic3Problem(n_samples=300, seed=1)):
        errs = [finite_diff_check(p, rng.uniform(-0.5, 0.5, p.n_params)) for _ in range(100)]
        assert max(errs) < 1e-5, p


def test_logistic_losses_positive_and_shapes():
    p = Logistic3Problem(seed=0)
    assert p.X.shape == (2000, 20)
    L = p.evaluate(np.zeros(20))
    np.testing.assert_allclose(L, np.log(2.0), rtol=1e-12)
    L = p.evaluate(p.true_weights[0] * 5)
    assert np.all(L > 0)
    assert p.jacobian(np.zeros(20)).shape == (3, 20)
    assert Logistic3Problem(seed=0, shared=False).n_params == 60


def test_logistic_dataset_is_seeded():
    a, b = Logistic3Problem(seed=5), Logistic3Problem(seed=5)
    np.testing.assert_array_equal(a.X, b.X)
    np.testing.assert_array_equal(a.Y, b.Y)
    assert not np.array_equal(a.X, Logistic3Problem(seed=6).X)


def test_shifted_problem():
    base = SyntheticProblem(3)
    p = ShiftedProblem(base, [1.0, 2.0])
    theta = np.array([0.1, 0.2, 0.3])
    np.testing.assert_array_equal(p.evaluate(theta), base.evaluate(theta) + [1.0, 2.0])
    np.testing.assert_array_equal(p.jacobian(theta), base.jacobian(theta))
    with pytest.raises(ValueError):
        ShiftedProblem(base, [1.0])


def test_pareto_set_distance():
    p = SyntheticProblem(4)
    assert p.distance_to_pareto_set(0.3 * p.center) == pytest.approx(0.0, abs=1e-15)
    assert p.distance_to_pareto_set(2 * p.center) == pytest.approx(1.0)


def test_gradients_vanish_only_on_segment_combination():
    # on the Pareto segment the two gradients are anti-parallel
    p = SyntheticProblem(6)
    J = p.jacobian(0.2 * p.center)
    cos = J[0] @ J[1] / np.linalg.norm(J[0]) / np.linalg.norm(J[1])
    assert cos == pytest.approx(-1.0, abs=1e-12)


thetas = arrays(np.float64, 5, elements=st.floats(-3, 3, allow_nan=False))


@settings(max_examples=100, deadline=None)
@given(thetas, st.floats(0.1, 60), st.floats(0.1, 60))
def test_synthetic_losses_in_range_and_deterministic(theta, a1, a2):
    p = SyntheticProblem(5, (a1, a2))
    L = p.evaluate(theta)
    assert np.all(L >= 0)
    assert L[0] < a1 or np.isclose(L[0], a1)
    assert L[1] < a2 or np.isclose(L[1], a2)
    assert np.array_equal(L, p.evaluate(theta.copy()))
