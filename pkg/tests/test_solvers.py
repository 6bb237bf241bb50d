import numpy as np
import pytest

from paretomtl.decomposition import (
    PreferenceVectorSet,
    activated_set,
    coefficient_rows,
    constraint_values,
    even_preference_vectors,
)
from paretomtl.minnorm import DualWeights, descent_direction
from paretomtl.problems import Logistic3Problem, MultiObjectiveProblem, SyntheticProblem
from paretomtl.solvers import (
    CONVERGED,
    INIT_FAILED,
    NUMERIC_FAILURE,
    SolverConfig,
    effective_weights,
    find_initial,
    linear_run,
    mgda_run,
    mgda_step,
    pareto_mtl_step,
    run_all,
    run_subproblem,
)

P20 = SyntheticProblem(20)
PREFS10 = even_preference_vectors(10)


@pytest.mark.parametrize(
    "changes",
    [{"eta": -0.5}, {"eta_r": 0.0}, {"epsilon": -1e-3}, {"max_iters": 0}, {"max_init_iters": -1},
     {"criticality_tol": 0.0}, {"init_low": 1.0, "init_high": 0.0}, {"decay_every": 0}],
)
def test_config_validation(changes):
    with pytest.raises(ValueError):
        SolverConfig(**changes)


def test_step_size_schedule():
    cfg = SolverConfig(eta=0.5, eta_decay=0.95, decay_every=10)
    assert cfg.step_size(0) == cfg.step_size(9) == 0.5
    assert cfg.step_size(10) == pytest.approx(0.475)
    assert cfg.step_size(25) == pytest.approx(0.5 * 0.95**2)


def test_find_initial_short_circuits_when_feasible():
    theta = 0.5 * P20.center  # loss vector favours task 1 -> middle-to-low sectors
    L = P20.evaluate(theta)
    from paretomtl.decomposition import sector_index

    k = sector_index(PREFS10, L)
    res = find_initial(P20, PREFS10, k, theta, SolverConfig())
    assert res.feasible and res.records == []
    np.testing.assert_array_equal(res.theta, theta)


def test_find_initial_zero_budget():
    rng = np.random.default_rng(0)
    theta = rng.uniform(-0.5, 0.5, 20)
    res = find_initial(P20, PREFS10, 0, theta, SolverConfig(max_init_iters=0))
    assert not res.feasible and res.records == []
    np.testing.assert_array_equal(res.theta, theta)


@pytest.mark.parametrize("k", [0, 9])
def test_find_initial_reduces_violation(k):
    rng = np.random.default_rng(3)
    cfg = SolverConfig(eta_r=1e-3, max_init_iters=50)
    for _ in range(5):
        theta = rng.uniform(-0.5, 0.5, 20)
        g0 = constraint_values(PREFS10, k, P20.evaluate(theta))
        res = find_initial(P20, PREFS10, k, theta, cfg)
        g1 = constraint_values(PREFS10, k, P20.evaluate(res.theta))
        assert g1.n_violated <= g0.n_violated
        if not g0.feasible:
            viol = g0.g >= 0
            viol[k] = False
            assert g1.g[viol].sum() < g0.g[viol].sum()
        # violated count never increases between recorded iterations
        counts = [r.n_active for r in res.records]
        assert all(b <= a for a, b in zip(counts, counts[1:]))


def test_step_at_critical_point_is_identity():
    theta = 0.1 * P20.center  # on the Pareto set, interior of its sector
    from paretomtl.decomposition import sector_index

    k = sector_index(PREFS10, P20.evaluate(theta))
    new, step = pareto_mtl_step(P20, PREFS10, k, theta, SolverConfig(criticality_tol=1e-6))
    assert step.critical
    np.testing.assert_array_equal(new, theta)


def test_step_without_active_constraints_equals_mgda():
    rng = np.random.default_rng(1)
    cfg = SolverConfig(epsilon=1e-4)
    hits = 0
    for _ in range(50):
        theta = rng.uniform(-0.5, 0.5, 20)
        L = P20.evaluate(theta)
        for k in range(10):
            g = constraint_values(PREFS10, k, L)
            if activated_set(g, cfg.epsilon).indices:
                continue
            a, sa = pareto_mtl_step(P20, PREFS10, k, theta, cfg)
            b, sb = mgda_step(P20, theta, cfg)
            assert np.array_equal(a, b) and np.array_equal(sa.d, sb.d)
            hits += 1
    assert hits > 0


def test_small_step_decreases_active_constraints_and_losses():
    rng = np.random.default_rng(2)
    cfg = SolverConfig(eta=1e-3)
    checked = 0
    for _ in range(200):
        theta = rng.uniform(-0.5, 0.5, 20)
        L = P20.evaluate(theta)
        for k in range(10):
            g = constraint_values(PREFS10, k, L)
            if not g.feasible:
                continue
            active = activated_set(g, cfg.epsilon).indices
            new, step = pareto_mtl_step(P20, PREFS10, k, theta, cfg)
            if step.critical:
                continue
            L2 = P20.evaluate(new)
            assert np.all(L2 < L)
            g2 = constraint_values(PREFS10, k, L2)
            for j in active:
                assert g2.g[j] < g.g[j]
            w = step.duals.lam
            assert w @ L2 < w @ L
            checked += 1
    assert checked > 20


def test_run_subproblem_is_deterministic():
    cfg = SolverConfig(max_iters=50)
    a = run_subproblem(P20, PREFS10, 4, cfg)
    b = run_subproblem(P20, PREFS10, 4, cfg)
    assert a.status == b.status
    assert len(a.records) == len(b.records)
    for ra, rb in zip(a.records, b.records):
        assert np.array_equal(ra.losses, rb.losses) and np.array_equal(ra.weights, rb.weights)
    assert np.array_equal(a.theta, b.theta)


def test_run_subproblem_without_init_has_no_init_records():
    t = run_subproblem(P20, PREFS10, 0, SolverConfig(init_enabled=False))
    assert t.init_records == [] and t.init_feasible is None


def test_run_subproblem_middle_sector_lands_in_sector():
    cfg = SolverConfig()
    t = run_subproblem(P20, PREFS10, 5, cfg)
    g = constraint_values(PREFS10, 5, t.losses)
    assert np.all(g.g <= cfg.epsilon)


def test_trajectory_record_budget_and_weights_logged():
    cfg = SolverConfig(max_iters=30, max_init_iters=7)
    for k in range(10):
        t = run_subproblem(P20, PREFS10, k, cfg)
        assert len(t.records) <= 30 + 7
        assert all(np.all(np.isfinite(r.losses)) for r in t.records)
        assert all(r.weights.shape == (2,) for r in t.main_records)


def test_run_all_single_preference_matches_subproblem_and_mgda():
    prefs = PreferenceVectorSet(np.array([[np.sqrt(0.5), np.sqrt(0.5)]]))
    cfg = SolverConfig(max_iters=40)
    sol = run_all(P20, prefs, cfg)
    assert len(sol) == 1
    single = run_subproblem(P20, prefs, 0, cfg)
    np.testing.assert_array_equal(sol.entries[0].theta, single.theta)
    m = mgda_run(P20, cfg, seed=cfg.base_seed)
    assert [r.d_norm for r in single.main_records] == [r.d_norm for r in m.main_records]
    np.testing.assert_array_equal(single.theta, m.theta)


def test_run_all_serial_equals_threaded():
    cfg = SolverConfig(max_iters=60)
    a = run_all(P20, PREFS10, cfg, workers=1)
    b = run_all(P20, PREFS10, cfg, workers=4)
    assert [e.k for e in a] == list(range(10)) == [e.k for e in b]
    for ea, eb in zip(a, b):
        assert np.array_equal(ea.theta, eb.theta) and ea.status == eb.status


def test_mgda_common_descent():
    rng = np.random.default_rng(6)
    for _ in range(100):
        theta = rng.uniform(-0.5, 0.5, 20)
        J = P20.jacobian(theta)
        _, step = mgda_step(P20, theta, SolverConfig())
        if not step.critical:
            assert np.all(J @ step.d < 0)


def test_mgda_single_objective_is_gradient_descent():
    class Bowl(MultiObjectiveProblem):
        n_params, n_objectives = 3, 1

        def _losses(self, t):
            return np.array([t @ t])

        def _jacobian(self, t):
            return 2 * t[None, :]

    cfg = SolverConfig(eta=0.1, max_iters=5, eta_decay=1.0)
    t = mgda_run(Bowl(), cfg)
    theta0 = np.random.default_rng(cfg.base_seed).uniform(-0.5, 0.5, 3)
    np.testing.assert_allclose(t.theta, theta0 * 0.8**5)
    assert all(np.array_equal(r.weights, [1.0]) for r in t.main_records)


def test_linear_run_single_task():
    t = linear_run(P20, [1.0, 0.0], SolverConfig())
    assert t.losses[0] < 1e-3


@pytest.mark.parametrize("w", [[0.5, 0.6], [-0.1, 1.1], [1.0], [np.nan, 1.0]])
def test_linear_run_rejects_bad_weights(w):
    with pytest.raises(ValueError):
        linear_run(P20, w, SolverConfig())


def test_linear_run_balanced_weights_reach_endpoint():
    t = linear_run(P20, [0.5, 0.5], SolverConfig())
    ends = P20.endpoint_losses()
    assert np.min(np.max(np.abs(ends - t.losses), axis=1)) < 0.05


def test_effective_weights_examples():
    prefs = PreferenceVectorSet(np.eye(2))
    lam = np.array([0.3, 0.7])
    act = activated_set(constraint_values(prefs, 0, (1.0, 0.1)), 1e-4)
    assert act.indices == ()
    np.testing.assert_array_equal(effective_weights(DualWeights(lam, np.zeros(0)), prefs, 0, act), lam)

    act = activated_set(constraint_values(prefs, 0, (0.2, 0.8)), 0.0)
    w = effective_weights(DualWeights(np.zeros(2), np.array([1.0])), prefs, 0, act)
    np.testing.assert_array_equal(w, [-1.0, 1.0])
    with pytest.raises(ValueError):
        effective_weights(DualWeights(lam, np.zeros(2)), prefs, 0, act)


def test_effective_weights_reproduce_direction():
    rng = np.random.default_rng(9)
    for _ in range(100):
        theta = rng.uniform(-0.5, 0.5, 20)
        L, J = P20.evaluate_with_jacobian(theta)
        k = int(rng.integers(10))
        act = activated_set(constraint_values(PREFS10, k, L), 1e-4)
        step = descent_direction(J, coefficient_rows(PREFS10, k, act))
        w = effective_weights(step.duals, PREFS10, k, act)
        np.testing.assert_allclose(-(w @ J), step.d, rtol=1e-12, atol=1e-300)


class Exploding(SyntheticProblem):
    def _losses(self, theta):
        L = super()._losses(theta)
        return L if theta[0] < 10 else L * np.nan

    def _jacobian(self, theta):
        return -super()._jacobian(theta) * 50  # ascent pushes theta outward


def test_numeric_failure_is_recorded():
    p = Exploding(2)
    t = mgda_run(p, SolverConfig(init_low=11, init_high=12))
    assert t.status == NUMERIC_FAILURE and t.error


def test_logistic_three_task_run():
    p = Logistic3Problem(n_samples=400, seed=0)
    prefs = even_preference_vectors(4, m=3, seed=1)
    cfg = SolverConfig(max_iters=100, eta_decay=1.0)
    sol = run_all(p, prefs, cfg)
    assert len(sol) == 4
    assert np.all(np.isfinite(sol.losses)) and np.all(sol.losses > 0)
    start = p.evaluate(np.zeros(p.n_params))
    # trade-off solutions need not beat the zero model on every task, but none is dominated by it
    assert not any(np.all(start <= L) for L in sol.losses)
    assert {s for s in sol.statuses} <= {CONVERGED, "max-iters", INIT_FAILED}
