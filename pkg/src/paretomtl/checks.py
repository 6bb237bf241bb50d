"""Self-checks: finite-difference Jacobians and descent-direction inequalities.

Each check returns ``(passed, detail)``; ``run_checks`` runs them all.
"""

from __future__ import annotations

import time

import numpy as np

from .decomposition import activated_set, coefficient_rows, constraint_values, even_preference_vectors
from .minnorm import descent_direction
from .problems import Logistic3Problem, SyntheticProblem, finite_diff_check


def check_finite_differences(n_points: int = 100, seed: int = 0, tol: float = 1e-5):
    rng = np.random.default_rng(seed)
    worst = {}
    for problem in (SyntheticProblem(20), Logistic3Problem(seed=seed)):
        errs = [finite_diff_check(problem, rng.uniform(-1, 1, problem.n_params) * 0.5, 1e-6)
                for _ in range(n_points)]
        worst[repr(problem)] = max(errs)
    ok = all(v < tol for v in worst.values())
    return ok, ", ".join(f"{k}: max rel err {v:.2e}" for k, v in worst.items())


def _descent_violation(J, C, step):
    # largest (v . d + ||d||^2 / 2) over loss and constraint gradients, scaled
    V = J if C is None or len(C) == 0 else np.vstack([J, C @ J])
    dn = step.d_norm
    return float(np.max(V @ step.d + 0.5 * dn * dn)) / (1.0 + dn)


def check_descent_inequalities(constrained: bool, n_points: int = 100, seed: int = 0, d: int = 20):
    """Descent inequalities at random synthetic points.

    Every loss (and activated constraint) gradient must satisfy
    ``g . d <= -||d||^2 / 2`` whenever ``||d|| >= 1e-6``.
    """
    rng = np.random.default_rng(seed)
    problem = SyntheticProblem(d)
    prefs = even_preference_vectors(10)
    worst = -np.inf
    t0 = time.perf_counter()
    for _ in range(n_points):
        theta = rng.uniform(-1.0, 1.0, d)
        L, J = problem.evaluate_with_jacobian(theta)
        C = None
        if constrained:
            k = int(rng.integers(len(prefs)))
            C = coefficient_rows(prefs, k, activated_set(constraint_values(prefs, k, L), 1e-4))
        step = descent_direction(J, C)
        if step.d_norm >= 1e-6:
            worst = max(worst, _descent_violation(J, C, step))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 5.0
    return ok, f"max scaled violation {worst:.2e}, {elapsed:.2f}s"


def run_checks() -> list[tuple[str, bool, str]]:
    results = []
    for name, fn in (
        ("finite-difference Jacobians", check_finite_differences),
        ("unconstrained descent inequalities", lambda: check_descent_inequalities(False)),
        ("constrained descent inequalities", lambda: check_descent_inequalities(True)),
    ):
        ok, detail = fn()
        results.append((name, ok, detail))
    return results
