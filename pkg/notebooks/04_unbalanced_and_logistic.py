"""Unbalanced synthetic tasks and a three-task logistic regression."""

import numpy as np

from paretomtl import Logistic3Problem, SolverConfig, SyntheticProblem, even_preference_vectors
from paretomtl.metrics import pareto_filter, sector_occupancy
from paretomtl.solvers import run_all

prefs = even_preference_vectors(10)
for a1 in (1.0, 10.0, 50.0):
    sol = run_all(SyntheticProblem(20, (a1, 1.0)), prefs, SolverConfig())
    kept = pareto_filter(list(sol.losses))
    print(f"a=({a1:g},1): {len(kept)}/10 nondominated, occupancy {sector_occupancy(sol.losses, prefs).tolist()}")

# Three tasks share one weight vector; preference vectors are random on the sphere octant.
problem = Logistic3Problem(n_samples=2000, seed=0)
prefs3 = even_preference_vectors(6, m=3, seed=0)
sol = run_all(problem, prefs3, SolverConfig(max_iters=500, eta_decay=1.0))
np.set_printoptions(precision=3, suppress=True)
print("\nlogistic losses per preference vector")
print(sol.losses)
print("statuses", sol.statuses)
