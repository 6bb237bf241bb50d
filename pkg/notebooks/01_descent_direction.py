"""Descent directions from the min-norm dual, step by step."""

import numpy as np

from paretomtl import SyntheticProblem, even_preference_vectors
from paretomtl.decomposition import activated_set, coefficient_rows, constraint_values, sector_index
from paretomtl.minnorm import build_gram, descent_direction

problem = SyntheticProblem(d=20)
prefs = even_preference_vectors(10)
rng = np.random.default_rng(0)

theta = rng.uniform(-0.5, 0.5, 20)
L, J = problem.evaluate_with_jacobian(theta)
print("losses", L)
print("this point sits in sector", sector_index(prefs, L))

# Unconstrained: the common descent direction of both tasks
step = descent_direction(J)
print("\nMGDA weights", step.duals.lam, " |d| =", step.d_norm)
print("directional derivatives", J @ step.d, "(both negative)")

# Constrained toward sector 0: violated sector constraints join the dual
k = 0
g = constraint_values(prefs, k, L)
act = activated_set(g, 1e-4)
print(f"\nsector {k}: {g.n_violated} violated constraints, activated {act.indices}")
rows = coefficient_rows(prefs, k, act)
print("Gram matrix is", build_gram(J, rows).shape, "regardless of the 20 parameters")

step = descent_direction(J, rows)
print("effective weights", step.effective_weights)
print("loss derivatives", J @ step.d)
print("constraint derivatives", (rows @ J) @ step.d)
