"""What the feasibility-seeking initialization buys."""

import numpy as np

from paretomtl import SolverConfig, SyntheticProblem, even_preference_vectors
from paretomtl.metrics import sector_coverage
from paretomtl.solvers import run_all

problem = SyntheticProblem(d=20)
prefs = even_preference_vectors(10)

cover = {True: [], False: []}
for seed in range(10):
    for flag in (True, False):
        cfg = SolverConfig(base_seed=seed, init_enabled=flag)
        cover[flag].append(sector_coverage(run_all(problem, prefs, cfg).losses, prefs))

print("seed  with-init  without")
for s in range(10):
    print(f"{s:4d}  {cover[True][s]:9.1f}  {cover[False][s]:7.1f}")
print(f"mean  {np.mean(cover[True]):9.2f}  {np.mean(cover[False]):7.2f}")
