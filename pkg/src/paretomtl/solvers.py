"""Optimization drivers: Pareto MTL, MGDA and fixed-weight linear scalarization.

All runs are deterministic functions of (problem, preference vectors, config,
seed).  Each run keeps a full per-iteration record so the adaptive weights can
be inspected afterwards.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .decomposition import (
    ActivatedSet,
    PreferenceVectorSet,
    activated_set,
    coefficient_rows,
    constraint_values,
    violated_set,
)
from .minnorm import (
    DescentStep,
    DualWeights,
    NumericDomainError,
    descent_direction,
    effective_weights_from_duals,
)
from .problems import MultiObjectiveProblem

CONVERGED = "converged-critical"
MAX_ITERS = "max-iters"
INIT_FAILED = "init-failed"
NUMERIC_FAILURE = "numeric-failure"


@dataclass(frozen=True)
class SolverConfig:
    """Step sizes, budgets and switches shared by all drivers.

    ``eta`` decays by ``eta_decay`` every ``decay_every`` main iterations;
    the initialization step size ``eta_r`` is constant.  Starting points are
    drawn uniformly from ``[init_low, init_high]^n``.
    """

    eta: float = 0.5
    eta_r: float = 0.5
    epsilon: float = 1e-4
    max_iters: int = 200
    max_init_iters: int = 50
    criticality_tol: float = 1e-6
    normalize_direction: bool = False
    init_enabled: bool = True
    base_seed: int = 0
    eta_decay: float = 0.95
    decay_every: int = 10
    init_low: float = -0.5
    init_high: float = 0.5
    dual_tol: float = 1e-6
    dual_max_iter: int = 250

    def __post_init__(self):
        for name in ("eta", "eta_r", "criticality_tol", "dual_tol", "eta_decay"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive number, got {value!r}")
        if not self.epsilon >= 0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon!r}")
        for name in ("max_iters", "decay_every", "dual_max_iter"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if int(self.max_init_iters) != self.max_init_iters or self.max_init_iters < 0:
            raise ValueError(f"max_init_iters must be a non-negative integer, got {self.max_init_iters!r}")
        if not self.init_low < self.init_high:
            raise ValueError("init_low must be below init_high")

    def replace(self, **changes) -> "SolverConfig":
        return dataclasses.replace(self, **changes)

    def step_size(self, t: int) -> float:
        return self.eta * self.eta_decay ** (t // self.decay_every)


@dataclass
class StepRecord:
    phase: str  # "init" or "main"
    iteration: int
    losses: np.ndarray
    constraints: np.ndarray | None
    n_active: int
    d_norm: float
    weights: np.ndarray
    feasible: bool | None


@dataclass
class Trajectory:
    algorithm: str
    index: int  # subproblem k, or run index for baselines
    seed: int
    records: list[StepRecord] = field(default_factory=list)
    status: str = MAX_ITERS
    init_feasible: bool | None = None
    theta: np.ndarray | None = None
    losses: np.ndarray | None = None
    error: str | None = None

    @property
    def init_records(self) -> list[StepRecord]:
        return [r for r in self.records if r.phase == "init"]

    @property
    def main_records(self) -> list[StepRecord]:
        return [r for r in self.records if r.phase == "main"]

    def weight_history(self) -> np.ndarray:
        return np.array([r.weights for r in self.main_records])

    def loss_history(self) -> np.ndarray:
        return np.array([r.losses for r in self.records])


@dataclass
class SolutionEntry:
    k: int
    theta: np.ndarray
    losses: np.ndarray
    status: str
    seed: int
    trajectory: Trajectory


@dataclass
class SolutionSet:
    entries: list[SolutionEntry]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def losses(self) -> np.ndarray:
        return np.array([e.losses for e in self.entries])

    @property
    def thetas(self) -> np.ndarray:
        return np.array([e.theta for e in self.entries])

    @property
    def statuses(self) -> list[str]:
        return [e.status for e in self.entries]


def _evaluate(problem: MultiObjectiveProblem, theta):
    L, J = problem.evaluate_with_jacobian(theta)
    if not (np.all(np.isfinite(L)) and np.all(np.isfinite(J))):
        raise NumericDomainError("non-finite loss or gradient")
    return L, J


def _move(theta, step: DescentStep, eta: float, cfg: SolverConfig):
    d = step.d
    if cfg.normalize_direction:
        d = d / np.linalg.norm(d)
    return theta + eta * d


def _sample_start(problem: MultiObjectiveProblem, cfg: SolverConfig, seed: int):
    rng = np.random.default_rng(seed)
    return rng.uniform(cfg.init_low, cfg.init_high, problem.n_params)


def effective_weights(
    duals: DualWeights, prefs: PreferenceVectorSet, k: int, activated: ActivatedSet
) -> np.ndarray:
    """Per-task scalarization weights equivalent to a Pareto MTL step."""
    if duals.beta.shape[0] != len(activated):
        raise ValueError(
            f"{duals.beta.shape[0]} constraint multipliers for {len(activated)} activated constraints"
        )
    return effective_weights_from_duals(duals, coefficient_rows(prefs, k, activated))


# -- initialization -------------------------------------------------------


@dataclass
class InitResult:
    theta: np.ndarray
    feasible: bool
    records: list[StepRecord]


def find_initial(
    problem: MultiObjectiveProblem,
    prefs: PreferenceVectorSet,
    k: int,
    theta_r,
    cfg: SolverConfig,
) -> InitResult:
    """Move ``theta_r`` towards sector ``k`` by descending on its violated constraints.

    Only constraints with ``g_j >= 0`` take part (no epsilon slack here).
    Stops as soon as every ``g_j < 0`` or after ``cfg.max_init_iters`` steps.
    """
    theta = np.array(theta_r, dtype=float)
    records: list[StepRecord] = []
    it = 0
    while True:
        L, J = _evaluate(problem, theta)
        g = constraint_values(prefs, k, L)
        violated = violated_set(g)
        if not violated.indices:
            return InitResult(theta, True, records)
        if it >= cfg.max_init_iters:
            return InitResult(theta, False, records)
        C = coefficient_rows(prefs, k, violated)
        step = descent_direction(
            J,
            C,
            include_losses=False,
            tol=cfg.dual_tol,
            max_iter=cfg.dual_max_iter,
            criticality_tol=cfg.criticality_tol,
        )
        records.append(
            StepRecord("init", it, L, g.g, len(violated), step.d_norm, step.effective_weights, False)
        )
        if step.critical:
            return InitResult(theta, False, records)
        theta = _move(theta, step, cfg.eta_r, cfg)
        it += 1


# -- single steps ---------------------------------------------------------


def _pareto_mtl_direction(J, L, prefs, k, cfg: SolverConfig):
    g = constraint_values(prefs, k, L)
    active = activated_set(g, cfg.epsilon)
    C = coefficient_rows(prefs, k, active)
    step = descent_direction(
        J, C, tol=cfg.dual_tol, max_iter=cfg.dual_max_iter, criticality_tol=cfg.criticality_tol
    )
    return dataclasses.replace(step, active=active.indices), g


def _mgda_direction(J, cfg: SolverConfig):
    return descent_direction(
        J, None, tol=cfg.dual_tol, max_iter=cfg.dual_max_iter, criticality_tol=cfg.criticality_tol
    )


def pareto_mtl_step(
    problem: MultiObjectiveProblem,
    prefs: PreferenceVectorSet,
    k: int,
    theta,
    cfg: SolverConfig,
    eta: float | None = None,
) -> tuple[np.ndarray, DescentStep]:
    """One constrained descent step for subproblem ``k``.

    At a restricted critical point ``theta`` is returned unchanged.
    """
    theta = np.asarray(theta, dtype=float)
    L, J = _evaluate(problem, theta)
    step, _ = _pareto_mtl_direction(J, L, prefs, k, cfg)
    if step.critical:
        return theta.copy(), step
    return _move(theta, step, cfg.eta if eta is None else eta, cfg), step


def mgda_step(
    problem: MultiObjectiveProblem, theta, cfg: SolverConfig, eta: float | None = None
) -> tuple[np.ndarray, DescentStep]:
    theta = np.asarray(theta, dtype=float)
    _, J = _evaluate(problem, theta)
    step = _mgda_direction(J, cfg)
    if step.critical:
        return theta.copy(), step
    return _move(theta, step, cfg.eta if eta is None else eta, cfg), step


# -- full runs ------------------------------------------------------------


def run_subproblem(
    problem: MultiObjectiveProblem,
    prefs: PreferenceVectorSet,
    k: int,
    cfg: SolverConfig,
) -> Trajectory:
    """Algorithm-1 inner loop for one preference vector (seed ``base_seed + k``)."""
    if not 0 <= k < len(prefs):
        raise IndexError(f"preference index {k} out of range for K={len(prefs)}")
    seed = cfg.base_seed + k
    traj = Trajectory("pareto-mtl", k, seed)
    theta = _sample_start(problem, cfg, seed)
    try:
        if cfg.init_enabled:
            init = find_initial(problem, prefs, k, theta, cfg)
            theta = init.theta
            traj.records.extend(init.records)
            traj.init_feasible = init.feasible
        status = MAX_ITERS
        for t in range(cfg.max_iters):
            L, J = _evaluate(problem, theta)
            step, g = _pareto_mtl_direction(J, L, prefs, k, cfg)
            traj.records.append(
                StepRecord(
                    "main", t, L, g.g, len(step.active), step.d_norm, step.effective_weights, g.feasible
                )
            )
            if step.critical:
                status = CONVERGED
                break
            theta = _move(theta, step, cfg.step_size(t), cfg)
        traj.status = INIT_FAILED if traj.init_feasible is False else status
        traj.losses = _evaluate(problem, theta)[0]
    except NumericDomainError as exc:
        traj.status = NUMERIC_FAILURE
        traj.error = str(exc)
        traj.losses = problem.evaluate(theta)
    traj.theta = theta
    return traj


def mgda_run(problem: MultiObjectiveProblem, cfg: SolverConfig, seed: int | None = None, index: int = 0) -> Trajectory:
    """Unconstrained multiple-gradient descent from a seeded random start."""
    seed = cfg.base_seed if seed is None else seed
    traj = Trajectory("mgda", index, seed)
    theta = _sample_start(problem, cfg, seed)
    try:
        status = MAX_ITERS
        for t in range(cfg.max_iters):
            L, J = _evaluate(problem, theta)
            step = _mgda_direction(J, cfg)
            traj.records.append(
                StepRecord("main", t, L, None, 0, step.d_norm, step.effective_weights, None)
            )
            if step.critical:
                status = CONVERGED
                break
            theta = _move(theta, step, cfg.step_size(t), cfg)
        traj.status = status
        traj.losses = _evaluate(problem, theta)[0]
    except NumericDomainError as exc:
        traj.status = NUMERIC_FAILURE
        traj.error = str(exc)
        traj.losses = problem.evaluate(theta)
    traj.theta = theta
    return traj


def check_weights(w, m: int) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (m,):
        raise ValueError(f"weights must have shape ({m},), got {w.shape}")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValueError(f"weights must be finite and non-negative, got {w}")
    if abs(w.sum() - 1.0) > 1e-9:
        raise ValueError(f"weights must sum to 1, got sum {w.sum()!r}")
    return w


def linear_run(
    problem: MultiObjectiveProblem,
    w,
    cfg: SolverConfig,
    seed: int | None = None,
    index: int = 0,
) -> Trajectory:
    """Gradient descent on the fixed weighted sum ``sum_i w_i L_i``."""
    w = check_weights(w, problem.n_objectives)
    seed = cfg.base_seed if seed is None else seed
    traj = Trajectory("linear", index, seed)
    theta = _sample_start(problem, cfg, seed)
    try:
        status = MAX_ITERS
        for t in range(cfg.max_iters):
            L, J = _evaluate(problem, theta)
            d = -(w @ J)
            dn = float(np.linalg.norm(d))
            traj.records.append(StepRecord("main", t, L, None, 0, dn, w.copy(), None))
            if dn < cfg.criticality_tol:
                status = CONVERGED
                break
            if cfg.normalize_direction:
                d = d / dn
            theta = theta + cfg.step_size(t) * d
        traj.status = status
        traj.losses = _evaluate(problem, theta)[0]
    except NumericDomainError as exc:
        traj.status = NUMERIC_FAILURE
        traj.error = str(exc)
        traj.losses = problem.evaluate(theta)
    traj.theta = theta
    return traj


def _entry(traj: Trajectory) -> SolutionEntry:
    return SolutionEntry(traj.index, traj.theta, traj.losses, traj.status, traj.seed, traj)


def run_all(
    problem: MultiObjectiveProblem,
    prefs: PreferenceVectorSet,
    cfg: SolverConfig,
    workers: int | None = 1,
) -> SolutionSet:
    """Solve every subproblem; entries come back ordered by ``k``.

    ``workers > 1`` runs subproblems on a thread pool.  Results do not depend
    on the execution order.
    """
    ks = range(len(prefs))
    if workers is not None and workers <= 1:
        trajs = [run_subproblem(problem, prefs, k, cfg) for k in ks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trajs = list(pool.map(lambda k: run_subproblem(problem, prefs, k, cfg), ks))
    trajs.sort(key=lambda t: t.index)
    return SolutionSet([_entry(t) for t in trajs])
