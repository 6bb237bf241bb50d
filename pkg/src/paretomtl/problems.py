"""Multi-objective problem abstraction and benchmark problems.

Every problem maps a parameter vector ``theta`` (length ``n``) to a vector of
``m`` losses and exposes the analytic ``m x n`` Jacobian.  Problems are
stateless after construction.
"""

from __future__ import annotations

import numpy as np


class MultiObjectiveProblem:
    """Base class: subclasses implement ``_losses`` and ``_jacobian``."""

    n_params: int
    n_objectives: int

    def _check(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.ndim != 1 or theta.shape[0] != self.n_params:
            raise ValueError(
                f"theta must have shape ({self.n_params},), got {theta.shape}"
            )
        return theta

    def evaluate(self, theta) -> np.ndarray:
        """Return the loss vector ``(L_1(theta), ..., L_m(theta))``."""
        return self._losses(self._check(theta))

    def jacobian(self, theta) -> np.ndarray:
        """Return the ``(m, n)`` Jacobian; row ``i`` is the gradient of ``L_i``."""
        return self._jacobian(self._check(theta))

    def evaluate_with_jacobian(self, theta) -> tuple[np.ndarray, np.ndarray]:
        theta = self._check(theta)
        return self._losses(theta), self._jacobian(theta)

    def _losses(self, theta: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _jacobian(self, theta: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class SyntheticProblem(MultiObjectiveProblem):
    """Two Gaussian-well objectives with a concave Pareto front.

    ``L_1 = a_1 - a_1 exp(-||theta - c||^2)`` and
    ``L_2 = a_2 - a_2 exp(-||theta + c||^2)`` with ``c = 1/sqrt(d)``.
    ``a = (1, 1)`` is the balanced problem; unequal ``a`` makes one task
    "easier" (larger gradients).  The Pareto set is the segment
    ``{t c : t in [-1, 1]}`` whatever the weights.
    """

    n_objectives = 2

    def __init__(self, d: int = 20, a=(1.0, 1.0)):
        if int(d) != d or d < 1:
            raise ValueError(f"d must be a positive integer, got {d!r}")
        a = np.asarray(a, dtype=float)
        if a.shape != (2,) or not np.all(a > 0) or not np.all(np.isfinite(a)):
            raise ValueError(f"a must be two positive finite weights, got {a!r}")
        self.d = int(d)
        self.n_params = self.d
        self.a = a
        self.center = np.full(self.d, 1.0 / np.sqrt(self.d))

    def __repr__(self) -> str:
        return f"SyntheticProblem(d={self.d}, a=({self.a[0]:g}, {self.a[1]:g}))"

    def _wells(self, theta):
        r1 = theta - self.center
        r2 = theta + self.center
        return r1, r2, np.exp(-(r1 @ r1)), np.exp(-(r2 @ r2))

    def _losses(self, theta):
        _, _, e1, e2 = self._wells(theta)
        return np.array([self.a[0] - self.a[0] * e1, self.a[1] - self.a[1] * e2])

    def _jacobian(self, theta):
        r1, r2, e1, e2 = self._wells(theta)
        return np.vstack([2.0 * self.a[0] * e1 * r1, 2.0 * self.a[1] * e2 * r2])

    def distance_to_pareto_set(self, theta) -> float:
        """Euclidean distance from ``theta`` to the segment ``[-c, c]``."""
        theta = self._check(theta)
        c = self.center
        t = np.clip(theta @ c / (c @ c), -1.0, 1.0)
        return float(np.linalg.norm(theta - t * c))

    def endpoint_losses(self) -> np.ndarray:
        """Loss vectors at the two ends of the Pareto front, shape ``(2, 2)``."""
        far = 1.0 - np.exp(-4.0)
        return np.array([[0.0, self.a[1] * far], [self.a[0] * far, 0.0]])


def _log1pexp(z):
    # softplus, stable for large |z|
    return np.logaddexp(0.0, z)


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class Logistic3Problem(MultiObjectiveProblem):
    """Three binary logistic-regression tasks on one seeded synthetic dataset.

    The design matrix ``X`` (``n_samples x n_features``) is shared.  Each task
    has its own ground-truth weight vector, built as a common direction plus
    a task-specific perturbation, and labels are flipped with probability
    ``label_noise``.  Losses are mean logistic losses, always ``> 0``.

    With ``shared=True`` (default) ``theta`` is a single weight vector of
    length ``n_features`` used by all three tasks, so the tasks compete.
    With ``shared=False`` ``theta`` packs three task weight vectors
    (length ``3 * n_features``) and the tasks decouple.
    """

    n_objectives = 3

    def __init__(
        self,
        n_samples: int = 2000,
        n_features: int = 20,
        seed: int = 0,
        shared: bool = True,
        label_noise: float = 0.1,
        task_spread: float = 1.0,
    ):
        if n_samples < 1 or n_features < 1:
            raise ValueError("n_samples and n_features must be positive")
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((n_samples, n_features))
        common = rng.standard_normal(n_features)
        truth = common + task_spread * rng.standard_normal((3, n_features))
        margins = X @ truth.T  # (N, 3)
        Y = (margins > 0).astype(float)
        flip = rng.random(Y.shape) < label_noise
        Y[flip] = 1.0 - Y[flip]

        self.X = X
        self.Y = Y.T.copy()  # (3, N)
        self.true_weights = truth
        self.shared = bool(shared)
        self.n_features = n_features
        self.n_params = n_features if self.shared else 3 * n_features

    def __repr__(self) -> str:
        return (
            f"Logistic3Problem(n_samples={self.X.shape[0]}, "
            f"n_features={self.n_features}, shared={self.shared})"
        )

    def _weights(self, theta):
        if self.shared:
            return np.tile(theta, (3, 1))
        return theta.reshape(3, self.n_features)

    def _losses(self, theta):
        Z = self._weights(theta) @ self.X.T  # (3, N)
        # mean of log(1 + e^z) - y z
        return np.mean(_log1pexp(Z) - self.Y * Z, axis=1)

    def _jacobian(self, theta):
        W = self._weights(theta)
        Z = W @ self.X.T
        R = (_sigmoid(Z) - self.Y) / self.X.shape[0]  # (3, N)
        G = R @ self.X  # (3, p)
        if self.shared:
            return G
        J = np.zeros((3, 3 * self.n_features))
        for t in range(3):
            J[t, t * self.n_features : (t + 1) * self.n_features] = G[t]
        return J


class ShiftedProblem(MultiObjectiveProblem):
    """Adds a constant per-task offset to a problem's losses.

    Used to make possibly-negative objectives non-negative before sector
    decomposition.  Jacobians are unchanged.
    """

    def __init__(self, base: MultiObjectiveProblem, shift):
        shift = np.asarray(shift, dtype=float)
        if shift.shape != (base.n_objectives,):
            raise ValueError(
                f"shift must have length {base.n_objectives}, got {shift.shape}"
            )
        self.base = base
        self.shift = shift
        self.n_params = base.n_params
        self.n_objectives = base.n_objectives

    def __repr__(self) -> str:
        return f"ShiftedProblem({self.base!r}, shift={self.shift.tolist()})"

    def _losses(self, theta):
        return self.base._losses(theta) + self.shift

    def _jacobian(self, theta):
        return self.base._jacobian(theta)


def numerical_jacobian(problem: MultiObjectiveProblem, theta, step: float = 1e-6):
    """Central-difference Jacobian, ``O(n)`` loss evaluations."""
    theta = problem._check(theta)
    J = np.empty((problem.n_objectives, theta.size))
    for j in range(theta.size):
        e = np.zeros_like(theta)
        e[j] = step
        J[:, j] = (problem.evaluate(theta + e) - problem.evaluate(theta - e)) / (2 * step)
    return J


def finite_diff_check(problem: MultiObjectiveProblem, theta, step: float = 1e-6) -> float:
    """Max relative error between the analytic and central-difference Jacobians.

    The relative error of each entry is ``|a - f| / max(|a|, |f|, floor)``
    where ``floor`` is 1e-4 times the largest Jacobian magnitude (at least
    1e-12), so entries that are zero in both do not blow up the ratio.
    """
    if not step > 0:
        raise ValueError(f"step must be > 0, got {step!r}")
    analytic = problem.jacobian(theta)
    numeric = numerical_jacobian(problem, theta, step)
    scale = max(np.max(np.abs(analytic)), np.max(np.abs(numeric)))
    floor = max(1e-4 * scale, 1e-12)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / denom))
