"""Min-norm descent directions through the simplex-constrained dual.

The common descent direction of a set of gradient vectors ``v_1 .. v_q`` is
``d = -sum(s_i v_i)`` where ``s`` minimizes ``||sum(s_i v_i)||^2`` over the
probability simplex.  The solver only ever sees the ``q x q`` Gram matrix of
the vectors, so the parameter dimension enters once, when the Gram matrix
and the final direction are formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-6
DEFAULT_MAX_ITER = 250
DEFAULT_CRITICALITY_TOL = 1e-6


class NumericDomainError(ArithmeticError):
    """Raised on non-finite or non-PSD input to the numeric core."""


def build_gram(J, coeff_rows=None) -> np.ndarray:
    """Gram matrix of the loss gradients stacked with the constraint gradients.

    Constraint gradient ``j`` is ``coeff_rows[j] @ J``.  The result is
    ``C (J J^T) C^T`` with ``C = [I_m; coeff_rows]``, which costs ``O(m^2 n)``
    no matter how many constraints are active.
    """
    J = np.asarray(J, dtype=float)
    if J.ndim != 2:
        raise ValueError(f"Jacobian must be 2-D, got shape {J.shape}")
    m = J.shape[0]
    C = stack_coefficients(m, coeff_rows)
    return C @ (J @ J.T) @ C.T


def stack_coefficients(m: int, coeff_rows=None) -> np.ndarray:
    """``[I_m; coeff_rows]``, shape ``(m + r, m)``."""
    if coeff_rows is None or len(coeff_rows) == 0:
        return np.eye(m)
    coeff_rows = np.asarray(coeff_rows, dtype=float)
    if coeff_rows.ndim != 2 or coeff_rows.shape[1] != m:
        raise ValueError(
            f"coefficient rows must have shape (r, {m}), got {coeff_rows.shape}"
        )
    return np.vstack([np.eye(m), coeff_rows])


def min_norm_pair(g11: float, g12: float, g22: float) -> float:
    """Weight ``lam`` on ``v_1`` minimizing ``||lam v_1 + (1 - lam) v_2||``.

    Inputs are the inner products ``v1.v1``, ``v1.v2``, ``v2.v2``.  Identical
    vectors (vanishing denominator) give 0.5.
    """
    denom = g11 - 2.0 * g12 + g22
    if denom < 1e-12:
        return 0.5
    return float(min(max((g22 - g12) / denom, 0.0), 1.0))


@dataclass
class SimplexSolution:
    weights: np.ndarray
    objective: float
    gap: float
    iterations: int
    converged: bool
    history: list[float] = field(default_factory=list)


def _check_gram(G) -> np.ndarray:
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] == 0:
        raise ValueError(f"Gram matrix must be square and non-empty, got {G.shape}")
    if not np.all(np.isfinite(G)):
        raise NumericDomainError("Gram matrix has non-finite entries")
    scale = max(np.max(np.abs(G)), np.finfo(float).tiny)
    if np.max(np.abs(G - G.T)) > 1e-12 * scale:
        raise NumericDomainError("Gram matrix is not symmetric")
    G = 0.5 * (G + G.T)
    if G.shape[0] > 1:
        lo = np.linalg.eigvalsh(G)[0]
        if lo < -1e-8 * max(np.trace(G), np.finfo(float).tiny):
            raise NumericDomainError(f"Gram matrix is not PSD (min eigenvalue {lo:.3e})")
    return G


def _fw_gap(Gs, s):
    f = float(s @ Gs)
    return 2.0 * (f - float(np.min(Gs))), f


def _affine_min(G, S):
    q = S.size
    K = np.zeros((q + 1, q + 1))
    K[:q, :q] = G[np.ix_(S, S)]
    K[:q, q] = 1.0
    K[q, :q] = 1.0
    rhs = np.zeros(q + 1)
    rhs[q] = 1.0
    sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    y = sol[:q]
    return y / y.sum()


def _refine(G, s, scale, max_cycles):
    # Wolfe-style corral updates: exact minimizer over the affine hull of the
    # support, stepping back to the simplex boundary when it leaves it.
    s = s.copy()
    tiny = 1e-14 * scale
    for _ in range(max_cycles):
        Gs = G @ s
        f = float(s @ Gs)
        i = int(np.argmin(Gs))
        S = np.flatnonzero(s > 0)
        if f - Gs[i] <= tiny and S.size:
            y = _affine_min(G, S)
            if np.all(y >= 0):
                cand = np.zeros_like(s)
                cand[S] = y
                if cand @ G @ cand <= f:
                    s = cand
            break
        if i not in S:
            S = np.append(S, i)
        for _ in range(S.size + 1):
            y = _affine_min(G, S)
            if not np.all(np.isfinite(y)):
                return s
            if np.all(y >= 0):
                s = np.zeros_like(s)
                s[S] = y
                break
            x = s[S]
            neg = y < 0
            theta = np.min(x[neg] / (x[neg] - y[neg]))
            x = x + theta * (y - x)
            x[x <= 1e-15] = 0.0
            s = np.zeros_like(s)
            s[S] = x
            s /= s.sum()
            S = np.flatnonzero(s > 0)
    return s


def solve_simplex_min_norm(
    G, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> SimplexSolution:
    """Minimize ``s^T G s`` over the probability simplex.

    Away-step Frank-Wolfe with exact line search, then a few exact
    active-set corrections starting from the Frank-Wolfe support (kept only if
    they do not increase the objective).  The stopping test is relative: the
    Frank-Wolfe gap must drop to ``tol * max(diag(G))``, so the solver behaves
    the same for tiny and huge gradients.  ``converged`` reports whether that
    held on return; ``gap`` is the absolute gap.
    """
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol!r}")
    G = _check_gram(G)
    q = G.shape[0]
    scale = max(float(np.max(np.diag(G))), np.finfo(float).tiny)
    if q == 1:
        return SimplexSolution(np.ones(1), float(G[0, 0]), 0.0, 0, True, [float(G[0, 0])])
    if q == 2:
        lam = min_norm_pair(G[0, 0], G[0, 1], G[1, 1])
        s = np.array([lam, 1.0 - lam])
        gap, f = _fw_gap(G @ s, s)
        return SimplexSolution(s, f, max(gap, 0.0), 0, gap <= tol * scale, [f])

    s = np.zeros(q)
    s[int(np.argmin(np.diag(G)))] = 1.0
    Gs = G @ s
    gap, f = _fw_gap(Gs, s)
    history = [f]
    it = 0
    while gap > tol * scale and it < max_iter:
        it += 1
        i = int(np.argmin(Gs))
        support = np.flatnonzero(s > 0)
        a = int(support[np.argmax(Gs[support])])
        fw_gain = f - Gs[i]
        away_gain = Gs[a] - f
        if fw_gain >= away_gain:
            slope = Gs[i] - f
            curv = G[i, i] - 2.0 * Gs[i] + f
            gmax = 1.0
        else:
            slope = f - Gs[a]
            curv = f - 2.0 * Gs[a] + G[a, a]
            gmax = s[a] / (1.0 - s[a])
        gamma = gmax if curv <= 0 else min(max(-slope / curv, 0.0), gmax)
        if fw_gain >= away_gain:
            s = (1.0 - gamma) * s
            s[i] += gamma
        else:
            s = (1.0 + gamma) * s
            s[a] -= gamma
            if gamma == gmax:
                s[a] = 0.0
        s[s < 0] = 0.0
        s /= s.sum()
        Gs = G @ s
        gap, f = _fw_gap(Gs, s)
        history.append(f)

    refined = _refine(G, s, scale, max_cycles=4 * q)
    r_gap, r_f = _fw_gap(G @ refined, refined)
    if r_f <= f:
        s, gap, f = refined, r_gap, r_f
        history.append(f)
    return SimplexSolution(s, float(f), max(float(gap), 0.0), it, gap <= tol * scale, history)


@dataclass(frozen=True)
class DualWeights:
    lam: np.ndarray  # (m,) multipliers of the loss gradients
    beta: np.ndarray  # (r,) multipliers of the activated constraint gradients

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.lam, self.beta])

    @classmethod
    def split(cls, s, m: int) -> "DualWeights":
        s = np.asarray(s, dtype=float)
        return cls(lam=s[:m].copy(), beta=s[m:].copy())


@dataclass(frozen=True)
class DescentStep:
    d: np.ndarray
    alpha_bound: float
    duals: DualWeights
    effective_weights: np.ndarray
    critical: bool
    active: tuple[int, ...] = ()
    dual_gap: float = 0.0
    dual_converged: bool = True

    @property
    def d_norm(self) -> float:
        return float(np.linalg.norm(self.d))


def effective_weights_from_duals(duals: DualWeights, coeff_rows=None) -> np.ndarray:
    """Composite per-loss weights ``lam + sum_j beta_j (u_j - u_k)``; may be negative."""
    m = duals.lam.shape[0]
    C = stack_coefficients(m, coeff_rows)
    if C.shape[0] != m + duals.beta.shape[0]:
        raise ValueError(
            f"{duals.beta.shape[0]} constraint multipliers for {C.shape[0] - m} coefficient rows"
        )
    return duals.vector @ C


def assemble_direction(
    J, coeff_rows, duals: DualWeights, criticality_tol: float = DEFAULT_CRITICALITY_TOL
) -> DescentStep:
    """``d = -J^T w`` with ``w`` the effective weights; ``alpha = -||d||^2``."""
    J = np.asarray(J, dtype=float)
    w = effective_weights_from_duals(duals, coeff_rows)
    d = -(w @ J)
    dn2 = float(d @ d)
    return DescentStep(
        d=d,
        alpha_bound=-dn2,
        duals=duals,
        effective_weights=w,
        critical=bool(np.sqrt(dn2) < criticality_tol),
    )


def descent_direction(
    J,
    coeff_rows=None,
    *,
    include_losses: bool = True,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    criticality_tol: float = DEFAULT_CRITICALITY_TOL,
) -> DescentStep:
    """Solve the dual for the given loss and constraint gradients.

    With ``include_losses=False`` only the constraint gradients enter the dual
    (initialization phase); ``lam`` is then all zeros.
    """
    J = np.asarray(J, dtype=float)
    if not np.all(np.isfinite(J)):
        raise NumericDomainError("Jacobian has non-finite entries")
    m = J.shape[0]
    G = build_gram(J, coeff_rows)
    r = G.shape[0] - m
    if include_losses:
        sol = solve_simplex_min_norm(G, tol, max_iter)
        duals = DualWeights.split(sol.weights, m)
    else:
        if r == 0:
            raise ValueError("no constraint rows to descend on")
        sol = solve_simplex_min_norm(G[m:, m:], tol, max_iter)
        duals = DualWeights(lam=np.zeros(m), beta=sol.weights)
    step = assemble_direction(J, coeff_rows, duals, criticality_tol)
    return DescentStep(
        d=step.d,
        alpha_bound=step.alpha_bound,
        duals=duals,
        effective_weights=step.effective_weights,
        critical=step.critical,
        dual_gap=sol.gap,
        dual_converged=sol.converged,
    )
