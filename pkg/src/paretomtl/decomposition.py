"""Preference vectors and the sector constraints they induce.

A set of ``K`` unit preference vectors ``u_0 .. u_{K-1}`` in the non-negative
orthant splits loss space into sectors: a loss vector ``v`` belongs to sector
``k`` when ``u_k`` has the largest inner product with ``v``.  Subproblem ``k``
keeps its loss vector inside that sector through the linear constraints
``g_j = (u_j - u_k) . L <= 0`` for every ``j != k``.

Indices are 0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEFAULT_EPSILON = 1e-4


@dataclass(frozen=True)
class PreferenceVectorSet:
    vectors: np.ndarray  # (K, m)

    def __post_init__(self):
        u = np.array(self.vectors, dtype=float)
        if u.ndim != 2 or u.shape[0] < 1 or u.shape[1] < 2:
            raise ValueError(f"preference vectors must be a (K, m>=2) array, got {u.shape}")
        if not np.all(np.isfinite(u)):
            raise ValueError("preference vectors must be finite")
        if np.any(u < 0):
            raise ValueError("preference vectors must be non-negative")
        norms = np.linalg.norm(u, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError(f"preference vectors must have unit norm, got norms {norms}")
        for i in range(len(u)):
            for j in range(i):
                if np.allclose(u[i], u[j], rtol=0.0, atol=1e-12):
                    raise ValueError(f"preference vectors {j} and {i} are duplicates")
        u.setflags(write=False)
        object.__setattr__(self, "vectors", u)

    def __len__(self) -> int:
        return self.vectors.shape[0]

    def __getitem__(self, k):
        return self.vectors[k]

    @property
    def n_objectives(self) -> int:
        return self.vectors.shape[1]

    @classmethod
    def from_rows(cls, rows, normalize: bool = False) -> "PreferenceVectorSet":
        u = np.asarray(rows, dtype=float)
        if normalize:
            u = u / np.linalg.norm(u, axis=1, keepdims=True)
        return cls(u)


def even_preference_vectors(count: int, m: int = 2, seed: int = 0) -> PreferenceVectorSet:
    """Default preference vectors.

    For two objectives this is the quarter circle
    ``(cos(k pi / 2K), sin(k pi / 2K))`` for ``k = 0 .. K`` with
    ``count = K + 1``.  For ``m >= 3`` the vectors are drawn from the
    positive-orthant part of the unit sphere (normalized half-normals) using
    ``seed``.
    """
    if count < 2:
        raise ValueError(f"need at least 2 preference vectors, got {count}")
    if m < 2:
        raise ValueError(f"need at least 2 objectives, got {m}")
    if m == 2:
        K = count - 1
        angles = np.arange(count) * np.pi / (2 * K)
        u = np.column_stack([np.cos(angles), np.sin(angles)])
        # exact zeros at the axes
        u[0] = (1.0, 0.0)
        u[-1] = (0.0, 1.0)
        return PreferenceVectorSet(u)

    rng = np.random.default_rng(seed)
    rows: list[np.ndarray] = []
    while len(rows) < count:
        v = np.abs(rng.standard_normal(m))
        norm = np.linalg.norm(v)
        if norm == 0.0:
            continue
        v = v / norm
        if any(np.allclose(v, r, rtol=0.0, atol=1e-12) for r in rows):
            continue
        rows.append(v)
    return PreferenceVectorSet(np.array(rows))


def load_preference_vectors(path, normalize: bool = False) -> PreferenceVectorSet:
    """Read preference vectors from a CSV file, one vector per line.

    Blank lines and lines starting with ``#`` are skipped.  With
    ``normalize=True`` rows are scaled to unit length before validation.
    """
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(x) for x in line.split(",")])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: cannot parse {line!r}") from exc
    if not rows:
        raise ValueError(f"{path}: no preference vectors found")
    if len({len(r) for r in rows}) != 1:
        raise ValueError(f"{path}: rows have differing lengths")
    return PreferenceVectorSet.from_rows(rows, normalize=normalize)


def _check_losses(L, m: int) -> np.ndarray:
    L = np.asarray(L, dtype=float)
    if L.shape != (m,):
        raise ValueError(f"loss vector must have shape ({m},), got {L.shape}")
    if not np.all(np.isfinite(L)):
        raise ValueError("loss vector must be finite")
    if np.any(L < 0):
        raise ValueError(
            f"losses must be non-negative for sector decomposition, got {L}; "
            "shift the objectives first"
        )
    return L


def _check_index(prefs: PreferenceVectorSet, k: int) -> int:
    if not 0 <= k < len(prefs):
        raise IndexError(f"preference index {k} out of range for K={len(prefs)}")
    return int(k)


def sector_index(prefs: PreferenceVectorSet, v) -> int:
    """Index of the preference vector with the largest inner product with ``v``.

    Ties go to the lowest index.
    """
    v = _check_losses(v, prefs.n_objectives)
    if not np.any(v > 0):
        raise ValueError("sector of the zero vector is undefined")
    return int(np.argmax(prefs.vectors @ v))


@dataclass(frozen=True)
class ConstraintValues:
    g: np.ndarray  # (K,), g[k] == 0
    k: int

    @property
    def feasible(self) -> bool:
        return bool(np.all(self.g <= 0.0))

    @property
    def n_violated(self) -> int:
        return int(np.sum(self.g > 0.0))


def constraint_values(prefs: PreferenceVectorSet, k: int, L) -> ConstraintValues:
    """``g_j = (u_j - u_k) . L`` for all ``j``; the self term is exactly 0."""
    k = _check_index(prefs, k)
    L = _check_losses(L, prefs.n_objectives)
    u = prefs.vectors
    g = (u - u[k]) @ L
    g[k] = 0.0
    return ConstraintValues(g=g, k=k)


@dataclass(frozen=True)
class ActivatedSet:
    indices: tuple[int, ...]
    epsilon: float

    def __len__(self) -> int:
        return len(self.indices)


def activated_set(g: ConstraintValues, epsilon: float = DEFAULT_EPSILON) -> ActivatedSet:
    """Constraints with ``g_j >= -epsilon``, never including the self index."""
    if not epsilon >= 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon!r}")
    idx = tuple(int(j) for j in np.flatnonzero(g.g >= -epsilon) if j != g.k)
    return ActivatedSet(indices=idx, epsilon=float(epsilon))


def violated_set(g: ConstraintValues) -> ActivatedSet:
    """Constraints with ``g_j >= 0`` (threshold 0, used by the initialization phase)."""
    return activated_set(g, 0.0)


def constraint_gradient_coeffs(prefs: PreferenceVectorSet, k: int, j: int) -> np.ndarray:
    """``u_j - u_k``: the gradient of ``g_j`` is this vector times the Jacobian."""
    k = _check_index(prefs, k)
    j = _check_index(prefs, j)
    if j == k:
        raise ValueError("the self constraint j == k is vacuous and has no gradient")
    return prefs.vectors[j] - prefs.vectors[k]


def coefficient_rows(prefs: PreferenceVectorSet, k: int, active: ActivatedSet) -> np.ndarray:
    """Stack ``u_j - u_k`` for every activated ``j``; shape ``(|I|, m)``."""
    if not active.indices:
        return np.zeros((0, prefs.n_objectives))
    return np.array([constraint_gradient_coeffs(prefs, k, j) for j in active.indices])
