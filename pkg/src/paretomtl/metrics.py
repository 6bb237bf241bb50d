"""Front-quality measures: dominance, 2-D hypervolume, spacing, sector coverage."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decomposition import PreferenceVectorSet, sector_index


@dataclass(frozen=True)
class FrontPoint:
    losses: np.ndarray
    algorithm: str = ""
    origin: int | str = 0


def _as_losses(points) -> np.ndarray:
    """Accept FrontPoints, a 2-D array, or a list of loss vectors."""
    pts = list(points) if not isinstance(points, np.ndarray) else points
    if len(pts) == 0:
        return np.zeros((0, 0))
    if isinstance(pts, list) and isinstance(pts[0], FrontPoint):
        pts = [p.losses for p in pts]
    arr = np.asarray(pts, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"expected a list of loss vectors, got shape {arr.shape}")
    return arr


def dominates(a, b) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and strictly better somewhere."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"cannot compare loss vectors of shapes {a.shape} and {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def nondominated_mask(points) -> np.ndarray:
    F = _as_losses(points)
    n = F.shape[0]
    if n == 0:
        return np.zeros(0, dtype=bool)
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    dominated_by = le & lt  # [i, j]: i dominates j
    return ~np.any(dominated_by, axis=0)


def pareto_filter(points) -> list:
    """Points not dominated by any other, in input order; equal points are all kept."""
    mask = nondominated_mask(points)
    return [p for p, keep in zip(list(points), mask) if keep]


def hypervolume_2d(points, ref) -> float:
    """Area dominated by ``points`` and bounded by ``ref`` (minimization).

    Every point must be component-wise ``<= ref``.
    """
    ref = np.asarray(ref, dtype=float)
    F = _as_losses(points)
    if F.shape[0] == 0:
        return 0.0
    if F.shape[1] != 2 or ref.shape != (2,):
        raise ValueError("hypervolume_2d needs two objectives")
    if np.any(F > ref):
        raise ValueError(f"points exceed the reference point {ref.tolist()}")
    F = F[nondominated_mask(F)]
    F = F[np.lexsort((F[:, 1], F[:, 0]))]
    area = 0.0
    prev_y = ref[1]
    for x, y in F:
        if y < prev_y:
            area += (ref[0] - x) * (prev_y - y)
            prev_y = y
    return float(area)


def spacing(points) -> float:
    """Schott spacing with L1 nearest-neighbour distances; 0 means perfectly even."""
    F = _as_losses(points)
    if F.shape[0] < 2:
        raise ValueError("spacing needs at least two points")
    D = np.sum(np.abs(F[:, None, :] - F[None, :, :]), axis=2)
    np.fill_diagonal(D, np.inf)
    d = D.min(axis=1)
    return float(np.sqrt(np.sum((d.mean() - d) ** 2) / (len(d) - 1)))


def sector_occupancy(points, prefs: PreferenceVectorSet) -> np.ndarray:
    """Number of points falling in each preference sector."""
    counts = np.zeros(len(prefs), dtype=int)
    for v in _as_losses(points):
        counts[sector_index(prefs, v)] += 1
    return counts


def sector_coverage(points, prefs: PreferenceVectorSet) -> float:
    """Fraction of sectors holding at least one point."""
    return float(np.count_nonzero(sector_occupancy(points, prefs)) / len(prefs))


def front_summary(points, prefs: PreferenceVectorSet | None = None, ref=None) -> dict:
    """Hypervolume, spacing and coverage of a set of loss vectors.

    Metrics that do not apply (too few points, ``m != 2`` for hypervolume)
    are ``None``.
    """
    F = _as_losses(points)
    out: dict = {"n_points": int(F.shape[0])}
    if F.shape[0] == 0:
        out.update(hypervolume=None, spacing=None, sector_coverage=None,
                   n_nondominated=0, sector_occupancy=None)
        return out
    nd = F[nondominated_mask(F)]
    out["n_nondominated"] = int(nd.shape[0])
    out["hypervolume"] = (
        hypervolume_2d(F, ref) if ref is not None and F.shape[1] == 2 else None
    )
    out["spacing"] = spacing(nd) if nd.shape[0] >= 2 else None
    if prefs is not None:
        occ = sector_occupancy(F, prefs)
        out["sector_coverage"] = float(np.count_nonzero(occ) / len(prefs))
        out["sector_occupancy"] = occ.tolist()
    else:
        out["sector_coverage"] = None
        out["sector_occupancy"] = None
    return out
