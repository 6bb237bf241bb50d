"""Configured experiments: run every requested algorithm and write artifacts."""

from __future__ import annotations

import dataclasses
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import artifacts
from .config import ExperimentConfig
from .decomposition import PreferenceVectorSet
from .metrics import front_summary, nondominated_mask
from .solvers import NUMERIC_FAILURE, Trajectory, linear_run, mgda_run, run_subproblem

log = logging.getLogger(__name__)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    prefs: PreferenceVectorSet
    runs: dict[str, list[tuple[int, Trajectory]]]  # algorithm -> [(run_id, trajectory)]
    summary: dict

    def losses(self, algorithm: str, run_id: int | None = None) -> np.ndarray:
        rows = [t.losses for r, t in self.runs.get(algorithm, []) if run_id is None or r == run_id]
        return np.array(rows).reshape(len(rows), -1)


def _jobs(cfg: ExperimentConfig, problem, prefs):
    m = problem.n_objectives
    for run_id, seed in enumerate(cfg.seeds):
        if "pareto-mtl" in cfg.algorithms:
            solver = cfg.solver.replace(base_seed=seed)
            for k in range(len(prefs)):
                yield ("pareto-mtl", run_id, lambda k=k, s=solver: run_subproblem(problem, prefs, k, s))
        if "mgda" in cfg.algorithms:
            n_runs = cfg.mgda_runs or len(prefs)
            for i in range(n_runs):
                yield ("mgda", run_id, lambda i=i, s=seed: mgda_run(problem, cfg.solver, seed=s + i, index=i))
        if "linear" in cfg.algorithms:
            W = cfg.linear_weights.build(m, seed)
            for i, w in enumerate(W):
                yield ("linear", run_id, lambda i=i, w=w, s=seed: linear_run(problem, w, cfg.solver, seed=s + i, index=i))


def run_experiment(cfg: ExperimentConfig, workers: int | None = None) -> ExperimentResult:
    """Execute all configured runs; results are aggregated in job order."""
    problem = cfg.problem.build()
    prefs = cfg.preferences.build(problem.n_objectives, Path(cfg.source).parent if cfg.source else None)
    jobs = list(_jobs(cfg, problem, prefs))
    workers = workers or cfg.workers or os.cpu_count() or 1
    if workers <= 1:
        trajs = [fn() for _, _, fn in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            trajs = list(pool.map(lambda job: job[2](), jobs))
    runs: dict[str, list[tuple[int, Trajectory]]] = {a: [] for a in cfg.algorithms}
    for (algo, run_id, _), traj in zip(jobs, trajs):
        runs[algo].append((run_id, traj))
    summary = summarize(cfg, prefs, runs)
    return ExperimentResult(cfg, prefs, runs, summary)


def summarize(cfg: ExperimentConfig, prefs, runs) -> dict:
    ref = cfg.default_hv_ref()
    per_algo = {}
    failures = []
    for algo, items in runs.items():
        L = np.array([t.losses for _, t in items])
        stats = _safe_summary(L, prefs, ref)
        statuses: dict[str, int] = {}
        for _, t in items:
            statuses[t.status] = statuses.get(t.status, 0) + 1
            if t.status == NUMERIC_FAILURE:
                failures.append({"algorithm": algo, "index": t.index, "seed": t.seed, "error": t.error})
        stats["status_counts"] = dict(sorted(statuses.items()))
        # which run is best on each task; no claim about which preference vector should win
        stats["per_task_best"] = [
            {"index": items[i][1].index, "run_id": items[i][0], "loss": float(L[i, t])}
            for t, i in enumerate(np.argmin(np.where(np.isfinite(L), L, np.inf), axis=0))
        ] if L.size else []
        per_run = {}
        for run_id in sorted({r for r, _ in items}):
            Lr = np.array([t.losses for r, t in items if r == run_id])
            per_run[str(run_id)] = _safe_summary(Lr, prefs, ref)
        stats["per_run"] = per_run
        per_algo[algo] = stats
    return {
        "config": cfg.resolved(),
        "preference_vectors": np.asarray(prefs.vectors).tolist(),
        "hv_ref": ref,
        "algorithms": per_algo,
        "failures": failures,
    }


def _safe_summary(L, prefs, ref):
    L = np.asarray(L, dtype=float).reshape(len(L), -1)
    finite = L[np.all(np.isfinite(L), axis=1)] if L.size else L
    nonneg = finite[np.all(finite >= 0, axis=1) & np.any(finite > 0, axis=1)] if finite.size else finite
    use_ref = ref if ref is not None and finite.size and np.all(finite <= np.asarray(ref)) else None
    out = front_summary(finite, None, use_ref)
    if ref is not None and use_ref is None and finite.size:
        log.warning("points exceed the hypervolume reference %s; hypervolume omitted", ref)
    occ = front_summary(nonneg, prefs, None) if nonneg.size else None
    out["sector_coverage"] = occ["sector_coverage"] if occ else None
    out["sector_occupancy"] = occ["sector_occupancy"] if occ else None
    return out


def write_artifacts(result: ExperimentResult, outdir: Path) -> Path:
    """Write front/trajectory/weights CSVs, summary.json and front.svg.

    A marker file exists while writing and is removed at the end, so a crash
    leaves the directory visibly incomplete.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    marker = outdir / artifacts.INCOMPLETE_MARKER
    marker.write_text("run started; artifacts incomplete\n")
    m = len(result.prefs.vectors[0])
    ordered = [item for algo in result.config.algorithms for item in result.runs[algo]]
    artifacts.write_front(outdir / "front.csv", ordered, m)
    artifacts.write_trajectory(outdir / "trajectory.csv", ordered, m)
    artifacts.write_weights(outdir / "weights.csv", ordered, m)
    artifacts.write_json(outdir / "summary.json", result.summary)
    if m == 2:
        series = {a: result.losses(a) for a in result.config.algorithms}
        (outdir / "front.svg").write_text(artifacts.front_svg(series, result.prefs.vectors))
    marker.unlink()
    return outdir


def ablate_init(cfg: ExperimentConfig, outdir: Path, workers: int | None = None) -> dict:
    """Run Pareto MTL with and without the initialization phase under identical seeds."""
    results = {}
    for label, flag in (("with_init", True), ("without_init", False)):
        c = dataclasses.replace(cfg, algorithms=["pareto-mtl"], solver=cfg.solver.replace(init_enabled=flag))
        res = run_experiment(c, workers)
        write_artifacts(res, Path(outdir) / label)
        results[label] = res
    cover = {}
    for label, res in results.items():
        per_run = res.summary["algorithms"]["pareto-mtl"]["per_run"]
        cover[label] = [per_run[str(i)]["sector_coverage"] for i in range(len(cfg.seeds))]
    mean = {k: float(np.mean(v)) for k, v in cover.items()}
    report = {
        "seeds": list(cfg.seeds),
        "coverage": cover,
        "mean_coverage": mean,
        "with_init_at_least_without": mean["with_init"] >= mean["without_init"],
        "hypervolume": {
            label: res.summary["algorithms"]["pareto-mtl"]["hypervolume"] for label, res in results.items()
        },
        "config": cfg.resolved(),
    }
    artifacts.write_json(Path(outdir) / "ablation.json", report)
    return report


def compare_fronts(paths, prefs: PreferenceVectorSet | None = None, ref=None) -> dict:
    """Metrics for each (file, algorithm) source plus pooled nondominated counts.

    Raises ``ValueError`` if the inputs disagree on the number of objectives.
    """
    sources = []
    ms = set()
    warnings = []
    for path in paths:
        rows, m = artifacts.read_front(path)
        if not rows:
            warnings.append(f"{path}: empty front")
            sources.append((str(path), None, np.zeros((0, 0))))
            continue
        ms.add(m)
        for algo in dict.fromkeys(r["algorithm"] for r in rows):
            L = np.array([r["losses"] for r in rows if r["algorithm"] == algo])
            sources.append((str(path), algo, L))
    if len(ms) > 1:
        raise ValueError(f"fronts have different numbers of objectives: {sorted(ms)}")
    m = ms.pop() if ms else 0
    if ref is None and m == 2:
        nonempty = [L for *_, L in sources if L.size]
        if nonempty:
            ref = (1.1 * np.max(np.vstack(nonempty), axis=0)).tolist()
    if prefs is not None and m and prefs.n_objectives != m:
        raise ValueError(f"preference vectors have {prefs.n_objectives} objectives, fronts have {m}")

    table = []
    pooled = [L for *_, L in sources if L.size]
    pool = np.vstack(pooled) if pooled else np.zeros((0, m))
    mask = nondominated_mask(pool) if len(pool) else np.zeros(0, dtype=bool)
    offset = 0
    for path, algo, L in sources:
        if not L.size:
            table.append({"source": path, "algorithm": algo, "n_points": 0, "hypervolume": None,
                          "spacing": None, "sector_coverage": None, "pooled_nondominated": 0})
            continue
        stats = _safe_summary(L, prefs, ref) if prefs is not None else front_summary(L, None, ref if m == 2 else None)
        stats.pop("sector_occupancy", None)
        stats.update(source=path, algorithm=algo,
                     pooled_nondominated=int(mask[offset:offset + len(L)].sum()))
        offset += len(L)
        table.append(stats)
    return {"m": m, "hv_ref": ref, "sources": table, "warnings": warnings}
