"""Experiment configuration: a JSON document validated up front.

Unknown keys are errors.  Validation errors carry the line of the offending
key in the source file when it can be located.
"""

from __future__ import annotations

import dataclasses
import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .decomposition import PreferenceVectorSet, even_preference_vectors, load_preference_vectors
from .problems import Logistic3Problem, MultiObjectiveProblem, ShiftedProblem, SyntheticProblem
from .solvers import SolverConfig

OUTPUT_DIR_ENV = "PARETOMTL_OUTPUT_DIR"
ALGORITHMS = ("pareto-mtl", "mgda", "linear")
PROBLEM_KINDS = ("synthetic", "synthetic-weighted", "logistic3")

_SOLVER_FIELDS = {f.name: f for f in dataclasses.fields(SolverConfig)}

# per-problem solver defaults; anything not listed falls back to SolverConfig
_SOLVER_DEFAULTS = {
    "synthetic": {"max_iters": 200},
    "synthetic-weighted": {"max_iters": 200},
    "logistic3": {"max_iters": 500, "eta_decay": 1.0},
}


class ConfigError(ValueError):
    def __init__(self, message: str, path: tuple = (), line: int | None = None, source=None):
        self.message = message
        self.path = path
        self.line = line
        self.source = source
        super().__init__(str(self))

    def __str__(self) -> str:
        where = str(self.source) if self.source else "<config>"
        if self.line is not None:
            where += f":{self.line}"
        key = ".".join(str(p) for p in self.path)
        return f"{where}: {key + ': ' if key else ''}{self.message}"


@dataclass
class ProblemSpec:
    kind: str = "synthetic"
    d: int = 20
    a1: float = 1.0
    a2: float = 1.0
    dataset_seed: int = 0
    n_samples: int = 2000
    n_features: int = 20
    shared: bool = True
    shift: list[float] | None = None

    def build(self) -> MultiObjectiveProblem:
        if self.kind in ("synthetic", "synthetic-weighted"):
            problem: MultiObjectiveProblem = SyntheticProblem(self.d, (self.a1, self.a2))
        else:
            problem = Logistic3Problem(
                self.n_samples, self.n_features, seed=self.dataset_seed, shared=self.shared
            )
        if self.shift is not None:
            problem = ShiftedProblem(problem, self.shift)
        return problem

    @property
    def n_objectives(self) -> int:
        return 3 if self.kind == "logistic3" else 2


@dataclass
class PreferenceSpec:
    count: int | None = 10
    seed: int = 0
    file: str | None = None
    normalize: bool = False

    def build(self, m: int, base: Path | None = None) -> PreferenceVectorSet:
        if self.file is not None:
            path = Path(self.file)
            if base is not None and not path.is_absolute():
                path = base / path
            prefs = load_preference_vectors(path, normalize=self.normalize)
            if prefs.n_objectives != m:
                raise ValueError(f"preference file has {prefs.n_objectives} columns, problem has {m} objectives")
            return prefs
        return even_preference_vectors(self.count, m, seed=self.seed)


@dataclass
class LinearWeightSpec:
    mode: str = "random"  # random | grid | explicit
    count: int = 100
    weights: list[list[float]] | None = None

    def build(self, m: int, seed: int) -> np.ndarray:
        if self.mode == "explicit":
            return np.asarray(self.weights, dtype=float)
        if self.mode == "grid":
            if m != 2:
                raise ValueError("grid weights are only defined for two objectives")
            w1 = np.linspace(0.0, 1.0, self.count)
            return np.column_stack([w1, 1.0 - w1])
        rng = np.random.default_rng(seed)
        if m == 2:
            w1 = rng.uniform(0.0, 1.0, self.count)
            return np.column_stack([w1, 1.0 - w1])
        return rng.dirichlet(np.ones(m), self.count)


@dataclass
class ExperimentConfig:
    problem: ProblemSpec = field(default_factory=ProblemSpec)
    algorithms: list[str] = field(default_factory=lambda: list(ALGORITHMS))
    preferences: PreferenceSpec = field(default_factory=PreferenceSpec)
    linear_weights: LinearWeightSpec = field(default_factory=LinearWeightSpec)
    mgda_runs: int | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    seeds: list[int] = field(default_factory=lambda: [0])
    output_dir: str = "results"
    workers: int | None = None
    hv_ref: list[float] | None = None
    source: Path | None = None

    def resolved(self) -> dict:
        """Fully materialized config as plain JSON data."""
        out = {
            "problem": dataclasses.asdict(self.problem),
            "algorithms": list(self.algorithms),
            "preferences": dataclasses.asdict(self.preferences),
            "linear_weights": dataclasses.asdict(self.linear_weights),
            "mgda_runs": self.mgda_runs,
            "solver": dataclasses.asdict(self.solver),
            "seeds": list(self.seeds),
            "output_dir": self.output_dir,
            "workers": self.workers,
            "hv_ref": self.hv_ref,
        }
        return out

    def output_path(self) -> Path:
        override = os.environ.get(OUTPUT_DIR_ENV)
        return Path(override) if override else Path(self.output_dir)

    def default_hv_ref(self) -> list[float] | None:
        if self.hv_ref is not None:
            return list(self.hv_ref)
        if self.problem.kind in ("synthetic", "synthetic-weighted"):
            shift = self.problem.shift or [0.0, 0.0]
            return [1.1 * self.problem.a1 + shift[0], 1.1 * self.problem.a2 + shift[1]]
        return None


# -- parsing ---------------------------------------------------------------


def _locate(text: str | None, path: tuple) -> int | None:
    if not text or not path:
        return None
    pos = 0
    line = None
    for key in path:
        if isinstance(key, int):
            continue
        m = re.compile(r'"' + re.escape(str(key)) + r'"\s*:').search(text, pos)
        if m is None:
            break
        pos = m.end()
        line = text.count("\n", 0, m.start()) + 1
    return line


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and np.isfinite(v)


class _Parser:
    def __init__(self, text: str | None, source):
        self.text = text
        self.source = source

    def error(self, message, path=()):
        return ConfigError(message, tuple(path), _locate(self.text, tuple(path)), self.source)

    def section(self, data, name, allowed, path):
        if not isinstance(data, dict):
            raise self.error(f"{name} must be an object", path)
        for key in data:
            if key not in allowed:
                raise self.error(f"unknown key (allowed: {', '.join(sorted(allowed))})", path + (key,))
        return data

    def parse(self, data) -> ExperimentConfig:
        top = {
            "problem", "algorithms", "preferences", "linear_weights", "mgda_runs",
            "solver", "seeds", "output_dir", "workers", "hv_ref",
        }
        self.section(data, "config", top, ())
        problem = self.problem(data.get("problem", {}))
        cfg = ExperimentConfig(problem=problem, source=self.source)

        algos = data.get("algorithms", "all")
        if algos == "all":
            algos = list(ALGORITHMS)
        if isinstance(algos, str):
            algos = [algos]
        if not isinstance(algos, list) or not algos:
            raise self.error("must be 'all' or a non-empty list", ("algorithms",))
        for a in algos:
            if a == "all":
                algos = list(ALGORITHMS)
                break
            if a not in ALGORITHMS:
                raise self.error(f"unknown algorithm {a!r} (choose from {', '.join(ALGORITHMS)}, all)", ("algorithms",))
        cfg.algorithms = [a for a in ALGORITHMS if a in algos]

        cfg.preferences = self.preferences(data.get("preferences", {}), problem.n_objectives)
        cfg.linear_weights = self.linear(data.get("linear_weights", {}), problem.n_objectives)
        cfg.solver = self.solver(data.get("solver", {}), problem.kind)

        if "mgda_runs" in data and data["mgda_runs"] is not None:
            if not _is_int(data["mgda_runs"]) or data["mgda_runs"] < 1:
                raise self.error("must be a positive integer", ("mgda_runs",))
            cfg.mgda_runs = data["mgda_runs"]
        seeds = data.get("seeds", [0])
        if _is_int(seeds):
            seeds = [seeds]
        if not isinstance(seeds, list) or not seeds or not all(_is_int(s) for s in seeds):
            raise self.error("must be a non-empty list of integers", ("seeds",))
        if len(set(seeds)) != len(seeds):
            raise self.error("seeds must be distinct", ("seeds",))
        cfg.seeds = seeds
        if "output_dir" in data:
            if not isinstance(data["output_dir"], str) or not data["output_dir"]:
                raise self.error("must be a non-empty string", ("output_dir",))
            cfg.output_dir = data["output_dir"]
        if data.get("workers") is not None:
            if not _is_int(data["workers"]) or data["workers"] < 1:
                raise self.error("must be a positive integer", ("workers",))
            cfg.workers = data["workers"]
        if data.get("hv_ref") is not None:
            ref = data["hv_ref"]
            if not isinstance(ref, list) or len(ref) != problem.n_objectives or not all(_is_num(x) for x in ref):
                raise self.error(f"must be a list of {problem.n_objectives} numbers", ("hv_ref",))
            cfg.hv_ref = [float(x) for x in ref]
        return cfg

    def problem(self, data) -> ProblemSpec:
        path = ("problem",)
        fields = {f.name for f in dataclasses.fields(ProblemSpec)}
        self.section(data, "problem", fields, path)
        spec = ProblemSpec()
        kind = data.get("kind", "synthetic")
        if kind not in PROBLEM_KINDS:
            raise self.error(f"unknown problem kind {kind!r} (choose from {', '.join(PROBLEM_KINDS)})", path + ("kind",))
        spec.kind = kind
        for key in ("d", "dataset_seed", "n_samples", "n_features"):
            if key in data:
                v = data[key]
                ok = _is_int(v) and (v >= 0 if key == "dataset_seed" else v >= 1)
                if not ok:
                    raise self.error("must be a positive integer", path + (key,))
                setattr(spec, key, v)
        for key in ("a1", "a2"):
            if key in data:
                if not _is_num(data[key]) or data[key] <= 0:
                    raise self.error("must be a positive number", path + (key,))
                setattr(spec, key, float(data[key]))
        if "shared" in data:
            if not isinstance(data["shared"], bool):
                raise self.error("must be true or false", path + ("shared",))
            spec.shared = data["shared"]
        if data.get("shift") is not None:
            s = data["shift"]
            if not isinstance(s, list) or len(s) != spec.n_objectives or not all(_is_num(x) for x in s):
                raise self.error(f"must be a list of {spec.n_objectives} numbers", path + ("shift",))
            spec.shift = [float(x) for x in s]
        return spec

    def preferences(self, data, m) -> PreferenceSpec:
        path = ("preferences",)
        self.section(data, "preferences", {"count", "seed", "file", "normalize"}, path)
        spec = PreferenceSpec()
        if "file" in data and "count" in data:
            raise self.error("give either 'count' or 'file', not both", path + ("file",))
        if "count" in data:
            if not _is_int(data["count"]) or data["count"] < 2:
                raise self.error("must be an integer >= 2", path + ("count",))
            spec.count = data["count"]
        if "seed" in data:
            if not _is_int(data["seed"]):
                raise self.error("must be an integer", path + ("seed",))
            spec.seed = data["seed"]
        if "file" in data:
            if not isinstance(data["file"], str):
                raise self.error("must be a path string", path + ("file",))
            spec.file = data["file"]
            spec.count = None
        if "normalize" in data:
            if not isinstance(data["normalize"], bool):
                raise self.error("must be true or false", path + ("normalize",))
            spec.normalize = data["normalize"]
        try:
            spec.build(m, self.base_dir)
        except (OSError, ValueError) as exc:
            raise self.error(str(exc), path + (("file",) if spec.file else ("count",))) from exc
        return spec

    @property
    def base_dir(self) -> Path | None:
        return Path(self.source).parent if self.source else None

    def linear(self, data, m) -> LinearWeightSpec:
        path = ("linear_weights",)
        self.section(data, "linear_weights", {"mode", "count", "weights"}, path)
        spec = LinearWeightSpec()
        mode = data.get("mode", "random")
        if mode not in ("random", "grid", "explicit"):
            raise self.error("must be 'random', 'grid' or 'explicit'", path + ("mode",))
        spec.mode = mode
        if "count" in data:
            if not _is_int(data["count"]) or data["count"] < 1:
                raise self.error("must be a positive integer", path + ("count",))
            spec.count = data["count"]
        if mode == "grid" and m != 2:
            raise self.error("grid mode needs a two-objective problem", path + ("mode",))
        if mode == "explicit":
            w = data.get("weights")
            if not isinstance(w, list) or not w:
                raise self.error("explicit mode needs a non-empty list of weight vectors", path + ("weights",))
            arr = []
            for row in w:
                if not isinstance(row, list) or len(row) != m or not all(_is_num(x) for x in row):
                    raise self.error(f"each weight vector needs {m} numbers", path + ("weights",))
                row = [float(x) for x in row]
                if min(row) < 0 or abs(sum(row) - 1.0) > 1e-9:
                    raise self.error("weights must be non-negative and sum to 1", path + ("weights",))
                arr.append(row)
            spec.weights = arr
            spec.count = len(arr)
        elif "weights" in data:
            raise self.error("only allowed with mode 'explicit'", path + ("weights",))
        return spec

    def solver(self, data, kind) -> SolverConfig:
        path = ("solver",)
        self.section(data, "solver", set(_SOLVER_FIELDS), path)
        values = dict(_SOLVER_DEFAULTS.get(kind, {}))
        for key, v in data.items():
            default = _SOLVER_FIELDS[key].default
            if isinstance(default, bool):
                if not isinstance(v, bool):
                    raise self.error("must be true or false", path + (key,))
            elif isinstance(default, int):
                if not _is_int(v):
                    raise self.error("must be an integer", path + (key,))
            elif not _is_num(v):
                raise self.error("must be a finite number", path + (key,))
            values[key] = v
        try:
            return SolverConfig(**values)
        except ValueError as exc:
            name = str(exc).split()[0]
            raise self.error(str(exc), path + ((name,) if name in data else ())) from exc


def parse_config(data, text: str | None = None, source=None) -> ExperimentConfig:
    """Validate a decoded JSON document."""
    return _Parser(text, source).parse(data)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", source=path) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno, source=path) from exc
    return parse_config(data, text, path)
