"""Declarative experiment configs: parsing, validation, round-tripping.

Validation is exhaustive: parse_config reports every problem it can find
in one pass (ConfigError.problems), not just the first.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .errors import ConfigError
from .presets import is_preset_name

KINDS = (
    "spectrum",
    "evolve",
    "stability",
    "entropy-stability",
    "convexity",
    "heat-positivity",
    "bochner",
)

SOLVERS = ("spectral", "picard", "rk4")
FORMATS = ("csv", "json")

KIND_CHECKS = {
    "spectrum": ("kernel-dimension-1", "psd-spectrum"),
    "evolve": (
        "norm-conservation",
        "rayleigh-monotone",
        "trace-law",
        "positivity",
        "logdet-monotone",
        "converged",
    ),
    "stability": ("exp-bound",),
    "entropy-stability": ("entropy-bound",),
    "convexity": ("convex-on-samples", "violation-found"),
    "heat-positivity": ("f-positive",),
    "bochner": ("identity",),
}

DEFAULT_CHECKS = {
    "spectrum": ["kernel-dimension-1", "psd-spectrum"],
    "evolve": ["norm-conservation", "rayleigh-monotone"],
    "stability": ["exp-bound"],
    "entropy-stability": ["entropy-bound"],
    "convexity": ["convex-on-samples"],
    "heat-positivity": ["f-positive"],
    "bochner": ["identity"],
}


@dataclass(frozen=True)
class ModelSpec:
    n: int
    variant: str = "clock-shift"
    x_file: str | None = None
    y_file: str | None = None


@dataclass(frozen=True)
class InitSpec:
    preset: str | None = None
    file: str | None = None

    def describe(self) -> str:
        return self.preset if self.preset is not None else str(self.file)


@dataclass(frozen=True)
class SolverSpec:
    solver: str = "spectral"
    dt: float = 1e-3
    t_end: float = 1.0
    tol: float = 1e-8
    k_max: int = 50
    renormalize: bool = False
    n_steps: int = 200


@dataclass(frozen=True)
class OutputSpec:
    paths: tuple = ()
    formats: tuple = ()


@dataclass
class ExperimentConfig:
    kind: str
    model: ModelSpec | None = None
    init: InitSpec | None = None
    u0: InitSpec | None = None
    v0: InitSpec | None = None
    solver: SolverSpec = field(default_factory=SolverSpec)
    function: str | None = None
    dim: int | None = None
    trials: int | None = None
    t_grid: tuple | None = None
    fannes_d: int | None = None
    checks: list = field(default_factory=list)
    output: OutputSpec = field(default_factory=OutputSpec)
    seed: int = 0
    include_matrices: bool = False


def _parse_init(obj, where: str, problems: list) -> InitSpec | None:
    if not isinstance(obj, dict):
        problems.append(f"{where}: must be an object with 'preset' or 'file'")
        return None
    preset = obj.get("preset")
    file = obj.get("file")
    if (preset is None) == (file is None):
        problems.append(f"{where}: exactly one of 'preset' or 'file' is required")
        return None
    if preset is not None and not is_preset_name(str(preset)):
        problems.append(f"{where}: unknown preset {preset!r}")
        return None
    if file is not None and not os.path.isfile(str(file)):
        problems.append(f"{where}: matrix file {file!r} is not readable")
        return None
    return InitSpec(preset=preset, file=file)


def _parse_model(obj, problems: list) -> ModelSpec | None:
    if not isinstance(obj, dict):
        problems.append("model: must be an object with at least 'n'")
        return None
    n = obj.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        problems.append(f"model.n: must be an integer >= 2, got {n!r}")
        return None
    variant = obj.get("variant", "clock-shift")
    x_file = obj.get("x")
    y_file = obj.get("y")
    if variant not in ("clock-shift", "custom"):
        problems.append(f"model.variant: unknown variant {variant!r}")
        return None
    if variant == "custom":
        for key, val in (("x", x_file), ("y", y_file)):
            if val is None:
                problems.append(f"model.{key}: required for the custom variant")
            elif not os.path.isfile(str(val)):
                problems.append(f"model.{key}: generator file {val!r} is not readable")
    elif x_file is not None or y_file is not None:
        problems.append("model: generator files are only valid with variant 'custom'")
    return ModelSpec(n=n, variant=variant, x_file=x_file, y_file=y_file)


def _parse_solver(obj, problems: list) -> SolverSpec:
    if obj is None:
        return SolverSpec()
    if not isinstance(obj, dict):
        problems.append("solver: must be an object")
        return SolverSpec()
    spec = SolverSpec(
        solver=obj.get("solver", "spectral"),
        dt=float(obj.get("dt", 1e-3)),
        t_end=float(obj.get("t_end", 1.0)),
        tol=float(obj.get("tol", 1e-8)),
        k_max=int(obj.get("k_max", 50)),
        renormalize=bool(obj.get("renormalize", False)),
        n_steps=int(obj.get("n_steps", 200)),
    )
    if spec.solver not in SOLVERS:
        problems.append(f"solver.solver: unknown solver {spec.solver!r}")
    if spec.dt <= 0:
        problems.append("solver.dt: must be positive")
    if spec.t_end <= 0:
        problems.append("solver.t_end: must be positive")
    if spec.tol <= 0:
        problems.append("solver.tol: must be positive")
    if spec.k_max < 1:
        problems.append("solver.k_max: must be >= 1")
    if spec.n_steps < 1:
        problems.append("solver.n_steps: must be >= 1")
    return spec


def _parse_output(obj, problems: list) -> OutputSpec:
    if obj is None:
        return OutputSpec()
    if not isinstance(obj, dict):
        problems.append("output: must be an object")
        return OutputSpec()
    paths = obj.get("paths", [])
    if not isinstance(paths, list) or not all(isinstance(p, str) and p for p in paths):
        problems.append("output.paths: must be a list of nonempty strings")
        return OutputSpec()
    formats = obj.get("formats")
    if formats is None:
        formats = []
        for p in paths:
            ext = os.path.splitext(p)[1].lstrip(".").lower()
            formats.append(ext if ext in FORMATS else "")
    if (
        not isinstance(formats, list)
        or len(formats) != len(paths)
        or any(f not in FORMATS for f in formats)
    ):
        problems.append(
            f"output.formats: must match output.paths and use formats {FORMATS}"
        )
        return OutputSpec(paths=tuple(paths), formats=())
    return OutputSpec(paths=tuple(paths), formats=tuple(formats))


def parse_config(source) -> ExperimentConfig:
    """Parse a config from a JSON string, file object content, or dict.

    Raises ConfigError carrying *all* validation problems found.
    """
    if isinstance(source, (str, bytes)):
        try:
            doc = json.loads(source)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"invalid JSON: {exc}"]) from None
    else:
        doc = source
    if not isinstance(doc, dict):
        raise ConfigError(["config must be a JSON object"])

    problems: list[str] = []
    kind = doc.get("kind")
    if kind not in KINDS:
        problems.append(f"kind: unknown kind {kind!r}; expected one of {KINDS}")
        raise ConfigError(problems)

    cfg = ExperimentConfig(kind=kind)

    needs_model = kind != "convexity"
    if "model" in doc:
        cfg.model = _parse_model(doc["model"], problems)
    elif needs_model:
        problems.append("model: required field is missing")

    if "init" in doc:
        cfg.init = _parse_init(doc["init"], "init", problems)
    elif kind in ("evolve", "heat-positivity"):
        problems.append("init: required for this kind")

    for name in ("u0", "v0"):
        if name in doc:
            setattr(cfg, name, _parse_init(doc[name], name, problems))
        elif kind in ("stability", "entropy-stability"):
            problems.append(f"{name}: required for this kind")

    cfg.solver = _parse_solver(doc.get("solver"), problems)

    cfg.function = doc.get("function")
    if kind in ("convexity", "heat-positivity"):
        if cfg.function is None:
            problems.append("function: required for this kind")
        else:
            from .convexity import parse_function_spec

            try:
                parse_function_spec(str(cfg.function))
            except ValueError as exc:
                problems.append(f"function: {exc}")

    if kind == "convexity":
        cfg.dim = doc.get("dim")
        cfg.trials = doc.get("trials")
        if not isinstance(cfg.dim, int) or isinstance(cfg.dim, bool) or cfg.dim < 1:
            problems.append("dim: convexity needs a positive integer dimension")
        if not isinstance(cfg.trials, int) or isinstance(cfg.trials, bool) or cfg.trials < 1:
            problems.append("trials: convexity needs a positive trial count")
    elif "trials" in doc:
        cfg.trials = doc.get("trials")
        if not isinstance(cfg.trials, int) or cfg.trials < 1:
            problems.append("trials: must be a positive integer")

    if "t_grid" in doc:
        grid = doc["t_grid"]
        if (
            not isinstance(grid, list)
            or len(grid) != 3
            or not all(isinstance(x, (int, float)) for x in grid)
            or grid[1] <= 0
            or grid[2] < grid[0]
            or grid[0] < 0
        ):
            problems.append("t_grid: must be [start, step, end] with step > 0")
        else:
            cfg.t_grid = (float(grid[0]), float(grid[1]), float(grid[2]))
    elif kind == "heat-positivity":
        cfg.t_grid = (0.0, 0.5, 5.0)

    if "fannes_d" in doc:
        d = doc["fannes_d"]
        if not isinstance(d, int) or d < 1:
            problems.append("fannes_d: must be a positive integer")
        else:
            cfg.fannes_d = d

    checks = doc.get("checks")
    if checks is None:
        cfg.checks = list(DEFAULT_CHECKS[kind])
    elif not isinstance(checks, list) or not all(isinstance(c, str) for c in checks):
        problems.append("checks: must be a list of check names")
    else:
        known = KIND_CHECKS[kind]
        for c in checks:
            if c not in known:
                problems.append(f"checks: {c!r} is not a known check for kind {kind!r}")
        cfg.checks = list(checks)

    cfg.output = _parse_output(doc.get("output"), problems)

    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        problems.append(f"seed: must be an integer, got {seed!r}")
    else:
        cfg.seed = seed

    cfg.include_matrices = bool(doc.get("include_matrices", False))

    if problems:
        raise ConfigError(problems)
    return cfg


def emit_config(cfg: ExperimentConfig) -> dict:
    """Canonical dict form; parse_config(emit_config(c)) == c."""
    doc: dict = {"kind": cfg.kind, "seed": cfg.seed}
    if cfg.model is not None:
        model: dict = {"n": cfg.model.n, "variant": cfg.model.variant}
        if cfg.model.x_file is not None:
            model["x"] = cfg.model.x_file
        if cfg.model.y_file is not None:
            model["y"] = cfg.model.y_file
        doc["model"] = model
    for name in ("init", "u0", "v0"):
        spec = getattr(cfg, name)
        if spec is not None:
            doc[name] = (
                {"preset": spec.preset} if spec.preset is not None else {"file": spec.file}
            )
    doc["solver"] = {
        "solver": cfg.solver.solver,
        "dt": cfg.solver.dt,
        "t_end": cfg.solver.t_end,
        "tol": cfg.solver.tol,
        "k_max": cfg.solver.k_max,
        "renormalize": cfg.solver.renormalize,
        "n_steps": cfg.solver.n_steps,
    }
    if cfg.function is not None:
        doc["function"] = cfg.function
    if cfg.dim is not None:
        doc["dim"] = cfg.dim
    if cfg.trials is not None:
        doc["trials"] = cfg.trials
    if cfg.t_grid is not None:
        doc["t_grid"] = list(cfg.t_grid)
    if cfg.fannes_d is not None:
        doc["fannes_d"] = cfg.fannes_d
    doc["checks"] = list(cfg.checks)
    if cfg.output.paths:
        doc["output"] = {
            "paths": list(cfg.output.paths),
            "formats": list(cfg.output.formats),
        }
    if cfg.include_matrices:
        doc["include_matrices"] = True
    return doc
