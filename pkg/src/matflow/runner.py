"""Config-driven experiment execution with reproducible artifacts.

run() maps a validated ExperimentConfig onto the library, writes the
requested artifacts, evaluates the requested invariant checks, and always
leaves a manifest.json next to the outputs -- also on failure.  Outputs are
byte-identical for identical (config, seed, version); the manifest itself
additionally records wall-clock duration and is therefore excluded from
that contract.
"""

from __future__ import annotations

import time
import traceback
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, emit_config
from .convexity import (
    bochner_identity_check,
    heat_positivity_experiment,
    is_operator_convex_sampled,
    parse_function_spec,
)
from .errors import MatflowError
from .flows import (
    FlowTrace,
    detect_convergence,
    normalized_flow_picard,
    normalized_flow_rk4,
    spectral_trace,
)
from .geometry import TorusModel, build_model
from .linalg import hs_norm_sq
from .matrixio import (
    load_matrix,
    matrix_to_json,
    write_json_report,
    write_spectrum_csv,
    write_trace_csv,
)
from .presets import preset
from .sampling import GENERATOR_NAME, random_hermitian, rng_from_seed
from .stability import entropy_stability_experiment, hs_stability_experiment

DEFAULT_ARTIFACT = {
    "spectrum": ("spectrum.csv", "csv"),
    "evolve": ("trace.csv", "csv"),
    "stability": ("report.json", "json"),
    "entropy-stability": ("report.json", "json"),
    "convexity": ("report.json", "json"),
    "heat-positivity": ("report.json", "json"),
    "bochner": ("report.json", "json"),
}


@dataclass
class RunManifest:
    kind: str
    config: dict
    version: str = __version__
    generator: str = GENERATOR_NAME
    artifacts: list = field(default_factory=list)
    checks: dict = field(default_factory=dict)
    check_notes: dict = field(default_factory=dict)
    passed: bool = True
    status: str = "ok"
    error: str | None = None
    duration_s: float = 0.0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "config": self.config,
            "version": self.version,
            "generator": self.generator,
            "artifacts": list(self.artifacts),
            "checks": {k: ("pass" if v else "fail") for k, v in self.checks.items()},
            "check_notes": dict(self.check_notes),
            "passed": self.passed,
            "status": self.status,
            "error": self.error,
            "duration_s": self.duration_s,
        }


def _build_model_from_config(cfg: ExperimentConfig) -> TorusModel:
    spec = cfg.model
    if spec.variant == "custom":
        return build_model(
            spec.n,
            "custom",
            x=load_matrix(spec.x_file),
            y=load_matrix(spec.y_file),
        )
    return build_model(spec.n, "clock-shift")


def _resolve_init(spec, model: TorusModel, seed: int) -> np.ndarray:
    if spec.preset is not None:
        return preset(spec.preset, model, seed=seed)
    return load_matrix(spec.file)


def _artifact_targets(cfg: ExperimentConfig, out_dir: Path):
    if cfg.output.paths:
        pairs = list(zip(cfg.output.paths, cfg.output.formats))
    else:
        pairs = [DEFAULT_ARTIFACT[cfg.kind]]
    out = []
    for path, fmt in pairs:
        p = Path(path)
        if not p.is_absolute():
            p = out_dir / p
        out.append((p, fmt))
    return out


def _trace_summary(trace: FlowTrace) -> dict:
    rep = trace.convergence
    summary = {
        "solver": trace.solver,
        "samples": len(trace.observations),
        "info": trace.info,
        "final": {
            "t": trace.observations[-1].t,
            "lambda": trace.observations[-1].lam,
            "residual": trace.observations[-1].residual,
            "norm_sq": trace.observations[-1].norm_sq,
        },
    }
    if rep is not None:
        summary["convergence"] = {
            "converged": rep.converged,
            "lambda_inf": rep.lambda_inf,
            "matched_index": rep.matched_index,
            "cluster": list(rep.cluster),
            "final_residual": rep.final_residual,
            "t_converged": rep.t_converged,
            "trace_free_input": rep.trace_free_input,
            "gap_bound_ok": rep.gap_bound_ok,
        }
    return summary


def _cumtrap(f: np.ndarray, ts: np.ndarray) -> np.ndarray:
    out = np.zeros_like(f)
    out[1:] = np.cumsum((f[1:] + f[:-1]) * np.diff(ts) / 2.0)
    return out


def _evolve_checks(trace: FlowTrace, cfg: ExperimentConfig, checks: dict, notes: dict):
    requested = cfg.checks
    norms = trace.norms_sq()
    lams = trace.lambdas()
    if "norm-conservation" in requested:
        # spectral is exact; RK4 drift is the integrator error; the Picard
        # iterate carries O(dt^2) quadrature drift from int(lambda)
        tol = {"spectral": 1e-9, "rk4": 1e-6, "picard": 1e-4}.get(trace.solver, 1e-6)
        drift = float(np.abs(norms - 1.0).max())
        checks["norm-conservation"] = drift <= tol
        notes["norm-conservation"] = f"max |M-1| = {drift:.3e} (tol {tol:.0e})"
    if "rayleigh-monotone" in requested:
        rises = float(np.max(np.diff(lams), initial=-np.inf))
        checks["rayleigh-monotone"] = rises <= 1e-10
        notes["rayleigh-monotone"] = f"max per-step increase = {rises:.3e}"
    if "trace-law" in requested:
        ts = trace.times()
        traces = trace.traces()
        if abs(traces[0]) <= 1e-12:
            err = float(np.abs(traces).max())
            checks["trace-law"] = err <= 1e-10
            notes["trace-law"] = f"max |trace| = {err:.3e} (trace-free)"
        else:
            integral = _cumtrap(lams, ts)
            err = float(np.abs(traces - traces[0] * np.exp(integral)).max())
            checks["trace-law"] = err <= 1e-6 * max(1.0, abs(traces[0]))
            notes["trace-law"] = f"max deviation from exp law = {err:.3e}"
    if "positivity" in requested:
        eigs = [o.min_eig for o in trace.observations]
        ok = all(e is not None and e > 0.0 for e in eigs)
        checks["positivity"] = ok
        worst = min((e for e in eigs if e is not None), default=None)
        notes["positivity"] = f"min over trajectory = {worst}"
    if "logdet-monotone" in requested:
        lds = [o.log_det for o in trace.observations]
        if any(v is None for v in lds):
            checks["logdet-monotone"] = False
            notes["logdet-monotone"] = "log det undefined somewhere on the trajectory"
        else:
            dips = float(np.max(-np.diff(np.array(lds)), initial=-np.inf))
            checks["logdet-monotone"] = dips <= 1e-8
            notes["logdet-monotone"] = f"worst per-step decrease = {dips:.3e}"
    if "converged" in requested:
        rep = trace.convergence
        checks["converged"] = bool(rep is not None and rep.converged)
        if rep is not None:
            notes["converged"] = (
                f"lambda_inf = {rep.lambda_inf:.9g}, residual = {rep.final_residual:.3e}"
            )


def _stability_payload(report) -> dict:
    return {
        "kind": report.kind,
        "times": report.times,
        "hs_dist_sq": report.hs_dist_sq,
        "trace_dist": report.trace_dist,
        "entropy_gap": report.entropy_gap,
        "fannes_rhs": report.fannes_rhs,
        "estimated_C1": report.estimated_C1,
        "all_bounds_hold": report.all_bounds_hold,
        "in_regime": report.in_regime,
        "fannes_d": report.fannes_d,
    }


def _run_kind(cfg: ExperimentConfig, out_dir: Path, manifest: RunManifest) -> None:
    checks = manifest.checks
    notes = manifest.check_notes
    targets = _artifact_targets(cfg, out_dir)

    if cfg.kind == "spectrum":
        model = _build_model_from_config(cfg)
        basis = model.eigenbasis()
        if "kernel-dimension-1" in cfg.checks:
            checks["kernel-dimension-1"] = True  # eigenbasis() rejects otherwise
            notes["kernel-dimension-1"] = f"gap lambda_1 = {basis.gap:.9g}"
        if "psd-spectrum" in cfg.checks:
            low = float(basis.eigenvalues[0])
            checks["psd-spectrum"] = low >= -1e-10
            notes["psd-spectrum"] = f"lowest eigenvalue = {low:.3e}"
        for path, fmt in targets:
            if fmt == "csv":
                write_spectrum_csv(path, basis.eigenvalues)
            else:
                payload = {
                    "n": model.n,
                    "variant": model.variant,
                    "eigenvalues": basis.eigenvalues,
                    "gap": basis.gap,
                }
                if cfg.include_matrices:
                    payload["eigenmatrices"] = [
                        matrix_to_json(m) for m in basis.eigenmatrices
                    ]
                write_json_report(path, payload)
            manifest.artifacts.append(str(path))
        return

    if cfg.kind == "evolve":
        model = _build_model_from_config(cfg)
        a0 = _resolve_init(cfg.init, model, cfg.seed)
        sol = cfg.solver
        if sol.solver == "spectral":
            times = np.linspace(0.0, sol.t_end, sol.n_steps + 1)
            trace = spectral_trace(model, a0, times, normalized=True)
        elif sol.solver == "picard":
            trace = normalized_flow_picard(
                model, a0, sol.t_end, k_max=sol.k_max, tol=sol.tol, dt=sol.dt
            )
        else:
            trace = normalized_flow_rk4(
                model, a0, sol.dt, sol.t_end, renormalize_each_step=sol.renormalize
            )
        trace.convergence = detect_convergence(trace, model.eigenbasis(), tol=sol.tol)
        _evolve_checks(trace, cfg, checks, notes)
        for path, fmt in targets:
            if fmt == "csv":
                write_trace_csv(path, trace)
            else:
                write_json_report(path, _trace_summary(trace))
            manifest.artifacts.append(str(path))
        return

    if cfg.kind in ("stability", "entropy-stability"):
        model = _build_model_from_config(cfg)
        u0 = _resolve_init(cfg.u0, model, cfg.seed)
        v0 = _resolve_init(cfg.v0, model, cfg.seed + 1)
        if cfg.kind == "stability":
            report = hs_stability_experiment(
                model, u0, v0, cfg.solver.t_end,
                n_steps=cfg.solver.n_steps, fannes_d=cfg.fannes_d,
            )
            if "exp-bound" in cfg.checks:
                checks["exp-bound"] = bool(report.all_bounds_hold)
                notes["exp-bound"] = f"estimated C1 = {report.estimated_C1:.6g}"
        else:
            report = entropy_stability_experiment(
                model, u0, v0, cfg.solver.t_end,
                d=cfg.fannes_d, n_steps=cfg.solver.n_steps,
            )
            if "entropy-bound" in cfg.checks:
                checks["entropy-bound"] = bool(report.in_regime and report.all_bounds_hold)
                notes["entropy-bound"] = (
                    f"in_regime = {report.in_regime}, estimated C1 = {report.estimated_C1:.6g}"
                )
        for path, fmt in targets:
            if fmt == "json":
                write_json_report(path, _stability_payload(report))
            else:
                lines = ["t,hs_dist_sq,trace_dist,entropy_gap,fannes_rhs"]
                from .matrixio import fmt_float

                for j, t in enumerate(report.times):
                    lines.append(",".join([
                        fmt_float(t),
                        fmt_float(report.hs_dist_sq[j]),
                        fmt_float(report.trace_dist[j]),
                        fmt_float(report.entropy_gap[j]),
                        fmt_float(report.fannes_rhs[j]),
                    ]))
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text("\n".join(lines) + "\n", encoding="utf-8")
            manifest.artifacts.append(str(path))
        return

    if cfg.kind == "convexity":
        f = parse_function_spec(cfg.function)
        verdict = is_operator_convex_sampled(f, cfg.dim, cfg.trials, cfg.seed)
        if "convex-on-samples" in cfg.checks:
            checks["convex-on-samples"] = verdict.is_convex_on_samples
            notes["convex-on-samples"] = (
                f"worst gap min-eig = {verdict.worst_gap_min_eig:.3e}"
            )
        if "violation-found" in cfg.checks:
            checks["violation-found"] = not verdict.is_convex_on_samples
            notes["violation-found"] = (
                f"worst gap min-eig = {verdict.worst_gap_min_eig:.3e}"
            )
        payload = {
            "function": f.name,
            "dim": verdict.dim,
            "trials": verdict.trials,
            "seed": verdict.seed,
            "is_convex_on_samples": verdict.is_convex_on_samples,
            "worst_gap_min_eig": verdict.worst_gap_min_eig,
        }
        if verdict.witness is not None:
            a, b, mu = verdict.witness
            payload["witness"] = {
                "a": matrix_to_json(a),
                "b": matrix_to_json(b),
                "mu": mu,
            }
        for path, _ in targets:
            write_json_report(path, payload)
            manifest.artifacts.append(str(path))
        return

    if cfg.kind == "heat-positivity":
        model = _build_model_from_config(cfg)
        a0 = _resolve_init(cfg.init, model, cfg.seed)
        f = parse_function_spec(cfg.function)
        start, step, end = cfg.t_grid
        count = int(np.floor((end - start) / step + 1e-9)) + 1
        grid = start + step * np.arange(count)
        report = heat_positivity_experiment(model, f, a0, grid)
        if "f-positive" in cfg.checks:
            checks["f-positive"] = bool(not report.refused and report.all_positive)
            notes["f-positive"] = (
                report.reason if report.refused
                else f"min over grid = {float(np.min(report.min_eig_f)):.6g}"
            )
        payload = {
            "function": report.function,
            "refused": report.refused,
            "reason": report.reason,
            "times": report.times,
            "min_eig_f": report.min_eig_f,
            "min_eig_state": report.min_eig_state,
            "all_positive": report.all_positive,
        }
        for path, _ in targets:
            write_json_report(path, payload)
            manifest.artifacts.append(str(path))
        return

    if cfg.kind == "bochner":
        model = _build_model_from_config(cfg)
        residuals = []
        scales = []
        if cfg.init is not None:
            mats = [_resolve_init(cfg.init, model, cfg.seed)]
        else:
            trials = cfg.trials or 100
            mats = [
                random_hermitian(model.n, rng_from_seed(cfg.seed, k))
                for k in range(trials)
            ]
        for a in mats:
            residuals.append(bochner_identity_check(model, a))
            scales.append(max(1.0, hs_norm_sq(a)))
        residuals = np.array(residuals)
        scales = np.array(scales)
        rel = residuals / scales
        if "identity" in cfg.checks:
            checks["identity"] = bool(np.all(rel <= 1e-9))
            notes["identity"] = f"worst relative residual = {float(rel.max()):.3e}"
        payload = {
            "n": model.n,
            "count": len(mats),
            "max_relative_residual": float(rel.max()),
            "residuals": residuals,
        }
        for path, _ in targets:
            write_json_report(path, payload)
            manifest.artifacts.append(str(path))
        return

    raise MatflowError(f"unhandled kind {cfg.kind!r}")


def run(cfg: ExperimentConfig, out_dir=".", quiet: bool = False) -> RunManifest:
    """Execute one experiment; returns the manifest (also written to disk)."""
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(kind=cfg.kind, config=emit_config(cfg))
    started = time.monotonic()
    try:
        _run_kind(cfg, out_path, manifest)
        manifest.passed = all(manifest.checks.values())
    except Exception as exc:  # noqa: BLE001 - manifest must record any failure
        manifest.status = "error"
        manifest.passed = False
        manifest.error = f"{type(exc).__name__}: {exc}"
        if not quiet:
            traceback.print_exc()
    manifest.duration_s = time.monotonic() - started
    write_json_report(out_path / "manifest.json", manifest.to_dict())
    if not quiet:
        for name, ok in manifest.checks.items():
            print(f"check {name}: {'pass' if ok else 'FAIL'}")
        print(f"{cfg.kind}: {manifest.status}, passed={manifest.passed}")
    return manifest
