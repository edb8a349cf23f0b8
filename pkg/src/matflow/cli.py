"""Command-line interface.

Exit codes: 0 all requested checks passed, 1 a check failed or the run
errored, 2 usage or configuration problems.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import ExperimentConfig, parse_config
from .errors import ConfigError
from .runner import run

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="PRNG seed (default 0)")
    p.add_argument("--out-dir", default=".", help="directory for artifacts")
    p.add_argument("--quiet", action="store_true", help="suppress progress output")


def _init_doc(text: str) -> dict:
    if text.endswith(".json"):
        return {"file": text}
    return {"preset": text}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matflow",
        description="Norm-preserving flows on the matrix torus: spectra, "
        "trajectories, stability and convexity experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="Laplacian eigenvalues and eigen-matrices")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--variant", choices=["clock-shift", "custom"], default="clock-shift")
    p.add_argument("--x", help="Hermitian generator X (matrix JSON, custom variant)")
    p.add_argument("--y", help="Hermitian generator Y (matrix JSON, custom variant)")
    p.add_argument("--out", required=True, help="output file (.csv or .json)")
    p.add_argument("--matrices", action="store_true",
                   help="include eigen-matrices in JSON output")
    _add_common(p)

    p = sub.add_parser("evolve", help="solve the norm-preserving flow")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--init", required=True, help="preset name or matrix JSON file")
    p.add_argument("--solver", choices=["spectral", "picard", "rk4"], default="spectral")
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--k-max", type=int, default=50)
    p.add_argument("--n-steps", type=int, default=200,
                   help="grid intervals for the spectral solver")
    p.add_argument("--renormalize", action="store_true",
                   help="project RK4 steps back to unit norm")
    p.add_argument("--check", action="append", default=None, dest="checks")
    p.add_argument("--out", required=True, help="trace CSV (or .json summary)")
    _add_common(p)

    p = sub.add_parser("stability", help="HS-distance stability of two flows")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--u0", required=True)
    p.add_argument("--v0", required=True)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--n-steps", type=int, default=200)
    p.add_argument("--fannes-d", type=int, default=None)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("entropy-stability", help="entropy-gap stability of two flows")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--u0", required=True)
    p.add_argument("--v0", required=True)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--n-steps", type=int, default=200)
    p.add_argument("--fannes-d", type=int, default=None)
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("convexity", help="sampled operator-convexity verdict")
    p.add_argument("--f", required=True,
                   help="identity|square|cube|resolvent:<shift>|loewner:<shift>")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--expect-violation", action="store_true",
                   help="check that a violation witness is found")
    p.add_argument("--out", default=None)
    _add_common(p)

    p = sub.add_parser("heat-positivity", help="f(a(t)) > 0 along the heat flow")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--init", required=True)
    p.add_argument("--t-grid", default="0:0.5:5", help="start:step:end")
    p.add_argument("--out", required=True)
    _add_common(p)

    p = sub.add_parser("bochner", help="Laplacian product-rule identity residual")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--init", default=None, help="optional single matrix to check")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--out", default=None)
    _add_common(p)

    p = sub.add_parser("run", help="execute a JSON experiment config")
    p.add_argument("--config", required=True)
    _add_common(p)
    return parser


def _config_doc_from_args(args: argparse.Namespace) -> dict:
    cmd = args.command
    doc: dict = {"kind": cmd, "seed": args.seed}
    if cmd == "spectrum":
        model = {"n": args.n, "variant": args.variant}
        if args.x:
            model["x"] = args.x
        if args.y:
            model["y"] = args.y
        doc["model"] = model
        doc["output"] = {"paths": [args.out]}
        if args.matrices:
            doc["include_matrices"] = True
    elif cmd == "evolve":
        doc["model"] = {"n": args.n}
        doc["init"] = _init_doc(args.init)
        doc["solver"] = {
            "solver": args.solver,
            "dt": args.dt,
            "t_end": args.t_end,
            "tol": args.tol,
            "k_max": args.k_max,
            "n_steps": args.n_steps,
            "renormalize": bool(args.renormalize),
        }
        if args.checks is not None:
            doc["checks"] = args.checks
        doc["output"] = {"paths": [args.out]}
    elif cmd in ("stability", "entropy-stability"):
        doc["model"] = {"n": args.n}
        doc["u0"] = _init_doc(args.u0)
        doc["v0"] = _init_doc(args.v0)
        doc["solver"] = {"t_end": args.t_end, "n_steps": args.n_steps}
        if args.fannes_d is not None:
            doc["fannes_d"] = args.fannes_d
        doc["output"] = {"paths": [args.out]}
    elif cmd == "convexity":
        doc["function"] = args.f
        doc["dim"] = args.dim
        doc["trials"] = args.trials
        if args.expect_violation:
            doc["checks"] = ["violation-found"]
        if args.out:
            doc["output"] = {"paths": [args.out]}
    elif cmd == "heat-positivity":
        doc["model"] = {"n": args.n}
        doc["function"] = args.f
        doc["init"] = _init_doc(args.init)
        parts = args.t_grid.split(":")
        if len(parts) != 3:
            raise ConfigError(["--t-grid must look like start:step:end"])
        try:
            doc["t_grid"] = [float(x) for x in parts]
        except ValueError:
            raise ConfigError([f"--t-grid has non-numeric parts: {args.t_grid!r}"]) from None
        doc["output"] = {"paths": [args.out]}
    elif cmd == "bochner":
        doc["model"] = {"n": args.n}
        if args.init:
            doc["init"] = _init_doc(args.init)
        doc["trials"] = args.trials
        if args.out:
            doc["output"] = {"paths": [args.out]}
    return doc


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        if args.command == "run":
            try:
                with open(args.config, "r", encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                print(f"config error: {exc}", file=sys.stderr)
                return EXIT_USAGE
            cfg: ExperimentConfig = parse_config(text)
            if args.seed:
                cfg.seed = args.seed
        else:
            cfg = parse_config(_config_doc_from_args(args))
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_USAGE

    manifest = run(cfg, out_dir=args.out_dir, quiet=args.quiet)
    if manifest.status != "ok" or not manifest.passed:
        return EXIT_CHECK_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
