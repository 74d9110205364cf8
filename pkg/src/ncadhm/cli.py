"""Command-line entry point.

Subcommands: relations, twistor-checks, solve, verify-monad, instanton,
charge, moduli-dim.  All output is deterministic JSON (sorted keys); exit
codes: 0 all checks passed, 1 a computational check failed (the report is
still emitted), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .hopf_twist import (
    ClassicalModel, MoyalModel, ToricModel, derive_relations, ModelMismatch,
)
from .adhm_solver import (
    NoConvergence, NotASolution, SolveConfig, moduli_dimension, solve,
)
from .instanton import (
    PointR4, QuadratureSpec, SingularRho, charge, curvature_samples,
    symbolic_projector_checks,
)
from .monad import (
    ADHMData, ShapeError, adhm_residual, build_monad, monad_residual,
)
from .star_algebra import C4, R4, StarAlgebraError
from .twistor import j_squared_residual, verify_embeddings


def _emit(obj, path=None):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _model_from_args(args) -> object:
    name = args.model
    if name == "classical":
        return ClassicalModel()
    if name == "moyal":
        return MoyalModel(args.hbar, args.alpha, args.beta)
    if name == "toric":
        return ToricModel(args.theta)
    raise ModelMismatch(f"unknown model {name!r}")


def _add_model_flags(p):
    p.add_argument("--model", required=True,
                   choices=["classical", "moyal", "toric"])
    p.add_argument("--hbar", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--theta", type=float, default=0.0)


def cmd_relations(args) -> int:
    model = _model_from_args(args)
    space = {"C4": C4, "R4": R4, "MonadM": "MonadM"}[args.space]
    rel = derive_relations(model, space, k=args.k,
                           calculus=not args.no_calculus)
    out = rel.to_json_dict()
    out["note"] = ("pairs without an explicit rule commute up to the "
                   "graded sign")
    _emit(out, args.out)
    return 0


def cmd_twistor_checks(args) -> int:
    report = verify_embeddings()
    j2 = j_squared_residual()
    out = report.to_json_dict()
    out["checks"].append({"name": "J_squared", "passed": j2 <= 1e-12,
                          "residual": j2, "tolerance": 1e-12})
    ok = report.passed and j2 <= 1e-12
    out["passed"] = ok
    _emit(out, args.out)
    return 0 if ok else 1


def cmd_solve(args) -> int:
    model = _model_from_args(args)
    cfg = SolveConfig(rng_seed=args.seed, multistarts=args.multistarts,
                      tolerance=args.tolerance,
                      max_iterations=args.max_iterations)
    try:
        data = solve(args.k, model, zeta=args.zeta, cfg=cfg)
    except NoConvergence as exc:
        _emit({"error": "NoConvergence", "best_residual": exc.best_residual},
              args.out)
        return 1
    c, h = adhm_residual(data)
    out = data.to_json_dict()
    out["report"] = {"complex_residual": c, "real_residual": h,
                     "seed": args.seed, "multistarts": args.multistarts,
                     "tolerance": cfg.tolerance}
    _emit(out, args.out)
    return 0


def cmd_verify_monad(args) -> int:
    data = _load_data(args.data)
    m = build_monad(data)
    res = monad_residual(m, data.model)
    norm = res.eval_max_norm(data.model.theta)
    c, h = adhm_residual(data)
    rep = symbolic_projector_checks(data) if args.full else None
    out = {
        "reality_residual": m.reality_residual(),
        "monad_residual": norm,
        "complex_residual": c,
        "real_residual": h,
        "tolerance": args.tolerance,
        "passed": norm <= args.tolerance,
    }
    if rep is not None:
        out["symbolic_checks"] = rep.to_json_dict()
        out["passed"] = out["passed"] and rep.passed
    _emit(out, args.out)
    return 0 if out["passed"] else 1


def cmd_instanton(args) -> int:
    data = _load_data(args.data)
    rng = np.random.default_rng(args.seed)
    pts = [PointR4(complex(*rng.standard_normal(2)),
                   complex(*rng.standard_normal(2)))
           for _ in range(args.points)]
    samples = curvature_samples(data, pts)
    worst = max(s.asd_residual for s in samples)
    traces = [float(np.trace(s.Q).real) for s in samples]
    out = {
        "points": args.points,
        "seed": args.seed,
        "max_asd_residual": worst,
        "asd_tolerance": 1e-6,
        "trace_Q_max_error": float(max(abs(t - 2 * data.k) for t in traces)),
        "passed": (not args.check_asd) or worst <= 1e-6,
    }
    _emit(out, args.out)
    return 0 if out["passed"] else 1


def cmd_charge(args) -> int:
    data = _load_data(args.data)
    q = charge(data, QuadratureSpec(resolution=args.resolution))
    out = {"charge": q, "resolution": args.resolution,
           "nearest_integer": round(q),
           "deviation": abs(q - round(q))}
    _emit(out, args.out)
    return 0


def cmd_moduli_dim(args) -> int:
    data = _load_data(args.data)
    ja = moduli_dimension(data)
    out = ja.to_json_dict()
    out["unframed_dimension"] = ja.framed_dimension - ja.frame_rotation_rank
    _emit(out, args.out)
    return 0 if not ja.degenerate else 1


def _load_data(path) -> ADHMData:
    with open(path) as fh:
        return ADHMData.from_json_dict(json.load(fh))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ncadhm",
        description="ADHM instantons on the plane and its two twisted "
                    "deformations")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("relations", help="emit a derived relation system")
    _add_model_flags(p)
    p.add_argument("--space", choices=["C4", "R4", "MonadM"], default="C4")
    p.add_argument("--k", type=int, default=1,
                   help="index for the MonadM generator family")
    p.add_argument("--no-calculus", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_relations)

    p = sub.add_parser("twistor-checks", help="run the twistor embedding checks")
    p.add_argument("--out")
    p.set_defaults(func=cmd_twistor_checks)

    p = sub.add_parser("solve", help="solve the deformed ADHM equations")
    _add_model_flags(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--zeta", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--multistarts", type=int, default=8)
    p.add_argument("--tolerance", type=float, default=1e-12)
    p.add_argument("--max-iterations", type=int, default=200)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify-monad", help="symbolic monad residuals for a data file")
    p.add_argument("--data", required=True)
    p.add_argument("--tolerance", type=float, default=1e-10)
    p.add_argument("--full", action="store_true",
                   help="also run the smash-algebra projector checks")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_monad)

    p = sub.add_parser("instanton", help="projector and curvature samples")
    p.add_argument("--data", required=True)
    p.add_argument("--points", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check-asd", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_instanton)

    p = sub.add_parser("charge", help="topological charge by quadrature")
    p.add_argument("--data", required=True)
    p.add_argument("--resolution", type=int, default=12)
    p.add_argument("--out")
    p.set_defaults(func=cmd_charge)

    p = sub.add_parser("moduli-dim", help="moduli dimension analysis")
    p.add_argument("--data", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_moduli_dim)

    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ModelMismatch, ShapeError, StarAlgebraError, NotASolution,
            SingularRho, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
