"""Command-line front end: build / solve / verify / realize / oracle.

All I/O is JSON (see :mod:`ratlin.jsonio`).  Exit codes: 0 success,
1 verification failure, 2 input or usage error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from . import jsonio
from .errors import RatlinError
from .linearize import build_family
from .realize import (
    from_pole_residue,
    hermitian_from_hankel,
    symmetric_from_hankel,
    to_hermitian_realization,
    to_symmetric_realization,
)
from .solve import solve_rep
from .verify import check_strong_linearization, oracle_eigenvalues

__all__ = ["Config", "main"]


@dataclass
class Config:
    tol_rank: float = 1e-10
    tol_eig: float = 1e-8
    tol_residual: float = 1e-8
    sample_points: int = 20
    seed: int = 42

    def __post_init__(self):
        for name in ("tol_rank", "tol_eig", "tol_residual"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def _config_from_args(args) -> Config:
    base = {}
    if getattr(args, "config", None):
        base = jsonio.load_json(args.config)
    cfg = Config(**base)
    for name in ("tol_rank", "tol_eig", "tol_residual", "sample_points", "seed"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    return cfg


def _parse_vector(text: str) -> np.ndarray:
    return np.array([complex(part) for part in text.split(",")])


def _real_if_possible(v: np.ndarray) -> np.ndarray:
    return v.real if np.iscomplexobj(v) and not np.any(v.imag != 0) else v


def cmd_build(args) -> int:
    G = jsonio.rational_from_json(jsonio.load_json(args.input))
    kw = {}
    if args.v:
        kw["v"] = _real_if_possible(_parse_vector(args.v))
    if args.H:
        kw["H"] = jsonio.decode_matrix(jsonio.load_json(args.H))
    if args.mu is not None:
        kw["mu"] = args.mu
    pencil = build_family(G, args.family, **kw)
    jsonio.dump_json(jsonio.pencil_to_json(pencil), args.out)
    print(f"wrote {pencil.size} x {pencil.size} pencil (family {pencil.meta.family}) to {args.out}")
    return 0


def cmd_solve(args) -> int:
    cfg = _config_from_args(args)
    G = jsonio.rational_from_json(jsonio.load_json(args.input))
    result = solve_rep(
        G,
        args.family,
        with_left=args.left,
        tol=cfg.tol_residual,
        rng=np.random.default_rng(cfg.seed),
    )
    eigs = []
    for pair in result.right:
        entry = {
            "lambda": jsonio.encode_scalar(pair.lam),
            "right": [jsonio.encode_scalar(x) for x in pair.vector],
            "residual": pair.residual,
            "pole_flag": False,
        }
        eigs.append(entry)
    if args.left:
        lefts = [
            {
                "lambda": jsonio.encode_scalar(p.lam),
                "left": [jsonio.encode_scalar(x) for x in p.vector],
                "residual": p.residual,
            }
            for p in result.left
        ]
    out = {
        "eigenvalues": eigs,
        "infinite": {
            "count": result.solution.infinite_count,
            "vectors": [
                {
                    "side": p.side,
                    "vector": [jsonio.encode_scalar(x) for x in p.vector],
                    "residual": p.residual,
                }
                for p in result.infinite
            ],
        },
        "pole_candidates": [jsonio.encode_scalar(z) for z in result.pole_candidates],
    }
    if args.left:
        out["left_eigenvectors"] = lefts
    if args.json_out:
        jsonio.dump_json(out, args.json_out)
    finite = sorted({complex(p.lam) for p in result.right}, key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    print(f"{len(finite)} distinct finite eigenvalues; {result.solution.infinite_count} at infinity")
    for lam in finite:
        print(f"  {lam.real:+.12g}{lam.imag:+.12g}j")
    if result.pole_candidates:
        print(f"{len(result.pole_candidates)} pole-coincident candidates reported, not eigenvalues")
    return 0


def cmd_verify(args) -> int:
    cfg = _config_from_args(args)
    pencil = jsonio.pencil_from_json(jsonio.load_json(args.pencil))
    G = jsonio.rational_from_json(jsonio.load_json(args.g))
    report = check_strong_linearization(
        pencil, G, tol=cfg.tol_eig, sample_points=cfg.sample_points, seed=cfg.seed
    )
    payload = {
        "passed": report.passed,
        "checks": [
            {"check": c.name, "pass": c.passed, "value": c.value, "tol": c.tol, "detail": c.detail}
            for c in report.checks
        ],
    }
    if args.report:
        jsonio.dump_json(payload, args.report)
    for c in report.checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.name}: value={c.value:.3e} tol={c.tol:.1e} {c.detail}")
    return 0 if report.passed else 1


def cmd_realize(args) -> int:
    obj = jsonio.load_json(args.input)
    if "markov" in obj:
        mk = jsonio.markov_from_json(obj)
        if mk.n_hint == 0 or not np.any(mk.terms):
            real = symmetric_from_hankel(mk)
        elif args.form == "hermitian":
            real = hermitian_from_hankel(mk)
        else:
            real = symmetric_from_hankel(mk)
    else:
        sp = jsonio.realization_from_json(obj)
        if sp is None:
            raise RatlinError("input JSON holds neither Markov data nor a realization")
        ss = sp.to_state_space() if not hasattr(sp, "poles") else from_pole_residue(sp)
        if args.form == "symmetric":
            real = to_symmetric_realization(ss)
        elif args.form == "hermitian":
            real = to_hermitian_realization(ss)
        else:
            real = ss
    jsonio.dump_json(jsonio.realization_to_json(real), args.out)
    print(f"wrote order-{real.n} realization to {args.out}")
    return 0


def cmd_oracle(args) -> int:
    G = jsonio.rational_from_json(jsonio.load_json(args.input))
    cfg = _config_from_args(args)
    result = oracle_eigenvalues(G, tol=cfg.tol_eig)
    payload = {
        "finite": [jsonio.encode_scalar(z) for z in result.finite],
        "infinite_count": result.infinite_count,
        "poles": [jsonio.encode_scalar(z) for z in result.poles],
    }
    if args.json_out:
        jsonio.dump_json(payload, args.json_out)
    print(f"{len(result.finite)} finite eigenvalues; {result.infinite_count} at infinity")
    for z in sorted(result.finite, key=lambda z: (round(z.real, 9), round(z.imag, 9))):
        print(f"  {z.real:+.12g}{z.imag:+.12g}j")
    return 0


def _add_common(parser) -> None:
    parser.add_argument("--tol-rank", dest="tol_rank", type=float, default=None)
    parser.add_argument("--tol-eig", dest="tol_eig", type=float, default=None)
    parser.add_argument("--tol-residual", dest="tol_residual", type=float, default=None)
    parser.add_argument("--sample-points", dest="sample_points", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--config", default=None, help="JSON file with Config fields")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ratlin", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a linearization pencil from a rational matrix")
    p.add_argument("--family", required=True,
                   choices=["f", "m1", "m2", "dm", "sym", "herm", "bk-odd", "dg"])
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--v", default=None, help="comma-separated ansatz vector")
    p.add_argument("--H", default=None, help="JSON file with the H factor")
    p.add_argument("--mu", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("solve", help="solve the rational eigenproblem through a pencil")
    p.add_argument("--input", required=True)
    p.add_argument("--family", default="m1",
                   choices=["f", "m1", "m2", "dm", "sym", "herm", "bk-odd", "dg"])
    p.add_argument("--left", action="store_true")
    p.add_argument("--json-out", dest="json_out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="verify a pencil against its rational matrix")
    p.add_argument("--pencil", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--report", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("realize", help="build a realization from Markov or pole-residue data")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--form", default="symmetric", choices=["state-space", "symmetric", "hermitian"])
    _add_common(p)
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("oracle", help="brute-force eigenvalues, no pencil involved")
    p.add_argument("--input", required=True)
    p.add_argument("--json-out", dest="json_out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RatlinError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
