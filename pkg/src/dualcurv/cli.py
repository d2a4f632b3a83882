"""Command line front end: ``dualcurv <command> [options]``.

Exit status: 0 success, 1 domain error, 2 configuration or usage error,
3 when a ``verify-*`` command finds a failing check.
"""
import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import __version__
from ._parallel import set_threads
from .bounds import FAMILIES, PASS_TOL, tightness_sweep, verify_body
from .exceptions import ConfigError, DualCurvError, InvariantError
from .generators import GENERATOR_KINDS, GeneratorSpec, generate_body, standard_suite
from .geometry import Subspace, asymmetry_constant, load_body, save_body
from .geometry.io import body_to_dict
from .measures import PhiSpec, QuadratureSpec, concentration_ratio, total_measure_report
from .reports import dumps, emit_plot_data, slice_profile_csv, sweep_csv, verification_csv, with_timestamp
from .slicing import EXTRAPOLATIONS, FDSpec, divergence_identity_check, slice_profile

EXIT_FAILED_CHECK = 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    bodies: tuple = ()
    q: tuple = ()
    subspaces: tuple = ()
    quad: QuadratureSpec = QuadratureSpec()
    fd: FDSpec = FDSpec()
    levels: Optional[tuple] = None
    output: Optional[str] = None
    fmt: str = "json"
    reproducible: bool = False

    def __post_init__(self):
        for path in self.bodies:
            if not os.path.isfile(path):
                raise ConfigError(f"body file not found: {path}")


# ---------------------------------------------------------------- parsing --

def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _q_values(args):
    qs = [q for group in (args.q or []) for q in group]
    if not qs:
        raise ConfigError("at least one --q value is required")
    return tuple(qs)


def _subspaces(args, n, default_all=False):
    out = []
    for idx in args.L or []:
        try:
            out.append(Subspace.coordinate(n, idx))
        except InvariantError as exc:
            raise ConfigError(f"--L {','.join(map(str, idx))}: {exc}") from exc
    if getattr(args, "L_basis", None):
        out.append(_load_basis(args.L_basis, n))
    if not out:
        if not default_all:
            raise ConfigError("a subspace is required (--L indices or --L-basis file)")
        from itertools import combinations

        out = [Subspace.coordinate(n, list(c)) for k in range(1, n) for c in combinations(range(n), k)]
    return tuple(out)


def _load_basis(path, n):
    if not os.path.isfile(path):
        raise ConfigError(f"basis file not found: {path}")
    try:
        if path.endswith(".json"):
            with open(path, encoding="utf-8") as fh:
                rows = np.asarray(json.load(fh), dtype=float)
        else:
            rows = np.loadtxt(path, ndmin=2)
    except (ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read basis file {path}: {exc}") from exc
    if rows.ndim != 2 or rows.shape[1] != n:
        raise ConfigError(f"basis rows must have {n} coordinates")
    return Subspace.from_basis(rows, orthonormalize=True)


def _quad(args):
    return QuadratureSpec(args.method, args.samples, args.seed, args.order)


def _fd(args):
    return FDSpec(args.rel_step, args.fd_scheme)


def _emit(text, output):
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(doc, args):
    _emit(dumps(with_timestamp(doc, args.reproducible)) + "\n", args.output)


def _one(seq):
    return seq[0] if len(seq) == 1 else list(seq)


# --------------------------------------------------------------- commands --

def cmd_gen(args):
    spec = GeneratorSpec(args.kind, args.dim, t=args.t, m=args.m, seed=args.seed, k=args.k, s=args.s,
                         name=args.name)
    body = generate_body(spec)
    if args.output:
        save_body(body, args.output)
        facets = len(body.hrep().facets) if body.is_polytope else None
        sys.stderr.write(f"{body.name}: kind={body.kind} dim={body.dim}"
                         + (f" facets={facets}" if facets is not None else "") + "\n")
    else:
        _emit(dumps(body_to_dict(body)) + "\n", None)
    return 0


def cmd_gamma(args):
    body = load_body(args.body)
    res = asymmetry_constant(body)
    _emit_json({"body": body.name, "gamma": res.gamma, "certificate_facet": res.certificate_facet,
                "bisection_gamma": res.bisection_gamma}, args)
    return 0


def cmd_measure(args):
    body = load_body(args.body)
    quad = _quad(args)
    out = []
    for q in _q_values(args):
        total, stderr, method = total_measure_report(body, PhiSpec(q), quad)
        out.append({"body": body.name, "q": q, "total": total, "stderr": stderr, "method": method})
    _emit_json(_one(out), args)
    return 0


def cmd_ratio(args):
    body = load_body(args.body)
    quad = _quad(args)
    out = []
    for q in _q_values(args):
        phi = PhiSpec(q)
        for L in _subspaces(args, body.dim):
            out.append(concentration_ratio(body, phi, L, quad).to_dict(body.name, phi, L))
    _emit_json(_one(out), args)
    return 0


def cmd_slice(args):
    body = load_body(args.body)
    (L,) = _subspaces(args, body.dim)[:1]
    qs = _q_values(args)
    if len(qs) != 1:
        raise ConfigError("slice takes a single --q")
    prof = slice_profile(body, L, PhiSpec(qs[0]), args.grid, _fd(args), _quad(args))
    if args.format == "csv":
        _emit(slice_profile_csv(prof, L.k), args.output)
    else:
        _emit_json({"body": body.name, "q": qs[0], "L": L.basis.tolist(),
                    "points": [{"x": list(p.x), "g": p.g, "grad_dot": p.grad_dot,
                                "boundary_flag": p.boundary_flag} for p in prof.points]}, args)
    return 0


def cmd_verify_divergence(args):
    body = load_body(args.body)
    quad = _quad(args)
    docs, failed = [], False
    for q in _q_values(args):
        for L in _subspaces(args, body.dim):
            rep = divergence_identity_check(body, L, PhiSpec(q), quad, args.grid, _fd(args), args.levels,
                                            args.allow_low_q, mc_check=True, extrapolation=args.extrapolation)
            doc = rep.to_dict()
            doc["tolerance"] = args.tol
            doc["pass"] = bool(abs(rep.residual) <= args.tol)
            failed |= not doc["pass"]
            docs.append(doc)
    _emit_json(_one(docs), args)
    return EXIT_FAILED_CHECK if failed else 0


def cmd_verify_bounds(args):
    if args.suite:
        bodies = standard_suite()
    elif args.body:
        bodies = [load_body(p) for p in args.body]
    else:
        raise ConfigError("give --body files or --suite")
    quad = _quad(args)
    records = []
    explicit = bool(args.L or args.L_basis)
    for body in bodies:
        Ls = _subspaces(args, body.dim, default_all=True)
        for q in _q_values(args):
            # default subspaces skip dim L >= q; explicit ones are checked as given
            use = Ls if explicit else [L for L in Ls if L.k < q]
            if use:
                records += verify_body(body, [q], use, quad, args.tol)
    if args.plot_data:
        _emit(emit_plot_data(records), args.output)
    elif args.format == "csv":
        _emit(verification_csv(records), args.output)
    else:
        _emit_json([r.to_dict() for r in records], args)
    return EXIT_FAILED_CHECK if any(r.passed is False for r in records) else 0


def cmd_sweep(args):
    if not args.params:
        raise ConfigError("--params is required")
    L = _subspaces(args, args.dim)[0]
    res = tightness_sweep(args.family, args.params, _q_values(args), L, n=args.dim, quad=_quad(args),
                          m=args.m, centered=args.centered, optimize=args.optimize)
    if args.plot_data:
        _emit(emit_plot_data(res.rows), args.output)
    elif args.format == "csv":
        _emit(sweep_csv(res.rows), args.output)
    else:
        _emit_json({"family": args.family, "rows": [r.to_dict() for r in res.rows],
                    "max_margin": res.max_margin, "argmax": res.argmax}, args)
    return 0


COMMANDS = {
    "gen": cmd_gen, "gamma": cmd_gamma, "measure": cmd_measure, "ratio": cmd_ratio, "slice": cmd_slice,
    "verify-divergence": cmd_verify_divergence, "verify-bounds": cmd_verify_bounds, "sweep": cmd_sweep,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write the report to this file instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--reproducible", action="store_true", help="omit the timestamp field")
    common.add_argument("--threads", type=int, help="worker threads (overrides DUALCURV_THREADS)")

    body = argparse.ArgumentParser(add_help=False)
    body.add_argument("--body", required=True, help="body JSON file")

    qopt = argparse.ArgumentParser(add_help=False)
    qopt.add_argument("--q", type=_float_list, action="append", help="q values, repeatable or comma separated")

    sub = argparse.ArgumentParser(add_help=False)
    sub.add_argument("--L", type=_int_list, action="append",
                     help="coordinate subspace, 0-based indices: '0,2' is span(e_1, e_3)")
    sub.add_argument("--L-basis", dest="L_basis", help="file with basis rows (JSON or whitespace text)")

    quad = argparse.ArgumentParser(add_help=False)
    quad.add_argument("--method", choices=("auto", "facet", "product", "mc"), default="auto")
    quad.add_argument("--samples", type=int, default=200_000)
    quad.add_argument("--seed", type=int, default=0)
    quad.add_argument("--order", type=int, default=8)

    fd = argparse.ArgumentParser(add_help=False)
    fd.add_argument("--rel-step", type=float, default=1e-4)
    fd.add_argument("--fd-scheme", choices=("central", "forward-at-boundary"), default="forward-at-boundary")
    fd.add_argument("--grid", type=int, default=64)

    p = argparse.ArgumentParser(prog="dualcurv", description="Dual curvature measures and subspace concentration.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    cmds = p.add_subparsers(dest="command", required=True)

    g = cmds.add_parser("gen", parents=[common], help="generate a body file")
    g.add_argument("--kind", required=True, choices=GENERATOR_KINDS)
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--t", type=float, default=0.0, help="shift of shifted_cube")
    g.add_argument("--m", type=int, default=12, help="halfspaces of random_tangent")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--k", type=int, default=1, help="k of product_ball")
    g.add_argument("--s", type=float, default=1.0, help="stretch of stretched_simplex")
    g.add_argument("--name")

    cmds.add_parser("gamma", parents=[common, body], help="asymmetry constant")
    cmds.add_parser("measure", parents=[common, body, qopt, quad], help="total dual curvature measure")
    cmds.add_parser("ratio", parents=[common, body, qopt, sub, quad], help="subspace concentration ratio")
    cmds.add_parser("slice", parents=[common, body, qopt, sub, quad, fd], help="g and <grad g, x> profile")

    v = cmds.add_parser("verify-divergence", parents=[common, body, qopt, sub, quad, fd],
                        help="check the divergence identity")
    v.add_argument("--levels", type=_int_list, default=None,
                   help="shrink levels m (default 4,8,16 scaled by grid/64)")
    v.add_argument("--extrapolation", choices=sorted(EXTRAPOLATIONS), default="quadratic")
    v.add_argument("--allow-low-q", action="store_true", help="allow dim L < q <= dim L + 1 (tagged)")
    v.add_argument("--tol", type=float, default=PASS_TOL)

    b = cmds.add_parser("verify-bounds", parents=[common, qopt, sub, quad], help="check ratio <= bound")
    b.add_argument("--body", action="append", help="body JSON file, repeatable")
    b.add_argument("--suite", action="store_true", help="use the built-in body suite")
    b.add_argument("--tol", type=float, default=PASS_TOL)
    b.add_argument("--plot-data", action="store_true", help="emit ratio/bound vs q CSV")

    s = cmds.add_parser("sweep", parents=[common, qopt, sub, quad], help="tightness sweep over a family")
    s.add_argument("--family", required=True, choices=FAMILIES)
    s.add_argument("--params", type=_float_list, required=True)
    s.add_argument("--dim", type=int, default=3)
    s.add_argument("--m", type=int, default=12)
    s.add_argument("--centered", action="store_true", help="centre bodies, compare with the centred bound")
    s.add_argument("--optimize", type=_float_list, default=None, metavar="LO,HI,Q",
                   help="maximise ratio - bound over the parameter in [LO, HI] at Q")
    s.add_argument("--plot-data", action="store_true")
    return p


def parse_config(args):
    """Validate the parsed arguments into a :class:`RunConfig`."""
    bodies = ()
    if isinstance(getattr(args, "body", None), str):
        bodies = (args.body,)
    elif getattr(args, "body", None):
        bodies = tuple(args.body)
    if getattr(args, "levels", None) is not None:
        lv = tuple(args.levels)
        if not lv or any(m < 1 for m in lv) or any(b <= a for a, b in zip(lv, lv[1:])):
            raise ConfigError("--levels must be positive and strictly increasing")
    if getattr(args, "optimize", None) is not None and len(args.optimize) != 3:
        raise ConfigError("--optimize takes LO,HI,Q")
    quad = _quad(args) if hasattr(args, "method") else QuadratureSpec()
    fd = _fd(args) if hasattr(args, "rel_step") else FDSpec()
    return RunConfig(args.command, bodies, tuple(q for g in (getattr(args, "q", None) or []) for q in g),
                     (), quad, fd, getattr(args, "levels", None), args.output, args.format or "json",
                     args.reproducible)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = "csv" if args.command == "slice" else "json"
    try:
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError("--threads must be >= 1")
            set_threads(args.threads)
        parse_config(args)
        return COMMANDS[args.command](args)
    except DualCurvError as exc:
        sys.stderr.write(f"dualcurv {args.command}: {type(exc).__name__}: {exc}\n")
        return exc.exit_code
    finally:
        set_threads(None)


if __name__ == "__main__":
    sys.exit(main())
