"""Command-line interface: ``mclab gen | classify | theta | transform | verify | model | spectrum``.

Exit codes: 0 success, 1 verification failure, 2 parse or usage error,
3 violated mathematical precondition (pole, singular resolvent, non-unitary
omega, impure tuple, ...).
"""
import argparse
import json
import sys

import numpy as np

from . import serialize
from .arveson import classify, model_space, random_spherical_tuple, truncated_multishift
from .ball import Automorphism, apply_automorphism
from .charfn import (CharacteristicFunction, right_spectrum_gap, spectrum_charfn_consistency,
                     surjectivity_gap)
from .errors import HypothesisViolated, MclabError, ParseError, PreconditionError
from .opcore import random_commuting_tuple, validate_tuple
from .suites import REGISTRY, SuiteConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_PRECONDITION = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(f"{self.prog}: {message}")


def parse_point(text):
    """``"0.3,0.4"`` or ``"0.1+0.2j, -0.5i"`` -> complex vector."""
    out = []
    for k, part in enumerate(text.split(",")):
        s = part.strip().replace(" ", "").replace("i", "j")
        try:
            out.append(complex(s))
        except ValueError:
            raise ParseError(f"coordinate {k}: cannot parse {part.strip()!r} as a complex number") from None
    return np.array(out, dtype=complex)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        return float(v)
    return v


def _emit(args, obj, out):
    obj = _jsonable(obj)
    if args.output == "json":
        out.write(json.dumps(obj) + "\n")
        return
    for k, v in obj.items():
        out.write(f"{k}: {json.dumps(v) if isinstance(v, (dict, list)) else v}\n")


def _report_json(rep):
    return {"isPure": rep.isPure, "isC1": rep.isC1, "isCnc": rep.isCnc,
            "minEig": rep.minEig, "maxEig": rep.maxEig, "converged": rep.converged,
            "iterations": rep.iterations, "lastDelta": rep.lastDelta, "zeroStep": rep.zeroStep}


def cmd_gen(args, out):
    rng = np.random.default_rng(args.seed)
    if args.kind == "multishift":
        T = truncated_multishift(args.n, args.degree)
    elif args.kind == "spherical":
        T = random_spherical_tuple(args.dim, args.n, rng)
    else:
        T = random_commuting_tuple(args.dim, args.n, args.seed, args.margin,
                                   nilpotent=args.kind == "nilpotent")
    meta = {"seed": args.seed, "generator": args.kind}
    if args.kind in ("random", "nilpotent"):
        meta["margin"] = args.margin
    if args.kind == "multishift":
        meta["degree"] = args.degree
    text = serialize.dumps_tuple(T, meta)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    diag = validate_tuple(T)
    # diagnostics go to stderr when the document itself is on stdout
    _emit(args, {"n": T.n, "dim": T.dim, "rowNorm": diag.row_norm,
                 "maxCommutator": diag.max_commutator, "valid": diag.ok},
          out if args.out else sys.stderr)
    return EXIT_OK


def cmd_classify(args, out):
    T = serialize.load_tuple(args.input)
    tz = args.tol if args.tol_zero is None else args.tol_zero
    to = args.tol if args.tol_one is None else args.tol_one
    _emit(args, _report_json(classify(T, tz, to)), out)
    return EXIT_OK


def cmd_theta(args, out):
    T = serialize.load_tuple(args.input)
    z = parse_point(args.z)
    if z.shape[0] != T.n:
        raise ParseError(f"--z has {z.shape[0]} coordinates, the tuple has n = {T.n}")
    th = CharacteristicFunction(T)
    rs, r = th.shape
    _emit(args, {"matrix": serialize.encode_matrix(th(z)), "defectDim": r, "defectStarDim": rs}, out)
    return EXIT_OK


def cmd_transform(args, out):
    T = serialize.load_tuple(args.input)
    lam = parse_point(args.lam) if args.lam else np.zeros(T.n, complex)
    if lam.shape[0] != T.n:
        raise ParseError(f"--lambda has {lam.shape[0]} coordinates, the tuple has n = {T.n}")
    if np.linalg.norm(lam) >= 1:
        raise HypothesisViolated(f"|lambda| = {np.linalg.norm(lam):.6f} is not inside the ball", "lambda")
    omega = serialize.load_matrix(args.omega_path) if args.omega_path else np.eye(T.n, dtype=complex)
    if omega.shape != (T.n, T.n):
        raise ParseError(f"omega has shape {omega.shape}, expected {(T.n, T.n)}")
    R = apply_automorphism(Automorphism(omega, lam), T)
    serialize.save_tuple(args.out, R, {"generator": "transform", "source": args.input})
    before, after = classify(T, args.tol, args.tol), classify(R, args.tol, args.tol)
    deltas = {k: [v, after.flags()[k]] for k, v in before.flags().items() if after.flags()[k] != v}
    _emit(args, {"before": before.flags(), "after": after.flags(), "deltas": deltas}, out)
    return EXIT_OK


def cmd_model(args, out):
    T = serialize.load_tuple(args.input)
    N = T.dim if args.degree is None else args.degree
    md = model_space(T, N, classify_kw={"tol_zero": args.tol, "tol_one": args.tol})
    payload = {"degree": N, "modelDim": md.modelTuple.dim, "residuals": md.residuals}
    if args.out:
        serialize.save_tuple(args.out, md.modelTuple, {"generator": "model", "degree": N})
    _emit(args, payload, out)
    return EXIT_OK if max(md.residuals.values()) <= args.tol else EXIT_FAIL


def cmd_spectrum(args, out):
    T = serialize.load_tuple(args.input)
    lam = parse_point(args.lam)
    if lam.shape[0] != T.n:
        raise ParseError(f"--lambda has {lam.shape[0]} coordinates, the tuple has n = {T.n}")
    gap = right_spectrum_gap(T, lam)
    sgap = surjectivity_gap(CharacteristicFunction(T)(lam))
    agree = spectrum_charfn_consistency(T, lam, args.tol)
    _emit(args, {"inSpectrum": gap <= args.tol, "spectrumGap": gap,
                 "thetaSurjective": not sgap <= args.tol, "surjectivityGap": sgap,
                 "consistent": agree}, out)
    return EXIT_OK if agree else EXIT_FAIL


def cmd_verify(args, out):
    if args.suite == "all":
        names = sorted(REGISTRY)
    else:
        names = sorted(s.strip() for s in args.suite.split(","))
        unknown = [s for s in names if s not in REGISTRY]
        if unknown:
            raise ParseError(f"unknown suite(s) {unknown}; known: {', '.join(sorted(REGISTRY))}")
    cfg = SuiteConfig(max_dim=args.dims, max_n=args.max_n, max_degree=args.degree)
    ok = True
    for name in names:
        rep = run_suite(name, args.trials, args.seed, cfg, timing=not args.no_timing)
        ok &= rep.passed
        if args.output == "json":
            out.write(json.dumps(rep.to_json()) + "\n")
        else:
            out.write(f"{'PASS' if rep.passed else 'FAIL'} {name}: trials={rep.trials} "
                      f"skipped={rep.skipped} maxResidual={rep.maxResidual:.3e} "
                      f"tolerance={rep.tolerance:g}\n")
        out.flush()
    return EXIT_OK if ok else EXIT_FAIL


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="numerical tolerance (1e-8)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (0)")
    common.add_argument("--output", choices=("json", "text"), default=argparse.SUPPRESS)

    p = _Parser(prog="mclab", description=__doc__.splitlines()[0])
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", choices=("json", "text"), default="json")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="write a random tuple document")
    g.add_argument("--dim", type=int, default=4)
    g.add_argument("--n", type=int, default=2)
    g.add_argument("--margin", type=float, default=0.1)
    g.add_argument("--kind", choices=("random", "nilpotent", "multishift", "spherical"), default="random")
    g.add_argument("--degree", type=int, default=2, help="truncation degree for --kind multishift")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("classify", parents=[common], help="pure / C1 / c.n.c. flags")
    c.add_argument("input")
    c.add_argument("--tol-zero", type=float)
    c.add_argument("--tol-one", type=float)
    c.set_defaults(func=cmd_classify)

    t = sub.add_parser("theta", parents=[common], help="evaluate the characteristic function")
    t.add_argument("input")
    t.add_argument("--z", required=True, help='comma-separated coordinates, e.g. "0.3,0.1+0.2j"')
    t.set_defaults(func=cmd_theta)

    x = sub.add_parser("transform", parents=[common], help="apply omega o phi_lambda to a tuple")
    x.add_argument("input")
    x.add_argument("--lambda", dest="lam")
    x.add_argument("--omega-path")
    x.add_argument("--out", required=True)
    x.set_defaults(func=cmd_transform)

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", default="all", help="suite name, comma-separated names, or 'all'")
    v.add_argument("--trials", type=int)
    v.add_argument("--dims", type=int, default=6, help="largest tuple dimension")
    v.add_argument("--max-n", type=int, default=3)
    v.add_argument("--degree", type=int, default=5, help="largest truncation degree")
    v.add_argument("--no-timing", action="store_true", help="report runtimeMillis as 0")
    v.add_argument("--list", action="store_true", help="list suites and exit")
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("model", parents=[common], help="functional model of a pure nilpotent tuple")
    m.add_argument("input")
    m.add_argument("--degree", type=int, help="truncation degree (default: dim)")
    m.add_argument("--out")
    m.set_defaults(func=cmd_model)

    s = sub.add_parser("spectrum", parents=[common], help="right spectrum versus surjectivity of theta")
    s.add_argument("input")
    s.add_argument("--lambda", dest="lam", required=True)
    s.set_defaults(func=cmd_spectrum)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "list", False):
            for name in sorted(REGISTRY):
                out.write(f"{name}\t{REGISTRY[name].anchor}\n")
            return EXIT_OK
        return args.func(args, out)
    except ParseError as exc:
        print(f"mclab: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"mclab: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionError as exc:
        print(f"mclab: precondition violated: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except MclabError as exc:
        print(f"mclab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"mclab: invalid input: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
