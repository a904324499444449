"""Command-line front end.

Subcommands: decide, certify, verify, integrate, probe, scan.
Reports go to stdout as JSON (scan writes CSV) or to ``--output``.

Exit codes: 0 success, 2 out of scope (ScopeError verdict or unmet
precondition), 3 numeric failure, 64 bad flags.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .cones import ConeDescriptor, identity
from .decision import (
    SCOPE_ERROR,
    SParams,
    TParams,
    homogeneous_gamma_S,
    homogeneous_gamma_T,
)
from .exceptions import (
    CertificateError,
    DimensionError,
    DivergentIntegralError,
    InfeasibleCertificateError,
    NotInConeError,
    PreconditionError,
    QuadratureError,
)
from .quadrature import QuadratureConfig

EXIT_OK = 0
EXIT_SCOPE = 2
EXIT_NUMERIC = 3
EXIT_USAGE = 64

OPS = ("S", "Tmixed", "Tpure", "Pplus", "Pgamma")

_DEFAULTS = dict(alpha=0.0, beta=0.0, nu=1.0, mu=1.0, p=2.0, q=2.0, s=2.0)
_RANGES = dict(alpha=(-1.0, 3.0), beta=(-1.0, 3.0), gamma=(0.0, 4.0), nu=(-1.0, 5.0),
               mu=(-1.0, 5.0), p=(1.0, 6.0), q=(1.0, 6.0), s=(1.0, 6.0))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def real(text: str) -> float:
    """Float flag that also takes ``inf``."""
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def point(text: str) -> list:
    s = text.strip()
    if not s.startswith("["):
        s = "[" + s + "]"
    try:
        vals = json.loads(s)
    except json.JSONDecodeError:
        raise argparse.ArgumentTypeError(f"not a point: {text!r}")
    return [float(x) for x in vals]


def cone_arg(text: str) -> ConeDescriptor:
    try:
        return ConeDescriptor.parse(text)
    except (ValueError, DimensionError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def encode(x):
    """JSON-safe copy with non-finite floats as strings."""
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    if isinstance(x, np.ndarray):
        return encode(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return x



# ---------------------------------------------------------------------------
# flag groups


def _add_params(p: argparse.ArgumentParser, op=True):
    p.add_argument("--cone", type=cone_arg, default=ConeDescriptor.parse("halfline"),
                   help='"halfline", "lorentz:<n>" or "spd:<r>"')
    if op:
        p.add_argument("--op", choices=OPS, default="S")
    for name in ("alpha", "beta", "gamma", "nu", "mu", "p", "q", "s"):
        p.add_argument(f"--{name}", type=real, default=None)


def _add_quad(p: argparse.ArgumentParser):
    g = p.add_argument_group("quadrature")
    g.add_argument("--config", help="JSON file with quadrature settings")
    g.add_argument("--levels", type=int)
    g.add_argument("--map", choices=("ExpSubstitution", "Compactify", "exp", "compactify"))
    g.add_argument("--truncation", type=float)
    g.add_argument("--step", type=float)
    g.add_argument("--angular-nodes", type=int)
    g.add_argument("--rel-err", type=float, dest="target_rel_err")
    g.add_argument("--mc-samples", type=int)
    g.add_argument("--seed", type=int)


def _add_output(p):
    p.add_argument("-o", "--output", help="write the report here instead of stdout")


def quad_from_args(args, base: QuadratureConfig | None = None) -> QuadratureConfig | None:
    kw = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            kw.update(json.load(fh))
    for k in ("levels", "map", "truncation", "step", "angular_nodes", "target_rel_err",
              "mc_samples", "seed"):
        v = getattr(args, k, None)
        if v is not None:
            kw[k] = v
    if not kw:
        return base
    return (base or QuadratureConfig()).replace(**kw)


def params_from_args(args) -> dict:
    prm = {k: (getattr(args, k) if getattr(args, k) is not None else d)
           for k, d in _DEFAULTS.items()}
    gamma = args.gamma
    if gamma is None:
        cone = args.cone
        op = getattr(args, "op", "S")
        if op == "Tpure":
            gamma = homogeneous_gamma_T(cone, prm["alpha"], prm["beta"], prm["nu"], prm["mu"],
                                        prm["p"], prm["q"])
        elif op == "Tmixed":
            gamma = homogeneous_gamma_S(cone, prm["alpha"], prm["beta"], prm["nu"], prm["mu"],
                                        prm["q"], prm["s"])
        else:
            gamma = homogeneous_gamma_S(cone, prm["alpha"], prm["beta"], prm["nu"], prm["mu"],
                                        prm["p"], prm["q"])
    prm["gamma"] = float(gamma)
    return prm


def _sparams(prm):
    return SParams(**{k: prm[k] for k in ("alpha", "beta", "gamma", "nu", "mu", "p", "q")})


def _tparams(prm):
    return TParams(**prm)


# ---------------------------------------------------------------------------
# commands


def cmd_decide(args):
    from .operators import _decide

    prm = params_from_args(args)
    v = _decide(args.cone, args.op, prm)
    out = v.to_dict()
    out["params"] = encode(prm)
    return out, (EXIT_SCOPE if v.status == SCOPE_ERROR else EXIT_OK)


def _certificate(args, prm):
    from .certificates import find_certificate_S, find_certificate_Tplus

    if args.op == "S":
        if math.isinf(prm["q"]):
            raise PreconditionError("q = inf uses the Hoelder bound; run verify instead")
        return find_certificate_S(args.cone, _sparams(prm))
    if args.op == "Tpure":
        return find_certificate_Tplus(args.cone, _tparams(prm))
    raise PreconditionError(f"no certificate construction for operator {args.op}")


def cmd_certify(args):
    prm = params_from_args(args)
    cert = _certificate(args, prm)
    return encode(cert.to_dict()), EXIT_OK


def cmd_verify(args):
    from .certificates import holder_bound_S_infty, verify_certificate_S, verify_certificate_Tplus

    prm = params_from_args(args)
    quad = quad_from_args(args)
    if args.op == "S" and math.isinf(prm["q"]):
        c = holder_bound_S_infty(args.cone, _sparams(prm), quad)
        return {"kind": "Hoelder", "bound": c}, EXIT_OK
    cert = _certificate(args, prm)
    if args.op == "S":
        _, _, chk = verify_certificate_S(args.cone, _sparams(prm), cert, quad, report=True)
    else:
        if args.cone.kind != "halfline":
            raise PreconditionError("tube certificate verification is implemented for the half-line")
        _, _, chk = verify_certificate_Tplus(args.cone, _tparams(prm), cert, quad, report=True)
    out = cert.to_dict()
    out["bound"] = cert.bound
    out["check"] = chk.to_dict()
    return encode(out), EXIT_OK


def cmd_integrate(args):
    from .integrability import (
        Lemma31Query,
        Lemma32Query,
        _integrand,
        lemma31_converges,
        lemma32_member,
        lemma32_norm_exponent,
        tube_power_norm_q,
    )
    from .quadrature import integrate_cone

    quad = quad_from_args(args)
    cone = args.cone
    if args.tube:
        if None in (args.alpha, args.p, args.q, args.nu):
            raise UsageError("--tube needs --alpha, --p, --q and --nu")
        t = args.shift if args.shift is not None else 1.0
        q = Lemma32Query(cone, args.alpha, args.p, args.q, args.nu, (t,))
        est = tube_power_norm_q(q, quad)
        member = lemma32_member(q)
        out = {"kind": "tube-norm", "member": member, "estimate": est.to_dict()}
        if member:
            out["exponent"] = lemma32_norm_exponent(q)
    else:
        if args.s is None or args.t is None:
            raise UsageError("--s and --t are required")
        v = np.asarray(args.v, float) if args.v is not None else identity(cone)
        q = Lemma31Query(cone, args.s, args.t, v)
        est = integrate_cone(cone, _integrand(cone, q.s, q.t, v), quad)
        conv = lemma31_converges(q)
        out = {"kind": "cone-integral", "converges": conv, "estimate": est.to_dict()}
        if conv:
            e = np.asarray(q.s) + np.asarray(q.t)
            from .cones import generalized_power

            out["exponent"] = e.tolist()
            out["ratio"] = float(est.value) / float(generalized_power(cone, e, v))
    code = EXIT_OK
    if bool(np.any(est.diverging)) or not bool(np.all(est.converged)):
        code = EXIT_NUMERIC
    return encode(out), code


def cmd_probe(args):
    from .operators import _decide, dilation_probe, necessity_probe_S

    if args.op != "S":
        raise PreconditionError("probes are implemented for the operator S")
    prm = params_from_args(args)
    sp = _sparams(prm)
    v = _decide(args.cone, "S", prm)
    if v.status == SCOPE_ERROR:
        return {"verdict": v.to_dict()}, EXIT_SCOPE
    quad = quad_from_args(args)
    nec = necessity_probe_S(args.cone, sp, quad)
    out = {"verdict": v.to_dict(), "necessity": nec.to_dict()}
    if not math.isinf(sp.q):
        out["dilation"] = dilation_probe(args.cone, sp, quad=quad, full=True).to_dict()
    return encode(out), EXIT_OK


def _grid(text):
    try:
        a, b = text.lower().split("x")
        n1, n2 = int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 50x50, got {text!r}")
    if n1 < 1 or n2 < 1:
        raise argparse.ArgumentTypeError("grid sizes must be positive")
    return n1, n2


def _range(text):
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must look like lo:hi, got {text!r}")
    return lo, hi


def threads() -> int:
    try:
        return max(1, int(os.environ.get("BERGCONE_THREADS", "1")))
    except ValueError:
        return 1


def cmd_scan(args):
    from .operators import _AXES, scan_phase_diagram

    axes = [a.strip() for a in args.axes.split(",")]
    if len(axes) != 2 or any(a not in _AXES for a in axes) or axes[0] == axes[1]:
        raise UsageError(f"--axes needs two distinct names from {', '.join(_AXES)}")
    n1, n2 = args.grid
    r1 = args.range1 or _RANGES[axes[0]]
    r2 = args.range2 or _RANGES[axes[1]]
    base = {k: (getattr(args, k) if getattr(args, k) is not None else d)
            for k, d in _DEFAULTS.items()}
    base["gamma"] = args.gamma if args.gamma is not None else 1.0
    derive = None
    if args.homogeneous and "gamma" not in axes:
        from .operators import derive_homogeneous_gamma

        derive = {"gamma": derive_homogeneous_gamma}
    rep = scan_phase_diagram(args.cone, base, axes[0], axes[1], np.linspace(*r1, n1),
                             np.linspace(*r2, n2), op=args.op, derive=derive,
                             indicator=args.indicator, quad=quad_from_args(args),
                             workers=threads())
    return rep.to_csv(), EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="bergcone", description="Boundedness of positive Bergman-type operators")
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("decide", help="evaluate the boundedness conditions")
    _add_params(p)
    _add_output(p)
    p.set_defaults(fn=cmd_decide)

    p = sub.add_parser("certify", help="construct a Schur-type certificate")
    _add_params(p)
    _add_output(p)
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("verify", help="construct and numerically check a certificate")
    _add_params(p)
    _add_quad(p)
    _add_output(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("integrate", help="cone integral of determinant powers, or a tube norm")
    p.add_argument("--cone", type=cone_arg, default=ConeDescriptor.parse("halfline"))
    p.add_argument("--s", type=real)
    p.add_argument("--t", type=real)
    p.add_argument("--v", type=point, help="point of the cone, e.g. '[1,0.2,0]'")
    p.add_argument("--tube", action="store_true", help="tube norm of a shifted determinant power")
    p.add_argument("--alpha", type=real)
    p.add_argument("--p", type=real)
    p.add_argument("--q", type=real)
    p.add_argument("--nu", type=real)
    p.add_argument("--shift", type=real, help="imaginary shift for --tube (default 1)")
    _add_quad(p)
    _add_output(p)
    p.set_defaults(fn=cmd_integrate)

    p = sub.add_parser("probe", help="necessity integrals and dilation slope for S")
    _add_params(p)
    _add_quad(p)
    _add_output(p)
    p.set_defaults(fn=cmd_probe)

    p = sub.add_parser("scan", help="phase diagram over two parameters (CSV)")
    _add_params(p)
    p.add_argument("--axes", default="gamma,mu")
    p.add_argument("--grid", type=_grid, default=(50, 50))
    p.add_argument("--range1", type=_range)
    p.add_argument("--range2", type=_range)
    p.add_argument("--homogeneous", action="store_true",
                   help="derive gamma from the dilation balance in each cell")
    p.add_argument("--indicator", action="store_true",
                   help="add a numeric norm lower bound per cell (operator S)")
    _add_quad(p)
    _add_output(p)
    p.set_defaults(fn=cmd_scan)
    return ap


def _emit(report, path):
    text = report if isinstance(report, str) else json.dumps(report) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(code, exc):
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
    return code


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        report, code = args.fn(args)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        return _fail(EXIT_USAGE, exc)
    except (PreconditionError, NotInConeError, DimensionError) as exc:
        return _fail(EXIT_SCOPE, exc)
    except (DivergentIntegralError, QuadratureError, CertificateError,
            InfeasibleCertificateError, FloatingPointError) as exc:
        return _fail(EXIT_NUMERIC, exc)
    except ValueError as exc:
        return _fail(EXIT_SCOPE, exc)
    _emit(report, args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
