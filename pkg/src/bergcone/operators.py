"""Numerical experiments with S and T+: application, norms and probes."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
import csv
import io
import itertools
import json
import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .cones import ConeDescriptor, complex_determinant, determinant, identity, shifted_determinant
from .decision import (
    SCOPE_ERROR,
    SParams,
    TParams,
    Verdict,
    decide_Pplus_mixed,
    decide_S,
    decide_Tplus_mixed,
    homogeneous_gamma_S,
    necessary_offdiag_Pgamma,
    sufficient_Tplus_pure,
)
from .exceptions import DivergentIntegralError
from .quadrature import QuadratureConfig, detect_divergence, integrate_cone
from .testfunctions import ConeBallIndicator, Dilate, TestFunction, TubeBoxIndicator, default_ball

__all__ = [
    "apply_S",
    "norm_S_image",
    "dilation_probe",
    "DilationFit",
    "necessity_probe_S",
    "NecessityReport",
    "apply_Tplus",
    "norm_lower_bound",
    "scan_phase_diagram",
    "ScanReport",
    "COARSE",
]

# outer rule for norms of S g: smooth integrands, modest accuracy needs
COARSE = QuadratureConfig(levels=2, truncation=20.0, step=0.5, angular_nodes=8,
                          target_rel_err=1e-4)

# dilation probes only need the slope; coarse rules keep them cheap
PROBE = QuadratureConfig(levels=2, truncation=16.0, step=1.0, angular_nodes=8,
                         target_rel_err=1e-3)

_Y_CHUNK = 2048


def apply_S(cone: ConeDescriptor, prm: SParams, g: TestFunction, y, quad=None, det_y=None):
    """``Sg(y) = Delta^alpha(y) int Delta^{-gamma}(y + x) g(x) Delta^beta(x) dx``.

    ``y`` may be a single point or a batch ``(m, n)``; ``det_y`` optionally
    supplies accurate determinants of the batch.
    """
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1 or (cone.n == 1 and y.ndim == 0)
    Y = y.reshape(-1, cone.n)
    DY = (np.asarray(determinant(cone, Y)).reshape(-1) if det_y is None
          else np.asarray(det_y, float).reshape(-1))
    out = np.empty(Y.shape[0])
    e = identity(cone)
    # smooth components use a global grid per y; keep the batch small then
    chunk = _Y_CHUNK if cone.kind == "halfline" or _compact(g) else 1
    for i0 in range(0, Y.shape[0], chunk):
        Yc = Y[i0:i0 + chunk]
        Dc = DY[i0:i0 + chunk]

        def h(x, det, Yc=Yc, Dc=Dc):
            s = shifted_determinant(cone, Yc[:, None, :], x[None, :, :], Dc[:, None])
            return np.exp(-prm.gamma * np.log(s) + prm.beta * np.log(det)[None, :])

        # integrals of invariant test functions against h at dilates of e are invariant
        h.invariant = bool(np.allclose(Yc, Yc[:, :1] * e[None, :]))
        out[i0:i0 + chunk] = np.asarray(g.integrate_against(cone, h, quad)).reshape(-1)
    out = out * DY**prm.alpha
    return float(out[0]) if single else out


def _compact(g) -> bool:
    if isinstance(g, ConeBallIndicator):
        return True
    if isinstance(g, Dilate):
        return _compact(g.base)
    parts = getattr(g, "parts", None)
    return parts is not None and all(_compact(p) for p in parts)


def norm_S_image(cone, prm: SParams, g: TestFunction, quad=None, outer: QuadratureConfig = None,
                 symmetric: bool = False) -> float:
    """``||S g||_{L^q_mu}`` by an outer cone quadrature of ``apply_S``."""
    outer = outer or COARSE
    nr = cone.n_over_r
    if math.isinf(prm.q):
        raise ValueError("use a supremum estimate for q = inf")

    def F(y, det):
        sg = apply_S(cone, prm, g, y, quad, det_y=det)
        with np.errstate(divide="ignore"):
            return np.exp(prm.q * np.log(sg) + (prm.mu - nr) * np.log(det))

    est = integrate_cone(cone, F, outer, symmetric=symmetric)
    if est.diverging:
        raise DivergentIntegralError("S g is not in the target space")
    return float(est.value) ** (1 / prm.q)


@dataclass
class DilationFit:
    slope: float
    predicted: float
    Rs: list
    log_ratios: list
    norm_slope: float

    def to_dict(self):
        return asdict(self)


def dilation_slope_predicted(cone, prm: SParams) -> float:
    """Exponent of R in ``||S f_R|| / ||f_R||`` from exact change of variables."""
    n, r = cone.n, cone.r
    return -n + r * (prm.gamma - prm.beta - prm.alpha - prm.mu / prm.q + prm.nu / prm.p)


def dilation_probe(cone: ConeDescriptor, prm: SParams, f: TestFunction = None,
                   Rs: Sequence[float] = (0.25, 0.5, 1.0, 2.0, 4.0), quad=None,
                   outer: QuadratureConfig = None, full: bool = False):
    """Fit the log-log slope of ``||S f_R||_{q,mu} / ||f_R||_{p,nu}`` in ``R``."""
    f = f or default_ball(cone, nodes=4)
    outer = outer or PROBE
    sym = isinstance(f, ConeBallIndicator) and np.allclose(f.center, f.center[0] * identity(cone))
    logs, lnorm = [], []
    for R in Rs:
        fr = Dilate(f, R)
        num = norm_S_image(cone, prm, fr, quad, outer, symmetric=sym)
        den = fr.norm(cone, prm.p, prm.nu, quad)
        logs.append(math.log(num) - math.log(den))
        lnorm.append(math.log(den))
    lr = np.log(np.asarray(Rs, dtype=float))
    slope = float(np.polyfit(lr, logs, 1)[0])
    nslope = float(np.polyfit(lr, lnorm, 1)[0])
    fit = DilationFit(slope, dilation_slope_predicted(cone, prm), list(Rs), logs, nslope)
    return fit if full else slope


@dataclass
class NecessityReport:
    direct_diverges: bool
    adjoint_diverges: bool
    direct_exponents: tuple
    adjoint_exponents: tuple

    @property
    def both_converge(self) -> bool:
        return not (self.direct_diverges or self.adjoint_diverges)

    def to_dict(self):
        return asdict(self)


def necessity_exponents(cone, prm: SParams):
    """Exponent pairs ``(a, b)`` of ``int Delta^a(y) Delta^b(y + e) dy``.

    Direct: ``S`` applied to a ball indicator must lie in ``L^q_mu``.
    Adjoint: the same for ``S*`` in ``L^{p'}_nu``.
    """
    from .decision import conjugate

    nr = cone.n_over_r
    pc = conjugate(prm.p)
    direct = (prm.q * prm.alpha + prm.mu - nr, -prm.q * prm.gamma)
    adjoint = ((prm.beta - prm.nu + nr) * pc + prm.nu - nr, -pc * prm.gamma)
    return direct, adjoint


def _power_pair(cone, a, b):
    e = identity(cone)

    def f(y, det):
        return np.exp(a * np.log(det) + b * np.log(shifted_determinant(cone, y, e, det)))

    return f


def necessity_probe_S(cone: ConeDescriptor, prm: SParams, quad=None) -> NecessityReport:
    """Divergence tests for the direct and adjoint necessity integrals."""
    quad = quad or QuadratureConfig()
    direct, adjoint = necessity_exponents(cone, prm)
    dd = bool(detect_divergence(cone, _power_pair(cone, *direct), quad, symmetric=True))
    da = bool(detect_divergence(cone, _power_pair(cone, *adjoint), quad, symmetric=True))
    return NecessityReport(dd, da, direct, adjoint)


def apply_Tplus(cone: ConeDescriptor, prm: TParams, f: TubeBoxIndicator, z, quad=None) -> float:
    """``T+ f(z)`` with the kernel normalisation constant set to 1."""
    z = np.asarray(z, dtype=complex).reshape(-1)
    nr = cone.n_over_r
    X, Y, D, W = f.rule(cone)
    wbar = X - 1j * Y
    kern = np.abs(complex_determinant(cone, (z[None, :] - wbar) / 1j)) ** (-(prm.gamma + nr))
    vals = kern * D**prm.beta
    dz = float(determinant(cone, z.imag))
    return float(dz**prm.alpha * np.sum(vals * W))


def norm_lower_bound(cone: ConeDescriptor, prm: SParams, family: Sequence[TestFunction],
                     quad=None, outer: QuadratureConfig = None) -> float:
    """``max ||S g|| / ||g||`` over a family; 0 for an empty family."""
    best = 0.0
    for g in family:
        num = norm_S_image(cone, prm, g, quad, outer,
                           symmetric=_is_invariant(cone, g))
        best = max(best, num / g.norm(cone, prm.p, prm.nu, quad))
    return best


def _is_invariant(cone, g):
    e = identity(cone)
    if isinstance(g, Dilate):
        return _is_invariant(cone, g.base)
    if isinstance(g, ConeBallIndicator):
        return bool(np.allclose(g.center, g.center[0] * e))
    return getattr(g, "shift", 0) is None


# ---------------------------------------------------------------------------
# scans

_AXES = ("alpha", "beta", "gamma", "nu", "mu", "p", "q", "s")


@dataclass
class ScanReport:
    axes: tuple
    grids: tuple
    statuses: np.ndarray
    violated: np.ndarray
    indicator: np.ndarray
    routes: np.ndarray = None

    def to_csv(self, fh=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["axis1", "axis2", "status", "violated", "indicator"])
        for i, a in enumerate(self.grids[0]):
            for j, b in enumerate(self.grids[1]):
                ind = self.indicator[i, j]
                w.writerow([repr(float(a)), repr(float(b)), self.statuses[i, j],
                            ";".join(self.violated[i, j]),
                            "" if np.isnan(ind) else repr(float(ind))])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text

    @property
    def shape(self):
        return self.statuses.shape


def _decide(cone, op, prm: dict) -> Verdict:
    if op == "S":
        return decide_S(cone, SParams(**{k: prm[k] for k in ("alpha", "beta", "gamma", "nu", "mu", "p", "q")}))
    if op == "Tmixed":
        return decide_Tplus_mixed(cone, TParams(**prm))
    if op == "Tpure":
        return sufficient_Tplus_pure(cone, TParams(**prm))
    if op == "Pplus":
        return decide_Pplus_mixed(cone, prm["nu"], prm["mu"], prm["p"], prm["q"], prm["s"])
    if op == "Pgamma":
        return necessary_offdiag_Pgamma(cone, prm["nu"], prm["mu"], prm["gamma"],
                                        prm["p"], prm["q"], prm["s"])
    raise ValueError(f"unknown operator {op!r}")


def scan_phase_diagram(cone: ConeDescriptor, base: dict, axis1: str, axis2: str,
                       grid1: Sequence[float], grid2: Sequence[float], *, op: str = "S",
                       derive: Optional[Dict[str, Callable]] = None,
                       indicator: bool = False, quad=None, workers: int = 1) -> ScanReport:
    """Verdicts on a two-parameter grid.

    ``derive`` maps a parameter name to ``fn(params_dict, cone) -> value``
    evaluated per cell after the axes are set (e.g. gamma from homogeneity).
    With ``indicator=True`` (operator S only) each bounded-looking cell also
    gets a numeric norm lower bound from a small family of probe balls.
    Cells are evaluated independently; ``workers > 1`` uses a thread pool
    and leaves the output unchanged.
    """
    for ax in (axis1, axis2):
        if ax not in _AXES:
            raise ValueError(f"unknown axis {ax!r}")
    g1, g2 = np.asarray(grid1, float), np.asarray(grid2, float)
    shape = (g1.size, g2.size)
    statuses = np.empty(shape, dtype=object)
    violated = np.empty(shape, dtype=object)
    routes = np.empty(shape, dtype=object)
    ind = np.full(shape, np.nan)
    family = [Dilate(default_ball(cone), R) for R in (0.5, 1.0, 2.0)]

    def cell(ij):
        i, j = ij
        prm = dict(base)
        prm[axis1] = float(g1[i])
        prm[axis2] = float(g2[j])
        for name, fn in (derive or {}).items():
            prm[name] = float(fn(prm, cone))
        v = _decide(cone, op, prm)
        val = math.nan
        if indicator and op == "S" and v.status != SCOPE_ERROR:
            sp = SParams(**{k: prm[k] for k in ("alpha", "beta", "gamma", "nu", "mu", "p", "q")})
            try:
                val = norm_lower_bound(cone, sp, family, quad)
            except (DivergentIntegralError, ValueError, FloatingPointError):
                val = math.inf
        return v, val

    cells = list(itertools.product(range(shape[0]), range(shape[1])))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(cell, cells))
    else:
        results = [cell(ij) for ij in cells]
    for (i, j), (v, val) in zip(cells, results):
        statuses[i, j] = v.status
        violated[i, j] = list(v.violated)
        routes[i, j] = v.route
        ind[i, j] = val
    return ScanReport((axis1, axis2), (g1, g2), statuses, violated, ind, routes)


def derive_homogeneous_gamma(prm: dict, cone: ConeDescriptor) -> float:
    return homogeneous_gamma_S(cone, prm["alpha"], prm["beta"], prm["nu"], prm["mu"], prm["p"], prm["q"])
