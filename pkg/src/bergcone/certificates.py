"""Schur-type certificates for the positive operators S and T+.

A certificate is a triple ``(u, v, t)``: the test functions are
``phi1 = Delta^{-u}`` (input side) and ``phi2 = Delta^{-v}`` (output side),
and ``t`` splits the kernel as ``K^t K^{1-t}``.  For fixed ``t`` every
constraint on ``(u, v)`` is an interval whose endpoints are affine in ``t``,
and ``v - u`` itself is affine in ``t``, so feasibility reduces to
intersecting intervals for ``u``.

The verification integrals are

    I1(y) = int K(y, x)^{t p'} phi1(x)^{p'} dmu_in(x)   = C1 phi2(y)^{p'}
    I2(x) = int K(y, x)^{(1-t) q} phi2(y)^q dmu_out(y)  = C2 phi1(x)^q

and give the operator-norm bound ``C1^{1/p'} C2^{1/q}``.  For ``p = 1`` the
first condition becomes ``sup_x phi1(x) K(y, x)^t <= C1 phi2(y)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, asdict
import json
import math
from typing import Callable, List, Optional, Sequence

import numpy as np

from .cones import ConeDescriptor, determinant, from_matrix, identity, shifted_determinant
from .decision import (
    BOUNDED,
    SUFFICIENT,
    SParams,
    TParams,
    conjugate,
    decide_S,
    sufficient_Tplus_pure,
)
from .exceptions import (
    CertificateError,
    DivergentIntegralError,
    InfeasibleCertificateError,
    PreconditionError,
)
from .integrability import Lemma31Query, gpow_with_det, lemma31_converges
from .quadrature import QuadratureConfig, integrate_cone, integrate_tube

__all__ = [
    "OkikioluCertificate",
    "FeasibilityWindow",
    "SchurRatioCheck",
    "windows_S",
    "windows_Tplus",
    "find_certificate_S",
    "verify_certificate_S",
    "find_certificate_Tplus",
    "verify_certificate_Tplus",
    "holder_bound_S_infty",
    "okikiolu_generic_check",
    "closing_identities",
    "default_samples",
]

KIND_S = "ConeS"
KIND_S1 = "ConeS_p1"
KIND_T = "TubeTplus"

T_GRID = 64


@dataclass
class OkikioluCertificate:
    kind: str
    u: float
    v: float
    t: float
    omega: float
    slack: float
    M1: float = math.nan
    M2: float = math.nan

    @property
    def bound(self) -> float:
        return self.M1 * self.M2

    def to_dict(self) -> dict:
        return {k: (None if isinstance(x, float) and math.isnan(x) else x)
                for k, x in asdict(self).items()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "OkikioluCertificate":
        fields = ("kind", "u", "v", "t", "omega", "slack", "M1", "M2")
        kw = {k: d[k] for k in fields if k in d}
        for k in ("M1", "M2"):
            if kw.get(k) is None:
                kw[k] = math.nan
        return cls(**kw)


@dataclass
class FeasibilityWindow:
    """Affine-in-t constraints ``lo(t) < var < hi(t)`` and the gap ``v - u``.

    Each affine function is stored as ``(c0, c1)`` meaning ``c0 + c1 * t``.
    """

    constraints: list  # (name, var, lo, hi)
    gap: tuple
    t_interval: tuple
    gap_max: float = math.inf

    @staticmethod
    def _ev(c, t):
        return c[0] + c[1] * t

    def u_interval(self, t: float):
        """Feasible ``u`` interval at fixed ``t`` (possibly empty)."""
        g = self._ev(self.gap, t)
        lo, hi = -math.inf, math.inf
        for _, var, a, b in self.constraints:
            shift = g if var == "v" else 0.0
            lo = max(lo, self._ev(a, t) - shift)
            hi = min(hi, self._ev(b, t) - shift)
        return lo, hi

    def intervals(self, t: float) -> dict:
        return {name: (var, self._ev(a, t), self._ev(b, t))
                for name, var, a, b in self.constraints}

    def satisfied(self, u: float, v: float, t: float) -> bool:
        vals = {"u": u, "v": v}
        return all(self._ev(a, t) < vals[var] < self._ev(b, t)
                   for _, var, a, b in self.constraints)

    def gap_slack(self, t: float) -> float:
        """Distance of ``v - u`` from the ends of ``(0, gap_max)``."""
        g = self._ev(self.gap, t)
        return min(g, self.gap_max - g)


def _t_interval(offset, width):
    # t = (offset + (v - u)) / width with 0 < v - u
    t0 = offset / width
    return (max(0.0, t0), 1.0)


def windows_S(cone: ConeDescriptor, prm: SParams) -> FeasibilityWindow:
    nr = cone.n_over_r
    a, b, g, nu, mu, p, q = (prm.alpha, prm.beta, prm.gamma, prm.nu, prm.mu, prm.p, prm.q)
    B = b - nu + nr
    G = b - g - nu + nr
    vlo = ("v_lower", "v", (0.0, -a), ((mu - nr + 1) / q + a, -a))
    vhi = ("v_upper", "v", ((mu + nr - 1) / q - (g - a), g - a), (0.0, g - a))
    if p == 1:
        omega = -mu / q
        cons = [
            ("u_lower", "u", (-B, B), (0.0, B)),
            ("u_upper", "u", (0.0, G), (-G, G)),
            vlo,
            vhi,
        ]
        return FeasibilityWindow(cons, (0.0, -omega), (0.0, 1.0), mu / q)
    pc = conjugate(p)
    omega = -(nu / pc + mu / q)
    cons = [
        ("u_lower", "u", (-B, B), ((nu - nr + 1) / pc, B)),
        ("u_upper", "u", ((nu + nr - 1) / pc, G), (-G, G)),
        vlo,
        vhi,
    ]
    return FeasibilityWindow(cons, (-nu / pc, -omega), _t_interval(nu / pc, -omega), mu / q)


def windows_Tplus(cone: ConeDescriptor, prm: TParams) -> FeasibilityWindow:
    nr = cone.n_over_r
    a, b, nu, mu, p, q = prm.alpha, prm.beta, prm.nu, prm.mu, prm.p, prm.q
    pc = conjugate(p)
    B = b - nu + nr
    omega = -((nu + nr) / pc + (mu + nr) / q)
    cons = [
        ("u_window", "u", (-B + (nr - 1) / q, B), ((nu - nr + 1) / pc, B)),
        ("v_window", "v", ((nr - 1) / pc, -a), ((mu - nr + 1) / q + a, -a)),
    ]
    off = (nu + nr) / pc
    return FeasibilityWindow(cons, (-off, -omega), _t_interval(off, -omega), (mu + nr) / q)


def _best_at(win: FeasibilityWindow, t: float, use_gap: bool = True):
    lo, hi = win.u_interval(t)
    slack = 0.5 * (hi - lo)
    if use_gap:
        slack = min(slack, win.gap_slack(t))
    return slack, 0.5 * (hi + lo)


def _search(win: FeasibilityWindow, kind: str, omega: float) -> OkikioluCertificate:
    def scan(t_lo, t_hi, use_gap):
        ts = t_lo + (t_hi - t_lo) * (np.arange(T_GRID) + 0.5) / T_GRID
        best = None
        for t in ts:
            slack, u = _best_at(win, float(t), use_gap)
            if best is None or slack > best[0]:
                best = (slack, u, float(t))
        return best, (t_hi - t_lo) / T_GRID

    t_lo, t_hi = win.t_interval
    use_gap = True
    best, h = scan(t_lo, t_hi, use_gap)
    if best[0] <= 0:
        # 0 < v - u is a convenience of the construction; any t in (0, 1) works
        t_lo, t_hi, use_gap = 0.0, 1.0, False
        best, h = scan(t_lo, t_hi, use_gap)
    if best[0] <= 0:
        raise InfeasibleCertificateError("no (u, v, t) satisfies the certificate windows")
    # slack is concave in t; polish the grid optimum by ternary search
    inset = 1e-9 * (t_hi - t_lo)
    lo, hi = max(best[2] - h, t_lo + inset), min(best[2] + h, t_hi - inset)
    for _ in range(60):
        m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
        if _best_at(win, m1, use_gap)[0] < _best_at(win, m2, use_gap)[0]:
            lo = m1
        else:
            hi = m2
    t = 0.5 * (lo + hi)
    slack, u = _best_at(win, t, use_gap)
    if slack < best[0]:
        slack, u, t = best
    v = u + FeasibilityWindow._ev(win.gap, t)
    return OkikioluCertificate(kind, float(u), float(v), float(t), float(omega), float(slack))


def find_certificate_S(cone: ConeDescriptor, prm: SParams) -> OkikioluCertificate:
    """Witness ``(u, v, t)`` for S when p < inf and q < inf."""
    verdict = decide_S(cone, prm)
    if verdict.status != BOUNDED or math.isinf(prm.q):
        raise PreconditionError(
            f"certificate search needs a bounded finite-exponent case, got {verdict.status}"
        )
    win = windows_S(cone, prm)
    if prm.p == 1:
        return _search(win, KIND_S1, -prm.mu / prm.q)
    return _search(win, KIND_S, -(prm.nu / conjugate(prm.p) + prm.mu / prm.q))


def find_certificate_Tplus(cone: ConeDescriptor, prm: TParams) -> OkikioluCertificate:
    verdict = sufficient_Tplus_pure(cone, prm)
    if verdict.status != SUFFICIENT:
        raise PreconditionError(f"sufficient conditions fail: {verdict.violated}")
    nr = cone.n_over_r
    omega = -((prm.nu + nr) / conjugate(prm.p) + (prm.mu + nr) / prm.q)
    return _search(windows_Tplus(cone, prm), KIND_T, omega)


# ---------------------------------------------------------------------------
# exponent bookkeeping


def _s_exponents(cone, prm, cert):
    """Lemma-type exponents ``(s, t)`` of the two inner cone integrals."""
    nr = cone.n_over_r
    B = prm.beta - prm.nu + nr
    q = prm.q
    out = {}
    if cert.kind == KIND_S:
        pc = conjugate(prm.p)
        out["I1"] = (-cert.t * pc * prm.gamma, cert.t * pc * B - pc * cert.u + prm.nu)
    out["I2"] = (-(1 - cert.t) * q * prm.gamma, (1 - cert.t) * q * prm.alpha - q * cert.v + prm.mu)
    return out


def closing_identities(cone: ConeDescriptor, prm, cert: OkikioluCertificate) -> dict:
    """Residuals of the exponent identities that close the sufficiency argument.

    Each residual is zero exactly when the certificate's ``t`` is consistent
    with ``omega`` and ``v - u``; callers assert ``|residual| <= 1e-12``.
    """
    nr = cone.n_over_r
    a, b, g, nu, mu, q = prm.alpha, prm.beta, prm.gamma, prm.nu, prm.mu, prm.q
    B = b - nu + nr
    t, u, v = cert.t, cert.u, cert.v
    res = {}
    if cert.kind == KIND_S:
        pc = conjugate(prm.p)
        res["omega"] = cert.omega - (a + b - g - nu + nr)
        res["I1"] = (t * pc * a - t * pc * g + t * pc * B - pc * u + nu) - (-pc * v)
        res["I2"] = ((1 - t) * q * B - (1 - t) * q * g + (1 - t) * q * a - q * v + mu) - (-q * u)
    elif cert.kind == KIND_S1:
        res["omega"] = cert.omega - (a + b - g - nu + nr)
        res["sup"] = -u + t * B - g * t + v + t * a
        res["I2"] = ((1 - t) * q * B - (1 - t) * q * g + (1 - t) * q * a - q * v + mu) - (-q * u)
    else:
        pc = conjugate(prm.p)
        res["omega"] = cert.omega - (a + b - g - nu)
        res["J1"] = (t * pc * a - t * pc * (g + nr) + t * pc * B - pc * u + nu + nr) - (-pc * v)
        res["J2"] = ((1 - t) * q * B - (1 - t) * q * (g + nr) + (1 - t) * q * a - q * v + mu + nr) - (-q * u)
    return res


# ---------------------------------------------------------------------------
# sampling


def default_samples(cone: ConeDescriptor, n_random: int = 3, seed: int = 7) -> List[np.ndarray]:
    """Dilates ``lambda e`` for lambda in {1/4, ..., 4} plus random cone points."""
    e = identity(cone)
    pts = [lam * e for lam in (0.25, 0.5, 1.0, 2.0, 4.0)]
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        if cone.kind == "halfline":
            pts.append(np.array([math.exp(rng.uniform(-1.5, 1.5))]))
        elif cone.kind == "lorentz":
            y1 = math.exp(rng.uniform(-1, 1))
            w = rng.standard_normal(cone.n - 1)
            w *= rng.uniform(0.1, 0.7) * y1 / np.linalg.norm(w)
            pts.append(np.concatenate([[y1], w]))
        else:
            A = rng.standard_normal((cone.r, cone.r))
            pts.append(from_matrix(cone, A @ A.T / cone.r + 0.3 * np.eye(cone.r)))
    return pts


def _is_dilate_of_e(cone, y):
    e = identity(cone)
    lam = float(y[0]) / float(e[0])
    return bool(np.allclose(y, lam * e, rtol=0, atol=1e-14 * max(1.0, abs(lam))))


# ---------------------------------------------------------------------------
# generic checker


@dataclass
class SchurRatioCheck:
    M1: float
    M2: float
    bound: float
    ratios1: list = field(default_factory=list)
    ratios2: list = field(default_factory=list)
    spread1: float = 0.0
    spread2: float = 0.0
    quad_err: float = 0.0
    sup_limit_case: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _spread(r):
    r = np.asarray(r, dtype=float)
    return float((r.max() - r.min()) / abs(r.mean())) if r.size else 0.0


def okikiolu_generic_check(
    cone: ConeDescriptor,
    log_kernel: Callable,
    log_phi1: Callable,
    log_phi2: Callable,
    t: float,
    p: float,
    q: float,
    *,
    log_w_in: Callable = None,
    log_w_out: Callable = None,
    samples_in: Optional[Sequence] = None,
    samples_out: Optional[Sequence] = None,
    quad: QuadratureConfig | None = None,
    invariant: bool = False,
    sup_points: int = 4000,
    seed: int = 11,
) -> SchurRatioCheck:
    """Evaluate the two Schur-type conditions on sample sets.

    All functions are given as logarithms and take ``(point(s), det)``:

    ``log_kernel(y, x, det_x)`` and ``log_kernel_T(x, y, det_y)`` are both
    derived from ``log_kernel(y, x, det_x, det_y)`` where ``y`` is the output
    variable.  ``log_phi1(x, det)`` lives on the input space and
    ``log_phi2(y, det)`` on the output space.  ``log_w_in``/``log_w_out`` are
    the densities of the two measures against Lebesgue measure (default 1).

    Returns the smallest constants ``M1``, ``M2`` valid on the samples.  For
    ``p = 1`` the first condition is the supremum form and ``M1 = C1``.
    With ``invariant=True`` integrals at dilates of ``e`` use the collapsed
    angular rule (only valid for stabiliser-invariant integrands).
    """
    if not 0 < t <= 1:
        raise PreconditionError("t must lie in (0, 1]")
    if not 1 <= p <= q < math.inf:
        raise PreconditionError("requires 1 <= p <= q < inf")
    quad = quad or QuadratureConfig()
    zero = lambda pts, det: np.zeros_like(det)
    log_w_in = log_w_in or zero
    log_w_out = log_w_out or zero
    samples_out = samples_out or default_samples(cone)
    samples_in = samples_in or default_samples(cone, seed=8)
    errs = [0.0]

    def det1(pt):
        return float(determinant(cone, pt))

    ratios1 = []
    if p == 1:
        # supremum over x of phi1(x) K(y, x)^t / phi2(y), on a dense sample
        xs, dx = _dense_points(cone, sup_points, seed)
        for y in samples_out:
            y = np.asarray(y, float)
            dy = det1(y)
            val = (log_phi1(xs, dx) + t * log_kernel(y[None, :], xs, dx, np.full_like(dx, dy))
                   - log_phi2(y[None, :], np.array([dy])))
            ratios1.append(float(np.exp(val.max())))
        C1 = max(ratios1)
        M1 = C1
    else:
        pc = conjugate(p)
        tp = t * pc
        for y in samples_out:
            y = np.asarray(y, float)
            dy = det1(y)

            def f(x, dx, y=y, dy=dy):
                return np.exp(tp * log_kernel(y[None, :], x, dx, np.full_like(dx, dy))
                              + pc * log_phi1(x, dx) + log_w_in(x, dx))

            est = integrate_cone(cone, f, quad, symmetric=invariant and _is_dilate_of_e(cone, y))
            if est.diverging:
                raise DivergentIntegralError(f"first Schur integral diverges at y={y}")
            errs.append(float(est.rel_err))
            ratios1.append(float(est.value) / math.exp(pc * float(log_phi2(y[None, :], np.array([dy]))[0])))
        M1 = max(ratios1) ** (1 / pc)

    ratios2 = []
    for x in samples_in:
        x = np.asarray(x, float)
        dxx = det1(x)

        def f2(y, dy, x=x, dxx=dxx):
            return np.exp((1 - t) * q * log_kernel(y, x[None, :], np.full_like(dy, dxx), dy)
                          + q * log_phi2(y, dy) + log_w_out(y, dy))

        est = integrate_cone(cone, f2, quad, symmetric=invariant and _is_dilate_of_e(cone, x))
        if est.diverging:
            raise DivergentIntegralError(f"second Schur integral diverges at x={x}")
        errs.append(float(est.rel_err))
        ratios2.append(float(est.value) / math.exp(q * float(log_phi1(x[None, :], np.array([dxx]))[0])))
    M2 = max(ratios2) ** (1 / q)
    return SchurRatioCheck(
        M1=float(M1), M2=float(M2), bound=float(M1 * M2),
        ratios1=ratios1, ratios2=ratios2,
        spread1=_spread(ratios1), spread2=_spread(ratios2),
        quad_err=float(max(errs)), sup_limit_case=(p == 1),
    )


def _dense_points(cone, m, seed):
    """Points spread over many scales and boundary distances."""
    rng = np.random.default_rng(seed)
    scale = np.exp(rng.uniform(-12, 12, size=m))
    if cone.kind == "halfline":
        x = scale[:, None]
        return x, x[:, 0].copy()
    if cone.kind == "lorentz":
        gap = np.exp(rng.uniform(-20, 0, size=m))
        s = 1.0 - gap
        w = rng.standard_normal((m, cone.n - 1))
        w /= np.linalg.norm(w, axis=1, keepdims=True)
        x = np.concatenate([scale[:, None], (scale * s)[:, None] * w], axis=1)
        return x, scale**2 * gap * (1 + s)
    A = rng.standard_normal((m, cone.r, cone.r))
    mats = A @ np.swapaxes(A, -1, -2) + 1e-6 * np.eye(cone.r)
    x = from_matrix(cone, mats * scale[:, None, None])
    return x, np.asarray(determinant(cone, x))


# ---------------------------------------------------------------------------
# S on the cone


def _log_gpow(cone, a):
    def fn(pts, det):
        return a * np.log(det)
    return fn


def _s_log_kernel(cone, prm):
    nr = cone.n_over_r
    B = prm.beta - prm.nu + nr

    def lk(y, x, dx, dy):
        # expand around the side that carries quadrature nodes
        if x.shape[0] >= y.shape[0]:
            dsum = shifted_determinant(cone, x, y, dx)
        else:
            dsum = shifted_determinant(cone, y, x, dy)
        return prm.alpha * np.log(dy) - prm.gamma * np.log(dsum) + B * np.log(dx)
    return lk


def verify_certificate_S(cone: ConeDescriptor, prm: SParams, cert: OkikioluCertificate,
                         quad: QuadratureConfig | None = None,
                         samples: Optional[Sequence] = None, *, rtol: float = 0.01,
                         report: bool = False):
    """Check the certificate numerically and return ``(M1, M2)``.

    Raises :class:`DivergentIntegralError` when an inner integral fails the
    convergence test, and :class:`CertificateError` when the ratios are not
    constant within ``max(rtol, quadrature error)``.
    """
    for name, (s_, t_) in _s_exponents(cone, prm, cert).items():
        if not lemma31_converges(Lemma31Query(cone, s_, t_)):
            raise DivergentIntegralError(f"{name} diverges for this certificate")
    nr = cone.n_over_r
    chk = okikiolu_generic_check(
        cone,
        _s_log_kernel(cone, prm),
        _log_gpow(cone, -cert.u),
        _log_gpow(cone, -cert.v),
        cert.t, prm.p, prm.q,
        log_w_in=_log_gpow(cone, prm.nu - nr),
        log_w_out=_log_gpow(cone, prm.mu - nr),
        samples_in=samples, samples_out=samples, quad=quad, invariant=True,
    )
    tol = max(rtol, 10 * chk.quad_err)
    if cert.kind == KIND_S1:
        if chk.M1 > 1 + 1e-9:
            raise CertificateError(f"supremum condition exceeds 1: {chk.M1}")
        bad = chk.spread2 > tol
    else:
        bad = chk.spread1 > tol or chk.spread2 > tol
    if bad:
        raise CertificateError(
            f"ratio spread {chk.spread1:.3g}/{chk.spread2:.3g} exceeds {tol:.3g}"
        )
    cert.M1, cert.M2 = chk.M1, chk.M2
    if cert.kind == KIND_S1:
        # the supremum condition holds with constant exactly 1
        cert.M1 = 1.0
    if report:
        return cert.M1, cert.M2, chk
    return cert.M1, cert.M2


def holder_bound_S_infty(cone: ConeDescriptor, prm: SParams,
                         quad: QuadratureConfig | None = None,
                         samples: Optional[Sequence] = None, *, rtol: float = 0.01) -> float:
    """Constant ``C`` with ``sup |Sg| <= C ||g||_{p,nu}`` when ``q = inf``."""
    verdict = decide_S(cone, prm)
    if not math.isinf(prm.q) or verdict.status != BOUNDED:
        raise PreconditionError(f"needs a bounded q = inf case, got {verdict.status}")
    nr = cone.n_over_r
    pc = conjugate(prm.p)
    s_ = -pc * prm.gamma
    t_ = pc * (prm.beta - prm.nu + nr) + prm.nu
    if not lemma31_converges(Lemma31Query(cone, s_, t_)):
        raise DivergentIntegralError("inner integral diverges")
    samples = samples or default_samples(cone)
    vals, errs = [], [0.0]
    for y in samples:
        y = np.asarray(y, float)

        def f(x, dx, y=y):
            return np.exp(s_ * np.log(shifted_determinant(cone, x, y, dx)) + (t_ - nr) * np.log(dx))

        est = integrate_cone(cone, f, quad, symmetric=_is_dilate_of_e(cone, y))
        if est.diverging:
            raise DivergentIntegralError("inner integral diverges")
        errs.append(float(est.rel_err))
        vals.append(float(determinant(cone, y)) ** prm.alpha * float(est.value) ** (1 / pc))
    if _spread(vals) > max(rtol, 10 * max(errs)):
        raise CertificateError(f"Hoelder constant varies over samples: {vals}")
    return float(max(vals))


# ---------------------------------------------------------------------------
# T+ on the tube (upper half-plane for the half-line)


def verify_certificate_Tplus(cone: ConeDescriptor, prm: TParams, cert: OkikioluCertificate,
                             quad: QuadratureConfig | None = None,
                             samples: Optional[Sequence[float]] = None, *, rtol: float = 0.02,
                             report: bool = False):
    """Check the tube certificate at points ``z = i y`` and return ``(M1, M2)``.

    Only the half-line tube (the upper half-plane) is supported: the kernel
    magnitude is ``|x - x' + i (y + y')|^{-(gamma + 1)}``.
    """
    if cone.kind != "halfline":
        raise ValueError("tube certificate verification is implemented for the half-line")
    nr = cone.n_over_r
    pc = conjugate(prm.p)
    q = prm.q
    t, u, v = cert.t, cert.u, cert.v
    B = prm.beta - prm.nu + nr
    g = prm.gamma + nr
    # inner tube integrals: exponents (a, b) in |.|^{-a} (Im w)^{b - n/r}
    a1, b1 = t * pc * g, t * pc * B - pc * u + prm.nu
    a2, b2 = (1 - t) * q * g, (1 - t) * q * prm.alpha - q * v + prm.mu
    guard1 = -prm.alpha * t * pc - pc * v - nr
    guard2 = -q * u - (1 - t) * q * B - nr
    if not (b1 > nr - 1 and b2 > nr - 1 and guard1 < -2 * nr + 1 and guard2 < -2 * nr + 1):
        raise DivergentIntegralError("tube integrals diverge for this certificate")
    quad = quad or QuadratureConfig(truncation=30.0)
    samples = samples or [0.25, 0.5, 1.0, 2.0, 4.0]

    def tube_int(a, b, y0):
        def f(x, y, dy):
            return np.exp(-0.5 * a * np.log(x[:, 0] ** 2 + (y0 + y[:, 0]) ** 2)
                          + (b - nr) * np.log(dy))
        return integrate_tube(cone, f, quad, x_scale=lambda yy: y0 + yy[..., 0])

    r1, r2, errs = [], [], [0.0]
    for y0 in samples:
        e1 = tube_int(a1, b1, y0)
        e2 = tube_int(a2, b2, y0)
        if e1.diverging or e2.diverging:
            raise DivergentIntegralError("tube integral diverges numerically")
        errs += [float(e1.rel_err), float(e2.rel_err)]
        r1.append(y0 ** (t * pc * prm.alpha) * float(e1.value) / y0 ** (-pc * v))
        r2.append(y0 ** ((1 - t) * q * B) * float(e2.value) / y0 ** (-q * u))
    tol = max(rtol, 10 * max(errs))
    if _spread(r1) > tol or _spread(r2) > tol:
        raise CertificateError(f"tube ratio spread {_spread(r1):.3g}/{_spread(r2):.3g}")
    cert.M1 = max(r1) ** (1 / pc)
    cert.M2 = max(r2) ** (1 / q)
    if report:
        chk = SchurRatioCheck(cert.M1, cert.M2, cert.M1 * cert.M2, r1, r2,
                            _spread(r1), _spread(r2), max(errs))
        return cert.M1, cert.M2, chk
    return cert.M1, cert.M2
