"""Improper integrals over symmetric cones and tube domains.

Integrands are vectorised callables ``f(y, det)`` where ``y`` is an array of
points of shape ``(m, n)`` and ``det`` holds ``Delta(y)`` for those points,
computed from the parametrisation so that it keeps full relative accuracy
right up to the cone boundary.  Integrands whose only boundary singularity
is a power of ``Delta(y)`` should use ``det`` rather than recomputing it from
``y``.  ``f`` may return an array of shape ``(..., m)``; the leading axes are
integrated independently (one integral per batch element).

Rules
-----
half-line
    ``y = exp(u)``, trapezoid rule in ``u``.
Lorentz(3)
    ``y = R (1, s cos(theta), s sin(theta))`` with ``R = exp(u)`` and
    ``s = 1 / (1 + exp(-x))``, so the boundary gap ``1 - s`` decays like
    ``exp(-x)``.  Trapezoid rules in ``u``, ``x`` and the periodic ``theta``.
SPD(2)
    Mapped onto Lorentz(3) by ``(a, b, c) -> (a + b, a - b, c)``, which
    preserves the determinant and has constant Jacobian 2.

Power-law behaviour at the ends of the ``u`` and ``x`` windows becomes
exponential decay in the mapped variables.  The truncated trapezoid sum is
completed with the geometric tail implied by the last two nodes, and an end
whose local decay rate drops below ``min_decay`` marks the integral as
diverging.
"""
from __future__ import annotations

from dataclasses import dataclass, asdict
import math

import numpy as np
from scipy import special, stats

from .cones import ConeDescriptor, determinant, from_matrix
from .exceptions import QuadratureError

__all__ = [
    "QuadratureConfig",
    "QuadratureEstimate",
    "integrate_cone",
    "integrate_tube",
    "integrate_tube_mixed",
    "detect_divergence",
    "partial_integrals",
    "ball_rule",
]

_MAX_CHUNK = 400_000
_MAP_ALIASES = {"expsubstitution": "exp", "exp": "exp", "compactify": "compactify"}


@dataclass(frozen=True)
class QuadratureConfig:
    """Knobs for the deterministic rules.

    ``truncation`` is the half-width of the ``u = log R`` window; the boundary
    variable ``x`` runs over ``[-truncation, 2 * truncation]``.  Level ``l``
    uses step ``step / 2**l`` and ``angular_nodes * 2**l`` angles.
    """

    levels: int = 2
    map: str = "exp"
    truncation: float = 24.0
    step: float = 0.5
    angular_nodes: int = 16
    target_rel_err: float = 1e-6
    mc_samples: int = 200_000
    min_decay: float = 1e-3
    seed: int = 12345

    def __post_init__(self):
        if self.levels < 2:
            raise ValueError("levels must be >= 2")
        if self.target_rel_err <= 0:
            raise ValueError("target_rel_err must be positive")
        alias = _MAP_ALIASES.get(str(self.map).lower())
        if alias is not None:
            object.__setattr__(self, "map", alias)
        if self.map not in ("exp", "compactify"):
            raise ValueError(f"unknown map {self.map!r}")

    def replace(self, **kw) -> "QuadratureConfig":
        return QuadratureConfig(**{**asdict(self), **kw})


@dataclass
class QuadratureEstimate:
    value: np.ndarray | float
    rel_err: np.ndarray | float
    converged: np.ndarray | bool
    diverging: np.ndarray | bool

    def to_dict(self) -> dict:
        def conv(a):
            a = np.asarray(a)
            if a.dtype == bool:
                return a.tolist()
            return np.where(np.isfinite(a), a, np.inf).tolist() if a.ndim else (
                float(a) if np.isfinite(a) else "inf"
            )

        return {k: conv(getattr(self, k)) for k in ("value", "rel_err", "converged", "diverging")}


# ---------------------------------------------------------------------------
# 1-D building blocks


_TINY = np.finfo(float).tiny


def _grid(lo: float, hi: float, h: float) -> np.ndarray:
    n = int(round((hi - lo) / h))
    return lo + h * np.arange(n + 1)


def _tail(last, prev, h, min_decay):
    """Geometric completion beyond a window end, plus a divergence flag."""
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(prev > 0, last / prev, np.inf)
        limit = math.exp(-min_decay * h)
        div = (last > 0) & ~(ratio < limit)
        tail = np.where((last > 0) & ~div, h * last * ratio / (1.0 - ratio), 0.0)
    return tail, div


def _reduce(G, h, min_decay, tails=True):
    """Trapezoid sum over the last axis with geometric tail completion."""
    G = np.abs(G)
    bad = ~np.all(np.isfinite(G), axis=-1)
    # subnormals have no relative precision; a ratio of two of them is noise
    G = np.where(np.isfinite(G) & (G >= _TINY), G, 0.0)
    total = h * G.sum(axis=-1)
    div = bad
    if tails:
        t_hi, d_hi = _tail(G[..., -1], G[..., -2], h, min_decay)
        t_lo, d_lo = _tail(G[..., 0], G[..., 1], h, min_decay)
        total = total + t_hi + t_lo
        div = div | d_hi | d_lo
    return total, div


def _eval(f, y, det):
    out = np.asarray(f(y, det), dtype=float)
    if out.shape[-1] != y.shape[0]:
        out = np.broadcast_to(out, out.shape[:-1] + (y.shape[0],))
    return out


# ---------------------------------------------------------------------------
# deterministic cone rules


def _radial(cfg, T, h, level):
    """Radial nodes and weights (per unit ``dR``) plus the tail step."""
    if cfg.map == "exp":
        u = _grid(-T, T, h)
        R = np.exp(u)
        return R, R, h
    n = 48 * 2**level
    w, wt = np.polynomial.legendre.leggauss(n)
    w = 0.5 * (w + 1.0)
    wt = 0.5 * wt
    R = w / (1.0 - w)
    return R, wt / (1.0 - w) ** 2, None


def _halfline(f, cfg, T, h, level, tails):
    R, wR, hu = _radial(cfg, T, h, level)
    y = R[:, None]
    G = _eval(f, y, R.copy()) * wR
    if hu is None:
        val, div = _reduce(G, 1.0, cfg.min_decay, tails=False)
        return val, div
    return _reduce(G, hu, cfg.min_decay, tails=tails)


def _lorentz3(f, cfg, T, h, level, tails, symmetric, spd=False):
    R, wR, hu = _radial(cfg, T, h, level)
    x = _grid(-T, 2 * T, h)
    s = special.expit(x)
    gap = special.expit(-x)
    if symmetric:
        th = np.zeros(1)
        hth = 2 * np.pi
    else:
        nth = cfg.angular_nodes * 2**level
        th = 2 * np.pi * np.arange(nth) / nth
        hth = 2 * np.pi / nth
    cos, sin = np.cos(th), np.sin(th)
    # d(y) = R^2 s dR ds dtheta,  ds = s * gap dx
    wx = s * s * gap
    per_row = x.size * th.size
    chunk = max(1, _MAX_CHUNK // per_row)
    rows = []
    for i0 in range(0, R.size, chunk):
        Rc = R[i0:i0 + chunk]
        RR = Rc[:, None, None]
        ss = s[None, :, None]
        y1 = np.broadcast_to(RR, (Rc.size, x.size, th.size))
        y2 = RR * ss * cos[None, None, :]
        y3 = RR * ss * sin[None, None, :]
        det = np.broadcast_to(
            RR**2 * (gap * (1.0 + s))[None, :, None], y1.shape
        )
        if spd:
            pts = np.stack([y1 + y2, y1 - y2, y3], axis=-1)
        else:
            pts = np.stack([y1, y2, y3], axis=-1)
        out = _eval(f, pts.reshape(-1, 3), det.reshape(-1))
        out = out.reshape(out.shape[:-1] + (Rc.size, x.size, th.size))
        out = out.sum(axis=-1) * hth
        w = (Rc**2 * wR[i0:i0 + chunk])[:, None] * wx[None, :]
        rows.append(out * w)
    G = np.concatenate(rows, axis=-2)
    if spd:
        G = 2.0 * G
    Gx, div_x = _reduce(G, h, cfg.min_decay, tails=tails)
    # rows whose boundary tail is flat or growing make the whole integral diverge
    div_x = np.any(div_x, axis=-1)
    if hu is None:
        val, div = _reduce(Gx, 1.0, cfg.min_decay, tails=False)
    else:
        val, div = _reduce(Gx, hu, cfg.min_decay, tails=tails)
    return val, div | div_x


def _deterministic(cone, f, cfg, T, level, tails=True, symmetric=False):
    h = cfg.step / 2**level
    if cone.kind == "halfline":
        return _halfline(f, cfg, T, h, level, tails)
    if cone.kind == "lorentz" and cone.n == 3:
        return _lorentz3(f, cfg, T, h, level, tails, symmetric)
    if cone.kind == "spd" and cone.r == 2:
        return _lorentz3(f, cfg, T, h, level, tails, symmetric, spd=True)
    return None


def _has_rule(cone: ConeDescriptor) -> bool:
    return cone.kind == "halfline" or (cone.kind, cone.size) in (("lorentz", 3), ("spd", 2))


# ---------------------------------------------------------------------------
# Monte-Carlo fallback (smoke tests on larger cones only)


def _mc_sample(cone: ConeDescriptor, m: int, rng, c: float = -0.25):
    """Sample from a density proportional to ``Delta^c(y) exp(-trace-like(y))``.

    Returns points, their determinants and the density values.
    """
    n = cone.n
    if cone.kind == "lorentz":
        R = rng.gamma(n + 2 * c, size=m)
        w = rng.beta((n - 1) / 2, c + 1, size=m)
        s = np.sqrt(w)
        omega = rng.standard_normal((m, n - 1))
        omega /= np.linalg.norm(omega, axis=1, keepdims=True)
        y = np.concatenate([R[:, None], (R * s)[:, None] * omega], axis=1)
        det = R**2 * (1 - w)
        log_sphere = math.log(2) + (n - 1) / 2 * math.log(math.pi) - special.gammaln((n - 1) / 2)
        logq = (
            stats.gamma.logpdf(R, n + 2 * c)
            + stats.beta.logpdf(w, (n - 1) / 2, c + 1)
            + np.log(2 * s)
            - log_sphere
            - (n - 1) * np.log(R)
            - (n - 2) * np.log(s)
        )
        return y, det, np.exp(logq)
    if cone.kind == "spd":
        r = cone.r
        df = 2 * c + r + 1
        W = stats.wishart(df=df, scale=0.5 * np.eye(r))
        mats = W.rvs(size=m, random_state=rng).reshape(m, r, r)
        y = from_matrix(cone, mats)
        det = np.linalg.det(mats)
        # packed coordinates: off-diagonal entries appear once
        return y, det, np.exp(W.logpdf(np.moveaxis(mats, 0, -1)))
    raise ValueError(f"no sampler for {cone}")


def _monte_carlo(cone, f, cfg):
    rng = np.random.default_rng(cfg.seed)
    y, det, q = _mc_sample(cone, cfg.mc_samples, rng)
    vals = _eval(f, y, det) / q
    mean = vals.mean(axis=-1)
    err = vals.std(axis=-1) / math.sqrt(vals.shape[-1])
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(mean != 0, err / np.abs(mean), np.inf)
    div = ~np.isfinite(mean)
    return QuadratureEstimate(mean, rel, (rel <= cfg.target_rel_err) & ~div, div)


# ---------------------------------------------------------------------------
# public API


def _finish(vals, divs, cfg):
    last, prev = vals[-1], vals[-2]
    div = np.logical_or.reduce(divs)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(last != 0, np.abs(last - prev) / np.abs(last), np.abs(last - prev))
    value = np.where(div, np.inf, last)
    rel = np.where(div, np.inf, rel)
    conv = (rel <= cfg.target_rel_err) & ~div
    if np.ndim(value) == 0:
        return QuadratureEstimate(float(value), float(rel), bool(conv), bool(div))
    return QuadratureEstimate(value, rel, conv, div)


def integrate_cone(cone: ConeDescriptor, f, cfg: QuadratureConfig | None = None, *,
                   symmetric: bool = False) -> QuadratureEstimate:
    """Integrate ``f(y, det)`` over the open cone against Lebesgue measure.

    ``symmetric=True`` may be passed for integrands invariant under the
    stabiliser of the identity (rotations of ``(y_2, ..., y_n)`` for Lorentz
    cones, orthogonal conjugation for SPD); the angular rule then collapses
    to a single node.
    """
    cfg = cfg or QuadratureConfig()
    if cone.n > 6:
        raise ValueError("cone quadrature supports n <= 6 only")
    if not _has_rule(cone):
        return _monte_carlo(cone, f, cfg)
    vals, divs = [], []
    for level in range(cfg.levels):
        v, d = _deterministic(cone, f, cfg, cfg.truncation, level, symmetric=symmetric)
        vals.append(v)
        divs.append(d)
    return _finish(vals, divs, cfg)


def partial_integrals(cone, f, cfg, windows, *, symmetric=False):
    """Truncated integrals (no tail completion) over growing mapped windows.

    Also returns whether the largest window shows a non-decaying edge.
    """
    out = []
    edge = None
    for L in windows:
        v, d = _deterministic(cone, f, cfg, float(L), 0, tails=False, symmetric=symmetric)
        out.append(v)
    _, edge = _deterministic(cone, f, cfg, float(windows[-1]), 0, tails=True, symmetric=symmetric)
    return np.array(out), edge


def detect_divergence(cone: ConeDescriptor, f, cfg: QuadratureConfig | None = None, *,
                      symmetric: bool = False, base: float = 8.0, factor: float = 1.5):
    """Heuristic divergence test for a nonnegative integrand.

    Divergence is declared when the truncated integrals over the mapped
    windows ``base * 2**k`` (k = 0..3) grow by at least ``factor`` across
    each of the three doublings, or when the integrand fails to decay at an
    edge of the largest window.
    """
    cfg = cfg or QuadratureConfig()
    if not _has_rule(cone):
        return bool(np.any(_monte_carlo(cone, f, cfg).diverging))
    windows = [base * 2**k for k in range(4)]
    with np.errstate(over="ignore", invalid="ignore"):
        P, edge = partial_integrals(cone, f, cfg, windows, symmetric=symmetric)
    P = np.moveaxis(P, 0, -1)
    finite = np.all(np.isfinite(P), axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        growth = np.all(P[..., 1:] >= factor * P[..., :-1], axis=-1) & (P[..., 0] > 0)
    out = ~finite | growth | edge
    return bool(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# compact rules


def ball_rule(cone: ConeDescriptor, center, radius: float, nodes: int = 8):
    """Tensor Gauss rule for the Euclidean ball ``B(center, radius)``.

    Returns ``(points, det, weights)``.  The ball must lie inside the cone.
    """
    center = np.asarray(center, dtype=float).reshape(-1)
    n = cone.n
    if center.size != n:
        raise ValueError("center has wrong dimension")
    g, gw = np.polynomial.legendre.leggauss(nodes)
    if n == 1:
        pts = center[0] + radius * g
        pts = pts[:, None]
        w = radius * gw
    elif n == 3:
        rad = 0.5 * radius * (g + 1)
        rw = 0.5 * radius * gw * rad**2
        ct, ctw = g, gw
        nph = 2 * nodes
        ph = 2 * np.pi * np.arange(nph) / nph
        st = np.sqrt(1 - ct**2)
        dirs = np.stack(
            [
                (st[:, None] * np.cos(ph)[None, :]),
                (st[:, None] * np.sin(ph)[None, :]),
                np.broadcast_to(ct[:, None], (nodes, nph)),
            ],
            axis=-1,
        ).reshape(-1, 3)
        dw = (ctw[:, None] * np.full(nph, 2 * np.pi / nph)[None, :]).reshape(-1)
        pts = center + rad[:, None, None] * dirs[None, :, :]
        pts = pts.reshape(-1, 3)
        w = (rw[:, None] * dw[None, :]).reshape(-1)
    else:
        raise ValueError("ball rule supports n = 1 or n = 3")
    det = np.asarray(determinant(cone, pts), dtype=float).reshape(-1)
    if np.any(det <= 0):
        raise ValueError("ball is not contained in the cone")
    return pts, det, w


# ---------------------------------------------------------------------------
# tube domains


TUBE_DEFAULT = QuadratureConfig(levels=3, truncation=30.0)


def _default_scale(y):
    return 1.0 + y[..., 0]


def integrate_tube(cone: ConeDescriptor, f, cfg: QuadratureConfig | None = None, *,
                   x_scale=None) -> QuadratureEstimate:
    """Integrate ``f(x, y, det_y)`` over the tube ``R^n + i Omega``.

    The real variables use ``x = scale(y) * sinh(xi)``, turning algebraic
    decay in ``x`` into exponential decay in ``xi``.  Deterministic for the
    half-line (upper half-plane); Monte-Carlo for Lorentz(3).
    """
    cfg = cfg or TUBE_DEFAULT
    x_scale = x_scale or _default_scale
    if cone.n > 3:
        raise ValueError("tube quadrature supports n <= 3 only")
    if cone.kind != "halfline":
        return _tube_mc(cone, f, cfg, x_scale)
    vals, divs = [], []
    T = cfg.truncation
    for level in range(cfg.levels):
        h = cfg.step / 2**level
        u = _grid(-T, T, h)
        yv = np.exp(u)
        xi = _grid(-T, T, h)
        ell = x_scale(yv[:, None])
        X = ell[:, None] * np.sinh(xi)[None, :]
        Y = np.broadcast_to(yv[:, None], X.shape)
        out = np.asarray(
            f(X.reshape(-1, 1), Y.reshape(-1, 1), Y.reshape(-1).copy()), dtype=float
        )
        out = out.reshape(out.shape[:-1] + X.shape)
        G = out * (ell[:, None] * np.cosh(xi)[None, :]) * yv[:, None]
        Gx, dx = _reduce(G, h, cfg.min_decay)
        v, d = _reduce(Gx, h, cfg.min_decay)
        vals.append(v)
        divs.append(d | np.any(dx, axis=-1))
    return _finish(vals, divs, cfg)


def integrate_tube_mixed(cone: ConeDescriptor, f, p: float, q: float, w: float,
                         cfg: QuadratureConfig | None = None, *, x_scale=None) -> QuadratureEstimate:
    """``int_Omega (int_R |f(x, y)|^p dx)^{q/p} Delta^w(y) dy`` on the half-line tube.

    ``f(x, y, det_y)`` is evaluated on a tensor grid; the inner integral uses
    the same ``sinh`` map and tail completion as :func:`integrate_tube`.
    """
    cfg = cfg or TUBE_DEFAULT
    x_scale = x_scale or _default_scale
    if cone.kind != "halfline":
        raise ValueError("mixed-norm tube quadrature is implemented for the half-line")
    vals, divs = [], []
    T = cfg.truncation
    for level in range(cfg.levels):
        h = cfg.step / 2**level
        yv = np.exp(_grid(-T, T, h))
        xi = _grid(-T, T, h)
        ell = x_scale(yv[:, None])
        X = ell[:, None] * np.sinh(xi)[None, :]
        Y = np.broadcast_to(yv[:, None], X.shape)
        F = np.abs(np.asarray(f(X.reshape(-1, 1), Y.reshape(-1, 1), Y.reshape(-1).copy()), float))
        F = F.reshape(X.shape)
        inner, dx = _reduce(F**p * ell[:, None] * np.cosh(xi)[None, :], h, cfg.min_decay)
        with np.errstate(divide="ignore"):
            G = np.exp((q / p) * np.log(inner) + w * np.log(yv)) * yv
        v, d = _reduce(G, h, cfg.min_decay)
        vals.append(v)
        divs.append(d | np.any(dx))
    return _finish(vals, divs, cfg)


def _tube_mc(cone, f, cfg, x_scale):
    rng = np.random.default_rng(cfg.seed)
    m = cfg.mc_samples
    y, det, q = _mc_sample(cone, m, rng)
    ell = x_scale(y)
    x = ell[:, None] * rng.standard_cauchy((m, cone.n))
    qx = np.prod(1.0 / (np.pi * ell[:, None] * (1 + (x / ell[:, None]) ** 2)), axis=1)
    vals = np.asarray(f(x, y, det), dtype=float) / (q * qx)
    mean = vals.mean(axis=-1)
    err = vals.std(axis=-1) / math.sqrt(m)
    rel = err / np.abs(mean)
    div = ~np.isfinite(mean)
    return QuadratureEstimate(mean, rel, (rel <= cfg.target_rel_err) & ~div, div)


def require_finite(est: QuadratureEstimate, what: str = "integral"):
    """Raise when an estimate diverged; return its value otherwise."""
    if np.any(est.diverging):
        raise QuadratureError(f"{what} diverges")
    return est.value
