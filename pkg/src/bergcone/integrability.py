"""Exponent arithmetic for the two basic integrals on cones and tubes.

``cone_integral`` refers to

    I(v) = int_Omega Delta^s(y + v) Delta^{t - n/r}(y) dy,

which is finite exactly under the per-index inequalities checked by
:func:`lemma31_converges` and then equals ``C_{s,t} Delta^{s+t}(v)``.

``tube_power`` refers to ``f(z) = Delta^{-alpha}((z + i t) / i)`` and its
mixed norm in ``L^{p,q}_nu`` of the tube over the cone.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
import math

import numpy as np
from scipy import special

from .cones import (
    ConeDescriptor,
    as_power_vector,
    identity,
    principal_minors,
    shifted_determinant,
)
from .exceptions import DivergentIntegralError, PreconditionError, QuadratureError
from .quadrature import QuadratureConfig, integrate_cone, integrate_tube_mixed

__all__ = [
    "Lemma31Query",
    "Lemma32Query",
    "lemma31_converges",
    "lemma31_closed_form_exponent",
    "lemma31_constant",
    "cone_power_integral",
    "lemma32_member",
    "lemma32_norm_exponent",
    "tube_power_norm_q",
    "gpow_with_det",
    "gpow_shifted",
]


@dataclass(frozen=True)
class Lemma31Query:
    cone: ConeDescriptor
    s: tuple
    t: tuple
    v: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "s", tuple(as_power_vector(self.cone, self.s).tolist()))
        object.__setattr__(self, "t", tuple(as_power_vector(self.cone, self.t).tolist()))
        if self.v is not None:
            v = np.asarray(self.v, dtype=float).reshape(-1)
            object.__setattr__(self, "v", tuple(v.tolist()))


@dataclass(frozen=True)
class Lemma32Query:
    cone: ConeDescriptor
    alpha: float
    p: float
    q: float
    nu: float
    t: tuple = field(default=None)

    def __post_init__(self):
        if not (1 <= self.p < math.inf and 1 <= self.q < math.inf):
            raise PreconditionError("p and q must be finite and >= 1")


def lemma31_converges(q: Lemma31Query) -> bool:
    r = q.cone.r
    d = float(q.cone.d)
    for j in range(1, r + 1):
        sj, tj = q.s[j - 1], q.t[j - 1]
        if not (tj > (r - j) * d / 2 and sj + tj < -(j - 1) * d / 2):
            return False
    return True


def lemma31_closed_form_exponent(q: Lemma31Query) -> tuple:
    if not lemma31_converges(q):
        raise DivergentIntegralError(f"integral diverges for s={q.s}, t={q.t}")
    return tuple(a + b for a, b in zip(q.s, q.t))


def gpow_with_det(cone: ConeDescriptor, s, y, det):
    """Generalized power using a precomputed determinant for the top minor.

    Lower-order minors are computed from ``y``; they stay bounded away from
    zero wherever the determinant does not vanish faster, so only the top
    minor needs the accurate value.
    """
    s = as_power_vector(cone, s)
    logdet = np.log(det)
    if cone.r == 1 or np.all(s == s[-1]):
        return np.exp(s[-1] * logdet)
    minors = principal_minors(cone, y)[..., :-1]
    diffs = s - np.append(s[1:], 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sum(diffs[:-1] * np.log(minors), axis=-1) + diffs[-1] * logdet
    return np.exp(out)


def gpow_shifted(cone: ConeDescriptor, s, y, v, det_y):
    """``Delta^s(y + v)`` with the top minor from :func:`shifted_determinant`."""
    return gpow_with_det(cone, s, y + v, shifted_determinant(cone, y, v, det_y))


def _integrand(cone, s, t, v):
    v = np.asarray(v, dtype=float)
    tt = as_power_vector(cone, t) - cone.n_over_r

    def f(y, det):
        return gpow_shifted(cone, s, y, v, det) * gpow_with_det(cone, tt, y, det)

    return f


def cone_power_integral(q: Lemma31Query, quad: QuadratureConfig | None = None):
    """Numerical value of the cone integral at ``q.v`` (default ``e``)."""
    if not lemma31_converges(q):
        raise DivergentIntegralError(f"integral diverges for s={q.s}, t={q.t}")
    v = identity(q.cone) if q.v is None else np.asarray(q.v)
    return integrate_cone(q.cone, _integrand(q.cone, q.s, q.t, v), quad)


@lru_cache(maxsize=4096)
def _constant_cached(cone, s, t, quad):
    if cone.kind == "halfline":
        s0, t0 = s[0], t[0]
        return math.exp(special.gammaln(t0) + special.gammaln(-s0 - t0) - special.gammaln(-s0))
    scalar = len(set(s)) == 1 and len(set(t)) == 1
    est = integrate_cone(cone, _integrand(cone, s, t, identity(cone)), quad, symmetric=scalar)
    if est.diverging or not est.converged:
        raise QuadratureError(
            f"constant for s={s}, t={t} did not converge (rel_err={est.rel_err:.2e})"
        )
    return float(est.value)


def lemma31_constant(q: Lemma31Query, quad: QuadratureConfig | None = None) -> float:
    """``C_{s,t}``: the integral at ``v = e`` (``Delta^{s+t}(e) = 1``).

    The half-line value is the Beta integral ``Gamma(t)Gamma(-s-t)/Gamma(-s)``.
    Results are memoised per (cone, s, t, config).
    """
    if not lemma31_converges(q):
        raise DivergentIntegralError(f"integral diverges for s={q.s}, t={q.t}")
    return _constant_cached(q.cone, q.s, q.t, quad or QuadratureConfig())


def lemma32_member(q: Lemma32Query) -> bool:
    nr = q.cone.n_over_r
    if not q.nu > nr - 1:
        return False
    return q.alpha > max((2 * nr - 1) / q.p, nr / q.p + (q.nu + nr - 1) / q.q)


def lemma32_norm_exponent(q: Lemma32Query) -> float:
    """Exponent ``e`` with ``||f||^q = C Delta^e(t)``."""
    if not lemma32_member(q):
        raise DivergentIntegralError("function is not in the mixed-norm space")
    return -q.q * q.alpha + q.cone.n * q.q / (q.cone.r * q.p) + q.nu


def tube_power_norm_q(q: Lemma32Query, quad: QuadratureConfig | None = None):
    """Numerical ``||f||^q`` in ``L^{p,q}_nu`` of the half-plane, ``f`` built at ``q.t``.

    Membership is not checked, so boundary cases surface as ``diverging``.
    """
    if q.cone.kind != "halfline":
        raise ValueError("numerical tube norms are implemented for the half-line")
    t = float(np.asarray(q.t).reshape(-1)[0]) if q.t is not None else 1.0
    a, p = q.alpha, q.p

    def f(x, y, dy):
        return np.exp(-0.5 * a * np.log(x[:, 0] ** 2 + (y[:, 0] + t) ** 2))

    return integrate_tube_mixed(q.cone, f, p, q.q, q.nu - 1.0, quad,
                                x_scale=lambda yy: yy[..., 0] + t)
