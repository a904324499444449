"""Nonnegative test functions on the cone and on the tube.

Every cone test function knows how to integrate itself against a weight,

    g.integrate_against(cone, h, quad) = int g(x) h(x, Delta(x)) dx,

where ``h`` may return a batch ``(..., m)``; and how to compute

    g.power_integral(cone, p, w, quad) = int g(x)^p Delta(x)^w dx,

which gives ``||g||_{p,nu}^p`` with ``w = nu - n/r``.  Indicators use a
compact Gauss rule, so discontinuities never meet a global grid.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math
from typing import List, Sequence

import numpy as np

from .cones import ConeDescriptor, determinant, identity, shifted_determinant
from .exceptions import DivergentIntegralError, NotInConeError
from .quadrature import QuadratureConfig, ball_rule, integrate_cone

__all__ = [
    "TestFunction",
    "ConeBallIndicator",
    "DetPower",
    "Dilate",
    "Mixture",
    "TubeBoxIndicator",
    "default_ball",
    "distance_to_boundary",
]


def distance_to_boundary(cone: ConeDescriptor, c) -> float:
    """Euclidean distance from ``c`` to the boundary of the cone."""
    c = np.asarray(c, dtype=float).reshape(-1)
    if cone.kind == "halfline":
        return float(c[0])
    if cone.kind == "lorentz":
        rho = float(np.linalg.norm(c[1:]))
        return (c[0] - rho) / math.sqrt(2.0)
    # packed SPD coordinates: ||X||_packed >= ||X||_F / sqrt(2)
    from .cones import to_matrix

    lam = np.linalg.eigvalsh(to_matrix(cone, c))
    return float(lam.min()) / math.sqrt(2.0)


def _finite(est, what):
    if np.any(est.diverging):
        raise DivergentIntegralError(f"{what} diverges")
    return est.value


class TestFunction:
    """Base class; subclasses implement the two integral hooks."""

    __test__ = False  # keep pytest from collecting this class

    def values(self, cone, x, det):
        raise NotImplementedError

    def integrate_against(self, cone, h, quad=None):
        raise NotImplementedError

    def power_integral(self, cone, p, w, quad=None):
        raise NotImplementedError

    def norm(self, cone, p, nu, quad=None) -> float:
        """``||g||_{L^p_nu}``; ``p = inf`` gives the supremum norm."""
        if math.isinf(p):
            return self.sup()
        return float(self.power_integral(cone, p, nu - cone.n_over_r, quad)) ** (1 / p)

    def sup(self) -> float:
        raise NotImplementedError


@dataclass
class ConeBallIndicator(TestFunction):
    center: np.ndarray
    radius: float
    nodes: int = 8

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).reshape(-1)

    def check(self, cone):
        if distance_to_boundary(cone, self.center) < self.radius * (1 - 1e-12):
            raise NotInConeError("ball is not contained in the cone")

    def rule(self, cone):
        self.check(cone)
        return ball_rule(cone, self.center, self.radius, self.nodes)

    def values(self, cone, x, det=None):
        x = np.asarray(x, dtype=float)
        return (np.linalg.norm(x - self.center, axis=-1) < self.radius).astype(float)

    def integrate_against(self, cone, h, quad=None):
        pts, det, w = self.rule(cone)
        return np.asarray(h(pts, det), dtype=float) @ w

    def power_integral(self, cone, p, w, quad=None):
        pts, det, wt = self.rule(cone)
        return float(np.sum(det**w * wt))

    def sup(self):
        return 1.0


@dataclass
class DetPower(TestFunction):
    """``Delta^{-a}(x + shift)``."""

    a: float
    shift: np.ndarray = None

    def _shift(self, cone):
        return identity(cone) if self.shift is None else np.asarray(self.shift, float)

    def values(self, cone, x, det=None):
        return np.asarray(determinant(cone, np.asarray(x) + self._shift(cone))) ** (-self.a)

    def integrate_against(self, cone, h, quad=None):
        sh = self._shift(cone)
        sym = self.shift is None

        def f(x, det):
            return np.asarray(h(x, det)) * np.asarray(shifted_determinant(cone, x, sh, det)) ** (-self.a)

        return _finite(integrate_cone(cone, f, quad, symmetric=sym and getattr(h, "invariant", False)),
                       "weighted integral of a determinant power")

    def power_integral(self, cone, p, w, quad=None):
        sh = self._shift(cone)

        def f(x, det):
            return np.exp(w * np.log(det) - p * self.a * np.log(shifted_determinant(cone, x, sh, det)))

        return float(_finite(integrate_cone(cone, f, quad, symmetric=self.shift is None),
                             "norm of a determinant power"))

    def sup(self):
        return math.inf if self.a < 0 else float("nan")


@dataclass
class Dilate(TestFunction):
    """``f_R(x) = f(R x)``."""

    base: TestFunction
    R: float

    def values(self, cone, x, det=None):
        return self.base.values(cone, self.R * np.asarray(x), None)

    def integrate_against(self, cone, h, quad=None):
        R, n, r = self.R, cone.n, cone.r

        def hs(x, det):
            return h(x / R, det * R ** (-r))

        hs.invariant = getattr(h, "invariant", False)
        return R ** (-n) * self.base.integrate_against(cone, hs, quad)

    def power_integral(self, cone, p, w, quad=None):
        return self.R ** (-cone.n - cone.r * w) * self.base.power_integral(cone, p, w, quad)

    def sup(self):
        return self.base.sup()


@dataclass
class Mixture(TestFunction):
    """Nonnegative combination of balls and at most one determinant power.

    Balls must be pairwise disjoint so that powers of the mixture split into
    per-ball corrections.
    """

    parts: List[TestFunction]
    weights: Sequence[float]

    def __post_init__(self):
        self.weights = [float(w) for w in self.weights]
        if any(w < 0 for w in self.weights):
            raise ValueError("mixture weights must be nonnegative")
        balls = [p for p in self.parts if isinstance(p, ConeBallIndicator)]
        smooth = [p for p in self.parts if not isinstance(p, ConeBallIndicator)]
        if len(smooth) > 1:
            raise ValueError("at most one non-indicator component is supported")
        for i, b1 in enumerate(balls):
            for b2 in balls[i + 1:]:
                if np.linalg.norm(b1.center - b2.center) < b1.radius + b2.radius:
                    raise ValueError("mixture balls must be disjoint")

    def values(self, cone, x, det=None):
        return sum(w * p.values(cone, x, det) for p, w in zip(self.parts, self.weights))

    def integrate_against(self, cone, h, quad=None):
        return sum(w * p.integrate_against(cone, h, quad) for p, w in zip(self.parts, self.weights))

    def power_integral(self, cone, p, w, quad=None):
        smooth = [(f, c) for f, c in zip(self.parts, self.weights)
                  if not isinstance(f, ConeBallIndicator)]
        total = 0.0
        if smooth:
            f, c = smooth[0]
            total = c**p * f.power_integral(cone, p, w, quad)
        for f, c in zip(self.parts, self.weights):
            if not isinstance(f, ConeBallIndicator):
                continue
            pts, det, wt = f.rule(cone)
            base = smooth[0][1] * smooth[0][0].values(cone, pts, det) if smooth else 0.0
            total += float(np.sum(((base + c) ** p - base**p) * det**w * wt))
        return total

    def sup(self):
        return max(self.weights)


def default_ball(cone: ConeDescriptor, nodes: int = 8) -> ConeBallIndicator:
    """The probe ball ``B(e, rho)`` with ``rho`` small enough to fit inside."""
    rho = 0.5 if cone.kind == "halfline" else 0.35
    return ConeBallIndicator(identity(cone), rho, nodes)


@dataclass
class TubeBoxIndicator:
    """Indicator of ``{x in box} x {y in ball}`` in the tube over the cone."""

    x_center: np.ndarray
    x_half: float
    ball: ConeBallIndicator
    nodes: int = 8
    __test__ = False

    def rule(self, cone):
        n = cone.n
        g, gw = np.polynomial.legendre.leggauss(self.nodes)
        xc = np.asarray(self.x_center, float).reshape(-1)
        grids = np.meshgrid(*([g] * n), indexing="ij")
        xs = xc + self.x_half * np.stack([gg.reshape(-1) for gg in grids], axis=-1)
        wx = np.ones(xs.shape[0])
        for gg in np.meshgrid(*([gw] * n), indexing="ij"):
            wx = wx * gg.reshape(-1)
        wx = wx * self.x_half**n
        ys, dy, wy = self.ball.rule(cone)
        X = np.repeat(xs, ys.shape[0], axis=0)
        Y = np.tile(ys, (xs.shape[0], 1))
        D = np.tile(dy, xs.shape[0])
        W = np.repeat(wx, ys.shape[0]) * np.tile(wy, xs.shape[0])
        return X, Y, D, W
