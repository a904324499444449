"""Symmetric cones and their Jordan-algebra determinant functions.

Three families are supported: the half-line ``(0, inf)``, the Lorentz cone
``{y_1^2 - y_2^2 - ... - y_n^2 > 0, y_1 > 0}`` and the cone of positive
definite ``r x r`` matrices.  Points are plain numpy arrays of length ``n``;
SPD points use the packed form ``(y_11, ..., y_rr, y_12, y_13, ..., y_{r-1,r})``
(diagonal first, then the strict upper triangle row by row).

All functions broadcast over leading axes: a ``(..., n)`` array is treated as
a batch of points.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exceptions import DimensionError, NotInConeError

__all__ = [
    "ConeDescriptor",
    "HALFLINE",
    "LORENTZ3",
    "SPD2",
    "contains",
    "identity",
    "determinant",
    "shifted_determinant",
    "principal_minor",
    "principal_minors",
    "generalized_power",
    "complex_determinant",
    "to_matrix",
    "from_matrix",
    "as_power_vector",
]


@dataclass(frozen=True)
class ConeDescriptor:
    """An irreducible symmetric cone from one of the supported families.

    Use the constructors :meth:`halfline`, :meth:`lorentz`, :meth:`spd` or
    :meth:`parse` rather than building instances by hand.
    """

    kind: str
    size: int = 1

    def __post_init__(self):
        if self.kind == "halfline":
            if self.size != 1:
                raise ValueError("halfline takes no size parameter")
        elif self.kind == "lorentz":
            if self.size < 3:
                raise ValueError("Lorentz cone needs n >= 3")
        elif self.kind == "spd":
            if self.size < 1:
                raise ValueError("SPD cone needs r >= 1")
        else:
            raise ValueError(f"unknown cone kind {self.kind!r}")

    @classmethod
    def halfline(cls) -> "ConeDescriptor":
        return cls("halfline", 1)

    @classmethod
    def lorentz(cls, n: int) -> "ConeDescriptor":
        return cls("lorentz", int(n))

    @classmethod
    def spd(cls, r: int) -> "ConeDescriptor":
        return cls("spd", int(r))

    @classmethod
    def parse(cls, text: str) -> "ConeDescriptor":
        """Parse ``"halfline"``, ``"lorentz:<n>"`` or ``"spd:<r>"``."""
        text = text.strip().lower()
        if text == "halfline":
            return cls.halfline()
        kind, _, arg = text.partition(":")
        if kind in ("lorentz", "spd") and arg.isdigit():
            return cls(kind, int(arg))
        raise ValueError(f"cannot parse cone specification {text!r}")

    def __str__(self) -> str:
        if self.kind == "halfline":
            return "halfline"
        return f"{self.kind}:{self.size}"

    @property
    def n(self) -> int:
        if self.kind == "halfline":
            return 1
        if self.kind == "lorentz":
            return self.size
        return self.size * (self.size + 1) // 2

    @property
    def r(self) -> int:
        if self.kind == "halfline":
            return 1
        if self.kind == "lorentz":
            return 2
        return self.size

    @property
    def d(self) -> Fraction:
        """Structure constant, fixed by ``(r - 1) d / 2 = n / r - 1``."""
        if self.kind == "halfline":
            return Fraction(0)
        if self.kind == "lorentz":
            return Fraction(self.size - 2)
        return Fraction(1)

    @property
    def n_over_r(self) -> float:
        return self.n / self.r


HALFLINE = ConeDescriptor.halfline()
LORENTZ3 = ConeDescriptor.lorentz(3)
SPD2 = ConeDescriptor.spd(2)


def _check(cone: ConeDescriptor, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if cone.kind == "halfline" and p.ndim == 0:
        p = p[None]
    if p.ndim == 0 or p.shape[-1] != cone.n:
        raise DimensionError(
            f"{cone} expects points of length {cone.n}, got shape {p.shape}"
        )
    return p


def to_matrix(cone: ConeDescriptor, p) -> np.ndarray:
    """Unpack SPD points into symmetric matrices of shape ``(..., r, r)``."""
    if cone.kind != "spd":
        raise ValueError("to_matrix only applies to SPD cones")
    p = np.asarray(p)
    if p.shape[-1] != cone.n:
        raise DimensionError(f"expected length {cone.n}, got {p.shape[-1]}")
    r = cone.r
    out = np.zeros(p.shape[:-1] + (r, r), dtype=p.dtype)
    idx = np.arange(r)
    out[..., idx, idx] = p[..., :r]
    iu, ju = np.triu_indices(r, k=1)
    out[..., iu, ju] = p[..., r:]
    out[..., ju, iu] = p[..., r:]
    return out


def from_matrix(cone: ConeDescriptor, m) -> np.ndarray:
    """Pack symmetric matrices into SPD point vectors."""
    if cone.kind != "spd":
        raise ValueError("from_matrix only applies to SPD cones")
    m = np.asarray(m)
    r = cone.r
    if m.shape[-2:] != (r, r):
        raise DimensionError(f"expected {r}x{r} matrices, got {m.shape}")
    iu, ju = np.triu_indices(r, k=1)
    return np.concatenate([np.diagonal(m, axis1=-2, axis2=-1), m[..., iu, ju]], axis=-1)


def principal_minors(cone: ConeDescriptor, p) -> np.ndarray:
    """All principal minors ``(Delta_1, ..., Delta_r)`` stacked on the last axis.

    The Lorentz frame is fixed so that ``Delta_1(y) = y_1 + y_n``.
    """
    p = _check(cone, p)
    if cone.kind == "halfline":
        return p.copy()
    if cone.kind == "lorentz":
        return np.stack([p[..., 0] + p[..., -1], _lorentz_det(p)], axis=-1)
    m = to_matrix(cone, p)
    return np.stack(
        [np.linalg.det(m[..., :j, :j]) for j in range(1, cone.r + 1)], axis=-1
    )


def _lorentz_det(p: np.ndarray) -> np.ndarray:
    # factored form keeps relative accuracy near the boundary
    rho = np.sqrt(np.sum(p[..., 1:] ** 2, axis=-1))
    return (p[..., 0] - rho) * (p[..., 0] + rho)


def determinant(cone: ConeDescriptor, p) -> np.ndarray | float:
    """The determinant function; homogeneous of degree ``r``."""
    p = _check(cone, p)
    if cone.kind == "halfline":
        out = p[..., 0]
    elif cone.kind == "lorentz":
        out = _lorentz_det(p)
    else:
        out = np.linalg.det(to_matrix(cone, p))
    return out[()] if np.ndim(out) == 0 else out


def shifted_determinant(cone: ConeDescriptor, y, v, det_y=None):
    """``Delta(y + v)`` for ``y`` in the closed cone and ``v`` in the cone.

    Expanding around ``y`` gives a sum of nonnegative terms, e.g. for the
    Lorentz cone ``Delta(y) + 2 (y_1 v_1 - y' . v') + Delta(v)``, so the
    result keeps relative accuracy when ``y`` is huge or close to the
    boundary.  Pass ``det_y`` when it is known more accurately than it can
    be recomputed from ``y``.  Broadcasts over leading axes of ``y`` and ``v``.
    """
    y = _check(cone, y)
    v = _check(cone, v)
    if det_y is None:
        det_y = determinant(cone, y)
    if cone.kind == "halfline":
        out = (y + v)[..., 0]
    elif cone.kind == "lorentz":
        cross = y[..., 0] * v[..., 0] - np.sum(y[..., 1:] * v[..., 1:], axis=-1)
        out = det_y + 2.0 * cross + _lorentz_det(v)
    elif cone.r == 2:
        cross = y[..., 1] * v[..., 0] + y[..., 0] * v[..., 1] - 2.0 * y[..., 2] * v[..., 2]
        out = det_y + cross + (v[..., 0] * v[..., 1] - v[..., 2] ** 2)
    else:
        Y, V = np.broadcast_arrays(to_matrix(cone, y), to_matrix(cone, v))
        Lc = np.linalg.cholesky(V)
        Li = np.linalg.inv(Lc)
        M = Li @ Y @ np.swapaxes(Li, -1, -2)
        lam = np.linalg.eigvalsh(M)
        out = np.prod(1.0 + np.maximum(lam, 0.0), axis=-1) * np.linalg.det(V)
    out = np.asarray(out)
    return out[()] if out.ndim == 0 else out


def principal_minor(cone: ConeDescriptor, j: int, p):
    if not 1 <= j <= cone.r:
        raise ValueError(f"minor index {j} outside 1..{cone.r}")
    out = principal_minors(cone, p)[..., j - 1]
    return out[()] if np.ndim(out) == 0 else out


def contains(cone: ConeDescriptor, p):
    """Membership in the open cone (strict inequalities, no tolerance)."""
    p = _check(cone, p)
    if cone.kind == "halfline":
        out = p[..., 0] > 0
    elif cone.kind == "lorentz":
        out = (p[..., 0] > 0) & (p[..., 0] ** 2 - np.sum(p[..., 1:] ** 2, axis=-1) > 0)
    else:
        out = np.all(principal_minors(cone, p) > 0, axis=-1)
    return bool(out) if np.ndim(out) == 0 else out


def identity(cone: ConeDescriptor) -> np.ndarray:
    """The identity element ``e`` of the Jordan algebra."""
    if cone.kind == "halfline":
        return np.array([1.0])
    if cone.kind == "lorentz":
        e = np.zeros(cone.n)
        e[0] = 1.0
        return e
    return from_matrix(cone, np.eye(cone.r))


def as_power_vector(cone: ConeDescriptor, s) -> np.ndarray:
    """Embed a scalar power ``a`` as ``(a, ..., a)``; validate vectors."""
    s = np.asarray(s, dtype=float)
    if s.ndim == 0:
        return np.full(cone.r, float(s))
    if s.shape != (cone.r,):
        raise DimensionError(f"power vector must have length {cone.r}")
    return s


def generalized_power(cone: ConeDescriptor, s, p):
    """``Delta^s(p) = Delta_1^{s_1-s_2} ... Delta_{r-1}^{s_{r-1}-s_r} Delta_r^{s_r}``."""
    s = as_power_vector(cone, s)
    p = _check(cone, p)
    if not np.all(contains(cone, p)):
        raise NotInConeError("generalized powers are only defined on the open cone")
    minors = principal_minors(cone, p)
    diffs = s - np.append(s[1:], 0.0)
    out = np.exp(np.sum(diffs * np.log(minors), axis=-1))
    return out[()] if np.ndim(out) == 0 else out


def complex_determinant(cone: ConeDescriptor, z) -> np.ndarray | complex:
    """Holomorphic extension of the determinant to complex arguments.

    To evaluate the Bergman-kernel factor ``Delta((z - conj(w)) / i)`` pass
    the complex vector ``(z - conj(w)) / 1j``.
    """
    z = np.asarray(z, dtype=complex)
    if cone.kind == "halfline" and z.ndim == 0:
        z = z[None]
    if z.shape[-1] != cone.n:
        raise DimensionError(f"{cone} expects length {cone.n}, got {z.shape}")
    if cone.kind == "halfline":
        out = z[..., 0]
    elif cone.kind == "lorentz":
        out = z[..., 0] ** 2 - np.sum(z[..., 1:] ** 2, axis=-1)
    else:
        out = np.linalg.det(to_matrix(cone, z))
    return out[()] if np.ndim(out) == 0 else out
