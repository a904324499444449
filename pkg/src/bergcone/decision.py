"""Parameter conditions for boundedness of positive Bergman-type operators.

Each ``decide_*`` function returns a :class:`Verdict` naming the condition
set it evaluated (``route``), the signed slack of every condition
(positive means satisfied) and the identifiers of the violated ones.

Routes
------
cone-Lp-Lq        S on the cone, 1 < p <= q < inf
cone-L1-Lq        S on the cone, p = 1 < q < inf
cone-Lp-Linf      S on the cone, 1 < p < inf, q = inf
tube-mixed        T+ between mixed-norm spaces, 1 < q <= s < inf
tube-mixed-L1     T+ with inner exponent q = 1
tube-mixed-Linf   T+ with outer exponent s = inf
tube-Lp-Lq-sufficient   T+ between weighted Lebesgue spaces (sufficient only)
projection-mixed        P+_nu between mixed-norm spaces
projection-necessary    necessary conditions for P_gamma
"""
from __future__ import annotations

from dataclasses import dataclass, field, asdict
import json
import math

from .cones import ConeDescriptor

__all__ = [
    "SParams",
    "TParams",
    "Verdict",
    "BOUNDED",
    "UNBOUNDED",
    "SUFFICIENT",
    "INCONCLUSIVE",
    "SCOPE_ERROR",
    "decide_S",
    "decide_Tplus_mixed",
    "sufficient_Tplus_pure",
    "decide_Pplus_mixed",
    "necessary_offdiag_Pgamma",
    "homogeneous_gamma_S",
    "homogeneous_gamma_T",
    "conjugate",
]

BOUNDED = "Bounded"
UNBOUNDED = "Unbounded"
SUFFICIENT = "SufficientOnlyBounded"
INCONCLUSIVE = "Inconclusive"
SCOPE_ERROR = "ScopeError"

HOMOGENEITY_RTOL = 1e-9


def conjugate(p: float) -> float:
    """Hoelder conjugate exponent, with 1 <-> inf."""
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1)


@dataclass(frozen=True)
class SParams:
    alpha: float
    beta: float
    gamma: float
    nu: float
    mu: float
    p: float
    q: float

    def replace(self, **kw) -> "SParams":
        return SParams(**{**asdict(self), **kw})


@dataclass(frozen=True)
class TParams:
    alpha: float
    beta: float
    gamma: float
    nu: float
    mu: float
    p: float
    q: float
    s: float = math.nan

    def replace(self, **kw) -> "TParams":
        return TParams(**{**asdict(self), **kw})


@dataclass
class Verdict:
    status: str
    route: str
    violated: list = field(default_factory=list)
    margins: dict = field(default_factory=dict)
    note: str = ""

    @property
    def bounded(self) -> bool:
        return self.status in (BOUNDED, SUFFICIENT)

    def min_margin(self) -> float:
        return min(self.margins.values()) if self.margins else math.nan

    def to_dict(self) -> dict:
        def enc(x):
            if isinstance(x, float) and not math.isfinite(x):
                return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
            return x

        return {
            "status": self.status,
            "route": self.route,
            "violated": list(self.violated),
            "margins": {k: enc(float(v)) for k, v in self.margins.items()},
            "note": self.note,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Verdict":
        margins = {k: float(v) for k, v in d.get("margins", {}).items()}
        return cls(d["status"], d["route"], list(d.get("violated", [])), margins, d.get("note", ""))


class _Conditions:
    """Accumulates named conditions as signed slacks."""

    def __init__(self):
        self.margins: dict = {}

    def less(self, name, lhs, rhs):
        # strict lhs < rhs; an exact tie has margin 0 and counts as violated
        m = rhs - lhs
        if math.isnan(m):
            m = 1.0 if lhs < rhs else -1.0
        self.margins[name] = m

    def equal(self, name, lhs, rhs):
        tol = HOMOGENEITY_RTOL * max(1.0, abs(lhs), abs(rhs))
        self.margins[name] = tol - abs(lhs - rhs)

    def verdict(self, route, ok_status=BOUNDED, fail_status=UNBOUNDED, note=""):
        bad = [k for k, m in self.margins.items() if not m > 0]
        return Verdict(ok_status if not bad else fail_status, route, bad, dict(self.margins), note)


def _scope(route, note):
    return Verdict(SCOPE_ERROR, route, [], {}, note)


def homogeneous_gamma_S(cone: ConeDescriptor, alpha, beta, nu, mu, p, q) -> float:
    """The value of gamma forced by dilation invariance for S."""
    nr = cone.n_over_r
    inner = 0.0 if math.isinf(q) else mu / q
    return alpha + beta + nr - nu / p + inner


def homogeneous_gamma_T(cone: ConeDescriptor, alpha, beta, nu, mu, p, q) -> float:
    """Gamma forced by dilation invariance for T+ between weighted L^p, L^q."""
    nr = cone.n_over_r
    return alpha + beta + nr - (nu + nr) / p + (mu + nr) / q


def _cone_triple(cone, alpha, beta, gamma, nu, mu, p, q, route):
    """Shared conditions for S on the cone and T+ on mixed-norm spaces."""
    nr = cone.n_over_r
    c = _Conditions()
    if p == 1:
        c.equal("homogeneity", gamma, alpha + beta + nr - nu + mu / q)
        c.less("gamma_positive", 0.0, gamma)
        c.less("mu_lower", nr - 1 - q * alpha, mu)
        c.less("mu_upper", mu, q * (gamma - alpha) - nr + 1)
    elif math.isinf(q):
        c.equal("homogeneity", gamma, alpha + beta + nr - nu / p)
        c.less("nu_upper", nu, p * (beta + 1) + nr - 1)
        c.less("alpha_lower", -nr + 1, p * (alpha - nr + 1))
    else:
        c.equal("homogeneity", gamma, alpha + beta + nr - nu / p + mu / q)
        c.less("nu_lower", p * (beta - gamma + 2 * nr - 1) - nr + 1, nu)
        c.less("nu_upper", nu, p * (beta + 1) + nr - 1)
        c.less("mu_lower", nr - 1 - q * alpha, mu)
        c.less("mu_upper", mu, q * (gamma - alpha) - nr + 1)
    return c.verdict(route)


def decide_S(cone: ConeDescriptor, prm: SParams) -> Verdict:
    """Boundedness of S from L^p_nu(cone) to L^q_mu(cone)."""
    p, q, nu, mu = prm.p, prm.q, prm.nu, prm.mu
    if not (1 <= p <= q):
        return _scope("cone", "requires 1 <= p <= q")
    if p == 1:
        route = "cone-L1-Lq"
        if not (1 < q < math.inf):
            return _scope(route, "p = 1 requires 1 < q < inf")
        if not mu > 0:
            return _scope(route, "p = 1 requires mu > 0")
    elif math.isinf(q):
        route = "cone-Lp-Linf"
        if math.isinf(p):
            return _scope(route, "q = inf requires p < inf")
    else:
        route = "cone-Lp-Lq"
        if not nu / conjugate(p) + mu / q > 0:
            return _scope(route, "requires nu/p' + mu/q > 0")
    return _cone_triple(cone, prm.alpha, prm.beta, prm.gamma, nu, mu, p, q, route)


def decide_Tplus_mixed(cone: ConeDescriptor, prm: TParams) -> Verdict:
    """Boundedness of T+ from L^{p,q}_nu to L^{p,s}_mu of the tube.

    The standing hypothesis of the two-exponent case is evaluated as
    ``nu/p' + mu/q > 0`` with ``p`` the exponent in the real directions.
    """
    p, q, s, nu, mu = prm.p, prm.q, prm.s, prm.nu, prm.mu
    if not (1 < p < math.inf):
        return _scope("tube-mixed", "requires 1 < p < inf")
    if not (1 <= q <= s):
        return _scope("tube-mixed", "requires 1 <= q <= s")
    if q == 1:
        route = "tube-mixed-L1"
        if not (1 < s < math.inf):
            return _scope(route, "q = 1 requires 1 < s < inf")
        if not mu > 0:
            return _scope(route, "q = 1 requires mu > 0")
    elif math.isinf(s):
        route = "tube-mixed-Linf"
        if math.isinf(q):
            return _scope(route, "s = inf requires q < inf")
    else:
        route = "tube-mixed"
        if not nu / conjugate(p) + mu / q > 0:
            return _scope(route, "requires nu/p' + mu/q > 0 (as printed)")
    return _cone_triple(cone, prm.alpha, prm.beta, prm.gamma, nu, mu, q, s, route)


def sufficient_Tplus_pure(cone: ConeDescriptor, prm: TParams) -> Verdict:
    """Sufficient conditions for T+ from L^p_nu to L^q_mu of the tube.

    Failing the conditions proves nothing, so the negative outcome is
    ``Inconclusive`` rather than ``Unbounded``.
    """
    route = "tube-Lp-Lq-sufficient"
    p, q, nu, mu = prm.p, prm.q, prm.nu, prm.mu
    nr = cone.n_over_r
    if not (1 < p <= q < math.inf):
        return _scope(route, "requires 1 < p <= q < inf")
    if not (nu + nr) / conjugate(p) + (mu + nr) / q > 0:
        return _scope(route, "requires (nu+n/r)/p' + (mu+n/r)/q > 0")
    c = _Conditions()
    c.equal("homogeneity", prm.gamma, homogeneous_gamma_T(cone, prm.alpha, prm.beta, nu, mu, p, q))
    c.less("nu_upper", nu, p * (prm.beta + 1) + (nr - 1) * (1 - p / q))
    c.less("mu_lower", -q * prm.alpha + (nr - 1) * (1 + q / conjugate(p)), mu)
    return c.verdict(route, ok_status=SUFFICIENT, fail_status=INCONCLUSIVE,
                     note="sufficient conditions only")


def decide_Pplus_mixed(cone: ConeDescriptor, nu, mu, p, q, s) -> Verdict:
    """Boundedness of the positive projection P+_nu from L^{p,q}_nu to L^{p,s}_mu."""
    route = "projection-mixed"
    nr = cone.n_over_r
    if not (1 < p < math.inf and 1 < q <= s < math.inf):
        return _scope(route, "requires 1 < p < inf and 1 < q <= s < inf")
    if not (nu > nr - 1 and mu > nr - 1):
        return _scope(route, "requires nu, mu > n/r - 1")
    c = _Conditions()
    # written as gamma = nu against the homogeneous value so tolerances
    # coincide with the general mixed-norm route
    c.equal("homogeneity", nu, nu - nu / q + mu / s)
    c.less("q_lower", 1 + (nr - 1) / mu, q)
    c.less("q_upper", q, math.inf if nr == 1 else 1 + nu / (nr - 1))
    return c.verdict(route)


def _ratio(num, den):
    """``num / (den)_+`` with the quotient read as +inf when ``(den)_+ = 0``."""
    return math.inf if den <= 0 else num / den


def necessary_offdiag_Pgamma(cone: ConeDescriptor, nu, mu, gamma, p, q, s) -> Verdict:
    """Necessary conditions for P_gamma from L^{p,q}_nu to L^{p,s}_mu.

    Returns ``Unbounded`` when one fails, ``Inconclusive`` otherwise.
    """
    route = "projection-necessary"
    nr = cone.n_over_r
    if not (1 <= p < math.inf and 1 <= q <= s < math.inf):
        return _scope(route, "requires 1 <= p < inf and 1 <= q <= s < inf")
    pc = conjugate(p)
    c = _Conditions()
    c.less("mu_lower", nr - 1, mu)
    c.less("gamma_lower", (2 * nr - 1) * max(1 / p, 1 / pc), gamma + nr)
    c.less("s_lower", _ratio(mu + nr - 1, gamma + nr / pc), s)
    c.less("q_lower", _ratio(nu - nr + 1, gamma - nr + 1), q)
    q_tilde = _ratio(nu + nr - 1, nr / pc - 1)
    c.less("q_upper", q, q_tilde)
    return c.verdict(route, ok_status=INCONCLUSIVE, fail_status=UNBOUNDED,
                     note="necessary conditions only")
