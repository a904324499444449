"""Decide boundedness of S, then back the answer with a Schur certificate."""
import numpy as np

from bergcone.certificates import find_certificate_S, verify_certificate_S
from bergcone.cones import ConeDescriptor
from bergcone.decision import SParams, decide_S, homogeneous_gamma_S
from bergcone.operators import dilation_probe, necessity_probe_S

H = ConeDescriptor.halfline()
prm = SParams(alpha=0, beta=0, gamma=1, nu=1, mu=1, p=2, q=2)

v = decide_S(H, prm)
print(v.status, v.route)
print({k: round(m, 3) for k, m in v.margins.items()})

# Sufficiency: test functions h1, h2 with uniformly bounded Schur ratios
c = find_certificate_S(H, prm)
M1, M2, chk = verify_certificate_S(H, prm, c, report=True)
print(f"certificate u={c.u:.3f} v={c.v:.3f} t={c.t:.3f}  ||S|| <= {M1 * M2:.4f}")
print("ratio spread:", chk.spread1, chk.spread2)

# Necessity: the dilation exponent vanishes only on the homogeneous line
for g in (1.0, 1.5, 2.0):
    fit = dilation_probe(H, prm.replace(gamma=g))
    print(f"gamma={g}: fitted dilation slope {fit:+.3f}")

# Necessity: the two power integrals converge exactly when the window holds
rep = necessity_probe_S(H, prm)
print("direct converges:", not rep.direct_diverges, "adjoint converges:", not rep.adjoint_diverges)

# Same story on the Lorentz cone with homogeneity imposed
L3 = ConeDescriptor.lorentz(3)
g = homogeneous_gamma_S(L3, 0.2, 0.1, 2, 2, 2, 2)
prm = SParams(0.2, 0.1, g, 2, 2, 2, 2)
print(L3, decide_S(L3, prm).status, "gamma =", round(g, 4))
