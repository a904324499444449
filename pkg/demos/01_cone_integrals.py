"""Cone integrals: closed forms against quadrature on three cones."""
import numpy as np

from bergcone.cones import ConeDescriptor, determinant, identity, shifted_determinant
from bergcone.integrability import Lemma31Query, lemma31_constant, lemma31_converges
from bergcone.quadrature import detect_divergence, integrate_cone

cones = [ConeDescriptor.halfline(), ConeDescriptor.lorentz(3), ConeDescriptor.spd(2)]

# A point of each cone and its determinant
for cone in cones:
    e = identity(cone)
    print(cone, "e =", e, "det(e) =", determinant(cone, e[None])[0])

# The integral of det(y)^(t - n/r) det(y + e)^s over the cone
s, t = -3.0, 1.2
for cone in cones:
    a = t - cone.n_over_r
    e = identity(cone)
    f = lambda y, det, cone=cone, e=e: det**a * shifted_determinant(cone, y, e, det) ** s
    q = Lemma31Query(cone, s, t)
    est = integrate_cone(cone, f)
    print(f"{cone}: converges={lemma31_converges(q)} closed form={lemma31_constant(q):.6f} "
          f"quadrature={est.value:.6f} (rel err {est.rel_err:.1e})")

# Pushing t past the admissible window makes the integral blow up
L3 = cones[1]
e = identity(L3)
for t in (1.0, 1.5, 2.5, 2.9):
    a = t - L3.n_over_r
    f = lambda y, det, a=a: det**a * shifted_determinant(L3, y, e, det) ** s
    print(f"t = {t}: predicted divergent = {not lemma31_converges(Lemma31Query(L3, s, t))}, "
          f"detector = {detect_divergence(L3, f, symmetric=True)}")
