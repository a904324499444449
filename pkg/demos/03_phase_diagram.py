"""A (nu, mu) phase diagram for S on the Lorentz cone, drawn in ASCII."""
import numpy as np

from bergcone.cones import ConeDescriptor
from bergcone.operators import derive_homogeneous_gamma, scan_phase_diagram

L3 = ConeDescriptor.lorentz(3)
base = dict(alpha=0.2, beta=0.1, gamma=0.0, nu=1.0, mu=1.0, p=2.0, q=3.0)
nus = np.linspace(-1, 5, 25)
mus = np.linspace(-1, 7, 41)

rep = scan_phase_diagram(L3, base, "nu", "mu", nus, mus,
                         derive={"gamma": derive_homogeneous_gamma})
glyph = {"Bounded": "#", "Unbounded": ".", "ScopeError": " "}
for i in range(len(nus) - 1, -1, -1):
    row = "".join(glyph.get(s, "?") for s in rep.statuses[i])
    print(f"nu={nus[i]:5.2f} |{row}|")
print(" " * 9, f"mu from {mus[0]} to {mus[-1]}")
print("bounded cells:", int((rep.statuses == "Bounded").sum()), "of", rep.statuses.size)

# The same table is what `bergcone scan` writes as CSV
print(rep.to_csv().splitlines()[0])
