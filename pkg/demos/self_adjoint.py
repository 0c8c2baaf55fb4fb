"""
Density and atoms of self-adjoint models from the Cauchy transform.

u + u* for a free generator u has the arcsine law on [-2, 2]; u2, a
symmetry, has two atoms of mass 1/2 at +-1.
"""
import numpy as np

from freespec import ArcsineShift, Cyclic
from freespec.selfadjoint import atoms, blowup_scan, density

arc = ArcsineShift()
ts = np.array([0, 1, 1.5, 1.9, 1.99, 2.1, 3.0])
print("   t    density      exact")
for t in ts:
    d = density(arc, t).extrapolated
    exact = 1 / (np.pi * np.sqrt(4 - t * t)) if abs(t) < 2 else 0.0
    print(f"{t:5.2f}  {d:10.6f} {exact:10.6f}")
# near the edge the 1/sqrt singularity makes eps-extrapolation less accurate

# %% atoms of u2
for a in atoms(Cyclic(2), np.linspace(-2, 2, 81)):
    print(f"atom at {a.t:+.3f} with mass {a.mass:.10f}")

# %% where the resolvent norm blows up (heuristic, on a grid)
flag = blowup_scan(arc, (-3, 3), 0.25)
print("blow-up points:", flag.min(), "...", flag.max())
