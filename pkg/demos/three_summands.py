"""
u2 + u3 + u4: the boundary criterion for three free cyclic generators.

For three or more summands Phi < 1 certifies a point outside the spectrum,
so the traced curve is an outer bound for the spectrum.  The alternate
criterion form is printed for comparison.
"""
import math

from freespec import Cyclic, criterion, solve_parameters, trace_boundary

models = (Cyclic(2), Cyclic(3), Cyclic(4))
curve = trace_boundary(models, rays=180)
print("closed:", curve.closed, " gaps:", len(curve.gaps))
print("crossing at theta=0 :", curve.sample_at(0.0).r)
print("crossing at theta=pi:", curve.sample_at(math.pi).r)

for lam in (3.0, 2.6, 2.5):
    st = solve_parameters(models, lam)
    a = criterion(models, st).phi
    b = criterion(models, st, form="alternate").phi
    print(f"lambda={lam}: Phi standard={a:.6f} alternate={b:.6f}")
