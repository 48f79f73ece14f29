"""Plane waves, Dirac deltas and the two observables on a circle."""

import numpy as np

from starhilb.circleqm import (
    CircleSpace, delta_pairing, dirac_sweep, integrate, momentum_projector, poisson_coefficients,
    poisson_value, position_eigenstate, position_projector, position_translation,
)

s = CircleSpace(L=2.0, omega=5)
d = position_eigenstate(s, 0.3).vector
print("kappa =", s.kappa, " <delta|delta> =", np.vdot(d, d).real, "= kappa/L")

for w in (4, 8, 16, 32):
    sp = CircleSpace(1.0, w)
    err = abs(delta_pairing(sp, 0.25, poisson_coefficients(sp)) - poisson_value(0.25, 1.0))
    print(f"omega={w:2d}: |<delta_x|f> - f(x)| = {err:.2e}")
print(dirac_sweep([4, 8, 16, 32]).verdict.value)

print("integral of 1:", integrate(s, {0: np.sqrt(s.L)}).real)
print("translation residual:", position_translation(s, 0.7, 1.9))

P = sum(momentum_projector(s, n).mat for n in range(-5, 6))
Q = sum(position_projector(s, x).mat for x in s.grid)
print("completeness:", np.abs(P - np.eye(s.kappa)).max(), np.abs(Q - np.eye(s.kappa)).max())
x = s.grid[2]
print("Q_x from the black comultiplication:",
      np.abs(position_projector(s, x).mat - position_projector(s, x, "diagram").mat).max())
