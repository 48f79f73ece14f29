"""Reading "infinitesimally close" as decay along a sweep of truncations."""

import numpy as np

from starhilb import StandardMapGenerator, standard, standard_part_estimate, state, sweep_residual, truncate_standard
from starhilb.analysis import operator_norm, weak_functoriality_residual

shift = StandardMapGenerator(lambda m, n: 1.0 * (m == n + 1))
print("shift truncations stay bounded:",
      [round(operator_norm(truncate_standard(shift, standard(k))), 12) for k in (4, 16, 64)])

# truncation is only weakly functorial: the error is what leaks past kappa
hs = StandardMapGenerator(lambda m, n: 2.0 ** (-m - n))
rep = sweep_residual(lambda k: weak_functoriality_residual(hs, hs, k), [8, 16, 32, 64])
print("weak functoriality:", rep.verdict.value, "rate", round(rep.fitted_rate, 2))
for k, r in zip(rep.parameter_values, rep.residuals):
    print(f"  kappa={k:3d}  residual={r:.3e}")

# a unit vector spread evenly over all kappa components never settles
_, rep = standard_part_estimate(lambda k: state(standard(k), np.ones(k) / np.sqrt(k)), [8, 16, 32, 64])
print("flat state:", rep.verdict.value, "residuals", [round(r, 4) for r in rep.residuals])
