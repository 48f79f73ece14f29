"""Strong complementarity, the Weyl relations and total mixing."""

from starhilb.circleqm import CircleSpace, check_strong_complementarity, mixing_experiment, random_state

s = CircleSpace(1.0, 8)
for name, r in check_strong_complementarity(s).items():
    print(f"{name:20s} {r:.2e}")

psi = random_state(s, 42)
rho, dist = mixing_experiment(s, psi)
print("after measuring position then momentum: ||rho' - id/kappa|| =", f"{dist:.1e}")
print("diagonal of rho':", rho.mat.diagonal().real.round(6)[:5], "...")
