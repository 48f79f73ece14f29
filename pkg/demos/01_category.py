"""Objects, morphisms and the dagger-symmetric monoidal structure at finite kappa."""

import numpy as np

from starhilb import braiding, compose, dagger, identity, standard, tensor, varsigma, varsigma_inv
from starhilb.core import Morphism, format_morphism

A, B = standard(2, "A"), standard(3, "B")
rng = np.random.default_rng(0)
f = Morphism(A, B, rng.standard_normal((3, 2)))
g = Morphism(B, A, rng.standard_normal((2, 3)))

print("g.f is", compose(g, f))
print("dagger swaps types:", dagger(f))
print("A (x) B has dimension", tensor(identity(A), identity(B)).shape[0])

# tensor indices follow varsigma(n, m) = (n - 1) nu + m
print("varsigma(2, 1; nu=3) =", varsigma(2, 1, 3), " inverse of 4:", varsigma_inv(4, 3))

s = braiding(A, B)
print("braiding is an involution:", np.array_equal((braiding(B, A) @ s).mat, np.eye(6)))
print("naturality residual:", np.abs((braiding(B, A) @ tensor(f, g)).mat - (tensor(g, f) @ s).mat).max())

print("\nserialised f:\n" + format_morphism(f))
