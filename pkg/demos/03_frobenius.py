"""Classical structures, cups and caps, traces."""

import numpy as np

from starhilb import check_axioms, classical_structure, standard, trace, partial_trace, tensor
from starhilb.core import Morphism
from starhilb.frobenius import compact_structure, loop, snake_residuals, transpose

H = standard(6)
print("chosen basis:", check_axioms(classical_structure(H)))

k = 6
dft = np.exp(2j * np.pi * np.outer(range(k), range(k)) / k) / np.sqrt(k)
cs = classical_structure(H, dft)
print("Fourier basis:", cs.strictness.value, max(check_axioms(cs).values()))

# an orthonormal family that does not span: unit law and speciality break
cs = classical_structure(H, np.eye(k)[:, :4])
res = check_axioms(cs)
print("4 of 6 basis vectors:", {name: round(r, 3) for name, r in res.items()})

print("snakes:", snake_residuals(compact_structure(H)), " loop:", loop(H))
f = Morphism(standard(2), standard(3), np.arange(6).reshape(3, 2))
print("transpose via cup/cap:\n", transpose(f).mat.real)

rng = np.random.default_rng(1)
a = Morphism(standard(2), standard(2), rng.standard_normal((2, 2)))
b = Morphism(standard(3), standard(3), rng.standard_normal((3, 3)))
print("Tr_K(a (x) b) = Tr(b) a:", np.allclose(partial_trace(tensor(a, b), (2, 2, 3)).mat, trace(b) * a.mat))
