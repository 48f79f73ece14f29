"""Truncated dagger-compact category of Hilbert spaces, Frobenius structures and
quantum mechanics on the circle, checked numerically at finite truncation."""

from starhilb.core import (
    EXACT_TOL, Custom, Fourier, IndexPair, Morphism, Product, Standard, TruncObject, basis_state, braiding,
    compose, compose_all, dagger, effect, identity, load_morphism, save_morphism, standard, state, tensor,
    tensor_obj, unit_object, varsigma, varsigma_inv,
)
from starhilb.errors import (
    CheckFailed, ConfigInvalid, DomainMismatch, IndexOutOfRange, IoError, NotNormalized, NotOrthonormal,
    ResidualNaN, ShapeMismatch, ShapeNotFactorable, StarHilbError,
)
from starhilb.analysis import (
    StandardMapGenerator, SweepReport, Verdict, operator_norm, standard_part_estimate, sweep_residual,
    truncate_standard, vector_equiv,
)
from starhilb.frobenius import (
    ClassicalStructure, CompactStructure, Strictness, cap, check_axioms, classical_structure, cup,
    hs_inner, partial_trace, trace,
)
from starhilb.circleqm import CircleSpace, ModInt, oplus, theta, theta_inv

__version__ = "0.1.0"
