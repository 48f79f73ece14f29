"""
Classical structures, compact closure, traces and the Hilbert-Schmidt product.

A classical structure is built from an orthonormal family ``|f_n>``::

    comult = sum_n |f_n> (x) |f_n> <f_n|        counit = sum_n <f_n|

with ``mult``/``unit`` the daggers.  Associativity, commutativity and the
Frobenius laws hold for any orthonormal family; the unit laws and speciality
hold exactly only when the family resolves the identity, which at finite
``kappa`` means it is a complete basis.  Families that do not span give weak
structures, whose unit/speciality residuals are reported rather than asserted.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from starhilb.core import (
    EXACT_TOL, Morphism, TruncObject, compose, dagger, tensor_obj, unit_object,
)
from starhilb.errors import DomainMismatch, NotOrthonormal, ShapeNotFactorable
from starhilb.wiring import Wiring, residual

AXIOMS = (
    "associativity",
    "commutativity",
    "unit_left",
    "unit_right",
    "frobenius_left",
    "frobenius_right",
    "speciality",
)


class Strictness(str, enum.Enum):
    STRICT = "Strict"
    WEAK = "Weak"


@dataclass(frozen=True)
class ClassicalStructure:
    obj: TruncObject
    comult: Morphism
    counit: Morphism
    mult: Morphism
    unit: Morphism
    strictness: Strictness
    #: scalar ``c`` with ``mult . comult = c id`` (1 for special structures)
    speciality: float = 1.0

    @classmethod
    def from_monoid(cls, mult: Morphism, unit: Morphism, strictness=Strictness.STRICT, speciality=1.0):
        """Complete a monoid to a dagger-Frobenius candidate by taking adjoints."""
        return cls(mult.cod, dagger(mult), dagger(unit), mult, unit, strictness, speciality)


@dataclass(frozen=True)
class CompactStructure:
    obj: TruncObject
    cup: Morphism
    cap: Morphism


def classical_structure(obj: TruncObject, basis=None) -> ClassicalStructure:
    """Classical structure copying the columns of ``basis`` (default: the chosen basis).

    ``basis`` is a ``kappa x r`` array with orthonormal columns, ``r <= kappa``.
    """
    k = obj.kappa
    chosen = basis is None
    F = np.eye(k, dtype=complex) if chosen else np.asarray(basis, dtype=complex)
    if F.ndim != 2 or F.shape[0] != k or F.shape[1] > k:
        raise NotOrthonormal(f"basis must be a {k} x r array with r <= {k}, got {F.shape}")
    gram_err = np.linalg.norm(F.conj().T @ F - np.eye(F.shape[1]), 2)
    if gram_err > EXACT_TOL:
        raise NotOrthonormal(f"basis columns are not orthonormal (residual {gram_err:.2e})")
    strict = chosen or (F.shape == (k, k) and np.max(np.abs(F - np.eye(k))) <= EXACT_TOL)

    comult = np.einsum("ar,br,cr->abc", F, F, F.conj()).reshape(k * k, k)
    counit = F.conj().sum(axis=1).reshape(1, k)
    oo = tensor_obj(obj, obj)
    c = Morphism(obj, oo, comult)
    e = Morphism(obj, unit_object(), counit)
    return ClassicalStructure(obj, c, e, dagger(c), dagger(e),
                              Strictness.STRICT if strict else Strictness.WEAK)


def check_axioms(cs: ClassicalStructure) -> dict[str, float]:
    """Operator-norm residual of each of the seven laws."""
    k = cs.obj.kappa
    mu, delta, eta = cs.mult, cs.comult, cs.unit
    ident = Wiring(k).matrix()
    out = {}
    out["associativity"] = residual(
        Wiring(k, k, k).apply(mu, 0).apply(mu, 0).matrix(),
        Wiring(k, k, k).apply(mu, 1).apply(mu, 0).matrix(),
    )
    out["commutativity"] = residual(
        Wiring(k, k).swap(0).apply(mu, 0).matrix(),
        Wiring(k, k).apply(mu, 0).matrix(),
    )
    out["unit_left"] = residual(Wiring(k).apply(eta, 0).apply(mu, 0).matrix(), ident)
    out["unit_right"] = residual(Wiring(k).apply(eta, 1).apply(mu, 0).matrix(), ident)
    delta_mu = Wiring(k, k).apply(mu, 0).apply(delta, 0).matrix()
    out["frobenius_left"] = residual(Wiring(k, k).apply(delta, 0).apply(mu, 1).matrix(), delta_mu)
    out["frobenius_right"] = residual(Wiring(k, k).apply(delta, 1).apply(mu, 0).matrix(), delta_mu)
    out["speciality"] = residual(Wiring(k).apply(delta, 0).apply(mu, 0).matrix(), cs.speciality * ident)
    return out


def quasi_speciality(cs: ClassicalStructure) -> tuple[float, float]:
    """Measured factor ``c = Tr(mu delta)/kappa`` and the residual ``||mu delta - c id||``."""
    k = cs.obj.kappa
    md = Wiring(k).apply(cs.comult, 0).apply(cs.mult, 0).matrix()
    c = md.diagonal().sum() / k
    return complex(c).real, residual(md, c * Wiring(k).matrix())


def axioms_json(residuals: dict[str, float]) -> str:
    return json.dumps({name: float(residuals[name]) for name in residuals}, indent=2, sort_keys=True)


# ----------------------------------------------------------------------------
# compact structure


def cup(obj: TruncObject) -> Morphism:
    """``sum_n |e_n> (x) |e_n>``, i.e. comult . unit of the chosen-basis structure."""
    cs = classical_structure(obj)
    return compose(cs.comult, cs.unit)


def cap(obj: TruncObject) -> Morphism:
    return dagger(cup(obj))


def compact_structure(obj: TruncObject) -> CompactStructure:
    c = cup(obj)
    return CompactStructure(obj, c, dagger(c))


def snake_residuals(cs: CompactStructure) -> tuple[float, float]:
    """``(id (x) cap)(cup (x) id) - id`` and ``(cap (x) id)(id (x) cup) - id``."""
    k = cs.obj.kappa
    ident = Wiring(k).matrix()
    left = Wiring(k).apply(cs.cup, 0).apply(cs.cap, 1).matrix()
    right = Wiring(k).apply(cs.cup, 1).apply(cs.cap, 0).matrix()
    return residual(left, ident), residual(right, ident)


def transpose(f: Morphism) -> Morphism:
    """Transpose ``G -> H`` of ``f: H -> G``, obtained by bending both wires:
    ``(id_H (x) cap_G) . (id_H (x) f (x) id_G) . (cup_H (x) id_G)``.
    """
    h, g = f.dom.kappa, f.cod.kappa
    m = (Wiring(g).apply(cup(f.dom), 0, out_dims=[h, h])
         .apply(f, 1, n_in=1, out_dims=[g])
         .apply(cap(f.cod), 1, n_in=2)
         .matrix())
    return Morphism(f.cod, f.dom, m.toarray())


# ----------------------------------------------------------------------------
# traces


def trace(f: Morphism) -> complex:
    if f.dom != f.cod:
        raise DomainMismatch("trace needs an endomorphism")
    return complex(np.trace(f.mat))


def _split_last(obj: TruncObject, k: int, n_head: int) -> TruncObject:
    fs = obj.factors
    if fs and fs[-1].kappa == k:
        return tensor_obj(*fs[:-1]) if len(fs) > 1 else unit_object()
    return TruncObject(n_head)


def partial_trace(g: Morphism, dims: tuple[int, int, int]) -> Morphism:
    """Trace out the last factor ``K`` of ``g: H (x) K -> G (x) K``; ``dims = (dim H, dim G, dim K)``.

    ``out[m, n] = sum_k g[varsigma(m, k), varsigma(n, k)]``.
    """
    h, gd, kd = (int(d) for d in dims)
    if g.mat.shape != (gd * kd, h * kd):
        raise ShapeNotFactorable(f"matrix of shape {g.mat.shape} does not factor as ({gd}*{kd}, {h}*{kd})")
    out = np.einsum("mknk->mn", g.mat.reshape(gd, kd, h, kd))
    return Morphism(_split_last(g.dom, kd, h), _split_last(g.cod, kd, gd), out)


def hs_inner(g: Morphism, f: Morphism) -> complex:
    """``Tr(g^dagger f)``, conjugate-linear in ``g``."""
    if g.dom != f.dom or g.cod != f.cod:
        raise DomainMismatch("Hilbert-Schmidt product of morphisms with different types")
    return complex(np.vdot(g.mat, f.mat))


def loop(obj: TruncObject) -> complex:
    """The scalar ``cap . cup`` (equals ``kappa``)."""
    return complex(compose(cap(obj), cup(obj)).mat[0, 0])


__all__ = [
    "AXIOMS", "Strictness", "ClassicalStructure", "CompactStructure", "classical_structure",
    "check_axioms", "quasi_speciality", "axioms_json", "cup", "cap", "compact_structure",
    "snake_residuals", "transpose", "trace", "partial_trace", "hs_inner", "loop",
]
