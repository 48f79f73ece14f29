"""
Objects and morphisms of the truncated category of separable Hilbert spaces.

An object is a truncation dimension ``kappa`` together with a tag naming its
chosen orthonormal basis.  A morphism is the dense ``cod.kappa x dom.kappa``
complex matrix of its entries ``<f_m| F |e_n>`` in the chosen bases, so every
morphism already has the form ``P_G F P_H``.

The monoidal structure is strict: tensoring with the unit object (``kappa=1``)
returns the other factor unchanged, and nested products are flattened, which is
sound because the pairing ``varsigma`` is associative.

All public indices are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import IO, NamedTuple, Sequence, Union
import os

import numpy as np
import scipy.sparse as sp

from starhilb.errors import DomainMismatch, IndexOutOfRange, ShapeMismatch, IoError

#: Default tolerance for laws that hold exactly in exact arithmetic.
EXACT_TOL = 1e-12


# ----------------------------------------------------------------------------
# basis tags


@dataclass(frozen=True)
class Standard:
    """Computational basis."""


@dataclass(frozen=True)
class Fourier:
    """Normalised plane waves on a circle of circumference ``L``, ``|n| <= omega``."""

    L: float
    omega: int


@dataclass(frozen=True, eq=False)
class Custom:
    """A basis given by a unitary change-of-basis matrix (columns = basis vectors)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __eq__(self, other):
        return isinstance(other, Custom) and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.matrix.shape, self.matrix.tobytes()))


@dataclass(frozen=True)
class Product:
    """Tensor product basis, ordered by ``varsigma``; factors are never units."""

    factors: tuple


BasisTag = Union[Standard, Fourier, Custom, Product]


@dataclass(frozen=True)
class TruncObject:
    kappa: int
    label: str = field(default="", compare=False)
    basis: BasisTag = Standard()

    def __post_init__(self):
        if int(self.kappa) != self.kappa or self.kappa < 1:
            raise ValueError(f"kappa must be a positive integer, got {self.kappa!r}")
        object.__setattr__(self, "kappa", int(self.kappa))
        b = self.basis
        if isinstance(b, Fourier):
            if b.L <= 0:
                raise ValueError("circumference L must be positive")
            if self.kappa != 2 * b.omega + 1:
                raise ValueError(f"Fourier object needs kappa = 2*omega+1, got {self.kappa}, omega={b.omega}")
        elif isinstance(b, Custom):
            u = b.matrix
            if u.shape != (self.kappa, self.kappa):
                raise ValueError(f"change-of-basis matrix must be {self.kappa}x{self.kappa}")
            err = np.linalg.norm(u.conj().T @ u - np.eye(self.kappa), 2)
            if err > EXACT_TOL:
                raise ValueError(f"change-of-basis matrix is not unitary (residual {err:.2e})")
        elif isinstance(b, Product):
            k = reduce(lambda a, o: a * o.kappa, b.factors, 1)
            if k != self.kappa:
                raise ValueError("product kappa does not match its factors")

    @property
    def factors(self) -> tuple:
        """Tensor factors (a 1-tuple for non-product objects, empty for the unit)."""
        if isinstance(self.basis, Product):
            return self.basis.factors
        if self.is_unit:
            return ()
        return (self,)

    @property
    def is_unit(self) -> bool:
        return self.kappa == 1 and isinstance(self.basis, Standard)

    def __str__(self):
        return self.label or f"H{self.kappa}"


def unit_object() -> TruncObject:
    return TruncObject(1, "I")


def standard(kappa: int, label: str = "") -> TruncObject:
    return TruncObject(kappa, label)


class IndexPair(NamedTuple):
    n: int
    m: int


def varsigma(n: int, m: int, nu: int, kappa: int | None = None) -> int:
    """Flat 1-based index of the pair ``(n, m)`` in a ``kappa x nu`` product."""
    if nu < 1:
        raise IndexOutOfRange(f"nu must be >= 1, got {nu}")
    if n < 1 or (kappa is not None and n > kappa):
        raise IndexOutOfRange(f"first index {n} out of range 1..{kappa}")
    if not 1 <= m <= nu:
        raise IndexOutOfRange(f"second index {m} out of range 1..{nu}")
    return (n - 1) * nu + m


def varsigma_inv(k: int, nu: int, kappa: int | None = None) -> IndexPair:
    if nu < 1:
        raise IndexOutOfRange(f"nu must be >= 1, got {nu}")
    if k < 1 or (kappa is not None and k > kappa * nu):
        raise IndexOutOfRange(f"flat index {k} out of range")
    q, r = divmod(k - 1, nu)
    return IndexPair(q + 1, r + 1)


def tensor_obj(*objs: TruncObject) -> TruncObject:
    """Strict monoidal product: units drop out and nested products flatten."""
    factors = [f for o in objs for f in o.factors]
    if not factors:
        return unit_object()
    if len(factors) == 1:
        return factors[0]
    kappa = reduce(lambda a, o: a * o.kappa, factors, 1)
    label = "⊗".join(str(f) for f in factors)
    return TruncObject(kappa, label, Product(tuple(factors)))


# ----------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True, eq=False)
class Morphism:
    dom: TruncObject
    cod: TruncObject
    mat: np.ndarray

    def __post_init__(self):
        m = np.array(self.mat, dtype=np.complex128)
        if m.ndim == 1 and self.dom.kappa == 1:
            m = m.reshape(-1, 1)
        if m.shape != (self.cod.kappa, self.dom.kappa):
            raise ShapeMismatch(
                f"matrix shape {m.shape} does not match (cod, dom) = ({self.cod.kappa}, {self.dom.kappa})"
            )
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)

    @cached_property
    def sparse(self) -> sp.csr_array:
        s = sp.csr_array(self.mat)
        s.eliminate_zeros()
        return s

    @property
    def shape(self):
        return self.mat.shape

    @property
    def is_state(self) -> bool:
        return self.dom.kappa == 1

    @property
    def vector(self) -> np.ndarray:
        """Column of a state ``I -> H``."""
        if not self.is_state:
            raise DomainMismatch("only states (morphisms out of the unit) have a vector")
        return self.mat[:, 0]

    def __eq__(self, other):
        if not isinstance(other, Morphism):
            return NotImplemented
        return self.dom == other.dom and self.cod == other.cod and np.array_equal(self.mat, other.mat)

    __hash__ = None

    def __matmul__(self, other: "Morphism") -> "Morphism":
        return compose(self, other)

    def _same_type(self, other):
        if not isinstance(other, Morphism) or other.dom != self.dom or other.cod != self.cod:
            raise DomainMismatch("linear combination of morphisms with different types")

    def __add__(self, other):
        self._same_type(other)
        return Morphism(self.dom, self.cod, self.mat + other.mat)

    def __sub__(self, other):
        self._same_type(other)
        return Morphism(self.dom, self.cod, self.mat - other.mat)

    def __mul__(self, c):
        if isinstance(c, Morphism):
            return NotImplemented
        return Morphism(self.dom, self.cod, complex(c) * self.mat)

    __rmul__ = __mul__

    def __neg__(self):
        return Morphism(self.dom, self.cod, -self.mat)

    def __repr__(self):
        return f"Morphism({self.dom} -> {self.cod}, shape={self.mat.shape})"


def identity(obj: TruncObject) -> Morphism:
    return Morphism(obj, obj, np.eye(obj.kappa))


def state(obj: TruncObject, vec) -> Morphism:
    """The morphism ``I -> obj`` with the given coefficient column."""
    return Morphism(unit_object(), obj, np.asarray(vec, dtype=complex).reshape(-1, 1))


def effect(obj: TruncObject, vec) -> Morphism:
    """The morphism ``obj -> I`` pairing with ``vec`` (no conjugation is applied)."""
    return Morphism(obj, unit_object(), np.asarray(vec, dtype=complex).reshape(1, -1))


def basis_state(obj: TruncObject, n: int) -> Morphism:
    """The chosen basis vector ``|e_n>`` (1-based)."""
    if not 1 <= n <= obj.kappa:
        raise IndexOutOfRange(f"basis index {n} out of range 1..{obj.kappa}")
    v = np.zeros(obj.kappa, dtype=complex)
    v[n - 1] = 1.0
    return state(obj, v)


def compose(g: Morphism, f: Morphism) -> Morphism:
    """``g . f`` (apply ``f`` first)."""
    if f.cod != g.dom:
        raise DomainMismatch(f"cannot compose {g} after {f}: {f.cod!r} != {g.dom!r}")
    return Morphism(f.dom, g.cod, g.mat @ f.mat)


def compose_all(*fs: Morphism) -> Morphism:
    """``compose_all(h, g, f) == h . g . f``."""
    return reduce(compose, fs)


def tensor(*fs: Morphism) -> Morphism:
    if not fs:
        return identity(unit_object())

    def pair(f, g):
        return Morphism(tensor_obj(f.dom, g.dom), tensor_obj(f.cod, g.cod), np.kron(f.mat, g.mat))

    return reduce(pair, fs)


def dagger(f: Morphism) -> Morphism:
    return Morphism(f.cod, f.dom, f.mat.conj().T)


def braiding(a: TruncObject, b: TruncObject) -> Morphism:
    """Symmetry ``a (x) b -> b (x) a``; sends index ``varsigma(n,m)`` to ``varsigma(m,n)``."""
    k, nu = a.kappa, b.kappa
    n, m = np.divmod(np.arange(k * nu), nu)
    mat = np.zeros((k * nu, k * nu))
    mat[m * k + n, n * nu + m] = 1.0
    return Morphism(tensor_obj(a, b), tensor_obj(b, a), mat)


def corner(f: Morphism, cod: TruncObject, dom: TruncObject) -> Morphism:
    """Top-left block ``P_cod f P_dom`` of ``f`` onto smaller nested objects."""
    if cod.kappa > f.cod.kappa or dom.kappa > f.dom.kappa:
        raise ShapeMismatch("corner objects must not be larger than the morphism's objects")
    return Morphism(dom, cod, f.mat[: cod.kappa, : dom.kappa])


def max_abs_diff(f: Morphism, g: Morphism) -> float:
    if f.dom != g.dom or f.cod != g.cod:
        raise DomainMismatch("comparing morphisms of different types")
    return float(np.max(np.abs(f.mat - g.mat), initial=0.0))


# ----------------------------------------------------------------------------
# matrix file format
#
#   kappa_out kappa_in
#   re,im re,im ...      (one line per row)


def format_morphism(f: Morphism) -> str:
    rows, cols = f.mat.shape
    lines = [f"{rows} {cols}"]
    for row in f.mat:
        lines.append(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
    return "\n".join(lines) + "\n"


def parse_morphism(text: str, dom: TruncObject | None = None, cod: TruncObject | None = None) -> Morphism:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ShapeMismatch("empty matrix file")
    try:
        rows, cols = (int(t) for t in lines[0].split())
        data = [[complex(float(re), float(im)) for re, im in (tok.split(",") for tok in ln.split())] for ln in lines[1:]]
    except ValueError as exc:
        raise ShapeMismatch(f"malformed matrix file: {exc}") from None
    if len(data) != rows or any(len(r) != cols for r in data):
        raise ShapeMismatch(f"header says {rows}x{cols} but body does not match")
    dom = dom or TruncObject(cols)
    cod = cod or TruncObject(rows)
    return Morphism(dom, cod, np.array(data, dtype=complex).reshape(rows, cols))


def save_morphism(f: Morphism, path: str | os.PathLike | IO[str]) -> None:
    text = format_morphism(f)
    if hasattr(path, "write"):
        path.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(str(exc)) from exc


def load_morphism(path: str | os.PathLike | IO[str], dom: TruncObject | None = None,
                  cod: TruncObject | None = None) -> Morphism:
    if hasattr(path, "read"):
        return parse_morphism(path.read(), dom, cod)
    try:
        with open(path) as fh:
            return parse_morphism(fh.read(), dom, cod)
    except OSError as exc:
        raise IoError(str(exc)) from exc


__all__: Sequence[str] = [
    "EXACT_TOL", "Standard", "Fourier", "Custom", "Product", "TruncObject", "IndexPair", "Morphism",
    "unit_object", "standard", "varsigma", "varsigma_inv", "tensor_obj", "identity", "state", "effect",
    "basis_state", "compose", "compose_all", "tensor", "dagger", "braiding", "corner", "max_abs_diff",
    "format_morphism", "parse_morphism", "save_morphism", "load_morphism",
]
