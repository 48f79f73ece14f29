"""
Sparse evaluation of string diagrams.

Composites such as ``(mu (x) mu) . (id (x) swap (x) id) . (delta (x) delta)``
are far too large to build as Kronecker products once ``kappa`` is in the
hundreds (``kappa**4`` rows).  A :class:`Wiring` instead tracks the matrix of
the diagram built so far, with its output space split into *legs*, and applies
each box only to the legs it touches.  Work is proportional to the number of
non-zeros, so the permutation-like structures of the chosen bases stay cheap.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from starhilb.core import Morphism
from starhilb.errors import ShapeMismatch


def _prod(dims) -> int:
    out = 1
    for d in dims:
        out *= int(d)
    return out


class Wiring:
    """The identity on ``dims`` legs, extended by boxes and swaps on top.

    >>> w = Wiring(3, 3).swap(0)
    >>> w.matrix().shape
    (9, 9)
    """

    def __init__(self, *dims: int):
        self.dims = [int(d) for d in dims]
        self.n_in = _prod(self.dims)
        self._x = sp.identity(self.n_in, dtype=complex, format="coo")

    def _decompose(self, rows, start, stop):
        left = _prod(self.dims[:start])
        mid = _prod(self.dims[start:stop])
        right = _prod(self.dims[stop:])
        r_left, rest = np.divmod(rows, mid * right)
        r_mid, r_right = np.divmod(rest, right)
        return left, mid, right, r_left, r_mid, r_right

    def apply(self, f: Morphism, at: int = 0, n_in: int | None = None, out_dims=None) -> "Wiring":
        """Apply ``f`` to the legs ``at .. at+n_in-1``.

        ``n_in`` defaults to the shortest run of legs whose dimensions multiply
        to ``f.dom.kappa`` (zero legs for states).  The outputs become legs of
        the dimensions of ``f.cod``'s tensor factors.
        """
        if n_in is None:
            n_in = 0
            if f.dom.kappa != 1:
                acc = 1
                while acc < f.dom.kappa and at + n_in < len(self.dims):
                    acc *= self.dims[at + n_in]
                    n_in += 1
        stop = at + n_in
        if stop > len(self.dims) or _prod(self.dims[at:stop]) != f.dom.kappa:
            raise ShapeMismatch(f"box with domain {f.dom.kappa} does not fit legs {self.dims[at:stop]}")
        if out_dims is None:
            out_dims = [o.kappa for o in f.cod.factors]
        if _prod(out_dims) != f.cod.kappa:
            raise ShapeMismatch("output legs do not multiply to the codomain dimension")

        x = self._x.tocoo()
        left, mid, right, r_left, r_mid, r_right = self._decompose(x.row.astype(np.int64), at, stop)
        # group entries by everything except the touched legs
        key = (r_left * right + r_right) * self.n_in + x.col
        ukey, inv = np.unique(key, return_inverse=True)
        xm = sp.csc_array((x.data, (r_mid, inv)), shape=(mid, len(ukey)))
        y = (f.sparse @ xm).tocoo()
        out = f.cod.kappa
        k = ukey[y.col]
        lr, col = np.divmod(k, self.n_in)
        yl, yr = np.divmod(lr, right)
        rows = (yl * out + y.row) * right + yr
        self.dims = self.dims[:at] + list(out_dims) + self.dims[stop:]
        self._x = sp.coo_array((y.data, (rows, col)), shape=(_prod(self.dims), self.n_in))
        return self

    def swap(self, at: int) -> "Wiring":
        """Exchange legs ``at`` and ``at + 1``."""
        x = self._x.tocoo()
        a, b = self.dims[at], self.dims[at + 1]
        left, mid, right, r_left, r_mid, r_right = self._decompose(x.row.astype(np.int64), at, at + 2)
        i, j = np.divmod(r_mid, b)
        rows = (r_left * mid + j * a + i) * right + r_right
        self.dims[at], self.dims[at + 1] = b, a
        self._x = sp.coo_array((x.data, (rows, x.col)), shape=x.shape)
        return self

    def scale(self, c: complex) -> "Wiring":
        self._x = self._x * c
        return self

    def matrix(self) -> sp.csr_array:
        m = self._x.tocsr()
        m.sum_duplicates()
        return m


def sparse_opnorm(a) -> float:
    """Largest singular value of a (sparse or dense) matrix."""
    if not sp.issparse(a):
        a = np.asarray(a)
        return float(np.linalg.norm(a, 2)) if a.size else 0.0
    a = sp.csr_array(a)
    a.eliminate_zeros()
    if a.nnz == 0:
        return 0.0
    rows, cols = a.shape
    if min(rows, cols) <= 2048:
        g = (a @ a.conj().T) if rows <= cols else (a.conj().T @ a)
        return float(np.sqrt(max(np.linalg.eigvalsh(g.toarray()).max(), 0.0)))
    # drop empty rows/columns before handing to ARPACK
    a = a[np.unique(a.nonzero()[0])][:, np.unique(a.nonzero()[1])]
    if min(a.shape) <= 2048:
        return sparse_opnorm(a)
    s = spla.svds(a, k=1, return_singular_vectors=False, tol=0)
    return float(s[0])


def residual(lhs, rhs) -> float:
    """Operator norm of ``lhs - rhs`` for matrices from :meth:`Wiring.matrix`."""
    return sparse_opnorm(sp.csr_array(lhs) - sp.csr_array(rhs))
