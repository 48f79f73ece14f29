"""
Operator norms and the finite-scale reading of infinitesimal equivalence.

A statement "X is infinitesimal" about an infinite truncation ``kappa`` is
checked here as a *sweep*: a residual is evaluated at a geometric grid of
finite ``kappa`` values and must decay monotonically below a threshold.
"""

from __future__ import annotations

import csv
import enum
import json
import math
import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from starhilb.core import Morphism, TruncObject
from starhilb.errors import DomainMismatch, IoError, ResidualNaN, ShapeMismatch

DEFAULT_THRESHOLD = 1e-6
#: relative drop required between consecutive sweep points to count as decreasing
DEFAULT_DECREASE_RTOL = 1e-9


def default_grid(points: int = 4, start: int = 8) -> list[int]:
    return [start * 2**i for i in range(points)]


def operator_norm(f: Morphism | np.ndarray) -> float:
    """Largest singular value (LAPACK SVD)."""
    mat = f.mat if isinstance(f, Morphism) else np.asarray(f)
    if mat.size == 0:
        return 0.0
    return float(np.linalg.norm(mat, 2))


def vector_norm(f: Morphism) -> float:
    return float(np.linalg.norm(f.mat))


# ----------------------------------------------------------------------------
# standard maps and their truncations


@dataclass(frozen=True)
class StandardMapGenerator:
    """A standard matrix ``(a_mn)``, 1-based, given entry by entry."""

    entry_fn: Callable[[int, int], complex]
    declared_bound: float | None = None

    def block(self, rows: int, cols: int) -> np.ndarray:
        m, n = np.meshgrid(np.arange(1, rows + 1), np.arange(1, cols + 1), indexing="ij")
        try:
            out = np.broadcast_to(np.asarray(self.entry_fn(m, n), dtype=complex), (rows, cols))
            return np.array(out)
        except (TypeError, ValueError):
            pass
        out = np.empty((rows, cols), dtype=complex)
        for i in range(rows):
            for j in range(cols):
                out[i, j] = self.entry_fn(i + 1, j + 1)
        return out


def truncate_standard(gen: StandardMapGenerator, dom: TruncObject, cod: TruncObject | None = None) -> Morphism:
    """The truncation of a standard map: ``mat[m, n] = a_mn`` for ``m <= cod.kappa, n <= dom.kappa``."""
    cod = dom if cod is None else cod
    return Morphism(dom, cod, gen.block(cod.kappa, dom.kappa))


def weak_functoriality_residual(g: StandardMapGenerator, f: StandardMapGenerator, kappa: int,
                                ambient: int | None = None) -> float:
    """``|| trunc(g) trunc(f) - trunc(g f) ||_op`` at truncation ``kappa``.

    The difference equals ``P g (1 - P) f P``, the part of the composite routed
    through indices beyond ``kappa``.  It is evaluated in that form, with the
    inner sum cut at ``ambient`` (default ``kappa + 64``), so the residual stays
    accurate far below double-precision cancellation.
    """
    ambient = kappa + 64 if ambient is None else ambient
    if ambient <= kappa:
        raise ValueError("ambient truncation must exceed kappa")
    gm = g.block(kappa, ambient)[:, kappa:]
    fm = f.block(ambient, kappa)[kappa:, :]
    return operator_norm(gm @ fm)


# ----------------------------------------------------------------------------
# sweeps


class Verdict(str, enum.Enum):
    INFINITESIMAL = "Infinitesimal"
    NOT_INFINITESIMAL = "NotInfinitesimal"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class SweepReport:
    parameter_values: tuple
    residuals: tuple
    fitted_rate: float
    verdict: Verdict
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if len(self.parameter_values) != len(self.residuals):
            raise ShapeMismatch("one residual per parameter value")
        if len(self.parameter_values) < 3:
            raise ShapeMismatch("a sweep needs at least 3 points")
        if any(b <= a for a, b in zip(self.parameter_values, self.parameter_values[1:])):
            raise ShapeMismatch("parameter values must be strictly increasing")

    def to_csv(self, path) -> None:
        try:
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["param", "residual"])
                for p, r in zip(self.parameter_values, self.residuals):
                    w.writerow([p, repr(float(r))])
        except OSError as exc:
            raise IoError(str(exc)) from exc

    def sidecar(self) -> dict:
        rate = self.fitted_rate if math.isfinite(self.fitted_rate) else None
        return {"fitted_rate": rate, "verdict": self.verdict.value, "threshold": self.threshold}

    def save(self, csv_path) -> None:
        """Write ``param,residual`` CSV plus a ``.json`` sidecar next to it."""
        self.to_csv(csv_path)
        side = os.path.splitext(os.fspath(csv_path))[0] + ".json"
        try:
            with open(side, "w") as fh:
                json.dump(self.sidecar(), fh, indent=2, sort_keys=True)
        except OSError as exc:
            raise IoError(str(exc)) from exc


def fit_rate(params: Sequence[float], residuals: Sequence[float]) -> float:
    """Least-squares slope of log(residual) against log(param).

    Exact zeros are left out; if fewer than two positive residuals remain the
    rate is ``-inf`` when the sweep ends at zero and ``nan`` otherwise.
    """
    p = np.asarray(params, dtype=float)
    r = np.asarray(residuals, dtype=float)
    keep = r > 0
    if keep.sum() < 2:
        return -math.inf if r[-1] == 0 else math.nan
    slope, _ = np.polyfit(np.log(p[keep]), np.log(r[keep]), 1)
    return float(slope)


def _tail_decreasing(r: Sequence[float], rtol: float, tail: int = 3) -> bool:
    r = list(r)[-tail:]
    for a, b in zip(r, r[1:]):
        if a == 0.0 and b == 0.0:
            continue
        if not b < a * (1.0 - rtol):
            return False
    return True


def classify(residuals: Sequence[float], threshold: float = DEFAULT_THRESHOLD,
             decrease_rtol: float = DEFAULT_DECREASE_RTOL) -> Verdict:
    decreasing = _tail_decreasing(residuals, decrease_rtol)
    small = residuals[-1] < threshold
    if decreasing and small:
        return Verdict.INFINITESIMAL
    if not decreasing and not small:
        return Verdict.NOT_INFINITESIMAL
    return Verdict.INCONCLUSIVE


def make_report(params: Sequence[int], residuals: Sequence[float], threshold: float = DEFAULT_THRESHOLD,
                decrease_rtol: float = DEFAULT_DECREASE_RTOL) -> SweepReport:
    residuals = [float(r) for r in residuals]
    for p, r in zip(params, residuals):
        if not math.isfinite(r) or r < 0:
            raise ResidualNaN(f"residual at {p} is {r!r}")
    return SweepReport(tuple(params), tuple(residuals), fit_rate(params, residuals),
                       classify(residuals, threshold, decrease_rtol), threshold)


def sweep_residual(residual_fn: Callable[[int], float], kappas: Sequence[int] | None = None,
                   threshold: float = DEFAULT_THRESHOLD, decrease_rtol: float = DEFAULT_DECREASE_RTOL,
                   ) -> SweepReport:
    kappas = default_grid() if kappas is None else list(kappas)
    if len(kappas) < 3:
        raise ShapeMismatch("a sweep needs at least 3 points")
    return make_report(kappas, [residual_fn(k) for k in kappas], threshold, decrease_rtol)


def standard_part_estimate(f_at: Callable[[int], Morphism], kappas: Sequence[int],
                           threshold: float = DEFAULT_THRESHOLD,
                           decrease_rtol: float = DEFAULT_DECREASE_RTOL) -> tuple[Morphism, SweepReport]:
    """Estimate the standard part of a family of nested truncations.

    Residual ``i`` is ``|| corner(f(k[i+1])) - f(k[i]) ||_op``: how far the
    top-left block moves when the truncation grows.  The report is indexed by
    the smaller ``k[i]``, so ``n`` grid points give ``n - 1`` residuals.
    """
    kappas = list(kappas)
    if len(kappas) < 4:
        raise ShapeMismatch("need at least 4 truncations for 3 successive differences")
    mats = [f_at(k) for k in kappas]
    residuals = []
    for small, big in zip(mats, mats[1:]):
        r, c = small.mat.shape
        if big.mat.shape[0] < r or big.mat.shape[1] < c:
            raise ShapeMismatch("truncations are not nested (shapes shrink)")
        residuals.append(operator_norm(big.mat[:r, :c] - small.mat))
    return mats[-1], make_report(kappas[:-1], residuals, threshold, decrease_rtol)


def vector_equiv(psi: Morphism, phi: Morphism) -> float:
    """Norm of ``psi - phi`` for two states with the same codomain."""
    if psi.dom.kappa != 1 or phi.dom.kappa != 1:
        raise DomainMismatch("vector_equiv compares states (morphisms out of the unit)")
    if psi.cod != phi.cod:
        raise DomainMismatch(f"states live in different objects: {psi.cod!r} vs {phi.cod!r}")
    return float(np.linalg.norm(psi.mat - phi.mat))
