"""
Wavefunctions on the circle R/LZ truncated at momentum ``|n| <= omega``.

The chosen basis of the object is the normalised plane waves
``e_{theta(n)} = chi_n / sqrt(L)`` with ``chi_n(x) = exp(-i 2 pi n x / L)``,
ordered by the bijection ``theta(n) = |2n| + (1 - sign n)/2`` (``sign 0 = -1``),
i.e. ``n = 0, 1, -1, 2, -2, ...``.  All state vectors below are coefficient
vectors in that basis.

Two classical structures live on this object:

* *white* (momentum): the chosen-basis copy structure, strictly special;
* *black* (position): the group algebra of ``Z_{2 omega + 1}``,
  ``mu |e_n e_m> = |e_{n (+) m}>``, ``eta = e_0``, quasi-special with factor
  ``kappa``.  It copies the rescaled deltas ``sqrt(L) delta_x`` exactly when
  ``x`` lies on the grid ``x_j = j L / kappa``.

Every check returns a residual; nothing here asserts.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Mapping

import numpy as np

from starhilb.analysis import SweepReport, make_report
from starhilb.core import EXACT_TOL, Fourier, Morphism, TruncObject, dagger, state, tensor_obj
from starhilb.errors import IndexOutOfRange, NotNormalized
from starhilb.frobenius import ClassicalStructure, Strictness, check_axioms, classical_structure, quasi_speciality
from starhilb.wiring import Wiring, residual

TWO_PI = 2.0 * math.pi


# ----------------------------------------------------------------------------
# indices


def theta(n: int) -> int:
    """1-based basis position of the momentum ``n``."""
    n = int(n)
    sign = 1 if n > 0 else -1
    return abs(2 * n) + (1 - sign) // 2


def theta_inv(l: int) -> int:
    l = int(l)
    if l < 1:
        raise IndexOutOfRange(f"theta_inv needs l >= 1, got {l}")
    return l // 2 if l % 2 == 0 else -(l - 1) // 2


class ModInt(int):
    """Element of ``Z_{2 omega + 1}`` stored as its centred representative."""

    omega: int

    def __new__(cls, value: int, omega: int):
        value, omega = int(value), int(omega)
        if omega < 0:
            raise ValueError("omega must be >= 0")
        if abs(value) > omega:
            raise IndexOutOfRange(f"{value} is not a representative in -{omega}..{omega}")
        obj = super().__new__(cls, value)
        obj.omega = omega
        return obj

    def __add__(self, other):
        if isinstance(other, int):
            return oplus(self, other, self.omega)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return ModInt(-int(self), self.omega)

    def __repr__(self):
        return f"ModInt({int(self)}, omega={self.omega})"


def reduce_mod(v: int, omega: int) -> ModInt:
    k = 2 * omega + 1
    return ModInt((int(v) + omega) % k - omega, omega)


def oplus(a: int, b: int, omega: int) -> ModInt:
    """``[a + b] mod (2 omega + 1)`` on centred representatives."""
    for v in (a, b):
        if abs(int(v)) > omega:
            raise IndexOutOfRange(f"{v} is not a representative in -{omega}..{omega}")
    return reduce_mod(int(a) + int(b), omega)


# ----------------------------------------------------------------------------
# the space


@dataclass(frozen=True)
class CircleSpace:
    L: float
    omega: int
    obj: TruncObject = field(init=False, repr=False)

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("circumference L must be positive")
        if int(self.omega) != self.omega or self.omega < 0:
            raise ValueError("omega must be a non-negative integer")
        object.__setattr__(self, "omega", int(self.omega))
        object.__setattr__(self, "L", float(self.L))
        object.__setattr__(self, "obj", TruncObject(self.kappa, f"L2(S1;L={self.L:g},w={self.omega})",
                                                      Fourier(self.L, self.omega)))

    @property
    def kappa(self) -> int:
        return 2 * self.omega + 1

    @cached_property
    def momenta(self) -> np.ndarray:
        """Momentum label of each basis slot (0-based slots)."""
        return np.array([theta_inv(l) for l in range(1, self.kappa + 1)])

    @property
    def grid(self) -> np.ndarray:
        return np.arange(self.kappa) * (self.L / self.kappa)

    def slot(self, n: int) -> int:
        """0-based array index of momentum ``n``."""
        if abs(int(n)) > self.omega:
            raise IndexOutOfRange(f"momentum {n} outside -{self.omega}..{self.omega}")
        return theta(n) - 1

    def reduce_x(self, x: float) -> float:
        return float(x) % self.L

    def grid_index(self, x: float) -> int | None:
        """``j`` if ``x`` is the grid point ``j L / kappa`` up to rounding, else ``None``."""
        t = self.reduce_x(x) / self.L * self.kappa
        j = round(t)
        return j % self.kappa if abs(t - j) <= 1e-12 * max(1.0, t) else None

    def phases(self, x: float) -> np.ndarray:
        """``exp(+i 2 pi n x / L)`` per basis slot, i.e. ``chi_n(x)^*``.

        On grid points the exponent is reduced in integer arithmetic, so the
        DFT identities hold to rounding of a single ``exp``.
        """
        j = self.grid_index(x)
        if j is not None:
            return np.exp(1j * TWO_PI * ((self.momenta * j) % self.kappa) / self.kappa)
        return np.exp(1j * TWO_PI * np.mod(self.momenta * (self.reduce_x(x) / self.L), 1.0))

    def _shift_table(self) -> np.ndarray:
        """``table[a, b]`` = slot of ``momenta[a] (+) momenta[b]``."""
        n = self.momenta
        s = (n[:, None] + n[None, :] + self.omega) % self.kappa - self.omega
        return np.vectorize(theta)(s) - 1


# ----------------------------------------------------------------------------
# states


def _vec_state(space: CircleSpace, v) -> Morphism:
    return state(space.obj, v)


def momentum_eigenstate(space: CircleSpace, n: int) -> Morphism:
    """The unnormalised plane wave ``|chi_n> = sqrt(L) e_{theta(n)}``."""
    v = np.zeros(space.kappa, dtype=complex)
    v[space.slot(n)] = math.sqrt(space.L)
    return _vec_state(space, v)


def basis_wave(space: CircleSpace, n: int) -> Morphism:
    """The normalised plane wave ``chi_n / sqrt(L)``."""
    v = np.zeros(space.kappa, dtype=complex)
    v[space.slot(n)] = 1.0
    return _vec_state(space, v)


def position_eigenstate(space: CircleSpace, x0: float) -> Morphism:
    """``|delta_x0> = (1/sqrt L) sum_n chi_n(x0)^* chi_n / sqrt L``."""
    return _vec_state(space, space.phases(x0) / math.sqrt(space.L))


def coefficients(space: CircleSpace, f) -> np.ndarray:
    """Coefficients of ``f`` on the normalised plane waves, in basis order.

    ``f`` may be a state, an array in basis order, a mapping ``{n: f_n}`` or a
    callable ``n -> f_n``.
    """
    if isinstance(f, Morphism):
        if f.cod != space.obj:
            raise IndexOutOfRange("state does not live in this circle space")
        return np.asarray(f.vector)
    if isinstance(f, Mapping):
        v = np.zeros(space.kappa, dtype=complex)
        for n, c in f.items():
            v[space.slot(n)] = c
        return v
    if callable(f):
        return np.array([f(int(n)) for n in space.momenta], dtype=complex)
    v = np.asarray(f, dtype=complex).reshape(-1)
    if v.shape != (space.kappa,):
        raise IndexOutOfRange(f"expected {space.kappa} coefficients, got {v.shape[0]}")
    return v


def delta_pairing(space: CircleSpace, x0: float, f) -> complex:
    """``<delta_x0|f>``: the truncated Fourier synthesis of ``f`` evaluated at ``x0``."""
    c = coefficients(space, f)
    return complex(np.vdot(position_eigenstate(space, x0).vector, c))


def trig_value(x: float, coeffs: Mapping[int, complex], L: float) -> complex:
    """Point value of ``sum_n f_n chi_n(x) / sqrt(L)``."""
    return sum(c * cmath.exp(-1j * TWO_PI * n * x / L) for n, c in coeffs.items()) / math.sqrt(L)


def poisson_coefficients(space: CircleSpace, r: float = 0.5) -> np.ndarray:
    """``f_n = r^|n|``; the synthesis is the Poisson kernel, see :func:`poisson_value`."""
    return r ** np.abs(space.momenta).astype(float) + 0j


def poisson_value(x: float, L: float, r: float = 0.5) -> float:
    """Closed form of ``(1/sqrt L) sum_{n in Z} r^|n| chi_n(x)``."""
    return (1 - r * r) / (1 - 2 * r * math.cos(TWO_PI * x / L) + r * r) / math.sqrt(L)


def dirac_sweep_point(L: float, omega: int, r: float = 0.5, x0: float = 0.0) -> float:
    """``|<delta_x0|f> - f(x0)|`` for the Poisson kernel ``f`` truncated at ``omega``."""
    space = CircleSpace(L, omega)
    return abs(delta_pairing(space, x0, poisson_coefficients(space, r)) - poisson_value(x0, L, r))


def dirac_sweep(omegas, L: float = 1.0, r: float = 0.5, x0: float = 0.0, **kw) -> SweepReport:
    """Error of the delta pairing against the Poisson kernel as ``omega`` grows."""
    omegas = list(omegas)
    return make_report(omegas, [dirac_sweep_point(L, w, r, x0) for w in omegas], **kw)


def random_state(space: CircleSpace, rng: np.random.Generator | int | None = 0) -> Morphism:
    rng = np.random.default_rng(rng)
    v = rng.standard_normal(space.kappa) + 1j * rng.standard_normal(space.kappa)
    return _vec_state(space, v / np.linalg.norm(v))


def dft_matrix(space: CircleSpace) -> np.ndarray:
    """Columns ``sqrt(L/kappa) delta_{x_j}``; unitary."""
    cols = [position_eigenstate(space, x).vector for x in space.grid]
    return np.sqrt(space.L / space.kappa) * np.stack(cols, axis=1)


# ----------------------------------------------------------------------------
# structures


@lru_cache(maxsize=8)
def momentum_structure(space: CircleSpace) -> ClassicalStructure:
    return classical_structure(space.obj)


@lru_cache(maxsize=8)
def group_algebra(space: CircleSpace) -> ClassicalStructure:
    """``mu = L^{-3/2} sum |chi_{n(+)m}><chi_n|<chi_m|``, ``eta = chi_0 / sqrt L``.

    In the normalised basis the three factors of ``sqrt L`` cancel the prefactor,
    leaving a 0/1 matrix.
    """
    k = space.kappa
    table = space._shift_table()
    cols = np.arange(k * k)
    rows = table.reshape(-1)  # column varsigma(a, b) - 1 = a*k + b
    mu = np.zeros((k, k * k), dtype=complex)
    mu[rows, cols] = 1.0
    oo = tensor_obj(space.obj, space.obj)
    mult = Morphism(oo, space.obj, mu)
    unit = basis_wave(space, 0)
    return ClassicalStructure.from_monoid(mult, unit, Strictness.STRICT, speciality=float(k))


def _monoid_action(mult: Morphism, v: Morphism) -> Morphism:
    """``mu . (v (x) id)``: the operator of left multiplication by ``v``."""
    k = mult.cod.kappa
    m = Wiring(k).apply(v, 0).apply(mult, 0).matrix().toarray()
    return Morphism(mult.cod, mult.cod, m)


def _apply2(mult: Morphism, a: Morphism, b: Morphism) -> Morphism:
    k = mult.cod.kappa
    v = Wiring(k).apply(a, 0).apply(mult, 0).matrix() @ b.mat
    return state(mult.cod, np.asarray(v).reshape(-1))


# ----------------------------------------------------------------------------
# observables


def momentum_projector(space: CircleSpace, n: int, method: str = "direct") -> Morphism:
    """``P_n = (1/L)|chi_n><chi_n|``, or ``(id (x) <chi_n|/sqrt L) . comult_white``."""
    if method == "direct":
        chi = momentum_eigenstate(space, n)
        return Morphism(space.obj, space.obj, np.outer(chi.vector, chi.vector.conj()) / space.L)
    if method == "diagram":
        cs = momentum_structure(space)
        copoint = dagger(basis_wave(space, n))
        m = Wiring(space.kappa).apply(cs.comult, 0).apply(copoint, 1).matrix().toarray()
        return Morphism(space.obj, space.obj, m)
    raise ValueError(f"unknown method {method!r}")


#: copoint scale making the position diagram equal ``Q_x``; see :func:`position_projector`
def position_copoint_scale(space: CircleSpace) -> float:
    return math.sqrt(space.L) / space.kappa


def position_projector(space: CircleSpace, x: float, method: str = "direct") -> Morphism:
    """``Q_x = (L/kappa)|delta_x><delta_x|``, or ``(id (x) s<delta_x|) . comult_black``.

    The diagram uses the copoint scale ``s = sqrt(L)/kappa`` and reproduces
    ``Q_x`` exactly for grid points ``x = j L / kappa``.  Off the grid the black
    comultiplication picks up the wrap-around phase and the two differ.
    """
    if method == "direct":
        d = position_eigenstate(space, x).vector
        return Morphism(space.obj, space.obj, (space.L / space.kappa) * np.outer(d, d.conj()))
    if method == "diagram":
        cs = group_algebra(space)
        copoint = dagger(position_eigenstate(space, x)) * position_copoint_scale(space)
        m = Wiring(space.kappa).apply(cs.comult, 0).apply(copoint, 1).matrix().toarray()
        return Morphism(space.obj, space.obj, m)
    raise ValueError(f"unknown method {method!r}")


def integrate(space: CircleSpace, f) -> complex:
    """``sqrt(L) counit_black f = <chi_0|f>``, the integral over the circle."""
    cs = group_algebra(space)
    c = coefficients(space, f)
    return complex(math.sqrt(space.L) * (cs.counit.mat @ c)[0])


# ----------------------------------------------------------------------------
# translations


def momentum_translation(space: CircleSpace, n: int, m: int) -> float:
    """Residual of ``mu_black(chi_n/sqrt L (x) chi_m/sqrt L) = chi_{n(+)m}/sqrt L``."""
    mu = group_algebra(space).mult
    lhs = _apply2(mu, basis_wave(space, n), basis_wave(space, m))
    rhs = basis_wave(space, oplus(n, m, space.omega))
    return float(np.linalg.norm(lhs.vector - rhs.vector))


def momentum_translation_all(space: CircleSpace) -> float:
    """Worst :func:`momentum_translation` residual over all ``kappa**2`` pairs at once."""
    mu = group_algebra(space).mult.mat  # column varsigma(a, b) is mu(e_a (x) e_b)
    target = np.zeros_like(mu)
    target[space._shift_table().reshape(-1), np.arange(mu.shape[1])] = 1.0
    return float(np.max(np.linalg.norm(mu - target, axis=0)))


def scaled_delta(space: CircleSpace, x: float) -> Morphism:
    return position_eigenstate(space, x) * math.sqrt(space.L)


def translate(space: CircleSpace, x: float, v: Morphism) -> Morphism:
    """Act on ``v`` by ``x`` via the white monoid: ``mu_white(sqrt L delta_x (x) v)``."""
    return _apply2(momentum_structure(space).mult, scaled_delta(space, x), v)


def position_translation(space: CircleSpace, x: float, y: float) -> float:
    """Residual of ``mu_white(sqrt L delta_x (x) sqrt L delta_y) = sqrt L delta_{x(+)y}``."""
    lhs = translate(space, x, scaled_delta(space, y))
    rhs = scaled_delta(space, (x + y) % space.L)
    return float(np.linalg.norm(lhs.vector - rhs.vector))


# ----------------------------------------------------------------------------
# strong complementarity


def weyl_operators(space: CircleSpace):
    """Diagrammatic generators on the grid.

    ``W[j]`` multiplies by ``sqrt L delta_{x_j}`` in the white monoid (diagonal
    phases) and ``B[n]`` by ``chi_n / sqrt L`` in the black one (a cyclic shift).
    Both stacks are indexed in basis-slot order for ``n``.
    """
    white = momentum_structure(space).mult
    black = group_algebra(space).mult
    W = np.stack([_monoid_action(white, scaled_delta(space, x)).mat for x in space.grid])
    B = np.stack([_monoid_action(black, basis_wave(space, int(n))).mat for n in space.momenta])
    return W, B


def _ccr_residual(X: np.ndarray, Y: np.ndarray, phase: np.ndarray) -> float:
    """``max_{j,n} max_entry |X_j Y_n - phase[j,n] Y_n X_j|`` for diagonal ``X_j``."""
    worst = 0.0
    for j, xj in enumerate(X):
        d = np.diagonal(xj)
        lhs = d[None, :, None] * Y
        rhs = phase[j][:, None, None] * (Y * d[None, None, :])
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def check_strong_complementarity(space: CircleSpace) -> dict[str, float]:
    """Residuals of the bialgebra laws and of both forms of the Weyl relations.

    ``weyl_ccr``: ``W_x B_n = chi_n(x)^* B_n W_x`` for the diagrammatic
    generators.  ``weyl_ccr_projector``: ``U_x V_n = chi_n(x) V_n U_x`` with
    ``U_x = sum_m e^{i 2 pi m x/L} P_m`` and ``V_n = sum_j e^{i 2 pi n x_j/L} Q_{x_j}``.
    Both over every grid point ``x`` and every momentum ``n``.
    """
    k = space.kappa
    w = momentum_structure(space)
    b = group_algebra(space)
    out = {}
    lhs = Wiring(k, k).apply(b.mult, 0).apply(w.comult, 0).matrix()
    rhs = (Wiring(k, k).apply(w.comult, 0).apply(w.comult, 2).swap(1)
           .apply(b.mult, 0).apply(b.mult, 1).matrix())
    out["bialgebra"] = residual(lhs, rhs)
    out["unit_copy"] = residual(Wiring().apply(b.unit, 0).apply(w.comult, 0).matrix(),
                                Wiring().apply(b.unit, 0).apply(b.unit, 1).matrix())
    out["counit_copy"] = residual(Wiring(k, k).apply(b.mult, 0).apply(w.counit, 0).matrix(),
                                  Wiring(k, k).apply(w.counit, 0).apply(w.counit, 0).matrix())

    grid, n = space.grid, space.momenta
    chi = np.exp(-1j * TWO_PI * np.outer(grid, n) / space.L)  # chi[j, n] = chi_n(x_j)
    W, B = weyl_operators(space)
    out["weyl_ccr"] = _ccr_residual(W, B, chi.conj())

    P = np.stack([momentum_projector(space, int(m)).mat for m in n])
    Q = np.stack([position_projector(space, x).mat for x in grid])
    U = np.einsum("jm,mab->jab", chi.conj(), P)
    V = np.einsum("jn,jab->nab", chi.conj(), Q)
    out["weyl_ccr_projector"] = _ccr_residual(U, V, chi)
    return out


# ----------------------------------------------------------------------------
# complementarity -> total mixing


def mixing_experiment(space: CircleSpace, psi: Morphism | np.ndarray | None = None,
                      seed: int = 0) -> tuple[Morphism, float]:
    """Measure position then momentum, non-selectively; return ``rho'`` and ``||rho' - id/kappa||``."""
    psi = random_state(space, seed) if psi is None else psi
    v = coefficients(space, psi)
    if abs(np.vdot(v, v).real - 1.0) > EXACT_TOL:
        raise NotNormalized(f"<psi|psi> = {np.vdot(v, v).real!r}")
    rho = np.outer(v, v.conj())
    Q = [position_projector(space, x).mat for x in space.grid]
    rho = sum(q @ rho @ q for q in Q)
    P = [momentum_projector(space, int(n)).mat for n in space.momenta]
    rho = sum(p @ rho @ p for p in P)
    dist = float(np.linalg.norm(rho - np.eye(space.kappa) / space.kappa, 2))
    return Morphism(space.obj, space.obj, rho), dist


# ----------------------------------------------------------------------------
# report


def circle_checks(space: CircleSpace, seed: int = 0) -> dict[str, float]:
    """Every exact identity of the model at this ``omega``, as residuals."""
    k, L = space.kappa, space.L
    ident = np.eye(k)
    checks: dict[str, float] = {}
    for name, r in check_axioms(momentum_structure(space)).items():
        checks[f"white.{name}"] = r
    ga = group_algebra(space)
    for name, r in check_axioms(ga).items():
        checks[f"black.{name}"] = r
    c, qres = quasi_speciality(ga)
    checks["black.quasi_speciality_factor"] = abs(c - k) / k
    checks["black.quasi_speciality"] = qres
    copy_worst = 0.0
    for x in space.grid:
        d = scaled_delta(space, x)
        lhs = Wiring().apply(d, 0).apply(ga.comult, 0).matrix()
        rhs = Wiring().apply(d, 0).apply(d, 1).matrix()
        copy_worst = max(copy_worst, residual(lhs, rhs))
    checks["black.copies_grid_deltas"] = copy_worst
    checks["momentum_projector.diagram"] = max(
        float(np.max(np.abs(momentum_projector(space, int(n)).mat - momentum_projector(space, int(n), "diagram").mat)))
        for n in space.momenta)
    checks["position_projector.diagram"] = max(
        float(np.max(np.abs(position_projector(space, x).mat - position_projector(space, x, "diagram").mat)))
        for x in space.grid)
    checks["momentum_projector.completeness"] = float(np.linalg.norm(
        sum(momentum_projector(space, int(n)).mat for n in space.momenta) - ident, 2))
    checks["position_projector.completeness"] = float(np.linalg.norm(
        sum(position_projector(space, x).mat for x in space.grid) - ident, 2))
    F = dft_matrix(space)
    checks["dft_unitarity"] = float(np.linalg.norm(F.conj().T @ F - ident, 2))
    checks["momentum_translation"] = momentum_translation_all(space)
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0, L, size=(16, 2))
    checks["position_translation"] = max(position_translation(space, x, y) for x, y in xs)
    for name, r in check_strong_complementarity(space).items():
        checks[f"strong_complementarity.{name}"] = r
    checks["mixing"] = mixing_experiment(space, seed=seed)[1]
    return checks


def circle_report(space: CircleSpace, seed: int = 0, tolerance: float = 1e-12) -> dict:
    checks = circle_checks(space, seed)
    ok = all(r <= tolerance for r in checks.values())
    return {"omega": space.omega, "L": space.L, "checks": checks, "verdict": "pass" if ok else "fail"}


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
