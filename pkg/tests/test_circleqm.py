import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from starhilb.circleqm import (
    CircleSpace, ModInt, basis_wave, check_strong_complementarity, circle_report, coefficients, delta_pairing,
    dft_matrix, dirac_sweep, group_algebra, integrate, mixing_experiment, momentum_eigenstate,
    momentum_projector, momentum_structure, momentum_translation, oplus, poisson_coefficients, poisson_value,
    position_copoint_scale, position_eigenstate, position_projector, position_translation, random_state,
    report_json, scaled_delta, theta, theta_inv, translate, trig_value, weyl_operators,
)
from starhilb.core import Fourier, Morphism, dagger, state
from starhilb.analysis import Verdict
from starhilb.errors import IndexOutOfRange, NotNormalized
from starhilb.frobenius import Strictness, check_axioms, quasi_speciality
from starhilb.wiring import Wiring


def chi(n, x, L):
    return cmath.exp(-1j * 2 * math.pi * n * x / L)


# --- indices ---------------------------------------------------------------------

def test_theta_values():
    assert theta(0) == 1
    assert theta(1) == 2
    assert theta(-1) == 3
    assert [theta_inv(l) for l in range(1, 8)] == [0, 1, -1, 2, -2, 3, -3]


def test_theta_bijection():
    assert all(theta_inv(theta(n)) == n for n in range(-100, 101))
    assert sorted(theta(n) for n in range(-100, 101)) == list(range(1, 202))
    with pytest.raises(IndexOutOfRange):
        theta_inv(0)


def test_oplus():
    assert oplus(3, 4, 5) == -4
    assert oplus(2, 3, 100) == 5
    assert all(oplus(n, 0, 5) == n for n in range(-5, 6))
    a = ModInt(4, 5)
    assert a + ModInt(3, 5) == -4 and (a + 3).omega == 5
    assert -a == -4
    with pytest.raises(IndexOutOfRange):
        ModInt(6, 5)
    with pytest.raises(IndexOutOfRange):
        oplus(6, 0, 5)


@settings(max_examples=50, deadline=None)
@given(w=st.integers(0, 30), data=st.data())
def test_oplus_group_law(w, data):
    el = st.integers(-w, w)
    a, b, c = data.draw(el), data.draw(el), data.draw(el)
    assert oplus(oplus(a, b, w), c, w) == oplus(a, oplus(b, c, w), w)
    assert oplus(a, b, w) == oplus(b, a, w)
    assert oplus(a, -a, w) == 0
    assert (oplus(a, b, w) - (a + b)) % (2 * w + 1) == 0
    if abs(a + b) <= w:
        assert oplus(a, b, w) == a + b


# --- space and states ----------------------------------------------------------

def test_space():
    s = CircleSpace(2.0, 3)
    assert s.kappa == 7
    assert s.obj.basis == Fourier(2.0, 3)
    np.testing.assert_allclose(s.grid, np.arange(7) * 2.0 / 7)
    with pytest.raises(ValueError):
        CircleSpace(0.0, 3)


def test_momentum_eigenstates():
    s = CircleSpace(2.5, 4)
    c1, c2 = momentum_eigenstate(s, 1).vector, momentum_eigenstate(s, 2).vector
    assert np.vdot(c1, c1) == pytest.approx(2.5)
    assert np.vdot(c1, c2) == 0
    e = c1 / math.sqrt(2.5)
    assert np.count_nonzero(e) == 1 and e[theta(1) - 1] == pytest.approx(1.0)
    with pytest.raises(IndexOutOfRange):
        momentum_eigenstate(s, 5)


def test_delta_norm_and_coefficients():
    s = CircleSpace(2.0, 5)
    d = position_eigenstate(s, 0.3).vector
    assert np.vdot(d, d).real == pytest.approx(5.5, rel=1e-14)
    for n in range(-5, 6):
        # coefficient on the theta(n)-th basis vector carries exp(+i 2 pi n x / L)
        assert d[theta(n) - 1] == pytest.approx(chi(n, 0.3, 2.0).conjugate() / math.sqrt(2.0), abs=1e-15)
    np.testing.assert_allclose(position_eigenstate(s, 0.3 + 2.0).vector, d, atol=1e-14)


def test_delta_unbiased_wrt_momenta():
    s = CircleSpace(1.3, 6)
    for x in (0.0, 0.2, 1.1):
        d = position_eigenstate(s, x).vector
        for n in range(-6, 7):
            assert abs(np.vdot(d, momentum_eigenstate(s, n).vector)) == pytest.approx(1.0, abs=1e-14)


def test_delta_orthogonality_on_grid_offsets():
    s = CircleSpace(1.0, 4)
    L, k = s.L, s.kappa
    x = 0.137
    dx = position_eigenstate(s, x).vector
    for j in range(1, k):
        dy = position_eigenstate(s, x + j * L / k).vector
        assert abs(np.vdot(dx, dy)) <= 1e-13
    assert abs(np.vdot(dx, position_eigenstate(s, x + 0.5 * L / k).vector)) > 0.1


# --- delta pairing ---------------------------------------------------------------

def test_delta_pairing_single_plane_wave():
    s = CircleSpace(1.7, 5)
    for d in (-5, 0, 3):
        for x0 in (0.0, 0.4, 1.3):
            got = delta_pairing(s, x0, basis_wave(s, d))
            assert abs(got - chi(d, x0, 1.7) / math.sqrt(1.7)) <= 1e-14


def test_delta_pairing_constant_function():
    for w in (0, 1, 7):
        s = CircleSpace(3.0, w)
        one = {0: math.sqrt(3.0)}  # the function 1 is sqrt(L) e_0
        for x0 in (0.0, 1.234):
            assert delta_pairing(s, x0, one) == pytest.approx(1.0, abs=1e-14)


def test_delta_pairing_trig_polynomial_exact():
    rng = np.random.default_rng(0)
    deg = 4
    coeffs = {n: complex(*rng.standard_normal(2)) for n in range(-deg, deg + 1)}
    for w in (deg, deg + 3, 2 * deg):
        s = CircleSpace(2.0, w)
        for x0 in rng.uniform(0, 2.0, 5):
            assert abs(delta_pairing(s, x0, coeffs) - trig_value(x0, coeffs, 2.0)) <= 1e-10


def test_coefficient_inputs_agree():
    s = CircleSpace(1.0, 2)
    f = {1: 2.0, -2: 1j}
    as_dict = coefficients(s, f)
    np.testing.assert_array_equal(coefficients(s, lambda n: f.get(n, 0)), as_dict)
    np.testing.assert_array_equal(coefficients(s, state(s.obj, as_dict)), as_dict)
    np.testing.assert_array_equal(coefficients(s, list(as_dict)), as_dict)
    with pytest.raises(IndexOutOfRange):
        coefficients(s, [1, 2])


def test_poisson_closed_form():
    # independent oracle: direct long sum of the kernel series
    L, r = 1.5, 0.5
    for x in (0.0, 0.3, 1.0):
        series = sum(r ** abs(n) * chi(n, x, L) for n in range(-80, 81)) / math.sqrt(L)
        assert poisson_value(x, L, r) == pytest.approx(series.real, abs=1e-14)


def test_poisson_pairing_converges_geometrically():
    L, r = 1.0, 0.5
    errs = []
    for w in (4, 8, 16, 32):
        s = CircleSpace(L, w)
        errs.append(abs(delta_pairing(s, 0.0, poisson_coefficients(s, r)) - poisson_value(0.0, L, r)))
        assert errs[-1] == pytest.approx(2 * r ** (w + 1) / ((1 - r) * math.sqrt(L)), rel=1e-5)
    assert all(b <= 0.6 * a for a, b in zip(errs, errs[1:]))
    rep = dirac_sweep([4, 8, 16, 32], L, r)
    assert rep.verdict is Verdict.INFINITESIMAL and rep.fitted_rate < 0


def test_delta_pairing_at_x0_not_at_zero():
    # the pairing reproduces f(x0); f(0) would be wrong for this x0
    s = CircleSpace(1.0, 32)
    got = delta_pairing(s, 0.25, poisson_coefficients(s))
    assert got == pytest.approx(poisson_value(0.25, 1.0), abs=1e-9)
    assert abs(got - poisson_value(0.0, 1.0)) > 1.0


# --- structures -------------------------------------------------------------------

def test_momentum_structure():
    s = CircleSpace(1.0, 4)
    cs = momentum_structure(s)
    assert cs.strictness is Strictness.STRICT
    assert max(check_axioms(cs).values()) <= 1e-12
    e = basis_wave(s, 2)
    np.testing.assert_array_equal((cs.comult @ e).vector, np.kron(e.vector, e.vector))
    assert (cs.counit @ e).mat[0, 0] == 1


@pytest.mark.parametrize("w", [4, 16])
def test_group_algebra(w):
    s = CircleSpace(1.7, w)
    ga = group_algebra(s)
    res = check_axioms(ga)
    assert max(res.values()) <= 1e-12 * s.kappa
    c, r = quasi_speciality(ga)
    assert abs(c - s.kappa) <= 1e-12 * s.kappa and r <= 1e-12 * s.kappa


def test_group_algebra_literal_formula():
    # mu = L^{-3/2} sum |chi_{n+m}><chi_n|<chi_m| from the unnormalised plane waves
    s = CircleSpace(2.3, 2)
    L = s.L
    mu = np.zeros((s.kappa, s.kappa**2), dtype=complex)
    for n in range(-2, 3):
        for m in range(-2, 3):
            cn, cm = momentum_eigenstate(s, n).vector, momentum_eigenstate(s, m).vector
            mu += np.outer(momentum_eigenstate(s, oplus(n, m, 2)).vector, np.kron(cn, cm).conj())
    np.testing.assert_allclose(group_algebra(s).mult.mat, mu / L**1.5, atol=1e-14)
    np.testing.assert_allclose(group_algebra(s).unit.vector, momentum_eigenstate(s, 0).vector / math.sqrt(L))


def test_black_copies_grid_deltas_only():
    s = CircleSpace(1.0, 5)
    ga = group_algebra(s)
    for x in s.grid:
        d = scaled_delta(s, x)
        np.testing.assert_allclose((ga.comult @ d).vector, np.kron(d.vector, d.vector), atol=1e-12)
    d = scaled_delta(s, 0.5 * s.L / s.kappa)
    assert np.abs((ga.comult @ d).vector - np.kron(d.vector, d.vector)).max() > 0.1


# --- observables --------------------------------------------------------------------

@pytest.mark.parametrize("w", [4, 16])
def test_momentum_projectors(w):
    s = CircleSpace(1.4, w)
    total = np.zeros((s.kappa, s.kappa), dtype=complex)
    for n in range(-w, w + 1):
        p = momentum_projector(s, n)
        assert np.abs(p.mat - momentum_projector(s, n, "diagram").mat).max() <= 1e-12
        assert np.abs(p.mat @ p.mat - p.mat).max() <= 1e-12
        assert p == dagger(p)
        total += p.mat
    assert np.linalg.norm(total - np.eye(s.kappa), 2) <= 1e-12
    e1, e2 = basis_wave(s, 1), basis_wave(s, 2)
    np.testing.assert_array_equal((momentum_projector(s, 1) @ e1).vector, e1.vector)
    np.testing.assert_array_equal((momentum_projector(s, 1) @ e2).vector, 0 * e2.vector)


def test_unnormalised_momentum_projector_is_not_idempotent():
    s = CircleSpace(2.0, 3)
    c = momentum_eigenstate(s, 1).vector
    p = np.outer(c, c.conj())
    assert np.abs(p @ p - p).max() == pytest.approx(s.L * (s.L - 1))


@pytest.mark.parametrize("w", [4, 16])
def test_position_projectors(w):
    s = CircleSpace(0.9, w)
    total = np.zeros((s.kappa, s.kappa), dtype=complex)
    for x in s.grid:
        q = position_projector(s, x)
        assert np.abs(q.mat - position_projector(s, x, "diagram").mat).max() <= 1e-12
        assert np.linalg.norm(q.mat @ q.mat - q.mat, 2) <= 1e-12
        assert np.trace(q.mat) == pytest.approx(1.0, abs=1e-13)
        total += q.mat
    assert np.linalg.norm(total - np.eye(s.kappa), 2) <= 1e-12
    q = position_projector(s, 0.123)  # the direct form is a projector anywhere
    assert np.linalg.norm(q.mat @ q.mat - q.mat, 2) <= 1e-12


def test_position_diagram_normalisation():
    s = CircleSpace(1.0, 4)
    x = s.grid[3]
    assert position_copoint_scale(s) == pytest.approx(math.sqrt(s.L) / s.kappa)
    # with copoint scale sqrt(L)/sqrt(kappa) the diagram is sqrt(kappa) Q_x
    cs = group_algebra(s)
    copoint = dagger(position_eigenstate(s, x)) * (math.sqrt(s.L) / math.sqrt(s.kappa))
    m = Wiring(s.kappa).apply(cs.comult, 0).apply(copoint, 1).matrix().toarray()
    np.testing.assert_allclose(m, math.sqrt(s.kappa) * position_projector(s, x).mat, atol=1e-13)
    # off the grid the diagram no longer equals Q_x
    off = 0.5 * s.L / s.kappa
    assert np.abs(position_projector(s, off).mat - position_projector(s, off, "diagram").mat).max() > 1e-3


def test_projector_method_check():
    s = CircleSpace(1.0, 1)
    with pytest.raises(ValueError):
        momentum_projector(s, 0, "bogus")
    with pytest.raises(ValueError):
        position_projector(s, 0.0, "bogus")


def test_integrate():
    s = CircleSpace(2.5, 6)
    assert integrate(s, {0: math.sqrt(2.5)}) == pytest.approx(2.5)
    assert integrate(s, basis_wave(s, 3)) == 0
    rng = np.random.default_rng(1)
    coeffs = {n: complex(*rng.standard_normal(2)) for n in range(-3, 4)}
    xs = np.arange(10_000) * (2.5 / 10_000)
    riemann = sum(trig_value(x, coeffs, 2.5) for x in xs) * (2.5 / 10_000)
    assert abs(integrate(s, coeffs) - riemann) <= 1e-6


def test_dft_unitary():
    for w in (3, 8):
        f = dft_matrix(CircleSpace(1.9, w))
        assert np.linalg.norm(f.conj().T @ f - np.eye(2 * w + 1), 2) <= 1e-12


def test_complementarity_overlaps():
    s = CircleSpace(1.0, 8)
    k = s.kappa
    for x in s.grid[::3]:
        d = position_eigenstate(s, x).vector
        d = d / np.linalg.norm(d)
        for n in range(-8, 9):
            assert abs(abs(np.vdot(d, basis_wave(s, n).vector)) ** 2 - 1 / k) <= 1e-12


# --- translations ------------------------------------------------------------------

def test_momentum_translation():
    s = CircleSpace(1.0, 5)
    assert momentum_translation(s, 0, 0) == 0
    assert momentum_translation(s, 5, 1) == 0
    assert momentum_translation(s, 2, 3) == 0
    mu = group_algebra(s).mult
    lhs = Wiring(s.kappa).apply(basis_wave(s, 5), 0).apply(mu, 0).matrix() @ basis_wave(s, 1).mat
    np.testing.assert_array_equal(np.asarray(lhs).reshape(-1), basis_wave(s, -5).vector)
    with pytest.raises(IndexOutOfRange):
        momentum_translation(s, 6, 0)


def test_position_translation_random_pairs():
    s = CircleSpace(1.3, 16)
    rng = np.random.default_rng(2)
    for x, y in rng.uniform(0, 1.3, (100, 2)):
        assert position_translation(s, x, y) <= 1e-10


def test_translation_is_group_action():
    s = CircleSpace(1.0, 6)
    v = random_state(s, 3)
    x, y = 0.31, 0.87
    np.testing.assert_allclose(translate(s, x, translate(s, y, v)).vector,
                               translate(s, (x + y) % 1.0, v).vector, atol=1e-12)
    np.testing.assert_allclose(translate(s, 0.0, v).vector, v.vector, atol=1e-15)


# --- strong complementarity ---------------------------------------------------------

@pytest.mark.parametrize("w", [4, 16])
def test_strong_complementarity(w):
    res = check_strong_complementarity(CircleSpace(1.0, w))
    assert set(res) == {"bialgebra", "unit_copy", "counit_copy", "weyl_ccr", "weyl_ccr_projector"}
    assert max(res.values()) <= 1e-12


def test_weyl_ccr_phase_convention():
    s = CircleSpace(1.0, 4)
    k = s.kappa
    x = s.L / k
    # traditional projector form: U_x V_n = chi_n(x) V_n U_x with chi_1(L/kappa) = exp(-2 pi i / kappa)
    U = sum(np.exp(2j * np.pi * m * x / s.L) * momentum_projector(s, m).mat for m in range(-4, 5))
    V = sum(np.exp(2j * np.pi * 1 * y / s.L) * position_projector(s, y).mat for y in s.grid)
    phase = np.exp(-2j * np.pi / k)
    assert phase == pytest.approx(chi(1, x, s.L))
    assert np.abs(U @ V - phase * V @ U).max() <= 1e-12
    assert np.abs(U @ V - np.conj(phase) * V @ U).max() > 0.1
    # diagrammatic generators carry the conjugate phase
    W, B = weyl_operators(s)
    j, n_slot = 1, theta(1) - 1
    assert np.abs(W[j] @ B[n_slot] - np.conj(phase) * B[n_slot] @ W[j]).max() <= 1e-12


# --- mixing ---------------------------------------------------------------------------

def test_mixing_plane_wave_and_delta():
    s = CircleSpace(1.0, 8)
    rho, dist = mixing_experiment(s, basis_wave(s, 0))
    assert dist <= 1e-12
    d = position_eigenstate(s, s.grid[5]).vector
    _, dist = mixing_experiment(s, d / np.linalg.norm(d))
    assert dist <= 1e-12
    assert isinstance(rho, Morphism) and rho.dom == s.obj


def test_mixing_random_states():
    s = CircleSpace(1.0, 8)
    for seed in range(5):
        _, dist = mixing_experiment(s, seed=seed)
        assert dist <= 1e-12


def test_mixing_diagonal_oracle():
    # diag of rho' is sum_j |<dhat_j|psi>|^2 / kappa = 1/kappa
    s = CircleSpace(1.0, 3)
    psi = random_state(s, 9).vector
    F = dft_matrix(s)
    rho, _ = mixing_experiment(s, psi)
    oracle = np.sum(np.abs(F.conj().T @ psi) ** 2) / s.kappa
    np.testing.assert_allclose(np.diag(rho.mat).real, oracle, atol=1e-14)


def test_mixing_requires_normalised_state():
    s = CircleSpace(1.0, 2)
    with pytest.raises(NotNormalized):
        mixing_experiment(s, 2 * basis_wave(s, 0))


def test_report_json():
    rep = circle_report(CircleSpace(1.0, 4))
    parsed = json.loads(report_json(rep))
    assert set(parsed) == {"omega", "L", "checks", "verdict"}
    assert parsed["verdict"] == "pass"
    assert report_json(rep) == report_json(circle_report(CircleSpace(1.0, 4)))
