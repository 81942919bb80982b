import csv
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.polynomial import hermite as nph

from effmass import quad
from effmass.errors import CapabilityError
from effmass.profiles import ConstantMass, CoshMass, RationalMass
from effmass.states import Wavefunction, apply_A, apply_Adag, eigenstate, hamiltonian_apply, hermite


def test_hermite_hand_values():
    assert hermite(0, 0.37) == 1
    assert hermite(1, 0.3) == pytest.approx(0.6)
    assert hermite(3, 1.5) == pytest.approx(9.0)


@given(st.integers(0, 40), st.floats(-4, 4))
def test_hermite_matches_numpy(n, u):
    ref = nph.hermval(u, [0] * n + [1])
    assert hermite(n, u) == pytest.approx(ref, rel=1e-10, abs=1e-10)


def test_guards():
    with pytest.raises(CapabilityError):
        hermite(201, 0.0)
    with pytest.raises(CapabilityError):
        eigenstate(ConstantMass(), 61)
    with pytest.raises(CapabilityError):
        eigenstate(ConstantMass(), -1)


def test_constant_ground_state_closed_form():
    x = np.linspace(-8, 8, 81)
    ref = (2 * math.pi) ** -0.25 * np.exp(-x * x / 4)
    assert np.allclose(eigenstate(ConstantMass(), 0)(x), ref, atol=1e-15)


def test_constant_states_match_numpy_hermite():
    # independent closed form with a numpy Hermite series and factorials
    x = np.linspace(-7, 7, 57)
    for n in (1, 4, 9):
        norm = (math.sqrt(2 * math.pi) * 2 ** n * math.factorial(n)) ** -0.5
        ref = norm * np.exp(-x * x / 4) * nph.hermval(x / math.sqrt(2), [0] * n + [1])
        assert np.allclose(eigenstate(ConstantMass(), n)(x), ref, atol=1e-13)


def test_high_level_normalized():
    assert quad.norm_squared(eigenstate(ConstantMass(), 60)) == pytest.approx(1.0, abs=1e-8)


def test_cosh_norm_and_orthogonality():
    p = CoshMass(1.0)
    assert quad.norm_squared(eigenstate(p, 0)) == pytest.approx(1.0, abs=1e-8)
    assert abs(quad.inner(eigenstate(p, 0), eigenstate(p, 2))) < 1e-8


def test_gram_matrix(builtin):
    basis = [eigenstate(builtin, n) for n in range(6)]
    gram = np.array([[quad.inner(a, b) for b in basis] for a in basis])
    assert np.max(np.abs(gram - np.eye(6))) < 1e-7


def test_analytic_derivative_matches_stencil(any_profile):
    x = np.linspace(-3, 3, 31)
    for n in (0, 3):
        s = eigenstate(any_profile, n)
        stencil = quad.stencil_derivative(s, x, 1e-4)
        assert np.allclose(s.deriv(x), stencil, atol=1e-8)


def test_vacuum_annihilated(builtin):
    x = np.linspace(-10, 10, 2001)
    assert np.max(np.abs(apply_A(builtin, eigenstate(builtin, 0))(x))) < 1e-8


@pytest.mark.parametrize("n", range(6))
def test_ladder(builtin, n):
    s = eigenstate(builtin, n)
    if n:
        assert quad.l2_distance(apply_A(builtin, s), math.sqrt(n) * eigenstate(builtin, n - 1)) < 1e-6
    up = apply_Adag(builtin, s)
    assert quad.l2_distance(up, math.sqrt(n + 1) * eigenstate(builtin, n + 1)) < 1e-6


def test_adjointness(builtin):
    phi, psi = eigenstate(builtin, 0), eigenstate(builtin, 1)
    lhs = quad.inner(phi, apply_Adag(builtin, psi))
    rhs = quad.inner(apply_A(builtin, phi), psi)
    assert abs(lhs - rhs) < 1e-7


def test_adjointness_on_non_eigenstates(builtin):
    # a Gaussian wave packet unrelated to the ladder structure
    g = Wavefunction(lambda x: np.exp(-(x - 0.3) ** 2) * (1 + 0.5j * x),
                     lambda x: np.exp(-(x - 0.3) ** 2) * (0.5j - 2 * (x - 0.3) * (1 + 0.5j * x)), builtin)
    s = eigenstate(builtin, 2)
    assert abs(quad.inner(g, apply_Adag(builtin, s)) - quad.inner(apply_A(builtin, g), s)) < 1e-7


def test_commutator_on_vacuum(builtin):
    s = eigenstate(builtin, 0)
    comm = apply_A(builtin, apply_Adag(builtin, s)) - apply_Adag(builtin, apply_A(builtin, s))
    assert quad.l2_distance(comm, s) < 1e-6


def test_hamiltonian_conventions():
    p = CoshMass(1.0)
    x = np.linspace(-6, 6, 601)
    assert np.max(np.abs(hamiltonian_apply(p, eigenstate(p, 0), shifted=False)(x))) < 1e-6
    for n in range(3):
        s = eigenstate(p, n)
        assert quad.l2_distance(hamiltonian_apply(p, s), (n + 0.5) * s) < 1e-5
    s2 = eigenstate(p, 2)
    assert quad.l2_distance(hamiltonian_apply(p, s2, shifted=False), 2 * s2) < 1e-5


def test_hamiltonian_matches_sturm_liouville_form(builtin):
    # -d/dx[(1/2m) psi'] + V psi computed with stencils only
    from effmass.profiles import potential_V
    s = eigenstate(builtin, 1)
    x = np.linspace(-3, 3, 41)
    flux = lambda t: s.deriv(t) / builtin.mass2(t)
    direct = -quad.stencil_derivative(flux, x, 1e-4) + potential_V(builtin, x) * s(x)
    assert np.allclose(hamiltonian_apply(builtin, s, shifted=False)(x), direct, atol=1e-6)


def test_isospectral_partner(builtin):
    for n in range(3):
        tilde = (1 / math.sqrt(n + 1)) * apply_A(builtin, eigenstate(builtin, n + 1))
        out = apply_A(builtin, apply_Adag(builtin, tilde))
        assert quad.l2_distance(out, (n + 1) * tilde) < 1e-5


def test_constant_mass_reduction():
    x = np.linspace(-10, 10, 401)
    for n in range(4):
        assert np.max(np.abs(eigenstate(CoshMass(1e-6), n)(x) - eigenstate(ConstantMass(), n)(x))) < 1e-6


def test_boundary_decay(any_profile):
    assert np.all(np.abs(eigenstate(any_profile, 0)(np.array([-12.0, 12.0]))) < 1e-12)
    # higher levels reach further; the working interval widens to cover them
    for n in (5, 20):
        s = eigenstate(any_profile, n)
        a, b = quad.working_interval(quad.DEFAULT_CONFIG, s)
        assert np.all(np.abs(s(np.array([a, b]))) < 1e-12)


def test_arithmetic_keeps_derivatives():
    a, b = eigenstate(ConstantMass(), 0), eigenstate(ConstantMass(), 1)
    s = 2 * a - b
    assert s.derivative is not None
    x = np.linspace(-2, 2, 5)
    assert np.allclose(s.deriv(x), 2 * a.deriv(x) - b.deriv(x))
    assert (-a)(x) == pytest.approx(-a(x))


def test_csv_export(tmp_path):
    path = tmp_path / "psi.csv"
    x = np.linspace(-1, 1, 5)
    eigenstate(RationalMass(0.8), 1).to_csv(path, x)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["x", "re", "im"] and len(rows) == 6
    assert float(rows[3][1]) == pytest.approx(0.0, abs=1e-15)  # odd state at x = 0
