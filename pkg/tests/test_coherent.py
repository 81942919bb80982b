import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from effmass import quad
from effmass.coherent import (CoherentSpec, coherent_coefficients, coherent_state, evolve,
                              fock_superposition, fock_tail_bound, mean_xbar, quadrature_variances)
from effmass.errors import CapabilityError, DomainError
from effmass.profiles import CoshMass, RationalMass
from effmass.states import apply_A, eigenstate

z_strategy = st.builds(lambda r, th: r * cmath.exp(1j * th), st.floats(0, 2), st.floats(0, 2 * math.pi))


def test_z0_is_ground_state(any_profile):
    x = np.linspace(-6, 6, 121)
    assert np.allclose(coherent_state(any_profile, 0)(x), eigenstate(any_profile, 0)(x), atol=1e-15)


def test_normalization_complex_label():
    assert quad.norm_squared(coherent_state(CoshMass(1.0), 1 + 0.5j)) == pytest.approx(1.0, abs=1e-8)


@given(z_strategy)
def test_normalized_for_random_z(z):
    for p in (CoshMass(1.0), RationalMass(0.8)):
        assert quad.norm_squared(coherent_state(p, z)) == pytest.approx(1.0, abs=1e-8)


@given(z_strategy)
def test_annihilation_eigenstate(z):
    for p in (CoshMass(1.0), RationalMass(0.8)):
        cs = coherent_state(p, z)
        assert quad.l2_distance(apply_A(p, cs), z * cs) < 1e-6


def test_overlap_law_example():
    p = RationalMass(0.8)
    ov = quad.inner(coherent_state(p, 0.5), coherent_state(p, 1.2j))
    assert abs(ov) ** 2 == pytest.approx(math.exp(-abs(0.5 - 1.2j) ** 2), abs=1e-7)


def test_overlap_phase_matches_constant_mass_formula():
    # <z1|z2> = exp(-|z1|^2/2 - |z2|^2/2 + conj(z1) z2)
    p = CoshMass(1.5)
    z1, z2 = 0.3 - 0.4j, -0.6 + 0.9j
    ref = cmath.exp(-abs(z1) ** 2 / 2 - abs(z2) ** 2 / 2 + z1.conjugate() * z2)
    assert abs(quad.inner(coherent_state(p, z1), coherent_state(p, z2)) - ref) < 1e-8


def test_coefficients():
    c = coherent_coefficients(0, 5)
    assert c[0] == 1 and np.all(c[1:] == 0)
    c = coherent_coefficients(1.0, 30)
    assert np.sum(np.abs(c) ** 2) == pytest.approx(1.0, abs=1e-12)
    c = coherent_coefficients(0.7 + 0.2j, 6)
    n = np.arange(7)
    ref = np.exp(-abs(0.7 + 0.2j) ** 2 / 2) * (0.7 + 0.2j) ** n / np.sqrt([math.factorial(k) for k in n])
    assert np.allclose(c, ref, atol=1e-15)
    with pytest.raises(CapabilityError):
        coherent_coefficients(1.0, 61)


@given(st.floats(0.1, 3.0), st.integers(0, 40))
def test_tail_bound(r, nmax):
    c = coherent_coefficients(r, 60)
    tail = np.sum(np.abs(c[nmax + 1:]) ** 2)
    assert tail <= fock_tail_bound(r, nmax) * (1 + 1e-9) + 1e-300


def test_fock_reconstruction_example():
    p, z = CoshMass(1.5), 0.8
    rebuilt = fock_superposition(p, coherent_coefficients(z, 40))
    assert quad.l2_distance(rebuilt, coherent_state(p, z)) < 1e-6


def test_projections_match_coefficients(builtin):
    # <psi_n | psi_z> by quadrature against the closed-form coefficients
    z = 0.9 + 0.3j
    cs = coherent_state(builtin, z)
    proj = [quad.inner(eigenstate(builtin, n), cs) for n in range(8)]
    assert np.allclose(proj, coherent_coefficients(z, 7), atol=1e-9)


def test_evolve_identity_and_period():
    p = CoshMass(1.0)
    x = np.linspace(-4, 4, 81)
    assert np.array_equal(evolve(p, 0.7, 0.0)(x), coherent_state(p, 0.7)(x))
    ratio = evolve(p, 0.7, 2 * math.pi)(x) / coherent_state(p, 0.7)(x)
    assert np.allclose(ratio, -1, atol=1e-10)


@pytest.mark.parametrize("t", [0.0, 1.0, 2.5])
def test_peak_motion(t):
    p = CoshMass(1.0)
    assert mean_xbar(p, evolve(p, 1.0, t)) == pytest.approx(2 * math.cos(t), abs=1e-7)


@pytest.mark.parametrize("t", [0.3, 1.7, 4.0])
def test_evolution_preserves_norm(builtin, t):
    assert quad.norm_squared(evolve(builtin, 1.2 - 0.3j, t)) == pytest.approx(1.0, abs=1e-8)


def test_evolution_vs_fock_phases(builtin):
    z, t = 1.1 - 0.6j, 1.7
    n = np.arange(41)
    coeffs = coherent_coefficients(z, 40) * np.exp(-1j * (n + 0.5) * t)
    assert quad.l2_distance(evolve(builtin, z, t), fock_superposition(builtin, coeffs)) < 1e-8


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_parameter_flow(t1, t2):
    p, z = RationalMass(0.8), 0.9 - 0.4j
    lhs = evolve(p, z, t1 + t2)
    rhs = cmath.exp(-0.5j * t1) * evolve(p, z * cmath.exp(-1j * t1), t2)
    assert quad.l2_distance(lhs, rhs) < 1e-8


@pytest.mark.parametrize("p,z", [(CoshMass(1.5), 1.0), (RationalMass(0.8), 2j), (CoshMass(1.0), 0.4 - 1.1j)])
def test_quadrature_variances(p, z):
    vx, vy = quadrature_variances(p, z)
    assert vx == pytest.approx(0.5, abs=1e-6)
    assert vy == pytest.approx(0.5, abs=1e-6)
    assert vx * vy == pytest.approx(0.25, abs=1e-6)


def test_guard():
    with pytest.raises(DomainError):
        coherent_state(CoshMass(1.0), 10.5)
    with pytest.raises(DomainError):
        CoherentSpec(CoshMass(1.0), 11j)
    spec = CoherentSpec(CoshMass(1.0), 0.5, 1.0)
    x = np.linspace(-2, 2, 9)
    assert np.allclose(spec.state()(x), evolve(CoshMass(1.0), 0.5, 1.0)(x))
