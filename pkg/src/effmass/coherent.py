"""Coherent states of the effective-mass oscillator.

In the mass-weighted coordinate the coherent state is a displaced Gaussian::

    psi_z(x) = (2 pi)^(-1/4) exp(-(|z|^2 - z^2)/2) [2m(x)]^(1/4) exp(-(xbar - 2z)^2 / 4)

Its Fock coefficients are exp(-|z|^2/2) z^n / sqrt(n!), and under the
shifted Hamiltonian (E_n = n + 1/2) it evolves into exp(-it/2) psi_{z exp(-it)}.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, DomainError
from .profiles import MassProfile
from .quad import DEFAULT_CONFIG, QuadConfig, integrate, working_interval
from .states import EIGENSTATE_MAX_LEVEL, Wavefunction, apply_A, apply_Adag, eigenstate

Z_GUARD = 10.0


@dataclass(frozen=True)
class CoherentSpec:
    profile: MassProfile
    z: complex = 0j
    t: float = 0.0

    def __post_init__(self):
        _check_z(self.z)
        if not math.isfinite(self.t):
            raise DomainError(f"time must be finite, got {self.t}")

    def state(self) -> Wavefunction:
        return evolve(self.profile, self.z, self.t) if self.t else coherent_state(self.profile, self.z)


def _check_z(z) -> complex:
    z = complex(z)
    if not (cmath.isfinite(z) and abs(z) <= Z_GUARD):
        raise DomainError(f"|z| must be finite and <= {Z_GUARD}, got {z}")
    return z


def coherent_state(profile: MassProfile, z: complex, phase: complex = 1.0) -> Wavefunction:
    """Coordinate form of D(z)|0>, optionally times a global ``phase``."""
    z = _check_z(z)
    prefactor = complex(phase) * (2 * math.pi) ** -0.25 * cmath.exp(-(abs(z) ** 2 - z * z) / 2)

    def gaussian(x):
        s = profile.xbar(x)
        return s, np.exp(-((s - 2 * z) ** 2) / 4)

    def value(x):
        _, g = gaussian(x)
        return prefactor * np.sqrt(profile.sqrt_mass(x)) * g

    def derivative(x):
        s, g = gaussian(x)
        mu = profile.sqrt_mass(x)
        dmu = profile.dsqrt_mass(x)
        return prefactor * np.sqrt(mu) * g * (0.5 * dmu / mu - 0.5 * (s - 2 * z) * mu)

    label = f"cs(z={z:g})[{profile.describe()}]"
    return Wavefunction(value, derivative, profile, label, normalized=True)


def coherent_coefficients(z: complex, nmax: int) -> np.ndarray:
    """c_n = exp(-|z|^2/2) z^n / sqrt(n!) for n = 0..nmax."""
    if nmax < 0 or int(nmax) != nmax:
        raise CapabilityError(f"nmax must be a non-negative integer, got {nmax}")
    if nmax > EIGENSTATE_MAX_LEVEL:
        raise CapabilityError(f"nmax {nmax} exceeds guard {EIGENSTATE_MAX_LEVEL}")
    z = complex(z)
    c = np.empty(int(nmax) + 1, dtype=complex)
    c[0] = math.exp(-abs(z) ** 2 / 2)
    for n in range(1, int(nmax) + 1):
        c[n] = c[n - 1] * z / math.sqrt(n)
    return c


def fock_tail_bound(z: complex, nmax: int) -> float:
    """Upper bound on sum_{n > nmax} |c_n|^2.

    With N = nmax + 1 and r = |z|^2 the tail is exp(-r) sum_{k>=N} r^k/k!.
    Comparing with a geometric series gives first_term / (1 - r/(N+1)) when
    r < N + 1; otherwise the Lagrange remainder r^N/N! is used.
    """
    r2 = abs(z) ** 2
    if r2 == 0:
        return 0.0
    n = int(nmax) + 1
    log_first = -r2 + n * math.log(r2) - math.lgamma(n + 1)
    if r2 < n + 1:
        return math.exp(log_first) / (1 - r2 / (n + 1))
    return min(1.0, math.exp(log_first + r2))


def fock_superposition(profile: MassProfile, coeffs) -> Wavefunction:
    """sum_n coeffs[n] psi_n with analytic derivative."""
    coeffs = np.asarray(coeffs, dtype=complex)
    levels = [eigenstate(profile, n) for n in range(coeffs.size)]

    def value(x):
        return sum(c * s(x) for c, s in zip(coeffs, levels))

    def derivative(x):
        return sum(c * s.deriv(x) for c, s in zip(coeffs, levels))

    return Wavefunction(value, derivative, profile, f"fock[{coeffs.size}]")


def evolve(profile: MassProfile, z: complex, t: float) -> Wavefunction:
    """exp(-iHt) psi_z for H with spectrum n + 1/2.

    Summing the Fock series level by level gives exp(-it/2) psi_{z exp(-it)};
    the global phase is kept.
    """
    z = _check_z(z)
    t = float(t)
    if t == 0:
        return coherent_state(profile, z)
    state = coherent_state(profile, z * cmath.exp(-1j * t), phase=cmath.exp(-0.5j * t))
    return state.relabel(f"cs(z={z:g}, t={t:g})[{profile.describe()}]")


def mean_xbar(profile: MassProfile, psi: Wavefunction, cfg: QuadConfig | None = None) -> float:
    """<xbar> = integral of xbar(x) |psi(x)|^2."""
    cfg = cfg or DEFAULT_CONFIG
    res = integrate(lambda x: profile.xbar(x) * np.abs(psi(x)) ** 2, cfg, working_interval(cfg, psi))
    return float(res.value)


def quadrature_variances(profile: MassProfile, z: complex,
                         cfg: QuadConfig | None = None) -> tuple[float, float]:
    """Var X and Var Y for X = (A + A^dag)/sqrt2, Y = -i(A - A^dag)/sqrt2.

    Both operators are Hermitian, so <X^2> = ||X psi||^2 and only single
    applications of A and A^dag are needed.
    """
    cfg = cfg or DEFAULT_CONFIG
    psi = coherent_state(profile, z)
    a_psi = apply_A(profile, psi)
    ad_psi = apply_Adag(profile, psi)
    rt2 = math.sqrt(2.0)

    def integrand(x):
        v = psi(x)
        a, ad = a_psi(x), ad_psi(x)
        xv = (a + ad) / rt2
        yv = -1j * (a - ad) / rt2
        return np.stack([np.abs(v) ** 2, np.conj(v) * xv, np.abs(xv) ** 2,
                         np.conj(v) * yv, np.abs(yv) ** 2], axis=-1)

    res = integrate(integrand, cfg, working_interval(cfg, psi))
    n, mx, mx2, my, my2 = res.value
    n = n.real
    var_x = mx2.real / n - (mx.real / n) ** 2
    var_y = my2.real / n - (my.real / n) ** 2
    return float(var_x), float(var_y)
