"""Analytic eigenstates and the SUSY ladder operators acting on them."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

import numpy as np

from . import profiles
from .errors import CapabilityError
from .profiles import MassProfile
from .quad import stencil_derivative

HERMITE_MAX_ORDER = 200
EIGENSTATE_MAX_LEVEL = 60
STENCIL_STEP = 1e-3
# beyond this Gaussian exponent the envelope is exactly zero in double precision
_ENVELOPE_CUTOFF = 1400.0


@dataclass(frozen=True, eq=False)
class Wavefunction:
    """A position-space state given by vectorized evaluators.

    ``derivative`` is optional; without it :meth:`deriv` falls back to a
    5-point stencil whose step shrinks where the mass is large (the state
    varies on the scale 1/sqrt(2m) there).
    """

    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray] | None = None
    profile: MassProfile | None = None
    label: str = ""
    normalized: bool = False

    def __call__(self, x):
        return self.value(np.asarray(x, dtype=float))

    def stencil_step(self, x):
        x = np.asarray(x, dtype=float)
        if self.profile is None:
            return np.full_like(x, STENCIL_STEP)
        return STENCIL_STEP * np.minimum(1.0, 1.0 / self.profile.sqrt_mass(x))

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        if self.derivative is not None:
            return self.derivative(x)
        return stencil_derivative(self.value, x, self.stencil_step(x))

    def sample(self, x) -> np.ndarray:
        return np.asarray(self(x), dtype=complex)

    def relabel(self, label: str, normalized: bool | None = None) -> "Wavefunction":
        return replace(self, label=label,
                       normalized=self.normalized if normalized is None else normalized)

    # Linear combinations keep analytic derivatives when both sides have them.
    def __add__(self, other: "Wavefunction") -> "Wavefunction":
        f, g = self.value, other.value
        df = dg = None
        if self.derivative is not None and other.derivative is not None:
            df, dg = self.derivative, other.derivative
        return Wavefunction(
            lambda x: f(x) + g(x),
            (lambda x: df(x) + dg(x)) if df is not None else None,
            self.profile or other.profile, f"({self.label} + {other.label})")

    def __mul__(self, c) -> "Wavefunction":
        c = complex(c) if np.iscomplexobj(c) else float(c)
        f, df = self.value, self.derivative
        return Wavefunction(
            lambda x: c * f(x),
            (lambda x: c * df(x)) if df is not None else None,
            self.profile, f"{c}*{self.label}",
            normalized=self.normalized and abs(abs(c) - 1) < 1e-15)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other: "Wavefunction") -> "Wavefunction":
        return self + (-other)

    def to_csv(self, path: str | Path, grid) -> None:
        """Write samples on ``grid`` as ``x,re,im`` rows."""
        grid = np.asarray(grid, dtype=float)
        vals = self.sample(grid)
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "re", "im"])
            for x, v in zip(grid, vals):
                w.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag))])


def hermite(n: int, u):
    """Physicists' Hermite polynomial H_n(u) by the three-term recurrence."""
    if n < 0 or int(n) != n:
        raise CapabilityError(f"Hermite order must be a non-negative integer, got {n}")
    if n > HERMITE_MAX_ORDER:
        raise CapabilityError(f"Hermite order {n} exceeds guard {HERMITE_MAX_ORDER}")
    u = np.asarray(u, dtype=float)
    h_prev, h = np.ones_like(u), 2 * u
    if n == 0:
        return h_prev
    for k in range(1, n):
        h_prev, h = h, 2 * u * h - 2 * k * h_prev
    return h


def _log_norm(n: int) -> float:
    # log of [sqrt(2 pi) 2^n n!]^(-1/2)
    return -0.5 * (0.5 * math.log(2 * math.pi) + n * math.log(2) + math.lgamma(n + 1))


def eigenstate(profile: MassProfile, n: int) -> Wavefunction:
    """Normalized eigenstate psi_n = N_n [2m]^(1/4) exp(-xbar^2/4) H_n(xbar/sqrt2)."""
    if n < 0 or int(n) != n:
        raise CapabilityError(f"level must be a non-negative integer, got {n}")
    if n > EIGENSTATE_MAX_LEVEL:
        raise CapabilityError(f"level {n} exceeds guard {EIGENSTATE_MAX_LEVEL}")
    n = int(n)
    log_norm = _log_norm(n)
    rt2 = math.sqrt(2.0)

    def envelope(s):
        expo = s * s / 4
        env = np.exp(np.where(expo < _ENVELOPE_CUTOFF, log_norm - expo, -np.inf))
        keep = expo < _ENVELOPE_CUTOFF
        return env, keep, np.where(keep, s, 0.0)

    def value(x):
        s = profile.xbar(x)
        env, keep, s = envelope(s)
        out = np.sqrt(profile.sqrt_mass(x)) * env * hermite(n, s / rt2)
        return np.where(keep, out, 0.0)

    def derivative(x):
        s = profile.xbar(x)
        env, keep, s = envelope(s)
        mu = profile.sqrt_mass(x)
        dmu = profile.dsqrt_mass(x)
        h_n = hermite(n, s / rt2)
        h_lower = hermite(n - 1, s / rt2) if n > 0 else np.zeros_like(s)
        g = env * h_n
        dg = env * (-0.5 * s * h_n + rt2 * n * h_lower)
        out = np.sqrt(mu) * (0.5 * dmu / mu * g + mu * dg)
        return np.where(keep, out, 0.0)

    return Wavefunction(value, derivative, profile, f"psi_{n}[{profile.describe()}]", normalized=True)


def apply_A(profile: MassProfile, psi: Wavefunction) -> Wavefunction:
    """(A psi)(x) = psi'(x)/sqrt(2m(x)) + W(x) psi(x)."""

    def value(x):
        return psi.deriv(x) / profile.sqrt_mass(x) + profiles.superpotential(profile, x) * psi(x)

    return Wavefunction(value, None, profile, f"A {psi.label}")


def apply_Adag(profile: MassProfile, psi: Wavefunction) -> Wavefunction:
    """(A^dag psi)(x) = -d/dx[psi/sqrt(2m)] + W psi."""

    def value(x):
        inv, inv1, _ = profiles.inverse_sqrt_mass_derivatives(profile, x)
        v = psi(x)
        return -(psi.deriv(x) * inv + v * inv1) + profiles.superpotential(profile, x) * v

    return Wavefunction(value, None, profile, f"A+ {psi.label}")


def hamiltonian_apply(profile: MassProfile, psi: Wavefunction, shifted: bool = True) -> Wavefunction:
    """H psi with H = A^dag A; ``shifted`` adds psi/2 so that E_n = n + 1/2."""
    out = apply_Adag(profile, apply_A(profile, psi))
    if shifted:
        out = out + 0.5 * psi
    return out.relabel(f"H{'+1/2' if shifted else ''} {psi.label}")
