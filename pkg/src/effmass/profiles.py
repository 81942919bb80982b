"""Mass profiles and pointwise quantities derived from them.

Every profile describes a positive function ``2m(x)``.  Internally the
square root ``mu(x) = sqrt(2m(x))`` is the primary object: it is the
Jacobian of the mass-weighted coordinate

    xbar(x) = integral_0^x mu(y) dy,

in which the effective-mass oscillator becomes the ordinary one.  The
superpotential is fixed by requiring a unit commutator of the ladder
operators::

    W = ( (1/mu)' + xbar ) / 2

and the potentials of ``H = A^dag A`` and ``H~ = A A^dag`` follow from it.
"""
from __future__ import annotations

import csv
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError, NumericalError

__all__ = [
    "MassProfile", "ConstantMass", "CoshMass", "RationalMass", "TabulatedMass",
    "make_profile", "load_tabulated",
    "mass2", "xbar", "xbar_inverse", "superpotential", "superpotential_slope",
    "potential_V", "partner_potential", "inverse_sqrt_mass_derivatives",
]

INVERSE_TOL = 1e-13


class MassProfile(ABC):
    """Abstract mass profile; subclasses supply ``mu`` and its derivatives."""

    kind: str = ""
    label: str = ""
    alpha: float | None = None

    @property
    def domain(self) -> tuple[float, float]:
        """Interval on which every derived quantity can be evaluated."""
        return (-math.inf, math.inf)

    @property
    def is_even(self) -> bool:
        return True

    @abstractmethod
    def sqrt_mass(self, x):
        """mu(x) = sqrt(2m(x))."""

    @abstractmethod
    def dsqrt_mass(self, x):
        """mu'(x)."""

    @abstractmethod
    def d2sqrt_mass(self, x):
        """mu''(x)."""

    @abstractmethod
    def xbar(self, x):
        """Mass-weighted coordinate, lower limit 0."""

    def mass2(self, x):
        return self.sqrt_mass(x) ** 2

    def xbar_inverse(self, u):
        return _invert_increasing(self.xbar, self.sqrt_mass, u, self.domain)

    def describe(self) -> str:
        return self.label or self.kind


@dataclass(frozen=True)
class ConstantMass(MassProfile):
    label: str = "constant"
    kind = "constant"

    def sqrt_mass(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def dsqrt_mass(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    d2sqrt_mass = dsqrt_mass

    def xbar(self, x):
        return np.asarray(x, dtype=float) * 1.0

    def xbar_inverse(self, u):
        return np.asarray(u, dtype=float) * 1.0


@dataclass(frozen=True)
class CoshMass(MassProfile):
    """2m(x) = cosh^2(alpha x); alpha = 0 is the constant mass."""

    alpha: float = 1.0
    label: str = ""
    kind = "cosh"

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise DomainError("cosh profile needs a finite alpha")
        if not self.label:
            object.__setattr__(self, "label", f"cosh(alpha={self.alpha:g})")

    def sqrt_mass(self, x):
        return np.cosh(self.alpha * np.asarray(x, dtype=float))

    def mass2(self, x):
        return np.cosh(self.alpha * np.asarray(x, dtype=float)) ** 2

    def dsqrt_mass(self, x):
        a = self.alpha
        return a * np.sinh(a * np.asarray(x, dtype=float))

    def d2sqrt_mass(self, x):
        a = self.alpha
        return a * a * np.cosh(a * np.asarray(x, dtype=float))

    def xbar(self, x):
        x = np.asarray(x, dtype=float)
        if self.alpha == 0:
            return x * 1.0
        return np.sinh(self.alpha * x) / self.alpha

    def xbar_inverse(self, u):
        u = np.asarray(u, dtype=float)
        if self.alpha == 0:
            return u * 1.0
        return np.arcsinh(self.alpha * u) / self.alpha


@dataclass(frozen=True)
class RationalMass(MassProfile):
    """2m(x) = ((alpha + x^2) / (1 + x^2))^2 with alpha > 0."""

    alpha: float = 1.0
    label: str = ""
    kind = "rational"

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise DomainError(f"rational profile needs alpha > 0, got {self.alpha}")
        if not self.label:
            object.__setattr__(self, "label", f"rational(alpha={self.alpha:g})")

    def sqrt_mass(self, x):
        x2 = np.asarray(x, dtype=float) ** 2
        return (self.alpha + x2) / (1.0 + x2)

    def dsqrt_mass(self, x):
        x = np.asarray(x, dtype=float)
        return 2 * (1 - self.alpha) * x / (1 + x * x) ** 2

    def d2sqrt_mass(self, x):
        x2 = np.asarray(x, dtype=float) ** 2
        return 2 * (1 - self.alpha) * (1 - 3 * x2) / (1 + x2) ** 3

    def xbar(self, x):
        x = np.asarray(x, dtype=float)
        return x + (self.alpha - 1) * np.arctan(x)

    def xbar_inverse(self, u):
        u = np.asarray(u, dtype=float)
        # xbar(x) - x is bounded by |alpha - 1| * pi / 2
        spread = abs(self.alpha - 1) * math.pi / 2 + 1e-12
        return _newton_bisect(self.xbar, self.sqrt_mass, u, u - spread, u + spread)


@dataclass(frozen=True, eq=False)
class TabulatedMass(MassProfile):
    """Mass given by samples (x, 2m); sqrt(2m) is interpolated monotonically.

    The sample range must contain 0, the lower limit of ``xbar``.
    Derivatives of ``mu`` use centred 5-point stencils with step
    ``1e-4 * (1 + |x|)``.
    """

    x: np.ndarray = field(default_factory=lambda: np.array([]))
    two_m: np.ndarray = field(default_factory=lambda: np.array([]))
    label: str = "tabulated"
    kind = "tabulated"

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        m = np.asarray(self.two_m, dtype=float)
        if x.ndim != 1 or x.shape != m.shape or x.size < 4:
            raise DomainError("tabulated profile needs at least 4 (x, 2m) pairs")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(m))):
            raise DomainError("tabulated profile contains non-finite samples")
        if np.any(np.diff(x) <= 0):
            raise DomainError("tabulated x values must be strictly increasing")
        if np.any(m <= 0):
            raise DomainError("tabulated 2m values must be positive")
        if not x[0] < 0 < x[-1]:
            raise DomainError("tabulated range must contain x = 0 in its interior")
        interp = PchipInterpolator(x, np.sqrt(m), extrapolate=False)
        anti = interp.antiderivative()
        offset = float(anti(0.0))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "two_m", m)
        object.__setattr__(self, "_mu", interp)
        object.__setattr__(self, "_xbar", lambda t: anti(t) - offset)

        probe = np.linspace(x[0], x[-1], 10_000)
        if not np.all(self._mu(probe) > 0):
            raise DomainError("interpolated mass is not positive on the table range")
        if np.any(np.diff(self._xbar(probe)) <= 0):
            raise DomainError("xbar is not strictly increasing on the table range")

    @property
    def is_even(self) -> bool:
        return bool(np.allclose(self.x, -self.x[::-1]) and np.allclose(self.two_m, self.two_m[::-1]))

    @property
    def domain(self):
        lo, hi = float(self.x[0]), float(self.x[-1])
        return (lo + 5e-3 * (1 + abs(lo)), hi - 5e-3 * (1 + abs(hi)))

    def _check(self, x, pad=0.0):
        x = np.asarray(x, dtype=float)
        lo, hi = self.x[0], self.x[-1]
        if np.any(x - pad < lo) or np.any(x + pad > hi):
            raise DomainError(f"x outside tabulated range [{lo}, {hi}]")
        return x

    def sqrt_mass(self, x):
        return self._mu(self._check(x))

    def _step(self, x):
        return 1e-4 * (1 + np.abs(x))

    def dsqrt_mass(self, x):
        x = np.asarray(x, dtype=float)
        h = self._step(x)
        self._check(x, 2 * h)
        from .quad import stencil_derivative
        return stencil_derivative(self._mu, x, h)

    def d2sqrt_mass(self, x):
        x = np.asarray(x, dtype=float)
        h = self._step(x)
        self._check(x, 2 * h)
        from .quad import stencil_second_derivative
        return stencil_second_derivative(self._mu, x, h)

    def xbar(self, x):
        return self._xbar(self._check(x))

    def xbar_inverse(self, u):
        u = np.asarray(u, dtype=float)
        lo, hi = float(self.x[0]), float(self.x[-1])
        ulo, uhi = float(self._xbar(lo)), float(self._xbar(hi))
        if np.any(u < ulo) or np.any(u > uhi):
            raise NumericalError(f"u outside the tabulated xbar range [{ulo}, {uhi}]")
        return _newton_bisect(self.xbar, self.sqrt_mass, u,
                              np.full_like(u, lo), np.full_like(u, hi))


def make_profile(family: str, alpha: float | None = None, table: str | Path | None = None) -> MassProfile:
    """Build a profile from a family name as used on the command line."""
    family = family.lower()
    if family == "constant":
        return ConstantMass()
    if family in ("cosh", "rational"):
        if alpha is None:
            raise DomainError(f"family {family!r} needs alpha")
        return CoshMass(float(alpha)) if family == "cosh" else RationalMass(float(alpha))
    if family == "tabulated":
        if table is None:
            raise DomainError("family 'tabulated' needs a table path")
        return load_tabulated(table)
    raise DomainError(f"unknown mass family {family!r}")


def load_tabulated(path: str | Path, label: str | None = None) -> TabulatedMass:
    """Read a two-column ``x,two_m`` CSV (header optional)."""
    path = Path(path)
    xs, ms = [], []
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if len(row) != 2:
                raise DomainError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            if lineno == 1 and row[0].strip() == "x":
                continue
            try:
                x, m = float(row[0]), float(row[1])
            except ValueError:
                raise DomainError(f"{path}:{lineno}: cannot parse {row!r} as numbers") from None
            if xs and x <= xs[-1]:
                raise DomainError(f"{path}:{lineno}: x values must be strictly increasing")
            xs.append(x)
            ms.append(m)
    return TabulatedMass(np.array(xs), np.array(ms), label=label or path.stem)


# -- root finding for xbar^{-1} ---------------------------------------------

def _newton_bisect(fn, dfn, u, lo, hi, maxiter=200):
    """Safeguarded Newton for increasing ``fn`` on brackets [lo, hi]."""
    u = np.asarray(u, dtype=float)
    lo = np.array(np.broadcast_to(lo, u.shape), dtype=float)
    hi = np.array(np.broadcast_to(hi, u.shape), dtype=float)
    x = np.clip(u, lo, hi)
    for _ in range(maxiter):
        r = fn(x) - u
        lo = np.where(r <= 0, x, lo)
        hi = np.where(r >= 0, x, hi)
        step = r / dfn(x)
        xn = x - step
        outside = ~((xn > lo) & (xn < hi))
        xn = np.where(outside, 0.5 * (lo + hi), xn)
        converged = np.abs(xn - x) <= INVERSE_TOL * (1 + np.abs(x))
        x = xn
        if np.all(converged | (r == 0)):
            return x
    raise NumericalError("xbar inversion did not converge")


def _invert_increasing(fn, dfn, u, domain):
    u = np.asarray(u, dtype=float)
    lo, hi = u - 1.0, u + 1.0
    for _ in range(200):
        need_lo = fn(lo) > u
        need_hi = fn(hi) < u
        if not (np.any(need_lo) or np.any(need_hi)):
            break
        width = hi - lo
        lo = np.where(need_lo, lo - width, lo)
        hi = np.where(need_hi, hi + width, hi)
        if np.any(lo < domain[0]) or np.any(hi > domain[1]) or not np.all(np.isfinite(width)):
            raise NumericalError("could not bracket xbar inverse")
    else:
        raise NumericalError("could not bracket xbar inverse")
    return _newton_bisect(fn, dfn, u, lo, hi)


# -- module-level operations ------------------------------------------------

def mass2(profile: MassProfile, x):
    """2m(x)."""
    return profile.mass2(x)


def xbar(profile: MassProfile, x):
    return profile.xbar(x)


def xbar_inverse(profile: MassProfile, u):
    return profile.xbar_inverse(u)


def inverse_sqrt_mass_derivatives(profile: MassProfile, x):
    """Return 1/mu, (1/mu)' and (1/mu)''."""
    mu = profile.sqrt_mass(x)
    d1 = profile.dsqrt_mass(x)
    d2 = profile.d2sqrt_mass(x)
    inv = 1.0 / mu
    inv1 = -d1 * inv ** 2
    inv2 = -d2 * inv ** 2 + 2 * d1 * d1 * inv ** 3
    return inv, inv1, inv2


def superpotential(profile: MassProfile, x):
    """W(x) = [ d/dx (1/sqrt(2m)) + xbar(x) ] / 2."""
    _, inv1, _ = inverse_sqrt_mass_derivatives(profile, x)
    return 0.5 * (inv1 + profile.xbar(x))


def superpotential_slope(profile: MassProfile, x):
    """W'(x) = [ (1/mu)'' + mu ] / 2."""
    _, _, inv2 = inverse_sqrt_mass_derivatives(profile, x)
    return 0.5 * (inv2 + profile.sqrt_mass(x))


def potential_V(profile: MassProfile, x):
    """Potential of H = A^dag A: W^2 - (W / mu)'."""
    inv, inv1, _ = inverse_sqrt_mass_derivatives(profile, x)
    w = superpotential(profile, x)
    return w * w - superpotential_slope(profile, x) * inv - w * inv1


def partner_potential(profile: MassProfile, x):
    """Potential of the partner A A^dag: V + 2W'/mu - (1/mu)(1/mu)''."""
    inv, _, inv2 = inverse_sqrt_mass_derivatives(profile, x)
    return potential_V(profile, x) + 2 * superpotential_slope(profile, x) * inv - inv * inv2
