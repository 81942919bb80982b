"""Wigner function of a wavefunction on a phase-space grid.

    W(x, p) = (1/pi) * integral psi*(x - y) exp(2ipy) psi(x + y) dy

Each grid row (fixed x) is one adaptive quadrature over y whose output is the
whole vector of p values.  The y-range is cut where either factor drops below
``SUPPORT_CUTOFF``.  With this kernel sign the p-marginal is |phi(p)|^2 for
phi(p) = (2 pi)^(-1/2) integral psi(x) exp(+ipx) dx, i.e. the momentum
density reflected through p = 0; for real states the two coincide.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, NumericalError
from .profiles import MassProfile
from .quad import DEFAULT_CONFIG, QuadConfig, integrate, working_interval
from .states import Wavefunction

log = logging.getLogger(__name__)

SUPPORT_CUTOFF = 1e-13
COVERAGE_CUTOFF = 1e-10
REALNESS_TOL = 1e-9
BOUND_SLACK = 1e-9
NEGATIVITY_FACTOR = 10.0
DEFAULT_POINTS = 257
X_HALF_WIDTH = 8.0
P_MAX = 6.0
P_LADDER = (6.0, 8.0, 10.0, 12.0, 16.0, 20.0, 24.0, 32.0, 40.0, 48.0)
MOMENTUM_TAIL = 1e-8


@dataclass
class WignerGrid:
    """W sampled on ``x_axis`` x ``p_axis`` (``values[i, j] = W(x_i, p_j)``).

    ``marginal_x_error`` and ``marginal_p_error`` are NaN until
    :func:`wigner_diagnostics` fills them.
    """

    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray
    cell_error: np.ndarray
    flagged: np.ndarray
    imag_residue: float
    total_mass: float = math.nan
    min_value: float = math.nan
    min_location: tuple[float, float] = (math.nan, math.nan)
    marginal_x_error: float = math.nan
    marginal_p_error: float = math.nan

    @property
    def dx(self) -> float:
        return float(self.x_axis[1] - self.x_axis[0])

    @property
    def dp(self) -> float:
        return float(self.p_axis[1] - self.p_axis[0])

    def to_csv(self, path: str | Path) -> None:
        """Long form: one ``x,p,w`` row per cell."""
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "p", "w"])
            for i, x in enumerate(self.x_axis):
                for j, p in enumerate(self.p_axis):
                    w.writerow([repr(float(x)), repr(float(p)), repr(float(self.values[i, j]))])

    def to_matrix(self, path: str | Path) -> None:
        """Header ``# x0 dx nx p0 dp np`` (values), then one line per x."""
        with Path(path).open("w") as fh:
            fh.write("# %r %r %d %r %r %d\n" % (
                float(self.x_axis[0]), self.dx, self.x_axis.size,
                float(self.p_axis[0]), self.dp, self.p_axis.size))
            for row in self.values:
                fh.write(" ".join(repr(float(v)) for v in row) + "\n")


@dataclass(frozen=True)
class WignerDiagnostics:
    total_mass: float
    min_value: float
    min_location: tuple[float, float]
    max_abs: float
    marginal_x_error: float
    marginal_p_error: float
    imag_residue: float
    cell_error: float
    negativity: bool
    bounded: bool
    flagged_cells: int = 0
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["min_location"] = list(self.min_location)
        return d


def momentum_extent(psi: Wavefunction, cfg: QuadConfig | None = None,
                    tail: float = MOMENTUM_TAIL) -> float:
    """Smallest P on ``P_LADDER`` with momentum probability beyond |p| > P below ``tail``.

    Large effective masses make a state narrow in x, so its momentum
    distribution can reach well past |p| = 6.
    """
    top = P_LADDER[-1]
    p = np.linspace(-top, top, 513)
    rho = momentum_density(psi, p, cfg)
    dp = p[1] - p[0]
    for cut in P_LADDER:
        if rho[np.abs(p) > cut].sum() * dp < tail:
            return cut
    return top


def default_axes(profile: MassProfile, z: complex, n: int = DEFAULT_POINTS,
                 psi: Wavefunction | None = None, cfg: QuadConfig | None = None):
    """Default phase-space axes for a coherent state with label ``z``.

    x spans [x_c - 8, x_c + 8] around the peak x_c = xbar^{-1}(2 Re z).
    p spans [-6, 6], widened to :func:`momentum_extent` when ``psi`` is given.
    """
    xc = float(profile.xbar_inverse(2 * complex(z).real))
    p_max = P_MAX if psi is None else max(P_MAX, momentum_extent(psi, cfg))
    return (np.linspace(xc - X_HALF_WIDTH, xc + X_HALF_WIDTH, n),
            np.linspace(-p_max, p_max, n))


def support(psi: Wavefunction, cfg: QuadConfig | None = None, samples: int = 20001):
    """Interval outside of which |psi| < SUPPORT_CUTOFF (on a fine scan)."""
    cfg = cfg or DEFAULT_CONFIG
    a, b = working_interval(cfg, psi)
    xs = np.linspace(a, b, samples)
    big = np.flatnonzero(np.abs(psi(xs)) >= SUPPORT_CUTOFF)
    if big.size == 0:
        raise DomainError("state is negligible everywhere on the working domain")
    step = xs[1] - xs[0]
    return max(a, xs[big[0]] - step), min(b, xs[big[-1]] + step)


def _uniform(axis, name):
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size < 2:
        raise DomainError(f"{name} must have at least two points")
    d = np.diff(axis)
    if np.any(d <= 0) or np.ptp(d) > 1e-9 * abs(d[0]):
        raise DomainError(f"{name} must be uniform and increasing")
    return axis


def wigner_transform(psi: Wavefunction, x_axis, p_axis, cfg: QuadConfig | None = None) -> WignerGrid:
    cfg = cfg or DEFAULT_CONFIG
    x_axis = _uniform(x_axis, "x_axis")
    p_axis = _uniform(p_axis, "p_axis")
    s_lo, s_hi = support(psi, cfg)
    nx, npts = x_axis.size, p_axis.size
    values = np.zeros((nx, npts))
    errors = np.zeros((nx, npts))
    flagged = np.zeros((nx, npts), dtype=bool)
    imag_residue = 0.0
    two_p = 2.0 * p_axis
    # a few GK15 panels per period of exp(2ipy) at the largest |p|
    y_panel = min(0.25, 1.5 / max(np.abs(p_axis).max(), 1e-300))

    for i, x in enumerate(x_axis):
        half = min(s_hi - x, x - s_lo)
        if half <= 0:
            continue

        def integrand(y, x=x):
            g = np.conj(psi(x - y)) * psi(x + y)
            return g[:, None] * np.exp(1j * np.outer(y, two_p))

        panels = max(8, 2 * math.ceil(half / y_panel))
        try:
            res = integrate(integrand, cfg, (-half, half), points=[0.0], panels=panels)
            val, err = res.value, res.error
        except NumericalError as exc:
            log.warning("Wigner row x=%g did not converge: %s", x, exc)
            val, err = exc.estimate, exc.error
            flagged[i] = True
        val = np.asarray(val) / math.pi
        values[i] = val.real
        errors[i] = np.asarray(err) / math.pi
        imag_residue = max(imag_residue, float(np.max(np.abs(val.imag))))

    if imag_residue > REALNESS_TOL:
        log.warning("Wigner imaginary residue %.3e exceeds %.1e", imag_residue, REALNESS_TOL)
    grid = WignerGrid(x_axis, p_axis, values, errors, flagged, imag_residue)
    k = int(np.argmin(values))
    i, j = np.unravel_index(k, values.shape)
    grid.total_mass = float(values.sum() * grid.dx * grid.dp)
    grid.min_value = float(values[i, j])
    grid.min_location = (float(x_axis[i]), float(p_axis[j]))
    return grid


def momentum_density(psi: Wavefunction, p, cfg: QuadConfig | None = None) -> np.ndarray:
    """|phi(p)|^2 for phi(p) = (2 pi)^(-1/2) integral psi(x) exp(+ipx) dx."""
    cfg = cfg or DEFAULT_CONFIG
    p = np.asarray(p, dtype=float)
    res = integrate(lambda x: psi(x)[:, None] * np.exp(1j * np.outer(x, p)),
                    cfg, working_interval(cfg, psi))
    return np.abs(np.asarray(res.value)) ** 2 / (2 * math.pi)


def wigner_diagnostics(grid: WignerGrid, psi: Wavefunction,
                       cfg: QuadConfig | None = None) -> WignerDiagnostics:
    """Mass, marginals, bound and negativity of a computed grid.

    The x axis must reach where |psi|^2 < ``COVERAGE_CUTOFF``.  Also stores
    the marginal errors on ``grid``.
    """
    cfg = cfg or DEFAULT_CONFIG
    ends = np.abs(psi(grid.x_axis[[0, -1]])) ** 2
    if np.any(ends >= COVERAGE_CUTOFF):
        raise DomainError(f"x grid does not cover the state: |psi|^2 at the ends is {ends.max():.2e}")
    rho_x = np.abs(psi(grid.x_axis)) ** 2
    marg_x = np.max(np.abs(grid.values.sum(axis=1) * grid.dp - rho_x))
    rho_p = momentum_density(psi, grid.p_axis, cfg)
    marg_p = np.max(np.abs(grid.values.sum(axis=0) * grid.dx - rho_p))
    grid.marginal_x_error = float(marg_x)
    grid.marginal_p_error = float(marg_p)

    cell_err = float(grid.cell_error.max())
    max_abs = float(np.max(np.abs(grid.values)))
    return WignerDiagnostics(
        total_mass=grid.total_mass,
        min_value=grid.min_value,
        min_location=grid.min_location,
        max_abs=max_abs,
        marginal_x_error=float(marg_x),
        marginal_p_error=float(marg_p),
        imag_residue=grid.imag_residue,
        cell_error=cell_err,
        negativity=bool(grid.min_value < -NEGATIVITY_FACTOR * cell_err),
        bounded=bool(max_abs <= 1 / math.pi + BOUND_SLACK),
        flagged_cells=int(grid.flagged.sum()),
    )


def p_reflection_asymmetry(grid: WignerGrid) -> float:
    """max |W(x, -p) - W(x, p)|, meaningful for a p axis symmetric about 0."""
    if not np.allclose(grid.p_axis, -grid.p_axis[::-1], atol=1e-12):
        raise DomainError("p axis is not symmetric about 0")
    return float(np.max(np.abs(grid.values - grid.values[:, ::-1])))
