"""Adaptive quadrature, stencil derivatives and physical moments.

The integrator is a globally adaptive 7-point Gauss / 15-point Kronrod rule
that evaluates the integrand on *all* active panels at once, so integrands are
expected to be vectorized: ``f(x)`` receives a 1-D array of abscissae and
returns an array whose leading axis matches ``x``.  Trailing axes are
integrated component-wise, which lets one pass compute several moments (or a
whole row of a Wigner function) together.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import NumericalError, StateError

# QUADPACK qk15 abscissae and weights, positive half (last entry is the centre).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# Gauss weights sit on the odd-indexed Kronrod nodes.
_WG = np.array([
    0.0,
    0.129484966168869693270611432679082,
    0.0,
    0.279705391489276667901467771423780,
    0.0,
    0.381830050505118944950369775488975,
    0.0,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.concatenate([_WG[:-1], _WG[::-1]])


@dataclass(frozen=True)
class QuadConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_depth: int = 48
    domain: tuple[float, float] = (-12.0, 12.0)
    panels: int = 64

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        a, b = self.domain
        if not (math.isfinite(a) and math.isfinite(b) and b > a):
            raise ValueError(f"degenerate quadrature domain {self.domain!r}")
        if self.max_depth < 1 or self.panels < 1:
            raise ValueError("max_depth and panels must be positive")
        object.__setattr__(self, "domain", (float(a), float(b)))

    def tightened(self, factor: float = 0.5) -> "QuadConfig":
        """Copy with both tolerances multiplied by ``factor``."""
        return QuadConfig(self.abs_tol * factor, self.rel_tol * factor,
                          self.max_depth, self.domain, self.panels)


DEFAULT_CONFIG = QuadConfig()


class QuadResult(NamedTuple):
    value: complex | float | np.ndarray
    error: float | np.ndarray
    panels: int


def _gk15(f, lo, hi):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x.ravel()))
    fx = fx.reshape((len(lo), NODES.size) + fx.shape[1:])
    scale = half.reshape((-1,) + (1,) * (fx.ndim - 2))
    kron = np.tensordot(KRONROD_WEIGHTS, fx, axes=([0], [1])) * scale
    gauss = np.tensordot(GAUSS_WEIGHTS, fx, axes=([0], [1])) * scale
    return kron, np.abs(kron - gauss)


def integrate(f: Callable[[np.ndarray], np.ndarray], cfg: QuadConfig | None = None,
              interval: tuple[float, float] | None = None, points=None,
              panels: int | None = None) -> QuadResult:
    """Integrate a vectorized function over ``interval`` (default ``cfg.domain``).

    Panels are bisected until the summed |K15 - G7| estimate meets
    ``max(abs_tol, rel_tol*|I|)`` in every output component.  A panel is
    retired once its own estimate is below its width-proportional share of
    that budget.  ``points`` adds extra initial breakpoints.

    Raises
    ------
    NumericalError
        A panel needs more than ``cfg.max_depth`` bisections.  The exception
        carries the current estimate and error.
    """
    cfg = cfg or DEFAULT_CONFIG
    a, b = interval if interval is not None else cfg.domain
    if not b > a:
        raise ValueError(f"empty integration interval ({a}, {b})")
    edges = np.linspace(a, b, (panels or cfg.panels) + 1)
    if points is not None:
        extra = np.asarray(points, dtype=float).ravel()
        edges = np.unique(np.concatenate([edges, extra[(extra > a) & (extra < b)]]))
    lo, hi = edges[:-1], edges[1:]
    depth = np.zeros(lo.size, dtype=int)
    length = b - a

    done_val = 0.0
    done_err = 0.0
    n_panels = 0
    while True:
        vals, errs = _gk15(f, lo, hi)
        n_panels += lo.size
        estimate = done_val + vals.sum(axis=0)
        error = done_err + errs.sum(axis=0)
        tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(estimate))
        if np.all(error <= tol):
            break
        share = ((hi - lo) / length).reshape((-1,) + (1,) * (errs.ndim - 1)) * tol
        ok = np.all((errs <= share).reshape(lo.size, -1), axis=1)
        done_val = done_val + vals[ok].sum(axis=0)
        done_err = done_err + errs[ok].sum(axis=0)
        bad = ~ok
        if not bad.any():
            break
        if np.any(depth[bad] >= cfg.max_depth):
            raise NumericalError(
                f"quadrature did not converge within max_depth={cfg.max_depth}; "
                f"error estimate {np.max(error):.3e}", estimate=estimate, error=error)
        lo, hi, d = lo[bad], hi[bad], depth[bad] + 1
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        depth = np.concatenate([d, d])

    if np.ndim(estimate) == 0:
        estimate = estimate.item()
        error = float(error)
    return QuadResult(estimate, error, n_panels)


# -- stencils -----------------------------------------------------------------

def stencil_derivative(f, x, h):
    """Centred 5-point first derivative; ``h`` may be an array matching ``x``."""
    x = np.asarray(x, dtype=float)
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def stencil_second_derivative(f, x, h):
    """Centred 5-point second derivative."""
    x = np.asarray(x, dtype=float)
    return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h)
            - f(x + 2 * h)) / (12 * h * h)


# -- inner products -----------------------------------------------------------

EDGE_TOL = 1e-14
EXTEND_STEP = 4.0
EXTEND_LIMIT = 64.0


def working_interval(cfg: QuadConfig, *waves) -> tuple[float, float]:
    """``cfg.domain`` clipped to each wavefunction's profile domain.

    An edge where some wavefunction still has |psi| >= ``EDGE_TOL`` is pushed
    outward in steps of ``EXTEND_STEP`` (up to ``EXTEND_LIMIT`` or the profile
    domain).  A coherent state with large |z| and a light mass can reach past
    the default [-12, 12].
    """
    a, b = cfg.domain
    lo_cap, hi_cap = -EXTEND_LIMIT, EXTEND_LIMIT
    for w in waves:
        prof = getattr(w, "profile", None)
        if prof is not None:
            pa, pb = prof.domain
            a, b = max(a, pa), min(b, pb)
            lo_cap, hi_cap = max(lo_cap, pa), min(hi_cap, pb)
    if not b > a:
        raise StateError("wavefunctions have no common domain")

    def loud(x):
        return any(np.abs(w(np.array([x])))[0] >= EDGE_TOL for w in waves)

    while a > lo_cap and loud(a):
        a = max(a - EXTEND_STEP, lo_cap)
    while b < hi_cap and loud(b):
        b = min(b + EXTEND_STEP, hi_cap)
    return a, b


def inner(phi, psi, cfg: QuadConfig | None = None) -> complex:
    """<phi, psi> = integral of conj(phi) * psi."""
    cfg = cfg or DEFAULT_CONFIG
    res = integrate(lambda x: np.conj(phi(x)) * psi(x), cfg, working_interval(cfg, phi, psi))
    return complex(res.value)


def norm_squared(psi, cfg: QuadConfig | None = None) -> float:
    cfg = cfg or DEFAULT_CONFIG
    return float(integrate(lambda x: np.abs(psi(x)) ** 2, cfg, working_interval(cfg, psi)).value)


def l2_distance(phi, psi, cfg: QuadConfig | None = None) -> float:
    cfg = cfg or DEFAULT_CONFIG
    res = integrate(lambda x: np.abs(phi(x) - psi(x)) ** 2, cfg, working_interval(cfg, phi, psi))
    return math.sqrt(max(res.value, 0.0))


# -- moments ------------------------------------------------------------------

@dataclass(frozen=True)
class MomentReport:
    """Position/momentum moments of a state plus both squeezing conventions.

    ``sx_var``/``sp_var`` use S = 2*variance - 1, ``sx_std``/``sp_std`` use
    S = 2*std - 1.  ``quad_err`` bounds the quadrature error of every field
    above it.
    """

    mean_x: float
    var_x: float
    mean_p: float
    var_p: float
    product: float
    sx_var: float
    sp_var: float
    sx_std: float
    sp_std: float
    quad_err: float = 0.0

    @classmethod
    def from_moments(cls, mean_x, var_x, mean_p, var_p, quad_err=0.0):
        return cls(
            mean_x=mean_x, var_x=var_x, mean_p=mean_p, var_p=var_p,
            product=var_x * var_p,
            sx_var=2 * var_x - 1, sp_var=2 * var_p - 1,
            sx_std=2 * math.sqrt(var_x) - 1, sp_std=2 * math.sqrt(var_p) - 1,
            quad_err=quad_err,
        )

    def as_dict(self) -> dict:
        return asdict(self)


NORM_SLACK = 1e-6


def moments(profile, psi, cfg: QuadConfig | None = None) -> MomentReport:
    """Moments of x and of the canonical momentum -i d/dx.

    <p^2> is taken as the integral of |psi'|^2, so only first derivatives
    are needed.  The state is renormalized when its norm is within
    ``NORM_SLACK`` of one.
    """
    cfg = cfg or DEFAULT_CONFIG
    interval = working_interval(cfg, psi)

    def integrand(x):
        v = psi(x)
        d = psi.deriv(x)
        rho = np.abs(v) ** 2
        return np.stack([rho, x * rho, x * x * rho,
                         np.imag(np.conj(v) * d), np.abs(d) ** 2], axis=-1)

    res = integrate(integrand, cfg, interval)
    n, m1, m2, p1, p2 = (float(v) for v in res.value)
    en, e1, e2, ep1, ep2 = (float(e) for e in res.error)
    if abs(n - 1.0) > NORM_SLACK:
        raise StateError(f"state norm {n:.9f} differs from 1 by more than {NORM_SLACK}")
    mean_x = m1 / n
    mean_p = p1 / n
    var_x = m2 / n - mean_x ** 2
    var_p = p2 / n - mean_p ** 2
    if not (var_x > 0 and var_p > 0):
        raise NumericalError(f"non-positive variance (var_x={var_x}, var_p={var_p})")

    err_mx = e1 + abs(mean_x) * en
    err_mp = ep1 + abs(mean_p) * en
    err_vx = e2 + abs(m2) * en + 2 * abs(mean_x) * err_mx
    err_vp = ep2 + abs(p2) * en + 2 * abs(mean_p) * err_mp
    err_prod = var_x * err_vp + var_p * err_vx
    return MomentReport.from_moments(mean_x, var_x, mean_p, var_p,
                                     quad_err=max(err_mx, err_mp, err_vx, err_vp, err_prod))
