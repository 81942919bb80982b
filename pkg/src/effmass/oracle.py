"""Finite-difference eigensolver for the BenDaniel-Duke equation

    -d/dx[ (1/2m) dpsi/dx ] + V psi = E psi,   psi(a) = psi(b) = 0,

used as an independent check of the analytic spectrum.  It depends only on
the mass profile and the potential V; nothing here touches the ladder
operators or the analytic eigenstates (except :func:`compare_states`, whose
job is to compare against them).

The grid has ``N`` interior nodes ``x_i = a + i h``, ``h = (b - a)/(N + 1)``.
The mass is sampled at half points, which keeps the matrix symmetric.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import CapabilityError, DiagnosticError, NumericalError
from .profiles import MassProfile, potential_V

MAX_LEVELS = 12
MIN_OVERLAP = 0.5
_EPS = np.finfo(float).eps


@dataclass(frozen=True, eq=False)
class DiscreteOperator:
    a: float
    b: float
    n: int
    x: np.ndarray
    diag: np.ndarray
    offdiag: np.ndarray

    @property
    def h(self) -> float:
        return (self.b - self.a) / (self.n + 1)

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def gershgorin(self) -> tuple[float, float]:
        r = np.zeros(self.n)
        r[:-1] += np.abs(self.offdiag)
        r[1:] += np.abs(self.offdiag)
        return float(np.min(self.diag - r)), float(np.max(self.diag + r))


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, normalized so that h * sum(v^2) = 1
    x: np.ndarray
    a: float
    b: float
    n: int
    overlaps: np.ndarray | None = None

    def to_dict(self) -> dict:
        levels = []
        for k, e in enumerate(self.eigenvalues):
            ov = None if self.overlaps is None or k >= self.overlaps.size else float(self.overlaps[k])
            levels.append({"n": k, "energy": float(e), "overlap": ov})
        return {"levels": levels, "grid": {"a": self.a, "b": self.b, "N": self.n}}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def discretize(profile: MassProfile, a: float, b: float, n: int) -> DiscreteOperator:
    if not b > a:
        raise ValueError(f"need b > a, got [{a}, {b}]")
    if n < 3:
        raise ValueError(f"need at least 3 interior nodes, got {n}")
    h = (b - a) / (n + 1)
    x = a + h * np.arange(1, n + 1)
    c_right = 1.0 / (profile.mass2(x + h / 2) * h * h)
    c_left = 1.0 / (profile.mass2(x - h / 2) * h * h)
    diag = potential_V(profile, x) + c_left + c_right
    off = -c_right[:-1]
    if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off))):
        raise NumericalError("discretized operator has non-finite entries")
    return DiscreteOperator(float(a), float(b), int(n), x, diag, off)


def sturm_count(op: DiscreteOperator, lam: float) -> int:
    """Number of eigenvalues strictly below ``lam`` (LDL^T inertia)."""
    d = op.diag.tolist()
    e2 = (op.offdiag ** 2).tolist()
    floor = _EPS * max(1.0, abs(lam))
    count = 0
    q = d[0] - lam
    for i in range(len(d)):
        if i:
            q = d[i] - lam - e2[i - 1] / q
        if q == 0.0:
            q = -floor
        if q < 0:
            count += 1
    return count


def _bisect(op: DiscreteOperator, index: int, lo: float, hi: float) -> float:
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 4 * _EPS * max(abs(lo), abs(hi)) + 1e-300 or mid in (lo, hi):
            break
        if sturm_count(op, mid) > index:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def solve_tridiagonal(sub, diag, sup, rhs) -> np.ndarray:
    """Gaussian elimination with partial pivoting (the LAPACK gtsv scheme).

    Exactly singular pivots are replaced by a tiny number instead of failing,
    which is what inverse iteration wants.
    """
    dl = list(map(float, sub))
    d = list(map(float, diag))
    du = list(map(float, sup))
    b = list(map(float, rhs))
    n = len(d)
    tiny = _EPS * max(1.0, max(abs(v) for v in d))
    dl.append(0.0)
    du.append(0.0)
    du2 = [0.0] * (n + 1)
    for i in range(n - 1):
        if abs(d[i]) >= abs(dl[i]):
            if d[i] == 0.0:
                d[i] = tiny
            fact = dl[i] / d[i]
            d[i + 1] -= fact * du[i]
            b[i + 1] -= fact * b[i]
        else:
            fact = d[i] / dl[i]
            d[i] = dl[i]
            temp = d[i + 1]
            d[i + 1] = du[i] - fact * temp
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du2[i]
            du[i] = temp
            b[i], b[i + 1] = b[i + 1], b[i] - fact * b[i + 1]
    if d[n - 1] == 0.0:
        d[n - 1] = tiny
    b[n - 1] /= d[n - 1]
    if n > 1:
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2]
    for i in range(n - 3, -1, -1):
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i]
    return np.array(b)


def _inverse_iteration(op: DiscreteOperator, lam: float, level: int, maxiter: int = 8) -> np.ndarray:
    rng = np.random.default_rng(1000 + level)
    v = rng.standard_normal(op.n)
    v /= np.linalg.norm(v)
    sub = op.offdiag
    shifted = op.diag - lam
    scale = max(abs(op.gershgorin()[0]), abs(op.gershgorin()[1]), 1.0)
    for _ in range(maxiter):
        w = solve_tridiagonal(sub, shifted, sub, v)
        w /= np.linalg.norm(w)
        if w[np.argmax(np.abs(w))] < 0:
            w = -w
        tv = op.diag * w
        tv[:-1] += op.offdiag * w[1:]
        tv[1:] += op.offdiag * w[:-1]
        residual = np.linalg.norm(tv - lam * w)
        if residual <= 1e3 * _EPS * scale and np.linalg.norm(w - v) < 1e-10:
            return w
        v = w
    if residual <= 1e4 * _EPS * scale:
        return w
    raise NumericalError(f"inverse iteration stagnated for level {level} (residual {residual:.3e})")


def eigen_lowest(op: DiscreteOperator, k: int) -> SpectrumReport:
    """The ``k`` smallest eigenpairs by Sturm bisection and inverse iteration."""
    if not 1 <= k <= MAX_LEVELS:
        raise CapabilityError(f"k must be in 1..{MAX_LEVELS}, got {k}")
    if k > op.n:
        raise CapabilityError(f"k={k} exceeds matrix size {op.n}")
    lo, hi = op.gershgorin()
    values = []
    left = lo
    for j in range(k):
        lam = _bisect(op, j, left, hi)
        values.append(lam)
        left = lam - 4 * _EPS * max(1.0, abs(lam))
    h = op.h
    vecs = np.empty((op.n, k))
    for j, lam in enumerate(values):
        v = _inverse_iteration(op, lam, j)
        vecs[:, j] = v / math.sqrt(h * np.dot(v, v))
    return SpectrumReport(np.array(values), vecs, op.x, op.a, op.b, op.n)


def compare_states(report: SpectrumReport, profile: MassProfile, nmax: int) -> SpectrumReport:
    """Fill |<numeric_n, psi_n>| for n <= nmax, flipping signs to align."""
    from .states import eigenstate

    if report.eigenvalues.size < nmax + 1:
        raise CapabilityError(f"report has {report.eigenvalues.size} levels, need {nmax + 1}")
    h = (report.b - report.a) / (report.n + 1)
    vecs = report.eigenvectors.copy()
    overlaps = np.empty(nmax + 1)
    for n in range(nmax + 1):
        analytic = np.real(eigenstate(profile, n)(report.x))
        # trapezoid on the full grid; the Dirichlet end values are zero
        ov = h * float(np.dot(vecs[:, n], analytic))
        if ov < 0:
            vecs[:, n] *= -1
            ov = -ov
        overlaps[n] = ov
        if ov < MIN_OVERLAP:
            raise DiagnosticError(f"level {n}: overlap {ov:.4f} with the analytic state; grid too coarse?")
    return replace(report, eigenvectors=vecs, overlaps=overlaps)
