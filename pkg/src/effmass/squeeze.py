"""Uncertainty products and squeezing parameters, single points and sweeps.

The squeezing parameter is S = 2*Delta - 1.  Whether Delta denotes a variance
or a standard deviation is left open, so both are always reported.  For the
constant mass the baseline is var_x = 1, var_p = 1/4, i.e.

    variance convention: S_x = 1, S_p = -1/2
    stddev convention:   S_x = 1, S_p = 0
"""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from .coherent import coherent_state
from .config import parse_bool, parse_interval, parse_values, read_keyvalue
from .errors import DomainError, EffMassError
from .profiles import CoshMass, MassProfile, RationalMass
from .quad import DEFAULT_CONFIG, MomentReport, QuadConfig, moments

log = logging.getLogger(__name__)

FAMILIES = ("cosh", "rational")
CONVENTIONS = ("variance", "stddev")
CSV_COLUMNS = ("family", "alpha", "z_re", "z_im", "mean_x", "var_x", "mean_p", "var_p",
               "product", "sx_var", "sp_var", "sx_std", "sp_std", "quad_err")


def uncertainty_product(profile: MassProfile, z: complex, cfg: QuadConfig | None = None) -> float:
    """var_x * var_p of the coherent state with label ``z``."""
    return moments(profile, coherent_state(profile, z), cfg).product


def squeezing_params(profile: MassProfile, z: complex, convention: str = "variance",
                     cfg: QuadConfig | None = None) -> tuple[float, float]:
    """(S_x, S_p) under the chosen meaning of Delta."""
    rep = moments(profile, coherent_state(profile, z), cfg)
    if convention == "variance":
        return rep.sx_var, rep.sp_var
    if convention == "stddev":
        return rep.sx_std, rep.sp_std
    raise DomainError(f"convention must be one of {CONVENTIONS}, got {convention!r}")


@dataclass(frozen=True)
class SweepSpec:
    family: str
    alphas: tuple[float, ...]
    z_values: tuple[complex, ...]
    cfg: QuadConfig = field(default=DEFAULT_CONFIG)

    def __post_init__(self):
        fam = self.family.lower()
        if fam not in FAMILIES:
            raise DomainError(f"sweep family must be one of {FAMILIES}, got {self.family!r}")
        if not self.alphas or not self.z_values:
            raise DomainError("sweep needs at least one alpha and one z")
        if fam == "rational" and any(a <= 0 for a in self.alphas):
            raise DomainError("rational sweeps need alpha > 0")
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "z_values", tuple(complex(z) for z in self.z_values))

    def profile(self, alpha: float) -> MassProfile:
        return CoshMass(alpha) if self.family == "cosh" else RationalMass(alpha)

    def cells(self) -> list[tuple[float, complex]]:
        keys = {(a, z) for a in self.alphas for z in self.z_values}
        return sorted(keys, key=lambda k: (k[0], k[1].real, k[1].imag))


@dataclass(frozen=True)
class SweepRow:
    family: str
    alpha: float
    z: complex
    report: MomentReport | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.report is not None


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """One row per (alpha, z) cell, ordered by (alpha, Re z, Im z).

    A failing cell is logged and kept as a row without a report.
    """
    rows = []
    for alpha, z in spec.cells():
        profile = spec.profile(alpha)
        try:
            rep = moments(profile, coherent_state(profile, z), spec.cfg)
            rows.append(SweepRow(spec.family, alpha, z, rep))
        except EffMassError as exc:
            log.warning("sweep cell %s alpha=%g z=%s failed: %s", spec.family, alpha, z, exc)
            rows.append(SweepRow(spec.family, alpha, z, None, str(exc)))
    return rows


def _fmt(v: float) -> str:
    return repr(float(v))


def sweep_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        head = [r.family, _fmt(r.alpha), _fmt(r.z.real), _fmt(r.z.imag)]
        if r.report is None:
            w.writerow(head + ["nan"] * (len(CSV_COLUMNS) - 4))
            continue
        rep = r.report
        w.writerow(head + [_fmt(getattr(rep, c)) for c in CSV_COLUMNS[4:]])
    return buf.getvalue()


def write_sweep_csv(rows: list[SweepRow], path: str | Path) -> None:
    Path(path).write_text(sweep_csv(rows))


def load_sweep_spec(path: str | Path, allow_complex: bool | None = None) -> SweepSpec:
    """Read a sweep spec file.

    Keys: ``family``, ``alphas``, ``z`` (list or ``start:stop:step``) and
    optionally ``z_im`` (needs ``complex = true``), ``abs_tol``, ``rel_tol``,
    ``max_depth``, ``domain``.
    """
    kv = read_keyvalue(path)
    missing = {"family", "alphas", "z"} - kv.keys()
    if missing:
        raise DomainError(f"{path}: missing keys {sorted(missing)}")
    complex_grid = parse_bool(kv.get("complex", "false")) if allow_complex is None else allow_complex
    z_re = parse_values(kv["z"])
    z_im = parse_values(kv["z_im"]) if "z_im" in kv else [0.0]
    if not complex_grid and any(v != 0 for v in z_im):
        raise DomainError(f"{path}: z_im given but complex sweeps are not enabled")
    base = DEFAULT_CONFIG
    cfg = QuadConfig(
        abs_tol=float(kv.get("abs_tol", base.abs_tol)),
        rel_tol=float(kv.get("rel_tol", base.rel_tol)),
        max_depth=int(kv.get("max_depth", base.max_depth)),
        domain=parse_interval(kv["domain"]) if "domain" in kv else base.domain,
    )
    zs = tuple(complex(r, i) for r in z_re for i in z_im)
    return SweepSpec(kv["family"], tuple(parse_values(kv["alphas"])), zs, cfg)


def sign_matches(rows: list[SweepRow], column: str, negative: bool) -> bool:
    """True when every successful row has the requested strict sign in ``column``."""
    vals = [getattr(r.report, column) for r in rows if r.ok]
    if len(vals) != len(rows):
        return False
    return all((v < 0) if negative else (v > 0) for v in vals)


def min_product(rows: list[SweepRow]) -> float:
    return min((r.report.product for r in rows if r.ok), default=math.nan)
