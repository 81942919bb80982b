"""Command-line driver: ``effmass state | sweep | wigner | oracle | verify``.

Every subcommand accepts ``--config FILE`` with ``key = value`` lines whose
keys mirror the long flags (``abs-tol`` or ``abs_tol``); flags given on the
command line win over the file.  Data files never carry timestamps;
``--stamp`` adds a metadata block to the JSON side files.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 numerical
failure.

Examples::

    effmass state --family cosh --alpha 1 --z 0.5 --out cs
    effmass sweep figs/fig1a.spec --out fig1a.csv
    effmass wigner --config figs/fig4a.cfg --out fig4a
    effmass oracle --family rational --alpha 1.2
    effmass verify --module wigner
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, checks, coherent, oracle, quad, squeeze, wigner
from .config import parse_complex, parse_interval, read_keyvalue
from .errors import DiagnosticError, EffMassError, NumericalError, StateError
from .profiles import make_profile

log = logging.getLogger("effmass")

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
FAMILY_CHOICES = ("constant", "cosh", "rational", "tabulated")


class UsageError(Exception):
    pass


def _positive_int(text):
    v = int(text)
    if v <= 0:
        raise ValueError(f"expected a positive integer, got {text!r}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0 or not math.isfinite(v):
        raise ValueError(f"expected a positive number, got {text!r}")
    return v


def _choice(*options):
    def conv(text):
        t = str(text).strip().lower()
        if t not in options:
            raise ValueError(f"expected one of {options}, got {text!r}")
        return t
    conv.__name__ = "choice"
    return conv


# One converter per setting; used for flags and for config-file values alike.
CONVERTERS = {
    "family": _choice(*FAMILY_CHOICES),
    "alpha": float,
    "table": str,
    "z": parse_complex,
    "t": float,
    "abs_tol": _positive_float,
    "rel_tol": _positive_float,
    "max_depth": _positive_int,
    "domain": parse_interval,
    "out": str,
    "format": _choice("csv", "json"),
    "points": _positive_int,
    "layout": _choice("long", "matrix"),
    "x_range": parse_interval,
    "p_range": parse_interval,
    "n": _positive_int,
    "levels": _positive_int,
    "nmax": int,
    "spacing_tol": _positive_float,
    "ground_tol": _positive_float,
    "min_overlap": _positive_float,
}

DEFAULTS = {
    "state": {"family": "cosh", "alpha": 1.0, "z": 0j, "out": "state", "format": "csv", "points": 2401},
    "wigner": {"family": "cosh", "alpha": 1.0, "z": 0j, "out": "wigner", "layout": "long",
               "points": wigner.DEFAULT_POINTS},
    "oracle": {"family": "cosh", "alpha": 1.0, "out": "oracle.json", "n": 3000, "levels": 6,
               "spacing_tol": 2e-3, "ground_tol": 1e-3, "min_overlap": 0.9999},
    "sweep": {"format": "csv"},
    "verify": {},
}


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one invocation (defaults < config file < flags)."""

    command: str
    family: str | None = None
    alpha: float | None = None
    table: str | None = None
    z: complex = 0j
    t: float | None = None
    quad: quad.QuadConfig = quad.DEFAULT_CONFIG
    out: str | None = None
    stamp: bool = False
    options: dict = field(default_factory=dict)

    def profile(self):
        if self.table is not None and not Path(self.table).is_file():
            raise UsageError(f"mass table {self.table!r} does not exist")
        return make_profile(self.family, self.alpha, self.table)


def resolve(args: argparse.Namespace) -> RunConfig:
    settings = dict(DEFAULTS[args.command])
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise UsageError(f"config file {args.config!r} does not exist")
        for key, text in read_keyvalue(path).items():
            if key not in CONVERTERS:
                raise UsageError(f"{path}: unknown key {key!r}")
            try:
                settings[key] = CONVERTERS[key](text)
            except ValueError as exc:
                raise UsageError(f"{path}: bad value for {key!r}: {exc}") from None
    for key in CONVERTERS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value

    base = quad.DEFAULT_CONFIG
    try:
        qcfg = quad.QuadConfig(
            abs_tol=settings.pop("abs_tol", base.abs_tol),
            rel_tol=settings.pop("rel_tol", base.rel_tol),
            max_depth=settings.pop("max_depth", base.max_depth),
            domain=base.domain if args.command == "oracle" else settings.pop("domain", base.domain),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    z = settings.pop("z", 0j)
    if abs(z) > coherent.Z_GUARD:
        raise UsageError(f"|z| = {abs(z):.3g} exceeds the guard {coherent.Z_GUARD}")
    return RunConfig(
        command=args.command,
        family=settings.pop("family", None),
        alpha=settings.pop("alpha", None),
        table=settings.pop("table", None),
        z=z,
        t=settings.pop("t", None),
        quad=qcfg,
        out=settings.pop("out", None),
        stamp=bool(getattr(args, "stamp", False)),
        options=settings,
    )


def _metadata(rc: RunConfig, argv) -> dict:
    return {"version": __version__, "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "argv": list(argv)}


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _profile_block(profile, rc: RunConfig) -> dict:
    return {"family": rc.family, "alpha": rc.alpha, "table": rc.table, "label": profile.describe()}


def _sample_grid(rc: RunConfig, psi) -> np.ndarray:
    a, b = quad.working_interval(rc.quad, psi)
    return np.linspace(a, b, rc.options["points"])


def _write_samples(psi, x, path: Path, fmt: str) -> None:
    if fmt == "csv":
        psi.to_csv(path, x)
        return
    v = psi(x)
    _write_json(path, {"x": x.tolist(), "re": v.real.tolist(), "im": v.imag.tolist()})


def cmd_state(rc: RunConfig, argv) -> int:
    profile = rc.profile()
    psi = coherent.coherent_state(profile, rc.z)
    fmt = rc.options["format"]
    out = Path(rc.out)
    x = _sample_grid(rc, psi)
    _write_samples(psi, x, out.with_name(out.name + "." + fmt), fmt)

    vx, vy = coherent.quadrature_variances(profile, rc.z, rc.quad)
    report = {
        "profile": _profile_block(profile, rc),
        "z": {"re": rc.z.real, "im": rc.z.imag},
        "moments": quad.moments(profile, psi, rc.quad).as_dict(),
        "mean_xbar": coherent.mean_xbar(profile, psi, rc.quad),
        "quadrature_variances": {"X": vx, "Y": vy},
    }
    if rc.t is not None:
        evolved = coherent.evolve(profile, rc.z, rc.t)
        _write_samples(evolved, x, out.with_name(f"{out.name}_t.{fmt}"), fmt)
        dense = np.linspace(x[0], x[-1], 20001)
        peak = float(dense[np.argmax(np.abs(evolved(dense)))])
        report["evolved"] = {
            "t": rc.t,
            "moments": quad.moments(profile, evolved, rc.quad).as_dict(),
            "mean_xbar": coherent.mean_xbar(profile, evolved, rc.quad),
            "expected_mean_xbar": 2 * (rc.z * np.exp(-1j * rc.t)).real,
            "peak_x": peak,
            "peak_xbar": float(profile.xbar(peak)),
        }
    if rc.stamp:
        report["stamp"] = _metadata(rc, argv)
    _write_json(out.with_name(out.name + ".report.json"), report)
    m = report["moments"]
    print(f"{profile.describe()} z={rc.z}: var_x={m['var_x']:.10g} var_p={m['var_p']:.10g} "
          f"product={m['product']:.10g}")
    return EXIT_OK


def cmd_sweep(rc: RunConfig, args, argv) -> int:
    spec = squeeze.load_sweep_spec(args.specfile, allow_complex=True if args.complex else None)
    # tolerance flags override the spec file
    over = {k: getattr(args, k) for k in ("abs_tol", "rel_tol", "max_depth", "domain")
            if getattr(args, k) is not None}
    if over:
        spec = squeeze.SweepSpec(spec.family, spec.alphas, spec.z_values,
                                 quad.QuadConfig(**{**spec.cfg.__dict__, **over}))
    rows = squeeze.run_sweep(spec)
    if rc.options["format"] == "csv":
        text = squeeze.sweep_csv(rows)
    else:
        data = [{"family": r.family, "alpha": r.alpha, "z_re": r.z.real, "z_im": r.z.imag,
                 "report": r.report.as_dict() if r.ok else None, "error": r.error} for r in rows]
        text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if rc.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(rc.out).write_text(text)
        print(f"wrote {len(rows)} rows to {rc.out}", file=sys.stderr)
    failed = sum(not r.ok for r in rows)
    if failed:
        log.error("%d of %d sweep cells failed", failed, len(rows))
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_wigner(rc: RunConfig, argv) -> int:
    profile = rc.profile()
    psi = coherent.coherent_state(profile, rc.z)
    n = rc.options["points"]
    xa, pa = wigner.default_axes(profile, rc.z, n, psi=psi, cfg=rc.quad)
    if "x_range" in rc.options:
        xa = np.linspace(*rc.options["x_range"], n)
    if "p_range" in rc.options:
        pa = np.linspace(*rc.options["p_range"], n)
    grid = wigner.wigner_transform(psi, xa, pa, rc.quad)
    diag = wigner.wigner_diagnostics(grid, psi, rc.quad)

    out = Path(rc.out)
    if rc.options["layout"] == "long":
        grid.to_csv(out.with_name(out.name + ".csv"))
    else:
        grid.to_matrix(out.with_name(out.name + ".mat"))
    payload = {
        "profile": _profile_block(profile, rc),
        "z": {"re": rc.z.real, "im": rc.z.imag},
        "grid": {"x": [float(xa[0]), float(xa[-1]), int(xa.size)],
                 "p": [float(pa[0]), float(pa[-1]), int(pa.size)]},
        "diagnostics": diag.as_dict(),
    }
    if rc.stamp:
        payload["stamp"] = _metadata(rc, argv)
    _write_json(out.with_name(out.name + ".diagnostics.json"), payload)
    print(f"{profile.describe()} z={rc.z}: mass={diag.total_mass:.6f} min W={diag.min_value:.4e} "
          f"at {diag.min_location} negativity={diag.negativity}")
    if diag.flagged_cells:
        log.error("%d Wigner cells did not converge", diag.flagged_cells)
        return EXIT_NUMERIC
    return EXIT_OK


def oracle_checks(report: oracle.SpectrumReport, spacing_tol, ground_tol, min_overlap) -> dict:
    gaps = np.diff(report.eigenvalues)
    spacing = float(np.max(np.abs(gaps - 1))) if gaps.size else 0.0
    ground = abs(float(report.eigenvalues[0]))
    worst = float(report.overlaps.min())
    return {
        "spacing": {"max_deviation": spacing, "tol": spacing_tol, "pass": spacing < spacing_tol},
        "ground": {"abs_energy": ground, "tol": ground_tol, "pass": ground < ground_tol},
        "overlap": {"min": worst, "threshold": min_overlap, "pass": worst > min_overlap},
    }


def cmd_oracle(rc: RunConfig, argv) -> int:
    profile = rc.profile()
    opt = rc.options
    if "domain" in opt:
        a, b = opt["domain"]
    else:
        a, b = (-6.0, 6.0) if rc.family == "cosh" else (-10.0, 10.0)
        pa, pb = profile.domain
        a, b = max(a, pa), min(b, pb)
    levels = opt["levels"]
    nmax = opt.get("nmax", levels - 1)
    if not 0 <= nmax < levels:
        raise UsageError(f"nmax must lie in 0..{levels - 1}")
    report = oracle.eigen_lowest(oracle.discretize(profile, a, b, opt["n"]), levels)
    try:
        report = oracle.compare_states(report, profile, nmax)
    except DiagnosticError as exc:
        log.error("%s", exc)
        return EXIT_VERIFY
    results = oracle_checks(report, opt["spacing_tol"], opt["ground_tol"], opt["min_overlap"])
    payload = report.to_dict()
    payload["profile"] = _profile_block(profile, rc)
    payload["checks"] = results
    if rc.stamp:
        payload["stamp"] = _metadata(rc, argv)
    _write_json(Path(rc.out), payload)
    for name, r in results.items():
        detail = {k: v for k, v in r.items() if k != "pass"}
        print(f"{'PASS' if r['pass'] else 'FAIL'} {name}: {detail}")
    return EXIT_OK if all(r["pass"] for r in results.values()) else EXIT_VERIFY


def cmd_verify(args) -> int:
    if args.list:
        for c in checks.REGISTRY:
            if not args.module or c.module in args.module:
                print(f"{c.module}.{c.name}{' (soft)' if c.soft else ''}")
        return EXIT_OK
    results = checks.run_checks(args.module)
    for r in results:
        print(r.line())
    counts = {s: sum(r.status == s for r in results) for s in ("PASS", "WARN", "FAIL")}
    print(f"{counts['PASS']} passed, {counts['WARN']} warnings, {counts['FAIL']} failed")
    return EXIT_VERIFY if counts["FAIL"] else EXIT_OK


def _add_common(p: argparse.ArgumentParser, profile=True, tolerances=True) -> None:
    p.add_argument("--config", metavar="FILE", help="key = value file; flags override it")
    if profile:
        p.add_argument("--family", type=CONVERTERS["family"], help="constant, cosh, rational or tabulated")
        p.add_argument("--alpha", type=float, help="profile parameter")
        p.add_argument("--table", help="x,two_m CSV for --family tabulated")
    if tolerances:
        p.add_argument("--abs-tol", dest="abs_tol", type=_positive_float)
        p.add_argument("--rel-tol", dest="rel_tol", type=_positive_float)
        p.add_argument("--max-depth", dest="max_depth", type=_positive_int)
        p.add_argument("--domain", type=parse_interval, help="'a,b' integration domain")
    p.add_argument("--stamp", action="store_true", help="add version/time metadata to JSON side files")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="effmass", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", help="sample a coherent state and report its moments")
    _add_common(p)
    p.add_argument("--z", type=parse_complex, help="complex label, e.g. 1+0.5i")
    p.add_argument("--t", type=float, help="also write the state evolved to time t")
    p.add_argument("--points", type=_positive_int, help="number of x samples (default 2401)")
    p.add_argument("--format", type=CONVERTERS["format"], help="csv (default) or json samples")
    p.add_argument("--out", help="output prefix (default 'state')")

    p = sub.add_parser("sweep", help="run a sweep spec file and write its table")
    p.add_argument("specfile")
    _add_common(p, profile=False)
    p.add_argument("--complex", action="store_true", help="allow a z_im grid in the spec")
    p.add_argument("--format", type=CONVERTERS["format"])
    p.add_argument("--out", help="output file (default stdout)")

    p = sub.add_parser("wigner", help="Wigner function of a coherent state")
    _add_common(p)
    p.add_argument("--z", type=parse_complex)
    p.add_argument("--points", type=_positive_int, help=f"grid points per axis (default {wigner.DEFAULT_POINTS})")
    p.add_argument("--x-range", dest="x_range", type=parse_interval)
    p.add_argument("--p-range", dest="p_range", type=parse_interval)
    p.add_argument("--layout", type=CONVERTERS["layout"], help="long (x,p,w rows) or matrix")
    p.add_argument("--out", help="output prefix (default 'wigner')")

    p = sub.add_parser("oracle", help="finite-difference spectrum check")
    _add_common(p, tolerances=False)
    p.add_argument("--domain", type=parse_interval, help="'a,b' Dirichlet box (default by family)")
    p.add_argument("--N", dest="n", type=_positive_int, help="interior nodes (default 3000)")
    p.add_argument("--levels", type=_positive_int, help="number of levels (default 6)")
    p.add_argument("--nmax", type=int, help="highest level compared with the analytic state")
    p.add_argument("--spacing-tol", dest="spacing_tol", type=_positive_float)
    p.add_argument("--ground-tol", dest="ground_tol", type=_positive_float)
    p.add_argument("--min-overlap", dest="min_overlap", type=_positive_float)
    p.add_argument("--out", help="output JSON (default oracle.json)")

    p = sub.add_parser("verify", help="run the invariant battery")
    p.add_argument("--module", action="append", choices=checks.MODULES,
                   help="restrict to one module (repeatable)")
    p.add_argument("--list", action="store_true", help="list checks without running them")
    p.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "verify":
            return cmd_verify(args)
        rc = resolve(args)
        if args.command == "state":
            return cmd_state(rc, argv)
        if args.command == "sweep":
            return cmd_sweep(rc, args, argv)
        if args.command == "wigner":
            return cmd_wigner(rc, argv)
        return cmd_oracle(rc, argv)
    except UsageError as exc:
        print(f"effmass: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, StateError) as exc:
        print(f"effmass: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (EffMassError, OSError) as exc:
        print(f"effmass: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
