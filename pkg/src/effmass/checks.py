"""Invariant battery behind ``effmass verify``.

Each check belongs to one module and returns ``(status, detail)`` where
status is True/False (PASS/FAIL) or one of the strings "PASS", "WARN",
"FAIL".  Checks registered with ``soft=True`` never FAIL: a failure is
downgraded to WARN.  They cover claims whose truth depends on the
undetermined variance/stddev meaning of Delta.
"""
from __future__ import annotations

import math
import traceback
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import coherent, oracle, profiles, quad, squeeze, states, wigner
from .profiles import ConstantMass, CoshMass, RationalMass

MODULES = ("profiles", "states", "coherent", "quad", "squeeze", "wigner", "oracle")


@dataclass(frozen=True)
class Check:
    module: str
    name: str
    fn: Callable[[], tuple]
    soft: bool = False


@dataclass(frozen=True)
class CheckResult:
    module: str
    name: str
    status: str
    detail: str

    def line(self) -> str:
        return f"{self.status:<4} {self.module}.{self.name}: {self.detail}"


REGISTRY: list[Check] = []


def check(module: str, name: str, soft: bool = False):
    def deco(fn):
        REGISTRY.append(Check(module, name, fn, soft))
        return fn
    return deco


def run_checks(modules=None) -> list[CheckResult]:
    selected = set(modules) if modules else set(MODULES)
    unknown = selected - set(MODULES)
    if unknown:
        raise ValueError(f"unknown module(s): {sorted(unknown)}")
    out = []
    for c in REGISTRY:
        if c.module not in selected:
            continue
        try:
            status, detail = c.fn()
        except Exception as exc:  # a crashing check is a failing check
            status, detail = False, f"{type(exc).__name__}: {exc}"
            detail += " | " + traceback.format_exc(limit=1).strip().splitlines()[-1]
        if not isinstance(status, str):
            status = "PASS" if status else "FAIL"
        if c.soft and status == "FAIL":
            status = "WARN"
        out.append(CheckResult(c.module, c.name, status, detail))
    return out


BUILTINS = (CoshMass(1.0), RationalMass(0.8))
PROBE = np.linspace(-4.0, 4.0, 100)
CFG = quad.DEFAULT_CONFIG


def _rng(seed):
    return np.random.default_rng(seed)


# -- profiles ------------------------------------------------------------------

@check("profiles", "positivity")
def _positivity():
    grid = np.linspace(-12, 12, 10_000)
    fams = [CoshMass(a) for a in (0.5, 1.0, 1.5, 2.0)] + [RationalMass(a) for a in (0.5, 0.8, 1.2, 2.0)]
    worst = min(float(profiles.mass2(p, grid).min()) for p in fams)
    return worst > 0, f"min 2m = {worst:.3e}"


@check("profiles", "monotonicity")
def _monotone():
    grid = np.linspace(-12, 12, 10_000)
    fams = [CoshMass(a) for a in (0.5, 1.0, 1.5, 2.0)] + [RationalMass(a) for a in (0.5, 0.8, 1.2, 2.0)]
    ok = all(np.all(np.diff(profiles.xbar(p, grid)) > 0) for p in fams)
    return ok, "xbar strictly increasing" if ok else "xbar not monotone"


@check("profiles", "round_trip")
def _round_trip():
    x = _rng(1).uniform(-6, 6, 100)
    fams = [ConstantMass(), CoshMass(1.0), CoshMass(1.5), RationalMass(0.8), RationalMass(1.2)]
    err = max(float(np.max(np.abs(profiles.xbar_inverse(p, profiles.xbar(p, x)) - x))) for p in fams)
    return err < 1e-10, f"max |xbar^-1(xbar(x)) - x| = {err:.2e}"


@check("profiles", "degeneration")
def _degeneration():
    x = np.linspace(-6, 6, 100)
    c, tiny, one = ConstantMass(), CoshMass(1e-12), RationalMass(1.0)
    err = max(float(np.max(np.abs(f(tiny, x) - f(c, x))))
              for f in (profiles.mass2, profiles.xbar, profiles.superpotential))
    exact = all(np.array_equal(f(one, x), f(c, x))
                for f in (profiles.mass2, profiles.xbar, profiles.superpotential, profiles.potential_V))
    return err < 1e-10 and exact, f"cosh(1e-12) vs constant: {err:.1e}; rational(1) exact: {exact}"


def commutator_density(profile, x, h=1e-3):
    """2W'/mu - (1/mu)(1/mu)'' with every derivative taken by stencils."""
    w_slope = quad.stencil_derivative(lambda t: profiles.superpotential(profile, t), x, h)
    inv = lambda t: 1.0 / np.sqrt(profiles.mass2(profile, t))
    inv2 = quad.stencil_second_derivative(inv, x, h)
    return 2 * w_slope * inv(x) - inv(x) * inv2


@check("profiles", "commutator")
def _commutator():
    err = max(float(np.max(np.abs(commutator_density(p, PROBE) - 1))) for p in BUILTINS)
    return err < 1e-6, f"max |[A, A+] - 1| = {err:.2e}"


@check("profiles", "partner_shift")
def _partner_shift():
    err = max(float(np.max(np.abs(profiles.partner_potential(p, PROBE) - profiles.potential_V(p, PROBE) - 1)))
              for p in BUILTINS)
    return err < 1e-8, f"max |V~ - V - 1| = {err:.2e}"


# -- states --------------------------------------------------------------------

@check("states", "ladder_algebra")
def _ladder():
    worst = 0.0
    for p in BUILTINS:
        for n in range(6):
            s = states.eigenstate(p, n)
            down = states.apply_A(p, s)
            if n:
                worst = max(worst, quad.l2_distance(down, math.sqrt(n) * states.eigenstate(p, n - 1)))
            else:
                worst = max(worst, math.sqrt(quad.norm_squared(down)))
            up = states.apply_Adag(p, s)
            worst = max(worst, quad.l2_distance(up, math.sqrt(n + 1) * states.eigenstate(p, n + 1)))
    return worst < 1e-6, f"max ladder residual {worst:.2e}"


@check("states", "commutator_action")
def _comm_action():
    worst = 0.0
    for p in BUILTINS:
        for n in range(6):
            s = states.eigenstate(p, n)
            comm = states.apply_A(p, states.apply_Adag(p, s)) - states.apply_Adag(p, states.apply_A(p, s))
            worst = max(worst, quad.l2_distance(comm, s))
    return worst < 1e-6, f"max ||(AA+ - A+A)psi - psi|| = {worst:.2e}"


@check("states", "orthonormality")
def _gram():
    worst = 0.0
    for p in BUILTINS:
        basis = [states.eigenstate(p, n) for n in range(6)]
        for i, a in enumerate(basis):
            for j, b in enumerate(basis[i:], start=i):
                worst = max(worst, abs(quad.inner(a, b) - (i == j)))
    return worst < 1e-7, f"max |G - I| = {worst:.2e}"


@check("states", "isospectral_partner")
def _partner():
    worst = 0.0
    for p in BUILTINS:
        for n in range(4):
            tilde = (1 / math.sqrt(n + 1)) * states.apply_A(p, states.eigenstate(p, n + 1))
            out = states.apply_A(p, states.apply_Adag(p, tilde))
            worst = max(worst, quad.l2_distance(out, (n + 1) * tilde))
    return worst < 1e-5, f"max ||AA+ psi~ - (n+1) psi~|| = {worst:.2e}"


@check("states", "constant_mass_reduction")
def _reduction():
    x = np.linspace(-10, 10, 401)
    err = max(float(np.max(np.abs(states.eigenstate(CoshMass(1e-6), n)(x) - states.eigenstate(ConstantMass(), n)(x))))
              for n in range(4))
    return err < 1e-6, f"max pointwise difference {err:.2e}"


@check("states", "spectrum_shift")
def _spectrum():
    p = CoshMass(1.0)
    worst = 0.0
    for n in range(3):
        s = states.eigenstate(p, n)
        worst = max(worst, quad.l2_distance(states.hamiltonian_apply(p, s, shifted=True), (n + 0.5) * s))
        worst = max(worst, quad.l2_distance(states.hamiltonian_apply(p, s, shifted=False), n * s))
    return worst < 1e-5, f"max ||H psi_n - E_n psi_n|| = {worst:.2e}"


# -- coherent --------------------------------------------------------------------

def _random_z(rng, n, rmax):
    r = rmax * np.sqrt(rng.uniform(0, 1, n))
    th = rng.uniform(0, 2 * math.pi, n)
    return r * np.exp(1j * th)


@check("coherent", "annihilation_eigenstate")
def _annihilation():
    worst = 0.0
    for p in BUILTINS:
        for z in _random_z(_rng(2), 10, 2.0):
            cs = coherent.coherent_state(p, z)
            worst = max(worst, quad.l2_distance(states.apply_A(p, cs), complex(z) * cs))
    return worst < 1e-6, f"max ||A psi_z - z psi_z|| = {worst:.2e}"


@check("coherent", "normalization")
def _cs_norm():
    worst = 0.0
    for p in BUILTINS:
        for z in _random_z(_rng(3), 10, 3.0):
            worst = max(worst, abs(quad.norm_squared(coherent.coherent_state(p, z)) - 1))
    return worst < 1e-8, f"max |norm - 1| = {worst:.2e}"


@check("coherent", "evolution_norm")
def _evo_norm():
    worst = max(abs(quad.norm_squared(coherent.evolve(p, 1 + 0.5j, t)) - 1)
                for p in BUILTINS for t in (0.3, 1.7, 4.0))
    return worst < 1e-8, f"max |norm - 1| = {worst:.2e}"


@check("coherent", "fock_reconstruction")
def _reconstruction():
    rng = _rng(4)
    fams = [CoshMass(1.5), CoshMass(1.0), RationalMass(0.8), RationalMass(1.2), CoshMass(0.5)]
    worst = 0.0
    for p, z in zip(fams, _random_z(rng, 5, 1.5)):
        rebuilt = coherent.fock_superposition(p, coherent.coherent_coefficients(z, 40))
        worst = max(worst, quad.l2_distance(rebuilt, coherent.coherent_state(p, z)))
    return worst < 1e-6, f"max reconstruction residual {worst:.2e}"


@check("coherent", "parameter_flow")
def _flow():
    worst = 0.0
    z, t1, t2 = 0.9 - 0.4j, 0.7, 1.9
    for p in BUILTINS:
        lhs = coherent.evolve(p, z, t1 + t2)
        rhs = complex(np.exp(-0.5j * t1)) * coherent.evolve(p, z * np.exp(-1j * t1), t2)
        worst = max(worst, quad.l2_distance(lhs, rhs))
    return worst < 1e-8, f"||U(t1+t2) - phase U(t2)|| = {worst:.2e}"


@check("coherent", "evolution_vs_fock")
def _evo_fock():
    worst = 0.0
    z = 1.1 - 0.6j
    n = np.arange(41)
    for p in BUILTINS:
        for t in (0.3, 1.7, 2 * math.pi):
            coeffs = coherent.coherent_coefficients(z, 40) * np.exp(-1j * (n + 0.5) * t)
            worst = max(worst, quad.l2_distance(coherent.evolve(p, z, t), coherent.fock_superposition(p, coeffs)))
    return worst < 1e-8, f"max ||evolve - sum c_n exp(-iE_n t) psi_n|| = {worst:.2e}"


@check("coherent", "overlap_law")
def _overlap_law():
    rng = _rng(5)
    worst = 0.0
    for p in BUILTINS:
        z1s, z2s = _random_z(rng, 5, 2.0), _random_z(rng, 5, 2.0)
        for z1, z2 in zip(z1s, z2s):
            ov = quad.inner(coherent.coherent_state(p, z1), coherent.coherent_state(p, z2))
            worst = max(worst, abs(abs(ov) ** 2 - math.exp(-abs(z1 - z2) ** 2)))
    return worst < 1e-7, f"max ||<z1|z2>|^2 - exp(-|z1-z2|^2)| = {worst:.2e}"


@check("coherent", "peak_motion")
def _peak_motion():
    worst = 0.0
    z = 1.2 + 0.4j
    for p in BUILTINS:
        for t in (0.3, 1.7, 2 * math.pi):
            got = coherent.mean_xbar(p, coherent.evolve(p, z, t))
            worst = max(worst, abs(got - 2 * (z * np.exp(-1j * t)).real))
    return worst < 1e-7, f"max |<xbar>(t) - 2 Re(z e^-it)| = {worst:.2e}"


@check("coherent", "quadrature_variances")
def _xy():
    cases = [(CoshMass(1.5), 1.0), (RationalMass(0.8), 2j), (CoshMass(1.0), 0.5 - 0.5j)]
    worst = 0.0
    for p, z in cases:
        vx, vy = coherent.quadrature_variances(p, z)
        worst = max(worst, abs(vx - 0.5), abs(vy - 0.5))
    return worst < 1e-6, f"max |Var - 1/2| = {worst:.2e}"


# -- quad ------------------------------------------------------------------------

def _states_sample():
    for p in (ConstantMass(), CoshMass(1.0), CoshMass(1.5), RationalMass(0.8), RationalMass(1.2)):
        for z in (0.0, 0.5, 1.5 + 0.5j, 3.0):
            yield p, coherent.coherent_state(p, z)
        yield p, states.eigenstate(p, 2)


@check("quad", "heisenberg_bound")
def _heisenberg():
    worst = min(quad.moments(p, s).product for p, s in _states_sample())
    return worst >= 0.25 - 1e-9, f"min var_x var_p = {worst:.10f}"


@check("quad", "p2_by_parts")
def _p2():
    # tolerances well below the 1e-7 target; |psi'|^2 integrates to ~50 for psi_2
    cfg = quad.QuadConfig(abs_tol=1e-12, rel_tol=1e-12)
    worst = 0.0
    for p, s in _states_sample():
        span = quad.working_interval(cfg, s)
        a = quad.integrate(lambda x: np.abs(s.deriv(x)) ** 2, cfg, span).value
        d2 = lambda x: quad.stencil_derivative(s.deriv, x, s.stencil_step(x))
        b = quad.integrate(lambda x: -np.conj(s(x)) * d2(x), cfg, span).value
        worst = max(worst, abs(a - b))
    return worst < 1e-7, f"max |int|psi'|^2 + int psi* psi''| = {worst:.2e}"


@check("quad", "tolerance_stability")
def _stability():
    worst = 0.0
    for p, s in _states_sample():
        r1 = quad.moments(p, s, CFG)
        r2 = quad.moments(p, s, CFG.tightened())
        scale = 10 * max(r1.quad_err, 1e-15)
        for f in ("mean_x", "var_x", "mean_p", "var_p", "product"):
            worst = max(worst, abs(getattr(r1, f) - getattr(r2, f)) / scale)
    return worst < 1, f"max change / (10 x error estimate) = {worst:.3f}"


# -- squeeze ---------------------------------------------------------------------

Z_GRID = tuple(round(0.1 * k, 12) for k in range(1, 31))
_sweep_cache: dict = {}


def sweep(family, alphas):
    key = (family, tuple(alphas))
    if key not in _sweep_cache:
        _sweep_cache[key] = squeeze.run_sweep(squeeze.SweepSpec(family, tuple(alphas), Z_GRID))
    return _sweep_cache[key]


@check("squeeze", "determinism")
def _determinism():
    spec = squeeze.SweepSpec("cosh", (1.5,), Z_GRID[::5])
    a = squeeze.sweep_csv(squeeze.run_sweep(spec))
    b = squeeze.sweep_csv(squeeze.run_sweep(spec))
    return a == b, "identical CSV bytes" if a == b else "CSV differs between runs"


@check("squeeze", "uncertainty_bound")
def _bound():
    rows = sweep("cosh", (1.0, 1.5)) + sweep("rational", (0.8, 1.2))
    failed = [r for r in rows if not r.ok]
    worst = squeeze.min_product(rows)
    return not failed and worst >= 0.25 - 1e-9, f"{len(rows)} rows, min product {worst:.10f}, {len(failed)} failed"


@check("squeeze", "convention_coherence")
def _coherence():
    rows = sweep("cosh", (1.0, 1.5)) + sweep("rational", (0.8, 1.2))
    bad = 0
    for r in rows:
        rep = r.report
        bad += np.sign(rep.sx_var) != np.sign(rep.var_x - 0.5)
        bad += np.sign(rep.sx_std) != np.sign(math.sqrt(rep.var_x) - 0.5)
        bad += np.sign(rep.sp_var) != np.sign(rep.var_p - 0.5)
        bad += np.sign(rep.sp_std) != np.sign(math.sqrt(rep.var_p) - 0.5)
    return bad == 0, f"{bad} sign mismatches"


@check("squeeze", "degeneration_moments")
def _degenerate_moments():
    worst = 0.0
    for p in (CoshMass(1e-6), RationalMass(1.0)):
        for z in (0.0, 0.7, 2.0):
            rep = quad.moments(p, coherent.coherent_state(p, z))
            want = (2 * z, 1.0, 0.0, 0.25, 0.25)
            got = (rep.mean_x, rep.var_x, rep.mean_p, rep.var_p, rep.product)
            worst = max(worst, max(abs(g - w) for g, w in zip(got, want)))
    return worst < 1e-6, f"max deviation from constant-mass moments {worst:.2e}"


def convention_verdict(rows, wants) -> tuple[str, str]:
    """PASS if every wanted sign holds in both conventions, WARN if in one, FAIL if none.

    ``wants`` maps a quantity ("sx" or "sp") to True for negative, False for positive.
    """
    hits = []
    for conv, suffix in (("variance", "var"), ("stddev", "std")):
        if all(squeeze.sign_matches(rows, f"{q}_{suffix}", neg) for q, neg in wants.items()):
            hits.append(conv)
    status = "PASS" if len(hits) == 2 else "WARN" if hits else "FAIL"
    return status, f"holds under: {', '.join(hits) or 'neither convention'}"


@check("squeeze", "case2_signs")
def _case2():
    return convention_verdict(sweep("rational", (0.8, 1.2)), {"sx": False, "sp": True})


@check("squeeze", "case1_large_z_squeezing")
def _case1_sx():
    rows = [r for r in sweep("cosh", (1.5,)) if r.z.real >= 2.5]
    return convention_verdict(rows, {"sx": True})


@check("squeeze", "case1_no_p_squeezing", soft=True)
def _case1_sp():
    return convention_verdict(sweep("cosh", (1.0, 1.5)), {"sp": False})


@check("squeeze", "case2_sx_positive_variance", soft=True)
def _case2_trend():
    rows = sweep("rational", (0.8, 1.2))
    ok = squeeze.sign_matches(rows, "sx_var", negative=False)
    return ok, "S_x > 0 (variance convention) over the whole sweep" if ok else "S_x changes sign"


# -- wigner ----------------------------------------------------------------------

WIGNER_CASES = {
    "constant z=0": (ConstantMass(), 0.0),
    "constant z=1-0.5i": (ConstantMass(), 1 - 0.5j),
    "cosh 1.2 z=0.2": (CoshMass(1.2), 0.2),
    "rational 0.5 z=1.5": (RationalMass(0.5), 1.5),
}
_wigner_cache: dict = {}


def wigner_case(name):
    if name not in _wigner_cache:
        p, z = WIGNER_CASES[name]
        psi = coherent.coherent_state(p, z)
        xa, pa = wigner.default_axes(p, z, psi=psi)
        grid = wigner.wigner_transform(psi, xa, pa)
        _wigner_cache[name] = (grid, wigner.wigner_diagnostics(grid, psi))
    return _wigner_cache[name]


def _over_cases(fn):
    vals = {name: fn(*wigner_case(name)) for name in WIGNER_CASES}
    return vals


@check("wigner", "realness")
def _w_real():
    worst = max(_over_cases(lambda g, d: d.imag_residue).values())
    return worst < 1e-9, f"max imaginary residue {worst:.2e}"


@check("wigner", "normalization")
def _w_mass():
    worst = max(abs(v - 1) for v in _over_cases(lambda g, d: d.total_mass).values())
    return worst < 1e-3, f"max |mass - 1| = {worst:.2e}"


@check("wigner", "marginal_x")
def _w_marg():
    worst = max(_over_cases(lambda g, d: d.marginal_x_error).values())
    return worst < 1e-4, f"max x-marginal error {worst:.2e}"


@check("wigner", "bound")
def _w_bound():
    worst = max(_over_cases(lambda g, d: d.max_abs).values())
    return worst <= 1 / math.pi + 1e-9, f"max |W| = {worst:.12f} (1/pi = {1 / math.pi:.12f})"


@check("wigner", "gaussian_positivity")
def _w_gauss():
    worst = min(wigner_case(n)[1].min_value for n in ("constant z=0", "constant z=1-0.5i"))
    neg = any(wigner_case(n)[1].negativity for n in ("constant z=0", "constant z=1-0.5i"))
    return worst > -1e-9 and not neg, f"min W = {worst:.2e}"


@check("wigner", "p_symmetry")
def _w_sym():
    worst = max(wigner.p_reflection_asymmetry(wigner_case(n)[0])
                for n in ("constant z=0", "cosh 1.2 z=0.2", "rational 0.5 z=1.5"))
    return worst < 1e-9, f"max |W(x,-p) - W(x,p)| = {worst:.2e}"


@check("wigner", "negativity")
def _w_neg():
    d1 = wigner_case("cosh 1.2 z=0.2")[1]
    d2 = wigner_case("rational 0.5 z=1.5")[1]
    return d1.negativity and d2.negativity, (
        f"min W: cosh {d1.min_value:.3e} (noise {d1.cell_error:.1e}), "
        f"rational {d2.min_value:.3e} (noise {d2.cell_error:.1e})")


# -- oracle ----------------------------------------------------------------------

ORACLE_CASES = {"cosh 1": (CoshMass(1.0), -6.0, 6.0, 3000),
                "rational 1.2": (RationalMass(1.2), -10.0, 10.0, 3000)}
_oracle_cache: dict = {}


def oracle_case(name, k=6):
    if name not in _oracle_cache:
        p, a, b, n = ORACLE_CASES[name]
        rep = oracle.eigen_lowest(oracle.discretize(p, a, b, n), k)
        _oracle_cache[name] = oracle.compare_states(rep, p, k - 1)
    return _oracle_cache[name]


@check("oracle", "unit_spacing")
def _o_spacing():
    worst = max(float(np.max(np.abs(np.diff(oracle_case(n).eigenvalues) - 1))) for n in ORACLE_CASES)
    return worst < 2e-3, f"max |E_(n+1) - E_n - 1| = {worst:.2e}"


@check("oracle", "ground_energy")
def _o_ground():
    worst = max(abs(float(oracle_case(n).eigenvalues[0])) for n in ORACLE_CASES)
    return worst < 1e-3, f"max |E_0| = {worst:.2e}"


@check("oracle", "overlaps")
def _o_overlap():
    worst = min(float(oracle_case(n).overlaps.min()) for n in ORACLE_CASES)
    return worst > 0.9999, f"min overlap {worst:.10f}"


@check("oracle", "orthogonality")
def _o_gram():
    worst = 0.0
    for n in ORACLE_CASES:
        rep = oracle_case(n)
        h = (rep.b - rep.a) / (rep.n + 1)
        gram = h * rep.eigenvectors.T @ rep.eigenvectors
        worst = max(worst, float(np.max(np.abs(gram - np.eye(gram.shape[0])))))
    return worst < 1e-8, f"max |G - I| = {worst:.2e}"


@check("oracle", "convergence_order")
def _o_order():
    errs = []
    for n in (500, 1000, 2000):
        op = oracle.discretize(ConstantMass(), -10.0, 10.0, n)
        errs.append(abs(float(oracle.eigen_lowest(op, 1).eigenvalues[0])))
    ratios = [errs[0] / errs[1], errs[1] / errs[2]]
    ok = all(3.5 < r < 4.5 for r in ratios)
    return ok, f"error ratios {ratios[0]:.3f}, {ratios[1]:.3f}"
