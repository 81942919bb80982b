"""Coherent states and squeezing for a BenDaniel-Duke effective-mass oscillator."""

__version__ = "0.1.0"

from .coherent import coherent_coefficients, coherent_state, evolve, quadrature_variances
from .errors import (CapabilityError, DiagnosticError, DomainError, EffMassError,
                     NumericalError, StateError)
from .oracle import compare_states, discretize, eigen_lowest
from .profiles import (ConstantMass, CoshMass, MassProfile, RationalMass, TabulatedMass,
                       load_tabulated, make_profile)
from .quad import DEFAULT_CONFIG, MomentReport, QuadConfig, integrate, moments
from .squeeze import SweepSpec, run_sweep, squeezing_params, uncertainty_product
from .states import Wavefunction, apply_A, apply_Adag, eigenstate
from .wigner import wigner_diagnostics, wigner_transform

__all__ = [
    "CapabilityError", "ConstantMass", "CoshMass", "DEFAULT_CONFIG", "DiagnosticError",
    "DomainError", "EffMassError", "MassProfile", "MomentReport", "NumericalError",
    "QuadConfig", "RationalMass", "StateError", "SweepSpec", "TabulatedMass", "Wavefunction",
    "apply_A", "apply_Adag", "coherent_coefficients", "coherent_state", "compare_states",
    "discretize", "eigen_lowest", "eigenstate", "evolve", "integrate", "load_tabulated",
    "make_profile", "moments", "quadrature_variances", "run_sweep", "squeezing_params",
    "uncertainty_product", "wigner_diagnostics", "wigner_transform",
]
