"""Reductions to standard form and the determining systems they produce."""

from .involutive import Inconclusive, InvolutiveFamily, involutive_family
from .ode2 import (
    Classification,
    PiCombo,
    StandardBasisResult,
    SymmetryCheck,
    determining_ode2,
    evolutionary_restriction_ode2,
    ode2_diffiety,
    standard_basis_ode2,
    symmetry_check_ode2,
    variation_solution_ode2,
)
from .pde1 import PdeReduction, determining_pde1, pde1_diffiety, reduce_pde1, variation_requirement_pde1
from .systems import DeterminingSystem, Equation, PivotError
from .trivial import (
    PencilCheck,
    Preserved,
    Violated,
    filtration_basis,
    order_preservation_check,
    pencil_candidate_check,
    pencil_conditions_m2,
)

__all__ = [
    "Classification",
    "DeterminingSystem",
    "Equation",
    "Inconclusive",
    "InvolutiveFamily",
    "PdeReduction",
    "PencilCheck",
    "PiCombo",
    "PivotError",
    "Preserved",
    "StandardBasisResult",
    "SymmetryCheck",
    "Violated",
    "determining_ode2",
    "determining_pde1",
    "evolutionary_restriction_ode2",
    "filtration_basis",
    "involutive_family",
    "ode2_diffiety",
    "order_preservation_check",
    "pde1_diffiety",
    "pencil_candidate_check",
    "pencil_conditions_m2",
    "reduce_pde1",
    "standard_basis_ode2",
    "symmetry_check_ode2",
    "variation_requirement_pde1",
    "variation_solution_ode2",
]
