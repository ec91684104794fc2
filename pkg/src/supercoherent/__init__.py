"""Design and verification of supercoherent logical qubits on Heisenberg spin clusters."""

__version__ = "0.1.0"

from .design import (
    SqLayout,
    correct_coupling,
    energy_gap,
    j56_closed_form,
    min_attachment,
    rhombus_layout,
    solve_mediator_coupling,
    reference_layout,
)
from .eigen import SpectrumResult, degeneracy_groups, full_spectrum, lowest_k
from .spin import (
    CouplingGraph,
    build_basis,
    full_basis,
    heisenberg_matrix,
    total_spin_squared_expectation,
    zeeman_matrix,
)

__all__ = [
    "CouplingGraph",
    "SpectrumResult",
    "SqLayout",
    "build_basis",
    "correct_coupling",
    "degeneracy_groups",
    "energy_gap",
    "full_basis",
    "full_spectrum",
    "heisenberg_matrix",
    "j56_closed_form",
    "lowest_k",
    "min_attachment",
    "rhombus_layout",
    "solve_mediator_coupling",
    "reference_layout",
    "total_spin_squared_expectation",
    "zeeman_matrix",
]
