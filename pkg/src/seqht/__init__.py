"""Sequency-truncated Walsh decompositions for digitized field simulation.

Subpackages cover the sequency-ordered Walsh basis, the digitized single-site
scalar field with its anharmonic Hamiltonians, analytic coefficient bounds,
Trotterized adiabatic state preparation, linear magic, and gate-level circuit
synthesis with two-qubit resource accounting.
"""

from . import circuit, evolution, field, hierarchy, magic, walsh
from .evolution import AspSchedule, fidelity, run_asp, run_asp_exact
from .field import FieldGrid, HamiltonianSpec, build_hamiltonian, ground_state
from .walsh import SequencyOp, WalshSpectrum, decompose, reconstruct, truncate

__version__ = "0.1.0"

__all__ = [
    "walsh",
    "field",
    "hierarchy",
    "evolution",
    "magic",
    "circuit",
    "SequencyOp",
    "WalshSpectrum",
    "decompose",
    "truncate",
    "reconstruct",
    "FieldGrid",
    "HamiltonianSpec",
    "build_hamiltonian",
    "ground_state",
    "AspSchedule",
    "run_asp",
    "run_asp_exact",
    "fidelity",
    "__version__",
]
