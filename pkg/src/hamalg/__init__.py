"""Hamiltonian (dynamical Lie) algebras of fermion models mapped to qubits."""

from .cartan import (
    CartanSplit,
    CartanSubalgebra,
    KHKConfig,
    KHKResult,
    cartan_subalgebra,
    fast_forward_evolve,
    k_dimension_report,
    khk_decompose,
    split_by_involution,
)
from .closure import (
    LieBasis,
    contains,
    lie_closure,
    lower_bound_interacting,
    upper_bound_free,
)
from .models import (
    FermionModel,
    HoppingGraph,
    SiteOrdering,
    build_aim,
    build_free,
    build_hubbard,
    build_isolated_impurity,
    build_single_site_coulomb,
    build_x_only,
    jw_transform,
    orbital_rotated_transform,
)
from .operators import PauliSum, QubitHamiltonian
from .pauli import PauliString, PauliTerm, commutator, commutes, multiply

__version__ = "0.1.0"

__all__ = [
    "CartanSplit",
    "CartanSubalgebra",
    "FermionModel",
    "HoppingGraph",
    "KHKConfig",
    "KHKResult",
    "LieBasis",
    "PauliString",
    "PauliSum",
    "PauliTerm",
    "QubitHamiltonian",
    "SiteOrdering",
    "build_aim",
    "build_free",
    "build_hubbard",
    "build_isolated_impurity",
    "build_single_site_coulomb",
    "build_x_only",
    "cartan_subalgebra",
    "commutator",
    "commutes",
    "contains",
    "fast_forward_evolve",
    "jw_transform",
    "k_dimension_report",
    "khk_decompose",
    "lie_closure",
    "lower_bound_interacting",
    "multiply",
    "orbital_rotated_transform",
    "split_by_involution",
    "upper_bound_free",
]
