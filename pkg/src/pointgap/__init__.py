"""Point-gap topology of interacting non-Hermitian fermion models.

Exact diagonalization over symmetry sectors, determinant-phase winding
numbers, and skin-effect fragility diagnostics for a two-orbital dot and an
extended asymmetric-hopping chain, driven by a twist angle acting as a
periodic synthetic parameter.
"""

from ._kernels import KERNEL_BACKEND
from .fock import (
    Constraint,
    ModeLayout,
    SectorBasis,
    apply_annihilate,
    apply_create,
    chain_layout,
    dot_layout,
    enumerate_sector,
)
from .models import (
    ChainParams,
    DotParams,
    ManyBodyMatrix,
    build_chain_many_body,
    build_chain_one_body,
    build_dot_many_body,
    build_dot_one_body,
    chain_model,
    chain_sector_basis,
    dot_model,
    dot_sector_basis,
    one_body_sz,
)
from .observables import (
    BoundarySensitivity,
    OccupationProfile,
    boundary_sensitivity,
    occupation_profiles,
    product_state_profiles,
)
from .oracles import (
    CircleFlow,
    chain_first_order_eigenvalues,
    diagonal_flow_winding,
    dot_sector21_eigenvalues,
    dot_sector2m1_eigenvalues,
    eigenvalue_match,
)
from .spectral import (
    EigenSolution,
    SpectralError,
    SpectralFlow,
    SpectrumHitError,
    eigendecompose,
    logdet_phase,
    sweep_deformation,
    sweep_theta,
)
from .topology import (
    GapClosedError,
    SpinSymmetryError,
    SpinWindingResult,
    WindingResult,
    WindingUnresolvedError,
    many_body_winding,
    one_body_winding,
    spin_winding,
)

__version__ = "0.1.0"
