"""Non-abelian geometric phases on the G(4,2) control manifold.

Connections, field strengths, and holonomies for a four-level system with
two doubly-degenerate energy levels, plus an independent adiabatic
Schrodinger-evolution oracle and a self-verification report comparing the
closed-form component tables against finite-difference evaluation.
"""

from ._kernel import BACKEND as KERNEL_BACKEND
from .adiabatic import (
    Schedule,
    TwoLevelLoop,
    convergence_study,
    evolve,
    evolve_two_level,
    extract_geometric,
    run,
    two_level_phase_odd,
)
from .connection import (
    commutator_norm,
    connection_analytic,
    connection_numeric,
    connection_numeric_batch,
    field_strength,
    field_strength_numeric_batch,
)
from .errors import (
    DimensionMismatch,
    HoloError,
    InvalidPair,
    LoopNotClosed,
    NonCommutingPlane,
    NotAntiHermitian,
    NotTabulated,
    NotUnitary,
    PoleAtPoint,
)
from .holonomy import (
    HolonomyPair,
    Loop,
    PlanarRegion,
    berry_phase_stokes,
    holonomy_ordered,
    holonomy_stokes,
    loop_boundary,
    plane_commutes,
)
from .manifold import (
    COORDINATES,
    DEFAULT_CONVENTION,
    GrassmannianPoint,
    RotationConvention,
    all_conventions,
    build_two_level,
    build_unitary,
    elementary_rotation,
    hamiltonian,
)
from .matrix import (
    dagger,
    expm_antihermitian,
    subspace_block,
    unitary_distance,
)
from .verify import convention_search, run_conformance

__version__ = "0.1.0"


def kernel_backend() -> str:
    """Name of the kernel backend this process imported: 'cython' if the
    compiled module loaded (or was forced via HOLO_KERNEL), else 'python'."""
    return KERNEL_BACKEND
