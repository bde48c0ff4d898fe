"""Ricci flow of left-invariant metrics on Lie groups.

The metric evolution is reduced to a first-order matrix ODE for an
upper-triangular frame curve B(t): keeping a frame orthonormal along the flow
turns the tensor PDE into algebra in the structure constants, and the
orthogonal gauge freedom of the frame lets the curve be taken triangular.

Modules
-------
matrix     small dense kernel: inverse, triangular-orthogonal factorization,
           symmetric eigensolver
lie        structure constants, algebraic-law residuals, frame transforms,
           3D unimodular parameterization and presets
curvature  connection and Ricci tensor (four-part decomposition plus two
           independent cross-check paths)
flow       the triangular-frame ODE, fixed/adaptive Runge-Kutta integration,
           collapse detection, trajectory serialization
catalog3d  3D unimodular case classification, frame normalizations, and
           closed-form Ricci oracles
cli        command-line front end (``ricciflow``)
"""

from .errors import (
    DomainError,
    InvalidConfig,
    NotSymmetric,
    RicciflowError,
    SingularMatrix,
    UnknownPreset,
)
from ._kernels import BACKEND
from .matrix import TriOrthFactors, factor_tri_orth, inverse, symmetric_eigen
from .lie import (
    PRESETS,
    StructureConstants,
    Unimodular3Params,
    from_unimodular3,
    jacobi_defect,
    preset,
    preset_constants,
    to_unimodular3,
    transform,
    unimodular_defect,
)
from .curvature import (
    Connection,
    RicciDecomposition,
    connection,
    pullback_symmetric,
    ricci_combined,
    ricci_parts,
    ricci_via_connection,
)
from .flow import (
    FlowConfig,
    FlowState,
    Trajectory,
    integrate,
    integrate_general_linear,
    metric_in_initial_frame,
    rhs,
    ricci_in_initial_frame,
    triangular_lift,
)
from .catalog3d import (
    Case3Angles,
    CaseLabel,
    case3_reduce,
    classify,
    closed_form_ricci_case1,
    closed_form_ricci_case2,
    diagonalize_r1,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Case3Angles",
    "CaseLabel",
    "Connection",
    "DomainError",
    "FlowConfig",
    "FlowState",
    "InvalidConfig",
    "NotSymmetric",
    "PRESETS",
    "RicciDecomposition",
    "RicciflowError",
    "SingularMatrix",
    "StructureConstants",
    "Trajectory",
    "TriOrthFactors",
    "Unimodular3Params",
    "UnknownPreset",
    "case3_reduce",
    "classify",
    "closed_form_ricci_case1",
    "closed_form_ricci_case2",
    "connection",
    "diagonalize_r1",
    "factor_tri_orth",
    "from_unimodular3",
    "integrate",
    "integrate_general_linear",
    "inverse",
    "jacobi_defect",
    "metric_in_initial_frame",
    "preset",
    "preset_constants",
    "pullback_symmetric",
    "rhs",
    "ricci_combined",
    "ricci_in_initial_frame",
    "ricci_parts",
    "ricci_via_connection",
    "symmetric_eigen",
    "to_unimodular3",
    "transform",
    "triangular_lift",
    "unimodular_defect",
]
