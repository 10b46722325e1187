"""Residue currents and weighted Koppelman operators on singular plane curves.

Numerical evaluation of principal-value and residue currents, solution
and projection operators built from Hefer data and compactly supported
weights, a dbar solver with the singular-point correction on cusp
curves, and exact jet-level certificates of smooth non-solvability.
"""

from .curves import (
    CurveSpec,
    Parametrization,
    StructureForm,
    curve_from_config,
    curve_to_config,
    make_cusp,
    make_disc,
    make_implicit,
    make_parametrized,
    normalize,
    pullback_form,
    pullback_function,
    sing_distance,
    structure_form,
)
from .errors import (
    CurveCurrentsError,
    DenominatorVanishesError,
    DivergingLimitError,
    InconsistentBranchesError,
    JetOrderError,
    NonConvergentError,
    PoleAtDiagonalError,
)
from .kernels import (
    HeferData,
    KernelSpec,
    WeightSpec,
    bm_form_eval,
    curve_kernel_assemble,
    cusp_kernel_factor,
    disc_kernel,
    hefer,
    stout_boundary_kernel,
    weight_vikt_eval,
)
from .obstruction import (
    JetSystem,
    JetVerdict,
    build_jet_system,
    feasibility,
)
from .operators import (
    CorrectionInfo,
    KoppelmanReport,
    MembershipVerdict,
    ResidueCoefficients,
    SolveReport,
    apply_K,
    apply_P,
    correct_solution,
    extract_residue_coeffs,
    membership_test,
    solve_dbar,
    verify_koppelman,
)
from .polynomials import MultiPoly, parse_ambient_poly, parse_tau_poly
from .regularization import (
    CurrentValue,
    Cutoff,
    QuadratureSpec,
    RegularizationSchedule,
    SpatialBand,
    cutoff_eval,
    default_schedule,
    limit_extrapolate,
    pv_integrate,
)
from .residues import (
    TestForm,
    ch_product_pair,
    ch_tensor_oracle,
    monomial_form,
    pv_pair,
    residue_oracle,
    residue_pair,
    residue_restriction,
    sep_restrict,
)

__version__ = "0.1.0"
