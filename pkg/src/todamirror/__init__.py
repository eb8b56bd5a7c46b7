"""Lie-theoretic mirror data for full flag varieties, with numerical
verification that the associated cycle integrals solve the quantum Toda
lattice and that the superpotential's distinguished critical points sit
on the expected quantum-cohomology loci.

Desk scope: types A1-A3, B2, C2, G2.
"""

from .rootsys import (
    CartanDatum,
    RootSystem,
    WeylWord,
    build_cartan,
    positive_roots,
    reduced_word_w0,
    braid_move,
    all_reduced_words_w0,
    invariant_form_h,
    parse_type,
)
from .reps import (
    WeightModule,
    GroupElement,
    FundamentalFamily,
    build_fundamental,
    fundamental_family,
    coeff,
    extremal_coeff,
    minor,
    rho_minor,
)
from .chevgroup import (
    GaussFactors,
    estar,
    fstar,
    gauss_minus_plus,
    lower_factor,
    factorize_unipotent,
    big_cell_coords,
    lemma_yi,
    is_totally_positive,
)
from .mirror import (
    MirrorPoint,
    SuperpotentialValue,
    mirror_point,
    superpotential,
    superpotential_from_uinv,
    translate,
    gklo_weight,
    chart_jacobian_ratio,
    psi_plus,
    psi_minus,
    whittaker_vector_check,
)
from .quadrature import (
    CycleSpec,
    QuadratureResult,
    s_gamma,
    decay_scan,
    braid_compare,
    superpotential_grid,
)
from .toda import (
    TodaOperator,
    ResidualReport,
    apply_hamiltonian,
    verify,
    bessel_i0,
    bessel_k0,
    whittaker_condition_check,
)
from .crit import (
    CriticalPoint,
    KimPoint,
    PetersonReport,
    find_positive_critical,
    find_negative_critical,
    find_all_critical,
    kim_element,
    kim_invariants,
    peterson_check,
)
from .errors import (
    TodaMirrorError,
    UnsupportedTypeError,
    NonReducedWordError,
    DimensionCapError,
    FactorizationError,
    OffFiberError,
    SingularParameterError,
    QuadratureError,
)

__version__ = "0.1.0"
