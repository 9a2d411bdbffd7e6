"""rieszkit: exact coset-atom measures on tori and their decomposition theory."""

from .lattice import (
    EMPTY,
    Lattice,
    LatticeCoset,
    Subtorus,
    annihilator,
    coset_intersect,
    full_lattice,
    hnf,
    intersect,
    is_saturated,
    member,
    zero_lattice,
)
from .order import (
    BlockPosition,
    CosetPosition,
    LinearFunctional,
    OrderChain,
    block_membership,
    classify_coset,
    halfline,
    in_P,
    lexicographic,
    order_from_functionals,
    validate_axioms,
)
from .measure import (
    Measure,
    SpectralAtom,
    annihilator_haar,
    canon,
    convolve,
    fourier_at,
    from_density,
    haar,
    lebesgue_decompose,
    make_atom,
    pair,
    point_mass,
    support,
    total_variation,
    translate,
    zero_measure,
)
from .decompose import (
    BlockDecomposition,
    analyticity_report,
    check_idempotent,
    check_invariance,
    decompose,
    fm_riesz_check,
    is_analytic,
    mask_block,
    restrict_spectrum,
    sign_scan,
    weak_analyticity_residual,
)
from .hardy import (
    TrigPoly,
    burkholder_scan,
    cond_exp,
    doob_check,
    h1_unconditionality_scan,
    jensen_check,
    l1_norm,
    lemma53_check,
    martingale_blocks,
    random_analytic_poly,
)
from .transfer import (
    Homomorphism,
    convolve_poly,
    convolve_via_phi,
    pushforward,
    spec_pushforward,
    transference_report,
)
from .quadrature import QuadSpec

__version__ = "0.1.0"
