"""Desk-scale workbench for Dunford-Schwartz operators, R_mu and weighted ergodic averages."""

from .measure_model import (
    TailedFunction,
    TailedMeasureSpace,
    distribution,
    function_from_json,
    function_to_json,
    in_r_mu,
    norm_lp,
    sample_paper_example,
    split_r_mu,
)
from .rearrangement import StepFunction, cumulative, majorizes, rearrange, tmu_contains
from .symmetric_norms import (
    ConcaveWeight,
    NormSpec,
    OrliczFunction,
    compute_norm,
    lorentz_norm,
    luxemburg_norm,
    marcinkiewicz_norm,
    norm_l1_cap_linf,
    norm_l1_plus_linf,
    parse_norm_spec,
    space_excludes_one,
)
from .ds_operator import (
    DSOperator,
    adjoint,
    apply,
    check_majorization_contract,
    extend_from_l1,
    modulus,
    random_ds_operator,
    verify_ds,
)
from .averaging import (
    AveragesTrace,
    BesicovitchSequence,
    EgorovCertificate,
    Perturbation,
    TrigPolynomial,
    au_perturbation_check,
    averages_trace,
    besicovitch_defect,
    cesaro_avg,
    check_weak11,
    check_weighted_weak11,
    decomposition_identity_residual,
    egorov_certify,
    limit_candidate,
    maximal_fn,
    weighted_avg,
)
from .pointwise_experiments import (
    CyclicRotation,
    IntegerShift,
    OrbitEscapeError,
    orbit_weighted_avg,
    oscillation,
    return_times_avg,
    wiener_wintner_sweep,
)

__version__ = "0.1.0"
