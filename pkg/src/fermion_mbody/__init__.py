"""Exact M-body entanglement analysis of N-fermion states in a bitmask Fock basis."""
from .channels import (
    BipartiteState,
    MeasurementOutcome,
    TransferMap,
    apply_transfer_map,
    check_channel,
    compound_matrix,
    measure_l_body,
    measure_occupancy,
    measure_single_fermion,
    mode_tagged_map,
    one_body_unitary,
    random_transfer_map,
    random_unitary,
    reduced_state_A,
    reduced_state_B,
    uniform_map,
    verify_transfer_majorization,
)
from .entanglement import (
    BOSONIC,
    LINEAR,
    VON_NEUMANN,
    EntropyFunctional,
    MajorizationVerdict,
    Verdict,
    concurrence_d4,
    entropy,
    majorize_compare,
    majorizes,
    normalized_entropy,
    two_fermion_lambdas,
)
from .fock import (
    NSectorDensityOperator,
    PureState,
    apply_annihilate,
    apply_create,
    apply_operator_string,
    binom,
    inner_product,
    split_sign,
    subset_rank,
    subset_unrank,
)
from .mbody import (
    GammaMatrix,
    MBodyDM,
    SchmidtDecomposition,
    collective_average,
    contract,
    gamma_matrix,
    mbody_density_operator,
    mbody_dm,
    partner_spectrum_check,
    rho_m,
    rho_m_mixed,
    schmidt_decompose,
)
from .oracles import (
    AnalyticSpectrum,
    appendix_b_report,
    figure1_data,
    ghz_spectrum,
    lambda_2m_max,
    pair_condensate_spectrum,
    slater_spectrum,
)
from .states import (
    StateFamilySpec,
    build_state,
    make_ghz,
    make_odd_pair_condensate,
    make_pair_condensate,
    make_random,
    make_slater,
    make_two_fermion,
)

__version__ = "0.1.0"
