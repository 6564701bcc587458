"""Logarithmic negativity and Fisher information of CV entangled states."""

from .bell import (
    ChannelMatrix,
    DerivativeConfig,
    IntegratorConfig,
    bell_density,
    bell_density_general,
    bell_density_mixture,
    bell_density_schmidt,
    channel_matrix,
    fisher_information,
    mutual_information,
    small_beta_limit,
)
from .errors import DomainError, NumericError
from .fock import (
    BeamSplitterSpec,
    TruncationSpec,
    associated_laguerre,
    bs_split_with_vacuum,
    displacement_matrix,
    displacement_matrix_element,
    log_factorial,
    xi_coeff,
)
from .negativity import (
    LnResult,
    closed_form_en,
    lambda_threshold_pure,
    log_negativity,
    log_negativity_pure,
    partial_transpose,
    trace_norm,
)
from .qubit import QubitFisherResult, averaged_qubit_fisher, flipped_fisher, ln_qubit, qubit_fisher
from .relations import closed_form_fisher, correlation_sweep, en_from_fisher, f_factor
from .states import (
    PNR,
    DensityMatrixFock,
    OnOff,
    QubitEntangledState,
    SchmidtDiagonalState,
    TwoModeFockMixture,
    four_mode_tap_oracle,
    local_flip,
    make_photon_subtracted_mixed,
    make_photon_subtracted_pure,
    make_qubit_state,
    make_squeezed,
    to_density_matrix,
)

__version__ = "0.1.0"
