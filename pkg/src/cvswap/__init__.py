"""Gaussian simulation of continuous-variable entanglement swapping between
GHZ and EPR resource states."""

from .gaussian import (
    GaussianState,
    SqueezerSpec,
    SymplecticOp,
    TransferMatrix,
    UnphysicalStateError,
    apply,
    beam_splitter_op,
    combination_variance,
    compose,
    is_physical,
    monte_carlo_variance,
    quadrature_vector,
    rotation_op,
    squeezed_vacuum,
    symplectic_eigenvalues,
    symplectic_form,
    tensor,
    vacuum_state,
)
from .states import NetworkRecipe, build_epr, build_ghz, correlation_report, network_matrix
from .protocol import (
    ChannelSpec,
    FeedforwardSpec,
    conditional_swap_oracle,
    joint_measurement_map,
    lossy_channel,
    optimal_classical_gain,
    swap_ghz_epr,
    swap_ghz_ghz,
    swap_transfer,
    theoretical_output_covariance,
)
from .criteria import (
    ComboGains,
    MeasurementSet,
    PptReport,
    closedform_gains_fourmode,
    closedform_gains_threemode,
    fourmode_combos,
    loss_threshold,
    numeric_gain_search,
    ppt_values,
    reconstruct_covariance,
    squeezing_threshold,
    synthesize_measurements,
    threemode_combos,
)

__version__ = "0.1.0"
