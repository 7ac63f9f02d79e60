"""Two-qubit spin-path decoherence toolkit.

Closed-form and numerically integrated master-equation dynamics for two
projector-valued decoherence modes, matching discrete Kraus maps,
Gaussian-fluctuating conditioned spin rotations (analytic and Monte
Carlo ensemble averages with coupling calibration), and simulated
two-qubit state tomography.
"""

from .interferometer import (
    BOHR_MAGNETON,
    HBAR,
    EnsembleEstimate,
    FieldSetup,
    ShotAngles,
    conditioned_unitary,
    ensemble_average_analytic,
    ensemble_average_monte_carlo,
    lambda_from_sigma,
    rotation_angle,
    single_shot_state,
    spin_rotation,
)
from .kraus import (
    KrausSet,
    apply_channel,
    kraus_set_a,
    kraus_set_b,
    lindblad_generators_from_kraus,
    trotter_evolve,
)
from .lindblad import (
    DecoherenceSpec,
    ProjectorSet,
    SystemHamiltonian,
    dissipator,
    evolve,
    evolve_mode_a,
    evolve_mode_b,
    integrate_master,
    projectors_mode_a,
    projectors_mode_b,
)
from .measures import (
    MeasureReport,
    concurrence,
    concurrence_bell_diagonal,
    measure_report,
    mixedness,
    spin_flip_transform,
)
from .states import (
    BellWeights,
    StateValidationError,
    bell_diagonal,
    bell_state,
    experiment_initial,
    from_pure,
    matrix_from_json,
    matrix_to_json,
    maximally_mixed,
    validate_density_matrix,
)
from .tomography import (
    CountRecord,
    MeasurementSetting,
    Reconstruction,
    outcome_probabilities,
    project_psd,
    reconstruct_linear,
    simulate_counts,
)

__version__ = "0.1.0"
