"""Continuous-variable entanglement-assisted codes over real phase space.

Builds codes from arbitrary real parity-check matrices, decodes
displacement-error syndromes, compiles encoding transformations into
linear-optics gate sequences, and validates the whole pipeline on a
Gaussian-state simulator with homodyne feedforward.
"""

from .symplectic import (
    DEFAULT_TOL,
    apply,
    is_symplectic,
    phase_map_to_quad_action,
    quad_action_to_phase_map,
    swap_halves,
    symplectic_form,
    symplectic_product,
)
from .decomposition import (
    SymplecticDecomposition,
    code_parameters,
    complete_symplectic_basis,
    symplectic_gram_schmidt,
)
from .codes import (
    AugmentedParityCheck,
    CodeParameters,
    CodeSpec,
    augment,
    build_code,
    canonical_encode_layout,
    canonical_parity_check,
    load_code,
    load_parity_check,
    save_code,
    save_parity_check,
)
from .decoder import (
    Correction,
    canonical_reverse,
    decode_single_mode,
    is_correctable_pair,
    min_norm_correction,
    single_mode_error,
    syndrome,
)
from .compiler import (
    Circuit,
    CompilerReport,
    Gate,
    circuit_action,
    compile_encoder,
    decompose,
    encoder_quad_action,
    fourier,
    fourier_inv,
    gate_action,
    invert_circuit,
    load_circuit,
    phase_p,
    phase_x,
    qnd_p,
    qnd_x,
    save_circuit,
    squeeze,
    swap,
)
from .simulator import (
    ExperimentStats,
    GaussianState,
    HomodyneRecord,
    apply_circuit,
    balanced_beamsplitter,
    displace,
    displace_error,
    epr_pair,
    homodyne,
    phase_gate_protocol,
    position_squeezed,
    prepare,
    run_ec_experiment,
    tensor,
    uncertainty_defect,
    vacuum,
)
from . import errors, reference

__version__ = "0.1.0"
