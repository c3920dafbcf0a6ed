"""Multichannel scattering S-matrices via the Kohn variational principle,
with classical or variational-quantum matrix inversion."""

from .basis import (
    ChannelSet,
    OrthoTransform,
    RadialBasisSpec,
    make_channels,
    orthogonalize,
    orthogonalize_to_rank,
    overlap_matrix,
)
from .ccref import CcGrid, solve_cc
from .kvp import InverseQualityError, SMatrixResult, assemble_s, probabilities, solve
from .matelem import (
    KvpMatrices,
    ScatteringProblem,
    assemble,
    one_channel_exp_well,
    secrest_johnson,
    to_ortho,
    vib_coupling,
)
from .scaling import MoleculePair, pauli_term_count, qubit_count, vib_modes
from .vqls import OptConfig, PauliDecomposition, VqlsSolution, decompose, invert

__version__ = "0.1.0"
