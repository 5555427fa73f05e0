"""Fusion frames over C^n and block-matrix representations of operators."""

from .blocks import BlockOpMatrix, OplusOperator, adjoint_block
from .convolution import (
    BlockingScheme,
    Signal,
    circular_conv,
    direct_conv,
    oa_block_matrix,
    overlap_add,
    overlap_save,
    slice_frames,
)
from .errors import *  # noqa: F401,F403
from .frames import (
    DirectSumVector,
    FrameBounds,
    FrameClass,
    FusionSequence,
    WeightedSubspace,
    analysis,
    canonical_dual,
    classify,
    frame_bounds,
    frame_operator,
    is_dual,
    phi,
    project,
    random_fusion_frame,
    random_riesz_decomposition,
    synthesis,
)
from .nonstandard import HaarMRA, NonstandardForm, haar_mra, nonstandard_block_matrix, nonstandard_decompose, toeplitz_deviation
from .representation import (
    algebra_check,
    alt_frame_operator,
    cross_gram,
    dual_transfer_check,
    inverse_repr,
    inverse_repr_otimes,
    is_riesz_basis,
    mat_repr,
    mat_repr_otimes,
    op_from_matrix,
    op_from_matrix_otimes,
    oplus_frame_op,
    pinv_repr,
    pinv_repr_otimes,
)
from .schatten import hs_inner, schatten_norm, schatten_transfer_check, tensor_fusion_frame
from .systems import (
    FusionFrameSystem,
    LinearSystemForm,
    block_representation,
    build_lin_system,
    solve_operator_eq,
)

__version__ = "0.1.0"
