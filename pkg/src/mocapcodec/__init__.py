"""Lossy transform-coding codec for motion-capture trajectory matrices."""

from .analysis import (
    SpectrumReport,
    clip_correlation_spectrum,
    mean_variation,
    singular_spectrum,
    stddev_sum,
)
from .annealing import AnnealResult, AssignmentMatrix, accumulate_Cj, anneal, hard_assign, update_weights
from .codec import (
    CodecParams,
    StreamInfo,
    auto_quant,
    auto_ratio,
    compression_ratio,
    crop_to,
    decode_sequence,
    derive_l,
    distortion,
    encode_sequence,
    stream_info,
)
from .entropy import entropy_decode, entropy_encode
from .errors import ConvergenceError, FormatError, MocapCodecError, StreamError
from .quantize import (
    QuantizedBasis,
    QuantizedCoeffs,
    dequantize_basis,
    dequantize_coeffs,
    quantize_basis,
    quantize_coeffs,
)
from .sequence import (
    Clip,
    MocapSequence,
    Segmentation,
    concat_clips,
    load_sequence,
    save_sequence,
    segment_by_cuts,
    segment_equal,
)
from .transform import (
    ClipCoefficients,
    DctBasis,
    TransformBasis,
    TruncatedDct,
    accumulate_C,
    baseline_dct2d_code,
    baseline_svd_code,
    dct_basis,
    objective_value,
    project_clip,
    reconstruct_clip,
    storage_cost,
    svd_storage_cost,
    top_eigenvectors,
    truncated_dct,
)

__version__ = "0.1.0"
