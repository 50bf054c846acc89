"""Computational ghost imaging with Hadamard and Special-Hadamard patterns."""
from .estimator import GhostImager
from .exceptions import (
    ConfigError,
    DegenerateRangeError,
    DimensionMismatchError,
    GhostImagingError,
    InvalidArgumentError,
    InvalidOrderError,
    PGMFormatError,
    SizeLimitError,
)
from .hadamard import hadamard, paley, sylvester, valid_orders, verify_hadamard
from .imaging import (
    BucketSignal,
    Reconstruction,
    Scene,
    add_noise,
    bucket_signal,
    evaluate,
    hcgi_expected,
    mse,
    normalize,
    reconstruct,
    shcgi_expected,
)
from .patterns import (
    PatternMatrix,
    gram,
    make_patterns,
    pattern_image,
    pseudo_hadamard,
    random_binary,
    special_hadamard,
    to_pseudo,
)
from .experiments import ExperimentConfig, compare_patterns, run_preset, run_single, sweep_k, target_object

__version__ = "0.1.0"
