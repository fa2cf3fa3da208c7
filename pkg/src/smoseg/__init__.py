"""Class-agnostic segmentation of salient missing objects in image pairs.

Given a before/after pair of the same scene, the pipeline estimates, per
pixel of the before image, the probability of belonging to an object that
is present before but missing after, by comparing superpixel features and
optimally matching superpixel neighborhoods, then fusing the result with an
external visual-saliency map.
"""

from .config import PipelineConfig, load_config
from .contrast import ContrastMap, combine_contrast, contrast_map, local_contrast, neighborhood_contrast
from .features import (
    FeatureField,
    SuperpixelFeatureSet,
    builtin_feature_field,
    load_feature_field,
    pool_superpixel_features,
    save_feature_field,
    upscale_field,
)
from .fusion import (
    BinaryMask,
    FusionParams,
    ProbabilityMap,
    SaliencyMap,
    fuse,
    load_saliency,
    threshold_mask,
)
from .matching import MatchingSolution, brute_force_lap, solve_lap
from .metrics import EvalPoint, EvalReport, confusion_counts, f_beta, pr_roc_sweep
from .pipeline import (
    ImagePair,
    evaluate_dataset,
    read_manifest,
    render_overlay,
    run_pair,
    sweep_alpha,
    write_manifest,
)
from .slic import SlicParams, SuperpixelLabeling, boundary_labels, compute_adjacency, segment_slic
from .synth import SynthSpec, generate_synthetic_pair, write_fixture_dataset

__all__ = [
    "PipelineConfig",
    "load_config",
    "ContrastMap",
    "combine_contrast",
    "contrast_map",
    "local_contrast",
    "neighborhood_contrast",
    "FeatureField",
    "SuperpixelFeatureSet",
    "builtin_feature_field",
    "load_feature_field",
    "pool_superpixel_features",
    "save_feature_field",
    "upscale_field",
    "BinaryMask",
    "FusionParams",
    "ProbabilityMap",
    "SaliencyMap",
    "fuse",
    "load_saliency",
    "threshold_mask",
    "MatchingSolution",
    "brute_force_lap",
    "solve_lap",
    "EvalPoint",
    "EvalReport",
    "confusion_counts",
    "f_beta",
    "pr_roc_sweep",
    "ImagePair",
    "evaluate_dataset",
    "read_manifest",
    "render_overlay",
    "run_pair",
    "sweep_alpha",
    "write_manifest",
    "SlicParams",
    "SuperpixelLabeling",
    "boundary_labels",
    "compute_adjacency",
    "segment_slic",
    "SynthSpec",
    "generate_synthetic_pair",
    "write_fixture_dataset",
]

__version__ = "0.1.0"
