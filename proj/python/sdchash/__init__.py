"""Binary hashing with similarity distribution calibration.

Thin wrapper around the compiled extension; the full surface lives there.
"""

from ._sdchash import (
    HashModel,
    ItqModel,
    PackedCodes,
    SdcError,
    beta_icdf,
    binomial_bucket_pmf,
    calibration_targets,
    collapse_report,
    contrastive_loss,
    encode,
    encode_itq,
    evaluate,
    feature_collapse_report,
    fit_itq,
    fit_lsh,
    forward,
    generate_synthetic,
    hamming_distance,
    icdf_to_similarity,
    load_codes,
    load_itq,
    load_model,
    pack,
    preservation_loss,
    quantization_loss,
    read_features,
    regularized_incomplete_beta,
    sdc_loss,
    search_topk,
    sign_codes,
    train,
    write_features,
)

__all__ = [
    "HashModel",
    "ItqModel",
    "PackedCodes",
    "SdcError",
    "beta_icdf",
    "binomial_bucket_pmf",
    "calibration_targets",
    "collapse_report",
    "contrastive_loss",
    "encode",
    "encode_itq",
    "evaluate",
    "feature_collapse_report",
    "fit_itq",
    "fit_lsh",
    "forward",
    "generate_synthetic",
    "hamming_distance",
    "icdf_to_similarity",
    "load_codes",
    "load_itq",
    "load_model",
    "pack",
    "preservation_loss",
    "quantization_loss",
    "read_features",
    "regularized_incomplete_beta",
    "sdc_loss",
    "search_topk",
    "sign_codes",
    "train",
    "write_features",
]

__version__ = "0.1.0"
