"""Similarity-judgment prediction toolkit."""

from ._core import (
    InputError,
    NumericError,
    __version__,
    config_hash,
    cosine,
    cosine_matrix,
    evaluate,
    fit_ridge,
    levenshtein,
    make_folds,
    nonmetric_mds,
    normalized_levenshtein,
    parse_embeddings,
    pava,
    pearson_r,
    pearson_r2,
    render_markdown,
    run_combine,
    run_encode,
    run_fit_eval,
    run_mds,
    run_predict,
    run_qc,
    smooth_one_hot,
    smoothing_degenerate,
    write_embeddings,
)

__all__ = [
    "InputError",
    "NumericError",
    "__version__",
    "config_hash",
    "cosine",
    "cosine_matrix",
    "evaluate",
    "fit_ridge",
    "levenshtein",
    "make_folds",
    "nonmetric_mds",
    "normalized_levenshtein",
    "parse_embeddings",
    "pava",
    "pearson_r",
    "pearson_r2",
    "render_markdown",
    "run_combine",
    "run_encode",
    "run_fit_eval",
    "run_mds",
    "run_predict",
    "run_qc",
    "smooth_one_hot",
    "smoothing_degenerate",
    "write_embeddings",
]
