"""Quality + diversity subset selection over embedding datasets.

Thin wrapper around the C++ extension; everything lives in ``muss._muss``.
"""

from ._muss import (  # noqa: F401
    BoundConstants,
    ClusterModel,
    ClusterSummary,
    DataFormatError,
    Dataset,
    InvalidArgumentError,
    SelectionResult,
    __version__,
    baseline_select,
    compute_wcss,
    dgds_select,
    distance,
    generate,
    kmeans_fit,
    load_dataset,
    load_dataset_binary,
    load_dataset_jsonl,
    load_model_json,
    marginal_gain,
    mmr_select,
    muss_select,
    objective,
    opt_brute_force,
    precision_at_k,
    random_partition,
    save_dataset_binary,
    save_dataset_jsonl,
    save_model_json,
    summarize_clusters,
    theorem5_bound,
    top_k_quality,
)

__all__ = [name for name in dir() if not name.startswith("_")]
