"""
xaibench datasets

Synthetic Gaussian-cluster generation with ground truth, CSV ingestion,
manifest-driven fetching, splitting and standardization.
"""

from .csv_loader import load_csv, load_csv_pair
from .manifest import (
    DatasetFetcher,
    DatasetManifestEntry,
    fetch_dataset,
    find_entry,
    load_manifest,
)
from .preprocessing import inverse_standardize, split, standardize
from .schema import (
    DatasetError,
    DatasetSplit,
    FeatureKind,
    FeatureSchema,
    GroundTruth,
    Scaler,
)
from .storage import load_dataset, save_dataset
from .synthetic import SynthConfig, generate_synthetic, place_cluster_centers

__all__ = [
    "DatasetError",
    "DatasetFetcher",
    "DatasetManifestEntry",
    "DatasetSplit",
    "FeatureKind",
    "FeatureSchema",
    "GroundTruth",
    "Scaler",
    "SynthConfig",
    "fetch_dataset",
    "find_entry",
    "generate_synthetic",
    "inverse_standardize",
    "load_csv",
    "load_csv_pair",
    "load_dataset",
    "load_manifest",
    "place_cluster_centers",
    "save_dataset",
    "split",
    "standardize",
]
