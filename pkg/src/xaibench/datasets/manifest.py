from __future__ import annotations

import hashlib
import logging
import os
import tempfile
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import pandas as pd
import requests
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError
from tqdm import tqdm

from ..util.env import XAIBENCH_CACHE_DIR
from .schema import DatasetError, FeatureKind

logger = logging.getLogger(__name__)

SHA256_PREFIX_LEN = 16
CHUNK_SIZE = 2**16


class DatasetManifestEntry(BaseModel):
    """One downloadable dataset: where it lives and how to read it."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(min_length=1, pattern=r"^[A-Za-z0-9_.-]+$")
    url: str
    sha256: str = Field(pattern=r"^[0-9a-fA-F]{64}$")
    target: str
    protected: Optional[str] = None
    kinds: dict[str, FeatureKind] = Field(default_factory=dict)

    def cache_path(self, cache_dir: Union[str, Path]) -> Path:
        """<cache-dir>/<name>/<sha256-prefix>.csv"""
        prefix = self.sha256.lower()[:SHA256_PREFIX_LEN]
        return Path(cache_dir) / self.name / f"{prefix}.csv"


def load_manifest(path: Union[str, Path]) -> list[DatasetManifestEntry]:
    """Parse a manifest: one JSON document holding an array of entries."""
    p = Path(path)
    if not p.is_file():
        raise DatasetError(f"Manifest not found: {p}")
    try:
        entries = TypeAdapter(list[DatasetManifestEntry]).validate_json(p.read_bytes())
    except ValidationError as e:
        raise DatasetError(f"Invalid manifest {p}: {e}") from e
    names = [e.name for e in entries]
    if len(names) != len(set(names)):
        raise DatasetError(f"Manifest {p} has duplicate dataset names")
    return entries


def find_entry(entries: Sequence[DatasetManifestEntry], name: str) -> DatasetManifestEntry:
    for entry in entries:
        if entry.name == name:
            return entry
    raise DatasetError(
        f"Dataset {name!r} not in manifest; known: {[e.name for e in entries]}"
    )


def sha256_of(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(CHUNK_SIZE), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass
class DatasetFetcher:
    """
    Downloads manifest entries into a checksum-addressed local cache.

    A file that is already cached with the expected digest is returned without
    touching the network.
    """

    cache_dir: Union[str, Path] = XAIBENCH_CACHE_DIR
    timeout: float = 600.0
    progress: bool = False
    _session: requests.Session = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._session = requests.Session()
        self._session.headers.update({"Accept": "text/csv, */*"})

    # --------------------------------------------------------------------------
    # Helpers
    # --------------------------------------------------------------------------

    def _check_status(self, resp: requests.Response, url: str) -> None:
        if 200 <= resp.status_code < 300:
            return
        raise DatasetError(f"HTTP {resp.status_code} for GET {url}\n{resp.text[:200]}")

    def _download(self, url: str, destination: Path) -> None:
        try:
            resp = self._session.get(url, stream=True, timeout=self.timeout)
        except requests.RequestException as e:
            raise DatasetError(f"GET {url} failed: {e}") from e
        self._check_status(resp, url)

        total = int(resp.headers.get("Content-Length", 0))
        bar = tqdm(
            total=total, unit="B", unit_scale=True, disable=not self.progress,
            desc=destination.parent.name,
        )
        try:
            with open(destination, "wb") as fh:
                for chunk in resp.iter_content(chunk_size=CHUNK_SIZE):
                    fh.write(chunk)
                    bar.update(len(chunk))
        except requests.RequestException as e:
            raise DatasetError(f"Download of {url} interrupted: {e}") from e
        finally:
            bar.close()

    @staticmethod
    def _check_target(entry: DatasetManifestEntry, path: Path) -> None:
        try:
            header = pd.read_csv(path, nrows=0, encoding="utf-8")
        except Exception as e:
            raise DatasetError(f"Fetched file for {entry.name!r} is not a CSV: {e}") from e
        if entry.target not in header.columns:
            raise DatasetError(
                f"Target column {entry.target!r} missing from fetched {entry.name!r}"
            )

    # --------------------------------------------------------------------------
    # Public API
    # --------------------------------------------------------------------------

    def fetch(self, entry: DatasetManifestEntry) -> Path:
        """Return the local path of ``entry``, downloading it if needed."""
        target = entry.cache_path(self.cache_dir)
        expected = entry.sha256.lower()

        if target.is_file():
            actual = sha256_of(target)
            if actual == expected:
                logger.info(f"Using cached {entry.name!r} at {target}")
                return target
            logger.warning(
                f"Cached {target} has digest {actual}, expected {expected}; refetching"
            )

        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=target.parent, suffix=".part")
        os.close(fd)
        tmp = Path(tmp_name)
        try:
            logger.info(f"Fetching {entry.name!r} from {entry.url}")
            self._download(entry.url, tmp)
            actual = sha256_of(tmp)
            if actual != expected:
                raise DatasetError(
                    f"Checksum mismatch for {entry.name!r}: expected {expected}, "
                    f"got {actual}"
                )
            self._check_target(entry, tmp)
            os.replace(tmp, target)
        finally:
            if tmp.exists():
                tmp.unlink()
        return target


def fetch_dataset(
    entry: DatasetManifestEntry,
    cache_dir: Union[str, Path] = XAIBENCH_CACHE_DIR,
    **kwargs: Any,
) -> Path:
    """Fetch one manifest entry into ``cache_dir``; idempotent."""
    return DatasetFetcher(cache_dir=cache_dir, **kwargs).fetch(entry)
