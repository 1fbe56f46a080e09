# packages/bweibull/datasets.py
from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ValidationError

from packages.bweibull.errors import DatasetError
from packages.bweibull.models import Dataset
from packages.shared.hash_utils import values_fingerprint
from packages.shared.log import get_logger

log = get_logger(__name__)

DATA_DIR = Path(__file__).resolve().parent / "data"
MANIFEST_PATH = DATA_DIR / "manifest.json"

Format = Literal["auto", "csv", "whitespace"]


# ---------- file ingestion ----------

def _csv_tokens(path: Path) -> List[Tuple[int, str]]:
    try:
        df = pd.read_csv(
            path, header=None, dtype=str, skip_blank_lines=False,
            keep_default_na=False, skipinitialspace=True,
        )
    except pd.errors.EmptyDataError:
        return []
    except pd.errors.ParserError as exc:
        raise DatasetError(f"malformed CSV: {exc}", path=str(path)) from exc
    if df.shape[1] != 1:
        raise DatasetError(f"expected one numeric column, found {df.shape[1]}", path=str(path))
    # blank lines come back as NaN
    return [(i + 1, v.strip()) for i, v in enumerate(df.iloc[:, 0]) if isinstance(v, str) and v.strip()]


def _whitespace_tokens(path: Path) -> List[Tuple[int, str]]:
    out: List[Tuple[int, str]] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            out.extend((lineno, tok) for tok in line.split())
    return out


def _resolve_format(path: Path, fmt: Format) -> str:
    if fmt != "auto":
        return fmt
    return "csv" if path.suffix.lower() == ".csv" else "whitespace"


def load_dataset(path: Union[str, Path], fmt: Format = "auto", *, label: Optional[str] = None) -> Dataset:
    """Read one numeric column (optional header) or whitespace-separated numbers.

    Every rejected token is reported with its 1-based line number.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError("file not found", path=str(path))
    kind = _resolve_format(path, fmt)
    tokens = _csv_tokens(path) if kind == "csv" else _whitespace_tokens(path)
    if not tokens:
        raise DatasetError("empty dataset", path=str(path))

    lines = pd.Series([ln for ln, _ in tokens])
    raw = pd.Series([tok for _, tok in tokens])
    values = pd.to_numeric(raw, errors="coerce")

    # a non-numeric first token is a header
    if np.isnan(values.iloc[0]) and len(values) > 1:
        log.debug("dataset.header", path=str(path), header=raw.iloc[0])
        lines, raw, values = lines.iloc[1:], raw.iloc[1:], values.iloc[1:]

    bad = values.isna()
    if bad.any():
        i = bad.idxmax()
        raise DatasetError(f"non-numeric value {raw[i]!r}", path=str(path), line=int(lines[i]))
    arr = values.to_numpy(dtype=float)
    bad = ~np.isfinite(arr) | (arr <= 0)
    if bad.any():
        i = int(np.argmax(bad))
        raise DatasetError(
            f"value {raw.iloc[i]!r} is not a positive finite real", path=str(path), line=int(lines.iloc[i])
        )
    if arr.size < 3:
        raise DatasetError(f"a dataset needs at least 3 observations, got {arr.size}", path=str(path))

    ds = Dataset(
        values=arr.tolist(),
        label=label or path.stem,
        source=str(path),
        sha256=values_fingerprint(arr),
    )
    log.info("dataset.loaded", path=str(path), n=ds.n, format=kind)
    return ds


# ---------- bundled datasets ----------

class TableRow(BaseModel):
    model: str
    estimator: str
    q: float
    alpha: float
    beta: float
    delta: float
    se: Tuple[float, float, float]
    ks: float
    ks_pvalue: float
    cvm: float
    cvm_pvalue: float


class ManifestEntry(BaseModel):
    file: Optional[str] = None
    n: int
    description: str
    provenance: str
    confirmed: bool = False
    table: List[TableRow] = []


@lru_cache(maxsize=1)
def bundled_manifest() -> Dict[str, ManifestEntry]:
    try:
        raw = json.loads(MANIFEST_PATH.read_text(encoding="utf-8"))
        return {name: ManifestEntry.model_validate(entry) for name, entry in raw["datasets"].items()}
    except (OSError, KeyError, json.JSONDecodeError, ValidationError) as exc:
        raise DatasetError(f"unreadable dataset manifest: {exc}", path=str(MANIFEST_PATH)) from exc


def load_bundled(name: str) -> Dataset:
    manifest = bundled_manifest()
    entry = manifest.get(name)
    if entry is None:
        raise DatasetError(f"unknown bundled dataset {name!r}; known: {sorted(manifest)}")
    if entry.file is None:
        raise DatasetError(f"bundled dataset {name!r} has no values ({entry.provenance})")
    ds = load_dataset(DATA_DIR / entry.file, "csv", label=name)
    if ds.n != entry.n:
        raise DatasetError(f"expected {entry.n} observations, found {ds.n}", path=str(DATA_DIR / entry.file))
    return ds.model_copy(update={"source": entry.provenance})


def resolve_dataset(source: str, fmt: Format = "auto") -> Dataset:
    """A file path, or `bundled:<name>` for a shipped dataset."""
    if source.startswith("bundled:"):
        return load_bundled(source.split(":", 1)[1])
    return load_dataset(source, fmt)
