# packages/shared/hash_utils.py
from __future__ import annotations

import hashlib
from typing import Iterable

import numpy as np


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def values_fingerprint(values: Iterable[float]) -> str:
    # little-endian float64 bytes, so the digest does not depend on text formatting
    arr = np.ascontiguousarray(np.asarray(list(values), dtype="<f8"))
    return sha256_hex(arr.tobytes())
