"""Optional on-disk cache for bracket grids.

Activated by the TAILFORGE_CACHE_DIR environment variable.  Entries are
JSON files named by the SHA-256 of the canonical request (distribution spec,
fold count, range, step, cap) holding a header plus a base-10 grid payload;
no binary formats, so cache files diff and ship cleanly.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from pathlib import Path

import numpy as np

from .convolve import BracketGrid, convn_tail_grid, trunc_convn_tail_grid
from .distribution import Distribution

__all__ = ["cache_dir", "cached_convn_tail_grid"]

_PAYLOAD_FMT = "{:.17g}"


def cache_dir() -> Path | None:
    root = os.environ.get("TAILFORGE_CACHE_DIR")
    return Path(root) if root else None


def _key(spec: dict, n: int, x_max: float, h: float, cap: float) -> str:
    doc = json.dumps(
        {"spec": spec, "n": n, "x_max": x_max, "h": h, "cap": None if math.isinf(cap) else cap},
        sort_keys=True,
    )
    return hashlib.sha256(doc.encode()).hexdigest()


def cached_convn_tail_grid(
    d: Distribution, n: int, x_max: float, h: float, cap: float = math.inf
) -> BracketGrid:
    """convn/trunc_convn with a spec-hash cache when TAILFORGE_CACHE_DIR is set."""
    root = cache_dir()
    if root is None or not d.spec:
        return _compute(d, n, x_max, h, cap)
    root.mkdir(parents=True, exist_ok=True)
    key = _key(d.spec, n, x_max, h, cap)
    path = root / f"bracket-{key}.json"
    if path.exists():
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        return BracketGrid(
            grid=np.array([float(v) for v in doc["grid"]]),
            log_lower=np.array([float(v) for v in doc["log_lower"]]),
            log_upper=np.array([float(v) for v in doc["log_upper"]]),
            n=doc["header"]["n"],
            h=doc["header"]["h"],
            cap=math.inf if doc["header"]["cap"] is None else doc["header"]["cap"],
        )
    grid = _compute(d, n, x_max, h, cap)
    doc = {
        "header": {
            "schema": "tailforge-bracket/1",
            "spec_hash": key,
            "spec": d.spec,
            "n": n,
            "x_max": x_max,
            "h": h,
            "cap": None if math.isinf(cap) else cap,
        },
        "grid": [_PAYLOAD_FMT.format(v) for v in grid.grid],
        "log_lower": [_PAYLOAD_FMT.format(v) for v in grid.log_lower],
        "log_upper": [_PAYLOAD_FMT.format(v) for v in grid.log_upper],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    return grid


def _compute(d: Distribution, n: int, x_max: float, h: float, cap: float) -> BracketGrid:
    if math.isinf(cap):
        return convn_tail_grid(d, n, x_max, h)
    return trunc_convn_tail_grid(d, n, cap, x_max, h)
