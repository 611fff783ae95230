"""Power-sum cache keyed by (p, m, canonical expression hash).

Entries are single JSON files written append-only with atomic rename, so a
cold and a warm run produce bit-identical values. Keys are built from the
canonicalized expression, making them representation-independent.
"""

from __future__ import annotations

import json
import os
import tempfile

CACHE_VERSION = 1


def cache_key(expr, p, m):
    return f"{p}_{m}_{expr.canonical_hash()}"


def _path(cache_dir, key):
    return os.path.join(cache_dir, "power_sums", key + ".json")


def get(cache_dir, key):
    """Cached complex value or None."""
    path = _path(cache_dir, key)
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (FileNotFoundError, json.JSONDecodeError):
        return None
    if payload.get("version") != CACHE_VERSION:
        return None
    return complex(payload["re"], payload["im"])


def put(cache_dir, key, value):
    path = _path(cache_dir, key)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    payload = {"version": CACHE_VERSION, "re": value.real, "im": value.imag}
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
