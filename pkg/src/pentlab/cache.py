"""On-disk cache for censuses and balls.

Entries are npz files keyed by (kind, size, format version).  A sha256 over
the array bytes is stored next to the arrays and checked on load; a stale
or corrupt entry is rebuilt rather than trusted.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Callable, Optional

import numpy as np

CACHE_VERSION = 1
ENV_VAR = "PENTLAB_CACHE_DIR"

log = logging.getLogger(__name__)


class CacheError(RuntimeError):
    pass


def cache_dir(override: Optional[str] = None) -> Path:
    if override:
        return Path(override)
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "pentlab"


def _checksum(arrays: dict) -> str:
    h = hashlib.sha256()
    for k in sorted(arrays):
        a = np.ascontiguousarray(arrays[k])
        h.update(k.encode())
        h.update(str(a.dtype).encode())
        h.update(str(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()


def entry_path(kind: str, size, directory: Optional[str] = None) -> Path:
    return cache_dir(directory) / f"{kind}-{size}-v{CACHE_VERSION}.npz"


def save(kind: str, size, arrays: dict, directory: Optional[str] = None) -> Path:
    path = entry_path(kind, size, directory)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = {"kind": kind, "size": size, "version": CACHE_VERSION, "sha256": _checksum(arrays)}
    tmp = path.with_suffix(".tmp.npz")
    np.savez(tmp, __meta__=np.array(json.dumps(meta)), **arrays)
    os.replace(tmp, path)
    return path


def load(kind: str, size, directory: Optional[str] = None) -> Optional[dict]:
    """Arrays of a cache entry, or None when missing.  Raises CacheError if corrupt."""
    path = entry_path(kind, size, directory)
    if not path.exists():
        return None
    try:
        with np.load(path, allow_pickle=False) as z:
            meta = json.loads(str(z["__meta__"]))
            arrays = {k: z[k] for k in z.files if k != "__meta__"}
    except Exception as exc:  # truncated zip, bad json, ...
        raise CacheError(f"unreadable cache entry {path}: {exc}") from exc
    if meta.get("version") != CACHE_VERSION:
        raise CacheError(f"{path}: version {meta.get('version')} != {CACHE_VERSION}")
    if meta.get("sha256") != _checksum(arrays):
        raise CacheError(f"{path}: checksum mismatch")
    return arrays


def inspect(directory: Optional[str] = None) -> list:
    """One record per cache file: name, bytes, and whether it verifies."""
    out = []
    d = cache_dir(directory)
    if not d.exists():
        return out
    for p in sorted(d.glob("*.npz")):
        kind, size, _ = p.stem.rsplit("-", 2)
        try:
            ok = load(kind, size, directory) is not None
            err = None
        except CacheError as exc:
            ok, err = False, str(exc)
        out.append({"file": p.name, "bytes": p.stat().st_size, "ok": ok, "error": err})
    return out


def cached(kind: str, size, build: Callable[[], dict], directory: Optional[str] = None,
           use_cache: bool = True) -> dict:
    if not use_cache:
        return build()
    try:
        hit = load(kind, size, directory)
    except CacheError as exc:
        log.warning("rebuilding: %s", exc)
        hit = None
    if hit is not None:
        return hit
    arrays = build()
    try:
        save(kind, size, arrays, directory)
    except OSError as exc:
        log.warning("cache not written: %s", exc)
    return arrays


def load_catalog(cap: int, directory: Optional[str] = None, use_cache: bool = True):
    """Class catalog with len_cube <= cap, from cache when possible."""
    from .census import ClassCatalog, build_census

    def build():
        return build_census(cap).catalog().to_arrays()
    return ClassCatalog.from_arrays(cached("catalog", cap, build, directory, use_cache))
