"""Binary caches for discrete-log tables and factorial windows.

Both formats are little-endian with a fixed magic and a fully determined
size, so a loader can reject truncation before touching the payload.
Loaded tables are re-verified on 64 deterministic pseudorandom samples;
a cheap spot check that catches bit rot and mismatched parameters
without recomputing the whole table.

FCL1 (discrete logs):
    magic   4s   b"FCL1"
    p       u64
    g       u64  generator the table was built from
    table   (p-1) * u32, entry i holds dlog of x = i + 1

FCW1 (factorial window):
    magic   4s   b"FCW1"
    p       u64
    L       u64
    N       u64
    values  N * u64
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import CacheFormatError
from .factorial import FactorialWindow, build_window
from .field import PrimeContext

__all__ = [
    "dlog_cache_path",
    "window_cache_path",
    "save_dlog_table",
    "load_dlog_table",
    "save_window",
    "load_window",
    "get_or_build_window",
    "get_or_build_dlog",
]

DLOG_MAGIC = b"FCL1"
WINDOW_MAGIC = b"FCW1"
_DLOG_HEADER = struct.Struct("<4sQQ")
_WINDOW_HEADER = struct.Struct("<4sQQQ")
_SAMPLE_COUNT = 64
_SAMPLE_SEED = 0x46434C31  # spells the dlog magic


def dlog_cache_path(cache_dir: str | Path, p: int) -> Path:
    return Path(cache_dir) / f"dlog_p{p}.fcl1"


def window_cache_path(cache_dir: str | Path, p: int, L: int, N: int) -> Path:
    return Path(cache_dir) / f"window_p{p}_L{L}_N{N}.fcw1"


def save_dlog_table(path: str | Path, ctx: PrimeContext) -> Path:
    table = ctx.require_dlog()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = table[1:].astype("<u4")
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_DLOG_HEADER.pack(DLOG_MAGIC, ctx.p, ctx.g))
        fh.write(payload.tobytes())
    tmp.replace(path)
    return path


def load_dlog_table(path: str | Path, p: int) -> tuple[np.ndarray, int]:
    """Load and verify a dlog table; returns (table, generator).

    The returned table has length p with table[0] = -1, matching the
    in-memory layout produced by the kernels.
    """
    raw = _read_all(path)
    if len(raw) < _DLOG_HEADER.size:
        raise CacheFormatError(f"{path}: shorter than a header")
    magic, file_p, g = _DLOG_HEADER.unpack_from(raw)
    if magic != DLOG_MAGIC:
        raise CacheFormatError(f"{path}: bad magic {magic!r}")
    if file_p != p:
        raise CacheFormatError(f"{path}: built for p={file_p}, wanted p={p}")
    expected = _DLOG_HEADER.size + 4 * (p - 1)
    if len(raw) != expected:
        raise CacheFormatError(
            f"{path}: size {len(raw)} != expected {expected} for p={p}"
        )
    body = np.frombuffer(raw, dtype="<u4", offset=_DLOG_HEADER.size)
    table = np.empty(p, dtype=np.int64)
    table[0] = -1
    table[1:] = body
    if table[1:].max(initial=0) >= p - 1:
        raise CacheFormatError(f"{path}: exponent out of range")
    _verify_dlog_samples(path, table, p, g)
    return table, int(g)


def _verify_dlog_samples(path, table: np.ndarray, p: int, g: int) -> None:
    rng = np.random.default_rng(_SAMPLE_SEED + p)
    for x in rng.integers(1, p, size=_SAMPLE_COUNT):
        x = int(x)
        if pow(g, int(table[x]), p) != x:
            raise CacheFormatError(f"{path}: sample check failed at x={x}")


def save_window(path: str | Path, window: FactorialWindow) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_WINDOW_HEADER.pack(WINDOW_MAGIC, window.p, window.L, window.N))
        fh.write(window.values.astype("<u8").tobytes())
    tmp.replace(path)
    return path


def load_window(path: str | Path, ctx: PrimeContext, L: int, N: int) -> FactorialWindow:
    raw = _read_all(path)
    if len(raw) < _WINDOW_HEADER.size:
        raise CacheFormatError(f"{path}: shorter than a header")
    magic, file_p, file_L, file_N = _WINDOW_HEADER.unpack_from(raw)
    if magic != WINDOW_MAGIC:
        raise CacheFormatError(f"{path}: bad magic {magic!r}")
    if (file_p, file_L, file_N) != (ctx.p, L, N):
        raise CacheFormatError(
            f"{path}: holds (p={file_p}, L={file_L}, N={file_N}), "
            f"wanted (p={ctx.p}, L={L}, N={N})"
        )
    expected = _WINDOW_HEADER.size + 8 * N
    if len(raw) != expected:
        raise CacheFormatError(
            f"{path}: size {len(raw)} != expected {expected} for N={N}"
        )
    values = np.frombuffer(raw, dtype="<u8", offset=_WINDOW_HEADER.size).astype(
        np.int64
    )
    if values.min(initial=1) < 1 or values.max(initial=1) >= ctx.p:
        raise CacheFormatError(f"{path}: residue out of range")
    _verify_window_samples(path, values, ctx.p, L)
    return FactorialWindow(ctx=ctx, L=L, N=N, values=values)


def _verify_window_samples(path, values: np.ndarray, p: int, L: int) -> None:
    # (L+i+1)! carries to (L+i+2)! by one multiplication; check random joints
    n = values.size
    if n < 2:
        return
    rng = np.random.default_rng(_SAMPLE_SEED + p + L)
    for i in rng.integers(0, n - 1, size=_SAMPLE_COUNT):
        i = int(i)
        if values[i] * (L + i + 2) % p != values[i + 1]:
            raise CacheFormatError(f"{path}: recurrence check failed at index {i}")


def get_or_build_window(
    cache_dir: str | Path | None, ctx: PrimeContext, L: int, N: int
) -> tuple[FactorialWindow, str | None]:
    """Window from cache when possible, else computed and cached.

    Returns the window plus a warning string when a cache file existed
    but failed verification and was recomputed.
    """
    if cache_dir is None:
        return build_window(ctx, L, N), None
    path = window_cache_path(cache_dir, ctx.p, L, N)
    warning = None
    if path.exists():
        try:
            return load_window(path, ctx, L, N), None
        except CacheFormatError as exc:
            warning = f"discarding bad cache file: {exc}"
    window = build_window(ctx, L, N)
    save_window(path, window)
    return window, warning


def get_or_build_dlog(
    cache_dir: str | Path | None, ctx: PrimeContext
) -> tuple[PrimeContext, str | None]:
    """Context with dlog attached, preferring the cache; see get_or_build_window."""
    if ctx.dlog is not None:
        return ctx, None
    if cache_dir is None:
        return ctx.with_dlog(), None
    path = dlog_cache_path(cache_dir, ctx.p)
    warning = None
    if path.exists():
        try:
            table, g = load_dlog_table(path, ctx.p)
            if g == ctx.g:
                return ctx.attach_dlog(table), None
            warning = f"discarding cache built for generator {g}, using {ctx.g}"
        except CacheFormatError as exc:
            warning = f"discarding bad cache file: {exc}"
    ctx = ctx.with_dlog()
    save_dlog_table(path, ctx)
    return ctx, warning


def _read_all(path: str | Path) -> bytes:
    path = Path(path)
    try:
        return path.read_bytes()
    except OSError as exc:
        raise CacheFormatError(f"{path}: {exc}") from exc
