"""Edit-distance kernels: numba-jitted loops with a pure-numpy fallback.

The numba lane is used when numba imports and the environment variable
KOMPET_NUMBA is not set to 0/false/no/off; otherwise the numpy lane runs.
Both lanes operate on int32 codepoint arrays and produce identical integer
results, so switching lanes never changes any downstream output.

Strings are encoded to Unicode scalar values with :func:`encode`;
``benchmarks/bench_kernels.py`` compares the two lanes.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("KOMPET_NUMBA", "").strip().lower()
if _flag in {"0", "false", "no", "off"}:
    _HAVE_NUMBA = False
else:
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _HAVE_NUMBA = False

BACKEND = "numba" if _HAVE_NUMBA else "numpy"


def encode(s: str) -> np.ndarray:
    """Encode a string as an int32 array of Unicode scalar values."""
    return np.frombuffer(s.encode("utf-32-le"), dtype="<u4").astype(np.int32)


def pack(codes: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Concatenate codepoint arrays into (flat, offsets) CSR form."""
    offs = np.zeros(len(codes) + 1, dtype=np.int64)
    np.cumsum([c.shape[0] for c in codes], out=offs[1:])
    flat = np.concatenate(codes) if codes else np.empty(0, dtype=np.int32)
    return flat.astype(np.int32, copy=False), offs


# ---------------------------------------------------------------------------
# Loop implementations (jitted under the numba lane).


def _lev_pair_loops(a, b):
    n = a.shape[0]
    m = b.shape[0]
    if n == 0:
        return m
    if m == 0:
        return n
    prev = np.arange(m + 1)
    cur = np.empty(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            c = prev[j - 1] + (0 if ai == b[j - 1] else 1)
            d = prev[j] + 1
            if d < c:
                c = d
            d = cur[j - 1] + 1
            if d < c:
                c = d
            cur[j] = c
        prev, cur = cur, prev
    return prev[m]


def _lev_matrix_loops(flat_a, offs_a, flat_b, offs_b, out):
    na = offs_a.shape[0] - 1
    nb = offs_b.shape[0] - 1
    maxm = 0
    for j in range(nb):
        m = offs_b[j + 1] - offs_b[j]
        if m > maxm:
            maxm = m
    prev = np.empty(maxm + 1, dtype=np.int64)
    cur = np.empty(maxm + 1, dtype=np.int64)
    for i in range(na):
        s0 = offs_a[i]
        n = offs_a[i + 1] - s0
        for j in range(nb):
            t0 = offs_b[j]
            m = offs_b[j + 1] - t0
            if n == 0:
                out[i, j] = m
                continue
            if m == 0:
                out[i, j] = n
                continue
            for k in range(m + 1):
                prev[k] = k
            for ii in range(1, n + 1):
                cur[0] = ii
                ai = flat_a[s0 + ii - 1]
                for jj in range(1, m + 1):
                    c = prev[jj - 1] + (0 if ai == flat_b[t0 + jj - 1] else 1)
                    d = prev[jj] + 1
                    if d < c:
                        c = d
                    d = cur[jj - 1] + 1
                    if d < c:
                        c = d
                    cur[jj] = c
                tmp = prev
                prev = cur
                cur = tmp
            out[i, j] = prev[m]


if _HAVE_NUMBA:
    _lev_pair_nb = njit(cache=True)(_lev_pair_loops)
    _lev_matrix_nb = njit(cache=True)(_lev_matrix_loops)


# ---------------------------------------------------------------------------
# Pure-numpy lane. The row update vectorizes substitutions/deletions and
# resolves the insertion chain with the cumulative-minimum identity
# final[j] = j + min_{j' <= j}(partial[j'] - j').


def _lev_pair_np(a, b):
    n = a.shape[0]
    m = b.shape[0]
    if n == 0:
        return int(m)
    if m == 0:
        return int(n)
    col = np.arange(m + 1, dtype=np.int64)
    prev = col.copy()
    cur = np.empty(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        np.minimum(prev[:-1] + (b != a[i - 1]), prev[1:] + 1, out=cur[1:])
        cur[0] = i
        cur -= col
        np.minimum.accumulate(cur, out=cur)
        cur += col
        prev, cur = cur, prev
    return int(prev[m])


# Chunk size bound for the batched matrix DP, in elements per buffer.
_BLOCK_BUDGET = 8_000_000


def _lev_block_np(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """All-pairs distances between rows of A (p, n) and rows of B (q, m)."""
    p, n = A.shape
    q, m = B.shape
    out = np.empty((p, q), dtype=np.int64)
    if n == 0:
        out[:] = m
        return out
    if m == 0:
        out[:] = n
        return out
    rows = max(1, _BLOCK_BUDGET // max(1, q * (m + 1)))
    col = np.arange(m + 1, dtype=np.int32)
    for lo in range(0, p, rows):
        hi = min(lo + rows, p)
        Ac = A[lo:hi]
        prev = np.broadcast_to(col, (hi - lo, q, m + 1)).copy()
        cur = np.empty_like(prev)
        for i in range(1, n + 1):
            cost = (Ac[:, i - 1][:, None, None] != B[None, :, :]).astype(np.int32)
            np.minimum(prev[..., :-1] + cost, prev[..., 1:] + 1, out=cur[..., 1:])
            cur[..., 0] = i
            cur -= col
            np.minimum.accumulate(cur, axis=-1, out=cur)
            cur += col
            prev, cur = cur, prev
        out[lo:hi] = prev[..., m]
    return out


def _lev_matrix_np(codes_a: list[np.ndarray], codes_b: list[np.ndarray]) -> np.ndarray:
    out = np.empty((len(codes_a), len(codes_b)), dtype=np.int64)
    by_len_a: dict[int, list[int]] = {}
    for i, c in enumerate(codes_a):
        by_len_a.setdefault(c.shape[0], []).append(i)
    by_len_b: dict[int, list[int]] = {}
    for j, c in enumerate(codes_b):
        by_len_b.setdefault(c.shape[0], []).append(j)
    for n, ia in by_len_a.items():
        A = np.stack([codes_a[i] for i in ia]) if n else np.empty((len(ia), 0), np.int32)
        for m, jb in by_len_b.items():
            B = np.stack([codes_b[j] for j in jb]) if m else np.empty((len(jb), 0), np.int32)
            out[np.ix_(ia, jb)] = _lev_block_np(A, B)
    return out


# ---------------------------------------------------------------------------
# Public entry points, lane-dispatched once at import.


def lev_pair(a: np.ndarray, b: np.ndarray) -> int:
    """Levenshtein distance between two codepoint arrays."""
    if _HAVE_NUMBA:
        return int(_lev_pair_nb(a, b))
    return _lev_pair_np(a, b)


def lev_matrix(codes_a: list[np.ndarray], codes_b: list[np.ndarray]) -> np.ndarray:
    """All-pairs Levenshtein distance matrix, shape (len(a), len(b))."""
    if _HAVE_NUMBA:
        flat_a, offs_a = pack(codes_a)
        flat_b, offs_b = pack(codes_b)
        out = np.empty((len(codes_a), len(codes_b)), dtype=np.int64)
        _lev_matrix_nb(flat_a, offs_a, flat_b, offs_b, out)
        return out
    return _lev_matrix_np(codes_a, codes_b)
