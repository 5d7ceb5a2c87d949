"""Hot array kernels with a numba fast path and a pure-numpy fallback.

A permutation on n points is one row of an int32 array; a set of
permutations is a 2D array with unique rows. Kernels return rows in
lexicographic order so results are bit-identical across backends.
Set PERMEMBED_NUMBA=0 before import to force the numpy path.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

DTYPE = np.int32

_FNV_OFFSET = np.uint64(1469598103934665603)
_FNV_PRIME = np.uint64(1099511628211)


def _env_wants_numba() -> bool:
    flag = os.environ.get("PERMEMBED_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


try:
    from numba import njit as _njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False
    if _env_wants_numba():
        warnings.warn("numba unavailable, falling back to the numpy backend")


# ---------------------------------------------------------------------------
# backend-independent row utilities


def identity_row(degree: int) -> np.ndarray:
    return np.arange(degree, dtype=DTYPE)


def sort_rows(rows: np.ndarray) -> np.ndarray:
    """Rows sorted lexicographically, C-contiguous."""
    rows = np.ascontiguousarray(rows, dtype=DTYPE)
    if rows.shape[0] <= 1:
        return rows
    idx = np.lexsort(rows.T[::-1])
    return np.ascontiguousarray(rows[idx])


def row_bytes(rows: np.ndarray) -> list[bytes]:
    """One hashable key per row (native encoding, equality only)."""
    rows = np.ascontiguousarray(rows, dtype=DTYPE)
    step = rows.shape[1] * 4
    data = rows.tobytes()
    return [data[i : i + step] for i in range(0, len(data), step)]


def canonical_bytes(sorted_rows: np.ndarray) -> bytes:
    """Order-preserving serialization of a sorted row matrix.

    Big-endian 16-bit cells make byte order match numeric row order,
    so these keys sort the same way the rows do.
    """
    return np.ascontiguousarray(sorted_rows, dtype=DTYPE).astype(">u2").tobytes()


def mult_row(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product a*b under the left-to-right convention: (a*b)(x) = b(a(x))."""
    return b[a]


def mult_rows(rows: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Right-multiply every row by g."""
    return g[rows]


def inverse_row(a: np.ndarray) -> np.ndarray:
    inv = np.empty_like(a)
    inv[a] = np.arange(a.shape[0], dtype=DTYPE)
    return inv


def inverse_rows(rows: np.ndarray) -> np.ndarray:
    m, n = rows.shape
    inv = np.empty_like(rows)
    inv[np.arange(m)[:, None], rows] = np.arange(n, dtype=DTYPE)[None, :]
    return inv


def conjugate_row(r: np.ndarray, g: np.ndarray, ginv: np.ndarray) -> np.ndarray:
    """g^-1 * r * g as an image row."""
    return g[r[ginv]]


def conjugate_rows(rows: np.ndarray, g: np.ndarray, ginv: np.ndarray) -> np.ndarray:
    return g[rows[:, ginv]]


def element_orders(rows: np.ndarray) -> np.ndarray:
    """Multiplicative order of every row."""
    m, n = rows.shape
    ident = np.arange(n, dtype=DTYPE)
    orders = np.zeros(m, dtype=np.int64)
    cur = rows.copy()
    k = 1
    while True:
        done = (cur == ident).all(axis=1) & (orders == 0)
        orders[done] = k
        if (orders != 0).all():
            return orders
        cur = np.take_along_axis(rows, cur, axis=1)
        k += 1


# ---------------------------------------------------------------------------
# numpy backend


def _closure_np(seeds: np.ndarray, gens: np.ndarray, cap: int):
    known: set[bytes] = set()
    chunks: list[np.ndarray] = []

    def push(arr: np.ndarray):
        fresh = []
        for i, k in enumerate(row_bytes(arr)):
            if k not in known:
                known.add(k)
                fresh.append(i)
        if not fresh:
            return None
        sub = np.ascontiguousarray(arr[np.array(fresh)])
        chunks.append(sub)
        return sub

    frontier = push(np.ascontiguousarray(seeds, dtype=DTYPE))
    if len(known) > cap:
        return None
    while frontier is not None and gens.shape[0]:
        prods = np.concatenate([mult_rows(frontier, g) for g in gens])
        frontier = push(prods)
        if len(known) > cap:
            return None
    return sort_rows(np.concatenate(chunks))


def _product_np(a_rows: np.ndarray, b_rows: np.ndarray, cap: int):
    known: set[bytes] = set()
    chunks: list[np.ndarray] = []
    for a in a_rows:
        block = b_rows[:, a]
        fresh = []
        for i, k in enumerate(row_bytes(block)):
            if k not in known:
                known.add(k)
                fresh.append(i)
        if fresh:
            chunks.append(np.ascontiguousarray(block[np.array(fresh)]))
        if len(known) > cap:
            return None
    return sort_rows(np.concatenate(chunks))


# ---------------------------------------------------------------------------
# numba backend

if _HAVE_NUMBA:

    @_njit(cache=True)
    def _insert(table, rows, count, cand):
        # open addressing keyed by an FNV-1a hash of the row;
        # returns the new count, or -1 when the row buffer is full
        n = cand.shape[0]
        mask = table.shape[0] - 1
        h = np.uint64(1469598103934665603)
        for x in range(n):
            h = (h ^ np.uint64(cand[x])) * np.uint64(1099511628211)
        idx = np.int64(h & np.uint64(mask))
        while True:
            slot = table[idx]
            if slot == -1:
                if count >= rows.shape[0]:
                    return -1
                table[idx] = count
                for x in range(n):
                    rows[count, x] = cand[x]
                return count + 1
            same = True
            for x in range(n):
                if rows[slot, x] != cand[x]:
                    same = False
                    break
            if same:
                return count
            idx = (idx + 1) & mask

    @_njit(cache=True)
    def _closure_nb(seeds, gens, cap):
        n = seeds.shape[1]
        size = 1
        while size < 2 * (cap + 2):
            size <<= 1
        table = np.full(size, -1, np.int64)
        rows = np.empty((cap, n), np.int32)
        count = 0
        for r in range(seeds.shape[0]):
            count = _insert(table, rows, count, seeds[r])
            if count < 0:
                return rows[:0], -1
        head = 0
        buf = np.empty(n, np.int32)
        while head < count:
            for k in range(gens.shape[0]):
                for x in range(n):
                    buf[x] = gens[k, rows[head, x]]
                count = _insert(table, rows, count, buf)
                if count < 0:
                    return rows[:0], -1
            head += 1
        return rows[:count].copy(), count

    @_njit(cache=True)
    def _product_nb(a_rows, b_rows, cap):
        n = a_rows.shape[1]
        size = 1
        while size < 2 * (cap + 2):
            size <<= 1
        table = np.full(size, -1, np.int64)
        rows = np.empty((cap, n), np.int32)
        count = 0
        buf = np.empty(n, np.int32)
        for i in range(a_rows.shape[0]):
            for j in range(b_rows.shape[0]):
                for x in range(n):
                    buf[x] = b_rows[j, a_rows[i, x]]
                count = _insert(table, rows, count, buf)
                if count < 0:
                    return rows[:0], -1
        return rows[:count].copy(), count

    def _closure_numba(seeds, gens, cap):
        rows, count = _closure_nb(
            np.ascontiguousarray(seeds, dtype=DTYPE),
            np.ascontiguousarray(gens, dtype=DTYPE),
            int(cap),
        )
        if count < 0:
            return None
        return sort_rows(rows)

    def _product_numba(a_rows, b_rows, cap):
        rows, count = _product_nb(
            np.ascontiguousarray(a_rows, dtype=DTYPE),
            np.ascontiguousarray(b_rows, dtype=DTYPE),
            int(cap),
        )
        if count < 0:
            return None
        return sort_rows(rows)


_BACKENDS = {"numpy": (_closure_np, _product_np)}
if _HAVE_NUMBA:
    _BACKENDS["numba"] = (_closure_numba, _product_numba)

_active = "numba" if (_HAVE_NUMBA and _env_wants_numba()) else "numpy"


def set_backend(name: str) -> None:
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; have {sorted(_BACKENDS)}")
    global _active
    _active = name


def get_backend() -> str:
    return _active


def closure(seeds: np.ndarray, gens: np.ndarray, cap: int):
    """All products of seed rows by generator words.

    Seeds must contain the identity (or lie inside the generated group).
    Returns sorted unique rows, or None once the count would exceed cap.
    """
    if gens.ndim != 2:
        gens = gens.reshape(0, seeds.shape[1])
    return _BACKENDS[_active][0](seeds, gens, cap)


def product_set(a_rows: np.ndarray, b_rows: np.ndarray, cap: int):
    """The set {a*b : a in A, b in B} as sorted rows, or None over cap."""
    return _BACKENDS[_active][1](a_rows, b_rows, cap)
