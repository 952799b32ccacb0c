"""Vectorized Weisfeiler-Leman refinement engines.

Everything here works on integer color arrays and knows nothing about
coherent configurations; the wrapping modules interpret the results.
Color ids produced by a round are always assigned by sorted signature
order (via ``np.unique``), so refinement output is deterministic and
independent of the input numbering.
"""

from __future__ import annotations

import numpy as np

DEFAULT_TUPLE_CAP = 10**8


class MemoryCapError(Exception):
    """Raised when a requested tuple refinement would exceed the memory cap."""


def _renumber_rows(rows: np.ndarray) -> tuple[np.ndarray, int]:
    """Assign contiguous ids to the rows of a 2-D array, sorted lexicographically."""
    uniq, inv = np.unique(rows, axis=0, return_inverse=True)
    return inv.astype(np.int64), len(uniq)


def normalize_colors(mat: np.ndarray) -> tuple[np.ndarray, int]:
    """Renumber an arbitrary integer matrix to contiguous ids 0..rank-1."""
    flat = np.asarray(mat, dtype=np.int64).ravel()
    inv, rank = _renumber_rows(flat[:, None])
    return inv.reshape(mat.shape), rank


def _pair_round_codes(mat: np.ndarray, rank: int) -> np.ndarray:
    """Per-pair sorted composition multisets: row (a,b) lists {(c(a,g),c(g,b)): g}."""
    n = mat.shape[0]
    codes = mat[:, None, :] * np.int64(rank) + mat.T[None, :, :]
    codes.sort(axis=2)
    return np.concatenate([mat.reshape(n * n, 1), codes.reshape(n * n, n)], axis=1)


def refine_pair_coloring(init: np.ndarray) -> tuple[np.ndarray, int]:
    """Run 2-dim WL refinement of a pair coloring to its stable fixpoint.

    ``init`` is an (n, n) integer matrix; returns the stable matrix with
    canonicalized contiguous ids and its rank.
    """
    n = init.shape[0]
    mat, rank = normalize_colors(init)
    if n <= 1:
        return mat, rank
    while True:
        inv, new_rank = _renumber_rows(_pair_round_codes(mat, rank))
        if new_rank == rank:
            return inv.reshape(n, n), rank
        mat, rank = inv.reshape(n, n), new_rank


def joint_refine_pair(
    init_a: np.ndarray, init_b: np.ndarray
) -> tuple[np.ndarray, np.ndarray, int] | None:
    """Refine two pair colorings in lockstep through a shared color dictionary.

    Returns the stable matrices (with shared ids) and the common rank, or
    None as soon as the per-round color histograms of the two sides differ
    (then no color correspondence compatible with the seeds exists).
    """
    n = init_a.shape[0]
    if init_b.shape[0] != n:
        return None
    stacked = np.concatenate(
        [np.asarray(init_a, np.int64).ravel(), np.asarray(init_b, np.int64).ravel()]
    )
    inv, rank = _renumber_rows(stacked[:, None])
    mat_a, mat_b = inv[: n * n].reshape(n, n), inv[n * n :].reshape(n, n)
    while True:
        if np.any(
            np.bincount(mat_a.ravel(), minlength=rank)
            != np.bincount(mat_b.ravel(), minlength=rank)
        ):
            return None
        rows = np.concatenate(
            [_pair_round_codes(mat_a, rank), _pair_round_codes(mat_b, rank)]
        )
        inv, new_rank = _renumber_rows(rows)
        if new_rank == rank:
            return mat_a, mat_b, rank
        mat_a, mat_b = inv[: n * n].reshape(n, n), inv[n * n :].reshape(n, n)
        rank = new_rank


def tuple_strides(n: int, m: int) -> list[int]:
    """Row-major strides: tuple (x_0..x_{m-1}) has flat index sum(x_i * n^(m-1-i))."""
    return [n ** (m - 1 - i) for i in range(m)]


def check_tuple_cap(n: int, m: int, cap: int = DEFAULT_TUPLE_CAP) -> None:
    if n**m > cap:
        raise MemoryCapError(
            f"refusing dense {m}-tuple table of size {n}**{m} > cap {cap}"
        )


def tuple_digits(n: int, m: int) -> np.ndarray:
    """(m, n^m) array: digits[i, t] is entry i of the tuple with flat index t."""
    idx = np.arange(n**m, dtype=np.int64)
    return np.stack([(idx // s) % n for s in tuple_strides(n, m)])


def initial_tuple_colors(mat: np.ndarray, m: int) -> np.ndarray:
    """Atomic types of m-tuples: the full matrix of pair colors (c(x_i, x_j))_{i,j}.

    Diagonal colors encode equality of entries, so the index-equality
    pattern is part of the type.
    """
    n = mat.shape[0]
    digits = tuple_digits(n, m)
    cols = [mat[digits[i], digits[j]] for i in range(m) for j in range(m)]
    inv, _ = _renumber_rows(np.stack(cols, axis=1))
    return inv


def joint_initial_tuple_colors(
    mat_a: np.ndarray, mat_b: np.ndarray, m: int
) -> tuple[np.ndarray, np.ndarray]:
    """Atomic types of m-tuples on two point sets, encoded through one
    shared dictionary.  The callers pre-map the colors of side B so that
    corresponding pair colors carry equal integers."""
    n = mat_a.shape[0]
    digits = tuple_digits(n, m)
    rows = []
    for mat in (mat_a, mat_b):
        cols = [mat[digits[i], digits[j]] for i in range(m) for j in range(m)]
        rows.append(np.stack(cols, axis=1))
    inv, _ = _renumber_rows(np.concatenate(rows))
    return inv[: n**m], inv[n**m :]


def _substitution_table(colors: np.ndarray, n: int, m: int) -> np.ndarray:
    """(N*n, m) rows: row (t, a) holds colors of x_{i<-a} for i = 0..m-1."""
    idx = np.arange(n**m, dtype=np.int64)
    alphas = np.arange(n, dtype=np.int64)
    out = np.empty((n**m, n, m), dtype=np.int64)
    for i, stride in enumerate(tuple_strides(n, m)):
        base = idx - ((idx // stride) % n) * stride
        out[:, :, i] = colors[base[:, None] + stride * alphas[None, :]]
    return out.reshape(n**m * n, m)


def _tuple_round_rows(colors: np.ndarray, codes: np.ndarray, n: int, m: int) -> np.ndarray:
    per_alpha = codes.reshape(n**m, n)
    per_alpha = np.sort(per_alpha, axis=1)
    return np.concatenate([colors[:, None], per_alpha], axis=1)


def refine_tuple_coloring(init: np.ndarray, n: int, m: int) -> tuple[np.ndarray, int]:
    """m-ary WL refinement of a flat coloring of Omega^m to its fixpoint."""
    colors, rank = _renumber_rows(np.asarray(init, np.int64)[:, None])
    if n <= 1:
        return colors, rank
    while True:
        codes, _ = _renumber_rows(_substitution_table(colors, n, m))
        inv, new_rank = _renumber_rows(_tuple_round_rows(colors, codes, n, m))
        if new_rank == rank:
            return colors, rank
        colors, rank = inv, new_rank


def joint_refine_tuple_coloring(
    init_a: np.ndarray, init_b: np.ndarray, n: int, m: int
) -> tuple[np.ndarray, np.ndarray, int] | None:
    """Lockstep m-ary refinement with shared ids; None on histogram mismatch."""
    size = n**m
    stacked = np.concatenate([np.asarray(init_a, np.int64), np.asarray(init_b, np.int64)])
    inv, rank = _renumber_rows(stacked[:, None])
    col_a, col_b = inv[:size], inv[size:]
    while True:
        if np.any(
            np.bincount(col_a, minlength=rank) != np.bincount(col_b, minlength=rank)
        ):
            return None
        subs = np.concatenate(
            [_substitution_table(col_a, n, m), _substitution_table(col_b, n, m)]
        )
        codes, _ = _renumber_rows(subs)
        codes_a, codes_b = codes[: size * n], codes[size * n :]
        rows = np.concatenate(
            [
                _tuple_round_rows(col_a, codes_a, n, m),
                _tuple_round_rows(col_b, codes_b, n, m),
            ]
        )
        inv, new_rank = _renumber_rows(rows)
        if new_rank == rank:
            return col_a, col_b, rank
        col_a, col_b = inv[:size], inv[size:]
        rank = new_rank
