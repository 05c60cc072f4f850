"""Randomized neighbour-descent k-NN search for large datasets.

Works on squared euclidean distance only; callers reduce other metrics to
it by transforming the input rows first. Single threaded and seeded, so
results are reproducible for a given seed. Quality is verified afterwards
by a recall spot check against brute force on sampled vertices.
"""

import numba
import numpy as np

from ._rng import tau_rand_int


@numba.njit("f4(f8[:, ::1], i8, i8)", inline="always", cache=True)
def _sqdist(data, i, j):
    acc = 0.0
    for c in range(data.shape[1]):
        diff = data[i, c] - data[j, c]
        acc += diff * diff
    return np.float32(acc)


@numba.njit(cache=True)
def _heap_push(indices, dists, flags, row, d, idx, flag):
    """Insert (d, idx) into row's bounded max-heap; returns 1 when kept."""
    if d >= dists[row, 0]:
        return 0
    k = indices.shape[1]
    for c in range(k):
        if indices[row, c] == idx:
            return 0
    # replace the root then sift down
    dists[row, 0] = d
    indices[row, 0] = idx
    flags[row, 0] = flag
    pos = 0
    while True:
        left = 2 * pos + 1
        right = left + 1
        swap = pos
        if left < k and dists[row, left] > dists[row, swap]:
            swap = left
        if right < k and dists[row, right] > dists[row, swap]:
            swap = right
        if swap == pos:
            break
        dists[row, pos], dists[row, swap] = dists[row, swap], dists[row, pos]
        indices[row, pos], indices[row, swap] = indices[row, swap], indices[row, pos]
        flags[row, pos], flags[row, swap] = flags[row, swap], flags[row, pos]
        pos = swap
    return 1


@numba.njit(inline="always", cache=True)
def _reservoir_put(cand, fill, row, value, max_candidates, rng_state):
    count = fill[row]
    if count < max_candidates:
        cand[row, count] = value
    else:
        slot = tau_rand_int(rng_state) % (count + 1)
        if slot < max_candidates:
            cand[row, slot] = value
    fill[row] = count + 1


@numba.njit(cache=True)
def _build_candidates(indices, flags, max_candidates, rng_state):
    """Reservoir-sample new and old neighbours (and their reverses) per vertex."""
    n, k = indices.shape
    new_cand = np.full((n, max_candidates), -1, dtype=np.int32)
    old_cand = np.full((n, max_candidates), -1, dtype=np.int32)
    new_fill = np.zeros(n, dtype=np.int64)
    old_fill = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for c in range(k):
            j = indices[i, c]
            if j < 0:
                continue
            if flags[i, c]:
                _reservoir_put(new_cand, new_fill, i, j, max_candidates, rng_state)
                _reservoir_put(new_cand, new_fill, j, i, max_candidates, rng_state)
            else:
                _reservoir_put(old_cand, old_fill, i, j, max_candidates, rng_state)
                _reservoir_put(old_cand, old_fill, j, i, max_candidates, rng_state)
    # mark sampled new neighbours as old for the next round
    for i in range(n):
        for c in range(k):
            j = indices[i, c]
            if j < 0 or not flags[i, c]:
                continue
            for s in range(max_candidates):
                if new_cand[i, s] == j:
                    flags[i, c] = False
                    break
    return new_cand, old_cand


@numba.njit(cache=True)
def _descent_round(data, indices, dists, flags, new_cand, old_cand):
    n = new_cand.shape[0]
    updates = 0
    for i in range(n):
        for a_pos in range(new_cand.shape[1]):
            a = new_cand[i, a_pos]
            if a < 0:
                continue
            for b_pos in range(a_pos + 1, new_cand.shape[1]):
                b = new_cand[i, b_pos]
                if b < 0 or a == b:
                    continue
                d = _sqdist(data, a, b)
                updates += _heap_push(indices, dists, flags, a, d, b, True)
                updates += _heap_push(indices, dists, flags, b, d, a, True)
            for b_pos in range(old_cand.shape[1]):
                b = old_cand[i, b_pos]
                if b < 0 or a == b:
                    continue
                d = _sqdist(data, a, b)
                updates += _heap_push(indices, dists, flags, a, d, b, True)
                updates += _heap_push(indices, dists, flags, b, d, a, True)
    return updates


@numba.njit(cache=True)
def _init_random(data, indices, dists, flags, rng_state):
    n, k = indices.shape
    for i in range(n):
        filled = 0
        attempts = 0
        while filled < k and attempts < 50 * k:
            attempts += 1
            j = tau_rand_int(rng_state) % n
            if j == i:
                continue
            d = _sqdist(data, i, j)
            filled += _heap_push(indices, dists, flags, i, d, j, True)
        j = 0
        while filled < k:  # degenerate k close to n: fill deterministically
            if j != i:
                d = _sqdist(data, i, j)
                filled += _heap_push(indices, dists, flags, i, d, j, True)
            j += 1


@numba.njit(cache=True)
def _heap_sort(indices, dists):
    """Sort each row ascending by distance (deheap), ties by index."""
    n, k = indices.shape
    out_idx = np.empty_like(indices)
    out_dst = np.empty_like(dists)
    for i in range(n):
        # stable sort by index then by distance == sort by (distance, index)
        order = np.argsort(indices[i], kind="mergesort")
        order = order[np.argsort(dists[i][order], kind="mergesort")]
        for c in range(k):
            out_idx[i, c] = indices[i, order[c]]
            out_dst[i, c] = dists[i, order[c]]
    return out_idx, out_dst


def nn_descent(
    data: np.ndarray,
    k: int,
    seed: int = 0,
    n_iters: int | None = None,
    max_candidates: int = 32,
    delta: float = 0.001,
):
    """Approximate k-NN under squared euclidean distance.

    Returns (indices, sqdists) of shape (n, k), each row sorted ascending.
    """
    data = np.ascontiguousarray(data, dtype=np.float64)
    n = data.shape[0]
    if n_iters is None:
        n_iters = max(5, int(round(np.log2(max(n, 2)))))
    rng_state = np.random.default_rng(seed).integers(1 << 8, 1 << 31, size=3).astype(np.int64)
    indices = np.full((n, k), -1, dtype=np.int32)
    dists = np.full((n, k), np.inf, dtype=np.float32)
    flags = np.zeros((n, k), dtype=np.bool_)
    _init_random(data, indices, dists, flags, rng_state)
    mc = min(max_candidates, k)
    for _ in range(n_iters):
        new_cand, old_cand = _build_candidates(indices, flags, mc, rng_state)
        updates = _descent_round(data, indices, dists, flags, new_cand, old_cand)
        if updates <= delta * n * k:
            break
    return _heap_sort(indices, dists)
