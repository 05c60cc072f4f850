"""Numba kernels for the stochastic gradient layout optimiser.

One kernel call runs one epoch so the Python driver can decay the learn
rate, watch for non-finite coordinates, and report progress. All state
that persists across epochs (next-firing schedule, RNG words) lives in
arrays owned by the driver and is mutated in place.
"""

import numba
import numpy as np

from ._rng import tau_rand_int

GRAD_CLIP = 4.0


@numba.njit("f8(f8, f8)", inline="always", cache=True)
def _clip(val, bound):
    if val > bound:
        return bound
    if val < -bound:
        return -bound
    return val


@numba.njit("f8(f8[:, ::1], i8, i8)", inline="always", cache=True)
def _sq_dist(emb, i, j):
    acc = 0.0
    for d in range(emb.shape[1]):
        diff = emb[i, d] - emb[j, d]
        acc += diff * diff
    return acc


def attraction_gradient(yi, yj, a, b):
    """Gradient of log nu(i, j) with respect to yi (unclipped).

    nu is the low-dimensional similarity (1 + a * ||yi - yj||^(2b))^-1.
    """
    yi = np.asarray(yi, dtype=np.float64)
    yj = np.asarray(yj, dtype=np.float64)
    diff = yi - yj
    r = float(diff @ diff)
    if r == 0.0:
        return np.zeros_like(diff)
    coeff = -2.0 * a * b * r ** (b - 1.0) / (1.0 + a * r**b)
    return coeff * diff


def repulsion_gradient(yi, yk, a, b, gamma=1.0):
    """Gradient of gamma * log(1 - nu(i, k)) with respect to yi (unclipped)."""
    yi = np.asarray(yi, dtype=np.float64)
    yk = np.asarray(yk, dtype=np.float64)
    diff = yi - yk
    r = float(diff @ diff)
    coeff = 2.0 * gamma * b / ((0.001 + r) * (1.0 + a * r**b))
    return coeff * diff


@numba.njit(
    "i8(f8[:, ::1], i4[::1], i4[::1], f8[::1], f8[::1], f8, f8, f8, f8, i8, i8, i8[::1])",
    cache=True,
)
def run_epoch(
    embedding,
    head,
    tail,
    epochs_per_sample,
    epoch_of_next_sample,
    a,
    b,
    gamma,
    alpha,
    negative_samples,
    epoch,
    rng_state,
):
    """Apply one epoch of attraction/repulsion; returns number of firings."""
    n_vertices = embedding.shape[0]
    dim = embedding.shape[1]
    fired = 0
    for e in range(head.shape[0]):
        if epoch_of_next_sample[e] > epoch:
            continue
        fired += 1
        i = head[e]
        j = tail[e]
        dist_sq = _sq_dist(embedding, i, j)
        if dist_sq > 0.0:
            grad_coeff = -2.0 * a * b * dist_sq ** (b - 1.0)
            grad_coeff /= a * dist_sq**b + 1.0
        else:
            grad_coeff = 0.0
        for d in range(dim):
            grad_d = _clip(grad_coeff * (embedding[i, d] - embedding[j, d]), GRAD_CLIP)
            embedding[i, d] += grad_d * alpha
            embedding[j, d] -= grad_d * alpha
        epoch_of_next_sample[e] += epochs_per_sample[e]

        for _ in range(negative_samples):
            k = tau_rand_int(rng_state) % n_vertices
            if k == i:
                continue
            dist_sq = _sq_dist(embedding, i, k)
            if dist_sq > 0.0:
                grad_coeff = 2.0 * gamma * b
                grad_coeff /= (0.001 + dist_sq) * (a * dist_sq**b + 1.0)
                for d in range(dim):
                    grad_d = _clip(
                        grad_coeff * (embedding[i, d] - embedding[k, d]), GRAD_CLIP
                    )
                    embedding[i, d] += grad_d * alpha
            else:
                # coincident distinct points: deterministic kick apart
                for d in range(dim):
                    embedding[i, d] += GRAD_CLIP * alpha
    return fired
