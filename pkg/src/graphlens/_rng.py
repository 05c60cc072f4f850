"""Seeded integer RNG usable inside numba kernels.

Three-word tausworthe generator; small state arrays keep the optimiser and
the neighbour-descent search bit-reproducible for a given seed.
"""

import numba
import numpy as np


def make_rng_state(seed: int) -> np.ndarray:
    """Derive a 3-word generator state from a seed."""
    init = np.random.default_rng(seed)
    return init.integers(1 << 8, 1 << 31, size=3).astype(np.int64)


@numba.njit("i8(i8[::1])", inline="always", cache=True)
def tau_rand_int(state):
    """Advance the state and return a pseudo-random integer in [0, 2**32)."""
    state[0] = (((state[0] & 4294967294) << 12) & 0xFFFFFFFF) ^ (
        (((state[0] << 13) & 0xFFFFFFFF) ^ state[0]) >> 19
    )
    state[1] = (((state[1] & 4294967288) << 4) & 0xFFFFFFFF) ^ (
        (((state[1] << 2) & 0xFFFFFFFF) ^ state[1]) >> 25
    )
    state[2] = (((state[2] & 4294967280) << 17) & 0xFFFFFFFF) ^ (
        (((state[2] << 3) & 0xFFFFFFFF) ^ state[2]) >> 11
    )
    return state[0] ^ state[1] ^ state[2]
