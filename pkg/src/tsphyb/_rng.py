"""Seedable splitmix64 stream usable from both Python and jitted kernels.

numpy's Generator cannot be called inside nopython kernels, so the whole
library draws from one tiny explicit-state PRNG instead.  The state is a
one-element uint64 array that is threaded through every stochastic kernel,
which makes runs bit-reproducible for a fixed seed regardless of how the
work is batched.
"""

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_DBL = 1.0 / 9007199254740992.0  # 2**-53


def new_state(seed: int) -> np.ndarray:
    """Fresh stream state for a 64-bit seed."""
    return np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF)], dtype=np.uint64)


@njit(cache=True)
def next_u64(state):
    state[0] += _GOLDEN
    z = state[0]
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True)
def rand_u01(state):
    """Uniform float in [0, 1)."""
    return (next_u64(state) >> np.uint64(11)) * _DBL


@njit(cache=True)
def rand_below(state, k):
    """Uniform integer in [0, k); unbiased via rejection."""
    ku = np.uint64(k)
    rem = (np.uint64(0) - ku) % ku  # == 2**64 mod k
    while True:
        x = next_u64(state)
        if x >= rem:
            return np.int64(x % ku)


@njit(cache=True)
def rand_normal(state):
    """Standard normal via Box-Muller (no cached spare)."""
    u1 = 1.0 - rand_u01(state)
    u2 = rand_u01(state)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(6.283185307179586 * u2)


@njit(cache=True)
def fill_u01(state, out):
    flat = out.ravel()
    for i in range(flat.size):
        flat[i] = rand_u01(state)


@njit(cache=True)
def fill_uniform(state, out, lo, hi):
    flat = out.ravel()
    span = hi - lo
    for i in range(flat.size):
        flat[i] = lo + span * rand_u01(state)


@njit(cache=True)
def fill_normal(state, out):
    flat = out.ravel()
    for i in range(flat.size):
        flat[i] = rand_normal(state)


@njit(cache=True)
def shuffle_ints(state, arr):
    """In-place Fisher-Yates."""
    for i in range(arr.shape[0] - 1, 0, -1):
        j = rand_below(state, i + 1)
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp
