"""Compiled XOR + popcount scan kernels.

All kernels are single-threaded. Codes are ``(rows, blocks)`` uint64 arrays.
"""

import numpy as np
from numba import njit

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(inline="always")
def popcount64(x):
    # SWAR count; LLVM lowers this to popcnt where the target has it
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return (x * _H01) >> np.uint64(56)


@njit(cache=True)
def hamming_to_all(codes, query):
    n, nb = codes.shape
    out = np.empty(n, np.int64)
    for i in range(n):
        d = 0
        for j in range(nb):
            d += popcount64(codes[i, j] ^ query[j])
        out[i] = d
    return out


@njit(cache=True)
def topk_hamming(codes, query, k):
    """Indices and distances of the ``k`` smallest Hamming distances.

    Single pass with a sorted buffer of size ``k``; ties keep the lower index
    because a candidate only displaces a strictly worse entry.
    """
    n, nb = codes.shape
    k = min(k, n)
    dist = np.empty(k, np.int64)
    idx = np.empty(k, np.int64)
    size = 0
    for i in range(n):
        d = 0
        for j in range(nb):
            d += popcount64(codes[i, j] ^ query[j])
        if size < k:
            p = size
            size += 1
        elif d < dist[k - 1]:
            p = k - 1
        else:
            continue
        while p > 0 and dist[p - 1] > d:
            dist[p] = dist[p - 1]
            idx[p] = idx[p - 1]
            p -= 1
        dist[p] = d
        idx[p] = i
    return idx, dist
