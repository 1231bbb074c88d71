"""Compiled inner loops for the censuses.

Each kernel walks the cycle of 0 under a permutation assembled on the
fly from a coefficient pair, so memory stays O(p) per thread no matter
how many pairs are queued.  Results are plain boolean arrays indexed
like the inputs; parallel execution cannot change them.
"""

import numba
import numpy as np

# the portable layer; avoids probing TBB/OpenMP at import time
numba.config.THREADING_LAYER = "workqueue"


@numba.njit(cache=True, parallel=True)
def row01_full_cycle_bits(A, B, res_plus, p):
    """bits[k]: the row-0-to-1 permutation of the (A[k], B[k]) square is a
    single p-cycle."""
    m = len(A)
    out = np.zeros(m, dtype=np.bool_)
    for r in numba.prange(m):
        a = A[r]
        b = B[r]
        f = np.empty(p, dtype=np.int64)
        finv = np.empty(p, dtype=np.int64)
        f[0] = 0
        for x in range(1, p):
            f[x] = (a * x if res_plus[x] else b * x) % p
        for x in range(p):
            finv[f[x]] = x
        # r01(j) = f(finv(j) - 1) + 1; walk the cycle through 0
        x = (f[(finv[0] - 1) % p] + 1) % p
        count = 1
        while x != 0:
            x = (f[(finv[x] - 1) % p] + 1) % p
            count += 1
        out[r] = count == p
    return out


@numba.njit(cache=True, parallel=True)
def sym01_full_cycle_bits(A, B, res_plus, p, c):
    """bits[k]: the symbol permutation between symbols 0 and c of the
    (A[k], B[k]) square is a single p-cycle."""
    m = len(A)
    out = np.zeros(m, dtype=np.bool_)
    for r in numba.prange(m):
        a = A[r]
        b = B[r]
        ginv = np.empty(p, dtype=np.int64)
        perm = np.empty(p, dtype=np.int64)
        ginv[0] = 0
        for x in range(1, p):
            fx = (a * x if res_plus[x] else b * x) % p
            ginv[(fx - x) % p] = x
        for k in range(p):
            r0 = (k - ginv[(p - k) % p]) % p
            r1 = (k - ginv[(c - k) % p]) % p
            perm[r0] = r1
        x = perm[0]
        count = 1
        while x != 0:
            x = perm[x]
            count += 1
        out[r] = count == p
    return out
