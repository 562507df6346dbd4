"""
Modular elimination kernels.

Row reduction over GF(p) for primes p < 2**31, so that a product of two
residues fits comfortably in int64.  Two implementations with the same
contract are provided: a numba-compiled triple loop and a row-vectorised
numpy version.  The numba path is used unless the environment variable
``PROLONGATION_NO_NUMBA`` is set to a non-empty value other than ``0``, or
numba cannot be imported.
"""

import os

import numpy as np

_DISABLE = os.environ.get("PROLONGATION_NO_NUMBA", "").strip() not in ("", "0")

try:
    if _DISABLE:
        raise ImportError("numba disabled by PROLONGATION_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False


def _inv_mod(a, p):
    # extended Euclid; a is a nonzero residue
    t, new_t = 0, 1
    r, new_r = p, a
    while new_r != 0:
        q = r // new_r
        t, new_t = new_t, t - q * new_t
        r, new_r = new_r, r - q * new_r
    if t < 0:
        t += p
    return t


def rref_mod_p_numpy(a, p):
    """Reduced row echelon form of ``a`` over GF(p).

    ``a`` is an int64 array with entries in [0, p); it is not modified.
    Returns ``(R, pivots, rank)`` where ``pivots`` is an int64 array whose
    first ``rank`` entries are the pivot columns.
    """
    R = np.array(a, dtype=np.int64, copy=True)
    m, n = R.shape
    pivots = np.full(min(m, n), -1, dtype=np.int64)
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            R[[r, piv]] = R[[piv, r]]
        inv = _inv_mod(int(R[r, c]), p)
        R[r] = (R[r] * inv) % p
        col = R[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            R[rows] = (R[rows] - (col[rows, None] * R[r]) % p) % p
        pivots[r] = c
        r += 1
    return R, pivots, r


if HAVE_NUMBA:

    @njit(cache=True)
    def _inv_mod_nb(a, p):
        t, new_t = 0, 1
        r, new_r = p, a
        while new_r != 0:
            q = r // new_r
            t, new_t = new_t, t - q * new_t
            r, new_r = new_r, r - q * new_r
        if t < 0:
            t += p
        return t

    @njit(cache=True)
    def _rref_mod_p_nb(a, p):
        R = a.copy()
        m, n = R.shape
        pivots = np.full(min(m, n), -1, dtype=np.int64)
        r = 0
        for c in range(n):
            if r == m:
                break
            piv = -1
            for i in range(r, m):
                if R[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(n):
                    tmp = R[r, j]
                    R[r, j] = R[piv, j]
                    R[piv, j] = tmp
            inv = _inv_mod_nb(R[r, c], p)
            for j in range(c, n):
                R[r, j] = (R[r, j] * inv) % p
            for i in range(m):
                if i == r:
                    continue
                f = R[i, c]
                if f == 0:
                    continue
                for j in range(c, n):
                    R[i, j] = (R[i, j] - f * R[r, j]) % p
            pivots[r] = c
            r += 1
        return R, pivots, r

    def rref_mod_p_numba(a, p):
        a = np.ascontiguousarray(a, dtype=np.int64)
        if a.size == 0:
            return rref_mod_p_numpy(a, p)
        return _rref_mod_p_nb(a, np.int64(p))

    rref_mod_p = rref_mod_p_numba
else:
    rref_mod_p_numba = None
    rref_mod_p = rref_mod_p_numpy


def backend_name():
    return "numba" if rref_mod_p is not rref_mod_p_numpy else "numpy"
