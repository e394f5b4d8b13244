# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled core: semigroup word enumeration and Volterra marches.

Mirrors beurling._pure; see that module for the algorithmic contracts.
"""

import numpy as np

cimport numpy as cnp
from libc.stdlib cimport free, malloc

cnp.import_array()

# Words never get longer than log(x)/log(p1); 128 covers p1 > 1 + 2^-20
# at every cutoff this package accepts.
DEF MAX_DEPTH = 4096


def count_words(double[::1] log_primes, double log_limit, double tie_eps):
    cdef Py_ssize_t k = log_primes.shape[0]
    cdef double limit = log_limit + tie_eps
    cdef long long count = 1
    cdef Py_ssize_t depth, nj
    if k == 0 or log_primes[0] > limit:
        return 1
    cdef Py_ssize_t *li = <Py_ssize_t *> malloc(MAX_DEPTH * sizeof(Py_ssize_t))
    cdef Py_ssize_t *nxt = <Py_ssize_t *> malloc(MAX_DEPTH * sizeof(Py_ssize_t))
    cdef double *logv = <double *> malloc(MAX_DEPTH * sizeof(double))
    if li == NULL or nxt == NULL or logv == NULL:
        free(li); free(nxt); free(logv)
        raise MemoryError()
    try:
        depth = 0
        li[0] = -1
        nxt[0] = 0
        logv[0] = 0.0
        while depth >= 0:
            nj = nxt[depth]
            if nj < k and logv[depth] + log_primes[nj] <= limit:
                nxt[depth] = nj + 1
                count += 1
                if depth + 1 >= MAX_DEPTH:
                    raise RuntimeError("word depth exceeded")
                li[depth + 1] = nj
                nxt[depth + 1] = nj
                logv[depth + 1] = logv[depth] + log_primes[nj]
                depth += 1
            else:
                depth -= 1
        return count
    finally:
        free(li); free(nxt); free(logv)


def fill_words(double[::1] log_primes, double log_limit, double tie_eps,
               double[::1] out_logv, double[::1] out_lam, signed char[::1] out_mob):
    cdef Py_ssize_t k = log_primes.shape[0]
    cdef double limit = log_limit + tie_eps
    cdef Py_ssize_t n = 0
    cdef Py_ssize_t depth, nj
    out_logv[0] = 0.0
    out_lam[0] = 0.0
    out_mob[0] = 1
    n = 1
    if k == 0 or log_primes[0] > limit:
        return n
    cdef Py_ssize_t *li = <Py_ssize_t *> malloc(MAX_DEPTH * sizeof(Py_ssize_t))
    cdef Py_ssize_t *nxt = <Py_ssize_t *> malloc(MAX_DEPTH * sizeof(Py_ssize_t))
    cdef int *rdist = <int *> malloc(MAX_DEPTH * sizeof(int))
    cdef int *lexp = <int *> malloc(MAX_DEPTH * sizeof(int))
    cdef signed char *sq = <signed char *> malloc(MAX_DEPTH * sizeof(signed char))
    cdef double *logv = <double *> malloc(MAX_DEPTH * sizeof(double))
    if li == NULL or nxt == NULL or rdist == NULL or lexp == NULL or sq == NULL or logv == NULL:
        free(li); free(nxt); free(rdist); free(lexp); free(sq); free(logv)
        raise MemoryError()
    cdef int r
    cdef signed char has_sq
    try:
        depth = 0
        li[0] = -1
        nxt[0] = 0
        rdist[0] = 0
        lexp[0] = 0
        sq[0] = 0
        logv[0] = 0.0
        while depth >= 0:
            nj = nxt[depth]
            if nj < k and logv[depth] + log_primes[nj] <= limit:
                nxt[depth] = nj + 1
                if depth + 1 >= MAX_DEPTH:
                    raise RuntimeError("word depth exceeded")
                if nj == li[depth]:
                    r = rdist[depth]
                    has_sq = 1
                    lexp[depth + 1] = lexp[depth] + 1
                else:
                    r = rdist[depth] + 1
                    has_sq = sq[depth]
                    lexp[depth + 1] = 1
                li[depth + 1] = nj
                nxt[depth + 1] = nj
                rdist[depth + 1] = r
                sq[depth + 1] = has_sq
                logv[depth + 1] = logv[depth] + log_primes[nj]
                out_logv[n] = logv[depth + 1]
                out_lam[n] = log_primes[nj] if r == 1 else 0.0
                if has_sq:
                    out_mob[n] = 0
                else:
                    out_mob[n] = -1 if (r & 1) else 1
                n += 1
                depth += 1
            else:
                depth -= 1
        return n
    finally:
        free(li); free(nxt); free(rdist); free(lexp); free(sq); free(logv)


def march_n_from_psi(double[::1] sigma_psi, double h, double sigma_n0):
    cdef Py_ssize_t n = sigma_psi.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n)
    cdef double[::1] sn = out
    cdef Py_ssize_t j, k
    cdef double conv
    sn[0] = sigma_n0
    for j in range(1, n):
        conv = 0.5 * sn[0] * sigma_psi[j]
        for k in range(1, j):
            conv += sn[j - k] * sigma_psi[k]
        sn[j] = (sigma_psi[j] + h * conv) / (j * h)
    return out


def march_inverse(double[::1] sigma_n, double h):
    cdef Py_ssize_t n = sigma_n.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n)
    cdef double[::1] sm = out
    cdef Py_ssize_t j, k
    cdef double conv
    cdef double denom = 1.0 + 0.5 * h * sigma_n[0]
    sm[0] = -sigma_n[0]
    for j in range(1, n):
        conv = 0.5 * sm[0] * sigma_n[j]
        for k in range(1, j):
            conv += sm[k] * sigma_n[j - k]
        sm[j] = -(sigma_n[j] + h * conv) / denom
    return out
