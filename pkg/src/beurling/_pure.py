"""Pure NumPy/Python fallback for the hot kernels.

Same contracts as the compiled module ``beurling._native``; used when the
extension is unavailable (or forced via BEURLING_FORCE_PURE=1).  The word
enumeration walks the free commutative semigroup over the generators as
nondecreasing-index words so every distinct factorization appears exactly
once; the Volterra marches solve the triangular systems produced by the
trapezoid discretization of the convolution identities.
"""

import numpy as np


def count_words(log_primes, log_limit, tie_eps):
    """Number of nondecreasing-index generator words with log-value <= limit."""
    logp = np.asarray(log_primes, dtype=float)
    k = logp.size
    limit = log_limit + tie_eps
    if k == 0 or logp[0] > limit:
        return 1  # the empty word
    count = 1
    # frame: [last_idx, logv, next_child]
    stack = [(0, 0.0, 0)]
    # the root's children start at index 0; emulate with a sentinel frame
    stack = [(-1, 0.0, 0)]
    while stack:
        li, logv, nj = stack[-1]
        if nj < k and logv + logp[nj] <= limit:
            stack[-1] = (li, logv, nj + 1)
            count += 1
            stack.append((nj, logv + logp[nj], nj))
        else:
            stack.pop()
    return count


def fill_words(log_primes, log_limit, tie_eps, out_logv, out_lam, out_mob):
    """Fill preallocated arrays with (log value, Lambda, mu) per word.

    Returns the number of words written.  Arrays must be large enough
    (use count_words first).  Word order is DFS order, not sorted.
    """
    logp = np.asarray(log_primes, dtype=float)
    k = logp.size
    limit = log_limit + tie_eps
    n = 0
    out_logv[n] = 0.0
    out_lam[n] = 0.0
    out_mob[n] = 1
    n += 1
    if k == 0 or logp[0] > limit:
        return n
    # frame: (last_idx, last_exp, r_distinct, has_square, logv, next_child)
    stack = [[-1, 0, 0, False, 0.0, 0]]
    while stack:
        top = stack[-1]
        li, le, r, sq, logv, nj = top
        if nj < k and logv + logp[nj] <= limit:
            top[5] = nj + 1
            if nj == li:
                child = [nj, le + 1, r, True, logv + logp[nj], nj]
            else:
                child = [nj, 1, r + 1, sq, logv + logp[nj], nj]
            out_logv[n] = child[4]
            out_lam[n] = logp[child[0]] if child[2] == 1 else 0.0
            if child[3]:
                out_mob[n] = 0
            else:
                out_mob[n] = -1 if (child[2] & 1) else 1
            n += 1
            stack.append(child)
        else:
            stack.pop()
    return n


def march_n_from_psi(sigma_psi, h, sigma_n0):
    """Trapezoid march for y*s_N(y) = s_psi(y) + int_0^y s_N(y-w) s_psi(w) dw.

    s_psi must vanish at y = 0 (the log weight kills the origin), so the
    unknown never appears inside the convolution term.
    """
    sp = np.asarray(sigma_psi, dtype=float)
    n = sp.size
    sn = np.zeros(n)
    sn[0] = sigma_n0
    for j in range(1, n):
        conv = 0.5 * sn[0] * sp[j]
        if j > 1:
            conv += np.dot(sn[j - 1:0:-1], sp[1:j])
        sn[j] = (sp[j] + h * conv) / (j * h)
    return sn


def march_inverse(sigma_n, h):
    """Trapezoid march for the convolution inverse of (delta_0 + s_N dy).

    Solves s_M(y) = -s_N(y) - int_0^y s_M(w) s_N(y-w) dw.
    """
    sn = np.asarray(sigma_n, dtype=float)
    n = sn.size
    sm = np.zeros(n)
    sm[0] = -sn[0]
    denom = 1.0 + 0.5 * h * sn[0]
    for j in range(1, n):
        conv = 0.5 * sm[0] * sn[j]
        if j > 1:
            conv += np.dot(sm[1:j], sn[j - 1:0:-1])
        sm[j] = -(sn[j] + h * conv) / denom
    return sm
