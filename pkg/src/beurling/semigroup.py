"""Exact arithmetic for discrete systems.

Enumerates the free multiplicative semigroup over a generator list
(every nondecreasing-index word appears once, so equal generator values
contribute separate atoms), annotates each word with its von Mangoldt
weight and Moebius sign, and discretizes continuous prime distributions
into generator lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ._dispatch import count_words, fill_words
from .errors import DomainError, OutOfRangeError, SizeError
from .measures import TIE_EPS, LogGridMeasure

DEFAULT_MAX_ATOMS = 1 << 25


def sieve_primes(limit: int) -> np.ndarray:
    """Primes <= limit by Eratosthenes (float array, ready for log arithmetic)."""
    limit = int(limit)
    if limit < 2:
        return np.empty(0)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, int(limit ** 0.5) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.nonzero(is_p)[0].astype(float)


def mobius_sieve(limit: int) -> np.ndarray:
    """mu(0..limit) as int8 (mu(0) set to 0)."""
    limit = int(limit)
    mu = np.ones(limit + 1, dtype=np.int64)
    mu[0] = 0
    primes = sieve_primes(int(limit ** 0.5) + 1).astype(int)
    for p in primes:
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    # fix sign for numbers with a prime factor > sqrt(limit): each such n
    # has exactly one, so flip once more where the remaining cofactor is > 1
    n = np.arange(limit + 1)
    prod = np.ones(limit + 1, dtype=float)
    for p in primes:
        k = p
        while k <= limit:
            prod[k::k] *= p
            k *= p
    big = (np.abs(prod) < n) & (mu != 0)
    mu[big] *= -1
    return mu.astype(np.int8)


@dataclass(frozen=True)
class PrimeSystem:
    """Sorted generator list; repeated values are distinct free generators."""

    primes: np.ndarray
    source: str = "explicit"

    def __post_init__(self):
        p = np.ascontiguousarray(np.asarray(self.primes, dtype=float))
        if p.size == 0:
            raise ValueError("empty generator list")
        if np.any(np.diff(p) < 0):
            p = np.sort(p, kind="stable")
        if p[0] <= 1.0:
            raise DomainError("generators must exceed 1")
        object.__setattr__(self, "primes", p)

    @property
    def log_primes(self) -> np.ndarray:
        return np.log(self.primes)

    def pi(self, x) -> np.ndarray | float:
        """Generator counting function (with multiplicity)."""
        return np.searchsorted(self.primes, np.asarray(x, dtype=float) * (1.0 + 4e-16), side="right")


def pi_to_capital_pi(system: PrimeSystem, x: float) -> float:
    """Pi(x) = sum_k pi(x^{1/k})/k; the sum stops once x^{1/k} < p_1."""
    if x < 1.0:
        raise DomainError("x must be >= 1")
    p1 = system.primes[0]
    total = 0.0
    k = 1
    while x ** (1.0 / k) >= p1:
        total += float(system.pi(x ** (1.0 / k))) / k
        k += 1
    return total


@dataclass
class EnumeratedSemigroup:
    """Sorted word stream as parallel arrays, with cached prefix sums."""

    log_value: np.ndarray
    lam: np.ndarray
    mob: np.ndarray  # int8 in {-1, 0, 1}
    log_x_max: float
    _cumsums: dict = field(default_factory=dict, repr=False)

    @property
    def value(self) -> np.ndarray:
        return np.exp(self.log_value)

    def __len__(self):
        return self.log_value.size

    def _upto(self, x) -> int:
        lx = np.log(np.asarray(x, dtype=float))
        if np.any(lx > self.log_x_max + TIE_EPS):
            raise OutOfRangeError(f"x beyond enumeration cutoff e^{self.log_x_max:.6g}")
        return np.searchsorted(self.log_value, lx + TIE_EPS, side="right")

    def _cum(self, key: str) -> np.ndarray:
        cs = self._cumsums.get(key)
        if cs is None:
            if key == "count":
                term = np.ones_like(self.log_value)
            elif key == "inv":
                term = np.exp(-self.log_value)
            elif key == "lam":
                term = self.lam
            elif key == "lam_inv":
                term = self.lam * np.exp(-self.log_value)
            elif key == "mob":
                term = self.mob.astype(float)
            elif key == "mob_inv":
                term = self.mob * np.exp(-self.log_value)
            else:
                raise KeyError(key)
            cs = np.concatenate([[0.0], np.cumsum(term)])
            self._cumsums[key] = cs
        return cs

    def counting(self, x):
        """N(x): number of words with value <= x."""
        return self._cum("count")[self._upto(x)]

    def sum_inverse(self, x):
        """sum 1/n over words <= x."""
        return self._cum("inv")[self._upto(x)]

    def chebyshev(self, x):
        """psi(x) = sum Lambda(n) over words <= x."""
        return self._cum("lam")[self._upto(x)]

    def chebyshev_over(self, x):
        """psi_1(x) = sum Lambda(n)/n over words <= x."""
        return self._cum("lam_inv")[self._upto(x)]

    def mertens(self, x):
        """M(x) = sum mu(n) over words <= x."""
        return self._cum("mob")[self._upto(x)]

    def mertens_over(self, x):
        """m(x) = sum mu(n)/n over words <= x."""
        return self._cum("mob_inv")[self._upto(x)]

    def dn_measure(self, step_h: float) -> LogGridMeasure:
        """Purely atomic dN (equal log values merge; counting is by weight)."""
        uniq, counts = np.unique(np.round(self.log_value / TIE_EPS).astype(np.int64), return_counts=True)
        first = np.searchsorted(np.round(self.log_value / TIE_EPS).astype(np.int64), uniq)
        return LogGridMeasure(
            step_h, self.log_x_max, None, self.log_value[first], counts.astype(float), positive=True
        )


def enumerate_semigroup(
    system: PrimeSystem, x_max: float, max_atoms: int = DEFAULT_MAX_ATOMS
) -> EnumeratedSemigroup:
    """All generator words with value <= x_max, sorted by log value.

    Runs a counting pass first so the memory footprint is known before any
    allocation; raises SizeError with the exact bound when over budget.
    """
    if x_max < 1.0:
        raise DomainError("x_max must be >= 1")
    logp = np.ascontiguousarray(system.log_primes)
    log_limit = float(np.log(x_max))
    n = int(count_words(logp, log_limit, TIE_EPS))
    if n > max_atoms:
        raise SizeError(n, max_atoms)
    logv = np.empty(n)
    lam = np.empty(n)
    mob = np.empty(n, dtype=np.int8)
    filled = int(fill_words(logp, log_limit, TIE_EPS, logv, lam, mob))
    if filled != n:
        raise RuntimeError("enumeration count/fill mismatch")
    order = np.argsort(logv, kind="stable")
    return EnumeratedSemigroup(logv[order], lam[order], mob[order], log_limit)


def pi_measure_from_primes(
    system: PrimeSystem, x_max: float, step_h: float
) -> LogGridMeasure:
    """Atomic dPi: weight 1/k at each p^k <= x_max (exact positions)."""
    logp = system.log_primes
    log_limit = np.log(x_max)
    ys = []
    ws = []
    k = 1
    while True:
        sel = k * logp <= log_limit + TIE_EPS
        if not np.any(sel):
            break
        ys.append(k * logp[sel])
        ws.append(np.full(int(np.count_nonzero(sel)), 1.0 / k))
        k += 1
    y = np.concatenate(ys) if ys else np.empty(0)
    w = np.concatenate(ws) if ws else np.empty(0)
    order = np.argsort(y, kind="stable")
    return LogGridMeasure(step_h, log_limit, None, y[order], w[order], positive=True)


def discretize(
    pi_distribution,
    k_max: int,
    density=None,
    x_upper: float = None,
    residual_tol: float = 1e-10,
) -> PrimeSystem:
    """Generators p_k = Pi^{-1}(k), k = 1..k_max, for a continuous Pi.

    Uses a log-spaced table of Pi values for initial brackets, a vectorized
    Newton refinement where the density is available, and a bracketed root
    fallback elsewhere.  The residual |Pi(p_k) - k| is polished below
    residual_tol (relative to the supplied callable's own rounding).
    """
    k_max = int(k_max)
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    vec = _vectorized(pi_distribution)
    evaluate = pi_distribution if vec else (
        lambda xs: np.array([pi_distribution(float(x)) for x in np.atleast_1d(xs)])
    )
    # bracket the top root
    lo = 1.0 + 1e-9
    hi = 4.0
    it = 0
    while float(evaluate(np.array([hi]))[0]) < k_max + 1.0:
        hi *= 4.0
        it += 1
        if (x_upper is not None and hi > 4.0 * x_upper) or it > 600:
            raise OutOfRangeError(f"Pi does not reach {k_max} below the cutoff")
    # initial guesses from a monotone log-spaced table
    table_x = np.exp(np.linspace(np.log(lo), np.log(hi), 8192))
    table_pi = np.maximum.accumulate(evaluate(table_x))
    ks = np.arange(1.0, k_max + 1.0)
    p = np.interp(ks, table_pi, table_x)

    if density is not None:
        lo_br = np.interp(ks - 0.5, table_pi, table_x)
        hi_br = np.interp(ks + 0.5, table_pi, table_x)
        best = None
        for it in range(40):
            r = evaluate(p) - ks
            worst = float(np.max(np.abs(r)))
            if best is not None and worst >= best - 1e-13 and worst < 1e-6:
                break
            best = worst if best is None else min(best, worst)
            d = np.asarray(density(p), dtype=float)
            ok = np.isfinite(d) & (d > 0)
            step = np.where(ok, r / np.where(ok, d, 1.0), 0.0)
            if it < 8:
                # bracketed phase: keep iterates between neighbor roots
                p = np.clip(p - step, lo_br, hi_br)
            else:
                # free quadratic phase near the roots
                p = p - step
            if worst < 0.25 * residual_tol:
                break
        bad = np.abs(evaluate(p) - ks) > residual_tol
    else:
        bad = np.ones(k_max, dtype=bool)

    if np.any(bad):
        scalar_pi = (lambda x: float(evaluate(np.array([x]))[0]))
        for i in np.nonzero(bad)[0]:
            k = float(ks[i])
            a = p[i - 1] if i > 0 else lo
            root = brentq(lambda x: scalar_pi(x) - k, a, hi, xtol=1e-13, rtol=8.9e-16)
            if density is not None:
                for _ in range(4):
                    d = float(density(np.array([root]))[0])
                    if d > 1e-12:
                        root -= (scalar_pi(root) - k) / d
            p[i] = root
    if np.any(np.diff(p) <= 0):
        raise ValueError("discretization produced non-increasing generators")
    return PrimeSystem(p, source="discretized")


def _vectorized(fn) -> bool:
    try:
        out = fn(np.array([2.0, 3.0]))
        return np.asarray(out).shape == (2,)
    except Exception:
        return False


def chebyshev_identity_max_residual(system: PrimeSystem, x_max: float) -> float:
    """max over enumerated words of |sum_{d e = n} Lambda(d) - log n|.

    The divisor sum runs over factorizations in the free semigroup and uses
    the enumeration's own Lambda annotations for the prime-power divisors,
    so it cross-checks the annotation against the word algebra.
    """
    enum = enumerate_semigroup(system, x_max)
    # Lambda annotations of the enumerated prime powers, keyed by log position
    logp = system.log_primes
    lam_table = {}
    for lv, lm in zip(enum.log_value, enum.lam):
        if lm != 0.0:
            lam_table[round(lv / TIE_EPS)] = lm
    limit = np.log(x_max) + TIE_EPS
    worst = 0.0

    def lam_at(pos):
        key = round(pos / TIE_EPS)
        for k in (key, key - 1, key + 1):
            lam = lam_table.get(k)
            if lam is not None:
                return lam
        raise RuntimeError(f"prime power at log position {pos} missing from enumeration")

    def rec(start, exps, logv):
        nonlocal worst
        if exps:
            divisor_sum = 0.0
            for j, a in exps.items():
                for b in range(1, a + 1):
                    divisor_sum += lam_at(b * logp[j])
            worst = max(worst, abs(divisor_sum - logv))
        for j in range(start, logp.size):
            nv = logv + logp[j]
            if nv > limit:
                break
            exps[j] = exps.get(j, 0) + 1
            rec(j, exps, nv)
            exps[j] -= 1
            if exps[j] == 0:
                del exps[j]

    rec(0, {}, 0.0)
    return worst


def save_primes(path, system: PrimeSystem):
    """Line-delimited decimal text, full round-trip precision."""
    with open(path, "w", encoding="utf-8") as fh:
        for p in system.primes:
            fh.write(repr(float(p)) + "\n")


def load_primes(path, source: str = "explicit") -> PrimeSystem:
    with open(path, "r", encoding="utf-8") as fh:
        vals = [float(line) for line in fh if line.strip()]
    return PrimeSystem(np.array(vals), source=source)
