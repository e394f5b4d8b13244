"""Summability kernels and convolution-average diagnostics.

The catalog covers the Cesaro-Riesz family e^{-y}(1-e^{-y})_+^beta, the
Abel kernel e^{-y} e^{-e^{-y}}, the Lambert kernel e^{-y} p(e^{-y}) with
p(u) = (u/(1-e^u))', and a Gaussian for custom experiments.  Each kernel
knows both its additive form K(y) and its multiplicative form
k1(v) = v^{-1} K(-log v), and the convolution average of a remainder
profile can be computed through either; their agreement validates the
k1 algebra.

Diagnostics return a verdict together with the evidence (window sups,
cumulative integrals, fitted slopes): the asymptotic statements they probe
are only checkable as finite-window trends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .counting import RemainderProfile
from .errors import MomentError


@dataclass(frozen=True)
class Kernel:
    """A named summability kernel with its catalog data."""

    name: str
    fn: Callable  # K(y), vectorized
    k1_fn: Callable  # k1(v) = v^{-1} K(-log v), vectorized on v > 0
    hat0: float  # int K, closed form
    y_lo: float  # |K| < 1e-16 outside [y_lo, y_hi]
    y_hi: float
    moment_order: float
    nonneg: bool
    beta: float = 0.0

    def __post_init__(self):
        if self.hat0 == 0:
            raise ValueError("kernel must have nonzero mean")
        num, _ = quad(lambda y: float(self.fn(np.array([y]))[0]), self.y_lo, self.y_hi, limit=400)
        if abs(num - self.hat0) > 1e-7 * max(1.0, abs(self.hat0)):
            raise ValueError(
                f"declared hat0 {self.hat0} disagrees with quadrature {num} for {self.name}"
            )
        mom, _ = quad(
            lambda y: (1.0 + abs(y)) * abs(float(self.fn(np.array([y]))[0])),
            self.y_lo,
            self.y_hi,
            limit=400,
        )
        if not np.isfinite(mom):
            raise ValueError(f"first moment of {self.name} not finite")

    def sample(self, step_h: float):
        """(offsets, values) on the truncation window at grid resolution.

        A kernel whose support starts exactly at 0 (Cesaro-Riesz) gets the
        trapezoid half-weight at the edge sample, which removes the O(h)
        error its jump would otherwise cause in grid convolutions.
        """
        n_lo = int(math.floor(self.y_lo / step_h))
        n_hi = int(math.ceil(self.y_hi / step_h))
        offs = step_h * np.arange(n_lo, n_hi + 1)
        vals = np.asarray(self.fn(offs), float)
        if self.y_lo == 0.0 and n_lo == 0:
            vals = vals.copy()
            vals[0] *= 0.5
        return offs, vals


def kernel_hat0(kernel: Kernel) -> float:
    """K-hat(0) = int K; closed form from the catalog."""
    return kernel.hat0


def cesaro_riesz_kernel(beta: float = 0.0) -> Kernel:
    if beta < 0:
        raise ValueError("beta must be >= 0")

    def fn(y):
        y = np.asarray(y, dtype=float)
        out = np.zeros_like(y)
        m = y >= 0
        out[m] = np.exp(-y[m]) * np.power(-np.expm1(-y[m]), beta)
        return out

    def k1(v):
        v = np.asarray(v, dtype=float)
        return np.power(np.clip(1.0 - v, 0.0, None), beta)

    return Kernel(
        name=f"cesaro-riesz({beta:g})",
        fn=fn,
        k1_fn=k1,
        hat0=1.0 / (beta + 1.0),
        y_lo=0.0,
        y_hi=40.0 + 2.0 * beta,
        moment_order=math.inf,
        nonneg=True,
        beta=beta,
    )


def abel_kernel() -> Kernel:
    def fn(y):
        y = np.asarray(y, dtype=float)
        return np.exp(-y - np.exp(-y))

    def k1(v):
        return np.exp(-np.asarray(v, dtype=float))

    return Kernel(
        name="abel",
        fn=fn,
        k1_fn=k1,
        hat0=1.0,
        y_lo=-3.9,
        y_hi=40.0,
        moment_order=math.inf,
        nonneg=True,
    )


def _lambert_p(u):
    """p(u) = d/du [u/(1-e^u)]; series near 0 (removable singularity)."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = np.abs(u) < 0.5
    us = u[small]
    # -d/du [u/(e^u - 1)] = 1/2 - u/6 + u^3/180 - u^5/5040  (Bernoulli series)
    out[small] = 0.5 - us / 6.0 + us ** 3 / 180.0 - us ** 5 / 5040.0
    ub = u[~small]
    em = np.expm1(ub)  # e^u - 1
    out[~small] = ((-em + ub * (em + 1.0))) / (em * em)
    return out


def lambert_kernel() -> Kernel:
    def fn(y):
        y = np.asarray(y, dtype=float)
        return np.exp(-y) * _lambert_p(np.exp(-y))

    def k1(v):
        return _lambert_p(np.asarray(v, dtype=float))

    return Kernel(
        name="lambert",
        fn=fn,
        k1_fn=k1,
        hat0=1.0,
        y_lo=-4.6,
        y_hi=41.0,
        moment_order=math.inf,
        nonneg=True,
    )


def gaussian_kernel(width: float = 1.0) -> Kernel:
    if width <= 0:
        raise ValueError("width must be positive")
    norm = 1.0 / (width * math.sqrt(2.0 * math.pi))

    def fn(y):
        y = np.asarray(y, dtype=float)
        return norm * np.exp(-0.5 * (y / width) ** 2)

    def k1(v):
        v = np.asarray(v, dtype=float)
        return fn(-np.log(v)) / v

    return Kernel(
        name=f"gaussian({width:g})",
        fn=fn,
        k1_fn=k1,
        hat0=1.0,
        y_lo=-9.5 * width,
        y_hi=9.5 * width,
        moment_order=math.inf,
        nonneg=True,
        beta=width,
    )


def kernel_by_name(name: str, beta: float = 0.0, width: float = 1.0) -> Kernel:
    key = name.strip().lower()
    if key in ("cesaro", "cesaro-riesz", "riesz"):
        return cesaro_riesz_kernel(beta)
    if key == "abel":
        return abel_kernel()
    if key == "lambert":
        return lambert_kernel()
    if key in ("gaussian", "custom"):
        return gaussian_kernel(width)
    raise ValueError(f"unknown kernel {name!r}")


@dataclass
class ConvAverage:
    """Samples of (E * K)(y) with the window where they are trustworthy."""

    kernel_name: str
    step_h: float
    y: np.ndarray
    values: np.ndarray
    y_valid_max: float  # beyond this, missing E data pollutes the average

    def on_valid(self):
        m = self.y <= self.y_valid_max
        return self.y[m], self.values[m]


def conv_average(profile: RemainderProfile, kernel: Kernel) -> ConvAverage:
    """Grid convolution (E * K) over the kernel's truncation window.

    For profiles carrying exact cell means (atomic dN), the means are used
    at cell centers; smooth profiles use their pointwise samples.
    """
    _moment_guard(profile, kernel)
    h = profile.step_h
    if profile.cell_means is not None:
        e_vals = profile.cell_means
        e_start = 0.5 * h
    else:
        e_vals = profile.values
        e_start = 0.0
    offs, kv = kernel.sample(h)
    conv = h * np.convolve(e_vals, kv)
    y0 = e_start + offs[0]
    y = y0 + h * np.arange(conv.size)
    y_valid = profile.y_max + min(0.0, offs[0])
    return ConvAverage(kernel.name, h, y, conv, y_valid)


def conv_average_multiplicative(
    system, kernel: Kernel, y_points, a: float
) -> np.ndarray:
    """(E * K)(y) through the multiplicative form int (N(u)/u) k1(u/x) du.

    Uses the same y-grid discretization as the additive route but goes
    through N and k1 instead of E and K, so agreement between the two
    validates the k1(v) = v^{-1} K(-log v) catalog entries.
    """
    from .measures import stieltjes_exp_poly

    dn = system.dn_measure()
    h = system.step_h
    n = int(round(dn.y_max / h)) + 1
    w = h * np.arange(n)
    t_vals = np.exp(-w) * np.asarray(stieltjes_exp_poly(dn, 0.0, 0, w), float)
    out = np.empty(len(y_points))
    for i, y in enumerate(y_points):
        # e^{-y} (N(u)/u) k1(u/x) du  ==  T(w) e^{w-y} k1(e^{w-y}) dw
        f = t_vals * np.exp(w - y) * np.asarray(kernel.k1_fn(np.exp(w - y)), float)
        window = h * np.sum(np.asarray(kernel.fn(y - w), float))
        out[i] = h * np.sum(f) - a * window
    return out


def _moment_guard(profile: RemainderProfile, kernel: Kernel):
    if not np.isfinite(kernel.moment_order):
        vals = np.abs(profile.values)
        n = vals.size
        if n >= 8 and np.mean(vals[3 * n // 4 :]) > 8.0 * (np.mean(vals[: n // 2]) + 1e-30):
            raise MomentError(
                "remainder grows across the window faster than the kernel's "
                "declared moment capacity (see the PNT growth bound)"
            )


@dataclass
class TrendReport:
    verdict: str
    windows: list
    statistic: list
    slope: float

    def to_jsonable(self):
        return {
            "verdict": self.verdict,
            "windows": self.windows,
            "statistic": self.statistic,
            "slope": self.slope,
        }


def decay_diagnostic(conv: ConvAverage, y_min: float = 1.0) -> TrendReport:
    """Evidence for (E*K)(y) = o(1/y): dyadic-window sups of |y (E*K)(y)|.

    Verdict "consistent with o(1/y)" iff the window sups decrease over the
    last three windows.
    """
    y, v = conv.on_valid()
    stat = []
    wins = []
    j = 0
    while 2.0 ** (j + 1) <= max(y_min, 2.0) or 2.0 ** j < conv.y_valid_max:
        lo, hi = 2.0 ** j, 2.0 ** (j + 1)
        if lo >= conv.y_valid_max:
            break
        m = (y >= lo) & (y < min(hi, conv.y_valid_max))
        if np.any(m):
            wins.append([lo, min(hi, conv.y_valid_max)])
            stat.append(float(np.max(np.abs(y[m] * v[m]))))
        j += 1
    if len(stat) >= 4:
        slope = float(np.polyfit(np.log([w[0] for w in wins[-4:]]), np.log(np.maximum(stat[-4:], 1e-300)), 1)[0])
    else:
        slope = math.nan
    tail = stat[-3:]
    decreasing = len(tail) == 3 and tail[0] > tail[1] > tail[2]
    verdict = "consistent with o(1/y)" if decreasing else "not consistent with o(1/y)"
    return TrendReport(verdict, wins, stat, slope)


def l1_diagnostic(conv: ConvAverage) -> TrendReport:
    """Evidence for E*K in L1: cumulative int_0^Y |E*K| at dyadic Y.

    The verdict looks at the window increments (the mass arriving per
    octave): "consistent with L1" iff their trend over the last full
    windows is non-increasing (mean log-ratio <= 0.05); growing increments
    flag divergence.  Geometric increment decay is the clear-cut case; the
    rule tolerates mass arriving in decaying lumps.
    """
    y, v = conv.on_valid()
    av = np.abs(v)
    ys = []
    cums = []
    j = 0
    while 2.0 ** j <= conv.y_valid_max:
        cut = 2.0 ** j
        m = y <= cut
        ys.append(cut)
        cums.append(float(np.trapezoid(av[m], dx=conv.step_h)))
        j += 1
    increments = [cums[i + 1] - cums[i] for i in range(len(cums) - 1)]
    tail = increments[-3:]
    if len(tail) >= 2 and all(t > 1e-300 for t in tail):
        ratios = [math.log(tail[i + 1] / tail[i]) for i in range(len(tail) - 1)]
        slope = float(np.mean(ratios))
    elif tail and tail[-1] <= 1e-300:
        slope = -math.inf
    else:
        slope = math.nan
    verdict = "consistent with L1" if slope <= 0.05 else "not consistent with L1"
    return TrendReport(verdict, [[ys[i], ys[i + 1]] for i in range(len(increments))],
                       increments, slope)


def b_constant(profile: RemainderProfile, kernel: Kernel, a: float):
    """b = hat0^{-1} int (E*K) over the data window, and c = -b/a - 1.

    Returns (b, c, truncation note).  The unreported tail of the integral is
    the E-tail beyond the window; callers combine this with the profile's
    tail estimate.
    """
    conv = conv_average(profile, kernel)
    total = float(np.sum(conv.values) * conv.step_h)
    b = total / kernel.hat0
    c = -b / a - 1.0
    note = f"integral over y in [{conv.y[0]:.2f}, {conv.y[-1]:.2f}]"
    return b, c, note


def domination_constant(kernel: Kernel) -> float:
    """C with C^{-1} = int_{-inf}^0 e^y K(y) dy (positivity domination)."""
    val, _ = quad(
        lambda y: math.exp(y) * float(kernel.fn(np.array([y]))[0]),
        kernel.y_lo,
        0.0,
        limit=400,
    )
    if val <= 0:
        raise ValueError("kernel has no mass on y < 0")
    return 1.0 / val
