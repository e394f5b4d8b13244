"""Measure algebra on [1, oo) in logarithmic coordinates.

A measure is stored in y = log x coordinates as an optional uniformly
sampled density plus a sorted list of exact atoms.  Multiplicative
convolution of measures on [1, oo) becomes additive convolution in y,
so the algebra reduces to discrete convolutions on the grid, exact
position sums for atoms, and exact shifts for the mixed terms.

Purely atomic measures are handled exactly (no grid involved): the
Volterra solvers below have dedicated atomic modes driven by a heap of
candidate positions, which is what makes discrete systems reproduce
their semigroup enumeration to rounding accuracy.
"""

from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AtomAlignmentWarning,
    DomainError,
    GridMismatchError,
    MassError,
    NotInvertibleError,
    OutOfRangeError,
    SizeError,
)

DEFAULT_STEP_H = 2.0 ** -8
# Tie rule for comparing log positions; also the atom-merge tolerance.
TIE_EPS = 2.0 ** -40
# Safety cap for dynamically generated atom sets (convolution inverses).
MAX_GENERATED_ATOMS = 1 << 23

_EMPTY = np.empty(0)


def _as_sorted_atoms(atoms_y, atoms_w):
    y = np.ascontiguousarray(np.asarray(atoms_y, dtype=float))
    w = np.ascontiguousarray(np.asarray(atoms_w, dtype=float))
    if y.size != w.size:
        raise ValueError("atom position/weight arrays differ in length")
    if y.size and np.any(np.diff(y) < 0):
        order = np.argsort(y, kind="stable")
        y, w = y[order], w[order]
    return y, w


@dataclass(frozen=True)
class LogGridMeasure:
    """Measure on [1, oo): sampled density plus atoms, in y = log x coordinates.

    density[j] is the density (with respect to dy) at y = j*step_h; the
    stored y_max always equals (len(density)-1)*step_h for sampled measures.
    For purely atomic measures density is None and y_max is the declared
    support cutoff.  A density sigma(y) in y corresponds to e^y * rho(e^y)
    for a measure rho(u) du on the x side.
    """

    step_h: float
    y_max: float
    density: np.ndarray | None = None
    atoms_y: np.ndarray = field(default_factory=lambda: _EMPTY)
    atoms_w: np.ndarray = field(default_factory=lambda: _EMPTY)
    positive: bool = False

    def __post_init__(self):
        if not (self.step_h > 0):
            raise ValueError("step_h must be positive")
        y, w = _as_sorted_atoms(self.atoms_y, self.atoms_w)
        object.__setattr__(self, "atoms_y", y)
        object.__setattr__(self, "atoms_w", w)
        if y.size and y[0] < -TIE_EPS:
            raise ValueError("atom below y = 0 (support must be in [1, oo))")
        if self.density is not None:
            d = np.ascontiguousarray(np.asarray(self.density, dtype=float))
            if d.size < 2:
                raise ValueError("density needs at least two samples")
            object.__setattr__(self, "density", d)
            object.__setattr__(self, "y_max", (d.size - 1) * self.step_h)
        if not (self.y_max > 0):
            raise ValueError("y_max must be positive")

    # -- basic queries ----------------------------------------------------

    @property
    def grid(self) -> np.ndarray:
        if self.density is None:
            raise ValueError("purely atomic measure has no grid")
        return self.step_h * np.arange(self.density.size)

    @property
    def is_atomic(self) -> bool:
        return self.density is None

    def total_variation(self) -> float:
        tv = float(np.sum(np.abs(self.atoms_w))) if self.atoms_w.size else 0.0
        if self.density is not None:
            tv += float(np.trapezoid(np.abs(self.density), dx=self.step_h))
        return tv

    def validate(self):
        """Check the structural invariants; raises on violation."""
        if self.atoms_y.size:
            if np.any(np.diff(self.atoms_y) <= 0):
                raise ValueError("atoms not strictly sorted")
            if not np.all(np.isfinite(self.atoms_w)):
                raise ValueError("non-finite atom weight")
            if self.positive and np.any(self.atoms_w <= 0):
                raise ValueError("positive measure with non-positive atom")
        if self.density is not None:
            if not np.all(np.isfinite(self.density)):
                raise ValueError("non-finite density sample")
            if self.positive and np.any(self.density < 0):
                raise ValueError("positive measure with negative density")
        return self

    def scaled(self, c: float) -> "LogGridMeasure":
        return LogGridMeasure(
            self.step_h,
            self.y_max,
            None if self.density is None else c * self.density,
            self.atoms_y,
            c * self.atoms_w,
            positive=self.positive and c > 0,
        )

    def plus(self, other: "LogGridMeasure") -> "LogGridMeasure":
        """Sum of measures on the common cutoff."""
        if abs(self.step_h - other.step_h) > TIE_EPS:
            raise GridMismatchError(
                f"step_h mismatch: {self.step_h} vs {other.step_h}"
            )
        if (self.density is None) != (other.density is None):
            # promote the atomic side to a zero density on the other's grid
            a, b = (self, other) if self.density is None else (other, self)
            keep = a.atoms_y <= b.y_max + TIE_EPS
            promoted = LogGridMeasure(
                b.step_h, b.y_max, np.zeros(b.density.size), a.atoms_y[keep], a.atoms_w[keep]
            )
            return promoted.plus(b)
        if self.density is None:
            dens = None
            y_max = min(self.y_max, other.y_max)
        else:
            n = min(self.density.size, other.density.size)
            dens = self.density[:n] + other.density[:n]
            y_max = (n - 1) * self.step_h
        ay = np.concatenate([self.atoms_y, other.atoms_y])
        aw = np.concatenate([self.atoms_w, other.atoms_w])
        keep = ay <= y_max + TIE_EPS
        ay, aw = _merge_atom_positions(ay[keep], aw[keep])
        return LogGridMeasure(self.step_h, y_max, dens, ay, aw)


def delta_one(step_h: float = DEFAULT_STEP_H, y_max: float = 1.0) -> LogGridMeasure:
    """The multiplicative identity: unit atom at x = 1."""
    return LogGridMeasure(step_h, y_max, None, np.array([0.0]), np.array([1.0]), positive=True)


def _merge_atom_positions(y, w, tie: float = TIE_EPS):
    """Merge atoms whose positions agree within the tie tolerance.

    Representative position of a merged group is its smallest member, which
    keeps the operation deterministic.
    """
    if y.size == 0:
        return y, w
    order = np.argsort(y, kind="stable")
    y, w = y[order], w[order]
    keys = np.round(y / tie).astype(np.int64)
    uniq, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    if uniq.size == y.size:
        return y, w
    wm = np.bincount(inverse, weights=w)
    return y[first], wm


# -- exact Stieltjes integrals against a grid measure ----------------------


def _expm1c(z):
    """expm1 for complex arrays (numpy's expm1 is real-only)."""
    z = np.asarray(z)
    if not np.iscomplexobj(z):
        return np.expm1(z)
    x, y = z.real, z.imag
    return np.expm1(x) * np.cos(y) - 2.0 * np.sin(y / 2.0) ** 2 + 1j * np.exp(x) * np.sin(y)


def _cell_exp_integrals(k, h):
    """(I0, I1, I2) with Ip = int_0^h t^p e^{k t} dt, stable for small |k h|."""
    if k == 0:
        return h, h * h / 2.0, h ** 3 / 3.0
    ekh = np.exp(k * h)
    i0 = _expm1c(k * h) / k
    i1 = (h * ekh - i0) / k
    i2 = (h * h * ekh - 2.0 * i1) / k
    return i0, i1, i2


def stieltjes_exp_poly(mu: LogGridMeasure, k, p: int, y):
    """Exact int_{[0, y]} w^p e^{k w} dmu(w) for the piecewise-linear model.

    p must be 0 or 1; k may be complex.  Treating the sampled density as an
    exactly piecewise-linear function makes every one of these functionals
    internally consistent (integration-by-parts identities hold to rounding),
    which is what the Landau-relation residual checks rely on.
    Vectorized over y.
    """
    if p not in (0, 1):
        raise ValueError("p must be 0 or 1")
    scalar = np.isscalar(y)
    yq = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(yq < -TIE_EPS):
        raise DomainError("query below x = 1")
    if np.any(yq > mu.y_max + max(TIE_EPS, 1e-9 * mu.y_max)):
        raise OutOfRangeError(
            f"query y={float(np.max(yq)):.6g} beyond cutoff y_max={mu.y_max:.6g}"
        )
    complex_out = np.iscomplexobj(np.asarray(k))
    out = np.zeros(yq.shape, dtype=complex if complex_out else float)

    if mu.atoms_y.size:
        f = mu.atoms_w * np.exp(np.multiply(k, mu.atoms_y))
        if p == 1:
            f = f * mu.atoms_y
        cum = np.concatenate([[0.0 * f.dtype.type(0)], np.cumsum(f)])
        idx = np.searchsorted(mu.atoms_y, yq + TIE_EPS, side="right")
        out += cum[idx]

    if mu.density is not None:
        h = mu.step_h
        d = mu.density
        n = d.size
        ya = h * np.arange(n - 1)
        alpha = d[:-1]
        beta = (d[1:] - d[:-1]) / h
        i0, i1, i2 = _cell_exp_integrals(k, h)
        base = np.exp(np.multiply(k, ya))
        if p == 0:
            cells = base * (alpha * i0 + beta * i1)
        else:
            # (alpha + beta t)(ya + t) = alpha*ya + (alpha + beta*ya) t + beta t^2
            cells = base * (alpha * ya * i0 + (alpha + beta * ya) * i1 + beta * i2)
        cum = np.concatenate([[0.0 * cells.dtype.type(0)], np.cumsum(cells)])
        pos = np.clip(yq, 0.0, (n - 1) * h)
        j = np.minimum((pos / h).astype(int), n - 2)
        t = pos - j * h
        # partial cell [y_j, y_j + t], exact
        if np.iscomplexobj(cum):
            part = np.zeros(yq.shape, dtype=complex)
        else:
            part = np.zeros(yq.shape)
        nz = t > 0
        if np.any(nz):
            jt, tt = j[nz], t[nz]
            a_, b_, y_ = alpha[jt], beta[jt], ya[jt]
            if k == 0:
                p0 = tt
                p1 = tt * tt / 2.0
                p2 = tt ** 3 / 3.0
            else:
                ekt = np.exp(np.multiply(k, tt))
                p0 = _expm1c(np.multiply(k, tt)) / k
                p1 = (tt * ekt - p0) / k
                p2 = (tt * tt * ekt - 2.0 * p1) / k
            eb = np.exp(np.multiply(k, y_))
            if p == 0:
                part[nz] = eb * (a_ * p0 + b_ * p1)
            else:
                part[nz] = eb * (a_ * y_ * p0 + (a_ + b_ * y_) * p1 + b_ * p2)
        out += cum[j] + part
    if scalar:
        return out[0]
    return out


def distribution(mu: LogGridMeasure, x) -> float:
    """mu([1, x]), right-continuous in x; trapezoid-exact for the density part."""
    scalar = np.isscalar(x)
    xq = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xq < 1.0):
        raise DomainError("distribution evaluated below x = 1")
    val = stieltjes_exp_poly(mu, 0.0, 0, np.log(xq))
    return float(val[0]) if scalar else np.asarray(val, dtype=float)


# -- multiplicative convolution --------------------------------------------


def _trapezoid_convolve(f, g, h, n_out):
    """Trapezoid discretization of int_0^y f(w) g(y-w) dw on the shared grid."""
    f = f[:n_out]
    g = g[:n_out]
    full = np.convolve(f, g)[:n_out]
    full -= 0.5 * f[0] * g
    full -= 0.5 * g[0] * f
    return h * full


def mconvolve(mu: LogGridMeasure, nu: LogGridMeasure) -> LogGridMeasure:
    """Multiplicative convolution (additive in y), truncated at the smaller cutoff.

    atom x atom pairs stay exact; atom x density shifts the density by the
    exact atom offset and linearly interpolates back onto the grid;
    density x density uses the trapezoid rule.
    """
    if abs(mu.step_h - nu.step_h) > TIE_EPS:
        raise GridMismatchError(f"step_h mismatch: {mu.step_h} vs {nu.step_h}")
    h = mu.step_h
    y_max = min(mu.y_max, nu.y_max)

    out_atoms_y = []
    out_atoms_w = []
    if mu.atoms_y.size and nu.atoms_y.size:
        sums = np.add.outer(mu.atoms_y, nu.atoms_y).ravel()
        prods = np.multiply.outer(mu.atoms_w, nu.atoms_w).ravel()
        keep = sums <= y_max + TIE_EPS
        if np.any(keep):
            ay, aw = _merge_atom_positions(sums[keep], prods[keep])
            out_atoms_y.append(ay)
            out_atoms_w.append(aw)

    density = None
    if mu.density is not None or nu.density is not None:
        n_out = int(round(y_max / h)) + 1
        grid = h * np.arange(n_out)
        density = np.zeros(n_out)
        if mu.density is not None and nu.density is not None:
            density += _trapezoid_convolve(mu.density, nu.density, h, n_out)
        for a, d in ((mu, nu), (nu, mu)):
            if a.atoms_y.size and d.density is not None:
                dgrid = d.step_h * np.arange(d.density.size)
                for ya, wa in zip(a.atoms_y, a.atoms_w):
                    if ya > y_max + TIE_EPS:
                        continue
                    density += wa * np.interp(grid - ya, dgrid, d.density, left=0.0, right=0.0)

    ay = np.concatenate(out_atoms_y) if out_atoms_y else _EMPTY
    aw = np.concatenate(out_atoms_w) if out_atoms_w else _EMPTY
    return LogGridMeasure(h, y_max, density, ay, aw)


def mexp(nu: LogGridMeasure, tol: float = 1e-12) -> LogGridMeasure:
    """Convolution exponential: delta_1 + sum_n nu^{*n} / n!.

    The series is truncated at the first n with c^n/n! < tol, where c is the
    total variation of nu on [1, e^{y_max}]; convergence is governed by the
    mass, not the support.
    """
    c = nu.total_variation()
    if not np.isfinite(c):
        raise MassError("measure has non-finite total mass")
    acc = delta_one(nu.step_h, nu.y_max)
    if c == 0:
        return acc
    term = nu
    factorial = 1.0
    n = 1
    while True:
        acc = acc.plus(term.scaled(1.0 / factorial))
        n += 1
        factorial *= n
        if c ** n / factorial < tol or term.total_variation() == 0.0:
            break
        if n > 500:
            raise MassError(f"exponential series did not truncate (mass {c:.3g})")
        term = mconvolve(term, nu)
    return acc


# -- Volterra solvers -------------------------------------------------------


def _atomic_pairs_exceeded(n):
    if n > MAX_GENERATED_ATOMS:
        raise SizeError(n, MAX_GENERATED_ATOMS)


def _volterra_n_from_pi_atomic(pi: LogGridMeasure) -> LogGridMeasure:
    """Exact atomic integers from atomic primes via the log-weight identity.

    The defining relation is (y-weighted dN) = dN * dpsi with dpsi the
    log-weighted prime measure, so each new atom's weight is the divisor sum
    of log-weights divided by its position.  Positions within the tie
    tolerance are accumulated together.
    """
    b = pi.atoms_y
    beta = pi.atoms_w * pi.atoms_y  # dpsi atom weights
    if b.size and b[0] <= TIE_EPS:
        raise ValueError("dPi must have no mass at x = 1")
    y_lim = pi.y_max + TIE_EPS
    out_y = [0.0]
    out_w = [1.0]
    heap = []
    for bm, wm in zip(b, beta):
        if bm <= y_lim:
            heapq.heappush(heap, (bm, wm))
    count = 0
    while heap:
        y0, s = heapq.heappop(heap)
        while heap and heap[0][0] <= y0 + TIE_EPS:
            s += heapq.heappop(heap)[1]
        w = s / y0
        out_y.append(y0)
        out_w.append(w)
        count += 1
        _atomic_pairs_exceeded(count)
        for bm, wm in zip(b, beta):
            ynew = y0 + bm
            if ynew > y_lim:
                break
            heapq.heappush(heap, (ynew, w * wm))
    return LogGridMeasure(pi.step_h, pi.y_max, None, np.array(out_y), np.array(out_w))


def _snap_atoms_to_spikes(mu: LogGridMeasure, weight_by_y: bool):
    """Grid density with atoms folded in as spikes of height w/h (flagged)."""
    n = int(round(mu.y_max / mu.step_h)) + 1
    dens = np.zeros(n)
    if mu.density is not None:
        dens[: mu.density.size] = mu.density
    if mu.atoms_y.size:
        warnings.warn(
            "atoms snapped to the nearest grid node for the marching solver",
            AtomAlignmentWarning,
            stacklevel=3,
        )
        idx = np.clip(np.round(mu.atoms_y / mu.step_h).astype(int), 0, n - 1)
        w = mu.atoms_w * (mu.atoms_y if weight_by_y else 1.0)
        np.add.at(dens, idx, w / mu.step_h)
        return dens, True
    return dens, False


def volterra_n_from_pi(pi: LogGridMeasure) -> LogGridMeasure:
    """Solve dN = exp*(dPi) by marching the log-weight identity.

    Purely atomic input takes the exact atomic route; otherwise the trapezoid
    march runs on the grid, with any atoms snapped to nodes (and flagged).
    """
    if pi.is_atomic:
        return _volterra_n_from_pi_atomic(pi)
    from ._dispatch import march_n_from_psi

    h = pi.step_h
    grid = pi.grid
    sigma_psi = grid * pi.density
    if pi.atoms_y.size:
        if np.any(pi.atoms_y <= TIE_EPS):
            raise ValueError("dPi must have no mass at x = 1")
        spikes, _ = _snap_atoms_to_spikes(
            LogGridMeasure(h, pi.y_max, None, pi.atoms_y, pi.atoms_w * pi.atoms_y),
            weight_by_y=False,
        )
        sigma_psi = sigma_psi + spikes
    sigma_n = np.asarray(march_n_from_psi(np.ascontiguousarray(sigma_psi), h, pi.density[0]))
    return LogGridMeasure(
        h, pi.y_max, sigma_n, np.array([0.0]), np.array([1.0]), positive=pi.positive
    )


def _volterra_inverse_atomic(dn: LogGridMeasure) -> LogGridMeasure:
    """Exact convolution inverse of a purely atomic dN with unit atom at 1."""
    y = dn.atoms_y
    w = dn.atoms_w
    b, v = y[1:], w[1:]
    y_lim = dn.y_max + TIE_EPS
    out_y = [0.0]
    out_w = [1.0]
    heap = []
    for bm, vm in zip(b, v):
        if bm > y_lim:
            break
        heapq.heappush(heap, (bm, -vm))
    count = 0
    while heap:
        y0, s = heapq.heappop(heap)
        while heap and heap[0][0] <= y0 + TIE_EPS:
            s += heapq.heappop(heap)[1]
        if s == 0.0:
            continue
        out_y.append(y0)
        out_w.append(s)
        count += 1
        _atomic_pairs_exceeded(count)
        for bm, vm in zip(b, v):
            ynew = y0 + bm
            if ynew > y_lim:
                break
            heapq.heappush(heap, (ynew, -s * vm))
    return LogGridMeasure(dn.step_h, dn.y_max, None, np.array(out_y), np.array(out_w))


def volterra_inverse(dn: LogGridMeasure) -> LogGridMeasure:
    """Convolution inverse dM of dN, so that dM * dN = delta_1 on the grid."""
    if dn.atoms_y.size == 0 or dn.atoms_y[0] > TIE_EPS or abs(dn.atoms_w[0] - 1.0) > 1e-9:
        raise NotInvertibleError("dN must carry a unit atom at x = 1")
    if dn.is_atomic:
        return _volterra_inverse_atomic(dn)
    from ._dispatch import march_inverse

    h = dn.step_h
    extra = LogGridMeasure(h, dn.y_max, None, dn.atoms_y[1:], dn.atoms_w[1:])
    sigma_n = dn.density.copy()
    if extra.atoms_y.size:
        spikes, _ = _snap_atoms_to_spikes(extra, weight_by_y=False)
        sigma_n = sigma_n + spikes
    sigma_m = np.asarray(march_inverse(np.ascontiguousarray(sigma_n), h))
    return LogGridMeasure(h, dn.y_max, sigma_m, np.array([0.0]), np.array([1.0]))


def mobius_measure(system, mass_threshold: float = 20.0, tol: float = 1e-12) -> LogGridMeasure:
    """dM = exp*(-dPi): series route for small-mass dPi, Volterra otherwise.

    Accepts anything exposing ``pi_measure`` and (for the Volterra route)
    ``dn_measure()``; both routes agree within grid tolerance where both
    apply, which the tests exercise.
    """
    pi = system.pi_measure if hasattr(system, "pi_measure") else system
    if pi.is_atomic:
        dn = _volterra_n_from_pi_atomic(pi)
        return _volterra_inverse_atomic(dn)
    if pi.total_variation() <= mass_threshold:
        return mexp(pi.scaled(-1.0), tol=tol)
    dn = system.dn_measure() if hasattr(system, "dn_measure") else volterra_n_from_pi(pi)
    return volterra_inverse(dn)
