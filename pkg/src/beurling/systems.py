"""Number systems: a prime measure plus lazily derived arithmetic measures.

A NumberSystem bundles the prime-counting measure dPi (atomic for discrete
systems, sampled density for continuous ones) with whatever else a scenario
declares: the generator list, analytic density, closed-form transform tails,
and expected-behavior metadata.  Derived objects (the semigroup enumeration,
dN, dM) are computed on first use and cached behind a lock, so distinct
threads can query one system safely.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import measures, semigroup
from .errors import OutOfRangeError
from .measures import LogGridMeasure


@dataclass
class NumberSystem:
    label: str
    kind: str  # "discrete" | "continuous"
    pi_measure: LogGridMeasure
    prime_system: Optional[semigroup.PrimeSystem] = None
    x_max: Optional[float] = None  # enumeration cutoff for discrete systems
    # analytic description of a continuous dPi: g(y) with
    # int x^{-s} dPi = int e^{-(s-1) y} g(y) dy, supported on [support_y, inf)
    pi_density: Optional[Callable] = None
    pi_support_y: float = 0.0
    # closed-form transform tails beyond the stored data window:
    # logzeta_tail(s, Y) = int_Y^inf e^{-(s-1)y} g(y) dy  (continuous), or the
    # model tail of int x^{-s} dPi beyond x_max (discrete)
    logzeta_tail: Optional[Callable] = None
    logzeta_deriv_tail: Optional[Callable] = None  # same with an extra y weight
    dn_tail_model: str = "linear-density"  # none | linear-density | harmonic-density
    declared_a: Optional[float] = None
    declared_c: Optional[float] = None
    sigma_abscissa: float = 1.0
    decay_exponent: Optional[float] = None  # declared |E| ~ y^-beta model
    # explicit weighted atoms (log positions, weights), for systems whose dN/dM
    # are prescribed directly rather than derived from a free semigroup
    dn_atoms: Optional[tuple] = None
    dm_atoms: Optional[tuple] = None
    scenario: object = None
    _cache: dict = field(default_factory=dict, repr=False)
    # reentrant: builders may consult other cached products of the same system
    _lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    # -- bookkeeping --------------------------------------------------------

    @property
    def step_h(self) -> float:
        return self.pi_measure.step_h

    @property
    def y_max(self) -> float:
        return self.pi_measure.y_max

    @property
    def cutoff_x(self) -> float:
        return float(np.exp(self.y_max))

    def _cached(self, key, builder):
        with self._lock:
            if key not in self._cache:
                self._cache[key] = builder()
            return self._cache[key]

    # -- derived objects -----------------------------------------------------

    def enumeration(self, x_max: Optional[float] = None) -> semigroup.EnumeratedSemigroup:
        """Sorted semigroup enumeration (discrete free systems only)."""
        if self.prime_system is None:
            raise ValueError(f"{self.label}: no generator list to enumerate")
        limit = self.x_max if x_max is None else float(x_max)
        if limit > np.exp(self.pi_measure.y_max) * (1 + 1e-12):
            raise OutOfRangeError(f"enumeration cutoff {limit:g} beyond prime data")
        return self._cached(
            ("enum", limit), lambda: semigroup.enumerate_semigroup(self.prime_system, limit)
        )

    def dn_measure(self) -> LogGridMeasure:
        """dN = exp*(dPi): atomic for discrete systems, grid for continuous."""

        def build():
            if self.dn_atoms is not None:
                y, w = self.dn_atoms
                return LogGridMeasure(self.step_h, self.y_max, None, y, w, positive=True)
            if self.kind == "discrete":
                return self.enumeration().dn_measure(self.step_h)
            return measures.volterra_n_from_pi(self.pi_measure)

        return self._cached("dn", build)

    def dm_measure(self) -> LogGridMeasure:
        """dM: Moebius annotation for discrete systems, Volterra inverse otherwise."""

        def build():
            if self.dm_atoms is not None:
                y, w = self.dm_atoms
                return LogGridMeasure(self.step_h, self.y_max, None, y, w)
            if self.kind == "discrete":
                enum = self.enumeration()
                keep = enum.mob != 0
                y = enum.log_value[keep]
                w = enum.mob[keep].astype(float)
                ym, wm = measures._merge_atom_positions(y, w)
                nz = wm != 0.0
                return LogGridMeasure(self.step_h, self.y_max, None, ym[nz], wm[nz])
            return measures.volterra_inverse(self.dn_measure())

        return self._cached("dm", build)

    def dpsi_measure(self) -> LogGridMeasure:
        """dpsi = (log u) dPi on the same support."""

        def build():
            pi = self.pi_measure
            dens = None if pi.density is None else pi.grid * pi.density
            return LogGridMeasure(
                pi.step_h, pi.y_max, dens, pi.atoms_y, pi.atoms_w * pi.atoms_y,
                positive=pi.positive,
            )

        return self._cached("dpsi", build)
