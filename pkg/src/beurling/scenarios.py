"""Catalog of number systems with declared constants and expected behavior.

Each constructor returns a NumberSystem wired with whatever closed-form
knowledge the system affords: analytic density, transform tails beyond the
data window, and a ScenarioSpec of expected flags that the verify command
checks against computed diagnostics.

Flag vocabulary (values "holds" / "fails" / "unknown"):
  pnt                 psi(x) ~ x
  sharp_mertens       psi_1(x) - log x converges
  remainder_smallo    N(x) = a x + o(x / log x)
  remainder_l1        int |N(x) - a x| / x^2 dx finite
  mertens_o_x         M(x) = o(x)
  mertens_over_o_1    m(x) = o(1)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.special import exp1

from . import counting, kernels, semigroup, zeta
from .errors import ConfigError, DomainError
from .measures import DEFAULT_STEP_H, LogGridMeasure
from .systems import NumberSystem

DEFAULT_XMAX_DISCRETE = 1.0e6
DEFAULT_YMAX_CONTINUOUS = 40.0
EULER_GAMMA = zeta.EULER_GAMMA
LN2 = math.log(2.0)

# Bump width exponent for the oscillating-psi1 system.  The classical
# construction uses 3, but positivity of dPi together with live bumps in
# the verification window forces a gentler narrowing; 1.25 keeps every
# bump's negative lobe above the base density with a ~30% margin while
# keeping the bump masses summable.
EX52_WIDTH_POWER = 1.25


@dataclass
class ScenarioSpec:
    name: str
    parameters: dict = field(default_factory=dict)
    declared_constants: dict = field(default_factory=dict)
    expected_flags: dict = field(default_factory=dict)

    def validate(self):
        if self.expected_flags.get("sharp_mertens") == "holds" and "c" not in self.declared_constants:
            raise ValueError(f"{self.name}: sharp Mertens declared to hold but no constant given")
        return self


# -- shared helpers -----------------------------------------------------------


def _continuous_system(label, g, step_h, y_max, **kwargs) -> NumberSystem:
    n = int(round(y_max / step_h)) + 1
    y = step_h * np.arange(n)
    dens = np.exp(y) * g(y)
    pi = LogGridMeasure(step_h, y_max, dens, positive=True)
    pi.validate()
    return NumberSystem(label=label, kind="continuous", pi_measure=pi, pi_density=g, **kwargs)


def _base_density(y):
    """(1 - e^-y)/y, the density whose exponential is Lebesgue measure + unit atom."""
    y = np.asarray(y, dtype=float)
    out = np.ones_like(y)
    m = y > 1e-12
    out[m] = -np.expm1(-y[m]) / y[m]
    return out


# -- (a), (b): the classical integers, optionally with one extra generator ---


def build_rational(step_h=DEFAULT_STEP_H, x_max=DEFAULT_XMAX_DISCRETE, extra_prime=None):
    x_max = float(x_max)
    primes = semigroup.sieve_primes(x_max)
    label = "rational"
    a = 1.0
    c = -EULER_GAMMA
    if extra_prime is not None:
        q = float(extra_prime)
        if q <= 1.0:
            raise DomainError("extra generator must exceed 1")
        primes = np.sort(np.append(primes, q), kind="stable")
        label = f"rational_plus_prime(q={q:g})"
        a = q / (q - 1.0)
        c = -EULER_GAMMA + math.log(q) / (q - 1.0)
    ps = semigroup.PrimeSystem(primes, source="rational-sieve")
    pi = semigroup.pi_measure_from_primes(ps, x_max, step_h)

    def tail(s, Y):
        # prime-counting tail modeled by density 1/log u beyond the sieve
        return exp1((s - 1.0) * Y)

    def deriv_tail(s, Y):
        return np.exp((1.0 - s) * Y) / (s - 1.0)

    name = "rational" if extra_prime is None else "rational_plus_prime"
    spec = ScenarioSpec(
        name=name,
        parameters={"x_max": x_max} | ({} if extra_prime is None else {"q": float(extra_prime)}),
        declared_constants={"a": a, "c": c},
        expected_flags={
            "pnt": "holds",
            "sharp_mertens": "holds",
            "remainder_smallo": "holds",
            "remainder_l1": "holds",
            "mertens_o_x": "holds",
            "mertens_over_o_1": "holds",
        },
    ).validate()
    return NumberSystem(
        label=label,
        kind="discrete",
        pi_measure=pi,
        prime_system=ps,
        x_max=x_max,
        logzeta_tail=tail,
        logzeta_deriv_tail=deriv_tail,
        declared_a=a,
        declared_c=c,
        scenario=spec,
    )


# -- (c): slowly-divergent Mertens correction --------------------------------


def _omega_factory(kind: str) -> Callable:
    if kind == "loglog":

        def omega_y(y):
            y = np.asarray(y, dtype=float)
            out = np.ones_like(y)
            m = y > math.e
            out[m] = 1.0 / np.log(y[m])
            return out

    elif kind == "one":

        def omega_y(y):
            return np.ones_like(np.asarray(y, dtype=float))

    elif kind == "zero":

        def omega_y(y):
            return np.zeros_like(np.asarray(y, dtype=float))

    else:
        raise ValueError(f"unknown omega choice {kind!r}")
    omega_y.kind = kind
    return omega_y


def build_ex51(step_h=DEFAULT_STEP_H, y_max=DEFAULT_YMAX_CONTINUOUS, omega="loglog"):
    om = _omega_factory(str(omega))

    def g(y):
        y = np.asarray(y, dtype=float)
        base = _base_density(y)
        return base + base * base * om(y)

    # total mass of the correction measure nu and the resulting density e^mass
    def nu_integrand(y):
        b = float(_base_density(np.array([y]))[0])
        return b * b * float(om(np.array([y]))[0])

    c_nu = quad(nu_integrand, 0.0, math.e, limit=200)[0] + quad(
        nu_integrand, math.e, np.inf, limit=400
    )[0]
    a = math.exp(c_nu)

    def _omega_tail_quad(z, Y, inv_power):
        """int_Y^upper e^{-z y} b(y)^2 omega(e^y) / y^inv_power dy, paneled."""

        def f(y):
            b = -math.expm1(-y) / y
            return (
                math.exp(-z.real * y)
                * b * b
                * float(om(np.array([y]))[0])
                / y ** inv_power
            )

        upper = Y + min(80.0 / max(z.real, 1e-7), 1.0e7)
        edges = [Y]
        while edges[-1] < upper:
            edges.append(min(upper, edges[-1] * 2.0))
        re = im = 0.0
        for a_, b_ in zip(edges[:-1], edges[1:]):
            if z.imag == 0:
                re += quad(f, a_, b_, limit=200)[0]
            else:
                re += quad(lambda y: f(y) * math.cos(z.imag * y), a_, b_, limit=200)[0]
                im -= quad(lambda y: f(y) * math.sin(z.imag * y), a_, b_, limit=200)[0]
        return complex(re, im)

    def tail(s, Y):
        z = complex(s) - 1.0
        return exp1(z * Y) - exp1((z + 1.0) * Y) + _omega_tail_quad(z, Y, 2)

    def deriv_tail(s, Y):
        z = complex(s) - 1.0
        base_part = np.exp(-z * Y) / z - np.exp(-(z + 1.0) * Y) / (z + 1.0)
        return base_part + _omega_tail_quad(z, Y, 1)

    spec = ScenarioSpec(
        name="ex51",
        parameters={"omega": str(omega), "y_max": float(y_max)},
        declared_constants={"a": a, "nu_mass": c_nu},
        expected_flags=(
            {
                "pnt": "holds",
                "sharp_mertens": "fails",
                "remainder_smallo": "holds",
                # the true remainder is not integrable, but the divergence is
                # doubly logarithmic: below desk-scale resolution, so unchecked
                "remainder_l1": "unknown",
                "mertens_o_x": "unknown",
                "mertens_over_o_1": "unknown",
            }
            if str(omega) != "zero"
            else {
                "pnt": "holds",
                "sharp_mertens": "holds",
                "remainder_smallo": "holds",
                "remainder_l1": "holds",
                "mertens_o_x": "unknown",
                "mertens_over_o_1": "unknown",
            }
        ),
    )
    if str(omega) == "zero":
        spec.declared_constants["c"] = -1.0  # N(x) = x exactly: integral term vanishes
    spec.validate()
    sys_ = _continuous_system(
        f"ex51(omega={omega})",
        g,
        step_h,
        float(y_max),
        logzeta_tail=tail,
        logzeta_deriv_tail=deriv_tail,
        declared_a=a,
        declared_c=spec.declared_constants.get("c"),
        decay_exponent=1.0,
        scenario=spec,
    )
    sys_.omega_y = om
    return sys_


# -- (d): oscillating psi1 with integrable remainder --------------------------


def _bump(x):
    """The standard smooth bump on (-1/2, 1/2) with value 1 at 0."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    m = np.abs(x) < 0.5
    xm = x[m]
    out[m] = np.exp(1.0 - 1.0 / (1.0 - 4.0 * xm * xm))
    return out


def _bump_derivative(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    m = np.abs(x) < 0.5
    xm = x[m]
    out[m] = _bump(xm) * (-8.0 * xm) / (1.0 - 4.0 * xm * xm) ** 2
    return out


def ex52_bump_sum(t, width_power=EX52_WIDTH_POWER):
    """g(t) = sum_n bump(n^w (t - n - 1/2)): peaks of height 1 at t = n + 1/2."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    n_max = int(np.max(t)) + 2 if t.size else 2
    for n in range(1, max(2, n_max)):
        s = float(n) ** width_power
        out += _bump(s * (t - n - 0.5))
    return out


def ex52_bump_sum_derivative(t, width_power=EX52_WIDTH_POWER):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    n_max = int(np.max(t)) + 2 if t.size else 2
    for n in range(1, max(2, n_max)):
        s = float(n) ** width_power
        out += s * _bump_derivative(s * (t - n - 0.5))
    return out


def _ex52_f(y, width_power):
    """f(y) = g'(log y): the oscillatory correction in the prime density."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    m = y > 0
    out[m] = ex52_bump_sum_derivative(np.log(y[m]), width_power)
    return out


def _ex52_bump_windows(width_power, t_from=0.0, tiny=1e-18):
    """(n, t_lo, t_hi) for bumps with any mass beyond t_from, e^-t weighted."""
    wins = []
    n = 1
    while True:
        t_c = n + 0.5
        half = 0.5 / float(n) ** width_power
        if t_c + half >= t_from:
            wins.append((n, t_c - half, t_c + half))
        if math.exp(-(t_c - half)) < tiny and t_c - half > t_from:
            break
        n += 1
        if n > 300:
            break
    return wins


def build_ex52(
    step_h=DEFAULT_STEP_H,
    y_max=DEFAULT_YMAX_CONTINUOUS,
    A=math.e,
    width_power=EX52_WIDTH_POWER,
):
    A = float(A)
    if A < math.e:
        raise DomainError(f"A = {A:g} below the scenario minimum e = {math.e:.6f}")
    log_a = math.log(A)
    wp = float(width_power)

    def g(y):
        y = np.asarray(y, dtype=float)
        out = _base_density(y)
        m = y >= log_a
        ym = y[m]
        out[m] = out[m] + _ex52_f(ym, wp) / (ym * ym)
        return out

    # a = exp(int_{log A}^inf f(y)/y^2 dy), integrated bump by bump in t = log y
    total = 0.0
    for n, t_lo, t_hi in _ex52_bump_windows(wp, t_from=math.log(max(log_a, 1e-9))):
        t_lo = max(t_lo, math.log(log_a)) if log_a > 1 else t_lo
        if t_hi <= t_lo:
            continue
        val = quad(
            lambda t: float(ex52_bump_sum_derivative(np.array([t]), wp)[0]) * math.exp(-t),
            t_lo,
            t_hi,
            limit=200,
        )[0]
        total += val
    a = math.exp(total)

    def tail(s, Y):
        z = complex(s) - 1.0
        out = exp1(z * Y) - exp1((z + 1.0) * Y)
        for n, t_lo, t_hi in _ex52_bump_windows(wp, t_from=math.log(Y)):
            y_lo, y_hi = max(Y, math.exp(t_lo)), math.exp(t_hi)
            if y_hi <= y_lo:
                continue

            def f(y):
                return float(_ex52_f(np.array([y]), wp)[0]) / (y * y)

            re = quad(lambda y: f(y) * math.exp(-z.real * y) * math.cos(z.imag * y), y_lo, y_hi, limit=200)[0]
            im = -quad(lambda y: f(y) * math.exp(-z.real * y) * math.sin(z.imag * y), y_lo, y_hi, limit=200)[0]
            out = out + complex(re, im)
        return out

    def deriv_tail(s, Y):
        z = complex(s) - 1.0
        out = np.exp(-z * Y) / z - np.exp(-(z + 1.0) * Y) / (z + 1.0)
        for n, t_lo, t_hi in _ex52_bump_windows(wp, t_from=math.log(Y)):
            y_lo, y_hi = max(Y, math.exp(t_lo)), math.exp(t_hi)
            if y_hi <= y_lo:
                continue

            def f(y):
                return float(_ex52_f(np.array([y]), wp)[0]) / y

            re = quad(lambda y: f(y) * math.exp(-z.real * y) * math.cos(z.imag * y), y_lo, y_hi, limit=200)[0]
            im = -quad(lambda y: f(y) * math.exp(-z.real * y) * math.sin(z.imag * y), y_lo, y_hi, limit=200)[0]
            out = out + complex(re, im)
        return out

    spec = ScenarioSpec(
        name="ex52",
        parameters={"A": A, "width_power": wp, "y_max": float(y_max)},
        declared_constants={"a": a},
        expected_flags={
            "pnt": "holds",
            "sharp_mertens": "fails",
            "remainder_smallo": "unknown",
            "remainder_l1": "holds",
            "mertens_o_x": "unknown",
            "mertens_over_o_1": "unknown",
        },
    ).validate()
    sys_ = _continuous_system(
        f"ex52(A={A:g})",
        g,
        step_h,
        float(y_max),
        logzeta_tail=tail,
        logzeta_deriv_tail=deriv_tail,
        declared_a=a,
        scenario=spec,
    )
    sys_.bump_width_power = wp
    return sys_


def ex52_positivity_threshold(width_power=EX52_WIDTH_POWER) -> float:
    """Smallest density margin of the default construction over its first bumps."""
    worst = math.inf
    for n, t_lo, t_hi in _ex52_bump_windows(width_power)[:8]:
        t = np.linspace(t_lo, t_hi, 4001)
        y = np.exp(t)
        floor = -(y * (-np.expm1(-y)))  # density >= 0 iff f(y) >= -y(1 - e^-y)
        f = ex52_bump_sum_derivative(t, width_power)
        worst = min(worst, float(np.min(f - floor)))
    return worst


# -- (e), (f): the oscillating-density system and its discretization ----------


def _ex53_g(y):
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    m = y >= LN2
    out[m] = (1.0 + np.cos(y[m])) / y[m]
    return out


def _ex53_tail(s, Y):
    z = complex(s) - 1.0
    return complex(
        exp1(z * Y) + 0.5 * exp1((z - 1j) * Y) + 0.5 * exp1((z + 1j) * Y)
    )


def _ex53_deriv_tail(s, Y):
    z = complex(s) - 1.0
    return complex(
        np.exp(-z * Y) / z
        + 0.5 * np.exp(-(z - 1j) * Y) / (z - 1j)
        + 0.5 * np.exp(-(z + 1j) * Y) / (z + 1j)
    )


_EX53_FLAGS = {
    "pnt": "fails",
    "sharp_mertens": "fails",
    "remainder_smallo": "fails",
    "remainder_l1": "fails",
    "mertens_o_x": "holds",
    "mertens_over_o_1": "holds",
}


def build_ex53(step_h=DEFAULT_STEP_H, y_max=DEFAULT_YMAX_CONTINUOUS):
    a = float(np.exp(zeta.ex53_G(1.0)).real)
    spec = ScenarioSpec(
        name="ex53",
        parameters={"y_max": float(y_max)},
        declared_constants={"a": a, "m_limit": 0.0},
        expected_flags=dict(_EX53_FLAGS),
    ).validate()
    return _continuous_system(
        "ex53",
        _ex53_g,
        step_h,
        float(y_max),
        logzeta_tail=_ex53_tail,
        logzeta_deriv_tail=_ex53_deriv_tail,
        declared_a=a,
        decay_exponent=0.5,
        scenario=spec,
    )


def build_ex53_discrete(step_h=DEFAULT_STEP_H, k_max=100000, x_max=None):
    k_max = int(k_max)
    ps = semigroup.discretize(
        zeta.ex53_capital_pi, k_max, density=zeta.ex53_pi_density_x
    )
    top = float(ps.primes[-1])
    x_max = float(x_max) if x_max is not None else top
    if x_max > top:
        raise DomainError(f"x_max {x_max:g} beyond the last generator {top:g}")
    pi = semigroup.pi_measure_from_primes(ps, x_max, step_h)
    spec = ScenarioSpec(
        name="ex53_discrete",
        parameters={"k_max": k_max, "x_max": x_max},
        declared_constants={"m_limit": 0.0},
        expected_flags=dict(_EX53_FLAGS),
    ).validate()
    return NumberSystem(
        label=f"ex53_discrete(k_max={k_max})",
        kind="discrete",
        pi_measure=pi,
        prime_system=ps,
        x_max=x_max,
        logzeta_tail=_ex53_tail,
        logzeta_deriv_tail=_ex53_deriv_tail,
        decay_exponent=0.5,
        scenario=spec,
    )


# -- (g): harmonic-weight system and its literal-reading variant --------------


def build_remark54(step_h=DEFAULT_STEP_H, x_max=DEFAULT_XMAX_DISCRETE):
    x_max = float(x_max)
    n_top = int(x_max)
    n = np.arange(1, n_top + 1, dtype=float)
    logn = np.log(n)
    mu = semigroup.mobius_sieve(n_top)[1:].astype(float)

    primes = semigroup.sieve_primes(x_max)
    ys = []
    ws = []
    k = 1
    while True:
        pk = primes ** k
        sel = pk <= x_max
        if not np.any(sel):
            break
        ys.append(k * np.log(primes[sel]))
        ws.append(1.0 / (k * pk[sel]))
        k += 1
    order = np.argsort(np.concatenate(ys), kind="stable")
    pi = LogGridMeasure(
        step_h,
        math.log(x_max),
        None,
        np.concatenate(ys)[order],
        np.concatenate(ws)[order],
        positive=True,
    )

    keep = mu != 0
    spec = ScenarioSpec(
        name="remark54",
        parameters={"x_max": x_max},
        declared_constants={"a": 0.0, "m_limit": 6.0 / math.pi ** 2},
        expected_flags={
            "pnt": "fails",
            "sharp_mertens": "fails",
            "remainder_smallo": "unknown",
            "remainder_l1": "unknown",
            "mertens_o_x": "holds",
            "mertens_over_o_1": "fails",
        },
    ).validate()

    def tail(s, Y):
        # dPi tail ~ du/(u log u): int_X^inf u^{-s-1}/log u du = E1(s log X)
        return exp1(complex(s) * Y)

    return NumberSystem(
        label="remark54",
        kind="discrete",
        pi_measure=pi,
        x_max=x_max,
        dn_atoms=(logn, 1.0 / n),
        dm_atoms=(logn[keep], mu[keep] / n[keep]),
        declared_a=0.0,
        dn_tail_model="harmonic-density",
        sigma_abscissa=0.0,
        logzeta_tail=tail,
        scenario=spec,
    )


def build_remark54_alt(step_h=DEFAULT_STEP_H, x_max=DEFAULT_XMAX_DISCRETE):
    """Literal reading: dPi puts mass 1/p at each prime only.

    The Moebius-over limit is then exp(-sum_p p^-2), not 6/pi^2; this variant
    exists so the discrepancy between the two readings stays visible.
    """
    x_max = float(x_max)
    n_top = int(x_max)
    primes = semigroup.sieve_primes(x_max).astype(np.int64)

    # multiplicative weights: h(p^k) = p^{-k}/k! with sign (-1)^k for dM
    wn = np.ones(n_top + 1)
    wm = np.ones(n_top + 1)
    for p in primes:
        pk = int(p)
        k = 1
        while pk <= n_top:
            fac = math.factorial(k) * (float(p) ** k)
            idx = np.arange(pk, n_top + 1, pk)
            cof = idx // pk
            m = cof % p != 0
            wn[idx[m]] *= 1.0 / fac
            wm[idx[m]] *= (-1.0) ** k / fac
            k += 1
            pk *= int(p)
    wn[0] = wm[0] = 0.0
    n = np.arange(1, n_top + 1, dtype=float)
    logn = np.log(n)
    wn = wn[1:]
    wm = wm[1:]
    keep_n = wn != 0
    keep_m = wm != 0

    py = np.log(primes.astype(float))
    pw = 1.0 / primes.astype(float)
    pi = LogGridMeasure(step_h, math.log(x_max), None, py, pw, positive=True)

    p2 = float(np.sum(pw * pw))  # sum p^-2 over the sieve
    p2 += float(exp1(math.log(x_max)))  # modeled tail int_X u^-2 dpi(u)
    spec = ScenarioSpec(
        name="remark54_alt",
        parameters={"x_max": x_max},
        declared_constants={"a": 0.0, "m_limit": math.exp(-p2)},
        expected_flags={
            "pnt": "fails",
            "sharp_mertens": "fails",
            "remainder_smallo": "unknown",
            "remainder_l1": "unknown",
            "mertens_o_x": "holds",
            "mertens_over_o_1": "fails",
        },
    ).validate()

    def tail(s, Y):
        return exp1(complex(s) * Y)

    return NumberSystem(
        label="remark54_alt",
        kind="discrete",
        pi_measure=pi,
        x_max=x_max,
        dn_atoms=(logn[keep_n], wn[keep_n]),
        dm_atoms=(logn[keep_m], wm[keep_m]),
        declared_a=0.0,
        dn_tail_model="none",
        sigma_abscissa=0.0,
        logzeta_tail=tail,
        scenario=spec,
    )


def build_explicit(step_h=DEFAULT_STEP_H, primes=None, primes_file=None, x_max=None):
    if primes is None and primes_file is None:
        raise DomainError("explicit scenario needs primes or primes_file")
    if primes_file is not None:
        ps = semigroup.load_primes(primes_file)
    else:
        ps = semigroup.PrimeSystem(np.asarray(list(primes), dtype=float))
    x_max = float(x_max) if x_max is not None else max(1.0e4, float(ps.primes[-1]) ** 2)
    pi = semigroup.pi_measure_from_primes(ps, x_max, step_h)
    spec = ScenarioSpec(
        name="explicit",
        parameters={"x_max": x_max, "count": int(ps.primes.size)},
        expected_flags={},
    )
    return NumberSystem(
        label="explicit",
        kind="discrete",
        pi_measure=pi,
        prime_system=ps,
        x_max=x_max,
        scenario=spec,
    )


SCENARIO_BUILDERS = {
    "rational": build_rational,
    "rational_plus_prime": lambda step_h=DEFAULT_STEP_H, q=1.5, x_max=DEFAULT_XMAX_DISCRETE: build_rational(
        step_h, x_max, extra_prime=q
    ),
    "ex51": build_ex51,
    "ex52": build_ex52,
    "ex53": build_ex53,
    "ex53_discrete": build_ex53_discrete,
    "remark54": build_remark54,
    "remark54_alt": build_remark54_alt,
    "explicit": build_explicit,
}


def available_scenarios():
    return sorted(SCENARIO_BUILDERS)


def build(name: str, **params) -> NumberSystem:
    """Construct a catalog system by name."""
    try:
        builder = SCENARIO_BUILDERS[name]
    except KeyError:
        raise DomainError(
            f"unknown scenario {name!r}; available: {', '.join(available_scenarios())}"
        ) from None
    return builder(**params)


# -- scenario-level checks -----------------------------------------------------


def ex51_envelope_check(system: NumberSystem, x_list) -> list:
    """Sandwich C1 I(x) <= (a x - N(x))/x <= C2 I(x) for the ex51 family.

    I(x) = int_x^inf omega(u)/(u log^2 u) du; the constants come from the
    correction-measure mass (C1 = (e^c - 1)/(4c), C2 = e^c (c^2 + 3c + 1)
    for the default omega inequality constants C = 1, alpha = 1).
    """
    om = getattr(system, "omega_y", None)
    if om is None:
        raise DomainError("envelope check applies to the ex51 family only")
    c_nu = system.scenario.declared_constants["nu_mass"]
    a = system.declared_a
    rows = []
    if c_nu == 0.0:
        for x in x_list:
            nx = counting.counting_n(system, x)
            rows.append(
                {"x": x, "middle": (a * x - nx) / x, "lower": 0.0, "upper": 0.0,
                 "holds": bool(abs((a * x - nx) / x) <= 10 * system.step_h)}
            )
        return rows
    c1 = (math.exp(c_nu) - 1.0) / (4.0 * c_nu)
    c2 = math.exp(c_nu) * (c_nu * c_nu + 3.0 * c_nu + 1.0)
    for x in x_list:
        y = math.log(x)
        envelope = quad(
            lambda w: float(om(np.array([w]))[0]) / (w * w), y, np.inf, limit=400
        )[0]
        nx = counting.counting_n(system, x)
        middle = (a * x - nx) / x
        rows.append(
            {
                "x": float(x),
                "lower": c1 * envelope,
                "middle": float(middle),
                "upper": c2 * envelope,
                "holds": bool(c1 * envelope <= middle <= c2 * envelope),
            }
        )
    return rows


def ex51_mertens_divergence(system: NumberSystem, y_list) -> list:
    """psi_1(e^y) - y against the quarter-envelope lower bound."""
    om = getattr(system, "omega_y", None)
    if om is None:
        raise DomainError("divergence check applies to the ex51 family only")
    rows = []
    for y in y_list:
        val = counting.psi1_log(system, y) - y
        edges = [LN2]
        while edges[-1] < y:
            edges.append(min(y, edges[-1] * 4.0))
        bound = -1.0 + 0.25 * sum(
            quad(lambda w: float(om(np.array([w]))[0]) / w, a_, b_, limit=200)[0]
            for a_, b_ in zip(edges[:-1], edges[1:])
        )
        rows.append({"y": float(y), "value": float(val), "lower_bound": float(bound),
                     "exceeds": bool(val > bound)})
    return rows


def omega_ratio_check(om, x_values, n_values) -> float:
    """max over the grid of omega(x^{1/n})/omega(x) - (1 + log n)."""
    worst = -math.inf
    for x in x_values:
        wx = float(om(np.array([math.log(x)]))[0])
        for n in n_values:
            wr = float(om(np.array([math.log(x) / n]))[0])
            worst = max(worst, wr / wx - (1.0 + math.log(n)))
    return worst


def boundary_function(system: NumberSystem):
    """The evaluator a boundary probe should use for this system, with a name."""
    name = system.scenario.name if system.scenario else system.label
    if name == "ex53":
        return zeta.ex53_zeta, "ex53-closed-form"
    if name in ("rational", "rational_plus_prime", "remark54", "remark54_alt"):
        return (lambda s: zeta.zeta_from_n(system, s)), f"{name}-zeta-from-N"
    return (lambda s: zeta.zeta_from_pi(system, s)), f"{name}-zeta-from-Pi"


# -- desk-scale flag verification ---------------------------------------------

# Window statistics are computed on dyadic y-windows; a "holds" verdict needs
# the final windows to shrink below the threshold, a "fails" verdict is its
# negation.  These are finite-evidence trend calls, not proofs.
FLAG_THRESHOLDS = {
    # Pi log x / x deviation: conforming systems show decaying bumps that sit
    # near 0.3 in the last visible window, while the persistent-oscillation
    # counterexample plateaus at |cos|-amplitude ~0.71; 0.5 separates them
    "pnt": 0.5,
    "sharp_mertens": 0.05,
    "mertens_o_x": 0.10,
    "mertens_over_o_1": 0.10,
}


def _dyadic_windows(y_lo: float, y_hi: float, per_window: int = 17):
    wins = []
    w = max(y_lo, 1.0)
    while w < y_hi:
        hi = min(2.0 * w, y_hi)
        if hi > w * 1.05:
            wins.append(np.linspace(w, hi, per_window))
        w = 2.0 * w
    return wins


def _trend_verdict(stats, threshold):
    """holds iff the last window stats decrease and the final is small."""
    tail = stats[-3:]
    decreasing = len(tail) >= 2 and all(tail[i + 1] <= tail[i] * 1.001 + 1e-12 for i in range(len(tail) - 1))
    small = stats[-1] <= threshold
    return "holds" if (decreasing and small) else "fails"


def _flag_pnt(system):
    # Pi(x) log x / x -> 1 is the statement actually probed: the prime
    # measure is the stored object and its window statistic decays like
    # 1/log x for conforming systems, fast enough to read off at desk scale
    y_hi = min(system.y_max, math.log(system.x_max) if system.x_max else system.y_max)
    stats = []
    for win in _dyadic_windows(1.0, y_hi):
        vals = [
            abs(counting.capital_pi(system, math.exp(y)) * y * math.exp(-y) - 1.0)
            for y in win
        ]
        stats.append(float(np.max(vals)))
    return _trend_verdict(stats, FLAG_THRESHOLDS["pnt"]), stats


def _flag_sharp_mertens(system):
    y_hi = min(system.y_max, math.log(system.x_max) if system.x_max else system.y_max)
    stats = []
    prev_mean = None
    for win in _dyadic_windows(1.0, y_hi):
        vals = np.array([counting.psi1(system, math.exp(y)) - y for y in win])
        score = float(np.max(vals) - np.min(vals))
        if prev_mean is not None:
            score = max(score, abs(float(np.mean(vals)) - prev_mean))
        prev_mean = float(np.mean(vals))
        stats.append(score)
    return _trend_verdict(stats, FLAG_THRESHOLDS["sharp_mertens"]), stats


def _flag_remainder_smallo(system):
    profile = counting.remainder_profile(system)
    report = kernels.decay_diagnostic(kernels.conv_average(profile, kernels.abel_kernel()))
    verdict = "holds" if report.verdict == "consistent with o(1/y)" else "fails"
    return verdict, report.statistic


def _flag_remainder_l1(system):
    profile = counting.remainder_profile(system)
    report = kernels.l1_diagnostic(kernels.conv_average(profile, kernels.abel_kernel()))
    verdict = "holds" if report.verdict == "consistent with L1" else "fails"
    return verdict, {"cumulative": report.statistic, "slope": report.slope}


def _flag_mobius(system, over: bool):
    y_hi = min(system.y_max, math.log(system.x_max) if system.x_max else system.y_max)
    stats = []
    for win in _dyadic_windows(1.0, y_hi):
        vals = []
        for y in win:
            m_big, m_small = counting.mobius_summatory(system, math.exp(y))
            vals.append(abs(m_small) if over else abs(m_big) * math.exp(-y))
        stats.append(float(np.max(vals)))
    key = "mertens_over_o_1" if over else "mertens_o_x"
    return _trend_verdict(stats, FLAG_THRESHOLDS[key]), stats


_FLAG_EVALUATORS = {
    "pnt": _flag_pnt,
    "sharp_mertens": _flag_sharp_mertens,
    "remainder_smallo": _flag_remainder_smallo,
    "remainder_l1": _flag_remainder_l1,
    "mertens_o_x": lambda s: _flag_mobius(s, over=False),
    "mertens_over_o_1": lambda s: _flag_mobius(s, over=True),
}


def evaluate_flags(system: NumberSystem) -> dict:
    """Compute a verdict for every expected flag that is not 'unknown'.

    Returns {flag: {"expected", "verdict", "evidence", "agree"}}.
    """
    out = {}
    spec = system.scenario
    if spec is None:
        return out
    for flag, expected in spec.expected_flags.items():
        if expected == "unknown":
            continue
        verdict, evidence = _FLAG_EVALUATORS[flag](system)
        out[flag] = {
            "expected": expected,
            "verdict": verdict,
            "evidence": evidence,
            "agree": bool(verdict == expected),
        }
    return out
