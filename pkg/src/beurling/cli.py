"""Command-line interface: config parsing, dispatch, and report emission.

Config files are UTF-8 ``key = value`` lines with ``#`` comments; section
headers in square brackets namespace keys (``[scenario]`` followed by
``q = 1.5`` is the same as a top-level ``scenario.q = 1.5``, and plain
scenario parameters may also be given directly).  Every value is validated
with its line number; all errors are collected before giving up.

Outputs are deterministic: fixed field order, 12-significant-digit decimal
formatting, no timestamps.  Partial output files are removed on failure.

Exit codes: 0 success, 2 config error, 3 numeric/range error,
4 verification contradiction.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__, counting, kernels, scenarios, semigroup, zeta
from .errors import BeurlingError, ConfigError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_CONTRADICTION = 4

COMMANDS = (
    "enumerate",
    "count",
    "mertens",
    "mobius",
    "kernels",
    "zeta",
    "probe",
    "verify",
    "report",
)

VERIFY_CATALOG = (
    "rational",
    "rational_plus_prime",
    "ex51",
    "ex52",
    "ex53",
    "ex53_discrete",
    "remark54",
    "remark54_alt",
)


def fmt(x) -> str:
    """Canonical 12-significant-digit decimal rendering."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    v = float(x)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.12g}"


def _jsonify(obj):
    """Recursively render floats through fmt for byte-stable JSON."""
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(fmt(obj))
    if isinstance(obj, complex):
        return [float(fmt(obj.real)), float(fmt(obj.imag))]
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    return obj


# -- configuration ------------------------------------------------------------

_SCENARIO_KEYS = {
    "x_max": (float, 1.0, 1.0e8),
    "y_max": (float, 4.0, 200.0),
    "q": (float, 1.0 + 1e-9, 1.0e6),
    "A": (float, math.e, 1.0e300),
    "omega": (str, None, None),
    "width_power": (float, 1.0 + 1e-9, 3.0),
    "k_max": (int, 1, 10_000_000),
    "primes": (str, None, None),
    "primes_file": (str, None, None),
}

_RUN_KEYS = {
    "scenario": (str, None, None),
    "command": (str, None, None),
    "step_h": (float, 2.0 ** -14, 2.0 ** -4),
    "X": (float, 1.0, 1.0e8),
    "kernel": (str, None, None),
    "beta": (float, 0.0, 64.0),
    "width": (float, 1e-3, 64.0),
    "sigma_list": (str, None, None),
    "t_window": (str, None, None),
    "t_count": (int, 1, 4096),
    "points_per_decade": (int, 1, 4096),
    "x_list": (str, None, None),
    "out": (str, None, None),
    "format": (str, None, None),
    "quiet": (bool, None, None),
}


class RunConfig:
    """Validated run description."""

    def __init__(self, values: dict):
        self.values = values

    def __getattr__(self, key):
        try:
            return self.values[key]
        except KeyError:
            raise AttributeError(key) from None

    def get(self, key, default=None):
        return self.values.get(key, default)

    def scenario_params(self) -> dict:
        out = {}
        for key in _SCENARIO_KEYS:
            if key in self.values:
                out[key] = self.values[key]
        if "primes" in out:
            out["primes"] = [float(p) for p in str(out["primes"]).split(",") if p.strip()]
        if self.values.get("step_h") is not None:
            out["step_h"] = self.values["step_h"]
        return out


def _parse_value(key, raw, line_no, errors):
    spec = _RUN_KEYS.get(key) or _SCENARIO_KEYS.get(key)
    if spec is None:
        errors.append((line_no, f"unknown key {key!r}"))
        return None
    typ, lo, hi = spec
    raw = raw.strip()
    try:
        if typ is bool:
            if raw.lower() in ("1", "true", "yes", "on"):
                val = True
            elif raw.lower() in ("0", "false", "no", "off"):
                val = False
            else:
                raise ValueError(raw)
        else:
            val = typ(raw)
    except (TypeError, ValueError):
        errors.append((line_no, f"{key}: cannot parse {raw!r} as {typ.__name__}"))
        return None
    if lo is not None and isinstance(val, (int, float)) and not (lo <= val <= hi):
        errors.append((line_no, f"{key} = {raw} outside the allowed range [{lo:g}, {hi:g}]"))
        return None
    return val


def parse_config(text: str) -> RunConfig:
    """Parse and validate; raises ConfigError carrying (line, message) pairs."""
    values = {}
    errors = []
    section = ""
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip().lower()
            if section in ("run", "main", ""):
                section = ""
            continue
        if "=" not in stripped:
            errors.append((line_no, f"expected key = value, got {stripped!r}"))
            continue
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if section and section not in ("scenario", "output"):
            errors.append((line_no, f"unknown section [{section}]"))
            continue
        val = _parse_value(key, raw, line_no, errors)
        if val is not None:
            values[key] = val
    if "command" in values and values["command"] not in COMMANDS:
        errors.append((0, f"unknown command {values['command']!r}; one of {', '.join(COMMANDS)}"))
    if "format" in values and values["format"] not in ("csv", "json"):
        errors.append((0, "format must be csv or json"))
    if "scenario" not in values:
        errors.append((0, "missing scenario"))
    elif values["scenario"] not in list(scenarios.available_scenarios()) + ["all"]:
        errors.append((0, f"unknown scenario {values['scenario']!r}"))
    if "command" not in values:
        errors.append((0, "missing command"))
    if values.get("scenario") == "all" and values.get("command") not in ("verify", None):
        errors.append((0, "scenario = all is only valid for the verify command"))
    # scenario-specific constraints with validation context
    if values.get("scenario") == "ex52" and "A" in values and values["A"] < math.e:
        errors.append((0, f"A = {values['A']:g} below the ex52 positivity threshold e"))
    if errors:
        raise ConfigError(sorted(errors))
    return RunConfig(values)


def _floats_csv(raw: str):
    return [float(tok) for tok in str(raw).split(",") if tok.strip()]


# -- command implementations ---------------------------------------------------


def _build_system(cfg: RunConfig):
    return scenarios.build(cfg.scenario, **cfg.scenario_params())


def _csv_table(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _x_grid(cfg: RunConfig, system) -> np.ndarray:
    if cfg.get("x_list"):
        return np.array(_floats_csv(cfg.x_list))
    per_decade = cfg.get("points_per_decade", 64)
    x_hi = cfg.get("X") or min(system.cutoff_x, system.x_max or system.cutoff_x)
    decades = math.log10(x_hi)
    n = max(2, int(decades * per_decade) + 1)
    return np.exp(np.linspace(0.0, math.log(x_hi), n))


def cmd_enumerate(cfg: RunConfig, system) -> str:
    x_hi = cfg.get("X") or system.x_max
    enum = system.enumeration(x_hi)
    rows = zip(np.exp(enum.log_value), enum.log_value, enum.lam, enum.mob)
    return _csv_table(["value", "log_value", "lambda", "mobius"], rows)


def cmd_count(cfg: RunConfig, system) -> str:
    xs = _x_grid(cfg, system)
    rows = []
    for x in xs:
        rows.append(
            (
                x,
                counting.counting_n(system, float(x)),
                counting.capital_pi(system, float(x)),
                counting.chebyshev_psi(system, float(x)),
                counting.psi1(system, float(x)),
            )
        )
    return _csv_table(["x", "N", "Pi", "psi", "psi1"], rows)


def cmd_mertens(cfg: RunConfig, system) -> str:
    X = cfg.get("X") or min(system.cutoff_x, system.x_max or system.cutoff_x)
    kern = kernels.kernel_by_name(
        cfg.get("kernel", "abel"), beta=cfg.get("beta", 0.0), width=cfg.get("width", 1.0)
    )
    rep = counting.mertens_constant(system, X, kernel=kern)
    return json.dumps(_jsonify(rep.to_jsonable()), indent=2) + "\n"


def cmd_mobius(cfg: RunConfig, system) -> str:
    xs = _x_grid(cfg, system)
    rows = []
    for x in xs:
        m_big, m_small = counting.mobius_summatory(system, float(x))
        rows.append((x, m_big, m_small))
    return _csv_table(["x", "M", "m"], rows)


def cmd_kernels(cfg: RunConfig, system) -> str:
    kern = kernels.kernel_by_name(
        cfg.get("kernel", "abel"), beta=cfg.get("beta", 0.0), width=cfg.get("width", 1.0)
    )
    a = counting.resolve_density(system)
    profile = counting.remainder_profile(system, a=a)
    conv = kernels.conv_average(profile, kern)
    b, c, note = kernels.b_constant(profile, kern, a) if a > 0 else (math.nan, math.nan, "a = 0")
    payload = {
        "scenario": system.label,
        "kernel": kern.name,
        "hat0": kern.hat0,
        "a": a,
        "b": b,
        "c": c,
        "note": note,
        "decay": kernels.decay_diagnostic(conv).to_jsonable(),
        "l1": kernels.l1_diagnostic(conv).to_jsonable(),
    }
    return json.dumps(_jsonify(payload), indent=2) + "\n"


def cmd_zeta(cfg: RunConfig, system) -> str:
    sigmas = _floats_csv(cfg.get("sigma_list", "2.0,1.5,1.25"))
    ts = [0.0]
    if cfg.get("t_window"):
        lo, hi = _floats_csv(cfg.t_window)
        ts = list(np.linspace(lo, hi, cfg.get("t_count", 5)))
    rows = []
    for sg in sigmas:
        for t in ts:
            s = complex(sg, t)
            zn = zeta.zeta_from_n(system, s)
            zp = zeta.zeta_from_pi(system, s)
            rows.append((sg, t, zn.real, zn.imag, zp.real, zp.imag, abs(zn - zp)))
    return _csv_table(
        ["sigma", "t", "zeta_N_re", "zeta_N_im", "zeta_Pi_re", "zeta_Pi_im", "residual"],
        rows,
    )


def cmd_probe(cfg: RunConfig, system) -> str:
    func, name = scenarios.boundary_function(system)
    if cfg.get("t_window"):
        lo, hi = _floats_csv(cfg.t_window)
        ts = list(np.linspace(lo, hi, cfg.get("t_count", 5)))
    else:
        ts = [0.0, 0.5, 1.0, 2.0]
    sigmas = None
    if cfg.get("sigma_list"):
        sigmas = _floats_csv(cfg.sigma_list)
    rep = zeta.boundary_probe(func, ts, sigmas, name=name)
    return json.dumps(_jsonify(rep.to_jsonable()), indent=2) + "\n"


def _verify_one(system) -> dict:
    flags = scenarios.evaluate_flags(system)
    return {
        "scenario": system.label,
        "flags": flags,
        "contradictions": sorted(k for k, v in flags.items() if not v["agree"]),
    }


def cmd_verify(cfg: RunConfig, system) -> tuple[str, int]:
    if cfg.scenario == "all":
        results = []
        for name in VERIFY_CATALOG:
            results.append(_verify_one(scenarios.build(name)))
    else:
        results = [_verify_one(system)]
    bad = sorted({c for r in results for c in r["contradictions"]})
    payload = {"results": results, "contradictions_total": sum(len(r["contradictions"]) for r in results)}
    code = EXIT_CONTRADICTION if bad else EXIT_OK
    return json.dumps(_jsonify(payload), indent=2) + "\n", code


def cmd_report(cfg: RunConfig, system) -> tuple[str, int]:
    """Bundle every artifact for one scenario."""
    verify_payload, code = cmd_verify(cfg, system)
    payload = {
        "version": __version__,
        "scenario": system.label,
        "parameters": _jsonify(system.scenario.parameters if system.scenario else {}),
        "declared_constants": _jsonify(
            system.scenario.declared_constants if system.scenario else {}
        ),
        "count": cmd_count(cfg, system),
        "mobius": cmd_mobius(cfg, system),
        "mertens": json.loads(cmd_mertens(cfg, system)) if counting.resolve_density(system) > 0 else None,
        "kernels": json.loads(cmd_kernels(cfg, system)),
        "zeta": cmd_zeta(cfg, system),
        "probe": json.loads(cmd_probe(cfg, system)),
        "verify": json.loads(verify_payload),
    }
    return json.dumps(_jsonify(payload), indent=2) + "\n", code


def run(cfg: RunConfig) -> int:
    """Execute a validated config; returns the exit status."""
    out_path = cfg.get("out")
    code = EXIT_OK
    try:
        system = None
        if not (cfg.scenario == "all" and cfg.command == "verify"):
            system = _build_system(cfg)
        if cfg.command == "enumerate":
            text = cmd_enumerate(cfg, system)
        elif cfg.command == "count":
            text = cmd_count(cfg, system)
        elif cfg.command == "mertens":
            text = cmd_mertens(cfg, system)
        elif cfg.command == "mobius":
            text = cmd_mobius(cfg, system)
        elif cfg.command == "kernels":
            text = cmd_kernels(cfg, system)
        elif cfg.command == "zeta":
            text = cmd_zeta(cfg, system)
        elif cfg.command == "probe":
            text = cmd_probe(cfg, system)
        elif cfg.command == "verify":
            text, code = cmd_verify(cfg, system)
        elif cfg.command == "report":
            text, code = cmd_report(cfg, system)
        else:
            raise ConfigError([(0, f"unknown command {cfg.command!r}")])
    except BeurlingError:
        if out_path and os.path.exists(out_path + ".tmp"):
            os.remove(out_path + ".tmp")
        raise
    if out_path:
        tmp = out_path + ".tmp"
        try:
            with open(tmp, "w", encoding="utf-8") as fh:
                fh.write(text)
            os.replace(tmp, out_path)
        except BaseException:
            if os.path.exists(tmp):
                os.remove(tmp)
            raise
    elif not cfg.get("quiet", False):
        sys.stdout.write(text)
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="beurling",
        description="Generalized number systems: counting functions and "
        "PNT-equivalence diagnostics.",
    )
    parser.add_argument("--config", help="path to a key = value config file")
    parser.add_argument(
        "--set",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config entry (repeatable)",
    )
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--format", choices=("csv", "json"))
    parser.add_argument("--quiet", action="store_true")
    parser.add_argument("--version", action="version", version=__version__)
    args = parser.parse_args(argv)

    lines = []
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                lines.append(fh.read())
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    for item in args.set:
        if "=" not in item:
            print(f"error: --set expects KEY=VALUE, got {item!r}", file=sys.stderr)
            return EXIT_CONFIG
        lines.append(item)
    if args.out:
        lines.append(f"out = {args.out}")
    if args.format:
        lines.append(f"format = {args.format}")
    if args.quiet:
        lines.append("quiet = true")

    try:
        cfg = parse_config("\n".join(lines))
    except ConfigError as exc:
        for ln, msg in exc.errors:
            where = f"line {ln}: " if ln else ""
            print(f"config error: {where}{msg}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return run(cfg)
    except ConfigError as exc:
        for ln, msg in exc.errors:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except BeurlingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
