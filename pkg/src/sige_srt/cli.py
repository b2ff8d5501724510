"""Command-line front end: ``sige-srt <command> [options]``.

Every table is written as CSV (metadata on a leading ``#`` line) or JSON,
and carries the tool version, schema version, resolved configuration and
seed. Exit codes: 0 success, 1 computational failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, donor, exchange, materials, stack, yieldsim

SCHEMAS = {
    "donor": "donor/1",
    "tune": "tuning/1",
    "validate": "validation/1",
    "exchange-sweep": "exchange-sweep/1",
    "exchange-spacing": "exchange-spacing/1",
    "yield": "yield/1",
    "yield-table": "yield-table/1",
    "percolation": "percolation/1",
    "percolation-threshold": "percolation-threshold/1",
}

GLOBAL_DEFAULTS = {"format": "csv", "output": "-", "seed": 0, "no_timestamp": False, "set": []}

COMMAND_DEFAULTS = {
    "donor": {"material": None, "ge_fraction": None, "growth": "111", "epsilon": None, "mxy": None, "mz": None},
    "tune": {"stack": None, "reference": "111", "B": 2.0, "field_min": 0.0, "field_max": 0.4,
             "field_steps": 41, "spacing": 0.25, "skip_validation": False},
    "validate": {"stack": None, "reference": "111", "alignment_tolerance": 2.0,
                 "strain_budget": stack.STRAIN_BUDGET},
    "exchange": {"a_B": 64.0, "epsilon": 16.0, "target": None, "r_min": 0.0, "r_max": None,
                 "r_steps": 201},
    "yield": {"doses": None, "optimize": False, "n": 2, "table": None, "sites": 1_000_000},
    "percolation": {"L": [128], "occupancy": [0.5], "trials": 2000, "threshold": False},
}

# published Bohr radii for the endpoint materials, angstrom
TABLE_RADII = {"Ge": (64.0, 24.0), "Si": (25.0, 15.0)}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(parser, suppress):
    d = argparse.SUPPRESS if suppress else None
    g = parser.add_argument_group("output")
    g.add_argument("--format", choices=["csv", "json"], default=d)
    g.add_argument("--output", "-o", default=d, help="file path, or - for stdout")
    g.add_argument("--seed", type=int, default=d, help="64-bit seed for stochastic commands")
    g.add_argument("--config", default=d, help="JSON file mirroring these flags")
    g.add_argument("--no-timestamp", action="store_true", default=d, dest="no_timestamp")
    g.add_argument("--set", action="append", default=d, metavar="KEY=VALUE",
                   help="override a resolved command option")


def build_parser():
    S = argparse.SUPPRESS
    p = _Parser(prog="sige-srt", description=__doc__.splitlines()[0], argument_default=S)
    p.add_argument("--version", action="version", version=f"sige-srt {__version__}")
    _common(p, suppress=True)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help):
        sp = sub.add_parser(name, help=help, argument_default=S)
        _common(sp, suppress=True)
        return sp

    sp = add("donor", "Bohr radii and binding energy: closed form vs variational")
    sp.add_argument("--material", choices=["Si", "Ge"])
    sp.add_argument("--ge-fraction", type=float, dest="ge_fraction")
    sp.add_argument("--growth")
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--mxy", type=float)
    sp.add_argument("--mz", type=float)

    for name, help in [("tune", "g-factor / resonance tuning curve"), ("validate", "check a layer stack")]:
        sp = add(name, help)
        sp.add_argument("--stack", help="stack JSON file")
        sp.add_argument("--reference", help="packaged reference stack: 111 or 001")
        if name == "tune":
            sp.add_argument("--B", type=float, dest="B", help="static field, tesla")
            sp.add_argument("--field-min", type=float, dest="field_min", help="mV/angstrom")
            sp.add_argument("--field-max", type=float, dest="field_max", help="mV/angstrom")
            sp.add_argument("--field-steps", type=int, dest="field_steps")
            sp.add_argument("--spacing", type=float, help="grid spacing, angstrom")
            sp.add_argument("--skip-validation", action="store_true", dest="skip_validation")
        else:
            sp.add_argument("--alignment-tolerance", type=float, dest="alignment_tolerance")
            sp.add_argument("--strain-budget", type=float, dest="strain_budget")

    sp = add("exchange", "exchange rate sweep or spacing for a target rate")
    sp.add_argument("--a-B", type=float, dest="a_B", help="Bohr radius, angstrom")
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--target", type=float, help="target 4J/h in Hz")
    sp.add_argument("--r-min", type=float, dest="r_min")
    sp.add_argument("--r-max", type=float, dest="r_max")
    sp.add_argument("--r-steps", type=int, dest="r_steps")

    sp = add("yield", "implantation yield: closed form and Monte Carlo")
    sp.add_argument("-p", "--doses", nargs="+", help="per-pass Poisson means")
    sp.add_argument("--optimize", action="store_true")
    sp.add_argument("-n", type=int, dest="n", help="passes for --optimize")
    sp.add_argument("--table", nargs="+", type=int, help="best uniform dose for each n")
    sp.add_argument("--sites", type=int)

    sp = add("percolation", "triangular-lattice spanning probability")
    sp.add_argument("--L", nargs="+", type=int, dest="L")
    sp.add_argument("--occupancy", nargs="+", type=float)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--threshold", action="store_true", help="estimate the threshold over the L list")
    return p


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def resolve_config(argv):
    """Merge defaults < config file < command line into one flat dict."""
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command")
    cfg = {"command": command, **GLOBAL_DEFAULTS, **COMMAND_DEFAULTS[command]}
    if "config" in ns:
        path = ns.pop("config")
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        for key, val in data.items():
            if key in GLOBAL_DEFAULTS:
                cfg[key] = val
            elif key in COMMAND_DEFAULTS:
                if not isinstance(val, dict):
                    raise UsageError(f"config section {key!r} must be an object")
                if key != command:
                    continue
                bad = set(val) - set(COMMAND_DEFAULTS[key])
                if bad:
                    raise UsageError(f"unknown keys in config section {key!r}: {sorted(bad)}")
                cfg.update(val)
            else:
                raise UsageError(f"unknown config key {key!r}")
    cfg.update(ns)
    for item in cfg.pop("set") or []:
        key, sep, val = item.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in COMMAND_DEFAULTS[command]:
            raise UsageError(f"bad --set {item!r}; keys for {command}: {sorted(COMMAND_DEFAULTS[command])}")
        cfg[key] = _parse_value(val)
    if cfg["seed"] is not None and not 0 <= int(cfg["seed"]) < 2**64:
        raise UsageError("seed must fit in 64 bits")
    return cfg


# --- output -----------------------------------------------------------------------


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def _cell(v):
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(x) for x in v)
    if isinstance(v, bool):
        return str(v).lower()
    return str(v)


def render(table, columns, rows, cfg, extra=None):
    meta = {
        "tool": "sige-srt",
        "version": __version__,
        "schema": SCHEMAS[table],
        "columns": list(columns),
        "seed": cfg.get("seed"),
        "config": cfg,
    }
    if extra:
        meta.update(extra)
    if not cfg.get("no_timestamp"):
        meta["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    meta = _jsonable(meta)
    rows = [[_jsonable(v) for v in row] for row in rows]
    if cfg["format"] == "json":
        return json.dumps({"meta": meta, "columns": list(columns), "rows": rows}, indent=2) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(meta, sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


# --- commands -----------------------------------------------------------------------


def cmd_donor(cfg):
    if cfg["material"]:
        m = materials.endpoint_params(cfg["material"])
        label = cfg["material"]
    elif cfg["ge_fraction"] is not None:
        alloy = materials.AlloySpec(cfg["ge_fraction"], cfg["growth"])
        m = materials.alloy_params(alloy)
        label = f"Si{1 - alloy.ge_fraction:.3g}Ge{alloy.ge_fraction:.3g}<{alloy.growth}>"
    elif None not in (cfg["epsilon"], cfg["mxy"], cfg["mz"]):
        eps, mxy, mz = cfg["epsilon"], cfg["mxy"], cfg["mz"]
        if min(eps, mxy, mz) <= 0:
            raise UsageError("epsilon, mxy and mz must be positive")
        m = None
        label = "custom"
    else:
        raise UsageError("give --material, --ge-fraction, or all of --epsilon --mxy --mz")
    if m is not None:
        eps, mxy, mz = m.epsilon, m.m_xy, m.m_z
    approx = donor.closed_form_params(eps, mxy, mz)
    var = donor.variational_solve(eps, mxy, mz)
    ref = TABLE_RADII.get(label, (None, None))
    columns = ["material", "epsilon", "m_xy", "m_z", "a_xy_approx_A", "a_z_approx_A",
               "a_xy_var_A", "a_z_var_A", "binding_var_meV", "a_z_from_var_a_xy_A",
               "a_xy_table_A", "a_z_table_A"]
    row = [label, eps, mxy, mz, approx.a_xy, approx.a_z, var.a_xy, var.a_z, var.binding_energy,
           donor.bohr_radius_z(var.a_xy, mxy, mz), ref[0] if ref[0] else "", ref[1] if ref[1] else ""]
    return render("donor", columns, [row], cfg)


def _load_stack(cfg):
    if cfg["stack"]:
        return stack.load_stack(cfg["stack"])
    return stack.reference_stack(cfg["reference"])


def cmd_validate(cfg):
    s = _load_stack(cfg)
    report = stack.validate_stack(s, stack.default_donor(s), cfg["alignment_tolerance"], cfg["strain_budget"])
    rows = [[c.name, c.passed, c.value, c.limit, c.message] for c in report.checks]
    out = render("validate", ["check", "passed", "value", "limit", "message"], rows, cfg,
                 {"passed": report.passed, "stack": s.to_dict()})
    return out, (0 if report.passed else 1)


def cmd_tune(cfg):
    s = _load_stack(cfg)
    dn = stack.default_donor(s)
    if not cfg["skip_validation"]:
        report = stack.validate_stack(s, dn)
        if not report.passed:
            raise ComputationError(str(report), details=report.to_dict())
    if cfg["field_steps"] < 1 or cfg["field_max"] < cfg["field_min"] or cfg["field_min"] < 0:
        raise UsageError("need 0 <= field-min <= field-max and field-steps >= 1")
    fields = np.linspace(cfg["field_min"], cfg["field_max"], cfg["field_steps"])
    tc = stack.tuning_curve(s, cfg["B"], fields, donor=dn, spacing=cfg["spacing"])
    return render("tune", stack.TUNING_CSV_HEADER, tc.rows(), cfg,
                  {"stack": s.to_dict(), "donor": vars(dn)})


def cmd_exchange(cfg):
    ctx = exchange.ExchangeContext(cfg["a_B"], cfg["epsilon"])
    peak_r = exchange.PEAK_RATIO * ctx.a_B
    peak = {"peak_r_A": peak_r, "peak_rate_Hz": exchange.max_exchange_rate(ctx)}
    if cfg["target"] is not None:
        r = exchange.spacing_for_rate(cfg["target"], ctx)
        claim = exchange.PUBLISHED_SPACING_A
        columns = ["target_Hz", "r_A", "r_over_a_B", "published_A", "published_radii",
                   "rate_at_published_radii_Hz", "r_over_published"]
        row = [cfg["target"], r, r / ctx.a_B, claim, exchange.PUBLISHED_SPACING_RADII,
               exchange.exchange_rate(exchange.PUBLISHED_SPACING_RADII * ctx.a_B, ctx), r / claim]
        return render("exchange-spacing", columns, [row], cfg, peak)
    r_max = cfg["r_max"] if cfg["r_max"] is not None else 40.0 * ctx.a_B
    if cfg["r_steps"] < 2 or r_max <= cfg["r_min"] or cfg["r_min"] < 0:
        raise UsageError("need 0 <= r-min < r-max and r-steps >= 2")
    r = np.linspace(cfg["r_min"], r_max, cfg["r_steps"])
    if cfg["r_min"] <= peak_r <= r_max:
        r = np.unique(np.append(r, peak_r))
    rate = exchange.exchange_rate(r, ctx)
    peak["peak_in_sweep"] = bool(np.any(r == peak_r))
    peak["sweep_argmax_r_A"] = float(r[int(np.argmax(rate))])
    return render("exchange-sweep", exchange.SWEEP_CSV_HEADER, list(zip(r.tolist(), rate.tolist())), cfg, peak)


def _parse_doses(raw):
    try:
        doses = [float(x) for tok in raw for x in str(tok).replace(",", " ").split()]
        return yieldsim.ImplantStrategy(doses)
    except ValueError as exc:
        raise UsageError(f"malformed strategy {raw!r}: {exc}") from None


def cmd_yield(cfg):
    seed = cfg["seed"] or 0
    if cfg["table"]:
        if any(n < 1 for n in cfg["table"]):
            raise UsageError("pass counts must be >= 1")
        return render("yield-table", yieldsim.YIELD_CSV_HEADER, yieldsim.yield_table(cfg["table"]), cfg)
    if cfg["sites"] < 1:
        raise UsageError("sites must be >= 1")
    if cfg["optimize"]:
        if cfg["n"] < 1:
            raise UsageError("-n must be >= 1")
        strategy, _ = yieldsim.optimize_reimplant(cfg["n"])
    elif cfg["doses"]:
        strategy = _parse_doses(cfg["doses"] if isinstance(cfg["doses"], list) else [cfg["doses"]])
    else:
        raise UsageError("give -p DOSES, --optimize -n N, or --table N ...")
    closed = yieldsim.reimplant_yield_general(strategy)
    mc = yieldsim.monte_carlo_yield(strategy, cfg["sites"], seed)
    columns = ["passes", "doses", "closed_form_yield", "mc_yield", "mc_stderr", "sites"]
    row = [len(strategy), list(strategy.doses), closed, mc.estimate, mc.stderr, mc.sites]
    return render("yield", columns, [row], cfg)


def cmd_percolation(cfg):
    seed = cfg["seed"] or 0
    if cfg["trials"] < 1 or min(cfg["L"]) < 2:
        raise UsageError("trials must be >= 1 and L >= 2")
    if cfg["threshold"]:
        try:
            est = yieldsim.percolation_threshold_estimate(cfg["L"], cfg["trials"], seed=seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        rows = [[L, c, s] for L, c, s in zip(est.sizes, est.crossings, est.spreads)]
        return render("percolation-threshold", ["L", "half_crossing", "spread"], rows, cfg,
                      {"estimate": est.estimate, "uncertainty": est.uncertainty,
                       "criterion": "left-right spanning, open boundaries"})
    if any(not 0 <= o <= 1 for o in cfg["occupancy"]):
        raise UsageError("occupancy must lie in [0, 1]")
    rows = yieldsim.percolation_sweep(cfg["L"], cfg["occupancy"], cfg["trials"], seed)
    return render("percolation", yieldsim.PERCOLATION_CSV_HEADER, rows, cfg,
                  {"criterion": "left-right spanning, open boundaries"})


COMMANDS = {
    "donor": cmd_donor,
    "tune": cmd_tune,
    "validate": cmd_validate,
    "exchange": cmd_exchange,
    "yield": cmd_yield,
    "percolation": cmd_percolation,
}


class ComputationError(Exception):
    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = details


def _fail(kind, message, code, details=None):
    payload = {"error": kind, "message": message, "exit_code": code}
    if details is not None:
        payload["details"] = details
    sys.stderr.write(json.dumps(_jsonable(payload)) + "\n")
    return code


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if any(a in ("-h", "--help", "--version") for a in argv):
        try:
            build_parser().parse_args(argv)
        except SystemExit as exc:
            return exc.code
    try:
        cfg = resolve_config(argv)
        result = COMMANDS[cfg["command"]](cfg)
    except UsageError as exc:
        return _fail("usage", str(exc), 2)
    except ComputationError as exc:
        return _fail("computation", str(exc), 1, exc.details)
    except (donor.ConvergenceError, ValueError, ArithmeticError) as exc:
        return _fail(type(exc).__name__, str(exc), 1)
    text, code = result if isinstance(result, tuple) else (result, 0)
    if cfg["output"] in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(cfg["output"]).write_text(text)
    return code
