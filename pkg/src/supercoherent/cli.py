"""Command-line driver: one subcommand per experiment, CSV or JSON artifacts.

Parameters come from built-in defaults, then an optional INI config file
(section named after the subcommand), then command-line flags.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .errors import SupercoherentError

THREADS_ENV = "SUPERCOHERENT_THREADS"


class ConfigError(Exception):
    kind = "config"


def parse_edge(text):
    parts = str(text).replace(",", "-").split("-")
    if len(parts) != 2:
        raise ConfigError(f"edge must look like 'a-b', got {text!r}")
    return int(parts[0]), int(parts[1])


def parse_float_list(text):
    return [float(x) for x in str(text).replace(",", " ").split()]


def parse_str_list(text):
    return [x for x in str(text).replace(",", " ").split()]


def fmt_edge(edge):
    return f"{edge[0]}-{edge[1]}"


# name -> (parser, default, help)
COMMANDS = {
    "table1": ({}, "the three reference 6-site designs with solved J56 and gaps"),
    "solve": ({
        "j16": (float, 1.0, "attachment coupling J16 = J35"),
        "chain_len": (int, 2, "even mediator chain length"),
        "j_outer": (float, 1.0, "non-middle chain couplings (chains longer than 2)"),
        "free_edge": (parse_edge, None, "edge to solve for, default the middle chain edge"),
        "lo": (float, None, "lower bracket; default scales with the largest coupling"),
        "hi": (float, None, "upper bracket"),
    }, "solve the mediator coupling for a twofold singlet ground level"),
    "gap": ({
        "j16": (float, 1.0, "attachment coupling"),
        "j56": (float, None, "mediator coupling; solved when omitted"),
    }, "energy gap E2 - E0 of a 6-site layout"),
    "correct": ({
        "row": (int, 1, "reference layout row 1-3 (J16=1, J56=1, J16=2)"),
        "edge": (parse_edge, (2, 4), "perturbed edge"),
        "value": (float, 1.1, "perturbed coupling value"),
        "free_edge": (parse_edge, (5, 6), "edge re-solved to restore degeneracy"),
    }, "re-solve the free edge after a coupling error"),
    "min-attach": ({
        "chain_len": (int, 2, "even mediator chain length"),
        "lo": (float, 0.5, "lower end of the search range"),
        "hi": (float, 1.5, "upper end of the search range"),
    }, "smallest attachment coupling admitting the degenerate singlet ground level"),
    "axes": ({
        "row": (int, 1, "reference layout row 1-3"),
        "z_edge": (parse_edge, (5, 6), "edge fixing the logical z basis"),
    }, "logical rotation generators of every intra-SQ edge"),
    "sweep-gate": ({
        "scheme": (str, "horizontal", "horizontal | vertical | custom"),
        "edges": (str, None, "custom inter-SQ edges, e.g. '1-1 3-3'"),
        "row": (int, 2, "reference layout row 1-3"),
        "j_max": (float, 1.2, "largest inter-SQ coupling"),
        "n_points": (int, 50, "sweep points in (0, j_max]"),
    }, "labelled two-SQ eigenvalues versus inter-SQ coupling"),
    "cphase": ({
        "scheme": (str, "vertical", "horizontal | vertical | custom"),
        "edges": (str, None, "custom inter-SQ edges"),
        "row": (int, 2, "reference layout row 1-3"),
        "j_inter": (float, 0.6, "inter-SQ coupling during the pulse"),
    }, "single-interval controlled-phase pulse with exact verification"),
    "precession": ({
        "encodings": (parse_str_list, ["single", "triangle3", "sq4", "sq6"], "encodings"),
        "j_values": (parse_float_list, [6.0, 12.0, 18.0, 24.0, 30.0, 36.0, 42.0, 48.0, 54.0, 60.0],
                     "intra-qubit couplings in ueV"),
        "hb": (float, 0.06, "nuclear field magnitude in ueV"),
        "n_samples": (int, 200, "field samples per point"),
        "seed": (int, 0, "RNG seed"),
        "field_model": (str, "fixed", "fixed | gaussian"),
    }, "precession time statistics under random nuclear fields"),
    "hubbard": ({
        "row": (int, 1, "reference layout row 1-3"),
        "u_over_j": (parse_float_list, [20.0, 100.0, 400.0, 1e4], "U/J values"),
        "free_edge": (parse_edge, (5, 6), "hopping to tune"),
    }, "Hubbard cross-check: Heisenberg-limit error and tuned hopping"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail("usage", message, 2)


def _fail(kind, message, code):
    sys.stderr.write(f"error kind={kind} message={json.dumps(str(message))}\n")
    raise SystemExit(code)


def build_parser():
    parser = _Parser(prog="supercoherent", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"supercoherent {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (params, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", help="INI file; keys read from the [%s] section" % name)
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        for key, (_, default, h) in params.items():
            p.add_argument("--" + key.replace("_", "-"), dest=key, default=None,
                           help=f"{h} (default: {default})")
    return parser


def resolve_config(command, args):
    params, _ = COMMANDS[command]
    resolved = {k: default for k, (_, default, _) in params.items()}
    fmt = "csv"
    if args.config:
        cp = configparser.ConfigParser()
        try:
            with open(args.config) as fh:
                cp.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        for section in cp.sections():
            if section != command:
                raise ConfigError(f"unknown section [{section}] for command {command}")
        if cp.has_section(command):
            for key, value in cp.items(command):
                key = key.replace("-", "_")
                if key == "format":
                    fmt = value
                    continue
                if key not in params:
                    raise ConfigError(f"unknown key {key!r} in [{command}]")
                resolved[key] = _convert(params[key][0], key, value)
    for key in params:
        value = getattr(args, key)
        if value is not None:
            resolved[key] = _convert(params[key][0], key, value)
    if args.format:
        fmt = args.format
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    return resolved, fmt


def _convert(fn, key, value):
    try:
        return fn(value)
    except (ValueError, ConfigError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from exc


def _mapper():
    raw = os.environ.get(THREADS_ENV, "") or "1"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n <= 1:
        return map, None
    pool = ThreadPoolExecutor(max_workers=n)
    return pool.map, pool


def _config_repr(value):
    if isinstance(value, tuple) and len(value) == 2 and all(isinstance(x, int) for x in value):
        return fmt_edge(value)
    if isinstance(value, list):
        return " ".join(str(v) for v in value)
    return str(value)


def _cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def render(command, config, columns, rows, fmt):
    meta = {
        "tool": f"supercoherent {__version__}",
        "command": command,
        "config": {k: _config_repr(v) for k, v in sorted(config.items())},
    }
    if "seed" in config:
        meta["seed"] = config["seed"]
    if fmt == "json":
        data = {"metadata": meta, "columns": list(columns),
                "rows": [{c: _json_value(v) for c, v in zip(columns, row)} for row in rows]}
        return json.dumps(data, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# tool: {meta['tool']}\n# command: {command}\n")
    for k, v in meta["config"].items():
        buf.write(f"# config: {k} = {v}\n")
    if "seed" in meta:
        buf.write(f"# seed: {meta['seed']}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if np.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def _scheme_system(config):
    from .gates import couple_sqs, default_pair

    a, b = default_pair(config["row"])
    if config["edges"]:
        edges = [parse_edge(e) for e in config["edges"].split()]
        return couple_sqs(a, b, edges, "custom")
    if config["scheme"] not in ("horizontal", "vertical"):
        raise ConfigError(f"scheme {config['scheme']!r} needs explicit --edges")
    return couple_sqs(a, b, None, config["scheme"])


def run_table1(config, map_fn):
    from .design import energy_gap, j56_closed_form, solve_mediator_coupling, reference_layout

    rows = []
    for r in (1, 2, 3):
        layout = reference_layout(r)
        j16 = layout.coupling((1, 6))
        numeric = solve_mediator_coupling(layout, (5, 6))
        rows.append((j16, j56_closed_form(j16), numeric, energy_gap(layout.with_coupling((5, 6), numeric))))
    return ("j16", "j56_closed", "j56_numeric", "gap"), rows


def run_solve(config, map_fn):
    from .design import energy_gap, j56_closed_form, rhombus_layout, solve_mediator_coupling

    n = config["chain_len"]
    layout = rhombus_layout(n, config["j16"], [config["j_outer"]] * (n - 1))
    edge = config["free_edge"] or layout.middle_edge
    bracket = None
    if config["lo"] is not None or config["hi"] is not None:
        if config["lo"] is None or config["hi"] is None:
            raise ConfigError("give both lo and hi, or neither")
        bracket = (config["lo"], config["hi"])
    J = solve_mediator_coupling(layout, edge, bracket)
    closed = j56_closed_form(config["j16"]) if n == 2 else float("nan")
    gap = energy_gap(layout.with_coupling(edge, J))
    return ("j16", "chain_len", "free_edge", "j_numeric", "j_closed", "gap"), [
        (config["j16"], n, fmt_edge(edge), J, closed, gap)
    ]


def run_gap(config, map_fn):
    from .design import energy_gap, rhombus_layout, solve_mediator_coupling

    layout = rhombus_layout(2, config["j16"], [1.0])
    j56 = config["j56"]
    if j56 is None:
        j56 = solve_mediator_coupling(layout, (5, 6))
    return ("j16", "j56", "gap"), [(config["j16"], j56, energy_gap(layout.with_coupling((5, 6), j56)))]


def run_correct(config, map_fn):
    from .design import correct_coupling, reference_layout

    layout = reference_layout(config["row"])
    before = layout.coupling(config["free_edge"])
    after = correct_coupling(layout, config["edge"], config["value"], config["free_edge"])
    return ("perturbed_edge", "perturbed_value", "free_edge", "original", "corrected"), [
        (fmt_edge(config["edge"]), config["value"], fmt_edge(config["free_edge"]), before, after)
    ]


def run_min_attach(config, map_fn):
    from .design import attachment_feasibility, min_attachment

    value = min_attachment(config["chain_len"], (config["lo"], config["hi"]))
    _, reason = attachment_feasibility(value - 5e-3, config["chain_len"])
    return ("chain_len", "min_j16", "failure_below"), [(config["chain_len"], value, reason)]


def run_axes(config, map_fn):
    from .design import reference_layout
    from .logical import ground_subspace, rotation_axes

    sub = ground_subspace(reference_layout(config["row"]), config["z_edge"])
    rows = []
    for edge, g, angle in rotation_axes(sub):
        rows.append((fmt_edge(edge), *g.coeffs, float("nan") if angle is None else angle))
    return ("edge", "c0", "cx", "cy", "cz", "angle_to_z_deg"), rows


def run_sweep_gate(config, map_fn):
    from .gates import SWEEP_COLUMNS, sweep_inter_coupling

    sys_ = _scheme_system(config)
    n = config["n_points"]
    js = np.linspace(config["j_max"] / n, config["j_max"], n)
    sweep = sweep_inter_coupling(sys_, js, map_fn=map_fn)
    return SWEEP_COLUMNS, list(sweep.rows())


def run_cphase(config, map_fn):
    from .gates import cphase_pulse

    p = cphase_pulse(_scheme_system(config), config["j_inter"])
    cols = ("J", "omega", "duration", "alpha_A", "alpha_B", "global_phase", "fidelity",
            "lam00", "lam01", "lam10", "lam11")
    return cols, [(p.j_inter, p.omega, p.duration, p.alpha_a, p.alpha_b, p.global_phase,
                   p.fidelity, *p.lam)]


def run_precession(config, map_fn):
    from .decoherence import PRECESSION_COLUMNS, precession_sweep

    res = precession_sweep(config["encodings"], config["j_values"], config["hb"],
                           config["n_samples"], config["seed"], map_fn=map_fn,
                           model=config["field_model"])
    return PRECESSION_COLUMNS, [r.row() for r in res]


def run_hubbard(config, map_fn):
    from .design import reference_layout
    from .hubbard import HUBBARD_COLUMNS, tuning_report

    rep = tuning_report(reference_layout(config["row"]), config["u_over_j"], config["free_edge"])
    return HUBBARD_COLUMNS, [(h.u_over_j, h.naive_t, h.tuned_t, h.residual_splitting, h.gap_ratio)
                             for h in rep]


RUNNERS = {
    "table1": run_table1,
    "solve": run_solve,
    "gap": run_gap,
    "correct": run_correct,
    "min-attach": run_min_attach,
    "axes": run_axes,
    "sweep-gate": run_sweep_gate,
    "cphase": run_cphase,
    "precession": run_precession,
    "hubbard": run_hubbard,
}


def run(argv=None):
    """Execute one subcommand; returns the process exit code."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config, fmt = resolve_config(args.command, args)
        map_fn, pool = _mapper()
    except ConfigError as exc:
        sys.stderr.write(f"error kind=config message={json.dumps(str(exc))}\n")
        return 2
    try:
        columns, rows = RUNNERS[args.command](config, map_fn)
    except SupercoherentError as exc:
        sys.stderr.write(f"error kind={exc.kind} message={json.dumps(str(exc))}\n")
        return 3
    except (ConfigError, ValueError, KeyError, IndexError) as exc:
        # parameter values the library rejects before any numerics run
        sys.stderr.write(f"error kind=config message={json.dumps(str(exc))}\n")
        return 2
    finally:
        if pool is not None:
            pool.shutdown()
    text = render(args.command, config, columns, rows, fmt)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main():
    raise SystemExit(run())


if __name__ == "__main__":
    main()
