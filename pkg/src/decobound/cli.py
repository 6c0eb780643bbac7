"""``decobound`` command line.

Exit codes: 0 success, 2 I/O error, 3 configuration error, 4 failed
certification, 5 numerical non-convergence.

CSV output follows RFC 4180 (CRLF line ends, minimal quoting) with a fixed
header.  A command that produces several tables writes the first to
``--out`` and each further table ``name`` to ``<stem>.<name>.csv`` next to
it.  Without ``--out``, the first table goes to stdout and the rest to
stderr.  JSON output holds all tables in one document that validates against
``data/output.schema.json``.  Undefined numbers are written as ``NA``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bellsim, certify, nosignalling, optomech, quantum
from .bound import dec_bound_quantum
from .config import ENV_VAR, ConfigError, load_config
from .entropy import dec_quantum
from .errors import ConvergenceError, LpError

SCHEMA_VERSION = "1"
NA = "NA"

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_CERTIFY, EXIT_CONVERGENCE = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


# -- formatting -------------------------------------------------------------


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return NA if not math.isfinite(v) else repr(v)
    return str(v)


def _json_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else NA
    return str(v)


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def to_json(command: str, tables: dict, meta: dict) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "meta": {k: _json_cell(v) for k, v in meta.items()},
        "tables": {
            name: {"columns": list(cols), "rows": [[_json_cell(v) for v in r] for r in rows]}
            for name, (cols, rows) in tables.items()
        },
    }
    return json.dumps(doc, indent=1) + "\n"


def emit(command: str, tables: dict, meta: dict, out: str | None, fmt: str):
    if fmt == "json":
        text = to_json(command, tables, meta)
        if out is None:
            sys.stdout.write(text)
        else:
            Path(out).write_text(text)
        return
    items = list(tables.items())
    main_name, (cols, rows) = items[0]
    if out is None:
        sys.stdout.write(to_csv(cols, rows))
        for name, (c, r) in items[1:]:
            sys.stderr.write(f"# table: {name}\n")
            sys.stderr.write(to_csv(c, r))
        return
    path = Path(out)
    path.write_text(to_csv(cols, rows), newline="")
    for name, (c, r) in items[1:]:
        path.with_name(f"{path.stem}.{name}.csv").write_text(to_csv(c, r), newline="")


# -- subcommands ------------------------------------------------------------


def _grid(args, default: int) -> int:
    n = args.grid if args.grid is not None else default
    if n < 2:
        raise UsageError(f"--grid must be at least 2, got {n}")
    return n


def cmd_region(args, cfg):
    n = _grid(args, cfg["grids"]["region"])
    rows = []
    for beta in np.linspace(2.0, 4.0, n):
        lam = nosignalling.lambda_from_beta(beta)
        q = dec_bound_quantum(beta) if beta <= quantum.TSIRELSON + 1e-12 else math.nan
        delta = nosignalling.delta_of_lambda(lam)
        rows.append((beta, lam, q, delta, nosignalling.gpt_dec_bound(lam)))
    cols = ("beta", "lambda", "dec_bound_quantum", "delta", "gpt_dec_bound")
    return {"region": (cols, rows)}, {"grid": n}


CHANNELS = ("depolarizing-standard", "dephasing-standard", "dephasing-optimal")


def channel_rows(n: int):
    phi = quantum.canonical_entangled_state()
    rows = []
    for s in np.linspace(0.0, 1.0, n):
        dep = quantum.depolarizing(phi, s)
        # s = 1 is full dephasing
        deph = quantum.dephasing(phi, 1.0 - s / 2.0, "z")
        for name, state, beta in (
            ("depolarizing-standard", dep, quantum.chsh_value(dep)),
            ("dephasing-standard", deph, quantum.chsh_value(deph)),
            ("dephasing-optimal", deph, quantum.beta_max(deph)),
        ):
            dec = dec_quantum(quantum.twirl(state).p)
            rows.append((name, s, beta, dec, dec_bound_quantum(min(beta, quantum.TSIRELSON))))
    rows.sort(key=lambda r: CHANNELS.index(r[0]))  # stable: noise stays ascending
    return rows


def cmd_channels(args, cfg):
    n = _grid(args, cfg["grids"]["channels"])
    cols = ("channel", "noise", "beta", "dec", "dec_bound_quantum")
    return {"channels": (cols, channel_rows(n))}, {"grid": n}


def cmd_optomech(args, cfg):
    n = _grid(args, cfg["optomech"]["grid"])
    curves, summary = [], []
    for mat, temp, params in cfg.optomech_cases():
        times = np.linspace(0.0, params.period, n)
        curve = optomech.decoherence_curve(params, times)
        curves.extend((mat, temp) + r for r in curve.rows())
        best = optomech.optimal_time(params, grid=max(n, 4096))
        summary.append((
            mat, temp,
            optomech.nbar(params, include_gravity=False),
            optomech.nbar(params) - optomech.nbar(params, include_gravity=False),
            best.t_max, best.gap, best.beta_fals, best.beta_mech, best.falsifiable,
        ))
    cols = ("material", "temperature") + optomech.CURVE_COLUMNS
    scols = ("material", "temperature", "nbar_heat", "nbar_grav", "t_max", "gap",
             "beta_fals", "beta_mech", "falsifiable")
    return {"curves": (cols, curves), "summary": (scols, summary)}, {"grid": n}


def cmd_simulate(args, cfg):
    sim = cfg["simulate"]
    seed = args.seed if args.seed is not None else cfg["seeds"]["simulate"]
    rho = (quantum.canonical_entangled_state() if sim["state"] == "canonical"
           else quantum.werner_state(sim["visibility"]))
    m = quantum.ChshMeasurementSet.standard()
    exact = quantum.chsh_value(rho, m)
    est_rows, count_rows = [], []
    for i, ss in enumerate(np.random.SeedSequence(seed).spawn(sim["runs"])):
        est, rec = bellsim.simulate(rho, m, sim["rounds"], ss, return_records=True)
        est_rows.append((
            i, est.n_rounds, est.beta_hat, est.confidence, est.confidence_radius, est.lower,
            exact, est.covers(exact), est.dec_bound(), est.dec_bound_point(),
        ))
        counts = rec.counts()
        for x, y, a, b in np.ndindex(2, 2, 2, 2):
            count_rows.append((i, x, y, a, b, int(counts[x, y, a, b])))
    cols = ("run", "n_rounds", "beta_hat", "confidence", "radius", "beta_lower",
            "beta_exact", "covers_exact", "dec_bound", "dec_bound_point")
    meta = {"seed": seed, "state": sim["state"], "visibility": sim["visibility"]}
    return {"estimates": (cols, est_rows), "counts": (("run", "x", "y", "a", "b", "count"), count_rows)}, meta


def cmd_certify(args, cfg):
    checks = certify.run_all(cfg)
    failed = [c for c in checks if not c.passed]
    args.failures = [dict(zip(certify.COLUMNS, c.row())) for c in failed]
    meta = {"checks": len(checks), "failed": len(failed)}
    return {"checks": (certify.COLUMNS, [c.row() for c in checks])}, meta


COMMANDS = {
    "region": (cmd_region, "quantum and no-signalling Dec bounds over beta in [2, 4]"),
    "channels": (cmd_channels, "(beta, Dec) along depolarizing and dephasing noise"),
    "optomech": (cmd_optomech, "optomechanical Dec / beta curves and optimal measurement time"),
    "simulate": (cmd_simulate, "finite-round CHSH estimate with confidence radius"),
    "certify": (cmd_certify, "run the certificate and oracle battery; exit 4 on failure"),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="decobound", description="Device-independent bounds on decoherence.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        s = sub.add_parser(name, help=help_)
        s.add_argument("--config", help=f"INI file (default: ${ENV_VAR}, else shipped defaults)")
        s.add_argument("--out", help="output file (default: stdout)")
        s.add_argument("--format", choices=("csv", "json"), default="csv")
        s.add_argument("--grid", type=int, help="number of grid points (region, channels, optomech)")
        s.add_argument("--seed", type=int, help="seed for simulate (overrides the config)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    func, _ = COMMANDS[args.command]
    try:
        cfg = load_config(args.config)
        tables, meta = func(args, cfg)
        emit(args.command, tables, meta, args.out, args.format)
    except ConfigError as exc:
        print(f"decobound: config error at {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UsageError as exc:
        print(f"decobound: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"decobound: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConvergenceError, LpError) as exc:
        print(f"decobound: numerical failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    if getattr(args, "failures", None):
        print(json.dumps({"failed": args.failures}), file=sys.stderr)
        return EXIT_CERTIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
