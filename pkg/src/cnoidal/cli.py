"""Command line front end.

    cnoidal constants  [--kind A,E] [--p 1..6] [--m 0.1:0.9:0.1]
    cnoidal figure1    [--beta 0] [--m 0:1:0.05]
    cnoidal verify     [--family kdv,miura] [--p 1..6] [--m ...] [--corrupt-velocity]
    cnoidal sample     --family kdv --p 3 --m 0.5 [--x -10:10:0.1] [--t 0,1]

Tables go to standard output (or --out) as CSV or JSON; logs go to standard
error.  Exit status: 0 all checks pass, 1 a verification failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .constants import Kind, closed_form, extract_constant, is_legal
from .errors import CnoidalError, DegenerateSamplingError, NonIdentityError, UsageError
from .solutions import WaveFamily, build, eval_solution, velocity
from .verify import (
    SWEEP_ALPHAS, SWEEP_BETAS, SWEEP_SIGNS, scan_case, sweep_cases,
)

log = logging.getLogger("cnoidal")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

COMMANDS = ("constants", "figure1", "verify", "sample")

_DEFAULT_M = {
    "constants": (0.1, 0.9, 0.1),
    "figure1": (0.0, 1.0, 0.05),
    "verify": (0.1, 0.9, 0.1),
    "sample": (0.5, 0.5, 1.0),
}
_DEFAULT_P = {"constants": (1, 2, 3, 4, 5, 6), "figure1": (1, 2, 3, 4), "sample": (1,)}
_DEFAULT_KINDS = tuple(k for k in Kind if k is not Kind.Q)


# -- config -------------------------------------------------------------------


def grid_values(grid):
    """Points of an inclusive (start, stop, step) grid, rounded to 12 decimals."""
    start, stop, step = grid
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(n)]


@dataclass
class RunConfig:
    command: str
    p_list: tuple | None = None  # None: the command's default
    m_grid: tuple = (0.1, 0.9, 0.1)
    alpha: tuple = (1.0,)
    beta: tuple = (0.0,)
    sign: tuple = (1,)
    samples: int = 32
    tol: float = 1e-8
    output_format: str = "csv"
    output_path: str | None = None
    families: tuple = tuple(WaveFamily)
    kinds: tuple = _DEFAULT_KINDS
    corrupt_velocity: bool = False
    x_grid: tuple = (-10.0, 10.0, 0.1)
    t_list: tuple = (0.0,)
    jobs: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        for name in ("m_grid", "x_grid"):
            start, stop, step = getattr(self, name)
            if not step > 0:
                raise UsageError(f"{name}: step must be positive")
            if stop < start:
                raise UsageError(f"{name}: empty grid ({start} > {stop})")
        if not self.tol > 0:
            raise UsageError("tol must be positive")
        if self.p_list is not None and not self.p_list:
            raise UsageError("empty p list")
        for name in ("alpha", "beta", "sign", "families", "kinds", "t_list"):
            if not getattr(self, name):
                raise UsageError(f"empty {name} list")
        if any(s not in (1, -1) for s in self.sign):
            raise UsageError("sign must be +1 or -1")
        if self.output_format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.output_format!r}")
        if self.samples < 3:
            raise UsageError("samples must be at least 3")
        if self.jobs < 1:
            raise UsageError("jobs must be at least 1")

    @property
    def ms(self):
        return grid_values(self.m_grid)

    @property
    def ps(self):
        return self.p_list if self.p_list is not None else _DEFAULT_P.get(self.command)


# -- tables -------------------------------------------------------------------


@dataclass
class Table:
    columns: list
    rows: list = field(default_factory=list)  # dicts keyed by column

    def add(self, **row):
        self.rows.append({c: row.get(c) for c in self.columns})

    def __eq__(self, other):
        return (
            isinstance(other, Table)
            and list(self.columns) == list(other.columns)
            and self.rows == other.rows
        )


def format_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        s = "%.17g" % float(v)
        # keep floats recognisable as floats when read back
        if not any(ch in s for ch in ".eninf"):
            s += ".0"
        return s
    return str(v)


def parse_cell(s):
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def to_csv(table):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([format_cell(row[c]) for c in table.columns])
    return buf.getvalue()


def read_csv(text):
    """Inverse of ``to_csv``."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise UsageError("empty CSV")
    table = Table(rows[0])
    for r in rows[1:]:
        table.rows.append({c: parse_cell(v) for c, v in zip(table.columns, r)})
    return table


def _json_cell(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def to_json(table):
    return json.dumps(
        [{c: _json_cell(row[c]) for c in table.columns} for row in table.rows], indent=1
    ) + "\n"


def emit(table, fmt="csv", path=None):
    text = to_csv(table) if fmt == "csv" else to_json(table)
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


# -- commands -----------------------------------------------------------------


def cmd_constants(cfg):
    """Constants table; status 1 if any constancy deviation exceeds cfg.tol."""
    table = Table(["kind", "p", "m", "value", "constancy_dev", "closed_form", "abs_diff"])
    status = EXIT_OK
    for kind in cfg.kinds:
        kind = Kind(kind)
        ps = (None,) if kind is Kind.Q else cfg.ps
        for p in ps:
            legal = p is None or is_legal(kind, p)
            if not legal:
                log.warning("constant %s is not defined for p=%d; skipped", kind.value, p)
            for m in cfg.ms:
                if not legal:
                    table.add(kind=kind.value, p=p, m=m)
                    continue
                exact = closed_form(kind, p or 1, m)
                try:
                    c = extract_constant(kind, p or 1, m, samples=cfg.samples, tol=cfg.tol)
                except NonIdentityError as e:
                    log.error("%s", e)
                    c = e.constant
                    status = EXIT_FAIL
                except DegenerateSamplingError as e:
                    log.error("%s", e)
                    status = EXIT_FAIL
                    table.add(kind=kind.value, p=p, m=m, closed_form=exact)
                    continue
                except CnoidalError as e:
                    # m = 1 with p > 1: no lattice, only the closed form
                    log.warning("%s(p=%s, m=%g): %s", kind.value, p, m, e)
                    table.add(kind=kind.value, p=p, m=m, closed_form=exact)
                    continue
                diff = None if exact is None else abs(c.value - exact)
                table.add(
                    kind=kind.value, p=p, m=m, value=c.value,
                    constancy_dev=c.constancy_dev, closed_form=exact, abs_diff=diff,
                )
    return table, status


def cmd_figure1(cfg):
    """KdV velocities b_p against m at one beta (the velocity-curve figure)."""
    ps = list(cfg.ps)
    table = Table(["m"] + [f"b_{p}" for p in ps])
    beta = cfg.beta[0]
    if len(cfg.beta) > 1:
        log.warning("figure1 uses one beta; taking %g", beta)
    for m in cfg.ms:
        row = {"m": m}
        for p in ps:
            row[f"b_{p}"] = velocity(WaveFamily.KDV_DN2_SUM, p, m, beta, cfg.samples)
        table.add(**row)
    return table, EXIT_OK


_VERIFY_COLUMNS = [
    "family", "p", "m", "alpha", "beta", "sign", "velocity",
    "max_abs", "max_rel", "argmax_xi", "dps", "status", "error",
]


def _verify_row(args):
    case, corrupt, tol = args
    family, p, m, alpha, beta, sign = case
    row = dict(family=family.value, p=p, m=m, alpha=alpha, beta=beta, sign=sign)
    try:
        r = scan_case(*case, corrupt_velocity=corrupt, tol=tol)
    except CnoidalError as e:
        row.update(status="error", error=str(e))
        return row
    row.update(
        velocity=r.velocity, max_abs=r.max_abs, max_rel=r.max_rel,
        argmax_xi=r.argmax_xi, dps=r.dps, status="pass" if r.passed(tol) else "fail",
    )
    return row


def verify_cases(cfg):
    return list(sweep_cases(
        families=cfg.families, p_max=6, ms=cfg.ms, alphas=cfg.alpha,
        betas=cfg.beta, signs=cfg.sign, ps=cfg.p_list,
    ))


def cmd_verify(cfg):
    """Residual certification rows; status 1 unless every row passes."""
    jobs = [(case, cfg.corrupt_velocity, cfg.tol) for case in verify_cases(cfg)]
    if cfg.jobs > 1:
        # map keeps input order, so output does not depend on scheduling
        with ProcessPoolExecutor(cfg.jobs) as pool:
            rows = list(pool.map(_verify_row, jobs, chunksize=16))
    else:
        rows = [_verify_row(j) for j in jobs]
    table = Table(_VERIFY_COLUMNS)
    status = EXIT_OK
    for row in rows:
        table.add(**row)
        if row["status"] != "pass":
            status = EXIT_FAIL
            if row["status"] == "error":
                log.error("%s p=%s: %s", row["family"], row["p"], row["error"])
    n_bad = sum(r["status"] != "pass" for r in rows)
    log.info("%d of %d rows pass", len(rows) - n_bad, len(rows))
    return table, status


def cmd_sample(cfg):
    """(x, t, u) rows of one solution on the x grid at each t."""
    if len(cfg.families) != 1 or len(cfg.ps) != 1 or len(cfg.ms) != 1:
        raise UsageError("sample needs exactly one family, one p and one m")
    if len(cfg.alpha) != 1 or len(cfg.beta) != 1 or len(cfg.sign) != 1:
        raise UsageError("sample needs exactly one alpha, beta and sign")
    w = build(
        cfg.families[0], cfg.ps[0], alpha=cfg.alpha[0], beta=cfg.beta[0],
        sign=cfg.sign[0], m=cfg.ms[0], samples=cfg.samples,
    )
    x = np.array(grid_values(cfg.x_grid))
    table = Table(["x", "t", "u"])
    for t in cfg.t_list:
        u = np.asarray(eval_solution(w, x, t), dtype=float)
        for xi, ui in zip(x, u):
            table.add(x=float(xi), t=float(t), u=float(ui))
    return table, EXIT_OK


_COMMANDS = {
    "constants": cmd_constants,
    "figure1": cmd_figure1,
    "verify": cmd_verify,
    "sample": cmd_sample,
}


def run(cfg):
    """Run a command; returns (table, exit status)."""
    return _COMMANDS[cfg.command](cfg)


# -- argument parsing ---------------------------------------------------------


def parse_p(text):
    """'3', '1,3,5' or '1..6'."""
    out = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    except ValueError:
        raise UsageError(f"bad p list {text!r}") from None
    if not out or any(p < 1 for p in out):
        raise UsageError(f"bad p list {text!r}")
    return tuple(out)


def parse_grid(text):
    """'0.5' or 'start:stop:step'."""
    try:
        parts = [float(v) for v in text.split(":")]
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None
    if len(parts) == 1:
        return (parts[0], parts[0], 1.0)
    if len(parts) != 3:
        raise UsageError(f"grid must be 'value' or 'start:stop:step', got {text!r}")
    return tuple(parts)


def parse_floats(text):
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"bad number list {text!r}") from None
    return vals


def parse_signs(text):
    vals = []
    for v in text.split(","):
        v = v.strip()
        if v in ("+", "+1", "1"):
            vals.append(1)
        elif v in ("-", "-1"):
            vals.append(-1)
        else:
            raise UsageError(f"bad sign {v!r}")
    return tuple(vals)


def parse_families(text):
    if text == "all":
        return tuple(WaveFamily)
    try:
        return tuple(WaveFamily(v.strip()) for v in text.split(","))
    except ValueError:
        names = ", ".join(f.value for f in WaveFamily)
        raise UsageError(f"unknown family in {text!r} (choose from {names})") from None


def parse_kinds(text):
    if text == "all":
        return _DEFAULT_KINDS
    try:
        return tuple(Kind(v.strip()) for v in text.split(","))
    except ValueError:
        raise UsageError(f"unknown kind in {text!r}") from None


def build_parser():
    ap = argparse.ArgumentParser(prog="cnoidal", description=__doc__.split("\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--p", help="p values: '3', '1,3,5' or '1..6'")
        sp.add_argument("--m", help="m value or start:stop:step")
        sp.add_argument("--samples", type=int, default=32)
        sp.add_argument("--tol", type=float, default=1e-8)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--out", help="output file (default standard output)")

    sp = sub.add_parser("constants", help="identity constants table")
    common(sp)
    sp.add_argument("--kind", default="all", help="kinds, e.g. 'A,E' (default all but Q)")

    sp = sub.add_parser("figure1", help="KdV velocity b_p against m")
    common(sp)
    sp.add_argument("--beta", default="0")

    sp = sub.add_parser("verify", help="PDE residual certification sweep")
    common(sp)
    sp.add_argument("--family", default="all")
    sp.add_argument("--alpha", default=",".join(map(str, SWEEP_ALPHAS)))
    sp.add_argument("--beta", default=",".join(map(str, SWEEP_BETAS)))
    sp.add_argument("--sign", default=",".join(f"{s:+d}" for s in SWEEP_SIGNS))
    sp.add_argument("--corrupt-velocity", action="store_true",
                    help="negative control: add 1 to every velocity")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")

    sp = sub.add_parser("sample", help="u(x, t) of one solution")
    common(sp)
    sp.add_argument("--family", default="kdv")
    sp.add_argument("--alpha", default="1")
    sp.add_argument("--beta", default="0")
    sp.add_argument("--sign", default="+1")
    sp.add_argument("--x", default="-10:10:0.1",
                    help="x grid start:stop:step (write --x=-5:5:0.1 for a negative start)")
    sp.add_argument("--t", default="0", help="comma list of times")
    return ap


def config_from_args(args):
    kw = dict(
        command=args.command,
        p_list=parse_p(args.p) if args.p else None,
        m_grid=parse_grid(args.m) if args.m else _DEFAULT_M[args.command],
        samples=args.samples,
        tol=args.tol,
        output_format=args.format,
        output_path=args.out,
    )
    if args.command == "constants":
        kw["kinds"] = parse_kinds(args.kind)
    if hasattr(args, "beta"):
        kw["beta"] = parse_floats(args.beta)
    if hasattr(args, "family"):
        kw["families"] = parse_families(args.family)
        kw["alpha"] = parse_floats(args.alpha)
        kw["sign"] = parse_signs(args.sign)
    if args.command == "verify":
        kw["corrupt_velocity"] = args.corrupt_velocity
        kw["jobs"] = args.jobs
    if args.command == "sample":
        kw["x_grid"] = parse_grid(args.x)
        kw["t_list"] = parse_floats(args.t)
    return RunConfig(**kw)


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = config_from_args(args)
        table, status = run(cfg)
    except CnoidalError as e:
        log.error("%s", e)
        return EXIT_USAGE
    emit(table, cfg.output_format, cfg.output_path)
    return status


if __name__ == "__main__":
    sys.exit(main())
