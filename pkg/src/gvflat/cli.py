"""Command-line drivers: config parsing, experiments, CSV/JSON emission.

Every subcommand reads a single JSON config, runs its experiment, and
writes one or more CSV files (with a JSON mirror of each) into the
output directory.  Exit codes are a stable contract: 0 on success, 1
when a mathematical check fails, 2 on config errors (reported with the
offending field path or parse location).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import bps as bps_mod
from . import genus0 as genus0_mod
from . import potentials as pot_mod
from .flatsec import vanishing_experiment
from .kernelquad import eps_grid
from .lattice import Geometry, curve_volume


class ConfigError(Exception):
    def __init__(self, path: str, message: str):
        super().__init__(f"config error at {path}: {message}")
        self.path = path


def _need(obj, key, typ, path, default=None, required=False):
    if key not in obj:
        if required:
            raise ConfigError(f"{path}.{key}", "missing required field")
        return default
    val = obj[key]
    if typ is float and isinstance(val, int) and not isinstance(val, bool):
        val = float(val)
    if not isinstance(val, typ) or isinstance(val, bool):
        raise ConfigError(f"{path}.{key}",
                          f"expected {typ.__name__}, got {type(val).__name__}")
    return val


def _complex_field(obj, path):
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected an object with re/im")
    re = _need(obj, "re", float, path, required=True)
    im = _need(obj, "im", float, path, default=0.0)
    return complex(re, im)


@dataclass
class RunConfig:
    gv: "bps_mod.GvTable"
    geometry: Geometry
    degree: int
    v_beta: complex
    quad_tol: float
    rel_tol: float
    abs_tol: float
    eps_list: list
    q_window: int
    g_max: int
    n_q: int
    j_max: int
    cutoff: int
    output: Path
    experiment: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict):
            raise ConfigError("$", "top level must be an object")
        entries = {}
        gv_raw = raw.get("gv", [])
        if not isinstance(gv_raw, list):
            raise ConfigError("gv", "expected a list of {g, d, n} rows")
        for i, row in enumerate(gv_raw):
            if not isinstance(row, dict):
                raise ConfigError(f"gv[{i}]", "expected an object")
            g = _need(row, "g", int, f"gv[{i}]", required=True)
            d = _need(row, "d", int, f"gv[{i}]", required=True)
            n = _need(row, "n", int, f"gv[{i}]", required=True)
            if g < 0:
                raise ConfigError(f"gv[{i}].g", "genus must be >= 0")
            if d < 1:
                raise ConfigError(f"gv[{i}].d", "degree must be >= 1")
            entries[(g, d)] = n
        try:
            gv = bps_mod.GvTable(entries)
        except (ValueError, TypeError) as exc:
            raise ConfigError("gv", str(exc)) from exc

        geo_raw = raw.get("geometry", {})
        if not isinstance(geo_raw, dict):
            raise ConfigError("geometry", "expected an object")
        b_list = geo_raw.get("B", [0.3])
        om_list = geo_raw.get("omega", [1.0])
        if not isinstance(b_list, list) or not b_list:
            raise ConfigError("geometry.B", "expected a nonempty list")
        if not isinstance(om_list, list) or not om_list:
            raise ConfigError("geometry.omega", "expected a nonempty list")
        if len(b_list) != len(om_list):
            raise ConfigError("geometry.omega",
                              "length must match geometry.B")
        bb, oo = [], []
        for i, x in enumerate(b_list):
            if not isinstance(x, (int, float)) or isinstance(x, bool):
                raise ConfigError(f"geometry.B[{i}]", "expected a number")
            bb.append(float(x))
        for i, x in enumerate(om_list):
            if not isinstance(x, (int, float)) or isinstance(x, bool):
                raise ConfigError(f"geometry.omega[{i}]", "expected a number")
            if float(x) <= 0:
                raise ConfigError(f"geometry.omega[{i}]", "must be positive")
            oo.append(float(x))
        g_val = _complex_field(geo_raw.get("G", {"re": 1.0, "im": 1.0}),
                               "geometry.G")
        if g_val.real <= 0:
            raise ConfigError("geometry.G.re", "Re G must be positive")
        geom = Geometry(B=tuple(bb), omega=tuple(oo), G=g_val)

        degree = _need(raw, "degree", int, "$", default=1)
        if degree < 1:
            raise ConfigError("degree", "must be >= 1")
        lvec = tuple([degree] + [0] * (len(bb) - 1))
        v_beta = curve_volume(geom, lvec)

        tols = raw.get("tolerances", {})
        if not isinstance(tols, dict):
            raise ConfigError("tolerances", "expected an object")
        quad_tol = _need(tols, "quad", float, "tolerances", default=1e-10)
        rel_tol = _need(tols, "rel", float, "tolerances", default=1e-4)
        abs_tol = _need(tols, "abs", float, "tolerances", default=1e-6)
        for name, val in (("quad", quad_tol), ("rel", rel_tol),
                          ("abs", abs_tol)):
            if val <= 0:
                raise ConfigError(f"tolerances.{name}", "must be positive")

        eg = raw.get("eps_grid", {})
        if not isinstance(eg, dict):
            raise ConfigError("eps_grid", "expected an object")
        start = _need(eg, "start", float, "eps_grid", default=0.2)
        factor = _need(eg, "factor", float, "eps_grid", default=2.0)
        count = _need(eg, "count", int, "eps_grid", default=9)
        if start <= 0:
            raise ConfigError("eps_grid.start", "must be positive")
        if factor <= 1:
            raise ConfigError("eps_grid.factor", "must exceed 1")
        if count < 2:
            raise ConfigError("eps_grid.count", "need at least 2 points")
        eps_list = eps_grid(start, factor, count)

        orders = raw.get("orders", {})
        if not isinstance(orders, dict):
            raise ConfigError("orders", "expected an object")
        g_max = _need(orders, "g_max", int, "orders", default=6)
        n_q = _need(orders, "n_q", int, "orders", default=8)
        j_max = _need(orders, "j_max", int, "orders", default=4)
        cutoff = _need(orders, "cutoff", int, "orders", default=4)
        for name, val in (("g_max", g_max), ("n_q", n_q),
                          ("j_max", j_max), ("cutoff", cutoff)):
            if val < 1:
                raise ConfigError(f"orders.{name}", "must be >= 1")

        q_window = _need(raw, "q_window", int, "$", default=10)
        if q_window < 1:
            raise ConfigError("q_window", "must be >= 1")
        win_lo = -q_window
        gmax_in_table = max((g for g, _ in entries), default=0)
        needed = max(cutoff * max(gmax_in_table - 1, 1), 1)
        if q_window < needed:
            raise ConfigError(
                "q_window",
                f"window {q_window} cannot hold kernels up to genus "
                f"{gmax_in_table} at cutoff {cutoff} (need >= {needed})")

        exp = raw.get("experiment", {})
        if not isinstance(exp, dict):
            raise ConfigError("experiment", "expected an object")

        output = _need(raw, "output", str, "$", default=".")
        return cls(gv=gv, geometry=geom, degree=degree, v_beta=v_beta,
                   quad_tol=quad_tol, rel_tol=rel_tol, abs_tol=abs_tol,
                   eps_list=eps_list, q_window=q_window, g_max=g_max,
                   n_q=n_q, j_max=j_max, cutoff=cutoff,
                   output=Path(output), experiment=exp)


def load_config(path: str) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("$", f"cannot read {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            "$", f"invalid JSON at line {exc.lineno} column {exc.colno}: "
                 f"{exc.msg}") from exc
    return RunConfig.from_dict(raw)


def _fmt(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_rows(out_dir: Path, name: str, header, rows):
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{name}.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])
    json_path = out_dir / f"{name}.json"
    payload = [dict(zip(header, [_fmt(x) for x in row])) for row in rows]
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path


def cmd_bps(cfg: RunConfig) -> int:
    """Connected and disconnected stable-pairs tables per degree."""
    window = (-cfg.q_window, cfg.q_window)
    table = bps_mod.pairs_table(cfg.gv, cfg.cutoff, window)
    rows = []
    for d, n, conn, disc in table.rows():
        rows.append((d, n, conn, disc))
    rows.sort(key=lambda r: (r[0], r[1]))
    _write_rows(cfg.output, "bps", ("d", "n", "p_connected", "p_disconnected"),
                rows)
    return 0


def cmd_theorem1(cfg: RunConfig) -> int:
    """Exact coefficient comparison of the two genus-0 series."""
    n0 = cfg.gv.get(0, 1)
    report = genus0_mod.theorem1_check(n0, cfg.g_max, cfg.n_q)
    rows = [(g, a, m, "PASS" if ok else "FAIL")
            for (g, a, m, ok) in report.details]
    _write_rows(cfg.output, "theorem1",
                ("g", "lam_power", "q_power", "status"), rows)
    return 0 if report.ok else 1


def _theorem2_cell(cfg, g, j):
    return pot_mod.theorem2_check(g, cfg.degree, cfg.gv, cfg.v_beta, j,
                                  cfg.eps_list, tol=cfg.quad_tol,
                                  rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol)


def cmd_asymptotics(cfg: RunConfig, threads: int = 1) -> int:
    """Extrapolated L^j limits vs symbolic targets, plus raw samples."""
    genera = sorted({g for (g, _), n in cfg.gv.items() if n and g >= 2})
    cells = [(g, j) for g in genera for j in range(1, cfg.j_max + 1)]
    if threads > 1 and cells:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            reports = list(ex.map(lambda c: _theorem2_cell(cfg, *c), cells))
    else:
        reports = [_theorem2_cell(cfg, g, j) for (g, j) in cells]
    rows = []
    sample_rows = []
    ok = True
    for rep in reports:
        rows.append((rep.g, rep.j, rep.limit.real, rep.limit.imag,
                     rep.target.real, rep.target.imag, rep.error,
                     rep.rel_err, "PASS" if rep.ok else "FAIL"))
        ok = ok and rep.ok
        for (e, val, qerr) in rep.samples:
            sample_rows.append((rep.g, rep.j, e, val.real, val.imag, qerr))
    has_genus1 = any(g == 1 and n for (g, _), n in cfg.gv.items())
    if has_genus1:
        limit, expected = pot_mod.genus1_extract(cfg.degree, cfg.gv,
                                                 cfg.v_beta, cfg.eps_list)
        err = abs(complex(limit) - float(expected))
        g1_ok = err <= max(cfg.abs_tol, 1e-5)
        rows.append((1, 0, complex(limit).real, complex(limit).imag,
                     float(expected), 0.0, err, err,
                     "PASS" if g1_ok else "FAIL"))
        ok = ok and g1_ok
    _write_rows(cfg.output, "asymptotics",
                ("g", "j", "limit_re", "limit_im", "target_re", "target_im",
                 "fit_error", "rel_err", "status"), rows)
    _write_rows(cfg.output, "asymptotics_samples",
                ("g", "j", "eps", "value_re", "value_im", "quad_error"),
                sample_rows)
    return 0 if ok else 1


def cmd_reconstruct(cfg: RunConfig) -> int:
    """Recovered D_{g,j} vs ground truth."""
    genera = [g for (g, _), n in cfg.gv.items() if n and g >= 2]
    if not genera:
        _write_rows(cfg.output, "reconstruct",
                    ("j", "recovered_re", "recovered_im", "truth_re",
                     "truth_im", "error_bar", "rel_err", "status"), [])
        return 0
    g = max(genera)
    synthetic = bool(cfg.experiment.get("synthetic", False))
    samples_by_j = None
    if synthetic:
        samples_by_j = pot_mod.synthetic_asymptotic_samples(
            g, cfg.degree, cfg.gv, cfg.v_beta, cfg.j_max, cfg.eps_list)
    status = 0
    try:
        res = pot_mod.reconstruct_taylor(g, cfg.degree, cfg.gv, cfg.v_beta,
                                         cfg.j_max, cfg.eps_list,
                                         tol=cfg.quad_tol,
                                         samples_by_j=samples_by_j)
    except pot_mod.ReconstructionError as exc:
        res = exc.partial
        status = 1
    rows = []
    for j, (rec, bar, truth) in enumerate(zip(res.recovered, res.error_bars,
                                              res.truth)):
        scale = max(abs(truth), 1.0)
        rel = abs(rec - truth) / scale
        row_ok = rel <= cfg.rel_tol * 10 if not synthetic else rel <= 1e-8
        rows.append((j, rec.real, rec.imag, complex(truth).real,
                     complex(truth).imag, bar, rel,
                     "PASS" if row_ok else "FAIL"))
        if not row_ok:
            status = 1
    if res.aborted_at is not None:
        rows.append((res.aborted_at, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, "ABORTED"))
    _write_rows(cfg.output, "reconstruct",
                ("j", "recovered_re", "recovered_im", "truth_re", "truth_im",
                 "error_bar", "rel_err", "status"), rows)
    return status


def cmd_vanishing(cfg: RunConfig) -> int:
    """Large-framing decay slopes for one- and two-vertex terms."""
    import numpy as np
    exp = cfg.experiment
    lam_min = float(exp.get("lambda_min", 1.0))
    lam_max = float(exp.get("lambda_max", 1000.0))
    lam_count = int(exp.get("lambda_count", 6))
    if lam_min <= 0 or lam_max <= lam_min or lam_count < 2:
        raise ConfigError("experiment.lambda_min",
                          "need 0 < lambda_min < lambda_max and count >= 2")
    grid = np.geomspace(lam_min, lam_max, lam_count)
    t = float(exp.get("t", 0.3))
    plans = [(1, tuple(exp.get("r_list_m1", [1]))),
             (2, tuple(exp.get("r_list_m2", [1, 1])))]
    rows = []
    ok = True
    for m, r_list in plans:
        fit = vanishing_experiment(m, r_list, cfg.geometry.G, grid, t=t)
        bound = -m / 2 + 0.1
        row_ok = fit.slope <= bound
        ok = ok and row_ok
        rows.append((m, ",".join(str(r) for r in r_list), fit.slope, bound,
                     "PASS" if row_ok else "FAIL"))
    _write_rows(cfg.output, "vanishing",
                ("m", "ranks", "slope", "bound", "status"), rows)
    return 0 if ok else 1


def cmd_genus0(cfg: RunConfig) -> int:
    """Regularized genus-0 values over the eps grid (data emission)."""
    rows = []
    for e in cfg.eps_list:
        val = pot_mod.genus0_regularized(cfg.degree, cfg.gv, cfg.v_beta, e,
                                         tol=cfg.quad_tol)
        rows.append((e, val.real, val.imag))
    _write_rows(cfg.output, "genus0", ("eps", "value_re", "value_im"), rows)
    return 0


_COMMANDS = {
    "bps": cmd_bps,
    "theorem1": cmd_theorem1,
    "asymptotics": cmd_asymptotics,
    "reconstruct": cmd_reconstruct,
    "vanishing": cmd_vanishing,
    "genus0": cmd_genus0,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gvflat",
        description="Curve-count asymptotics experiments and tables")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        sp = sub.add_parser(name, help=fn.__doc__)
        sp.add_argument("--config", required=True, help="JSON config path")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--tol", type=float, default=None,
                        help="override quadrature tolerance")
        sp.add_argument("--threads", type=int, default=1,
                        help="parallel cells for grid experiments")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.out is not None:
            cfg.output = Path(args.out)
        if args.tol is not None:
            if args.tol <= 0:
                raise ConfigError("--tol", "must be positive")
            cfg.quad_tol = args.tol
        if args.threads < 1:
            raise ConfigError("--threads", "must be >= 1")
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    fn = _COMMANDS[args.command]
    if args.command == "asymptotics":
        return fn(cfg, threads=args.threads)
    return fn(cfg)


if __name__ == "__main__":
    sys.exit(main())
