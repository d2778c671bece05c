"""Command-line surface: symbol / product / evolve / expect / verify.

Every run writes exactly one manifest (resolved config, input hashes,
wall time, outputs).  Config precedence: flags > --config JSON > defaults.
Exit codes: 0 ok, 2 parse error, 3 numerical refusal, 4 instability.
"""

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (AliasingError, GridResolutionError, HusimiKitError,
                     InstabilityError, OverlapUnderflowError,
                     QuadratureWindowError, ResolutionRefusal, SpecParseError,
                     TruncationError, UnderResolvedError, ValidationError)
from .dynamics import EvolutionConfig, evolve_husimi, evolve_oracle
from .expectation import (bound_probe, expectation_husimi_series,
                          expectation_wigner, trace_direct)
from .fock import PhasePoint
from .io import (ManifestWriter, grid_to_csv, operator_to_json,
                 parse_grid_spec, parse_operator_spec, parse_state_spec)
from .star_product import mizrahi_product
from .symbols import (GridSpec, anti_husimi_partial_sums, husimi_symbol,
                      husimi_symbol_grid, weyl_symbol)

_REFUSALS = (ResolutionRefusal, TruncationError, QuadratureWindowError,
             AliasingError, UnderResolvedError, OverlapUnderflowError,
             ValidationError, GridResolutionError)


def _merge_config(args, defaults):
    """flags > config file > defaults; returns the resolved dict."""
    file_cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecParseError(f"cannot read config {args.config}: {exc}")
        if not isinstance(file_cfg, dict):
            raise SpecParseError("config file must hold a JSON object")
    resolved = {}
    for key, default in defaults.items():
        cli_val = getattr(args, key, None)
        resolved[key] = cli_val if cli_val is not None else \
            file_cfg.get(key, default)
    return resolved


def _outdir(cfg):
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path, text, manifest):
    path.write_text(text, encoding="utf-8")
    manifest.add_output(path)


# ---------------------------------------------------------------------------

def cmd_symbol(args):
    cfg = _merge_config(args, {
        "op": None, "kind": "husimi", "dim": 64, "grid": "-8:8:256",
        "order": 10, "tol": 1e-8, "index_window": None, "length_scale": None,
        "out": "symbol-out",
    })
    if cfg["op"] is None:
        raise SpecParseError("symbol: --op is required")
    manifest = ManifestWriter(command=sys.argv[1:], config=cfg)
    manifest.add_input("op", cfg["op"])
    out = _outdir(cfg)
    A = parse_operator_spec(cfg["op"], cfg["dim"])
    spec = parse_grid_spec(cfg["grid"])
    if cfg["length_scale"]:
        # dimensionless convention: the grid arrives in physical units and
        # is pre-scaled x -> x/lambda, p -> lambda p; the smoothing kernel
        # itself is never rescaled.
        lam = float(cfg["length_scale"])
        spec = GridSpec(spec.x_min / lam, spec.x_max / lam, spec.nx,
                        spec.p_min * lam, spec.p_max * lam, spec.np_)

    if cfg["kind"] == "husimi":
        grid = husimi_symbol_grid(A, spec)
        _write(out / "grid.csv", grid_to_csv(grid), manifest)
    elif cfg["kind"] == "weyl":
        grid = weyl_symbol(A, spec, index_window=cfg["index_window"])
        _write(out / "grid.csv", grid_to_csv(grid), manifest)
    elif cfg["kind"] == "anti-husimi":
        lines = ["x,p,verdict,n_terms,last_term_magnitude,value_re,value_im"]
        for x in spec.x_coords():
            for p in spec.p_coords():
                res = anti_husimi_partial_sums(A, PhasePoint(float(x), float(p)),
                                               n_max=cfg["order"], tol=cfg["tol"])
                v = res.value
                lines.append(f"{float(x)!r},{float(p)!r},{res.verdict},"
                             f"{res.n_terms},{float(res.term_magnitudes[-1])!r},"
                             f"{v.real!r},{v.imag!r}")
        _write(out / "verdicts.csv", "\n".join(lines) + "\n", manifest)
    else:
        raise SpecParseError(f"unknown symbol kind {cfg['kind']!r}")
    manifest.write(out / "manifest.json")
    return 0


def cmd_product(args):
    cfg = _merge_config(args, {
        "a": None, "b": None, "dim": 32, "points": None, "tol": 1e-9,
        "order": None, "out": "product-out",
    })
    if cfg["a"] is None or cfg["b"] is None:
        raise SpecParseError("product: --a and --b are required")
    manifest = ManifestWriter(command=sys.argv[1:], config=cfg)
    manifest.add_input("a", cfg["a"])
    manifest.add_input("b", cfg["b"])
    A = parse_operator_spec(cfg["a"], cfg["dim"])
    B = parse_operator_spec(cfg["b"], cfg["dim"])
    if A.dim != B.dim:
        raise SpecParseError("product: operator dims differ")
    if cfg["points"]:
        text = Path(cfg["points"]).read_text(encoding="utf-8")
        manifest.add_input("points", text)
        pts = []
        for ln in text.strip().split("\n"):
            x, p = ln.split(",")
            pts.append(PhasePoint(float(x), float(p)))
    else:
        pts = [PhasePoint(0.0, 0.0)]
    out = _outdir(cfg)

    oracle_op = A @ B
    lines = ["x,p,value_re,value_im,terms,tail_bound,verdict,"
             "oracle_re,oracle_im,abs_err"]
    any_inconclusive = False
    for pt in pts:
        res = mizrahi_product(A, B, pt, tol=cfg["tol"], n_max=cfg["order"])
        oracle = husimi_symbol(oracle_op, pt)
        err = abs(res.value - oracle)
        any_inconclusive |= res.verdict != "converged"
        lines.append(f"{pt.x!r},{pt.p!r},{res.value.real!r},{res.value.imag!r},"
                     f"{res.n_terms},{res.tail_bound!r},{res.verdict},"
                     f"{oracle.real!r},{oracle.imag!r},{err!r}")
    _write(out / "report.csv", "\n".join(lines) + "\n", manifest)
    manifest.write(out / "manifest.json")
    if any_inconclusive:
        print("product: some points inconclusive", file=sys.stderr)
        return 3
    return 0


def cmd_evolve(args):
    cfg = _merge_config(args, {
        "hamiltonian": None, "rho": None, "dim": 64, "dt": 0.01, "steps": 100,
        "order": 3, "grid": "-13:13:256", "taper": None, "snapshot_every": 0,
        "oracle": False, "out": "evolve-out",
    })
    if cfg["hamiltonian"] is None or cfg["rho"] is None:
        raise SpecParseError("evolve: --hamiltonian and --rho are required")
    manifest = ManifestWriter(command=sys.argv[1:], config=cfg)
    manifest.add_input("hamiltonian", cfg["hamiltonian"])
    manifest.add_input("rho", cfg["rho"])
    out = _outdir(cfg)
    H = parse_operator_spec(cfg["hamiltonian"], cfg["dim"])
    rho0 = parse_state_spec(cfg["rho"], cfg["dim"])
    taper = None
    if cfg["taper"]:
        r0, r1 = (float(v) for v in str(cfg["taper"]).split(","))
        taper = (r0, r1)
    config = EvolutionConfig(dt=cfg["dt"], steps=cfg["steps"],
                             bracket_order=cfg["order"],
                             grid=parse_grid_spec(cfg["grid"]),
                             taper_radii=taper,
                             snapshot_every=cfg["snapshot_every"])
    try:
        result = evolve_husimi(H, rho0, config)
    except InstabilityError as exc:
        for i, (t, g) in enumerate(exc.snapshots):
            _write(out / f"snapshot-{i:04d}.csv", grid_to_csv(g), manifest)
        manifest.write(out / "manifest.json", status="failed", error=exc)
        print(f"evolve: {exc}", file=sys.stderr)
        return 4

    defect_log = ["step,time,mass_defect"]
    defect_log += [f"{i + 1},{(i + 1) * cfg['dt']!r},{d!r}"
                   for i, d in enumerate(result.mass_defects)]
    _write(out / "mass-defect.csv", "\n".join(defect_log) + "\n", manifest)

    snap_log = ["index,time,file,oracle_sup_err"]
    for i, (t, g) in enumerate(result.snapshots):
        fname = f"snapshot-{i:04d}.csv"
        _write(out / fname, grid_to_csv(g), manifest)
        sup = ""
        if cfg["oracle"]:
            ref = evolve_oracle(H, rho0, t, config.grid)
            sup = repr(float(np.abs(g.values - ref.values).max()))
        snap_log.append(f"{i},{t!r},{fname},{sup}")
    _write(out / "snapshots.csv", "\n".join(snap_log) + "\n", manifest)
    manifest.write(out / "manifest.json")
    return 0


def cmd_expect(args):
    cfg = _merge_config(args, {
        "op": None, "rho": None, "dim": 64, "methods": "trace,wigner,husimi-series",
        "n_max": 14, "tol": 1e-6, "grid": None, "probe": False,
        "out": "expect-out",
    })
    if cfg["op"] is None or cfg["rho"] is None:
        raise SpecParseError("expect: --op and --rho are required")
    manifest = ManifestWriter(command=sys.argv[1:], config=cfg)
    manifest.add_input("op", cfg["op"])
    manifest.add_input("rho", cfg["rho"])
    out = _outdir(cfg)
    A = parse_operator_spec(cfg["op"], cfg["dim"])
    rho = parse_state_spec(cfg["rho"], cfg["dim"])
    methods = [m.strip() for m in cfg["methods"].split(",") if m.strip()]
    spec = parse_grid_spec(cfg["grid"]) if cfg["grid"] else None

    rows = {}
    series = None
    for m in methods:
        if m == "trace":
            rows["trace"] = f"{trace_direct(rho, A)!r}"
        elif m == "wigner":
            try:
                rows["wigner"] = f"{expectation_wigner(rho, A, spec)!r}"
            except ResolutionRefusal as exc:
                rows["wigner"] = f"refused ({exc.instability:.2%} instability)"
        elif m == "husimi-series":
            series = expectation_husimi_series(rho, A, n_max=cfg["n_max"],
                                               tol=cfg["tol"])
            rows["husimi-series"] = f"{series.value!r} [{series.verdict}]"
        else:
            raise SpecParseError(f"unknown method {m!r}")

    txt = [f"# expectation report (husimi-kit {__version__})",
           f"operator: {cfg['op']}", f"state: {cfg['rho']}", ""]
    txt += [f"{k:>14s}: {v}" for k, v in rows.items()]
    csv = ["method,value"] + [f"{k},{v}" for k, v in rows.items()]
    if series is not None:
        txt += ["", "husimi-series terms (n, partial_sum, |term|):"]
        csv.append("series_n,partial_sum_re,partial_sum_im,term_magnitude")
        prev = 0.0
        for n, (s, t) in enumerate(zip(series.partial_sums,
                                       series.term_magnitudes)):
            txt.append(f"  {n:3d}  {s.real:+.10e}{s.imag:+.3e}j   {t:.3e}")
            csv.append(f"{n},{float(s.real)!r},{float(s.imag)!r},{float(t)!r}")
            prev = s
        txt.append(f"tail bound: {series.tail_bound}")
    if cfg["probe"]:
        rep = bound_probe(A)
        txt += ["", f"bound probe: ||A phi|| <= {rep.K:.4g}(1+r^2)^{rep.N}, "
                f"||A^dag phi|| <= {rep.K_adjoint:.4g}(1+r^2)^{rep.N_adjoint}",
                f"fit residuals: {rep.fit_residual:.2e} / "
                f"{rep.fit_residual_adjoint:.2e}"]
        csv.append(f"probe_K,{rep.K!r}")
        csv.append(f"probe_N,{rep.N}")
    _write(out / "report.txt", "\n".join(txt) + "\n", manifest)
    _write(out / "report.csv", "\n".join(csv) + "\n", manifest)
    manifest.write(out / "manifest.json")
    return 0


def cmd_verify(args):
    from .verify import run_verification
    fast = bool(getattr(args, "fast", False))
    failures = run_verification(fast=fast)
    return 0 if failures == 0 else 1


# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(
        prog="husimi-kit",
        description="Husimi/Weyl symbols, product series, and generalized "
                    "Liouville dynamics on a truncated Fock basis")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int)
    common.add_argument("--grid", help="xmin:xmax:nx[:pmin:pmax:np]")
    common.add_argument("--tol", type=float)
    common.add_argument("--order", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out")
    common.add_argument("--config", help="JSON file with defaults")

    p = sub.add_parser("symbol", parents=[common],
                       help="sample a symbol on a grid")
    p.add_argument("--op", help="operator spec")
    p.add_argument("--kind", choices=["husimi", "weyl", "anti-husimi"])
    p.add_argument("--index-window", dest="index_window", type=float,
                   help="smooth basis rolloff fraction for weyl")
    p.add_argument("--length-scale", dest="length_scale", type=float,
                   help="pre-scale grid coordinates x/L, p*L")
    p.set_defaults(func=cmd_symbol)

    p = sub.add_parser("product", parents=[common],
                       help="Husimi product series vs the matrix oracle")
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--points", help="CSV file of x,p rows")
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("evolve", parents=[common],
                       help="generalized Liouville evolution")
    p.add_argument("--hamiltonian")
    p.add_argument("--rho")
    p.add_argument("--dt", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--taper", help="r0,r1")
    p.add_argument("--snapshot-every", dest="snapshot_every", type=int)
    p.add_argument("--oracle", action="store_const", const=True)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("expect", parents=[common],
                       help="expectation values, three ways")
    p.add_argument("--op")
    p.add_argument("--rho")
    p.add_argument("--methods")
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--probe", action="store_const", const=True)
    p.set_defaults(func=cmd_expect)

    p = sub.add_parser("verify", parents=[common],
                       help="run the built-in invariant suite")
    p.add_argument("--fast", action="store_const", const=True)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except SpecParseError as exc:
        print(f"error (parse): {exc}", file=sys.stderr)
        return 2
    except InstabilityError as exc:
        print(f"error (instability): {exc}", file=sys.stderr)
        return 4
    except _REFUSALS as exc:
        print(f"error (numerical): {exc}", file=sys.stderr)
        return 3
    except HusimiKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
