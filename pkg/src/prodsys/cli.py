"""``prodsys`` command-line interface.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for a
configuration error (bad flags, unknown suite, size limits).
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import amalgam as am
from . import ccr
from . import cluster as cl
from . import inclusion as inc
from . import serialize as ser
from . import units
from .errors import ProdSysError
from .report import Report
from .suites import SUITES, SuiteConfig, exp_trend, run_suite, vacuum_roots_check

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _common(p: argparse.ArgumentParser, suite_choices=None, default_suite=None):
    if suite_choices is not None:
        p.add_argument("--suite", choices=suite_choices, default=default_suite)
    p.add_argument("--k", type=int, default=1, help="multiplicity of the CCR flow")
    p.add_argument("--level", type=int, default=3, help="fine grid level L")
    p.add_argument("--coarse", type=int, default=1, help="coarse grid level L′ for clusters")
    p.add_argument("--tol", type=float, default=1e-10, help="identity tolerance")
    p.add_argument("--state", default="tracial", help="'tracial' or 'diag(SEED)'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--slice-cap", type=int, default=None, help="largest slice dimension (env PRODSYS_SLICE_CAP)")
    p.add_argument("--out", type=Path, default=None, help="write the JSON report here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prodsys", description="Grid verification of product and inclusion systems.")
    parser.add_argument("--version", action="version", version=f"prodsys {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    _common(sub.add_parser("run", help="run a named suite"), SUITES, "all")

    p = sub.add_parser("check-system", help="structure checks of a system")
    _common(p)
    p.add_argument("--input", type=Path, help="system JSON written by 'dump'")

    p = sub.add_parser("roots", help="root space of a normalized unit")
    _common(p)
    p.add_argument("--system", choices=["ccr"], default="ccr")

    _common(sub.add_parser("ccr", help="CCR flow checks"), ["vacuum-roots", "exp-trend"], "vacuum-roots")

    p = sub.add_parser("amalgam", help="amalgamated products")
    _common(p)
    p.add_argument("--mode", choices=["spatial", "partial", "contractive"], default="spatial")
    p.add_argument("--config", type=Path, help="JSON with optional keys k, level, q")

    _common(sub.add_parser("cluster", help="cluster and random set checks"),
            ["cluster", "pushforward", "at-most-one", "x-spaces", "randomset"], "cluster")

    p = sub.add_parser("dump", help="write an object as JSON")
    _common(p)
    p.add_argument("what", choices=["system", "vacuum", "distribution", "report"])
    return parser


def _config(args, suite: str) -> SuiteConfig:
    return SuiteConfig(suite=suite, k=args.k, level=args.level, coarse_level=args.coarse, tol_identity=args.tol,
                       state=args.state, seed=args.seed, slice_cap=args.slice_cap)


def _emit(rep: Report, cfg: dict, wall: float, out: Path | None) -> int:
    doc = ser.report_to_json(rep, cfg, wall)
    text = json.dumps(doc, indent=2)
    if out is not None:
        out.write_text(text)
        print(rep.summary())
    else:
        print(text)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def _timed(fn):
    t = time.perf_counter()
    rep = fn()
    return rep, time.perf_counter() - t


def cmd_run(args) -> int:
    cfg = _config(args, args.suite)
    rep, wall = run_suite(cfg)
    return _emit(rep, cfg.to_dict(), wall, args.out)


def cmd_check_system(args) -> int:
    if args.input:
        system = ser.load(args.input)
        if not isinstance(system, inc.GridSystem):
            raise ProdSysError(f"{args.input} does not hold a system")
    else:
        system = ccr.build(args.k, args.level, args.slice_cap)
    rep, wall = _timed(lambda: inc.check_system(system, args.tol))
    return _emit(rep, {"input": str(args.input) if args.input else None, "k": args.k, "level": args.level}, wall, args.out)


def cmd_roots(args) -> int:
    E = ccr.build(args.k, args.level, args.slice_cap)

    def go():
        rep = Report("roots")
        rs = units.root_space(E, ccr.vacuum(E), args.tol)
        rep.add("root_dim", "index of the CCR flow equals the multiplicity", rs.dim, kind="equal", expected=args.k)
        rep.info["gram"] = np.real(rs.gram()).tolist()
        return rep

    rep, wall = _timed(go)
    return _emit(rep, {"k": args.k, "level": args.level}, wall, args.out)


def cmd_ccr(args) -> int:
    def go():
        if args.suite == "vacuum-roots":
            return vacuum_roots_check(ccr.build(args.k, args.level, args.slice_cap))
        trend = exp_trend()
        rep = Report("exp-trend")
        worst = max(abs(r - 2.0) / 2.0 for r in trend["ratios"])
        rep.add("halving_ratio_deviation", "grid exponential Gram error is first order in δ", worst, 0.2)
        rep.info.update(trend)
        return rep

    rep, wall = _timed(go)
    return _emit(rep, {"suite": args.suite, "k": args.k, "level": args.level}, wall, args.out)


def cmd_amalgam(args) -> int:
    conf = json.loads(args.config.read_text()) if args.config else {}
    k, level = int(conf.get("k", args.k)), int(conf.get("level", min(args.level, 2)))

    def go():
        if args.mode == "spatial":
            E, F = ccr.build(k, level, args.slice_cap), ccr.build(1, level, args.slice_cap)
            return am.spatial_product(E, ccr.vacuum(E), F, ccr.vacuum(F), args.tol).report
        if args.mode == "partial":
            E2, F = ccr.build(2, level, args.slice_cap), ccr.build(1, level, args.slice_cap)
            C = np.array([[1, 0], [0, 1], [0, 0]], dtype=complex)
            rep = am.amalgam_checks(am.amalgamate(E2, F, C, args.tol), args.tol)
            return rep.extend(am.root_amalgam_check(E2, F, C, ccr.vacuum(F), args.tol), "roots.")
        triv = inc.trivial_system(level)
        q = float(conf.get("q", np.exp(-0.7 * triv.delta)))
        A = am.amalgamate(triv, triv, [[q]], args.tol)
        rep = am.amalgam_checks(A, args.tol)
        rep.add("root_dim", "strict contraction of one-dimensional systems has index one", units.index_of(A.G), kind="equal", expected=1)
        return rep

    rep, wall = _timed(go)
    return _emit(rep, {"mode": args.mode, "k": k, "level": level}, wall, args.out)


def cmd_cluster(args) -> int:
    cfg = _config(args, "cluster")
    cfg.validate()
    E = ccr.build(args.k, args.level, args.slice_cap)
    u = ccr.vacuum(E)
    F = cl.unit_line(E, u)

    def go():
        if args.suite == "cluster":
            return cl.cluster_checks(cl.cluster(E, F, args.coarse, args.tol), u, args.tol)
        if args.suite == "x-spaces":
            return cl.x_space_checks(E, u, args.coarse, tol=args.tol)
        eta = cl.FaithfulState.parse(args.state, E.dims[E.n_cells])
        if args.suite == "pushforward":
            return cl.cluster_pushforward_check(E, F, eta, args.coarse)
        dist = cl.random_set_distribution(E, F, eta)
        if args.suite == "randomset":
            return cl.distribution_checks(dist, args.tol)
        rep = Report("at-most-one")
        step = 1 << (args.level - args.coarse)
        for a, b in cl.grid_intervals(E.n_cells, step):
            rep.extend(cl.at_most_one_check(E, F, eta, a, b, 1e-9, dist), f"[{a},{b}].")
        return rep

    rep, wall = _timed(go)
    return _emit(rep, cfg.to_dict() | {"suite": args.suite}, wall, args.out)


def cmd_dump(args) -> int:
    if args.out is None:
        raise ProdSysError("dump needs --out")
    E = ccr.build(args.k, args.level, args.slice_cap)
    if args.what == "system":
        obj = E
    elif args.what == "vacuum":
        obj = ccr.vacuum(E)
    elif args.what == "distribution":
        obj = cl.random_set_distribution(E, cl.unit_line(E, ccr.vacuum(E)), cl.FaithfulState.parse(args.state, E.dims[E.n_cells]))
    else:
        cfg = _config(args, "system-checks")
        rep, wall = run_suite(cfg)
        args.out.write_text(json.dumps(ser.report_to_json(rep, cfg.to_dict(), wall), indent=2))
        print(f"wrote {args.out}")
        return EXIT_PASS
    ser.dump(obj, args.out)
    print(f"wrote {args.out}")
    return EXIT_PASS


COMMANDS = {
    "run": cmd_run,
    "check-system": cmd_check_system,
    "roots": cmd_roots,
    "ccr": cmd_ccr,
    "amalgam": cmd_amalgam,
    "cluster": cmd_cluster,
    "dump": cmd_dump,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_PASS
    try:
        return COMMANDS[args.command](args)
    except ProdSysError as e:
        print(f"prodsys: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        print(f"prodsys: I/O failure: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
