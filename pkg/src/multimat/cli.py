"""Command-line driver.

    multimat run <case|file> [--nx N --ny N --cfl C --t-end T --order 1|2
                              --out DIR --every DT]
    multimat exact <case> [--t T --nx N --out FILE]
    multimat list-cases

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
The MULTIMAT_NUM_THREADS environment variable bounds the worker count of
the compiled kernels.
"""

import argparse
import sys

import numpy as np

from .cases import OutputSpec, case_names, load_case
from .errors import ParseError, SolverError
from .mesh import configured_workers, set_num_workers
from .runner import run_case

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="multimat",
        description="Sharp-interface Eulerian solver for compressible "
                    "multimaterial flows on Cartesian grids.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="advance a case to its final time")
    run_p.add_argument("case", help="built-in case name or config file path")
    run_p.add_argument("--nx", type=int, default=None)
    run_p.add_argument("--ny", type=int, default=None)
    run_p.add_argument("--cfl", type=float, default=None)
    run_p.add_argument("--t-end", type=float, default=None, dest="t_end")
    run_p.add_argument("--order", type=int, choices=(1, 2), default=None)
    run_p.add_argument("--out", default="out", help="output directory")
    run_p.add_argument("--every", type=float, default=None,
                       help="additional output cadence in seconds")

    exact_p = sub.add_parser(
        "exact", help="exact Riemann solution profile of a 1D case")
    exact_p.add_argument("case", help="a built-in 1D case (tc1..tc7)")
    exact_p.add_argument("--t", type=float, default=None,
                         help="sampling time (default: the case's t_end)")
    exact_p.add_argument("--nx", type=int, default=None,
                         help="number of sample points")
    exact_p.add_argument("--out", default="-",
                         help="output CSV path ('-' for stdout)")

    sub.add_parser("list-cases", help="list the built-in cases")
    return parser


def _cmd_run(args):
    cfg = load_case(args.case, nx=args.nx, ny=args.ny, cfl=args.cfl,
                    t_end=args.t_end, order=args.order)
    if args.every is not None:
        cfg = cfg.with_overrides(
            outputs=OutputSpec(times=cfg.outputs.times,
                               kinds=cfg.outputs.kinds, every=args.every))
    workers = configured_workers()
    if workers is not None:
        set_num_workers(workers)
    result = run_case(cfg, out_dir=args.out)
    print(f"{cfg.name}: t = {result.t_final:.6g} s in {result.steps} steps "
          f"({result.flips} interface flips, "
          f"{result.wall_time:.1f} s wall time)")
    print(f"outputs in {args.out}/ "
          f"({len(result.outputs)} files + diagnostics.csv)")
    return EXIT_OK


def _cmd_exact(args):
    from .exact_riemann import solve_exact
    from .state import PrimState
    from .materials import DefGrad

    cfg = load_case(args.case)
    if cfg.ny != 1:
        raise ParseError(f"{args.case} is not a 1D case")
    # 1D tubes: region 0 covers everything (right state), region 1 the left
    right = cfg.regions[0]
    left = cfg.regions[1]
    x0 = left.shape[1]
    eye = DefGrad.identity()
    w_l = PrimState(left.rho, left.u1, left.u2, left.p, eye)
    w_r = PrimState(right.rho, right.u1, right.u2, right.p, eye)
    sol = solve_exact(cfg.materials[left.material], w_l,
                      cfg.materials[right.material], w_r, x0=x0)
    t = args.t if args.t is not None else cfg.t_end
    nx = args.nx if args.nx is not None else cfg.nx
    x_lo, x_hi = cfg.domain[0], cfg.domain[1]
    x = x_lo + (np.arange(nx) + 0.5) * (x_hi - x_lo) / nx
    prof = sol.profile(x, t)
    lines = ["x,rho,u1,u2,p,sigma11,sigma21"]
    for i in range(nx):
        lines.append(",".join("%.17g" % v for v in
                              (x[i], prof["rho"][i], prof["u1"][i],
                               prof["u2"][i], prof["p"][i],
                               prof["sigma11"][i], prof["sigma21"][i])))
    text = "\n".join(lines) + "\n"
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return EXIT_OK


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "exact":
            return _cmd_exact(args)
        if args.command == "list-cases":
            from .cases import load_case as _lc
            for name in case_names():
                print(f"{name}: {_lc(name).description}")
            return EXIT_OK
    except ParseError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
