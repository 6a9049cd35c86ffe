"""Command-line front end: solve states, build thermodynamic grids, evaluate
determinant form-factor products and their asymptotic predictions, run scaling
studies and ED oracle comparisons.  All outputs are JSON (CSV for scaling
tables on request).  Exit codes: 0 success, 1 validation error, 2 numeric
failure."""

import argparse
import json
import sys

import numpy as np

from .model import ModelParams
from .bethe import ExcitationSpec, solve_bethe_state, NonConvergence
from .thermo import build_thermo
from .finite import ff_product_with_distance
from .asympt import predict_product
from .scaling import StudyConfig, run_scaling_study, emit

__all__ = ["main", "cli_dispatch"]


class _UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of calling sys.exit, so unknown flags map
    to exit code 1 with usage text."""

    def error(self, message):
        raise _UsageError(f"{message}\n{self.format_usage()}")


def _int_list(text):
    if not text:
        return ()
    return tuple(int(t) for t in text.split(","))


def _float_list(text):
    if not text:
        return ()
    return tuple(float(t) for t in text.split(","))


def _state_json(state):
    return {
        "M": state.params.M,
        "N": state.params.N,
        "zeta": state.params.zeta,
        "alpha": state.params.alpha,
        "spec": state.spec.to_json(),
        "labels": [int(l) for l in state.labels],
        "roots": [float(r) for r in state.roots],
        "residual": state.residual,
    }


def _spec_from_args(args, channel):
    return ExcitationSpec(channel=channel,
                          holes=_int_list(args.holes),
                          particles=_int_list(args.particles))


def _cmd_ground(args):
    state = solve_bethe_state(ModelParams(args.zeta, args.M, args.N, args.alpha))
    return _state_json(state)


def _cmd_excite(args):
    spec = _spec_from_args(args, args.channel)
    state = solve_bethe_state(ModelParams(args.zeta, args.M, args.N, args.alpha),
                              spec)
    return _state_json(state)


def _cmd_thermo(args):
    grid = build_thermo(args.zeta, args.density, order=args.order)
    return {
        "zeta": args.zeta,
        "D": args.density,
        "q": grid.q,
        "k_F": np.pi * args.density,
        "Z": float(np.real(grid.Z(grid.q))),
        "rho_q": float(np.real(grid.rho(grid.q))),
    }


def _cmd_ff(args):
    channel = "z" if args.channel == "zz" else "plus"
    spec = _spec_from_args(args, channel)

    def solve(a):
        grd = solve_bethe_state(ModelParams(args.zeta, args.M, args.N, 0.0))
        exc = solve_bethe_state(ModelParams(args.zeta, args.M, args.N, a), spec)
        return exc, grd

    v, P_ex, log_mag = ff_product_with_distance(
        solve, channel, distance=args.distance, alphas=_float_list(args.alphas))
    return {
        "channel": args.channel,
        "M": args.M, "N": args.N, "zeta": args.zeta,
        "distance": args.distance,
        "S_N": float(np.abs(v)),
        "value_re": float(np.real(v)), "value_im": float(np.imag(v)),
        "P_ex": P_ex, "log_magnitude": log_mag,
    }


def _cmd_predict(args):
    grid = build_thermo(args.zeta, args.density, order=args.order)
    pred = predict_product(
        args.channel, args.regime, grid,
        mu_p=_float_list(args.mu_p), mu_h=_float_list(args.mu_h),
        r=args.r,
        p_plus=_int_list(args.p_plus), h_plus=_int_list(args.h_plus),
        p_minus=_int_list(args.p_minus), h_minus=_int_list(args.h_minus),
        alphas=_float_list(args.alphas))
    out = pred.to_json()
    if args.M is not None:
        out["assembled_magnitude"] = float(np.abs(pred.assembled(0, args.M)))
        out["M"] = args.M
    return out


def _cmd_scale(args):
    with open(args.config) as fh:
        config = StudyConfig.from_json(json.load(fh))
    records, fit = run_scaling_study(config)
    if args.output:
        emit(records, args.format, args.output)
        fit["output"] = args.output
    else:
        fit["records"] = [r.to_json() for r in records]
    return fit


def _cmd_oracle(args):
    from .ed import oracle_run
    report = oracle_run(args.M, args.zeta, args.N, args.channel,
                        tolerance=args.tolerance)
    if report["orphans"]:
        report["status"] = "orphans"
        return report, 2
    report["status"] = "ok"
    return report


def _build_parser():
    p = _Parser(prog="xxzff", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common_chain(sp):
        sp.add_argument("--M", type=int, required=True)
        sp.add_argument("--zeta", type=float, required=True)
        sp.add_argument("--N", type=int, required=True)
        sp.add_argument("--alpha", type=float, default=0.0)

    sp = sub.add_parser("ground", help="solve the (twisted) ground state")
    common_chain(sp)
    sp.set_defaults(func=_cmd_ground)

    sp = sub.add_parser("excite", help="solve a particle-hole excited state")
    common_chain(sp)
    sp.add_argument("--channel", choices=("z", "plus"), default="z")
    sp.add_argument("--holes", default="")
    sp.add_argument("--particles", default="")
    sp.set_defaults(func=_cmd_excite)

    sp = sub.add_parser("thermo", help="thermodynamic grid summary")
    sp.add_argument("--zeta", type=float, required=True)
    sp.add_argument("--density", type=float, required=True)
    sp.add_argument("--order", type=int, default=128)
    sp.set_defaults(func=_cmd_thermo)

    sp = sub.add_parser("ff", help="finite-size form-factor product")
    common_chain(sp)
    sp.add_argument("--channel", choices=("zz", "pm"), required=True)
    sp.add_argument("--holes", default="")
    sp.add_argument("--particles", default="")
    sp.add_argument("--distance", type=int, default=0)
    sp.add_argument("--alphas", default="1e-2,5e-3,2.5e-3")
    sp.set_defaults(func=_cmd_ff)

    sp = sub.add_parser("predict", help="thermodynamic-limit prediction")
    sp.add_argument("--zeta", type=float, required=True)
    sp.add_argument("--density", type=float, required=True)
    sp.add_argument("--channel", choices=("zz", "pm"), required=True)
    sp.add_argument("--regime", choices=("away", "critical"), required=True)
    sp.add_argument("--order", type=int, default=128)
    sp.add_argument("--mu-p", dest="mu_p", default="")
    sp.add_argument("--mu-h", dest="mu_h", default="")
    sp.add_argument("--r", type=int, default=0)
    sp.add_argument("--p-plus", dest="p_plus", default="")
    sp.add_argument("--h-plus", dest="h_plus", default="")
    sp.add_argument("--p-minus", dest="p_minus", default="")
    sp.add_argument("--h-minus", dest="h_minus", default="")
    sp.add_argument("--alphas", default="1e-2,5e-3,2.5e-3")
    sp.add_argument("--M", type=int, default=None,
                    help="also report the assembled magnitude at this length")
    sp.set_defaults(func=_cmd_predict)

    sp = sub.add_parser("scale", help="finite-size scaling study from a JSON config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--output", default=None)
    sp.set_defaults(func=_cmd_scale)

    sp = sub.add_parser("oracle", help="compare determinant products against ED")
    sp.add_argument("--M", type=int, required=True)
    sp.add_argument("--zeta", type=float, required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--channel", choices=("zz", "pm"), required=True)
    sp.add_argument("--tolerance", type=float, default=1e-9)
    sp.set_defaults(func=_cmd_oracle)
    return p


def cli_dispatch(argv):
    """Run one subcommand; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        result = args.func(args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NonConvergence, ArithmeticError, RuntimeError,
            np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    if isinstance(result, tuple):
        result, code = result
    else:
        code = 0
    json.dump(result, sys.stdout, indent=1)
    sys.stdout.write("\n")
    return code


def main():
    sys.exit(cli_dispatch(sys.argv[1:]))
