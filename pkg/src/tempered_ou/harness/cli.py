"""Command-line interface: ``sample``, ``ou simulate``, ``validate`` and ``bench``.

Exit codes: 0 success or all checks passed, 2 a validation check failed,
1 usage or parameter error.
"""
from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from ..dgga import METHODS as DGGA_METHODS, DGGaParams, DGGaSampler
from ..errors import TemperedOUError
from ..ibgm import METHODS as IBGM_METHODS, IBGMParams, IBGMSampler
from ..iga import METHODS as IGA_METHODS, IGaParams, IGaSampler
from ..ou_engine import OUSpec, TrajectoryGrid, simulate_path
from ..rand_core import DEFAULT_SEED, RandomStream
from ..tempered_stable import TS_METHODS, TSParams, ts_sampler
from .bench import DEFAULT_SIZES, bench, format_bench
from .export import matrix_to_csv, paths_csv, plot_script, to_json, write_text
from .reference_cells import reference
from .validate import TransitionTarget, format_report, validate_moments

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2

_METHODS = {
    "iga": IGA_METHODS,
    "ibgm": IBGM_METHODS + ("auto",),
    "dgga": DGGA_METHODS,
    "ts": TS_METHODS + ("auto",),
}

# configurations whose err% cells were published; used as reference tolerances
_TABLE_DIST = dict(beta=0.9, p=1.0, eta=2.0)
_TABLE_OU = dict(lambda_=10.0, t_step=0.1, y0=0.0, beta_temper=1.0, b=0.0)
_TABLE_C = {"tsou": 1.0, "outs": 0.1}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage errors with exit code 1 and no abbreviations."""

    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _method(dist: str, name: str | None) -> str | None:
    if name is None:
        return None
    for m in _METHODS[dist]:
        if m.lower() == name.lower():
            return m
    raise UsageError(f"unknown method {name!r} for {dist}; choose from "
                     f"{', '.join(m.lower() for m in _METHODS[dist])}")


def _add_out(p):
    p.add_argument("--out", default="-", help="output file, '-' for standard output")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)


def _add_dist_params(p):
    g = p.add_argument_group("IGa / IBGM / DGGa parameters")
    g.add_argument("--beta", type=float, default=0.9, help="IGa/IBGM beta")
    g.add_argument("--gamma", type=float, default=1.0, help="shape gamma")
    g.add_argument("--p", type=float, default=1.0, help="tempering power p")
    g.add_argument("--eta", type=float, default=2.0, help="scale ratio eta > 1")
    t = p.add_argument_group("tempered stable parameters")
    t.add_argument("--alpha", type=float, default=0.5)
    t.add_argument("--c", type=float, default=1.0, help="tempering mass c")
    t.add_argument("--beta-temper", type=float, default=1.0, help="tempering rate")
    t.add_argument("--b", type=float, default=0.0, help="drift")


def _add_ou_params(p, defaults=True):
    p.add_argument("--kind", type=str.lower, choices=("tsou", "outs"), required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--beta-temper", type=float, default=1.0)
    p.add_argument("--b", type=float, default=0.0)
    p.add_argument("--lambda", dest="lambda_", type=float, default=10.0)
    p.add_argument("--t-step", type=float, default=0.1)
    p.add_argument("--y0", type=float, default=0.0)


def _dist_target(a):
    if a.dist == "iga":
        return IGaParams(a.beta, a.gamma, a.p, a.eta)
    if a.dist == "ibgm":
        if a.gamma != int(a.gamma):
            raise UsageError("IBGM needs an integer --gamma")
        return IBGMParams(a.beta, int(a.gamma), a.p, a.eta)
    if a.dist == "dgga":
        return DGGaParams(a.gamma, a.p, a.eta)
    return TSParams.rapidly_decreasing(a.alpha, a.p, a.c, a.beta_temper, a.b)


def _ou_spec(a) -> OUSpec:
    return OUSpec.rapidly_decreasing(a.kind, a.lambda_, a.alpha, a.p, a.c, a.beta_temper, a.b)


def _dist_sampler(a, target, method):
    if a.dist == "iga":
        return IGaSampler(target, method or "ARGS")
    if a.dist == "ibgm":
        return IBGMSampler(target, method or "auto")
    if a.dist == "dgga":
        return DGGaSampler(target, method or "GGSM1")
    return ts_sampler(target, method or "auto")


def cmd_sample(a) -> int:
    target = _dist_target(a)
    sampler = _dist_sampler(a, target, _method(a.dist, a.method))
    x = np.asarray(sampler(RandomStream(a.seed), a.n), dtype=float)
    write_text(matrix_to_csv(["x"], x[:, None]), a.out)
    return EXIT_OK


def cmd_ou_simulate(a) -> int:
    grid = TrajectoryGrid(a.t_step, a.n_steps, a.paths, a.y0)
    paths = simulate_path(RandomStream(a.seed), _ou_spec(a), grid)
    write_text(paths_csv(grid.times, paths), a.out)
    if a.plot_script:
        cols = [f"path_{i}" for i in range(a.paths)]
        csv_name = a.out if a.out != "-" else "paths.csv"
        write_text(plot_script(csv_name, cols, f"{a.kind.upper()} sample paths"), a.plot_script)
    return EXIT_OK


def _reference_cells(a, method):
    """Published err% cells when the arguments match a published configuration."""
    if a.dist in ("iga", "ibgm"):
        if all(np.isclose(getattr(a, k), v) for k, v in _TABLE_DIST.items()):
            return reference(a.dist, (int(a.gamma), method))
    elif a.dist in ("tsou", "outs"):
        same = (np.isclose(a.c, _TABLE_C[a.dist]) and np.isclose(a.t_step, 0.1)
                and np.isclose(a.lambda_, 10) and a.y0 == 0 and a.b == 0
                and np.isclose(a.beta_temper, 1))
        if same:
            return reference(a.dist, (a.p, a.alpha))
    return None


def cmd_validate(a) -> int:
    if a.dist in ("tsou", "outs"):
        a.kind = a.dist
        target = TransitionTarget(_ou_spec(a), a.y0, a.t_step)
        method = a.method
    else:
        target = _dist_target(a)
        method = _method(a.dist, a.method)
    if a.dist in ("iga", "ibgm") and method is None:
        method = "ARGS" if a.dist == "iga" else "Inverse"
    rep = validate_moments(target, a.n, a.seed, method, _reference_cells(a, method))
    write_text(to_json(rep.to_dict()) if a.format == "json" else format_report(rep) + "\n", a.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_bench(a) -> int:
    target = _dist_target(a)
    names = [_method(a.dist, m) for m in (a.methods or _METHODS[a.dist])
             if m.lower() != "auto"]
    samplers = {m: _dist_sampler(a, target, m) for m in names}
    baseline = _method(a.dist, a.baseline) if a.baseline else names[0]
    rep = bench(samplers, a.sizes, a.repetitions, baseline, a.seed, a.dist,
                {k: getattr(a, k) for k in ("beta", "gamma", "p", "eta")})
    write_text(to_json(rep.to_dict()) if a.format == "json" else format_bench(rep) + "\n", a.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tempered-ou", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="draw variates, one per CSV row")
    p.add_argument("--dist", type=str.lower, choices=("iga", "ibgm", "dgga", "ts"), required=True)
    p.add_argument("--method")
    p.add_argument("--n", type=int, default=1000)
    _add_dist_params(p)
    _add_out(p)
    p.set_defaults(func=cmd_sample)

    ou = sub.add_parser("ou", help="OU process tools")
    ousub = ou.add_subparsers(dest="ou_command", required=True, parser_class=_Parser)
    p = ousub.add_parser("simulate", help="simulate paths on a uniform grid")
    _add_ou_params(p)
    p.add_argument("--n-steps", type=int, required=True)
    p.add_argument("--paths", type=int, default=1)
    p.add_argument("--plot-script", help="also write a matplotlib script plotting the CSV")
    _add_out(p)
    p.set_defaults(func=cmd_ou_simulate)

    p = sub.add_parser("validate", help="compare sample moments or cumulants with exact values")
    p.add_argument("--dist", type=str.lower, required=True,
                   choices=("iga", "ibgm", "dgga", "ts", "tsou", "outs"))
    p.add_argument("--method")
    p.add_argument("--n", type=int, default=50_000)
    p.add_argument("--format", choices=("text", "json"), default="text")
    _add_dist_params(p)
    p.add_argument("--lambda", dest="lambda_", type=float, default=10.0)
    p.add_argument("--t-step", type=float, default=0.1)
    p.add_argument("--y0", type=float, default=0.0)
    _add_out(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="median sampling times per method and size")
    p.add_argument("--dist", type=str.lower, choices=("iga", "ibgm", "dgga"), required=True)
    p.add_argument("--methods", nargs="+")
    p.add_argument("--baseline")
    p.add_argument("--sizes", type=int, nargs="+", default=list(DEFAULT_SIZES))
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--format", choices=("text", "json"), default="text")
    _add_dist_params(p)
    _add_out(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, TemperedOUError, ValueError) as exc:
        print(f"tempered-ou: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"tempered-ou: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
