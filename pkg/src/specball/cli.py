"""Command-line front end.

Subcommands: `reproduce` (prop-b / example / step1 runs with CSV and
optional figure output), `eval` (single-point evaluations), `optimize`
(disc optimizer).  Exit codes: 0 = all claimed trends hold, 1 = a claim
or feasibility failure, 2 = usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .calg import NotCyclic, as_mat3, cyclicity, elem_sym, parse_complex
from .discs import NoFeasiblePoint, NotAdmissible, lempert_upper, optimize_disc
from .domains import SpecPoint, h_g3
from .experiments import example_run, prop_b_run, step1_asymptotics
from .report import fmt_bool, fmt_complex, fmt_real, render_ratio_figure, write_csv

PROP_B_HEADER = ["j", "t", "gap", "cyclic", "f1", "f2", "f3", "ratio"]
EXAMPLE_HEADER = [
    "t",
    "explicit_ratio",
    "optimized_ratio",
    "relation3_residual",
    "certificate_admissible",
]
STEP1_HEADER = ["t", "x_over_t", "y_over_t2"]


class UsageError(Exception):
    pass


def _parse_point(text: str) -> SpecPoint:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"expected 3 comma-separated complex literals, got {text!r}")
    try:
        return SpecPoint(*[parse_complex(p) for p in parts])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _parse_matrix(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 9:
        raise UsageError(f"expected 9 comma-separated complex literals, got {text!r}")
    try:
        vals = [parse_complex(p) for p in parts]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return as_mat3(np.array(vals).reshape(3, 3))


def _parse_j_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError as exc:
        raise UsageError(f"bad j range {text!r}, expected like 4..14") from exc
    if hi < lo:
        raise UsageError("empty j range")
    return lo, hi


def _parse_t_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad t list {text!r}") from exc


def _emit(path: str | None, header, rows) -> None:
    if path:
        write_csv(path, header, rows)
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(row))


def _cmd_reproduce(args) -> int:
    if args.which == "prop-b":
        lo, hi = _parse_j_range(args.j)
        rows = prop_b_run(lo, hi, args.perturbation)
        csv_rows = [
            [
                str(r.j),
                fmt_real(r.t.real if isinstance(r.t, complex) else r.t),
                fmt_real(r.c32_over_t_gap),
                fmt_bool(r.cyclic),
                fmt_complex(r.f1),
                fmt_complex(r.f2),
                fmt_complex(r.f3),
                fmt_real(r.ratio),
            ]
            for r in rows
        ]
        _emit(args.out, PROP_B_HEADER, csv_rows)
        if args.svg:
            render_ratio_figure(
                args.svg,
                [(args.perturbation, [abs(r.t) for r in rows], [r.ratio for r in rows])],
                ylabel="upper bound / |t|",
                title="ratio decay, t_j = 2^-j",
            )
        ok = all(math.isfinite(r.ratio) for r in rows)
        tail = [r.ratio for r in rows if r.j >= 4]
        ok = ok and all(b <= a + 1e-15 for a, b in zip(tail, tail[1:]))
        print(f"VERDICT prop-b: {'PASS' if ok else 'FAIL'} "
              f"(rows={len(rows)}, final_ratio={fmt_real(rows[-1].ratio)})")
        return 0 if ok else 1

    if args.which == "step1":
        ts = _parse_t_list(args.t)
        results = [(t, *step1_asymptotics(t)) for t in ts]
        csv_rows = [
            [fmt_real(t), fmt_complex(x), fmt_complex(y)] for t, x, y in results
        ]
        _emit(args.out, STEP1_HEADER, csv_rows)
        if args.svg:
            render_ratio_figure(
                args.svg,
                [
                    ("x/t", ts, [x.real for _, x, _ in results]),
                    ("y/t^2", ts, [y.real for _, _, y in results]),
                ],
                ylabel="normalized coefficient",
                title="degree-2 annihilator coefficients",
            )
        ok = all(
            abs(x - 1.0) < 1e-10 and abs(y + 2.0) < 1e-10 for _, x, y in results
        )
        print(f"VERDICT step1: {'PASS' if ok else 'FAIL'} (rows={len(results)})")
        return 0 if ok else 1

    # example
    ts = _parse_t_list(args.t)
    result = example_run(ts, degree=args.degree, seed=args.seed, budget=args.budget)
    csv_rows = [
        [
            fmt_real(r.t),
            fmt_real(r.explicit_ratio),
            fmt_real(r.optimized_ratio),
            fmt_real(r.relation3_residual),
            fmt_bool(r.certificate_admissible),
        ]
        for r in result.rows
    ]
    _emit(args.out, EXAMPLE_HEADER, csv_rows)
    if args.svg:
        render_ratio_figure(
            args.svg,
            [
                ("explicit disc", ts, [r.explicit_ratio for r in result.rows]),
                ("optimized disc", ts, [r.optimized_ratio for r in result.rows]),
            ],
            title="ratio vs t for A + t B_t",
        )
    ok = result.kappa_check_passed
    for r in result.rows:
        ok = ok and abs(r.explicit_ratio - 2.0) < 1e-12
        ok = ok and r.relation3_residual < 1e-10
        ok = ok and r.certificate_admissible
    smallest = min(result.rows, key=lambda r: r.t)
    ok = ok and 0.97 <= smallest.optimized_ratio <= 1.10
    print(f"VERDICT example: {'PASS' if ok else 'FAIL'} "
          f"(smallest_t_ratio={fmt_real(smallest.optimized_ratio)}, "
          f"kappa_check={fmt_bool(result.kappa_check_passed)})")
    return 0 if ok else 1


def _cmd_eval(args) -> int:
    if args.what == "h-g3":
        print(fmt_real(h_g3(_parse_point(args.operand))))
        return 0
    M = _parse_matrix(args.operand)
    if args.what == "sigma":
        s = elem_sym(M)
        print(",".join(fmt_complex(v) for v in (s.e1, s.e2, s.e3)))
        return 0
    if args.what == "cyclic":
        rep = cyclicity(M)
        print(f"{fmt_bool(rep.cyclic)},{rep.min_poly_degree},{fmt_real(rep.krylov_smin)}")
        return 0
    # lempert-upper
    try:
        r, _cert = lempert_upper(M)
    except NotCyclic as exc:
        print(f"error: matrix is not cyclic ({exc})", file=sys.stderr)
        return 1
    except NotAdmissible as exc:
        print(f"error: explicit disc not admissible ({exc})", file=sys.stderr)
        return 1
    print(fmt_real(r))
    return 0


def _cmd_optimize(args) -> int:
    target = _parse_point(args.target)
    rel_t = parse_complex(args.relation3_t) if args.relation3_t else None
    try:
        cert, phi = optimize_disc(
            target,
            degree=args.degree,
            phi3_flat=True,
            relation3_t=rel_t,
            seed=args.seed,
            budget=args.budget,
        )
    except NoFeasiblePoint as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.cert:
        with open(args.cert, "w") as fh:
            fh.write(cert.to_json() + "\n")
    if args.disc:
        with open(args.disc, "w") as fh:
            fh.write(phi.to_json() + "\n")
    line = f"alpha={fmt_real(abs(cert.alpha))}"
    if rel_t is not None:
        line += f" ratio={fmt_real(abs(cert.alpha) / abs(rel_t))}"
    line += f" admissible={fmt_bool(cert.admissible)}"
    print(line)
    return 0 if cert.admissible else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specball",
        description="Invariant-metric numerics on the 3x3 spectral unit ball",
    )
    parser.add_argument("--config", help="JSON file with default flag values")
    sub = parser.add_subparsers(dest="command", required=True)

    rep = sub.add_parser("reproduce", help="run a reproduction pipeline")
    rep.add_argument("which", choices=["prop-b", "example", "step1"])
    rep.add_argument("--j", default="4..14", help="j range for prop-b, like 4..14")
    rep.add_argument(
        "--perturbation", default="B", choices=["B", "B-sqrt"],
        help="prop-b perturbation family",
    )
    rep.add_argument(
        "--t", default="0.1,0.05,0.02,0.01", help="comma-separated t grid"
    )
    rep.add_argument("--degree", type=int, default=3)
    rep.add_argument("--seed", type=int, default=42)
    rep.add_argument("--budget", type=int, default=2000)
    rep.add_argument("--out", help="CSV output path (stdout when omitted)")
    rep.add_argument("--svg", help="optional figure output path")
    rep.set_defaults(func=_cmd_reproduce)

    ev = sub.add_parser("eval", help="single-point evaluations")
    ev.add_argument("what", choices=["h-g3", "sigma", "cyclic", "lempert-upper"])
    ev.add_argument("operand", help="3 (point) or 9 (matrix) complex literals")
    ev.set_defaults(func=_cmd_eval)

    opt = sub.add_parser("optimize", help="constrained disc optimization")
    opt.add_argument("target", help="target point, 3 complex literals")
    opt.add_argument("--degree", type=int, default=3)
    opt.add_argument("--seed", type=int, default=42)
    opt.add_argument("--budget", type=int, default=2000)
    opt.add_argument("--relation3-t", help="impose the derivative relation at this t")
    opt.add_argument("--cert", help="write the certificate JSON here")
    opt.add_argument("--disc", help="write the disc coefficients JSON here")
    opt.set_defaults(func=_cmd_optimize)
    return parser


def _apply_config(args, argv) -> None:
    if not args.config:
        return
    with open(args.config) as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise UsageError("config file must hold a JSON object")
    for key, val in config.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise UsageError(f"unknown config key {key!r}")
        flag = "--" + key.replace("_", "-")
        if flag not in argv:
            setattr(args, dest, val)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args, argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
