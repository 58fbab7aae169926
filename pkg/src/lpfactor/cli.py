"""Command-line harness: ``lpfactor <subcommand> [options]``.

Exit codes: 0 success, 1 invalid arguments, 2 engine error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

import numpy as np

from .errors import LabError
from .factorization import (Factorization, build_explicit_factorization,
                            random_factorization, validate_factorization)
from .quasinorm import (norm_P_linf_to_lp_bounds, norm_P_linf_to_lp_exact,
                        norm_P_linf_to_lp_search, norm_P_linf_to_lp_vertex,
                        norm_T_lp_to_linf)
from .signs import (clamped_log, khintchine_moment_check, khintchine_tail_exact,
                    khintchine_tail_mc, balanced_sign_search)
from .study import StudyConfig, run_scaling_study
from .witness import lower_bound_from_witness, search_witness


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        return [float(eval_fraction(t)) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def eval_fraction(text: str) -> float:
    """Parse '0.5' or '1/2'."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _p_arg(text: str) -> float:
    try:
        return eval_fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"invalid p: {text}") from exc


def _emit(args, payload: dict) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")


def _load_factorization(path: str) -> Factorization:
    with open(path) as fh:
        return Factorization.from_json(fh.read())


def cmd_tail(args) -> int:
    coeffs = np.array(args.coeffs) if args.coeffs else np.ones(args.n)
    s2 = float(np.sum(coeffs**2))
    records = []
    for a in args.alpha:
        lam = a * math.sqrt(s2 * clamped_log(coeffs.size))
        est_mc = khintchine_tail_mc(coeffs, lam, args.trials, args.seed)
        line = {"alpha": a, "threshold": lam, "mc": est_mc.empirical_probability,
                "hoeffding": est_mc.bound_hoeffding, "power_form": est_mc.bound_power_form,
                "c0": est_mc.c0}
        if coeffs.size <= 20:
            line["exact"] = khintchine_tail_exact(coeffs, lam).empirical_probability
        records.append(line)
        print("alpha={alpha:g} threshold={threshold:.6g} exact={ex} mc={mc:.6g} "
              "hoeffding={hoeffding:.6g} power_form={power_form:.6g}".format(
                  ex=line.get("exact", "n/a"), **line))
    moments = []
    for q in args.moments:
        moment, ratio = khintchine_moment_check(coeffs, q, args.trials, args.seed)
        moments.append({"q": q, "moment": moment, "ratio": ratio})
        print(f"q={q:g} moment={moment:.6g} moment/sqrt(q)={ratio:.6g}")
    _emit(args, {"coeffs": coeffs.tolist(), "tails": records, "moments": moments})
    return 0


def cmd_sign_search(args) -> int:
    if args.matrix:
        with open(args.matrix) as fh:
            F = np.array(json.load(fh), dtype=float)
    else:
        rng = np.random.default_rng(args.seed)
        F = rng.choice([-1.0, 1.0], size=(args.n, args.N))
    eps, frac = balanced_sign_search(F, args.alpha, args.samples, args.seed)
    print(f"epsilon={' '.join(str(int(e)) for e in eps)}")
    print(f"good_fraction={frac:.6g}")
    _emit(args, {"epsilon": [int(e) for e in eps], "good_fraction": frac})
    return 0


def cmd_explicit(args) -> int:
    F = build_explicit_factorization(args.n, args.p)
    resid = validate_factorization(F)
    normT = norm_T_lp_to_linf(F.T, F.p)
    bound = float(F.n) ** (1.0 / F.p - 0.5)
    if F.K <= args.max_K:
        normP, how = norm_P_linf_to_lp_exact(F.P, F.p, max_K=args.max_K), "exact"
    else:
        normP, how = norm_P_linf_to_lp_search(F.P, F.p, 32, args.seed), "search"
    print(f"n={F.n} K={F.K} p={F.p:g}")
    print(f"PT residual={resid:g}")
    print(f"||T||={normT:g}")
    print(f"||P|| ({how})={normP:.12g}")
    print(f"bound n^(1/p-1/2)={bound:.12g}")
    _emit(args, F.to_dict())
    return 0


def cmd_witness(args) -> int:
    if args.factorization:
        F = _load_factorization(args.factorization)
    elif args.K is None:
        F = build_explicit_factorization(args.n, args.p)
    else:
        F = random_factorization(args.n, args.K, args.p, args.seed)
    wres = search_witness(F, args.tries, args.seed)
    lb = lower_bound_from_witness(F, wres)
    print(f"n={F.n} K={F.K} p={F.p:g} distinguished={wres.distinguished}")
    print(f"epsilon={' '.join(str(int(e)) for e in wres.epsilon)}")
    print(f"sup_w={wres.sup_w:.12g} ratio={wres.ratio:.6g} lower_bound={lb:.12g}")
    _emit(args, wres.to_dict())
    return 0


def cmd_study(args) -> int:
    overrides = {"n_grid": args.n_grid, "p_list": args.p_list,
                 "tries_per_cell": args.tries, "seed": args.seed,
                 "exact_norm_max_K": args.max_K, "output_path": args.out}
    if args.config:
        cfg = StudyConfig.from_json_file(args.config, **overrides)
    else:
        cfg = StudyConfig(**{k: v for k, v in overrides.items() if v is not None})
    res = run_scaling_study(cfg)
    failed = sum(r.failed for r in res.rows)
    print(f"wrote {len(res.rows)} rows to {cfg.output_path} ({failed} failed)")
    for p in cfg.p_list:
        parts = [f"p={p:g}", f"predicted={1.0 / p - 0.5:g}"]
        if p in res.upper_slopes:
            parts.append(f"upper_slope={res.upper_slopes[p][0]:.6g}")
        if p in res.lower_slopes:
            slope, _, r2 = res.lower_slopes[p]
            parts.append(f"lower_adj_slope={slope:.6g} r2={r2:.4f}")
        ratios = [r.witness_ratio for r in res.rows if r.p == p and not r.failed]
        if ratios:
            parts.append(f"ratio_range=[{min(ratios):.4g}, {max(ratios):.4g}]")
        print(" ".join(parts))
    return 0


def cmd_oracle(args) -> int:
    if args.factorization:
        F = _load_factorization(args.factorization)
    else:
        F = build_explicit_factorization(args.n, args.p)
    lo, up = norm_P_linf_to_lp_bounds(F.P, F.p, max_K=args.max_K)
    vertex = norm_P_linf_to_lp_vertex(F.P, F.p, max_K=args.max_K)
    print(f"||P||_(inf->p) = {lo:.15g}  (K={F.K}, p={F.p:g})")
    print(f"certified bracket [{lo:.15g}, {up:.15g}]")
    print(f"best vertex = {vertex:.15g}")
    _emit(args, {"n": F.n, "K": F.K, "p": F.p, "norm_P": lo, "norm_P_upper": up,
                 "vertex_max": vertex})
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output file")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="lpfactor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tail", parents=[common], help="Rademacher tail and moment checks")
    p.add_argument("--n", type=int, default=16, help="number of equal coefficients")
    p.add_argument("--coeffs", type=_float_list, default=None)
    p.add_argument("--alpha", type=_float_list, default=[1.0, 1.5, 2.0])
    p.add_argument("--moments", type=_float_list, default=[2.0, 4.0, 8.0])
    p.add_argument("--trials", type=int, default=100_000)
    p.set_defaults(func=cmd_tail)

    p = sub.add_parser("sign-search", parents=[common], help="sign search keeping column sums small")
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--N", type=int, default=64)
    p.add_argument("--matrix", default=None, help="JSON n x N matrix (default: random signs)")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_sign_search)

    p = sub.add_parser("explicit", parents=[common], help="build and check the Hadamard factorization")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=_p_arg, required=True)
    p.add_argument("--max-K", dest="max_K", type=int, default=20)
    p.set_defaults(func=cmd_explicit)

    p = sub.add_parser("witness", parents=[common], help="construct a witness for one factorization")
    p.add_argument("--factorization", default=None, help="serialized factorization JSON")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--K", type=int, default=None, help="random factorization with this K")
    p.add_argument("--p", type=_p_arg, default=0.5)
    p.add_argument("--tries", type=int, default=64)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("study", parents=[common], help="(n, p) scaling study to CSV")
    p.add_argument("--config", default=None, help="JSON StudyConfig")
    p.add_argument("--n-grid", dest="n_grid", type=_int_list, default=None)
    p.add_argument("--p-list", dest="p_list", type=_float_list, default=None)
    p.add_argument("--tries", type=int, default=None)
    p.add_argument("--max-K", dest="max_K", type=int, default=None)
    p.set_defaults(func=cmd_study, seed=None)

    p = sub.add_parser("oracle", parents=[common], help="certified ||P|| over the cube")
    p.add_argument("--factorization", default=None)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--p", type=_p_arg, default=0.5)
    p.add_argument("--max-K", dest="max_K", type=int, default=20)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"lpfactor: invalid input: {exc}", file=sys.stderr)
        return 1
    except LabError as exc:
        print(f"lpfactor: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
