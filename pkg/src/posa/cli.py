"""Command line front end: ``python -m posa <command> ...``.

Commands: constants, sample, posa, scan, bounds, mc.  Exit status is 0 on
success, 1 when a closed Pósa pair fails a theorem-backed check and 2 on
usage errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from .bounds import expectation_sweep
from .census import density_profile, scan_small_dense
from .experiment import (ExperimentConfig, TrialRecord, census_csv, load_config_file,
                         parse_config_value, run_experiment)
from .graph import atomic_write_text, edgelist_text, read_edgelist
from .numeric.constants import critical_constants
from .numeric.poisson import model_params, thresholds
from .numeric.special import as_support
from .rotation import HARD_CHECKS, check_structure, choose_v0, decompose_structure, posa_pair
from .sampler import sample_min3_graph, trial_rng

OK, GATE, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _support(text):
    try:
        return as_support(text)
    except ValueError as exc:
        raise UsageError(f"unsupported degree set {text!r}: {exc}") from None


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2) + "\n"
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _edges(args, n):
    if args.m is not None:
        return args.m
    if args.c is None:
        raise UsageError("give --m or --c")
    return int(round(args.c * n / 2.0))


def _graph(args):
    """Load ``--graph`` or sample from ``--n/--c|--m/--seed``."""
    if getattr(args, "graph", None):
        g, seed = read_edgelist(args.graph)
        return g, seed
    if args.n is None or args.seed is None:
        raise UsageError("give --graph FILE or --n with --seed")
    m = _edges(args, args.n)
    support = _support(args.support)
    rng = trial_rng(args.seed, args.n, m, args.trial)
    return sample_min3_graph(args.n, m, rng, support=support), args.seed


def cmd_constants(args):
    support = _support(args.support)
    cc = critical_constants(support)
    out = {
        "support": str(support),
        "lambda_star_star": cc.lambda_star_star,
        "c_star_star": cc.c_star_star,
        "a_star": cc.a_star,
        "lambda_star": cc.lambda_star,
    }
    try:
        out["epsilon0"] = thresholds(16, cc.lambda_star_star, support).eps0
    except ValueError:
        out["epsilon0"] = None
    if args.n:
        out["thresholds"] = {}
        for n in args.n:
            th = thresholds(n, cc.lambda_star_star, support)
            out["thresholds"][str(n)] = {"eps0": th.eps0, "sigma_n": th.sigma_n,
                                         "rho_n": th.rho_n, "delta_n": th.delta_n}
    _emit(out, args.out)
    return OK


def cmd_sample(args):
    g, seed = _graph(args)
    text = edgelist_text(g, seed)
    if args.out:
        atomic_write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return OK


def cmd_posa(args):
    g, seed = _graph(args)
    v0 = choose_v0(g, int(args.v0) if args.v0.isdigit() else args.v0,
                   trial_rng(seed or 0, g.n, g.m, args.trial))
    path, pair = posa_pair(g, v0, dedup=not args.no_dedup, budget=args.budget)
    st = decompose_structure(g, pair)
    rep = check_structure(st, pair, g)
    rec = {"n": g.n, "m": g.m, "seed": seed, "v0": v0, "h": path.h}
    rec.update(st.as_dict())
    rec["closed"] = pair.closed
    rec["checks"] = rep.as_dict()
    _emit(rec, args.out)
    if pair.closed and not all(rep.results.get(k, True) for k in HARD_CHECKS):
        return GATE
    return OK


def cmd_scan(args):
    g, seed = _graph(args)
    p = model_params(g.n, g.m) if args.k_max is None or args.density_samples else None
    k_max = args.k_max
    if k_max is None:
        if p is None or p.eps0 is None:
            raise UsageError("cannot derive k_max for this graph; pass --k-max")
        k_max = int(math.ceil(p.eps0 * math.log(g.n)))
    try:
        w = scan_small_dense(g, k_max)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = {"n": g.n, "m": g.m, "k_max": k_max, "witness": None}
    if w:
        out["witness"] = {"vertices": list(w.vertices), "edges": w.edges}
    if args.density_samples:
        prof = density_profile(g, p.sigma_n, p.rho_n, args.density_samples,
                               trial_rng(seed or 0, g.n, g.m, args.trial), k_min=max(1, k_max))
        out["profile"] = [{"k": k, "max_density_found": d, "flagged": f} for k, d, f in prof.rows]
        if args.csv:
            rec = TrialRecord(n=g.n, m=g.m, seed=seed or 0, trial=args.trial,
                              density_rows=prof.rows)
            atomic_write_text(args.csv, census_csv([rec]))
    _emit(out, args.out)
    return OK


def cmd_bounds(args):
    if args.n is None:
        raise UsageError("--n is required")
    m = _edges(args, args.n)
    rep = expectation_sweep(args.n, m, _support(args.support), C=args.C)
    if args.csv:
        lines = ["s,t,x,regime,log_estar_per_vertex,remainder_budget"]
        lines += [",".join([repr(s), repr(t), repr(x), reg, repr(e), repr(b)])
                  for s, t, x, reg, e, b in rep.rows()]
        atomic_write_text(args.csv, "\n".join(lines) + "\n")
    _emit(rep.summary(), args.out)
    return OK


_MC_FLAGS = ("n_list", "c", "m", "trials", "seed", "v0_policy", "rotation_budget", "k_max",
             "density_samples", "out_dir", "workers", "pairing_retries", "max_rejects", "support")


def cmd_mc(args):
    opts = load_config_file(args.config) if args.config else {}
    for key in _MC_FLAGS:
        val = getattr(args, key)
        if val is not None:
            opts[key] = parse_config_value(key, str(val)) if key == "n_list" else val
    if args.no_dedup:
        opts["dedup"] = False
    if args.timing:
        opts["record_timing"] = True
    if "seed" not in opts:
        raise UsageError("a master seed is required (--seed or seed = ... in the config)")
    if "m" in opts and opts["m"] is not None:
        opts.setdefault("c", None)
    try:
        cfg = ExperimentConfig(**opts)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    records, paths = run_experiment(cfg)
    bad = [r for r in records if r.closed and not r.hard_ok]
    summary = {
        "records": len(records),
        "closed": sum(r.closed for r in records),
        "errors": sum(bool(r.error) for r in records),
        "hard_gate_failures": len(bad),
        "dense_witnesses": sum(r.dense_witness for r in records),
        "files": {k: str(v) for k, v in paths.items()},
    }
    _emit(summary)
    return GATE if bad else OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="posa", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def graph_opts(p):
        p.add_argument("--graph", help="edge-list file (header 'n m seed')")
        p.add_argument("--n", type=int)
        p.add_argument("--m", type=int)
        p.add_argument("--c", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--trial", type=int, default=0)
        p.add_argument("--support", default=">=3")
        p.add_argument("--out")

    p = sub.add_parser("constants", help="critical constants for a degree support")
    p.add_argument("--support", default=">=3", help="'>=3', '3,4', ...")
    p.add_argument("--n", type=int, nargs="*", help="also print thresholds at these n")
    p.add_argument("--out")
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("sample", help="sample one graph and print its edge list")
    graph_opts(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("posa", help="rotation closure and lemma checks for one graph")
    graph_opts(p)
    p.add_argument("--v0", default="greedy", help="greedy | lowest | random | vertex index")
    p.add_argument("--no-dedup", action="store_true")
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_posa)

    p = sub.add_parser("scan", help="search for small dense sets")
    graph_opts(p)
    p.add_argument("--k-max", type=int)
    p.add_argument("--density-samples", type=int, default=0)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("bounds", help="expected-number sweep")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--support", default=">=3")
    p.add_argument("--C", type=float, default=1.0, help="remainder multiplier")
    p.add_argument("--csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("mc", help="Monte Carlo experiment")
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--n-list", dest="n_list")
    p.add_argument("--c", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--v0-policy", dest="v0_policy")
    p.add_argument("--no-dedup", action="store_true")
    p.add_argument("--rotation-budget", dest="rotation_budget", type=int)
    p.add_argument("--k-max", dest="k_max", type=int)
    p.add_argument("--density-samples", dest="density_samples", type=int)
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--workers", type=int)
    p.add_argument("--pairing-retries", dest="pairing_retries", type=int)
    p.add_argument("--max-rejects", dest="max_rejects", type=int)
    p.add_argument("--support")
    p.add_argument("--timing", action="store_true", help="include elapsed_ms in the outputs")
    p.set_defaults(func=cmd_mc)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"posa {args.command}: {exc}", file=sys.stderr)
        return USAGE
    except (FileNotFoundError, KeyError) as exc:
        print(f"posa {args.command}: {exc}", file=sys.stderr)
        return USAGE
