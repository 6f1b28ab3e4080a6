"""Command line entry point: ``srmcts <command> [flags]``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .algorithms import ALGORITHMS, DEFAULT_ALPHA, get_algorithm
from .env import Environment, RewardStream, save_transcript
from .errors import MaxMinError
from .harness import (
    DEFAULT_TRIALS,
    NORMS,
    ExperimentConfig,
    cell_seed,
    h2_scaling,
    heatmap_csv,
    parse_instance_source,
    run_trials,
    scaling_csv,
    theorem1_bound,
)
from .instance import analyze, canonicalize, save_instance


def _floats(s: str) -> list:
    return [float(x) for x in s.split(",") if x.strip()]


def _ints(s: str) -> list:
    return [int(x) for x in s.split(",") if x.strip()]


def _strs(s: str) -> list:
    return [x.strip() for x in s.split(",") if x.strip()]


def _outdir(args) -> Path:
    d = Path(args.out or ".")
    d.mkdir(parents=True, exist_ok=True)
    return d


def _config(args, **over) -> ExperimentConfig:
    kw = dict(
        instance=args.instance,
        algorithms=args.algo,
        budgets=args.budgets,
        eps=args.eps,
        trials=args.trials,
        seed=args.seed,
        workers=args.workers,
        out=args.out,
        norm=args.norm,
        alpha=args.alpha,
    )
    kw.update(over)
    return ExperimentConfig(**kw)


def cmd_gen(args) -> None:
    inst = parse_instance_source(args.instance)
    if args.out:
        save_instance(inst, args.out)
    else:
        print(json.dumps(inst.to_dict()))


def cmd_run(args) -> None:
    inst = parse_instance_source(args.instance)
    if len(args.algo) != 1 or len(args.budgets) != 1:
        raise MaxMinError("run takes exactly one --algo and one --budgets value")
    T = args.budgets[0]
    env = Environment(inst, T, stream=RewardStream(inst, cell_seed(args.seed, T), args.trial))
    tr = get_algorithm(args.algo[0], args.alpha)(env)
    if args.out:
        save_transcript(tr, args.out)
    else:
        print(json.dumps(tr.to_dict()))


def _sweep(args, x: str) -> None:
    from .harness.plotting import plot_sweep

    cfg = _config(args)
    res = run_trials(cfg)
    out = _outdir(args)
    (out / "sweep.csv").write_text(res.to_csv())
    plot_sweep(res.cells, out / "sweep.svg", x=x)
    sys.stdout.write(res.to_csv())


def cmd_sweep_budget(args) -> None:
    _sweep(args, "budget")


def cmd_sweep_eps(args) -> None:
    _sweep(args, "eps")


def cmd_heatmap(args) -> None:
    from .harness.plotting import plot_heatmap

    cfg = _config(args)
    if len(cfg.algorithms) != 1 or len(cfg.budgets) != 1:
        raise MaxMinError("heatmap takes exactly one --algo and one --budgets value")
    res = run_trials(cfg)
    mat = res.mean_pulls[(cfg.algorithms[0], cfg.budgets[0])]
    out = _outdir(args)
    (out / "heatmap.csv").write_text(heatmap_csv(mat))
    plot_heatmap(mat, out / "heatmap.svg", f"{cfg.algorithms[0]}, T={cfg.budgets[0]}")
    print(f"wrote {out / 'heatmap.csv'}")


def cmd_h2check(args) -> None:
    from .harness.plotting import plot_scaling

    cfg = _config(args)
    if len(cfg.algorithms) != 1 or len(cfg.eps) != 1:
        raise MaxMinError("h2check takes exactly one --algo and one --eps value")
    res = run_trials(cfg)
    fit = h2_scaling(res, cfg.algorithms[0], cfg.eps[0], cfg.norm)
    out = _outdir(args)
    (out / "h2check.csv").write_text(scaling_csv(fit))
    plot_scaling(fit, out / "h2check.svg")
    for T in fit.dropped:
        print(f"notice: budget {T} has zero errors and is left out of the fit", file=sys.stderr)
    print(f"slope={fit.slope:.6g} intercept={fit.intercept:.6g} r2={fit.r2:.6f} points={len(fit.points)}")


def cmd_lb_verify(args) -> None:
    from .lowerbound import bh_floor, build_alt_family, kl_gaussian, lb_exponent

    inst = parse_instance_source(args.instance)
    canon, _ = canonicalize(inst)
    fam = build_alt_family(canon)
    K, L = canon.K, canon.L
    lines = [f"K: {K}", f"L: {L}", f"H: {fam.h:.10g}", f"H_lb: {fam.h_lb:.10g}"]
    for T in args.budgets:
        q, r = divmod(T, K * L)
        counts = [[q + (i * L + j < r) for j in range(L)] for i in range(K)]
        lines.append(f"budget: {T}")
        lines.append(f"  lb_exponent: {lb_exponent(canon, T):.10g}")
        for a in fam.alts:
            kl = sum(counts[x][y] * kl_gaussian(canon.means[x, y], a.instance.means[x, y])
                     for x in range(K) for y in range(L))
            i, j = a.leaf
            lines.append(
                f"  alt ({i},{j}): optimum={a.optimum} h_ratio={a.h_ratio:.6g} "
                f"min_gap_ratio={a.min_gap_ratio:.6g} uniform_kl={kl:.6g} bh_floor={bh_floor(kl):.6g}"
            )
    bad = fam.violations()
    lines.append(f"violations: {len(bad)}")
    for leaf, check in bad:
        lines.append(f"  ({leaf[0]},{leaf[1]}): {check}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)


def cmd_bound(args) -> None:
    inst = parse_instance_source(args.instance)
    print("budget,eps,h2,bound,capped")
    for T in args.budgets:
        for e in args.eps:
            h2 = analyze(inst, e)[3].h2
            b = theorem1_bound(inst, T, e)
            print(f"{T},{e:g},{h2:.10g},{b:.10g},{min(b, 1.0):.10g}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--instance", default="structured:10x10:0",
                        help="generator spec (structured:KxL:seed, random:KxL:seed, rho:0.5) or JSON file")
    common.add_argument("--algo", type=_strs, default=["sr-mcts"],
                        help=f"comma list from {', '.join(ALGORITHMS)}")
    common.add_argument("--budgets", type=_ints, default=[2000], help="comma list of budgets T")
    common.add_argument("--eps", type=_floats, default=[0.0], help="comma list of eps values")
    common.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    common.add_argument("--seed", type=int, default=0, help="master seed")
    common.add_argument("--alpha", type=float, default=DEFAULT_ALPHA, help="sar-compare split")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", default=None, help="output file (gen, run, lb-verify) or directory")
    common.add_argument("--norm", choices=NORMS, default="ln", help="log used in the scaling term")

    p = argparse.ArgumentParser(prog="srmcts", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn, help_ in [
        ("gen", cmd_gen, "write an instance file"),
        ("run", cmd_run, "run one trial and dump its transcript"),
        ("sweep-budget", cmd_sweep_budget, "error rates over a budget grid"),
        ("sweep-eps", cmd_sweep_eps, "eps-good error rates over an eps grid"),
        ("heatmap", cmd_heatmap, "mean pull counts per leaf"),
        ("h2check", cmd_h2check, "ln error rate against the H2 scaling term"),
        ("lb-verify", cmd_lb_verify, "alternative family and lower-bound report"),
        ("bound", cmd_bound, "closed-form error upper bound"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        if name == "run":
            sp.add_argument("--trial", type=int, default=0, help="trial index within the seed")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (MaxMinError, OSError) as exc:
        print(f"srmcts {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
