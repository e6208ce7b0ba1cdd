"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or validation error.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from . import __version__, kernels
from .allocation import ALL_REGIMES, InfeasibleLinkError, Regime, certify
from .covertness import CovertBudget
from .experiment import AXES, COUNT_AXES, SweepSpec, default_jobs, fmt, run_sweep, write_csv
from .routing import NoRouteError, direct_link, route_all
from .scenario import ScenarioError, generate_random, load, save
from .verify import run_verify

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def parse_values(text: str, integer: bool = False) -> list:
    """``a,b,c`` or ``start:stop:count`` (inclusive, evenly spaced)."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise UsageError(f"range must be start:stop:count, got {text!r}")
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise UsageError("range count must be >= 1")
            vals = list(np.linspace(start, stop, count))
        else:
            vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse values {text!r}: {exc}") from None
    if integer:
        if any(v != round(v) for v in vals):
            raise UsageError(f"values must be integers, got {text!r}")
        return [int(round(v)) for v in vals]
    return [float(v) for v in vals]


def parse_regimes(text: str) -> tuple[Regime, ...]:
    if text.strip().lower() == "all":
        return ALL_REGIMES
    try:
        return tuple(Regime(v.strip().lower()) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(
            f"unknown regime in {text!r}; choose from {', '.join(r.value for r in ALL_REGIMES)} or all"
        ) from None


# -- subcommands ------------------------------------------------------------


def cmd_gen(args) -> int:
    scenario = generate_random(
        args.seed, args.nodes, args.wardens, args.dim, args.alpha,
        args.node_noise, args.warden_noise,
    )
    save(scenario, args.out)
    print(args.out)
    return EXIT_OK


def _plan_lines(res, delta, n):
    plan = res.plan
    hops = res.path.hop_count
    lines = [f"[{res.regime}] path {res.path} ({hops} hop{'s' if hops != 1 else ''})"
             f"  cost {fmt(res.path_cost)}"]
    if plan.unconstrained:
        lines.append("  rate unconstrained (no warden exposure)")
    else:
        rate = f"{fmt(plan.rate_coeff)}/√n"
        delay = f"{fmt(plan.delay_total)}·√n"
        if res.regime.max_throughput:
            lines.append(f"  rate {rate}  delay {delay}")
        else:
            lines.append(f"  delay {delay}  bottleneck rate {rate}")
    for (a, b), p, c in zip(res.path.links, plan.power_coeffs, plan.link_rate_coeffs):
        lines.append(f"  link {a}->{b}  power {fmt(p)}/√n  rate {fmt(c)}/√n")
    if n is not None:
        cert = certify(plan, delta, n)
        verdict = "PASS" if cert.passed else "FAIL"
        lines.append(
            f"  certificate n={n}: D_exact={fmt(cert.kl_exact)} bound={fmt(cert.kl_bound)}"
            f"  D_exact ≤ δ={delta:g}: {verdict}"
        )
    return lines


SNAPSHOT_HEADER = ["regime", "path", "hops", "path_cost", "rate_coeff", "delay_coeff",
                   "direct_rate_coeff", "direct_delay_coeff", "n", "kl_exact", "certified"]


def cmd_snapshot(args) -> int:
    scenario = load(args.scenario)
    budget = CovertBudget(args.delta)
    regimes = parse_regimes(args.regime)
    results = route_all(scenario, budget, regimes)
    rows = []
    failed = False
    print(f"scenario {args.scenario}: {scenario.n_nodes} nodes, {len(scenario.wardens)} wardens,"
          f" alpha={scenario.alpha:g}, delta={args.delta:g}")
    for regime in regimes:
        res = results[regime]
        for line in _plan_lines(res, args.delta, args.n):
            print(line)
        base = direct_link(scenario, budget, regime)
        print(f"  direct link: rate {fmt(base.rate_coeff)}/√n  delay {fmt(base.delay_coeff)}·√n")
        cert = certify(res.plan, args.delta, args.n) if args.n is not None else None
        if cert is not None and not cert.passed:
            failed = True
        rows.append([
            regime.value, str(res.path), res.path.hop_count, fmt(res.path_cost),
            fmt(res.rate_coeff), fmt(res.delay_coeff), fmt(base.rate_coeff),
            fmt(base.delay_coeff), fmt(args.n), fmt(cert.kl_exact) if cert else "",
            ("PASS" if cert.passed else "FAIL") if cert else "",
        ])
    if args.out:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(SNAPSHOT_HEADER)
        writer.writerows(rows)
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    return EXIT_FAIL if failed else EXIT_OK


def cmd_sweep(args) -> int:
    values = parse_values(args.values, integer=args.axis in COUNT_AXES)
    spec = SweepSpec(
        axis=args.axis, values=tuple(values), trials=args.trials, base_seed=args.seed,
        regimes=parse_regimes(args.regimes), delta=args.delta, n_nodes=args.nodes,
        n_wardens=args.wardens, alpha=args.alpha, dimension=args.dim,
        node_noise=args.node_noise, warden_noise=args.warden_noise,
        nested=not args.independent,
    )
    result = run_sweep(spec, jobs=args.jobs)
    raw, summary = write_csv(result, args.out)
    print(raw)
    print(summary)
    if result.failures:
        print(f"{result.failures} trial(s) had no route", file=sys.stderr)
    return EXIT_OK


def cmd_verify(args) -> int:
    reports = run_verify(args.seed, args.cases, args.size_cap, fault=args.inject_fault)
    ok = all(r.passed for r in reports)
    for r in reports:
        print(f"{r.name}: {r.cases} cases, {len(r.failures)} failed: {'PASS' if r.passed else 'FAIL'}")
        for msg in r.failures:
            print(f"  {msg}")
    print(f"{len(reports)} suites, {args.cases} cases each: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAIL


# -- parser -------------------------------------------------------------------


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _non_negative_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _add_placement(p, nodes=30, wardens=30):
    p.add_argument("--nodes", type=_non_negative_int, default=nodes, help="relay count")
    p.add_argument("--wardens", type=_non_negative_int, default=wardens, help="warden count")
    p.add_argument("--dim", type=float, default=100.0, help="side of the square area (m)")
    p.add_argument("--alpha", type=float, default=3.0, help="path-loss exponent (>= 2)")
    p.add_argument("--node-noise", type=float, default=1.0, help="relay noise variance")
    p.add_argument("--warden-noise", type=float, default=1.0, help="warden noise variance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covert-route",
        description="Covert multi-hop routing: warden-exposure link costs, optimal paths and powers.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} ({kernels.BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random scenario file")
    p.add_argument("--seed", type=_non_negative_int, required=True)
    _add_placement(p)
    p.add_argument("--out", required=True, help="scenario JSON path")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("snapshot", help="route one scenario and print paths and plans")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--delta", type=float, required=True, help="relative-entropy budget")
    p.add_argument("--regime", default="all",
                   help="mt-sk, md-sk, mt-ik, md-ik, a comma list, or all")
    p.add_argument("--n", type=_positive_int, default=None,
                   help="blocklength for the exact relative-entropy certificate")
    p.add_argument("--out", default=None, help="optional CSV output")
    p.set_defaults(func=cmd_snapshot)

    p = sub.add_parser("sweep", help="Monte Carlo sweep over one parameter")
    p.add_argument("--axis", choices=AXES, required=True)
    p.add_argument("--values", required=True, help="a,b,c or start:stop:count")
    p.add_argument("--trials", type=_positive_int, default=100)
    p.add_argument("--seed", type=_non_negative_int, default=0, help="base seed")
    p.add_argument("--regimes", default="all")
    p.add_argument("--delta", type=float, default=0.05)
    _add_placement(p)
    p.add_argument("--independent", action="store_true",
                   help="independent placements per count value instead of nested sets")
    p.add_argument("--jobs", type=_positive_int, default=None,
                   help="worker processes (default: $COVERT_ROUTE_JOBS or 1)")
    p.add_argument("--out", required=True, help="raw CSV path; summary goes to *.summary.csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the randomized oracle suites")
    p.add_argument("--seed", type=_non_negative_int, default=0)
    p.add_argument("--size-cap", type=int, default=8, help="max total nodes (<= 12)")
    p.add_argument("--cases", type=_positive_int, default=50)
    p.add_argument("--inject-fault", type=float, default=0.0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "jobs", 0) is None:
            args.jobs = default_jobs()
        if args.command == "verify" and not 2 <= args.size_cap <= 12:
            raise UsageError("--size-cap must be between 2 and 12")
        return args.func(args)
    except (UsageError, ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoRouteError, InfeasibleLinkError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
