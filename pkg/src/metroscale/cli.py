"""Command-line driver: ``metroscale {sweep,single,bounds,digits,check}``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import checks, estimation, genspec, harness, protocols
from .errors import ConfigError, MetrologyError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of integers, got {text!r}") from None


def _str_list(text: str) -> list[str]:
    return [x for x in text.replace(",", " ").split() if x]


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="metroscale", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sweep", help="scan N for one or more strategies and fit scaling exponents")
    s.add_argument("--config", help="JSON config file; flags override its values")
    s.add_argument("--strategies", type=_str_list)
    s.add_argument("--N", dest="N_values", type=_int_list)
    s.add_argument("--nu", type=int)
    s.add_argument("--trials", type=int)
    s.add_argument("--phi", dest="phi_true", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--policy")
    s.add_argument("--path", dest="ghz_path")
    s.add_argument("--generator")
    s.add_argument("--output")
    s.add_argument("--format")
    s.add_argument("--workers", type=int, help="overrides METROSCALE_WORKERS")

    s = sub.add_parser("single", help="run one protocol and print the estimation result")
    s.add_argument("--protocol", required=True)
    s.add_argument("--N", type=int, default=1)
    s.add_argument("--nu", type=int, default=10_000)
    s.add_argument("--phi", type=float, help="true phase (default: quadrature for the protocol)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--policy", default="max-slope")
    s.add_argument("--path", default="auto")
    s.add_argument("--generator", default="qubit-z")

    s = sub.add_parser("bounds", help="tabulate the closed-form precision bounds")
    s.add_argument("--N", type=_int_list, required=True)
    s.add_argument("--nu", type=int, default=1)
    s.add_argument("--gap", type=float, default=1.0)

    s = sub.add_parser("digits", help="digit-by-digit recovery of phi*gap/(2 pi)")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--phi", type=float)
    g.add_argument("--fraction", type=float, help="target phi*gap/(2 pi) directly")
    s.add_argument("--base", type=int, default=10)
    s.add_argument("--digits", type=int, default=2)
    s.add_argument("--nu", type=int, default=400)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trials", type=int, default=1)
    s.add_argument("--engine", default="sequential")
    s.add_argument("--path", default="auto")
    s.add_argument("--generator", default="qubit-z")

    sub.add_parser("check", help="run the invariant suite")
    return p


def _cmd_bounds(args, out) -> int:
    if args.nu < 1 or args.gap <= 0 or any(n < 1 for n in args.N):
        raise ConfigError("need N >= 1, nu >= 1 and gap > 0")
    print(f"{'N':>8} {'nu':>8} {'gap':>8} {'cc_cq':>14} {'qc_qq':>14} {'sequential':>14}", file=out)
    for n in args.N:
        row = [estimation.bound_cc(n, args.nu, args.gap), estimation.bound_qc(n, args.nu, args.gap),
               estimation.bound_sequential(n, args.nu, args.gap)]
        print(f"{n:>8} {args.nu:>8} {args.gap:>8.6g} " + " ".join(f"{x:>14.6g}" for x in row), file=out)
    return 0


def _cmd_single(args, out) -> int:
    g = genspec.preset(args.generator)
    proto = protocols.Protocol.parse(args.protocol)
    if proto == protocols.Protocol.DIGIT_BY_DIGIT:
        raise ConfigError("use the digits subcommand for digit-by-digit runs")
    phi = args.phi if args.phi is not None else protocols.quadrature_phase(g, proto, args.N)
    cfg = protocols.StrategyConfig(
        proto, g, n=args.N, nu=args.nu, phi_true=phi, seed=args.seed,
        policy=args.policy, trials=args.trials, ghz_path=args.path,
    )
    r = protocols.run(cfg)
    print(json.dumps(r.summary(), indent=2), file=out)
    return 0


def _cmd_digits(args, out) -> int:
    g = genspec.preset(args.generator)
    phi = args.phi if args.phi is not None else 2 * math.pi * args.fraction / g.gap
    cfg = protocols.StrategyConfig(
        protocols.Protocol.DIGIT_BY_DIGIT, g, nu=args.nu, phi_true=phi, seed=args.seed,
        trials=args.trials, digit_base=args.base, digit_count=args.digits,
        digit_engine=args.engine, ghz_path=args.path,
    )
    r = protocols.run_digit_by_digit(cfg)
    b, l = args.base, args.digits
    print(f"target fraction phi*gap/(2 pi) = {r.fraction_true:.12g}", file=out)
    print(f"estimate (trial 0)             = {r.fractions[0]:.12g}", file=out)
    print(f"digits (base {b})                = {' '.join(map(str, r.assembled_digits))}", file=out)
    print(f"{'j':>3} {'U uses/rep':>11} {'probes':>7} {'U uses':>10} {'digit':>6} {'true':>5} {'hit rate':>9} {'min log10 LR':>13}", file=out)
    for d in r.digits:
        print(
            f"{d.index:>3} {d.n_uses:>11} {d.probes:>7} {d.u_phi_applications:>10} {d.digit:>6} "
            f"{d.true_digit:>5} {d.success_rate:>9.3f} {d.min_log10_likelihood_ratio:>13.4g}",
            file=out,
        )
    print(f"probes per batch, digits 0..{l - 1}: {r.probes_per_batch}", file=out)
    print(f"probes through digit index {l} ((b^(l+1)-1)/(b-1)): {r.probes_through_last_index}", file=out)
    print(f"total U_phi applications: {r.estimation.u_phi_applications}", file=out)
    print(f"success rate (|error| <= b^-l/2): {r.success_rate:.3f} over {cfg.trials} trial(s); "
          f"ambiguous: {r.ambiguous_trials}", file=out)
    return 0


def _cmd_sweep(args, out) -> int:
    overrides = {k: getattr(args, k) for k in (
        "strategies", "N_values", "nu", "trials", "phi_true", "seed", "policy",
        "ghz_path", "generator", "output", "format")}
    cfg = harness.make_sweep_config(args.config, **overrides)
    report = harness.run_sweep(cfg, workers=args.workers)
    if cfg.output is not None:
        paths = harness.emit_report(report, cfg.fmt, cfg.output)
        print(harness.summary_text(report, timestamp=False), end="", file=out)
        print("wrote " + ", ".join(str(p) for p in paths), file=out)
    else:
        text = harness.report_to_csv(report) if cfg.fmt == "csv" else harness.report_to_json(report)
        print(text, end="", file=out)
    return 2 if report.partial else 0


def _cmd_check(args, out) -> int:
    results = checks.run_checks()
    for r in results:
        print(f"[{'PASS' if r.ok else 'FAIL'}] {r.name}: {r.detail} ({r.seconds:.1f}s)", file=out)
    return 0 if all(r.ok for r in results) else 2


COMMANDS = {
    "bounds": _cmd_bounds,
    "single": _cmd_single,
    "digits": _cmd_digits,
    "sweep": _cmd_sweep,
    "check": _cmd_check,
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except ConfigError as exc:
        print(f"metroscale: config error: {exc}", file=sys.stderr)
        return 1
    except MetrologyError as exc:
        print(f"metroscale: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
