"""Command line entry point: ``catshield <command> [options]``.

Squeezing and asymmetry rates are read in dB unless ``--nats`` is given.
Exit codes: 0 success, 2 usage error, 3 sweep with no feasible point,
4 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channel import CompositeSpec, LossyStage, classicality_check, composite_channel, effective_single, lossy_channel
from .core import CatState, db_to_nats, nats_to_db, wigner_transformed
from .distance import hs_distance
from .negativity import central_negativity, feasible_region, feasible_v, negativity_margin, negativity_possible
from .optimize import NonConvergenceError, optimize_composite, optimize_presqueeze_cn, optimize_presqueeze_hs
from .sweep import SCENARIOS, SweepConfig, columns_for, format_csv, format_json, scenario_config, sweep_rows

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _rate(args, value: float) -> float:
    return value if args.nats else db_to_nats(value)


def _state(args) -> CatState:
    return CatState(args.x0, args.p0, args.parity)


def _first_stage(args) -> LossyStage:
    return LossyStage(args.eta, _rate(args, args.gamma), args.v, _rate(args, args.gamma_t))


def _second_stage(args) -> LossyStage | None:
    if args.eta2 is None:
        return None
    return LossyStage(args.eta2, _rate(args, args.gamma2), args.v2, _rate(args, args.gamma_t2))


def _channel(args):
    stages = [_first_stage(args)]
    second = _second_stage(args)
    if second is not None:
        stages.append(second)
    return composite_channel(CompositeSpec(stages))


def _channel_record(ch) -> dict:
    return {"f_x": ch.f_x, "f_p": ch.f_p, "sigma_x": ch.sigma_x, "sigma_p": ch.sigma_p, "v_x": ch.v_x, "v_p": ch.v_p}


def cmd_wigner(args) -> dict:
    ch = _channel(args)
    return {"x": args.x, "p": args.p, "wigner": wigner_transformed(_state(args), ch, args.x, args.p), "channel": _channel_record(ch)}


def cmd_cn(args) -> dict:
    ch = _channel(args)
    state = CatState(args.x0, args.p0, "odd")
    return {"cn": central_negativity(state, ch), "negativity_possible": negativity_possible(ch)}


def cmd_condition(args) -> dict:
    ch = _channel(args)
    record = {"margin": negativity_margin(ch), "negativity_possible": negativity_possible(ch)}
    stage = _first_stage(args)
    report = classicality_check(stage.v, stage.gamma_t)
    record.update(environment_classical=report.classical, classical_threshold_nats=report.threshold)
    return record


def cmd_feasible(args) -> dict:
    record = {}
    if args.v is not None:
        region = feasible_region(args.v)
        record.update(eta_min=region.eta_min, eta_max=region.eta_max)
    if args.eta is not None:
        record["v_max"] = feasible_v(args.eta)
    if not record:
        raise UsageError("feasible needs --v and/or --eta")
    return record


def cmd_hs(args) -> dict:
    return hs_distance((args.x0, args.p0), _channel(args)).as_dict()


def cmd_effective(args) -> dict:
    first = LossyStage(args.eta, 0.0, args.v, _rate(args, args.gamma_t))
    second = LossyStage(args.eta2, 0.0, args.v2, _rate(args, args.gamma_t2))
    spec = CompositeSpec([first, second])
    eff = effective_single(spec)
    return {"eta_e": eff.eta_e, "v_e": eff.v_e, "mid_squeeze_nats": second.gamma_t - first.gamma_t}


def cmd_optimize(args) -> dict:
    gamma_t = _rate(args, args.gamma_t)
    if args.objective == "hs":
        result = optimize_presqueeze_hs((args.x0, args.p0), args.eta, args.v)
        record = result.as_dict()
        record["gamma_opt"] = result.gamma_opt + gamma_t
    else:
        state = CatState(args.x0, args.p0, "odd")
        if args.eta2 is None:
            result = optimize_presqueeze_cn(state, args.eta, args.v, gamma_t)
        else:
            spec = CompositeSpec(
                [LossyStage(args.eta, 0.0, args.v, gamma_t), LossyStage(args.eta2, 0.0, args.v2, _rate(args, args.gamma_t2))]
            )
            result = optimize_composite(state, spec)
        record = result.as_dict()
    record["gamma_opt_db"] = nats_to_db(record["gamma_opt"])
    if record.get("gamma_mid_opt") is not None:
        record["gamma_mid_opt_db"] = nats_to_db(record["gamma_mid_opt"])
    record["bracket"] = list(record["bracket"])
    return record


def _sweep_config(args) -> SweepConfig:
    if args.config:
        config = SweepConfig.from_json(Path(args.config).read_text())
        if args.out:
            config.output_path = args.out
        return config
    overrides = dict(
        x0=args.state_x0,
        p0=args.state_p0,
        parity=args.parity,
        objective=args.objective,
        output_path=args.out,
        format=args.format,
        oracle_check=args.oracle_check or None,
    )
    if args.eta_from is not None or args.eta_to is not None or args.eta_steps is not None:
        base = SCENARIOS.get(args.scenario, {}).get("eta_grid") or SweepConfig().eta_grid
        lo = base[0] if args.eta_from is None else args.eta_from
        hi = base[-1] if args.eta_to is None else args.eta_to
        steps = len(base) if args.eta_steps is None else args.eta_steps
        if steps < 1:
            raise UsageError("--eta-steps must be positive")
        overrides["eta_grid"] = [round(float(e), 12) for e in np.linspace(lo, hi, steps)]
    if args.v:
        overrides["v_values"] = args.v
    if args.gamma_t_db:
        overrides["gamma_t_db"] = args.gamma_t_db
    if args.v2 is not None or args.gamma_t2_db is not None:
        overrides["second_stage"] = {"v": 2.0 if args.v2 is None else args.v2, "gamma_t_db": args.gamma_t2_db or 0.0}
    if args.scenario == "custom":
        overrides = {k: v for k, v in overrides.items() if v is not None}
    return scenario_config(args.scenario, **overrides)


def cmd_sweep(args) -> int:
    config = _sweep_config(args)
    if args.dump_config:
        sys.stdout.write(config.to_json() + "\n")
        return EXIT_OK
    rows = sweep_rows(config)
    columns = columns_for(config)
    text = format_csv(rows, columns) if config.format == "csv" else format_json(rows, columns, config)
    feasible = sum(1 for r in rows if r["feasible"])
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(f"{config.scenario}: {len(rows)} rows, {feasible} feasible -> {config.output_path}")
    else:
        sys.stdout.write(text)
        print(f"{config.scenario}: {len(rows)} rows, {feasible} feasible", file=sys.stderr)
    return EXIT_OK if feasible else EXIT_INFEASIBLE


def _add_rates(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--nats", action="store_true", help="read squeezing rates in nats instead of dB")


def _add_channel(parser: argparse.ArgumentParser, required_eta: bool = True) -> None:
    parser.add_argument("--eta", type=float, required=required_eta, help="transmittance of the (first) loss")
    parser.add_argument("--v", type=float, default=0.5, help="thermal variance (0.5 = vacuum)")
    parser.add_argument("--gamma", type=float, default=0.0, help="pre-squeezing rate")
    parser.add_argument("--gamma-t", type=float, default=0.0, help="environment asymmetry rate")
    parser.add_argument("--eta2", type=float, help="transmittance of an optional second loss")
    parser.add_argument("--v2", type=float, default=0.5)
    parser.add_argument("--gamma2", type=float, default=0.0, help="mid-squeezing rate")
    parser.add_argument("--gamma-t2", type=float, default=0.0)
    _add_rates(parser)


def _add_amplitude(parser: argparse.ArgumentParser, parity: bool = False) -> None:
    parser.add_argument("--x0", type=float, default=3.0)
    parser.add_argument("--p0", type=float, default=0.0)
    if parity:
        parser.add_argument("--parity", choices=["even", "odd"], default="odd")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catshield", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wigner", help="transmitted Wigner function at a point")
    _add_channel(p, required_eta=False)
    _add_amplitude(p, parity=True)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--p", type=float, default=0.0)
    p.set_defaults(func=cmd_wigner, eta=1.0)

    p = sub.add_parser("cn", help="central negativity of an odd cat")
    _add_channel(p)
    _add_amplitude(p)
    p.set_defaults(func=cmd_cn)

    p = sub.add_parser("condition", help="channel condition for surviving negativity")
    _add_channel(p)
    p.set_defaults(func=cmd_condition)

    p = sub.add_parser("feasible", help="transmittance/variance region keeping negativity")
    p.add_argument("--v", type=float)
    p.add_argument("--eta", type=float)
    p.set_defaults(func=cmd_feasible)

    p = sub.add_parser("hs", help="Hilbert-Schmidt distance breakdown")
    _add_channel(p)
    _add_amplitude(p)
    p.set_defaults(func=cmd_hs)

    p = sub.add_parser("effective", help="single loss equivalent to a two-stage chain")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--eta2", type=float, required=True)
    p.add_argument("--v", type=float, default=0.5)
    p.add_argument("--v2", type=float, default=0.5)
    p.add_argument("--gamma-t", type=float, default=0.0)
    p.add_argument("--gamma-t2", type=float, default=0.0)
    _add_rates(p)
    p.set_defaults(func=cmd_effective)

    p = sub.add_parser("optimize", help="optimal pre- (and mid-) squeezing at one channel")
    p.add_argument("--objective", choices=["cn", "hs"], default="cn")
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--v", type=float, default=0.5)
    p.add_argument("--gamma-t", type=float, default=0.0)
    p.add_argument("--eta2", type=float)
    p.add_argument("--v2", type=float, default=0.5)
    p.add_argument("--gamma-t2", type=float, default=0.0)
    _add_amplitude(p)
    _add_rates(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="parameter sweep to CSV or JSON")
    p.add_argument("--scenario", choices=sorted(SCENARIOS) + ["custom"], default="custom")
    p.add_argument("--config", help="JSON sweep configuration (overrides scenario flags)")
    p.add_argument("--eta-from", type=float)
    p.add_argument("--eta-to", type=float)
    p.add_argument("--eta-steps", type=int)
    p.add_argument("--v", type=float, nargs="+", help="thermal variance(s)")
    p.add_argument("--gamma-t-db", type=float, nargs="+", help="environment asymmetry rate(s) in dB")
    p.add_argument("--v2", type=float, help="second-stage variance (enables a two-stage chain)")
    p.add_argument("--gamma-t2-db", type=float, help="second-stage asymmetry in dB")
    p.add_argument("--state-x0", type=float)
    p.add_argument("--state-p0", type=float)
    p.add_argument("--parity", choices=["even", "odd"])
    p.add_argument("--objective", choices=["cn", "hs"])
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--oracle-check", action="store_true", help="append quadrature cross-check columns")
    p.add_argument("--dump-config", action="store_true", help="print the resolved JSON config and exit")
    p.set_defaults(func=cmd_sweep)
    return parser


def _check_finite(record) -> None:
    for key, value in record.items():
        if isinstance(value, float) and math.isnan(value):
            raise FloatingPointError(f"{key} evaluated to NaN")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        outcome = args.func(args)
        if isinstance(outcome, int):
            return outcome
        _check_finite(outcome)
    except (UsageError, ValueError, OSError) as exc:
        print(f"catshield {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NonConvergenceError, FloatingPointError, OverflowError) as exc:
        print(f"catshield {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(json.dumps(outcome, indent=2))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
