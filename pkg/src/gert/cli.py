"""Command line entry point: ``gert {plan,simulate,probe,estimate,experiment}``."""

from __future__ import annotations

import argparse
import sys

from gert.aloha import ProbeConfig, SimSeed, fm_probe, run_rounds, simulate_frames
from gert.errors import DomainError, GertError, Infeasible
from gert.estimator import AccuracySpec, ChannelParams, estimate
from gert.harness import (
    GERT,
    WAEC,
    ExperimentSpec,
    all_saturated,
    emit_csv,
    emit_summary_csv,
    planning_bound,
    run_experiment,
)
from gert.planner import PLAN_CSV_COLUMNS, PlannerConfig, plan

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_SATURATED = 3


def _add_accuracy(p):
    p.add_argument("--alpha", type=float, default=0.95, help="required reliability (default 0.95)")
    p.add_argument("--beta", type=float, default=0.05, help="relative error bound (default 0.05)")


def _add_planner(p):
    p.add_argument("--r-step", type=float, default=0.01, help="load factor grid step")
    p.add_argument("--f-points", type=int, default=256, help="max frame-size grid points per r")
    p.add_argument("--gap", type=float, default=3.33, help="inter-frame gap l in slots")


def _planner_cfg(args) -> PlannerConfig:
    return PlannerConfig(r_grid_step=args.r_step, f_grid_max_points=args.f_points, inter_frame_gap_slots=args.gap)


def _add_probe(p):
    p.add_argument("--probe-slots", type=int, default=32)
    p.add_argument("--safety", type=float, default=1.0, help="probe safety multiplier")


def _probe_cfg(args) -> ProbeConfig:
    return ProbeConfig(probe_slots=args.probe_slots, safety_multiplier=args.safety)


def _t_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty population list")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gert", description="RFID tag population estimation (GERT)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="compute frame size, persistence and rounds for a population bound")
    p.add_argument("--tm", type=int, required=True, help="population upper bound t_m")
    _add_accuracy(p)
    _add_planner(p)
    p.add_argument("--waec", action="store_true", help="ignore the Gaussian approximation error")
    p.add_argument("--csv", metavar="PATH", help="also write the plan as a one-row CSV")

    p = sub.add_parser("simulate", help="simulate frames and print per-round counts")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--f", type=int, required=True)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--rounds", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trial", type=int, default=0)

    p = sub.add_parser("probe", help="run the population probe and print t_m")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--tm", type=int, help="bypass the probe and echo this bound")
    _add_probe(p)

    p = sub.add_parser("estimate", help="one live estimation: probe, plan, simulate, invert")
    p.add_argument("--t", type=int, required=True, help="true (simulated) population")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--tm", type=int, help="skip the probe and plan for this bound")
    p.add_argument("--waec", action="store_true")
    _add_accuracy(p)
    _add_planner(p)
    _add_probe(p)

    p = sub.add_parser("experiment", help="Monte Carlo reliability/cost experiment to CSV")
    _add_accuracy(p)
    p.add_argument("--t-list", type=_t_list, default=[400, 1200, 2400, 4800])
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="per-trial CSV path")
    p.add_argument("--summary-out", help="per-population summary CSV path")
    p.add_argument("--waec", action="store_true")
    p.add_argument("--tm", type=int, help="fixed population bound instead of probing")
    _add_planner(p)
    _add_probe(p)
    return parser


def cmd_plan(args, out) -> int:
    spec = AccuracySpec(args.alpha, args.beta)
    fp = plan(args.tm, spec, _planner_cfg(args), waec=args.waec)
    out.write(fp.to_kv())
    if args.csv:
        with open(args.csv, "w", newline="", encoding="ascii") as fh:
            fh.write(",".join(PLAN_CSV_COLUMNS) + "\n")
            fh.write(fp.csv_row())
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    ch = ChannelParams(f=args.f, p=args.p)
    frames = simulate_frames(args.t, ch, SimSeed(args.seed), args.trial, range(args.rounds))
    out.write("round,N0,Nn,z\n")
    for i, fr in enumerate(frames):
        out.write(f"{i},{fr.n_zero},{fr.n_nonempty},{fr.z:.10g}\n")
    return EXIT_OK


def cmd_probe(args, out) -> int:
    tm = args.tm if args.tm is not None else fm_probe(args.t, _probe_cfg(args), SimSeed(args.seed), args.trial)
    out.write(f"{tm}\n")
    return EXIT_OK


def cmd_estimate(args, out) -> int:
    spec = AccuracySpec(args.alpha, args.beta)
    seed = SimSeed(args.seed)
    t_m, probe_cost = planning_bound(args.t, spec, seed, args.trial, _probe_cfg(args), args.tm)
    fp = plan(t_m, spec, _planner_cfg(args), waec=args.waec)
    res = estimate(run_rounds(args.t, fp, seed, args.trial), fp.channel)
    out.write(fp.to_kv())
    out.write(f"z_bar={res.z_bar:.10g}\n")
    out.write(f"rounds_used={res.rounds_used}\n")
    out.write(f"saturated={'true' if res.saturated else 'false'}\n")
    if res.saturated:
        return EXIT_SATURATED
    out.write(f"t_hat={res.t_hat:.10g}\n")
    out.write(f"t_hat_rounded={res.t_hat_rounded}\n")
    out.write(f"slots={probe_cost + fp.cost:.10g}\n")
    return EXIT_OK


def cmd_experiment(args, out) -> int:
    xs = ExperimentSpec(
        t_values=tuple(args.t_list),
        spec=AccuracySpec(args.alpha, args.beta),
        trials=args.trials,
        seed=SimSeed(args.seed),
        mode=WAEC if args.waec else GERT,
        tm_override=args.tm,
        probe=_probe_cfg(args),
        planner=_planner_cfg(args),
    )
    records, summary = run_experiment(xs)
    emit_csv(records, args.out)
    if args.summary_out:
        emit_summary_csv(summary, args.summary_out)
    for row in summary:
        out.write(f"t={row.t} reliability={row.reliability:.4f} slots_mean={row.slots_mean:.2f} slots_std={row.slots_std:.2f}\n")
    return EXIT_SATURATED if all_saturated(records) else EXIT_OK


COMMANDS = {
    "plan": cmd_plan,
    "simulate": cmd_simulate,
    "probe": cmd_probe,
    "estimate": cmd_estimate,
    "experiment": cmd_experiment,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except Infeasible as exc:
        print(f"gert: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DomainError as exc:
        print(f"gert: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (GertError, OSError) as exc:
        print(f"gert: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
