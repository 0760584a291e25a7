"""Command-line entry point: ``dyncc <command> --config scenario.json``."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .cc_elevation import format_schedule, make_serving_plan, run_cc_step
from .dof_analytics import optimize_eta_hat, verify_against_schedule
from .errors import DynCCError
from .experiments import (
    DYNAMICS_COLUMNS,
    SWEEP_ETA_COLUMNS,
    SWEEP_SIGMA_COLUMNS,
    ScenarioConfig,
    format_cell,
    simulate_dynamics,
    sweep_eta,
    sweep_sigma,
    write_csv,
)
from .system_model import NetworkSnapshot, SystemParams
from .uc_scheduler import format_uc_schedule, run_uc_step
from .virtual_scheduler import generate_index_sets

COMMANDS = ("schedule", "dof", "sweep-eta", "sweep-sigma", "dynamics", "selftest")


def _chosen_eta(config: ScenarioConfig, lengths) -> int:
    if config.eta_hat == "sweep":
        return optimize_eta_hat(lengths, config.params).eta_star
    return config.eta_hat


def _text_table(rows, columns) -> str:
    cells = [list(columns)] + [[format_cell(r[c]) for c in columns] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(columns))]
    return "".join(
        "  ".join(v.rjust(w) for v, w in zip(row, widths)).rstrip() + "\n" for row in cells
    )


def _render(rows, columns, fmt) -> str:
    return write_csv(rows, columns) if fmt == "csv" else _text_table(rows, columns)


def cmd_schedule(config: ScenarioConfig, fmt: str) -> str:
    snapshot = config.snapshot()
    eta_hat = _chosen_eta(config, snapshot.lengths)
    params = config.params
    out = []
    if eta_hat > 0:
        cc = run_cc_step(snapshot, eta_hat, params, selection=config.selection)
        plan, cc_txs = cc.plan, cc.schedule
    else:
        plan, cc_txs = make_serving_plan(snapshot, 0, config.selection), []
    uc = run_uc_step(plan, params)
    if fmt == "text":
        out.append(format_schedule(cc_txs))
        out.append(format_uc_schedule(uc.schedule))
        return "".join(out)
    rows = []
    for tx in cc_txs:
        for s in tx.streams:
            rows.append({"step": "CC", "r": tx.round + 1, "j": tx.index + 1, "delta": tx.delta + 1,
                         "target": s.target, "packet": s.packet + 1,
                         "subpacket": s.subpacket + 1,
                         "suppression": tuple(sorted(s.suppression))})
    for n, tx in enumerate(uc.schedule, 1):
        for s in tx.streams:
            rows.append({"step": "UC", "r": None, "j": None, "delta": n, "target": s.user,
                         "packet": s.packet + 1, "subpacket": s.subpacket + 1,
                         "suppression": ()})
    columns = ("step", "r", "j", "delta", "target", "packet", "subpacket", "suppression")
    return write_csv(rows, columns)


def cmd_dof(config: ScenarioConfig, fmt: str) -> str:
    snapshot = config.snapshot()
    eta_hat = _chosen_eta(config, snapshot.lengths)
    report = verify_against_schedule(snapshot, eta_hat, config.params, selection=config.selection)
    if fmt == "text":
        return report.render()
    row = {k: getattr(report, k) for k in
           ("eta_hat", "K_M", "K_U", "J_M", "T_M", "J_U", "T_U", "dof_counted",
            "dof_closed_form", "verified")}
    return write_csv([row], tuple(row))


def cmd_sweep_eta(config: ScenarioConfig, fmt: str) -> str:
    lengths = config.distributions()[0].lengths
    return _render(sweep_eta(lengths, config.params, verify=config.verify), SWEEP_ETA_COLUMNS, fmt)


def cmd_sweep_sigma(config: ScenarioConfig, fmt: str) -> str:
    rows = sweep_sigma(config.distributions(), config.params)
    return _render(rows, SWEEP_SIGMA_COLUMNS, fmt)


def cmd_dynamics(config: ScenarioConfig, fmt: str) -> str:
    fixed = config.eta_hat if config.eta_policy == "fixed" else None
    rows = simulate_dynamics(config.snapshot(), config.churn_trace(), config.params,
                             eta_policy=config.eta_policy, eta_hat=fixed,
                             join_policy=config.join_policy, seed=config.seed,
                             verify=config.verify)
    return _render(rows, DYNAMICS_COLUMNS, fmt)


def selftest() -> tuple[bool, str]:
    """Golden checks on the three-profile worked example."""
    params = SystemParams(alpha=4, P=3, t_bar=1)
    snapshot = NetworkSnapshot.from_groups([[1, 2], [3, 4, 5], [6, 7, 8]])
    checks = []

    first = generate_index_sets(params, 2)[0].members
    checks.append(("first index set is (1,2,3)", tuple(m + 1 for m in first) == (1, 2, 3)))

    cc3 = run_cc_step(snapshot, 3, params)
    tx = cc3.schedule[0]
    supp = sorted(sorted(s.suppression) for s in tx.streams)
    checks.append(("eta_hat=3 first vector: 7 raw / 6 real streams",
                   (len(tx.raw_streams), len(tx.streams)) == (7, 6)))
    checks.append(("eta_hat=3 suppression sets",
                   supp == sorted(sorted(s) for s in
                                  [{6, 2}, {6, 1}, {6, 4, 5}, {6, 3, 5}, {6, 3, 4}, {3, 4, 5}])))

    cc2 = run_cc_step(snapshot, 2, params)
    targets = sorted(s.target for s in cc2.schedule[0].streams)
    checks.append(("eta_hat=2 first vector targets {1,2,3,4,6,7}", targets == [1, 2, 3, 4, 6, 7]))
    uc2 = run_uc_step(cc2.plan, params)
    checks.append(("eta_hat=2 unicast: 12 transmissions of 2 streams",
                   uc2.T_U == 12 and all(len(t.streams) == 2 for t in uc2.schedule)))

    r2 = verify_against_schedule(snapshot, 2, params)
    r3 = verify_against_schedule(snapshot, 3, params)
    checks.append(("DoF(eta_hat=2) = 4", r2.dof_counted == 4 and r2.verified))
    checks.append(("DoF(eta_hat=3) = 56/9", r3.dof_counted == Fraction(56, 9) and r3.verified))

    lines = [f"{'PASS' if ok else 'FAIL'}  {name}" for name, ok in checks]
    return all(ok for _, ok in checks), "\n".join(lines) + "\n"


HANDLERS = {
    "schedule": cmd_schedule,
    "dof": cmd_dof,
    "sweep-eta": cmd_sweep_eta,
    "sweep-sigma": cmd_sweep_sigma,
    "dynamics": cmd_dynamics,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dyncc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON scenario file", required=name != "selftest")
        p.add_argument("--seed", type=int, help="overrides the config seed")
        p.add_argument("--out", help="write output here instead of stdout")
        default = "text" if name in ("schedule", "dof", "selftest") else "csv"
        p.add_argument("--format", choices=("csv", "text"), default=default)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            ok, text = selftest()
            status = 0 if ok else 1
        else:
            with open(args.config, encoding="utf-8") as fh:
                config = ScenarioConfig.from_json(fh.read())
            if args.seed is not None:
                config.seed = args.seed
            text = HANDLERS[args.command](config, args.format)
            status = 0
    except (DynCCError, OSError, ValueError, KeyError) as exc:
        print(f"dyncc: error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
