"""Command-line front end: design, simulate, sweep, identify, scenarios.

Exit codes: 0 success, 2 configuration or parse error, 3 numerical failure.
The default output directory is `./out`, overridable with --out or the
ETCONTROL_OUT_DIR environment variable.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import linalg
from .design import (
    NotObservableError,
    build_trigger_design,
    check_controllability,
    check_observability,
    design_gains,
)
from .linalg import NotStabilizableError, NumericsError
from .scenarios import ScenarioError, bundled_names, get_scenario, save_scenario
from .simulate import POLICIES, DivergedError, SimTrace, metrics, simulate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
OUT_DIR_ENV = "ETCONTROL_OUT_DIR"


def _out_dir(args):
    out = args.out or os.environ.get(OUT_DIR_ENV) or "out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _fmt_matrix(name, M):
    rows = "\n".join("    [" + ", ".join(f"{v: .6g}" for v in row) + "]" for row in np.atleast_2d(M))
    return f"{name} =\n{rows}"


def write_trace_csv(path, trace: SimTrace):
    """Header: t,x1..xn,xh1..xhn,u1..um,normX,quadform,event."""
    n = trace.x.shape[1]
    m = trace.u.shape[1]
    header = (
        ["t"]
        + [f"x{i + 1}" for i in range(n)]
        + [f"xh{i + 1}" for i in range(n)]
        + [f"u{i + 1}" for i in range(m)]
        + ["normX", "quadform", "event"]
    )
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k in range(trace.t.size):
            w.writerow(
                [f"{trace.t[k]:.10g}"]
                + [f"{v:.10g}" for v in trace.x[k]]
                + [f"{v:.10g}" for v in trace.xhat[k]]
                + [f"{v:.10g}" for v in trace.u[k]]
                + [f"{trace.norm_X[k]:.10g}", f"{trace.quad[k]:.10g}", int(trace.event[k])]
            )


def write_events_csv(path, trace: SimTrace):
    """Header: k,t_k,interval (interval empty for the first packet)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "t_k", "interval"])
        prev = None
        for k, t_k in enumerate(trace.events.times):
            w.writerow([k, f"{t_k:.10g}", "" if prev is None else f"{t_k - prev:.10g}"])
            prev = t_k


def _effective_config(scenario):
    cfg = scenario.config
    return {
        "scenario": scenario.name,
        "sigma": scenario.sigma,
        "epsilon": scenario.epsilon,
        "policy": cfg.policy,
        "delay": cfg.delay,
        "step": cfg.step,
        "horizon": cfg.horizon,
        "x0": cfg.x0.tolist(),
        "xhat0": cfg.xhat0.tolist(),
    }


def write_metrics(path_json, path_txt, report, scenario):
    doc = {
        "config": _effective_config(scenario),
        "metrics": {
            "n_s": report.n_s,
            "reduction_pct": report.reduction_pct,
            "reduction_pct_transient": report.reduction_pct_transient,
            "min_interval": report.min_interval,
            "J_X": report.J_X,
            "lqr_cost": report.lqr_cost,
            "ultimate_bound": report.ultimate_bound,
            "analytic_tau": report.analytic_tau,
            "beta_hat": report.beta_hat,
            "terminal_norm_X": report.terminal_norm_X,
        },
    }
    Path(path_json).write_text(json.dumps(doc, indent=2) + "\n")
    lines = ["# run configuration"]
    lines += [f"{k} = {v}" for k, v in doc["config"].items()]
    lines.append("# metrics")
    lines += [f"{k} = {v}" for k, v in doc["metrics"].items()]
    Path(path_txt).write_text("\n".join(lines) + "\n")


def _apply_overrides(scenario, args):
    return scenario.with_overrides(
        sigma=getattr(args, "sigma", None),
        epsilon=getattr(args, "epsilon", None),
        policy=getattr(args, "policy", None),
        delay=getattr(args, "delay", None),
        horizon=getattr(args, "horizon", None),
        step=getattr(args, "step", None),
    )


def cmd_scenarios(args):
    for name in bundled_names():
        sc = get_scenario(name)
        print(
            f"{name}: n={sc.model.n} m={sc.model.m} q={sc.model.q} "
            f"sigma={sc.sigma} epsilon={sc.epsilon} step={sc.config.step} "
            f"horizon={sc.config.horizon}"
        )
    return EXIT_OK


def cmd_design(args):
    scenario = _apply_overrides(get_scenario(args.scenario), args)
    out = _out_dir(args)
    t0 = time.perf_counter()
    ctrl = check_controllability(scenario.model.A, scenario.model.B)
    obs = check_observability(scenario.model.A, scenario.model.C)
    print(f"controllable: {ctrl}")
    print(f"observable:   {obs}")
    gains = design_gains(scenario.model, scenario.weights)
    print(_fmt_matrix("K", gains.K))
    print(_fmt_matrix("L", gains.L))
    design = build_trigger_design(
        scenario.model, gains, sigma=scenario.sigma,
        epsilon=scenario.epsilon, Q_tilde=scenario.Q_tilde,
    )
    eigs = np.sort_complex(linalg.eigenvalues(design.A_tilde))
    print("closed-loop eigenvalues (controller + observer blocks):")
    for lam in eigs:
        print(f"  {lam.real: .6g} {lam.imag:+.6g}j")
    stable = bool(np.all(eigs.real < 0))
    print(f"closed loop Hurwitz: {stable}")
    path = out / f"{scenario.name}_gains.json"
    path.write_text(
        json.dumps(
            {
                "scenario": scenario.name,
                "K": gains.K.tolist(),
                "L": gains.L.tolist(),
                "P_ctrl": gains.P_ctrl.tolist(),
                "S_obs": gains.S_obs.tolist(),
                "P_tilde": design.P_tilde.tolist(),
                "eigenvalues": [[lam.real, lam.imag] for lam in eigs],
            },
            indent=2,
        )
        + "\n"
    )
    print(f"gains written to {path} ({time.perf_counter() - t0:.2f}s)")
    return EXIT_OK


def _run(scenario):
    gains = design_gains(scenario.model, scenario.weights)
    design = build_trigger_design(
        scenario.model, gains, sigma=scenario.sigma,
        epsilon=scenario.epsilon, Q_tilde=scenario.Q_tilde,
    )
    trace = simulate(scenario.model, gains, design, scenario.config)
    report = metrics(trace, design, weights=scenario.weights)
    return gains, design, trace, report


def cmd_simulate(args):
    scenario = _apply_overrides(get_scenario(args.scenario), args)
    out = _out_dir(args)
    t0 = time.perf_counter()
    _, _, trace, report = _run(scenario)
    stem = scenario.name
    trace_path = out / f"{stem}_trace.csv"
    events_path = out / f"{stem}_events.csv"
    write_trace_csv(trace_path, trace)
    write_events_csv(events_path, trace)
    write_metrics(out / f"{stem}_metrics.json", out / f"{stem}_metrics.txt", report, scenario)
    print(f"packets (n_s):      {report.n_s}")
    print(f"reduction_pct:      {report.reduction_pct:.2f}")
    print(f"reduction_pct (transient window): {report.reduction_pct_transient:.2f}")
    print(f"min_interval [s]:   {report.min_interval:.6g}")
    print(f"J_X:                {report.J_X:.6g}")
    print(f"ultimate_bound:     {report.ultimate_bound:.6g}")
    print(f"artifacts: {trace_path}, {events_path}")
    print(f"done in {time.perf_counter() - t0:.2f}s")
    return EXIT_OK


def cmd_sweep(args):
    base = get_scenario(args.scenario)
    base = base.with_overrides(
        policy=args.policy, delay=args.delay, horizon=args.horizon, step=args.step
    )
    sigmas = args.sigma if args.sigma else [base.sigma]
    epsilons = args.epsilon if args.epsilon else [base.epsilon]
    out = _out_dir(args)
    path = out / f"{base.name}_sweep.csv"
    rows = []
    for eps in epsilons:
        for sig in sigmas:
            sc = base.with_overrides(sigma=sig, epsilon=eps)
            _, _, trace, report = _run(sc)
            rows.append((sig, eps, report.n_s, report.J_X, report.min_interval))
            print(
                f"sigma={sig:g} epsilon={eps:g} n_s={report.n_s} "
                f"J_X={report.J_X:.4g} min_interval={report.min_interval:.4g}"
            )
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sigma", "epsilon", "n_s", "J_X", "min_interval"])
        for sig, eps, n_s, jx, mi in rows:
            w.writerow([f"{sig:.10g}", f"{eps:.10g}", n_s, f"{jx:.10g}", f"{mi:.10g}"])
    print(f"sweep table written to {path}")
    return EXIT_OK


def cmd_identify(args):
    from .sysid import DegenerateInputError, EraDataset, SysIdError, identify, validate_model

    path = Path(args.dataset)
    if not path.exists():
        print(f"error: dataset not found: {path}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        data = np.genfromtxt(path, delimiter=",", names=True)
    except ValueError as exc:
        print(f"error: malformed CSV: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if data.dtype.names is None or not {"u", "y"} <= set(data.dtype.names):
        print("error: dataset CSV must have 'u' and 'y' columns", file=sys.stderr)
        return EXIT_CONFIG
    dataset = EraDataset(u=data["u"], y=data["y"], sample_rate=args.sample_rate)
    try:
        result = identify(dataset, threshold=args.threshold, order=args.order)
    except DegenerateInputError as exc:
        print(f"error: degenerate input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SysIdError as exc:
        print(f"error: identification failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    out = _out_dir(args)
    print(f"identified order: {result.order}")
    print(f"energy captured:  {result.energy_captured:.6f}")
    print(f"fit:              {result.fit:.6f}")
    print("leading singular values:", ", ".join(f"{s:.4g}" for s in result.singular_values[:10]))
    from .scenarios import Scenario
    from .design import DesignWeights
    from .simulate import SimConfig

    n = result.model.n
    sc = Scenario(
        name=path.stem,
        model=result.model,
        weights=DesignWeights(Q=np.eye(n), R=np.eye(1), W=np.eye(n), V=np.eye(1)),
        sigma=0.95,
        epsilon=0.1,
        config=SimConfig(
            step=1.0 / args.sample_rate, horizon=10.0,
            x0=np.zeros(n), xhat0=np.zeros(n),
        ),
    )
    sc_path = out / f"{path.stem}_identified.yaml"
    save_scenario(sc, sc_path)
    sv_path = out / f"{path.stem}_singular_values.csv"
    with open(sv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "singular_value"])
        for i, s in enumerate(result.singular_values):
            w.writerow([i + 1, f"{s:.10g}"])
    print(f"model scenario written to {sc_path}; singular values to {sv_path}")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(
        prog="etcontrol",
        description="Design and simulate observer-based event-triggered controllers.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, sweep=False):
        listy = {"nargs": "+"} if sweep else {}
        sp.add_argument("--sigma", type=float, help="trigger aggressiveness in (0, 1]", **listy)
        sp.add_argument("--epsilon", type=float, help="event floor on |X|", **listy)
        sp.add_argument("--policy", choices=POLICIES)
        sp.add_argument("--delay", type=float, help="packet delay [s]")
        sp.add_argument("--horizon", type=float, help="simulation horizon [s]")
        sp.add_argument("--step", type=float, help="integration step [s]")
        sp.add_argument("--out", help=f"output directory (default $" + OUT_DIR_ENV + " or ./out)")
        sp.add_argument("--seed", type=int, help="RNG seed for randomized checks")

    sp = sub.add_parser("scenarios", help="list bundled scenarios")
    sp.set_defaults(func=cmd_scenarios)

    sp = sub.add_parser("design", help="compute controller and observer gains")
    sp.add_argument("scenario", help="bundled scenario name or YAML path")
    common(sp)
    sp.set_defaults(func=cmd_design)

    sp = sub.add_parser("simulate", help="run the event-triggered closed loop")
    sp.add_argument("scenario")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="grid of runs over sigma and/or epsilon")
    sp.add_argument("scenario")
    common(sp, sweep=True)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("identify", help="realize a state-space model from I/O data")
    sp.add_argument("dataset", help="CSV file with 'u' and 'y' columns")
    sp.add_argument("--sample-rate", type=float, required=True, help="samples per second")
    sp.add_argument("--threshold", type=float, default=0.99, help="singular-value mass cutoff")
    sp.add_argument("--order", type=int, help="force the realization order")
    sp.add_argument("--out")
    sp.add_argument("--seed", type=int)
    sp.set_defaults(func=cmd_identify)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergedError, NotStabilizableError, NotObservableError, NumericsError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
