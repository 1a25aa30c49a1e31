"""Command-line front end.

SNRs are given in dB and rates in bits/s/Hz. Every command echoes its
inputs and units next to the results, as JSON (default) or CSV.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .channel import (
    AntennaConfig,
    LinkBudget,
    db_to_linear,
    eve_snr_cdf,
    feedback_bits,
    legit_snr_cdf,
    max_cdf_deviation,
    sample_joint_snr,
)
from .optimizer import AXES, optimize, sweep
from .secrecy import (
    RatePolicy,
    SecurityConstraints,
    is_feasible,
    max_rb_closed_form,
    max_rb_exact,
    p_secrecy_outage,
    p_success,
    secure_throughput,
    tradeoff_sigma_bound,
)
from .smartgrid import PROFILE_KINDS, ingest_csv, run_experiment, synth_profile
from .specfun import DomainError

UNITS = {
    "rates": "bits/s/Hz",
    "snr_db": "dB",
    "snr_linear": "linear power ratio",
    "probabilities": "dimensionless",
    "nrmsd": "dimensionless",
}
STOCHASTIC = {"validate", "reconstruct"}


class UsageError(Exception):
    pass


def parse_grid(text: str) -> list[float]:
    """``"a,b,c"`` or ``"start:stop:num"`` (inclusive, evenly spaced)."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range grid must be start:stop:num, got {text!r}")
        start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
        if num < 1:
            raise UsageError("grid needs at least one point")
        return [float(v) for v in np.linspace(start, stop, num)]
    values = [float(v) for v in text.split(",") if v.strip()]
    if not values:
        raise UsageError("grid is empty")
    return values


def parse_configs(text: str) -> list[AntennaConfig]:
    """``"4x1x2,4x2x2"`` -> antenna configs (n_a x n_b x n_e)."""
    out = []
    for item in text.split(","):
        parts = item.strip().lower().split("x")
        if len(parts) != 3:
            raise UsageError(f"config must look like NAxNBxNE, got {item!r}")
        out.append(AntennaConfig(*(int(p) for p in parts)))
    return out


def _clean(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, (np.floating, np.integer)):
        return _clean(value.item())
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def render(payload: dict, fmt: str) -> str:
    payload = _clean(payload)
    if fmt == "json":
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# command={payload['command']}\n")
    for key, value in payload["inputs"].items():
        buf.write(f"# {key}={value}\n")
    for key, value in payload["units"].items():
        buf.write(f"# unit.{key}={value}\n")
    rows = payload["results"]
    if rows:
        fields = list(rows[0])
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    return buf.getvalue()


def _base_inputs(args) -> dict:
    return {
        "n_a": args.na,
        "n_b": args.nb,
        "n_e": args.ne,
        "snr_b_db": args.snr_b_db,
        "snr_e_db": args.snr_e_db,
        "gamma_bar_b": db_to_linear(args.snr_b_db),
        "gamma_bar_e": db_to_linear(args.snr_e_db),
    }


def _setup(args):
    cfg = AntennaConfig(args.na, args.nb, args.ne)
    lb = LinkBudget.from_db(args.snr_b_db, args.snr_e_db)
    return cfg, lb


def _constraints(args) -> SecurityConstraints:
    return SecurityConstraints(args.sigma, args.epsilon)


def cmd_metrics(args) -> dict:
    if args.rb is None or args.rs is None:
        raise UsageError("metrics needs --rb and --rs")
    cfg, lb = _setup(args)
    policy = RatePolicy(args.rb, args.rs, args.mu)
    row = {
        "r_b": policy.r_b,
        "r_s": policy.r_s,
        "r_e": policy.r_e,
        "mu": policy.mu,
        "p_suc": p_success(policy.mu, cfg, lb),
        "p_so": p_secrecy_outage(policy.r_b, policy.r_s, cfg, lb),
        "t_s": secure_throughput(policy, cfg, lb),
        "feedback_bits": feedback_bits(cfg),
    }
    inputs = _base_inputs(args) | {"rb": args.rb, "rs": args.rs, "mu": args.mu}
    return {"inputs": inputs, "results": [row]}


def _solution_row(sol) -> dict:
    return sol.as_dict() | {"feasible": sol.feasible}


def cmd_optimize(args) -> dict:
    cfg, lb = _setup(args)
    s = _constraints(args)
    sol = optimize(s, cfg, lb, rb_bound=args.rb_bound)
    feas = is_feasible(s, cfg, lb)
    row = _solution_row(sol) | {
        "r_b_max_exact": max_rb_exact(s, cfg, lb),
        "r_b_max_closed_form": max_rb_closed_form(s, cfg, lb),
        "rate_margin": feas.rate_margin,
        "sigma_margin": feas.sigma_margin,
        "closed_form_feasible": feas.closed_form_feasible,
        "feedback_bits": feedback_bits(cfg),
    }
    inputs = _base_inputs(args) | {
        "sigma": args.sigma,
        "epsilon": args.epsilon,
        "rb_bound": args.rb_bound,
    }
    return {"inputs": inputs, "results": [row]}


def cmd_tradeoff(args) -> dict:
    cfg = AntennaConfig(args.na, args.nb, args.ne)
    rho_db = parse_grid(args.rho_db_grid)
    eps = parse_grid(args.epsilon_grid)
    rows = []
    for r_db in rho_db:
        rho = db_to_linear(r_db)
        for e in eps:
            rows.append(
                {
                    "rho_db": r_db,
                    "rho": rho,
                    "epsilon": e,
                    "sigma_bound": tradeoff_sigma_bound(e, cfg, rho, path="closed-form"),
                    "sigma_bound_exact": tradeoff_sigma_bound(e, cfg, rho, path="exact"),
                }
            )
    inputs = {
        "n_a": args.na,
        "n_b": args.nb,
        "n_e": args.ne,
        "rho_db_grid": args.rho_db_grid,
        "epsilon_grid": args.epsilon_grid,
    }
    return {"inputs": inputs, "results": rows}


def cmd_sweep(args) -> dict:
    if args.axis is None or args.grid is None:
        raise UsageError("sweep needs --axis and --grid")
    cfg, lb = _setup(args)
    s = _constraints(args)
    if args.axis == "config":
        grid = parse_configs(args.grid)
        shown = [f"{c.n_a}x{c.n_b}x{c.n_e}" for c in grid]
    elif args.axis == "gamma_bar_b":
        shown = parse_grid(args.grid)
        grid = [db_to_linear(v) for v in shown]
    else:
        grid = shown = parse_grid(args.grid)
    result = sweep(args.axis, grid, s, cfg, lb, rb_bound=args.rb_bound, workers=args.workers)
    rows = []
    for label, row in zip(shown, result):
        rows.append(
            {
                "axis": args.axis,
                "value": label,
                "n_a": row.cfg.n_a,
                "n_b": row.cfg.n_b,
                "n_e": row.cfg.n_e,
                "gamma_bar_b": row.lb.gamma_bar_b,
                "gamma_bar_e": row.lb.gamma_bar_e,
                "sigma": row.constraints.sigma,
                "epsilon": row.constraints.epsilon,
            }
            | _solution_row(row.solution)
        )
    inputs = _base_inputs(args) | {
        "sigma": args.sigma,
        "epsilon": args.epsilon,
        "axis": args.axis,
        "grid": args.grid,
        "grid_units": "dB" if args.axis == "gamma_bar_b" else "as given",
        "rb_bound": args.rb_bound,
    }
    return {"inputs": inputs, "results": rows}


def cmd_validate(args) -> dict:
    cfg, lb = _setup(args)
    rng = np.random.default_rng(args.seed)
    samples = sample_joint_snr(cfg, lb, rng, size=args.samples)

    if args.rb is not None and args.rs is not None:
        policy = RatePolicy(args.rb, args.rs, args.mu)
        r_b, r_s, mu = policy.r_b, policy.r_s, policy.mu
        source = "flags"
    else:
        sol = optimize(_constraints(args), cfg, lb, rb_bound=args.rb_bound)
        if not sol.feasible:
            raise UsageError("constraints are infeasible; pass --rb and --rs to validate a policy")
        r_b, r_s, mu = sol.r_b_star, sol.r_s_star, sol.mu_star
        source = "optimize"

    leak_snr = 2.0 ** (r_b - r_s) - 1.0
    rows = [
        {
            "metric": "legit_cdf_max_deviation",
            "closed_form": None,
            "monte_carlo": None,
            "abs_diff": max_cdf_deviation(samples.gamma_b, lambda g: legit_snr_cdf(g, cfg, lb)),
        },
        {
            "metric": "eve_cdf_max_deviation",
            "closed_form": None,
            "monte_carlo": None,
            "abs_diff": max_cdf_deviation(samples.gamma_e, lambda g: eve_snr_cdf(g, cfg, lb)),
        },
    ]
    for name, exact, empirical in (
        ("p_suc", p_success(mu, cfg, lb), float(np.mean(samples.gamma_b > mu))),
        ("p_so", p_secrecy_outage(r_b, r_s, cfg, lb), float(np.mean(samples.gamma_e > leak_snr))),
    ):
        rows.append(
            {"metric": name, "closed_form": exact, "monte_carlo": empirical, "abs_diff": abs(exact - empirical)}
        )
    inputs = _base_inputs(args) | {
        "seed": args.seed,
        "samples": args.samples,
        "policy_source": source,
        "r_b": r_b,
        "r_s": r_s,
        "mu": mu,
        "sigma": args.sigma,
        "epsilon": args.epsilon,
    }
    return {"inputs": inputs, "results": rows}


def cmd_reconstruct(args) -> dict:
    cfg, lb = _setup(args)
    rng = np.random.default_rng(args.seed)
    profile_rng, trial_rng = rng.spawn(2)
    if args.input is not None:
        profile = ingest_csv(args.input, window=args.window)
    else:
        profile = synth_profile(args.profile, profile_rng)
    result = run_experiment(profile, cfg, lb, _constraints(args), args.trials, trial_rng)
    if args.per_trial is not None:
        with open(args.per_trial, "x", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["role", "trial", "nrmsd"])
            for stats in (result.bob, result.eve):
                for k, v in enumerate(stats.per_trial):
                    writer.writerow([stats.role, k, repr(float(v))])
    inputs = _base_inputs(args) | {
        "sigma": args.sigma,
        "epsilon": args.epsilon,
        "seed": args.seed,
        "trials": args.trials,
        "input": args.input,
        "window": args.window,
        "profile": profile.label,
        "n_samples": len(profile),
        "tau_hours": profile.tau_hours,
        "r_b_star": result.solution.r_b_star,
        "r_s_star": result.solution.r_s_star,
    }
    return {"inputs": inputs, "results": result.report()}


COMMANDS = {
    "metrics": (cmd_metrics, "success/secrecy-outage probabilities and throughput of a rate policy"),
    "optimize": (cmd_optimize, "throughput-optimal rates under the sigma/epsilon constraints"),
    "tradeoff": (cmd_tradeoff, "sigma bound over a (rho, epsilon) grid"),
    "sweep": (cmd_sweep, "optimize along one parameter axis"),
    "validate": (cmd_validate, "Monte Carlo check of the closed-form SNR laws"),
    "reconstruct": (cmd_reconstruct, "load-curve reconstruction error for Bob and Eve"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("link")
    g.add_argument("--na", type=int, default=1, help="transmit antennas at Alice")
    g.add_argument("--nb", type=int, default=1, help="receive antennas at Bob")
    g.add_argument("--ne", type=int, default=1, help="antennas at Eve")
    g.add_argument("--snr-b-db", type=float, default=10.0, help="Bob average SNR [dB]")
    g.add_argument("--snr-e-db", type=float, default=0.0, help="Eve average SNR [dB]")
    g.add_argument("--sigma", type=float, default=0.9, help="success-probability floor")
    g.add_argument("--epsilon", type=float, default=0.1, help="secrecy-outage ceiling")
    g.add_argument("--rb", type=float, help="transmission rate [bits/s/Hz]")
    g.add_argument("--rs", type=float, help="confidential rate [bits/s/Hz]")
    g.add_argument("--mu", type=float, help="on-off SNR threshold (linear); default 2^rb - 1")
    g.add_argument("--rb-bound", choices=("exact", "closed-form"), default="exact")
    g = common.add_argument_group("sweeps")
    g.add_argument("--axis", choices=AXES)
    g.add_argument(
        "--grid",
        help="a,b,c or start:stop:num; dB for gamma_bar_b; NAxNBxNE list for config",
    )
    g.add_argument("--rho-db-grid", default="0:15:31", help="tradeoff rho grid [dB]")
    g.add_argument("--epsilon-grid", default="0.01:0.3:30", help="tradeoff epsilon grid")
    g.add_argument("--workers", type=int, default=1)
    g = common.add_argument_group("simulation")
    g.add_argument("--seed", type=int, help="required by stochastic commands")
    g.add_argument("--samples", type=int, default=1_000_000, help="validate: joint SNR draws")
    g.add_argument("--trials", type=int, default=1000, help="reconstruct: simulated days")
    g.add_argument("--input", help="reconstruct: load CSV (timestamp-or-index, watts)")
    g.add_argument("--window", type=float, help="reconstruct: averaging window [s] for raw CSV")
    g.add_argument("--profile", choices=PROFILE_KINDS, default="morning-evening-peaks")
    g.add_argument("--per-trial", help="reconstruct: also write per-trial NRMSD CSV here (must not exist)")
    g = common.add_argument_group("output")
    g.add_argument("--output", help="write here instead of stdout (must not exist)")
    g.add_argument("--format", choices=("json", "csv"), default="json")

    parser = argparse.ArgumentParser(prog="securetas", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in STOCHASTIC and args.seed is None:
        parser.error(f"--seed is required for {args.command}")
    func, _ = COMMANDS[args.command]
    try:
        body = func(args)
    except (UsageError, DomainError) as exc:
        parser.error(str(exc))
    except (ValueError, OSError) as exc:
        # malformed input files, infeasible experiments, I/O failures
        print(f"securetas: error: {exc}", file=sys.stderr)
        return 1
    payload = {"command": args.command, "version": __version__, "units": UNITS} | body
    text = render(payload, args.format)
    if args.output:
        try:
            # never overwrite a file this run did not create
            with Path(args.output).open("x", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"securetas: error: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
