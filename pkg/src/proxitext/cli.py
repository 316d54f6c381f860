"""Command-line interface.

Subcommands: ``simulate``, ``dag check``, ``gate``, ``estimate``,
``diagnostics``, ``pipeline``, ``bench table1``, ``bench gotchas``.

Verdict-carrying commands (``gate``, ``pipeline``) exit 0 on proceed and
2 on a stop verdict so shell pipelines can branch on the falsification
outcome; any error exits 1. The master seed comes from ``--seed`` when
given, else the ``PROXITEXT_SEED`` environment variable, else 0.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np
import pandas as pd

from .dag import RoleAssignment, check_proximal_structure, parse_edge_list
from .data import read_csv, write_csv
from .oddsratio import gamma_ci, gate
from .pipeline import (
    EXPECTED_TABLE1_VERDICTS,
    PipelineConfig,
    run_gotcha_bench,
    run_pipeline,
    run_table1_experiment,
    table_to_json,
)
from .proximal import ace_ci
from .proxies import proxy_diagnostics
from .regress import standardize
from .synth import SynthParams, generate_fully_synthetic, overlay_semi_synthetic

SEED_ENV_VAR = "PROXITEXT_SEED"


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        return int(env)
    return 0


def _comma_list(text: str | None) -> list[str]:
    if not text:
        return []
    return [part.strip() for part in text.split(",") if part.strip()]


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)


def _add_seed(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help=f"master seed (default: ${SEED_ENV_VAR} or 0)")


def _cmd_simulate(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.dgp == "full":
        data = generate_fully_synthetic(SynthParams(n=args.n, seed=seed))
    else:
        if not args.covariates_csv or not args.u_col:
            raise SystemExit("simulate --dgp semi needs --covariates and --u-col")
        frame = pd.read_csv(args.covariates_csv)
        u = frame[args.u_col].to_numpy(float)
        cov_names = [c for c in frame.columns if c != args.u_col]
        cov = {c: frame[c].to_numpy(float) for c in cov_names}
        for name in _comma_list(args.standardize):
            cov[name] = standardize(cov[name])
        data = overlay_semi_synthetic(cov, u, seed=seed)
    write_csv(data, args.out)
    print(f"wrote {data.n} rows to {args.out}")
    return 0


def _cmd_dag_check(args) -> int:
    with open(args.graph, encoding="utf-8") as fh:
        g = parse_edge_list(fh.read())
    roles = RoleAssignment(
        treatment=args.treatment,
        outcome=args.outcome,
        unmeasured=args.unmeasured,
        observed_covariates=tuple(_comma_list(args.covariates)),
        proxy_w=args.proxy_w,
        proxy_z=args.proxy_z,
    )
    report = check_proximal_structure(g, roles)
    _emit(report.to_dict(), args.out)
    return 0


def _read_columns(path, names: list[str]) -> dict[str, np.ndarray]:
    frame = pd.read_csv(path)
    missing = [n for n in names if n not in frame.columns]
    if missing:
        raise SystemExit(f"data file lacks columns: {missing}")
    return {n: frame[n].to_numpy(float) for n in names}


def _cmd_gate(args) -> int:
    seed = _resolve_seed(args.seed)
    cov_names = _comma_list(args.covariates)
    cols = _read_columns(args.data, [args.w_col, args.z_col] + cov_names)
    result = gamma_ci(
        cols[args.w_col], cols[args.z_col],
        {c: cols[c] for c in cov_names},
        n_boot=args.boot, seed=seed, n_jobs=args.jobs,
    )
    decision = gate(result, args.gamma_high)
    _emit({"odds_ratio": result.to_dict(), "gate": decision.to_dict()}, args.out)
    return 0 if decision.verdict == "proceed" else 2


def _cmd_estimate(args) -> int:
    seed = _resolve_seed(args.seed)
    cov_names = _comma_list(args.covariates)
    data = read_csv(
        args.data, a_col=args.a_col, y_col=args.y_col, u_col=args.u_col,
        w_col=args.w_col, z_col=args.z_col,
        covariates=cov_names or None,
    )
    adjust = _comma_list(args.adjust) or None
    estimate = ace_ci(
        data, method=args.method, adjust=adjust,
        n_boot=args.boot, seed=seed, stage1=args.stage1, n_jobs=args.jobs,
    )
    _emit(estimate.to_dict(), args.out)
    return 0


def _cmd_diagnostics(args) -> int:
    cov_names = _comma_list(args.covariates)
    data = read_csv(
        args.data, a_col=args.a_col, y_col=args.y_col, u_col=args.u_col,
        w_col=args.w_col, z_col=args.z_col,
        covariates=cov_names or None,
    )
    _emit(proxy_diagnostics(data).to_dict(), args.out)
    return 0


def _cmd_pipeline(args) -> int:
    seed = _resolve_seed(args.seed)
    roles = None
    if args.graph:
        roles = {
            "treatment": args.treatment,
            "outcome": args.outcome,
            "unmeasured": args.unmeasured,
            "covariates": tuple(_comma_list(args.graph_covariates) or ("C",)),
            "proxy_w": args.proxy_w,
            "proxy_z": args.proxy_z,
        }
    config = PipelineConfig(
        w_source=args.w_source,
        z_source=args.z_source,
        data_csv=args.data,
        dgp=args.dgp,
        n=args.n,
        a_col=args.a_col,
        y_col=args.y_col,
        u_col=args.u_col,
        covariates=tuple(_comma_list(args.covariates)) or None,
        graph_file=args.graph,
        graph_roles=roles,
        allow_same_source=args.allow_same_source,
        gamma_high=args.gamma_high,
        n_boot=args.boot,
        seed=seed,
        stage1=args.stage1,
        n_jobs=args.jobs,
        out=args.out,
    )
    report = run_pipeline(config)
    print(report.to_json())
    return 0 if report.verdict == "proceed" else 2


def _cmd_bench_table1(args) -> int:
    seed0 = _resolve_seed(args.seed)
    seeds = list(range(seed0, seed0 + args.seeds))
    per_seed = []
    matched = 0
    for s in seeds:
        rows = run_table1_experiment(s, n=args.n, n_boot=args.boot,
                                     n_jobs=args.jobs)
        verdicts = {r.config: r.gate.verdict for r in rows}
        ok = verdicts == EXPECTED_TABLE1_VERDICTS
        matched += ok
        per_seed.append(table_to_json(rows, s, extra={"pattern_match": ok}))
        if not args.json:
            for r in rows:
                print(f"seed {s:3d} {r.config:20s} "
                      f"gamma={r.odds_ratio.gamma_point:12.4g} "
                      f"CI=({r.odds_ratio.ci_low:.4g}, {r.odds_ratio.ci_high:.4g}) "
                      f"{r.gate.verdict:7s} ace={r.ace.point:.4f} "
                      f"bias={r.bias:+.4f} covers={r.covers_truth}")
    summary = {
        "n": args.n,
        "seeds": seeds,
        "pattern_matched": matched,
        "mean_bias": {
            cfg: float(np.mean([ps["rows"][i]["bias"] for ps in per_seed]))
            for i, cfg in enumerate(EXPECTED_TABLE1_VERDICTS)
        },
        "coverage": {
            cfg: int(sum(ps["rows"][i]["covers_truth"] for ps in per_seed))
            for i, cfg in enumerate(EXPECTED_TABLE1_VERDICTS)
        },
    }
    payload = {"schema": "proxitext/bench-table1/v1", "summary": summary,
               "per_seed": per_seed}
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(f"pattern matched in {matched}/{len(seeds)} seeds")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def _cmd_bench_gotchas(args) -> int:
    seed = _resolve_seed(args.seed)
    rows = run_gotcha_bench(seed, n=args.n)
    payload = table_to_json(rows, seed)
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for r in rows:
            flag = "  [stage-1 flagged]" if r.stage1_flagged else ""
            print(f"{r.method:20s} estimate={r.estimate:.4f} "
                  f"bias={r.bias:+.4f}{flag}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proxitext",
        description="Proximal causal inference with designed binary proxies",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a seeded synthetic dataset")
    p.add_argument("--dgp", choices=("full", "semi"), required=True)
    p.add_argument("--n", type=int, default=10_000)
    _add_seed(p)
    p.add_argument("--out", required=True)
    p.add_argument("--covariates", dest="covariates_csv",
                   help="covariate CSV for the semi-synthetic overlay")
    p.add_argument("--u-col", help="oracle column in the covariate CSV")
    p.add_argument("--standardize",
                   help="comma-separated covariates to standardize first")
    p.set_defaults(func=_cmd_simulate)

    dag = sub.add_parser("dag", help="graph utilities")
    dag_sub = dag.add_subparsers(dest="dag_command", required=True)
    p = dag_sub.add_parser("check", help="check proxy conditions on an edge list")
    p.add_argument("graph", help="edge-list file, one 'parent -> child' per line")
    p.add_argument("--treatment", required=True)
    p.add_argument("--outcome", required=True)
    p.add_argument("--unmeasured", required=True)
    p.add_argument("--covariates", default="")
    p.add_argument("--proxy-w", required=True)
    p.add_argument("--proxy-z", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_dag_check)

    p = sub.add_parser("gate", help="odds-ratio falsification gate")
    p.add_argument("--data", required=True)
    p.add_argument("--w-col", required=True)
    p.add_argument("--z-col", required=True)
    p.add_argument("--covariates", default="")
    p.add_argument("--gamma-high", type=float, default=2.0)
    p.add_argument("--boot", type=int, default=200)
    _add_seed(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gate)

    p = sub.add_parser("estimate", help="causal effect estimate with bootstrap CI")
    p.add_argument("--data", required=True)
    p.add_argument("--method", required=True,
                   choices=("proximal", "backdoor_proxy", "backdoor_oracle"))
    p.add_argument("--a-col", default="A")
    p.add_argument("--y-col", default="Y")
    p.add_argument("--u-col")
    p.add_argument("--w-col")
    p.add_argument("--z-col")
    p.add_argument("--covariates", default="")
    p.add_argument("--adjust", default="",
                   help="adjustment columns for backdoor methods")
    p.add_argument("--stage1", choices=("logistic", "linear"), default="logistic")
    p.add_argument("--boot", type=int, default=200)
    _add_seed(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("diagnostics", help="proxy quality metrics vs the oracle")
    p.add_argument("--data", required=True)
    p.add_argument("--a-col", default="A")
    p.add_argument("--y-col", default="Y")
    p.add_argument("--u-col", default="U")
    p.add_argument("--w-col", default="W")
    p.add_argument("--z-col", default="Z")
    p.add_argument("--covariates", default="")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_diagnostics)

    p = sub.add_parser("pipeline", help="falsify-then-estimate, end to end")
    p.add_argument("--data", help="dataset CSV")
    p.add_argument("--dgp", choices=("full",), help="or generate synthetic data")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--a-col", default="A")
    p.add_argument("--y-col", default="Y")
    p.add_argument("--u-col")
    p.add_argument("--covariates", default="")
    p.add_argument("--w-source", required=True,
                   help="column:NAME | external:PATH:COL | logistic:BLOCK | "
                        "threshold:BLOCK:FEATURE:CUTOFF")
    p.add_argument("--z-source", required=True)
    p.add_argument("--allow-same-source", action="store_true",
                   help="permit W and Z to read the same source (pitfall mode)")
    p.add_argument("--gamma-high", type=float, default=2.0)
    p.add_argument("--boot", type=int, default=200)
    _add_seed(p)
    p.add_argument("--stage1", choices=("logistic", "linear"), default="logistic")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--graph", help="optional edge-list file for structural checks")
    p.add_argument("--treatment", default="A")
    p.add_argument("--outcome", default="Y")
    p.add_argument("--unmeasured", default="U")
    p.add_argument("--graph-covariates", default="C")
    p.add_argument("--proxy-w", default="W")
    p.add_argument("--proxy-z", default="Z")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_pipeline)

    bench = sub.add_parser("bench", help="replication benchmarks")
    bench_sub = bench.add_subparsers(dest="bench_command", required=True)
    p = bench_sub.add_parser("table1", help="four proxy configs, gate + estimates")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--seeds", type=int, default=10)
    _add_seed(p)
    p.add_argument("--boot", type=int, default=200)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true", help="print JSON instead of a table")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_bench_table1)

    p = bench_sub.add_parser("gotchas", help="backdoor vs proximal bias comparison")
    p.add_argument("--n", type=int, default=100_000)
    _add_seed(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_bench_gotchas)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except Exception as exc:  # surfaced uniformly; exit code 1 for errors
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
