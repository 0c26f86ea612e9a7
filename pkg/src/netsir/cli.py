"""Command-line front end: experiment configs in, CSV/JSON results out.

Subcommands: simulate | bound | optimize | validate | compare. A single
JSON config describes the experiment; --seed/--replicas/--out/--mode
override config fields. Every command is deterministic given its
config, including all Monte Carlo output.

Exit codes: 0 success, 2 infeasible model, 3 validation failure,
4 config or I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import allocator, bound, exact_oracle, simulator
from .allocator import (AllocationInfeasible, BudgetModelError,
                        allocation_csv_rows)
from .graph import Graph, load_edge_list
from .phase_type import ErlangSpec, erlang
from .simulator import EpidemicParams


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    """One experiment bundle; round-trips losslessly through JSON."""

    graph: str
    initially_infected: object = None     # list of ints or {"random": k, "seed": s}
    mode: str = "plain"
    beta: object = None                   # scalar or per-node list
    delta: object = None
    gamma: object = None
    erlang_shape: int = 1
    beta_box: Optional[list] = None
    delta_box: Optional[list] = None
    gamma_box: Optional[list] = None
    budget: Optional[float] = None
    lambda_cap: Optional[float] = None
    replicas: int = 10_000
    seed: int = 0
    workers: Optional[int] = None
    epsilon: float = 1e-6
    solver_tol: float = 1e-6
    out_dir: str = "results"

    def __post_init__(self):
        if self.mode not in ("plain", "isolation"):
            raise ConfigError(f"mode must be plain or isolation, got {self.mode!r}")
        if self.replicas < 1:
            raise ConfigError("replicas must be >= 1")
        if self.erlang_shape < 1:
            raise ConfigError("erlang_shape must be >= 1")

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        extra = set(doc) - known
        if extra:
            raise ConfigError(f"unknown config fields: {sorted(extra)}")
        if "graph" not in doc:
            raise ConfigError("config needs a 'graph' path")
        return cls(**doc)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)


def _load_graph(cfg: ExperimentConfig) -> Graph:
    try:
        with open(cfg.graph, "r", encoding="utf-8") as fh:
            return load_edge_list(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read graph {cfg.graph}: {exc}") from exc


def _infected_set(cfg: ExperimentConfig, g: Graph) -> frozenset:
    spec = cfg.initially_infected
    if spec is None:
        raise ConfigError("config needs initially_infected")
    if isinstance(spec, dict):
        k = int(spec.get("random", 0))
        seed = int(spec.get("seed", 0))
        if not 1 <= k <= g.node_count:
            raise ConfigError(f"random infected count {k} out of range")
        rng = np.random.default_rng(seed)
        return frozenset(int(i) for i in
                         rng.choice(g.node_count, size=k, replace=False))
    nodes = frozenset(int(i) for i in spec)
    if not nodes:
        raise ConfigError("initially_infected must be non-empty")
    return nodes


def _rates(cfg: ExperimentConfig, g: Graph) -> EpidemicParams:
    if cfg.beta is None or cfg.delta is None:
        raise ConfigError("this command needs 'beta' and 'delta' rates")
    n = g.node_count
    infected = _infected_set(cfg, g)
    isolation = None
    if cfg.mode == "isolation":
        if cfg.gamma is None:
            raise ConfigError("isolation mode needs 'gamma'")
        gamma = np.broadcast_to(np.asarray(cfg.gamma, float), (n,))
        isolation = tuple(erlang(ErlangSpec(cfg.erlang_shape, float(gm)))
                          for gm in gamma)
    try:
        return EpidemicParams.build(n, cfg.beta, cfg.delta, infected,
                                    isolation=isolation)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _workers(cfg: ExperimentConfig) -> int:
    if cfg.workers is not None:
        return max(1, int(cfg.workers))
    return max(1, os.cpu_count() or 1)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_fmt(c) for c in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_json(path: Path, doc):
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def _out_dir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cost_model(cfg: ExperimentConfig) -> allocator.CostModel:
    if cfg.beta_box is None or cfg.budget is None:
        raise ConfigError("optimization needs 'beta_box' and 'budget'")
    if cfg.mode == "plain":
        if cfg.delta_box is None:
            raise ConfigError("plain mode needs 'delta_box'")
        return allocator.CostModel(beta_box=tuple(cfg.beta_box),
                                   delta_box=tuple(cfg.delta_box),
                                   budget=float(cfg.budget))
    if cfg.gamma_box is None:
        raise ConfigError("isolation mode needs 'gamma_box'")
    return allocator.CostModel(beta_box=tuple(cfg.beta_box),
                               gamma_box=tuple(cfg.gamma_box),
                               budget=float(cfg.budget))


def _build_allocation_problem(cfg: ExperimentConfig, g: Graph,
                              infected) -> allocator.AllocationProblem:
    costs = _cost_model(cfg)
    if cfg.mode == "plain":
        return allocator.build_problem1(g, infected, costs,
                                        lambda_cap=cfg.lambda_cap,
                                        epsilon=cfg.epsilon)
    if cfg.delta is None:
        raise ConfigError("isolation optimization needs fixed 'delta'")
    delta = np.broadcast_to(np.asarray(cfg.delta, float), (g.node_count,))
    p = cfg.erlang_shape
    x_lo, x_hi = p / cfg.gamma_box[1], p / cfg.gamma_box[0]
    fits = [allocator.fit_monomial_bound(float(d), (x_lo, x_hi))
            for d in delta]
    return allocator.build_problem2(g, infected, costs, fits, p=p,
                                    delta=delta, lambda_cap=cfg.lambda_cap,
                                    epsilon=cfg.epsilon)


def _params_for_allocation(cfg: ExperimentConfig, g: Graph, infected,
                           alloc: allocator.Allocation) -> EpidemicParams:
    if alloc.mode == "plain":
        return EpidemicParams(beta=alloc.beta, delta=alloc.delta,
                              initially_infected=infected)
    delta = np.broadcast_to(np.asarray(cfg.delta, float),
                            (g.node_count,)).copy()
    laws = tuple(erlang(ErlangSpec(cfg.erlang_shape, float(gm)))
                 for gm in alloc.gamma)
    return EpidemicParams(beta=alloc.beta, delta=delta,
                          initially_infected=infected, isolation=laws)


def cmd_simulate(cfg: ExperimentConfig) -> int:
    g = _load_graph(cfg)
    params = _rates(cfg, g)
    out = _out_dir(cfg)
    run = (simulator.simulate_sir_isolation if params.isolation is not None
           else simulator.simulate_sir)
    outcome = run(g, params, simulator.replica_rng(cfg.seed, 0))
    _write_csv(out / "counts.csv", ["t", "sigma_S", "sigma_I", "sigma_R"],
               [tuple(row) for row in outcome.counts_series])
    est = simulator.estimate_lambda(g, params, cfg.replicas, cfg.seed,
                                    workers=_workers(cfg))
    _write_json(out / "lambda.json",
                {"mean": est.mean, "std_error": est.std_error,
                 "replicas": est.replicas, "seed": est.seed})
    print(f"lambda = {est.mean:.6g} +/- {est.std_error:.3g} "
          f"({est.replicas} replicas) -> {out / 'lambda.json'}")
    return 0


def cmd_bound(cfg: ExperimentConfig) -> int:
    g = _load_graph(cfg)
    params = _rates(cfg, g)
    sys_ = (bound.build_isolation_system(g, params)
            if params.isolation is not None
            else bound.build_sir_system(g, params))
    val = bound.lambda_bound(sys_)
    out = _out_dir(cfg)
    _write_json(out / "bound.json",
                {"mode": cfg.mode,
                 "hurwitz": math.isfinite(val),
                 "lambda_bound": val if math.isfinite(val) else "unbounded",
                 "sigma_I0": sys_.sigma_I0,
                 "dimension": sys_.dim})
    print(f"certified bound: "
          f"{val if math.isfinite(val) else 'unbounded'} -> {out / 'bound.json'}")
    return 0


def cmd_optimize(cfg: ExperimentConfig) -> int:
    g = _load_graph(cfg)
    infected = _infected_set(cfg, g)
    prob = _build_allocation_problem(cfg, g, infected)
    alloc = allocator.solve_allocation(prob, tol=cfg.solver_tol)
    out = _out_dir(cfg)
    doc = alloc.to_json_dict()
    doc["budget"] = cfg.budget
    doc["infected"] = sorted(infected)
    _write_json(out / "allocation.json", doc)
    _write_csv(out / "allocation.csv",
               ["node", "degree", "prevention_cost", "correction_cost"],
               allocation_csv_rows(alloc, g, prob.costs))
    print(f"lambda_bar = {alloc.lambda_bar:.6g}, "
          f"cost = {alloc.total_cost:.6g} / {cfg.budget} "
          f"-> {out / 'allocation.json'}")
    return 0


def cmd_validate(cfg: ExperimentConfig) -> int:
    g = _load_graph(cfg)
    params = _rates(cfg, g)
    exact = exact_oracle.exact_lambda(g, params)
    est = simulator.estimate_lambda(g, params, cfg.replicas, cfg.seed,
                                    workers=_workers(cfg))
    sys_ = (bound.build_isolation_system(g, params)
            if params.isolation is not None
            else bound.build_sir_system(g, params))
    cert = bound.lambda_bound(sys_)
    bound_ok = exact <= cert + 1e-9
    mc_tol = 4.0 * max(est.std_error, 1e-12)
    mc_ok = abs(est.mean - exact) <= mc_tol
    out = _out_dir(cfg)
    row = (exact, est.mean, est.std_error,
           cert if math.isfinite(cert) else "unbounded",
           "pass" if bound_ok else "fail",
           "pass" if mc_ok else "fail")
    _write_csv(out / "validation.csv",
               ["exact_lambda", "mc_lambda", "mc_stderr", "certified_bound",
                "bound_check", "mc_check"], [row])
    _write_json(out / "validation.json",
                {"exact_lambda": exact, "mc_lambda": est.mean,
                 "mc_stderr": est.std_error,
                 "certified_bound": cert if math.isfinite(cert) else "unbounded",
                 "bound_ok": bound_ok, "mc_ok": mc_ok})
    print(f"exact={exact:.6g} mc={est.mean:.6g}+/-{est.std_error:.3g} "
          f"bound={cert if math.isfinite(cert) else 'unbounded'} "
          f"[{'pass' if bound_ok and mc_ok else 'FAIL'}]")
    return 0 if (bound_ok and mc_ok) else 3


def cmd_compare(cfg: ExperimentConfig) -> int:
    g = _load_graph(cfg)
    infected = _infected_set(cfg, g)
    costs = _cost_model(cfg)
    prob = _build_allocation_problem(cfg, g, infected)
    allocations = [allocator.solve_allocation(prob, tol=cfg.solver_tol)]
    if cfg.mode == "plain":
        allocations.append(allocator.baseline_uniform(g, infected, costs))
        allocations.append(allocator.baseline_sis_spectral(
            g, infected, costs, tol=cfg.solver_tol))
    else:
        delta = np.broadcast_to(np.asarray(cfg.delta, float),
                                (g.node_count,))
        allocations.append(allocator.baseline_uniform(
            g, infected, costs, delta_fixed=delta, p=cfg.erlang_shape))
    workers = _workers(cfg)
    results = []
    for alloc in allocations:
        params = _params_for_allocation(cfg, g, infected, alloc)
        est = simulator.estimate_lambda(g, params, cfg.replicas, cfg.seed,
                                        workers=workers)
        results.append((alloc.strategy, est.mean, est.std_error))
    lam_opt = results[0][1]
    rows = []
    for strategy, mean, se in results:
        improvement = 0.0 if strategy == "optimized" or mean <= 0 \
            else (mean - lam_opt) / mean
        rows.append((strategy, mean, se, improvement))
    out = _out_dir(cfg)
    _write_csv(out / "comparison.csv",
               ["strategy", "lambda_mean", "lambda_stderr",
                "relative_improvement"], rows)
    for strategy, mean, se, imp in rows:
        print(f"{strategy:>14}: lambda = {mean:.4f} +/- {se:.4f}"
              + (f"  ({imp:+.1%} vs optimized)" if strategy != "optimized"
                 else ""))
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "bound": cmd_bound,
    "optimize": cmd_optimize,
    "validate": cmd_validate,
    "compare": cmd_compare,
}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="netsir",
        description="Networked SIR simulation, certified bounds, and "
                    "budgeted resource allocation.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--seed", type=int, help="override config seed")
        p.add_argument("--replicas", type=int, help="override replica count")
        p.add_argument("--out", help="override output directory")
        p.add_argument("--mode", choices=["plain", "isolation"],
                       help="override model mode")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = ExperimentConfig.load(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.replicas is not None:
            cfg.replicas = args.replicas
        if args.out is not None:
            cfg.out_dir = args.out
        if args.mode is not None:
            cfg.mode = args.mode
        return _COMMANDS[args.command](cfg)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (AllocationInfeasible, BudgetModelError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except exact_oracle.StateSpaceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
