"""Command-line entry point: one-shot calculators and the experiment harness.

Exit codes: 0 on success with every emitted row passing, 1 when at least
one row fails its bound, 2 on input errors (bad flags, unreadable or
invalid config).  All floating-point output is printed with 17
significant digits so downstream comparisons can round-trip exactly.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from .bernstein import multivariate_grid, sikkema_constant
from .capacity import GroundSpace, capacity_from_spec, check_properties
from .choquet import (choquet_integral, choquet_integral_oracle, choquet_lp_norm)
from .experiments import ExperimentConfig, run_experiment
from .randomfn import (Grid, build_family, choquet_modulus, list_families,
                       stochastic_modulus)
from .stochastic import (SeededStream, k_modulus, lemma51_bound, max_deviation,
                         sample_order_statistics)

THREADS_ENV = "CHOQBERN_THREADS"


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _dump(obj) -> str:
    def enc(v):
        if isinstance(v, float):
            return float(_fmt(v))
        return v
    return json.dumps({k: enc(v) for k, v in obj.items()})


def _load_capacity(path: str):
    try:
        with open(path) as fh:
            spec = json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read capacity file '{path}': {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"capacity file '{path}' is not valid JSON: {exc}") from exc
    return capacity_from_spec(spec)


def _parse_subset(text: str):
    if text == "all":
        return None
    if text.strip() == "":
        return []
    return [int(s) for s in text.split(",")]


def _parse_values(text: str):
    return [float(s) for s in text.split(",")]


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_integrate(args) -> int:
    cap = _load_capacity(args.capacity)
    values = _parse_values(args.values)
    subset = _parse_subset(args.subset)
    if args.p is not None:
        print(_fmt(choquet_lp_norm(values, cap, args.p)))
        return 0
    if args.method == "oracle":
        res = choquet_integral_oracle(values, cap, subset, steps=args.steps)
    else:
        res = choquet_integral(values, cap, subset)
    print(_fmt(res.value))
    return 0


def _cmd_capacity_check(args) -> int:
    cap = _load_capacity(args.capacity)
    report = check_properties(cap, mode=args.mode)
    print(json.dumps({"monotone": report.monotone,
                      "subadditive": report.subadditive,
                      "submodular": report.submodular}))
    return 0


def _build_from_args(args):
    space = GroundSpace.of_size(args.atoms)
    params = json.loads(args.params) if args.params else {}
    return build_family(args.family, space, args.dim, params)


def _cmd_modulus(args) -> int:
    f = _build_from_args(args)
    grid = Grid(args.dim, args.grid) if args.grid else Grid.default_for(args.dim)
    if args.kind == "gamma":
        if not args.capacity:
            raise ValueError("gamma modulus needs --capacity")
        cap = _load_capacity(args.capacity)
        if cap.atom_count != args.atoms:
            raise ValueError("--atoms must match the capacity's atom count")
        deltas = [args.delta] * args.dim
        if args.delta2 is not None:
            deltas = [args.delta, args.delta2]
        value = choquet_modulus(f, cap, deltas, args.p, grid)
    elif args.kind == "k":
        value = k_modulus(f, args.delta, grid)
    else:
        value = stochastic_modulus(f, args.delta, args.atom, grid)
    print(_dump({"kind": args.kind, "delta": args.delta, "value": value}))
    return 0


def _cmd_approx(args) -> int:
    f = _build_from_args(args)
    grid = Grid(args.dim, args.grid) if args.grid else Grid.default_for(args.dim)
    n_vec = tuple([args.n] * args.dim if args.n2 is None else [args.n, args.n2])
    approx = multivariate_grid(f, n_vec, grid)
    tensor = f.grid_tensor(grid)
    w = args.atom
    sup_err = float(np.abs(tensor[..., w] - approx[..., w]).max())
    delta = 1.0 / math.sqrt(min(n_vec))
    omega = stochastic_modulus(f, delta, w, grid)
    const = sikkema_constant() if args.dim == 1 else 3.0
    bound = const * omega
    print(_dump({"n": min(n_vec), "sup_error": sup_err, "modulus": omega,
                 "bound": bound, "pass": bool(sup_err <= bound + 1e-9)}))
    return 0 if sup_err <= bound + 1e-9 else 1


def _cmd_stochastic(args) -> int:
    row = sample_order_statistics(args.n, SeededStream(args.seed, args.index))
    m_n = max_deviation(row)
    out = {"n": args.n, "seed": args.seed, "index": args.index, "m_n": m_n}
    if args.epsilon is not None:
        from .capacity import make_distortion
        u = make_distortion(args.distortion)
        out["lemma_bound"] = lemma51_bound(args.n, args.epsilon, args.r,
                                           u.derivative_at_zero)
        out["exceeds"] = bool(m_n > args.epsilon)
    print(_dump(out))
    return 0


def parse_config(path: str, seed: int | None = None,
                 workers: int | None = None) -> ExperimentConfig:
    """Read and validate an experiment config file, applying defaults."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read config file '{path}': {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"config file '{path}' is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValueError(f"config file '{path}' must hold a JSON object")
    if seed is not None:
        obj = {**obj, "seed": seed}
    cfg = ExperimentConfig.from_mapping(obj)
    if workers is not None:
        cfg.workers = max(1, workers)
    return cfg


def _cmd_experiment(args) -> int:
    cfg = parse_config(args.config, seed=args.seed,
                       workers=args.threads if args.threads else _default_threads())
    result = run_experiment(cfg)
    if args.out:
        result.write_csv(args.out)
    else:
        sys.stdout.write(result.to_csv())
    print(json.dumps(result.summary(), sort_keys=True))
    return 0 if result.all_passed else 1


def _cmd_list_families(args) -> int:
    print(json.dumps(list_families()))
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="choqbern",
        description="Choquet integration and Bernstein approximation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("integrate", help="Choquet integral of tabulated atom values")
    p.add_argument("--capacity", required=True, help="capacity JSON file")
    p.add_argument("--values", required=True, help="comma-separated atom values")
    p.add_argument("--subset", default="all", help="'all' or comma-separated indices")
    p.add_argument("--method", choices=["sorted", "oracle"], default="sorted")
    p.add_argument("--steps", type=int, default=10 ** 6)
    p.add_argument("--p", type=float, default=None,
                   help="print the L^p norm instead of the integral")
    p.set_defaults(fn=_cmd_integrate)

    p = sub.add_parser("capacity-check", help="monotonicity/subadditivity/submodularity")
    p.add_argument("--capacity", required=True)
    p.add_argument("--mode", choices=["auto", "analytic", "exhaustive"],
                   default="auto")
    p.set_defaults(fn=_cmd_capacity_check)

    p = sub.add_parser("modulus", help="moduli of continuity on a grid")
    p.add_argument("--family", required=True)
    p.add_argument("--params", default=None, help="family parameters as JSON")
    p.add_argument("--atoms", type=int, default=5)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--kind", choices=["gamma", "k", "sample"], default="k")
    p.add_argument("--capacity", default=None, help="needed for --kind gamma")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--delta2", type=float, default=None)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--atom", type=int, default=0)
    p.add_argument("--grid", type=int, default=None)
    p.set_defaults(fn=_cmd_modulus)

    p = sub.add_parser("approx", help="Bernstein approximation report for one sample")
    p.add_argument("--family", required=True)
    p.add_argument("--params", default=None)
    p.add_argument("--atoms", type=int, default=5)
    p.add_argument("--dim", type=int, default=1)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n2", type=int, default=None)
    p.add_argument("--atom", type=int, default=0)
    p.add_argument("--grid", type=int, default=None)
    p.set_defaults(fn=_cmd_approx)

    p = sub.add_parser("stochastic", help="draw one node row and report its deviation")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--r", type=float, default=0.9)
    p.add_argument("--distortion", default="rational_2t")
    p.set_defaults(fn=_cmd_stochastic)

    p = sub.add_parser("experiment", help="run a configured verification sweep")
    p.add_argument("--config", required=True, help="experiment config JSON file")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", default=None, help="write rows CSV here")
    p.add_argument("--threads", type=int, default=None,
                   help=f"worker threads (default ${THREADS_ENV} or 1)")
    p.set_defaults(fn=_cmd_experiment)

    p = sub.add_parser("list-families", help="names of built-in random functions")
    p.set_defaults(fn=_cmd_list_families)
    return parser


def run_cli(argv: Sequence[str]) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
