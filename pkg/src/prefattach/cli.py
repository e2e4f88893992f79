"""Command line entry point: ``prefattach <verb> --config FILE --out DIR``.

Exit codes: 0 success, 1 missing config, 2 invalid config / violated
assumption, 3 numerical failure, 4 ``compare`` tolerance exceeded.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import analysis, engine, limit_continuous, limit_discrete
from .config import ConfigError, Settings, load
from .model import AssumptionViolation, Mode, find_violations, validate_config
from .output import write_csv, write_json
from .rng import generator

EXIT_OK, EXIT_NO_CONFIG, EXIT_INVALID, EXIT_NUMERIC, EXIT_TOLERANCE = 0, 1, 2, 3, 4
VERBS = ("simulate", "solve-discrete", "solve-continuous", "compare", "inclusion-check", "validate")
MODE_OF_VERB = {"solve-discrete": Mode.DISCRETE, "solve-continuous": Mode.CONTINUOUS}


def _csv_list(text, cast):
    return [cast(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prefattach", description=__doc__.splitlines()[0])
    p.add_argument("verb", choices=VERBS)
    p.add_argument("--config", type=Path)
    p.add_argument("--out", type=Path, default=Path("out"))
    p.add_argument("--seed", type=int)
    p.add_argument("--n-steps", type=int)
    p.add_argument("--replicas", type=int)
    p.add_argument("--J", type=int, dest="J")
    p.add_argument("--h", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--tail-fraction", type=float)
    p.add_argument("--dump-weights", action="store_true", help="also write the final weight array")
    p.add_argument("--weights", type=lambda s: _csv_list(s, int), help="inclusion-check: comma-separated weights")
    p.add_argument("--k", type=int, help="inclusion-check: group size")
    p.add_argument("--draws", type=int, help="inclusion-check: Monte Carlo draws")
    return p


def _overrides(args) -> dict:
    return {
        "seed": args.seed,
        "n_steps": args.n_steps,
        "run.replicas": args.replicas,
        "solver.J": args.J,
        "solver.h": args.h,
        "solver.t_max": args.t_max,
        "analysis.tail_fraction": args.tail_fraction,
        "inclusion.weights": args.weights,
        "inclusion.k": args.k,
        "inclusion.draws": args.draws,
    }


def _run_replica(job):
    cfg, replica, run_opts = job
    res = engine.run(
        cfg,
        checkpoints=run_opts["checkpoints"],
        j_max=run_opts["j_max"],
        tail_grid=run_opts["tail_grid"],
        replica=replica,
        max_steps=run_opts["max_steps"],
    )
    return res.snapshots, res.state.weights_array()


def run_replicas(st: Settings):
    R = int(st.run["replicas"])
    if R < 1:
        raise ConfigError("replicas must be >= 1")
    jobs = [(st.model, r, st.run) for r in range(R)]
    if R == 1:
        return [_run_replica(jobs[0])]
    with ProcessPoolExecutor(max_workers=min(R, os.cpu_count() or 1)) as pool:
        return list(pool.map(_run_replica, jobs))


def _snapshot_rows(snaps, grid):
    for s in snaps:
        if s.counts is not None:
            for j in range(1, s.counts.size):
                yield (s.n, "count", j, float(s.counts[j]))
        if s.tails is not None:
            for t, v in zip(grid, s.tails):
                yield (s.n, "tail", float(t), float(v))


def cmd_simulate(st: Settings, args) -> int:
    results = run_replicas(st)
    digest, seed = st.digest, st.model.seed
    grid = st.run["tail_grid"]
    header = ("n", "kind", "key", "value")
    if len(results) == 1:
        write_csv(args.out / "snapshots.csv", header, _snapshot_rows(results[0][0], grid), digest, seed)
    else:
        per = []
        for r, (snaps, _) in enumerate(results):
            rows = list(_snapshot_rows(snaps, grid))
            write_csv(args.out / f"snapshots_r{r:03d}.csv", header, rows, digest, seed)
            per.append(rows)
        keys = [row[:3] for row in per[0]]
        summary = analysis.aggregate_ensemble([[row[3] for row in rows] for rows in per])
        ens_rows = (
            (*key, float(mu), float(se))
            for key, mu, se in zip(keys, summary.mean, summary.stderr)
        )
        write_csv(args.out / "ensemble.csv", ("n", "kind", "key", "mean", "stderr"), ens_rows, digest, seed)
    if args.dump_weights:
        for r, (_, w) in enumerate(results):
            name = "weights.csv" if len(results) == 1 else f"weights_r{r:03d}.csv"
            write_csv(args.out / name, ("i", "weight"), ((i, v.item()) for i, v in enumerate(w)), digest, seed)
    print(f"simulated {len(results)} replica(s) x {st.model.n_steps} steps -> {args.out}")
    return EXIT_OK


def _discrete_window(st: Settings, J: int):
    w = st.solver["window"]
    if w is None:
        return (max(1, J // 10), J)
    return (int(w[0]), int(w[1]))


def cmd_solve_discrete(st: Settings, args) -> int:
    J = int(st.solver["J"])
    lim = limit_discrete.solve_recursion(st.model, J)
    window = _discrete_window(st, J)
    try:
        c = limit_discrete.tail_constant_estimate(lim, window)
    except ValueError:
        c = None
    digest, seed = st.digest, st.model.seed
    write_csv(args.out / "x_j.csv", ("j", "x_j"), ((j, float(lim.x[j])) for j in range(1, J + 1)), digest, seed)
    write_json(
        args.out / "summary.json",
        {"gamma": lim.gamma, "c_estimate": c, "window": list(window), "residual_max": lim.residual_max},
        digest, seed,
    )
    print(f"gamma={lim.gamma!r} c_estimate={c!r} residual_max={lim.residual_max:.3g}")
    return EXIT_OK


def cmd_solve_continuous(st: Settings, args) -> int:
    h, t_max = float(st.solver["h"]), float(st.solver["t_max"])
    lim = limit_continuous.solve_G(st.model, t_max=t_max, h=h)
    gamma = limit_continuous.gamma_continuous(st.model)
    digest, seed = st.digest, st.model.seed
    rows = (
        (float(t), float(g), float(lo), float(hi))
        for t, g, lo, hi in zip(lim.grid, lim.g, lim.g_lower, lim.g_upper)
    )
    write_csv(args.out / "G.csv", ("t", "G", "G_lower", "G_upper"), rows, digest, seed)
    write_json(
        args.out / "summary.json",
        {"gamma": gamma, "h": h, "t_max": t_max, "max_bracket": float(lim.bracket.max())},
        digest, seed,
    )
    print(f"gamma={gamma!r} max_bracket={lim.bracket.max():.3g}")
    return EXIT_OK


def cmd_compare(st: Settings, args) -> int:
    cfg = st.model
    if cfg.mode is Mode.CONTINUOUS and not st.run["tail_grid"]:
        st.run["tail_grid"] = [0.5, 1, 2, 5, 10]
    results = run_replicas(st)
    weights0 = results[0][1]
    tol = st.analysis["sup_tolerance"]
    estimates = []
    if cfg.mode is Mode.DISCRETE:
        j_max = int(st.run["j_max"])
        emp = analysis.aggregate_ensemble([r[0][-1].counts[1:] for r in results]).mean
        J = max(int(st.solver["J"]), j_max)
        lim = limit_discrete.solve_recursion(cfg, J)
        keys = np.arange(1, j_max + 1)
        theo = lim.x[1:j_max + 1]
        lo, hi = _discrete_window(st, J // 2)
        estimates.append(("doubling_ratio_theory", analysis.doubling_ratio_exponent(lim.x, (lo, hi)).value, (lo, hi)))
        target = lim.gamma
    else:
        grid = st.run["tail_grid"]
        emp = analysis.aggregate_ensemble([r[0][-1].tails for r in results]).mean
        lim = limit_continuous.solve_G(cfg, t_max=float(st.solver["t_max"]), h=float(st.solver["h"]))
        keys = np.asarray(grid, dtype=float)
        theo = lim(keys)
        win = (lim.t_max / 5, lim.t_max / 2)
        estimates.append(("doubling_ratio_theory", analysis.doubling_ratio_exponent(lim.g, win, lim.grid).value, win))
        target = lim.gamma
    tf = float(st.analysis["tail_fraction"])
    try:
        estimates.append((f"hill_simulation(target={analysis.tail_exponent_target(cfg, target)!r})",
                          analysis.hill_exponent(weights0, tf), (tf, tf)))
    except ValueError:
        pass
    report = analysis.build_report(keys, emp, theo, cfg.n_steps, len(results), tol, estimates)
    digest, seed = st.digest, cfg.seed
    write_json(args.out / "comparison.json", report.to_dict(), digest, seed)
    write_csv(args.out / "comparison.csv", *_split(report.csv_rows()), digest, seed)
    print(f"sup_distance={report.sup_distance:.4g} tolerance={tol}")
    return EXIT_TOLERANCE if report.passed is False else EXIT_OK


def _split(rows):
    rows = list(rows)
    return rows[0], rows[1:]


def cmd_inclusion_check(st: Settings | None, args) -> int:
    inc = dict(st.inclusion) if st else {"weights": None, "k": 2, "draws": 1_000_000}
    for key in ("weights", "k", "draws"):
        if getattr(args, key) is not None:
            inc[key] = getattr(args, key)
    if not inc["weights"]:
        raise ConfigError("inclusion-check needs weights (--weights or [inclusion].weights)")
    seed = st.model.seed if st else (args.seed or 0)
    digest = st.digest if st else "none"
    state = engine.SimState.from_weights(inc["weights"])
    k, draws = int(inc["k"]), int(inc["draws"])
    groups = engine.sample_groups(state.weights, k, draws, generator(seed, 0, "anchor"))
    freq = np.bincount(groups.ravel(), minlength=state.population) / draws
    rows = []
    for i, w in enumerate(state.weights):
        p = engine.inclusion_probability(state, i, k)
        rows.append((i, w, float(freq[i]), p, abs(float(freq[i]) - p)))
    write_csv(args.out / "inclusion.csv", ("index", "weight", "empirical", "theoretical", "abs_diff"), rows, digest, seed)
    for r in rows:
        print("index={} weight={} empirical={:.5f} theoretical={:.5f}".format(*r[:4]))
    return EXIT_OK


def cmd_validate(st: Settings, args) -> int:
    found = find_violations(st.model)
    if found:
        for v in found:
            print(v)
        write_json(args.out / "validation.json", {"valid": False, "violations": [str(v) for v in found]},
                   st.digest, st.model.seed)
        return EXIT_INVALID
    print("A1–A8 satisfied")
    write_json(args.out / "validation.json", {"valid": True, "violations": []}, st.digest, st.model.seed)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "solve-discrete": cmd_solve_discrete,
    "solve-continuous": cmd_solve_continuous,
    "compare": cmd_compare,
    "validate": cmd_validate,
}


def dispatch(args) -> int:
    if args.config is None:
        if args.verb == "inclusion-check":
            return cmd_inclusion_check(None, args)
        print("error: --config is required", file=sys.stderr)
        return EXIT_NO_CONFIG
    if not args.config.is_file():
        print(f"error: config file not found: {args.config}", file=sys.stderr)
        return EXIT_NO_CONFIG
    try:
        st = load(args.config, _overrides(args))
        if args.verb == "validate":
            return cmd_validate(st, args)
        validate_config(st.model)
        want = MODE_OF_VERB.get(args.verb)
        if want is not None and st.model.mode is not want:
            raise ConfigError(f"{args.verb} needs a {want.value}-mode config")
        if args.verb == "inclusion-check":
            return cmd_inclusion_check(st, args)
        return COMMANDS[args.verb](st, args)
    except AssumptionViolation as exc:
        for v in exc.violations:
            print(v, file=sys.stderr)
        return EXIT_INVALID
    except (ConfigError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
