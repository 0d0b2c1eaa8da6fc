"""Command-line interface.

Subcommands: construct | verify | solve | bench | noise-check. Every
subcommand takes --seed (default 0), --out and --format. Runs that write an
output file also write ``<out>.manifest.json`` recording the command, all
resolved parameters, the package version and the seed, so any number in a
report can be regenerated from the manifest alone (nothing time-dependent
is ever written). Exit codes: 0 when every asserted check passed, 1 when a
check failed, 2 on usage errors.

Vectors in problem/solution JSON are written with 17 significant digits,
enough to round-trip doubles exactly.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bench import (ExperimentReport, RecoveryInstance, mvse_sweep,
                    ols_oracle_comparison, run_dantzig_experiment,
                    run_lasso_experiment, run_recovery_experiment)
from .design import DesignMatrix
from .errors import CapacityError, SolverStatusError
from .fields import GF, is_prime
from .graphs import (graph_from_json_dict, graph_to_json_dict, load_graph,
                     matching_graph, pv_expander, random_left_regular)
from .noise import NoiseModel, empirical_noise_bound, thresholds
from .solve import basis_pursuit, dantzig, lasso
from .verify import (check_expansion_exhaustive, check_expansion_sampled,
                     check_kernel_concentration, check_rip1_sampled,
                     check_up2_sampled, nullspace_property_oracle,
                     report_from_json_dict)


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------

def dumps_17g(obj, indent: int = 0) -> str:
    """JSON text with every float rendered at 17 significant digits."""
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(str(k))}: {dumps_17g(v, indent + 2).lstrip()}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, bool)) or v is None for v in seq):
            return "[" + ", ".join(dumps_17g(v).strip() for v in seq) + "]"
        items = [pad + "  " + dumps_17g(v, indent + 2).lstrip() for v in seq]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return json.dumps(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        return f"{obj:.17g}"
    if isinstance(obj, np.ndarray):
        return dumps_17g(obj.tolist(), indent)
    if isinstance(obj, (np.integer, np.floating, np.bool_)):
        return dumps_17g(obj.item(), indent)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        print(text)
    else:
        Path(out).write_text(text + "\n", encoding="utf-8")


def _write_manifest(out: Path | None, command: str, params: dict) -> None:
    if out is None:
        return
    manifest = {
        "command": command,
        "version": __version__,
        "params": params,
        "output": str(out),
    }
    Path(str(out) + ".manifest.json").write_text(
        dumps_17g(manifest) + "\n", encoding="utf-8")


def _graph_from_spec(spec, seed: int):
    """Graph from a file path or an inline construction object."""
    if isinstance(spec, str):
        return load_graph(spec)
    if not isinstance(spec, dict):
        raise ValueError("design must be a path or a construction object")
    kind = spec.get("kind")
    if kind == "random":
        return random_left_regular(spec["p"], spec["d"], spec["n"],
                                   spec.get("seed", seed))
    if kind == "pv":
        r, k = _prime_power(spec["q"])
        return pv_expander(GF(r, k), spec["l"], spec["m"], spec["h"])
    if kind == "matching":
        return matching_graph(spec["n"])
    if kind == "graph":
        return graph_from_json_dict(spec)
    raise ValueError(f"unknown design kind {kind!r}")


def _load_design(spec, seed: int) -> DesignMatrix:
    return DesignMatrix.from_graph(_graph_from_spec(spec, seed))


def _prime_power(q: int) -> tuple[int, int]:
    for r in range(2, q + 1):
        if q % r == 0:
            if not is_prime(r):
                break
            k = 0
            t = q
            while t % r == 0:
                t //= r
                k += 1
            if t == 1:
                return r, k
            break
    raise ValueError(f"{q} is not a prime power")


def _parse_noise_model(n: int, sigma: float, model) -> NoiseModel:
    """Accepts 'iid', 'ar1:RHO', or {'kind': ..., 'rho'/'corr': ...}."""
    if isinstance(model, str):
        if model == "iid":
            return NoiseModel(n, sigma)
        if model.startswith("ar1:"):
            return NoiseModel(n, sigma, "ar1", rho=float(model[4:]))
        raise ValueError(f"unknown noise model {model!r}")
    if isinstance(model, dict):
        kind = model.get("kind", "iid")
        if kind == "iid":
            return NoiseModel(n, sigma)
        if kind == "ar1":
            return NoiseModel(n, sigma, "ar1", rho=float(model["rho"]))
        if kind == "explicit":
            return NoiseModel(n, sigma, "explicit",
                              corr=np.asarray(model["corr"], dtype=np.float64))
    raise ValueError(f"cannot parse noise model {model!r}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _usage(message: str) -> None:
    print(f"usage error: {message}", file=sys.stderr)
    raise SystemExit(2)


def _cmd_construct(args) -> int:
    if args.kind == "pv":
        for name in ("q", "l", "m", "h"):
            if getattr(args, name) is None:
                _usage(f"construct pv requires --{name}")
        r, k = _prime_power(args.q)
        g = pv_expander(GF(r, k), args.l, args.m, args.h)
        params = {"kind": "pv", "q": args.q, "l": args.l, "m": args.m, "h": args.h}
    else:
        for name in ("p", "d", "n"):
            if getattr(args, name) is None:
                _usage(f"construct random requires --{name}")
        g = random_left_regular(args.p, args.d, args.n, args.seed)
        params = {"kind": "random", "p": args.p, "d": args.d, "n": args.n,
                  "seed": args.seed}
    _emit(json.dumps(graph_to_json_dict(g), indent=2), args.out)
    _write_manifest(args.out, "construct", params)
    return 0


def _cmd_verify(args) -> int:
    g = load_graph(args.graph)
    X = DesignMatrix.from_graph(g)
    if args.check == "expansion":
        if args.mode == "exhaustive":
            report = check_expansion_exhaustive(g, args.s, args.eps, args.budget)
        else:
            report = check_expansion_sampled(g, args.s, args.eps, args.trials, args.seed)
    elif args.check == "rip1":
        report = check_rip1_sampled(X, args.s, args.eps, args.trials, args.seed)
    elif args.check == "up2":
        report = check_up2_sampled(X, args.s, args.trials, args.seed)
    elif args.check == "kernel":
        report = check_kernel_concentration(X, args.s, args.trials, args.seed)
    else:
        report = nullspace_property_oracle(X, args.s, args.budget)
    if args.format == "csv":
        d = report.to_json_dict()
        head = "condition,ok,worst_ratio,trials,seed"
        ratio = "" if d["worst_ratio"] is None else f'{d["worst_ratio"]:.17g}'
        line = f'{d["condition"]},{int(d["ok"])},{ratio},{d["trials"]},{d["seed"]}'
        _emit(head + "\n" + line, args.out)
    else:
        _emit(dumps_17g(report.to_json_dict()), args.out)
    _write_manifest(args.out, "verify", {
        "graph": str(args.graph), "check": args.check, "mode": args.mode,
        "s": args.s, "eps": args.eps, "trials": args.trials,
        "budget": args.budget, "seed": args.seed})
    return 0 if report.ok else 1


def _cmd_solve(args) -> int:
    problem = json.loads(Path(args.problem).read_text(encoding="utf-8"))
    estimator = problem["estimator"]
    X = _load_design(problem.get("graph") or problem["graph_path"], args.seed)
    y = np.asarray(problem["y"], dtype=np.float64)
    code = 0
    if estimator == "lasso":
        sol = lasso(X, y, problem["lambda"], problem.get("tol", 1e-8),
                    problem.get("max_iter", 100000))
        result = {"estimator": "lasso", "beta": sol.beta,
                  "objective": sol.objective, "kkt_residual": sol.kkt_residual,
                  "iterations": sol.iterations, "converged": sol.converged}
        code = 0 if sol.converged else 1
    elif estimator == "dantzig":
        try:
            sol = dantzig(X, y, problem["lambda"])
            result = {"estimator": "dantzig", "beta": sol.beta,
                      "l1_norm": sol.l1_norm,
                      "constraint_slack": sol.constraint_slack,
                      "status": sol.status}
        except SolverStatusError as exc:
            result = {"estimator": "dantzig", "error": str(exc)}
            code = 1
    elif estimator == "bp":
        try:
            beta = basis_pursuit(X, y)
            result = {"estimator": "bp", "beta": beta,
                      "l1_norm": float(np.abs(beta).sum()), "status": "optimal"}
        except SolverStatusError as exc:
            result = {"estimator": "bp", "error": str(exc)}
            code = 1
    else:
        raise ValueError(f"unknown estimator {estimator!r}")
    _emit(dumps_17g(result), args.out)
    _write_manifest(args.out, "solve", {"problem": str(args.problem),
                                        "estimator": estimator, "seed": args.seed})
    return code


def _report_out(report: ExperimentReport, args, extra_params: dict) -> None:
    if args.format == "json":
        rows = [dict(zip(("trial", "check", "event", "converged", "lhs", "rhs",
                          "holds", "pred_error", "offsupport_mass"), r))
                for r in list(report.csv_rows())[1:]]
        _emit(dumps_17g({"params": report.params, "rows": rows,
                         "pass_fractions": report.pass_fractions(),
                         "event_frequency": report.event_frequency,
                         "flagged": report.flagged}), args.out)
    else:
        text = "\n".join(",".join(str(v) for v in row) for row in report.csv_rows())
        _emit(text, args.out)
    _write_manifest(args.out, "bench", extra_params)


def _cmd_bench(args) -> int:
    config = json.loads(Path(args.config).read_text(encoding="utf-8"))
    seed = config.get("seed", args.seed)
    X = _load_design(config["design"], seed)

    if args.kind in ("lasso", "dantzig"):
        noise_cfg = config.get("noise", {})
        model = _parse_noise_model(X.n, noise_cfg.get("sigma", 1.0),
                                   noise_cfg.get("model", "iid"))
        target = config.get("target", {})
        inst = RecoveryInstance.build(
            X, target.get("kind", "exact-sparse"), target.get("s", 2),
            model, config["lambda_multiple"], seed)
        run = run_lasso_experiment if args.kind == "lasso" else run_dantzig_experiment
        report = run(inst, config.get("trials", 100))
        _report_out(report, args, {"config": config, "seed": seed})
        eta = thresholds(1.0, X.n).eta_n
        ok = report.all_event_checks_hold() and report.event_bound_ok(eta)
        summary = {"event_frequency": report.event_frequency,
                   "pass_fractions": report.pass_fractions(),
                   "flagged": report.flagged, "ok": ok}
        print(dumps_17g(summary), file=sys.stderr)
        return 0 if ok else 1

    if args.kind == "recovery":
        s = config["s"]
        if "certificate" in config:
            cert = report_from_json_dict(json.loads(
                Path(config["certificate"]).read_text(encoding="utf-8")))
        else:
            certify = config.get("certify", {})
            cert = check_expansion_exhaustive(
                _graph_from_spec(config["design"], seed),
                certify.get("s", 2 * s), certify.get("eps", 0.125),
                certify.get("budget", 10**7))
        report = run_recovery_experiment(X, s, config.get("trials", 100), seed, cert)
        _report_out(report, args, {"config": config, "seed": seed})
        ok = report.all_event_checks_hold() and report.flagged == 0
        return 0 if ok else 1

    if args.kind == "ols":
        noise_cfg = config.get("noise", {})
        model = _parse_noise_model(X.n, noise_cfg.get("sigma", 1.0),
                                   noise_cfg.get("model", "iid"))
        inst = RecoveryInstance.build(X, "exact-sparse", config.get("s", 2),
                                      model, 6.0, seed)
        out = ols_oracle_comparison(inst, config.get("trials", 1000),
                                    config.get("include_estimators", False))
        _emit(dumps_17g(out), args.out)
        _write_manifest(args.out, "bench", {"config": config, "seed": seed})
        return 0 if out["within_10pct"] else 1

    # mvse
    ps = config["ps"]
    if "s_values" in config:
        s_map = dict(zip(ps, config["s_values"]))
        s_rule = s_map.__getitem__
    else:
        expo = config.get("s_exponent", 0.4)
        s_rule = lambda p: max(1, round(p**expo))
    rows = mvse_sweep(ps, s_rule, config.get("alpha", 1.0),
                      config.get("trials", 50), seed,
                      sigma=config.get("sigma", 1.0), d=config.get("d", 8),
                      n=config.get("n", 1536))
    if args.format == "json":
        _emit(dumps_17g(rows), args.out)
    else:
        cols = ["p", "s", "d", "n", "alpha", "skipped", "certified",
                "graph_seed", "proxy", "bound"]
        lines = [",".join(cols)]
        for row in rows:
            vals = []
            for cname in cols:
                v = row.get(cname)
                vals.append("" if v is None else
                            (f"{v:.17g}" if isinstance(v, float) else str(v)))
            lines.append(",".join(vals))
        _emit("\n".join(lines), args.out)
    _write_manifest(args.out, "bench", {"config": config, "seed": seed})
    return 0 if all(not r["skipped"] for r in rows) else 1


def _cmd_noise_check(args) -> int:
    if args.graph:
        X = DesignMatrix.from_graph(load_graph(args.graph))
        if X.n != args.n:
            raise ValueError(f"graph has {X.n} rows, --n says {args.n}")
    else:
        # identity permutation design: ||X^T z||_inf equals ||z||_inf, the
        # extremal case allowed by non-amplification
        X = DesignMatrix.from_graph(matching_graph(args.n))
    model = _parse_noise_model(args.n, args.sigma, args.model)
    check = empirical_noise_bound(X, model, args.t, args.trials, args.seed)
    _emit(dumps_17g(check.to_json_dict()), args.out)
    _write_manifest(args.out, "noise-check", {
        "n": args.n, "sigma": args.sigma, "t": args.t, "trials": args.trials,
        "model": args.model, "graph": str(args.graph) if args.graph else None,
        "seed": args.seed})
    return 0 if check.passed else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="expander-cs",
        description="Expander-graph design matrices: construct, verify, solve, bench.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--out", type=Path, default=None, help="output path")
    common.add_argument("--format", choices=["json", "csv"], default=None)

    c = sub.add_parser("construct", parents=[common], help="build a graph file")
    c.add_argument("kind", choices=["pv", "random"])
    c.add_argument("--q", type=int, help="field order (prime power), pv only")
    c.add_argument("--l", type=int, help="polynomial degree bound, pv only")
    c.add_argument("--m", type=int, help="number of power maps, pv only")
    c.add_argument("--h", type=int, help="power base >= 2, pv only")
    c.add_argument("--p", type=int, help="left vertices, random only")
    c.add_argument("--d", type=int, help="left degree, random only")
    c.add_argument("--n", type=int, help="right vertices, random only")
    c.set_defaults(func=_cmd_construct)

    v = sub.add_parser("verify", parents=[common], help="check a structural condition")
    v.add_argument("--graph", type=Path, required=True)
    v.add_argument("--check", choices=["expansion", "rip1", "up2", "kernel", "nsp"],
                   default="expansion")
    v.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    v.add_argument("--s", type=int, required=True)
    v.add_argument("--eps", type=float, default=0.125)
    v.add_argument("--trials", type=int, default=1000)
    v.add_argument("--budget", type=int, default=10**7)
    v.set_defaults(func=_cmd_verify)

    s = sub.add_parser("solve", parents=[common], help="solve one problem file")
    s.add_argument("--problem", type=Path, required=True)
    s.set_defaults(func=_cmd_solve)

    b = sub.add_parser("bench", parents=[common], help="run an experiment from a config")
    b.add_argument("kind", choices=["lasso", "dantzig", "recovery", "ols", "mvse"])
    b.add_argument("--config", type=Path, required=True)
    b.set_defaults(func=_cmd_bench)

    nc = sub.add_parser("noise-check", parents=[common],
                        help="Monte Carlo check of the noise tail bound")
    nc.add_argument("--n", type=int, required=True)
    nc.add_argument("--sigma", type=float, default=1.0)
    nc.add_argument("--t", type=float, default=1.0)
    nc.add_argument("--trials", type=int, default=1000)
    nc.add_argument("--model", default="iid", help="iid or ar1:RHO")
    nc.add_argument("--graph", type=Path, default=None,
                    help="graph file (default: identity permutation design)")
    nc.set_defaults(func=_cmd_noise_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, CapacityError, SolverStatusError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
