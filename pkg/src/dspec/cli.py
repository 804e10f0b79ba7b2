"""Batch front end: solve a problem, run a transformation chain, or verify.

    dspec solve     --config problem.json --out results/ [--count N] [--tol X]
    dspec transform --config chain.json   --out results/
    dspec verify    --config verify.json  --out results/ [--count N]

Exit codes: 0 success (verify: all checks passed, skips allowed), 1 verify
found a failing check, 2 configuration error, 3 numerical failure.  The
environment variable DSPEC_THREADS caps how many verify checks run
concurrently (default 1).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import (data_chain, fit_asymptotics, hat_data_map,
                       oscillation_check, regularized_trace_series,
                       sigma_quadrature, symmetric_check, trace_closed_form)
from .errors import DomainViolation, DspecError, Unsupported
from .herglotz import boundary_close
from .jsonio import (chain_to_json, dumps, problem_from_json, problem_to_json,
                     write_spectral_csv)
from .ode import Problem
from .potential import eval_q_many, symmetrize_check
from .spectrum import product_representation_check, spectral_data
from .transform import ZONE, apply_chain, t_hat, t_tilde

PI = math.pi

SUITES = ("asymptotics", "oscillation", "trace", "chain", "symmetry", "product")


@dataclass
class RunConfig:
    """Parsed configuration of one CLI invocation."""

    problem: Problem
    out: Path
    count: int = 40
    tol: float = 1e-10
    steps: list = field(default_factory=list)
    suite: str = "all"

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.suite != "all" and self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}")


def load_config(path, out=None, count=None, tol=None) -> RunConfig:
    path = Path(path)
    raw = json.loads(path.read_text())
    prob = raw.get("problem")
    if prob is None:
        raise ValueError("config lacks a 'problem' entry")
    if isinstance(prob, str):
        ref = (path.parent / prob)
        if not ref.exists():
            raise ValueError(f"referenced problem file does not exist: {ref}")
        prob = json.loads(ref.read_text())
    problem = problem_from_json(prob)
    out_dir = Path(out) if out is not None else Path(raw.get("out", "."))
    return RunConfig(problem=problem,
                     out=out_dir,
                     count=int(count if count is not None else raw.get("count", 40)),
                     tol=float(tol if tol is not None else raw.get("tol", 1e-10)),
                     steps=list(raw.get("steps", [])),
                     suite=str(raw.get("suite", "all")))


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("DSPEC_THREADS", "1")))
    except ValueError:
        return 1


def cmd_solve(config: RunConfig) -> Path:
    """Compute (n, lambda_n, beta_n, gamma_n) and write JSON + CSV."""
    config.out.mkdir(parents=True, exist_ok=True)
    data = spectral_data(config.problem, config.count, rtol=config.tol)
    payload = {"problem": problem_to_json(config.problem), "spectral": data.to_json()}
    json_path = config.out / "spectral.json"
    json_path.write_text(dumps(payload))
    write_spectral_csv(data, config.out / "spectral.csv")
    return json_path


def cmd_transform(config: RunConfig) -> Path:
    """Apply the configured chain; write every problem snapshot and the chain log."""
    config.out.mkdir(parents=True, exist_ok=True)
    record = apply_chain(config.problem, config.steps)
    files = []
    for k, prob in enumerate(record.problems):
        name = f"problem_{k:03d}.json"
        (config.out / name).write_text(dumps(problem_to_json(prob)))
        files.append(name)
    chain_path = config.out / "chain.json"
    chain_path.write_text(dumps(chain_to_json(record, files)))
    return chain_path


def _result(name, passed, error=None, detail=""):
    return {"name": name, "status": "pass" if passed else "fail",
            "error": error, "detail": detail}


def _skipped(name, detail):
    return {"name": name, "status": "skipped", "error": None, "detail": detail}


def _check_asymptotics(problem, data, count):
    fit = fit_asymptotics(data)
    L = problem.index_sum_half
    sigma = sigma_quadrature(problem)
    r = fit.residual_sq_partial_sums
    plateau = float((r[-1] - r[int(0.9 * (r.size - 1))]) / max(r[-1], 1e-12))
    errs = {"L": abs(fit.L_hat - L),
            "sigma": abs(fit.sigma_hat - sigma),
            "gamma_exponent": abs(fit.gamma_exponent - 2 * problem.index_f),
            "plateau": plateau}
    ok = (errs["L"] == 0.0 and errs["sigma"] <= 1e-2
          and errs["gamma_exponent"] <= 0.05 and plateau <= 0.01)
    return _result("asymptotics", ok, max(errs["sigma"], errs["gamma_exponent"]),
                   dumps(errs).strip())


def _check_oscillation(problem, data, count):
    n_max = min(15, len(data) - 1)
    ok = oscillation_check(problem, data, n_max)
    return _result("oscillation", ok, None, f"n <= {n_max}")


def _check_trace(problem, data, count):
    if not problem.q.is_analytic:
        return _skipped("trace", "Unsupported: sampled potential, smoothness unknown")
    N = max(50, min(100, (len(data) - 1) // 2))
    series = regularized_trace_series(problem, N,
                                      data=data if len(data) >= 2 * N + 1 else None)
    closed = trace_closed_form(problem)
    err = abs(series - closed)
    return _result("trace", err <= 1e-3, err,
                   f"series={series:.8g} closed={closed:.8g} N={N}")


def _check_chain(problem, data, count):
    hat, mu, nu = t_hat(problem)
    back = t_tilde(mu, nu, hat)
    x = np.asarray(back.q.grid)
    keep = (x >= ZONE) & (x <= PI - ZONE)
    q_err = float(np.max(np.abs(np.asarray(back.q.values)[keep]
                                - eval_q_many(problem.q, x[keep]))))
    bc_ok = (boundary_close(back.f, problem.f, 1e-8)
             and boundary_close(back.F, problem.F, 1e-8))
    lam2, gam2 = data_chain(data.lambdas, data.gammas, 2,
                            [data.lambdas[0] - 2.0, data.lambdas[0] - 1.0], [1.0, 1.0])
    for _ in range(2):
        lam2, gam2 = hat_data_map(lam2, gam2)
    alg_err = float(max(np.max(np.abs(lam2 - data.lambdas)),
                        np.max(np.abs(gam2 / data.gammas - 1.0))))
    ok = q_err <= 1e-5 and bc_ok and alg_err <= 1e-10
    return _result("chain", ok, max(q_err, alg_err),
                   f"roundtrip q sup={q_err:.3g} boundaries={'ok' if bc_ok else 'bad'} "
                   f"data-chain={alg_err:.3g}")


def _check_symmetry(problem, data, count):
    expected = (boundary_close(problem.f, problem.F, 1e-12)
                and symmetrize_check(problem.q, 1e-8))
    got = symmetric_check(problem, data)
    return _result("symmetry", expected == got, None,
                   f"expected={expected} beta-test={got}")


def _check_product(problem, data, count):
    M = len(data) - 1
    if M < 50:
        return _skipped("product", f"needs >= 51 eigenvalues, have {M + 1}")
    lam = data.lambdas
    samples = [lam[0] - 0.7, 0.5 * (lam[0] + lam[1]), 0.5 * (lam[1] + lam[2])]
    tol = max(0.01, 3.0 / M)
    worst = 0.0
    for s in samples:
        ratio = product_representation_check(problem, float(s), M, data=data)
        worst = max(worst, abs(ratio - 1.0))
    return _result("product", worst <= tol, worst, f"M={M} tol={tol:.3g}")


_CHECKS = {
    "asymptotics": _check_asymptotics,
    "oscillation": _check_oscillation,
    "trace": _check_trace,
    "chain": _check_chain,
    "symmetry": _check_symmetry,
    "product": _check_product,
}


def cmd_verify(config: RunConfig) -> tuple[Path, bool]:
    """Run the selected verification checks; write a JSON report."""
    config.out.mkdir(parents=True, exist_ok=True)
    names = list(SUITES) if config.suite == "all" else [config.suite]
    data = spectral_data(config.problem, config.count, rtol=config.tol)

    def run(name):
        try:
            return _CHECKS[name](config.problem, data, config.count)
        except Unsupported as exc:
            return _skipped(name, f"Unsupported: {exc}")

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, names))
    else:
        results = [run(name) for name in names]
    ok = all(r["status"] != "fail" for r in results)
    report = {"problem": problem_to_json(config.problem),
              "count": config.count,
              "checks": results,
              "overall": "pass" if ok else "fail"}
    path = config.out / "report.json"
    path.write_text(dumps(report))
    return path, ok


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dspec", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("solve", "transform", "verify"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--count", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config, out=args.out, count=args.count, tol=args.tol)
        if args.command == "solve":
            path = cmd_solve(config)
        elif args.command == "transform":
            path = cmd_transform(config)
        else:
            path, ok = cmd_verify(config)
            print(path)
            return 0 if ok else 1
        print(path)
        return 0
    except (OSError, json.JSONDecodeError, KeyError, ValueError, TypeError,
            DomainViolation) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DspecError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
