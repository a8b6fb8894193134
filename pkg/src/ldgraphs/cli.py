"""Command-line driver: ldgraphs {rate,solve,mc,enumerate,spectra,netcheck,verify}.

Parameters come from a JSON config (--config), overridden by flags. The
seed is taken from --seed, then LDG_SEED, then the config, then 0; the
thread count from --threads, then the config, then LDG_THREADS. Exit codes:
0 success, 1 a check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import graphs, io, netcover, rates, varsolve
from .graphs import load_pattern

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- config

DEFAULTS = {
    "rate": {"pattern": ["C3"], "N": 1000, "p": 0.01, "u": [1.0]},
    "solve": {"pattern": "C3", "functional": "hom", "alpha": None, "N": 50, "p": 0.2,
              "level": 2.0, "dir": "upper"},
    "mc": {"functional": "C3", "N": 6, "p": 0.5, "t_abs": None, "t": None, "dir": "ge",
           "samples": 100_000, "tilt": "none"},
    "enumerate": {"functional": "C3", "N": 4, "p": 0.5, "t_abs": None, "t": None, "dir": "ge",
                  "exact": True},
    "spectra": {"N": 50, "p": 0.1, "R": [1, 2, 4, 8], "K": 2.0, "samples": 1000,
                "alphas": [3.0, 4.0], "C": 1.0, "C_prime": 1.0},
    "netcheck": {"trials": 2500, "delta": 1e-6},
    "verify": {"criteria": None, "repeat": True},
}


def _env_int(name: str, positive: bool = False):
    v = os.environ.get(name)
    if v is None or v == "":
        return None
    try:
        x = int(v, 0)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {v!r}")
    if positive and x < 1:
        raise UsageError(f"{name} must be a positive integer")
    if not positive and not 0 <= x < 2 ** 64:
        raise UsageError(f"{name} must be a 64-bit unsigned integer")
    return x


def load_config(path) -> dict:
    if path is None:
        return {}
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed config {path}: {exc}")
    if not isinstance(doc, dict):
        raise UsageError("config must be a JSON object")
    return doc


def resolve(args) -> dict:
    """Merge defaults, the JSON config and explicit flags into one parameter block."""
    cmd = args.command
    doc = load_config(args.config)
    block = dict(DEFAULTS[cmd])
    # either a flat document or one keyed by subcommand
    src = doc.get(cmd, doc) if isinstance(doc.get(cmd, None), dict) else doc
    for k, v in src.items():
        if k in ("seed", "threads", "out", cmd):
            continue
        key = k.replace("-", "_")
        if key not in block:
            raise UsageError(f"unknown config field {k!r} for {cmd}")
        block[key] = v
    for k in block:
        v = getattr(args, k, None)
        if v is not None:
            block[k] = v
    seed = args.seed
    if seed is None:
        seed = _env_int("LDG_SEED")
    if seed is None:
        seed = doc.get("seed", 0)
    threads = args.threads if args.threads is not None else doc.get("threads")
    if threads is None:
        threads = _env_int("LDG_THREADS", positive=True)
    if threads is not None and int(threads) < 1:
        raise UsageError("threads must be positive")
    if not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    block["seed"] = int(seed)
    block["threads"] = None if threads is None else int(threads)
    block["out"] = args.out if args.out is not None else doc.get("out")
    return block


# ---------------------------------------------------------------- output

def emit(cfg: dict, command: str, name: str, columns, rows) -> None:
    """Print a table to stdout and, with --out, write CSV plus manifest."""
    print(",".join(columns))
    for r in rows:
        print(",".join(io.fmt(r.get(c)) for c in columns))
    if cfg.get("out"):
        out = Path(cfg["out"])
        params = {k: v for k, v in cfg.items() if k not in ("out", "threads")}
        path = io.write_csv(out / f"{name}.csv", columns, rows, cfg["seed"], io.config_hash(params))
        io.write_manifest(out / f"{name}.manifest.json", command, params, cfg["seed"], [path])


def _aslist(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _pattern(name):
    try:
        return load_pattern(str(name))
    except (ValueError, OSError) as exc:
        raise UsageError(f"bad pattern {name!r}: {exc}")


# ---------------------------------------------------------------- subcommands

def cmd_rate(cfg) -> int:
    rows = []
    for pat in _aslist(cfg["pattern"]):
        H = _pattern(pat)
        for u in _aslist(cfg["u"]):
            rows.append(rates.rate_row(H, int(cfg["N"]), float(cfg["p"]), float(u)))
    emit(cfg, "rate", "rates", rates.RATE_COLUMNS, rows)
    return EXIT_OK


SOLVE_COLUMNS = ("functional", "N", "p", "level", "direction", "threshold", "objective", "feasibility_gap",
                 "kkt_residual", "best_candidate_cost", "certified_bound", "start")


def cmd_solve(cfg) -> int:
    kind = cfg["functional"]
    H = _pattern(cfg["pattern"]) if kind == "hom" else None
    alpha = cfg["alpha"]
    if kind == "schatten":
        if alpha is None:
            raise UsageError("schatten problems need --alpha")
        alpha = math.inf if str(alpha) == "inf" else float(alpha)
    direction = cfg["dir"]
    prob = varsolve.VarProblem(kind, int(cfg["N"]), float(cfg["p"]), float(cfg["level"]), direction,
                               pattern=H, alpha=alpha)
    opts = varsolve.SolveOptions(seed=cfg["seed"], threads=cfg["threads"])
    sol = varsolve.solve_phi(prob, opts) if direction == "upper" else varsolve.solve_psi(prob, opts)
    label = H.label() if H is not None else (f"schatten:{alpha:g}" if kind == "schatten" else kind)
    row = {"functional": label, "N": prob.N, "p": prob.p, "level": prob.level, "direction": direction,
           "threshold": prob.threshold, "objective": sol.objective, "feasibility_gap": sol.feasibility_gap,
           "kkt_residual": sol.kkt_residual, "best_candidate_cost": sol.best_candidate_cost,
           "certified_bound": sol.certified_bound, "start": sol.start_label}
    emit(cfg, "solve", "solve", SOLVE_COLUMNS, [row])
    if cfg.get("out"):
        from .matrices import save_csv
        save_csv(Path(cfg["out"]) / "solve_matrix.csv", sol.X)
    return EXIT_OK


TAIL_COLUMNS = ("event", "mode", "value", "std_error", "samples", "ess", "mean_lr", "lr_std_error")


def _tail_problem(cfg):
    from .mc.functionals import TailProblem, functional_from_name

    try:
        F = functional_from_name(str(cfg["functional"]))
    except (ValueError, OSError) as exc:
        raise UsageError(str(exc))
    N, p = int(cfg["N"]), float(cfg["p"])
    if cfg["t_abs"] is not None:
        thr = float(cfg["t_abs"])
    elif cfg["t"] is not None:
        thr = float(cfg["t"]) * _mean_scale(F, N, p)
    else:
        raise UsageError("give a threshold with --t-abs or --t")
    if cfg["dir"] not in ("ge", "le"):
        raise UsageError("--dir must be 'ge' or 'le'")
    return TailProblem(F, N, p, cfg["dir"], thr)


def _mean_scale(F, N, p):
    """Scale for relative thresholds: N^n p^m for hom, C(N,2) p for edges, p(N-1) for norms."""
    from .mc.functionals import EdgeCount, HomCount

    if isinstance(F, HomCount):
        return float(N) ** F.H.n * p ** F.H.m
    if isinstance(F, EdgeCount):
        return rates.n_pairs(N) * p
    return p * (N - 1)


def _parse_tilt(text: str, N: int):
    from .mc.tilted import TiltSpec

    if text in (None, "", "none"):
        return None
    kind, _, arg = str(text).partition(":")
    try:
        if kind == "product":
            return TiltSpec("product", r=float(arg))
        if kind == "clique":
            return TiltSpec("clique", N0=int(arg))
        if kind == "hub":
            return TiltSpec("hub", k=int(arg))
    except ValueError as exc:
        raise UsageError(f"bad tilt {text!r}: {exc}")
    raise UsageError(f"unknown tilt {text!r} (use none, product:r, clique:N0, hub:k)")


def _tail_row(est):
    return {"event": est.problem.describe(), "mode": est.mode, "value": float(est.value),
            "std_error": est.std_error, "samples": est.samples, "ess": est.ess,
            "mean_lr": est.mean_lr, "lr_std_error": est.lr_std_error}


def cmd_mc(cfg) -> int:
    from .mc.tilted import is_tail, plain_mc

    tp = _tail_problem(cfg)
    tilt = _parse_tilt(cfg["tilt"], tp.N)
    samples = int(cfg["samples"])
    est = plain_mc(tp, samples, cfg["seed"]) if tilt is None else is_tail(tp, tilt, samples, cfg["seed"])
    emit(cfg, "mc", "mc", TAIL_COLUMNS, [_tail_row(est)])
    return EXIT_OK


def cmd_enumerate(cfg) -> int:
    from .mc.enumeration import enumerate_tail

    tp = _tail_problem(cfg)
    try:
        est = enumerate_tail(tp, exact=bool(cfg["exact"]))
    except ValueError as exc:
        raise UsageError(str(exc))
    print(io.fmt(float(est.value)))
    if cfg.get("out"):
        row = _tail_row(est)
        row["exact"] = str(est.value)
        params = {k: v for k, v in cfg.items() if k not in ("out", "threads")}
        out = Path(cfg["out"])
        path = io.write_csv(out / "enumerate.csv", TAIL_COLUMNS + ("exact",), [row], cfg["seed"],
                            io.config_hash(params))
        io.write_manifest(out / "enumerate.manifest.json", "enumerate", params, cfg["seed"], [path])
    return EXIT_OK


SPECTRA_COLUMNS = ("N", "p", "K", "samples", "statistic", "R", "alpha", "value")


def cmd_spectra(cfg) -> int:
    from .mc.spectral import spectral_tail_study

    Rs = [int(r) for r in _aslist(cfg["R"])]
    alphas = [float(a) for a in _aslist(cfg["alphas"])]
    rep = spectral_tail_study(int(cfg["N"]), float(cfg["p"]), Rs, float(cfg["K"]), int(cfg["samples"]),
                              cfg["seed"], alphas=alphas, C=float(cfg["C"]), C_prime=float(cfg["C_prime"]))
    base = {"N": rep.N, "p": rep.p, "K": rep.K, "samples": rep.samples}
    rows = []
    for name, v in rep.deterministic_violations.items():
        rows.append({**base, "statistic": f"violations:{name}", "value": v})
    for i, R in enumerate(Rs):
        rows.append({**base, "statistic": "freq:lambdaR", "R": R, "value": rep.frequencies["lambdaR"][i]})
        rows.append({**base, "statistic": "freq:hs_k", "R": R, "value": rep.frequencies["hs_k"][i]})
        for j, a in enumerate(alphas):
            rows.append({**base, "statistic": "freq:tail", "R": R, "alpha": a, "value": rep.frequencies["tail"][i][j]})
    rows.append({**base, "statistic": "freq:in_E_HS", "value": rep.frequencies["in_E_HS"]})
    rows.append({**base, "statistic": "freq:hs_exceed_2", "value": rep.hs_exceed_2})
    emit(cfg, "spectra", "spectra", SPECTRA_COLUMNS, rows)
    return EXIT_OK if rep.ok else EXIT_FAIL


NET_COLUMNS = ("check", "case", "value", "bound", "passed")


def netcheck_rows(trials: int, delta: float, seed: int) -> list:
    rows = []

    def add(check, case, value, bound, ok):
        rows.append({"check": check, "case": case, "value": value, "bound": bound, "passed": bool(ok)})

    st = netcover.inequality_suite(trials, seed)
    for s in st.values():
        add(f"{s.name} violations", f"{s.trials} trials", s.violations, 0, s.ok)
    rng = np.random.default_rng([seed, 11])
    N, R = 30, 5
    X = rng.random((N, N))
    X = np.triu(X, 1)
    X = X + X.T
    nr = netcover.net_perturbation_bound(X, R, delta, delta, trials=200, seed=seed)
    add("net HS chain min slack", f"N={N} R={R} delta={delta:g}", nr.min_slack, 0.0, nr.min_slack >= 0)
    add("rank-one identity error", f"N={N}", nr.rank_one_identity_err, 1e-10, nr.rank_one_identity_err <= 1e-10)
    cr = netcover.split_containment(X, R, 4, delta, seed=seed)
    add("residual containment", f"N={N} R={R} l=4", cr.hs_residual, cr.hs_allowance, cr.ok)
    for ell in (3, 4, 6):
        fr = netcover.cycle_fluctuation_check(30, 4, ell, 0.3, 0.3, trials=100, seed=seed)
        add("cycle fluctuation ratio", f"N=30 R=4 l={ell}", fr.max_ratio, 1 + 1e-6, fr.ok)
    fr = netcover.cycle_fluctuation_check(30, 4, 4, 0.3, 0.3, noise=0.0, trials=20, seed=seed, single=True)
    add("cycle fluctuation single eigenvalue", "N=30 R=4 l=4", fr.max_ratio, 1 + 1e-6, fr.ok)
    center = 0.3 * (np.ones((25, 25)) - np.eye(25))
    for H, t in ((graphs.cycle(3), 500), (graphs.cycle(4), 100), (graphs.star(3), 100)):
        hr = netcover.hom_fluctuation_check(H, center, 0.3, trials=t, seed=seed)
        add("hom fluctuation (segment integral)", f"{H.label()} N=25 p=0.3 x{t}", hr.max_ratio_integral, 1.0, hr.ok)
        add("hom fluctuation ratio (reported)", f"{H.label()} N=25 p=0.3", hr.scale_ratio, "", True)
    return rows


def cmd_netcheck(cfg) -> int:
    rows = netcheck_rows(int(cfg["trials"]), float(cfg["delta"]), cfg["seed"])
    emit(cfg, "netcheck", "netcheck", NET_COLUMNS, rows)
    return EXIT_OK if all(r["passed"] for r in rows) else EXIT_FAIL


def cmd_verify(cfg) -> int:
    from . import acceptance

    crit = cfg["criteria"]
    if crit is not None:
        crit = [int(c) for c in _aslist(crit)]
        if any(c not in acceptance.NAMES for c in crit):
            raise UsageError("criteria must be among 1..10")
    out = cfg.get("out")
    results = acceptance.run_suite(seed=cfg["seed"], threads=cfg["threads"], out_dir=out, criteria=crit,
                                   repeat=bool(cfg["repeat"]))
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"rate": cmd_rate, "solve": cmd_solve, "mc": cmd_mc, "enumerate": cmd_enumerate,
            "spectra": cmd_spectra, "netcheck": cmd_netcheck, "verify": cmd_verify}


# ---------------------------------------------------------------- parser

def _floats(s):
    return [float(x) for x in s.split(",")]


def _ints(s):
    return [int(x) for x in s.split(",")]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ldgraphs", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="output directory for CSV files and manifests")
    common.add_argument("--seed", type=lambda s: int(s, 0), help="master seed (64-bit)")
    common.add_argument("--threads", type=int, help="worker threads")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rate", parents=[common], help="rate tables")
    p.add_argument("--pattern", action="append", help="pattern name or edge-list file (repeatable)")
    p.add_argument("--N", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--u", type=_floats, help="comma-separated u values")

    p = sub.add_parser("solve", parents=[common], help="variational problems")
    p.add_argument("--functional", choices=("hom", "schatten", "edges"))
    p.add_argument("--pattern")
    p.add_argument("--alpha")
    p.add_argument("--N", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--level", type=float, help="t for hom/edges, q for Schatten")
    p.add_argument("--dir", choices=("upper", "lower"))

    for name, hlp in (("mc", "Monte Carlo / importance sampling"), ("enumerate", "exact tails")):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("--functional", "--pattern", dest="functional",
                       help="pattern name, 'edges' or 'schatten:<alpha>'")
        p.add_argument("--N", type=int)
        p.add_argument("--p", type=float)
        p.add_argument("--t-abs", dest="t_abs", type=float, help="absolute threshold")
        p.add_argument("--t", type=float, help="threshold relative to N^n p^m (hom), C(N,2)p or p(N-1)")
        p.add_argument("--dir", choices=("ge", "le"))
        if name == "mc":
            p.add_argument("--samples", type=int)
            p.add_argument("--tilt", help="none, product:r, clique:N0 or hub:k")
        else:
            p.add_argument("--float", dest="exact", action="store_const", const=False,
                           help="float summation instead of exact rationals")

    p = sub.add_parser("spectra", parents=[common], help="spectral statistics of G(N,p)")
    p.add_argument("--N", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--R", type=_ints)
    p.add_argument("--K", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--alphas", type=_floats)
    p.add_argument("--C", type=float)
    p.add_argument("--C-prime", dest="C_prime", type=float)

    p = sub.add_parser("netcheck", parents=[common], help="covering-argument inequality suites")
    p.add_argument("--trials", type=int)
    p.add_argument("--delta", type=float)

    p = sub.add_parser("verify", parents=[common], help="acceptance suite")
    p.add_argument("--criteria", type=_ints, help="subset, e.g. 1,2,3 (default all)")
    p.add_argument("--no-repeat", dest="repeat", action="store_const", const=False,
                   help="skip the rerun used for the reproducibility criterion")
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        print(f"ldgraphs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError) as exc:
        print(f"ldgraphs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None) -> None:
    sys.exit(run(argv))
