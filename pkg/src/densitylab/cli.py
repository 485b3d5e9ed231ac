"""Command-line runner: one subcommand per experiment, CSV tables, JSON reports.

Exit codes: 0 success, 1 a check failed, 2 bad input, 3 resource cap hit.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import acceptance, calibration, cartan, counting, graphs, lifting, spectral, trees
from .errors import CheckFailure, InputError, ResourceError
from .matgroups import SubgroupSpec


def _grid(text: str, cast=float) -> list:
    """'1,2,5' or 'start:stop[:step]' (stop inclusive)."""
    text = str(text)
    try:
        if ":" in text:
            parts = [cast(x) for x in text.split(":")]
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else cast(1)
            if step <= 0:
                raise InputError("grid step must be positive")
            out, v = [], start
            while v <= stop + 1e-12:
                out.append(v)
                v = cast(v + step)
            return out
        return [cast(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"bad grid {text!r}: {exc}") from exc


class Result:
    """A table plus named checks and measured constants."""

    def __init__(self, name, header, rows, checks=None, constants=None):
        self.name = name
        self.header = header
        self.rows = rows
        self.checks = checks or {}
        self.constants = constants or {}


# --------------------------------------------------------------------------
# subcommands

def cmd_count(a) -> Result:
    n = 2 if a.group == "sl2" else 3
    spec = SubgroupSpec(n, a.kind, a.level)
    checks = {}
    if a.length_bound is not None:
        method = {"brute": "direct", "fast": None, "fixed-point": "fixed-point", "both": "both"}[a.method]
        if method is None:
            raise InputError("the fast counter takes norm bounds only")
        prof = counting.radius_profile(spec, _grid(a.length_bound), a.length_kind, method)
        if method == "both":
            checks["direct == fixed-point"] = prof.paths_agree()
        rows = [(d, float(avg), ref, ratio) for d, avg, ref, ratio in prof.rows]
        return Result("count", ["bound", "count", "reference", "ratio"], rows, checks)
    if a.norm_bound is None:
        raise InputError("give --norm-bound or --length-bound")
    rows = []
    fast_ok = a.method in ("fast", "both") and n == 2 and a.kind == "principal"
    if a.method in ("fast", "both") and not fast_ok and a.method == "fast":
        raise InputError("the fast counter covers principal subgroups of SL_2 only")
    agree = True
    for T in _grid(a.norm_bound, int):
        if a.method == "fast":
            c = counting.count_sarnak_xue_fast(a.level, T).count
        else:
            c = counting.count_bruteforce(spec, T).count
            if fast_ok:
                agree &= c == counting.count_sarnak_xue_fast(a.level, T).count
        rows.append((T, c, T, c / T if T else math.nan))
    if a.method == "both" and fast_ok:
        checks["fast == brute"] = agree
    return Result("count", ["bound", "count", "reference", "ratio"], rows, checks)


def cmd_lift(a) -> Result:
    spec = SubgroupSpec(2, a.spec, a.level)
    grid = _grid(a.t_grid, int) if a.t_grid else None
    curve = lifting.coverage_curve(spec, grid, annulus=a.annulus)
    consts = {}
    for f in (0.5, 0.99, 1.0):
        k = lifting.lifting_exponent(curve, f)
        consts[f"kappa({f})"] = k.kappa if k.reached else "unreached"
    return Result("lift", ["T", "ball_size", "covered", "fraction"], curve.rows, {}, consts)


def cmd_diameter(a) -> Result:
    g = graphs.read_edge_list(a.graph_file)
    st = lifting.almost_diameter(g, seed=a.seed)
    rows = [(d, int(c)) for d, c in enumerate(st.histogram)]
    consts = {"mean": st.mean, "sampled_sources": st.sampled_sources}
    consts.update({f"within(1+{e})log_q n": v for e, v in st.within.items()})
    return Result("diameter", ["distance", "pairs"], rows, {}, consts)


def cmd_tree(a) -> Result:
    if a.check_convolution:
        rep = trees.check_convolution_lemma(a.q, a.radius, calibration.CONVOLUTION_CONSTANT)
        checks = {} if rep.degenerate else {"convolution bound": rep.holds}
        return Result("tree", ["d", "count", "bound", "ratio"], rep.rows, checks,
                      {"convolution_constant": rep.max_ratio})
    rows = []
    for d in range(2 * a.radius + 1):
        c = trees.tree_convolution(a.q, a.radius, a.radius, d)
        b = float(a.q) ** ((2 * a.radius - d) / 2)
        rows.append((d, c, b, c / b))
    return Result("tree", ["d", "count", "bound", "ratio"], rows, {},
                  {"convolution_constant": max(r[3] for r in rows)})


def _family_graph(family: str, params: str, seed: int):
    vals = [v.strip() for v in params.split(",") if v.strip()] if params else []
    try:
        if family == "lps":
            p, q = int(vals[0]), int(vals[1])
            return graphs.build_lps(p, q, allow_bipartite=True)
        if family == "cayley":
            return graphs.build_cayley_sl2(int(vals[0]))
        if family == "random":
            n, k = int(vals[0]), int(vals[1])
            return graphs.random_regular(n, k, seed=int(vals[2]) if len(vals) > 2 else seed)
        if family == "file":
            return graphs.read_edge_list(params)
    except (IndexError, ValueError) as exc:
        raise InputError(f"bad --params {params!r} for family {family}") from exc
    raise InputError(f"unknown family {family!r}")


def cmd_spectra(a) -> Result:
    g = _family_graph(a.family, a.params, a.seed)
    q = g.q
    lam = spectral.adjacency_spectrum(g).eigenvalues
    checks, consts = {}, {}
    if a.nb:
        rep = spectral.ramanujan_report(g, nb_method="arnoldi", seed=a.seed)
        checks["adjacency Ramanujan"] = rep.adjacency_ok
        checks["non-backtracking Ramanujan"] = rep.nonbacktracking_ok
        checks["criteria agree"] = rep.consistent
        consts.update(max_adjacency=rep.max_adjacency, max_nonbacktracking=rep.max_nonbacktracking)
    if a.profile:
        grid = _grid(a.p_grid)
        prof = spectral.density_profile(lam, q, grid)
        rows = [(p, m, g.n ** (2.0 / p)) for p, m in prof.samples]
        return Result("spectra", ["p", "M", "bound"], rows, checks, consts)
    rows = [("adjacency", i, float(x), 0.0) for i, x in enumerate(lam)]
    if a.nb:
        mu = spectral.nonbacktracking_spectrum(g, "auto").eigenvalues
        rows += [("nonbacktracking", i, float(x.real), float(x.imag)) for i, x in enumerate(mu)]
    return Result("spectra", ["kind", "index", "real", "imag"], rows, checks, consts)


def cmd_xi(a) -> Result:
    rows, inside = [], True
    p = math.inf if a.p in ("inf", "infinity") else float(a.p)
    for t in _grid(a.t):
        g = np.diag([math.exp(t / 2), math.exp(-t / 2)])
        est, se = cartan.xi_p_montecarlo(g, p, samples=a.samples, seed=a.seed, threads=a.threads)
        hi, lo = cartan.xi_upper_bound(t), cartan.xi_lower_bound(t)
        if p == 2:
            inside &= lo - 3 * se <= est <= hi + 3 * se
        rows.append((t, p, est, se, hi, lo))
    checks = {"within bounds": inside} if p == 2 else {}
    return Result("xi", ["t", "p", "estimate", "std_error", "upper_bound", "lower_bound"], rows, checks)


def cmd_accept(a) -> Result:
    rep = acceptance.acceptance_suite(quick=a.quick, echo=lambda s: print(s, file=sys.stderr))
    rows = [(c["number"], c["name"], c["passed"], round(c["seconds"], 3), c["detail"]) for c in rep["checks"]]
    checks = {f"{c['number']} {c['name']}": c["passed"] for c in rep["checks"]}
    return Result("accept", ["criterion", "name", "passed", "seconds", "detail"], rows, checks,
                  rep["constants"])


COMMANDS = {
    "count": cmd_count, "lift": cmd_lift, "diameter": cmd_diameter, "tree": cmd_tree,
    "spectra": cmd_spectra, "xi": cmd_xi, "accept": cmd_accept,
}


# --------------------------------------------------------------------------
# output

def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def write_csv(res: Result, config: dict, seed: int, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(res.header)
    for row in res.rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    fh.write(f"#config-hash={config_hash(config)},#seed={seed}\n")


def _config_of(a) -> dict:
    return {k: v for k, v in vars(a).items() if k not in ("func", "out_dir", "threads")}


def _emit(res: Result, a, config: dict, stem: str | None = None) -> None:
    if a.out_dir:
        out = Path(a.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / f"{stem or res.name}.csv", "w") as fh:
            write_csv(res, config, a.seed, fh)
    else:
        write_csv(res, config, a.seed, sys.stdout)


def _report_entry(res: Result, config: dict, seconds: float) -> dict:
    return {"config": config, "checks": res.checks, "constants": res.constants,
            "seconds": round(seconds, 3)}


# --------------------------------------------------------------------------
# config runner

def run(config: dict, defaults: argparse.Namespace | None = None, out_dir=None) -> dict:
    """Execute every experiment of a config dict and return the report.

    Schema: {"seed": int, "experiments": [{"kind": <subcommand>, <flag>: <value>, ...}]}
    where flags are the subcommand's long options with dashes as underscores.
    """
    if not isinstance(config, dict) or not isinstance(config.get("experiments", []), list):
        raise InputError("config must be an object with an 'experiments' list")
    parser = build_parser()
    seed = int(config.get("seed", 0))
    report = {"config": config, "experiments": [], "passed": True}
    for i, exp in enumerate(config.get("experiments", [])):
        if not isinstance(exp, dict) or exp.get("kind") not in COMMANDS:
            raise InputError(f"experiment {i}: unknown kind {exp.get('kind') if isinstance(exp, dict) else exp!r}")
        argv = ["--seed", str(exp.get("seed", seed)), exp["kind"]]
        for key, val in exp.items():
            if key in ("kind", "seed"):
                continue
            flag = "--" + key.replace("_", "-")
            if val is True:
                argv.append(flag)
            elif val is False or val is None:
                continue
            else:
                argv += [flag, ",".join(map(str, val)) if isinstance(val, list) else str(val)]
        try:
            a = parser.parse_args(argv)
        except SystemExit as exc:
            raise InputError(f"experiment {i} ({exp['kind']}): invalid parameters {argv[3:]}") from exc
        a.out_dir = out_dir
        if defaults is not None:
            a.threads = defaults.threads
        t0 = time.perf_counter()
        try:
            res = COMMANDS[a.command](a)
        except (InputError, ResourceError) as exc:
            raise type(exc)(f"experiment {i} ({exp['kind']}): {exc}") from exc
        cfg = _config_of(a)
        if out_dir:
            _emit(res, a, cfg, stem=f"{i:02d}-{res.name}")
        entry = _report_entry(res, cfg, time.perf_counter() - t0)
        entry["checks_text"] = [f"{k}: {str(v).lower()}" for k, v in res.checks.items()]
        report["experiments"].append(entry)
        report["passed"] &= all(res.checks.values())
    return report


# --------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="densitylab", description=__doc__.splitlines()[0])
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--quick", action="store_true", help="reduced grids for the acceptance suite")
    ap.add_argument("--out-dir", default=None, help="write CSV/JSON here instead of stdout")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="lattice-point counts in congruence subgroups")
    p.add_argument("--group", choices=["sl2", "sl3"], default="sl2")
    p.add_argument("--kind", choices=["principal", "gamma0", "gamma2"], default="principal")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--norm-bound", help="T or a grid of T")
    p.add_argument("--length-bound", help="d0 or a grid of d0")
    p.add_argument("--length-kind", choices=["cartan", "lognorm"], default="cartan")
    p.add_argument("--method", choices=["brute", "fast", "fixed-point", "both"], default="brute")

    p = sub.add_parser("lift", help="coverage of the quotient by small lifts")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--spec", choices=["principal", "gamma0"], default="principal")
    p.add_argument("--t-grid", default=None, help="default: every T up to full coverage")
    p.add_argument("--annulus", action="store_true")

    p = sub.add_parser("diameter", help="distance histogram of a graph")
    p.add_argument("--graph-file", required=True)

    p = sub.add_parser("tree", help="ball intersections in the regular tree")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--check-convolution", action="store_true")

    p = sub.add_parser("spectra", help="graph spectra and density profiles")
    p.add_argument("--family", choices=["lps", "cayley", "random", "file"], required=True)
    p.add_argument("--params", default="")
    p.add_argument("--nb", action="store_true", help="include the non-backtracking spectrum")
    p.add_argument("--profile", action="store_true", help="emit M(p) instead of eigenvalues")
    p.add_argument("--p-grid", default="2,2.5,3,4,6,10")

    p = sub.add_parser("xi", help="Monte-Carlo Xi_p(a_t)")
    p.add_argument("--t", default="1:10")
    p.add_argument("--p", default="2")
    p.add_argument("--samples", type=int, default=10**5)

    sub.add_parser("accept", help="run the acceptance suite")

    p = sub.add_parser("run", help="run every experiment in a JSON config file")
    p.add_argument("config")
    return ap


def _dispatch(a) -> int:
    if a.command == "run":
        try:
            config = json.loads(Path(a.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config: {exc}") from exc
        rep = run(config, defaults=a, out_dir=a.out_dir)
        text = json.dumps(rep, indent=2, default=str)
        if a.out_dir:
            (Path(a.out_dir) / "report.json").write_text(text + "\n")
        print(text)
        return 0 if rep["passed"] else 1
    res = COMMANDS[a.command](a)
    config = _config_of(a)
    _emit(res, a, config)
    if a.out_dir:
        rep = _report_entry(res, config, 0.0)
        (Path(a.out_dir) / f"{res.name}.json").write_text(json.dumps(rep, indent=2, default=str) + "\n")
    for k, v in res.checks.items():
        print(f"{k}: {str(v).lower()}", file=sys.stderr)
    for k, v in res.constants.items():
        print(f"{k} = {v}", file=sys.stderr)
    if not all(res.checks.values()):
        raise CheckFailure(", ".join(k for k, v in res.checks.items() if not v))
    return 0


def main(argv=None) -> int:
    a = build_parser().parse_args(argv)
    try:
        return _dispatch(a)
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
