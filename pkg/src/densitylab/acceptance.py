"""The acceptance suite: ten end-to-end checks at their stated scale.

Module functions are looked up through their modules at call time (for
example ``trees.tree_convolution``) so a patched implementation is the one
being checked.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import calibration, cartan, counting, graphs, lifting, matgroups, spectral, trees


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def _principal(N: int) -> matgroups.SubgroupSpec:
    return matgroups.SubgroupSpec(2, "principal", N)


def counting_oracle(quick: bool = False) -> tuple[bool, str]:
    Ts = (10, 50) if quick else (10, 50, 200)
    bad = []
    for N in range(1, 9):
        for T in Ts:
            b = counting.count_bruteforce(_principal(N), T).count
            f = counting.count_sarnak_xue_fast(N, T).count
            if b != f:
                bad.append((N, T, b, f))
    return not bad, f"{8 * len(Ts)} cases, mismatches {bad}"


def sarnak_xue_exponent(quick: bool = False) -> tuple[bool, str]:
    levels = (11,) if quick else (11, 13, 17)
    slopes, uniform = {}, 0.0
    for N in levels:
        grid = counting.log_grid(N, min(N**3, 5000), 40)
        s, data = counting.sarnak_xue_slope(N, grid)
        slopes[N] = round(s, 4)
        uniform = max(uniform, max(c / t for t, c in data))
    ok = all(s <= 1.25 for s in slopes.values())
    return ok, f"slopes {slopes} (limit 1.25); max N(T)/T = {uniform:.3f}"


def fixed_point_identity(quick: bool = False) -> tuple[bool, str]:
    grid = np.arange(0.0, 8.0 + 1e-9, 1.0 if quick else 0.25)
    out, ok = [], True
    for text in ("gamma0(5)", "gamma0(7)"):
        spec = matgroups.SubgroupSpec.parse(text, 2)
        prof = counting.radius_profile(spec, grid, method="both")
        agree = prof.paths_agree()
        ok &= agree
        out.append(f"{text}: total at d0=8 {prof.totals['direct'][-1]} "
                   f"{'==' if agree else '!='} {prof.totals['fixed-point'][-1]}")
    return ok, "; ".join(out)


def tree_convolution_lemma(quick: bool = False) -> tuple[bool, str]:
    rmax = 6 if quick else 8
    mism = 0
    for q in (2, 3):
        for d in range(2 * rmax + 1):
            bfs = trees.bfs_convolution_counts(q, rmax, d)
            for r1 in range(rmax + 1):
                for r2 in range(rmax + 1):
                    if trees.tree_convolution(q, r1, r2, d) != bfs[r1, r2]:
                        mism += 1
    C = calibration.CONVOLUTION_CONSTANT
    worst = 0.0
    for q in (2, 3, 4):
        for r in range(11):
            worst = max(worst, trees.check_convolution_lemma(q, r, C).max_ratio)
    ok = mism == 0 and worst <= C
    return ok, f"BFS mismatches {mism}; max ratio {worst:.4f} vs constant {C}"


def ramanujan_certification(quick: bool = False) -> tuple[bool, str]:
    g = graphs.build_lps(5, 13, allow_bipartite=True)
    rep = spectral.ramanujan_report(g, nb_method="arnoldi")
    n_expected = 13 * (13**2 - 1)  # |PGL_2(F_13)|
    ok = rep.adjacency_ok and rep.nonbacktracking_ok and rep.consistent and g.n == n_expected
    return ok, (f"n={g.n} bipartite={rep.bipartite}; max|lambda|={rep.max_adjacency:.6f} "
                f"<= {2 * math.sqrt(5):.6f}; max|mu|={rep.max_nonbacktracking:.6f} "
                f"<= {math.sqrt(5):.6f}")


def _small_graphs(seed: int = 0):
    return [graphs.petersen_graph(), graphs.complete_graph(5),
            graphs.build_cayley_sl2(5), graphs.build_cayley_sl2(7),
            graphs.random_regular(200, 6, seed=seed)]


def ihara_bass(quick: bool = False) -> tuple[bool, str]:
    rng = np.random.default_rng(2024)
    gs = _small_graphs()
    if quick:
        gs = gs[:3]
    worst = 0.0
    for g in gs:
        us = rng.uniform(0.0, 1.0 / g.q, 10)
        worst = max(worst, max(r[3] for r in spectral.ihara_bass_check(g, us)))
    return worst < 1e-8, f"{len(gs)} graphs x 10 u, max relative error {worst:.2e}"


P_GRID = [2.0, 2.25, 2.5, 3.0, 4.0, 6.0, 10.0, math.inf]


def density_consistency(quick: bool = False) -> tuple[bool, str]:
    ok, notes = True, []
    cases = [(g, "direct") for g in _small_graphs()]
    cases.append((graphs.build_lps(5, 13, allow_bipartite=True), "quadratic"))
    for g, how in cases:
        q = g.q
        lam = spectral.adjacency_spectrum(g).eigenvalues
        mu = spectral.nonbacktracking_spectrum(g, how).eigenvalues
        ma = spectral.density_profile(lam, q, P_GRID).samples
        mb = spectral.density_profile_nb(mu, q, P_GRID, g.n).samples
        vals = [m for _, m in ma]
        same = ma == mb
        mono = all(a >= b for a, b in zip(vals, vals[1:]))
        ok &= same and mono
        if not (same and mono):
            notes.append(f"{g.provenance}: adj {vals} nb {[m for _, m in mb]}")
        if g.provenance.startswith("LPS"):
            zero = all(m == 0 for p, m in ma if p > 2)
            ok &= zero
            notes.append(f"LPS(5,13) M(p>2)={[m for p, m in ma if p > 2]}")
    return ok, f"{len(cases)} graphs; " + "; ".join(notes)


def optimal_lifting(quick: bool = False) -> tuple[bool, str]:
    levels = (5, 7) if quick else (5, 7, 11, 13)
    kappas, ok = {}, True
    for N in levels:
        curve = lifting.coverage_curve(_principal(N))
        f = curve.fractions()
        ok &= bool(np.all(np.diff(f) >= 0)) and f[-1] == 1.0
        k = lifting.lifting_exponent(curve, 0.99)
        ok &= k.reached
        kappas[N] = round(k.kappa, 4) if k.reached else None
    vals = [v for v in kappas.values() if v is not None]
    band = max(vals) - min(vals) if vals else math.inf
    ok &= band <= calibration.LIFTING_BAND
    return ok, f"kappa(0.99) {kappas}, band {band:.4f} <= {calibration.LIFTING_BAND}"


def xi_bounds(quick: bool = False) -> tuple[bool, str]:
    samples = 10**5 if quick else 10**6
    ok, worst = True, []
    for t in range(1, 11):
        g = np.diag([math.exp(t / 2), math.exp(-t / 2)])
        est, se = cartan.xi_p_montecarlo(g, 2, samples=samples, seed=t)
        lo = calibration.XI_LOWER_CONSTANT * cartan.xi_lower_bound(t) - 3 * se
        hi = cartan.xi_upper_bound(t) + 3 * se
        ok &= lo <= est <= hi
        again = cartan.xi_p_montecarlo(g, 2, samples=10**4, seed=t)
        ok &= again == cartan.xi_p_montecarlo(g, 2, samples=10**4, seed=t)
        worst.append(round(est / cartan.xi_upper_bound(t), 3))
    return ok, f"{samples} samples; estimate / upper bound per t: {worst}"


def walk_trace(quick: bool = False) -> tuple[bool, str]:
    gs = [graphs.petersen_graph(), graphs.complete_graph(4), graphs.cycle_graph(10),
          graphs.random_regular(200, 6, seed=3)]
    worst = 0.0
    for g in gs:
        worst = max(worst, spectral.walk_trace_check(g, kmax=8).max_rel_error)
    return worst < 1e-6, f"{len(gs)} graphs, k <= 8, max relative error {worst:.2e}"


CRITERIA = [
    (1, "counting oracle equivalence", counting_oracle),
    (2, "Sarnak-Xue exponent", sarnak_xue_exponent),
    (3, "fixed-point identity", fixed_point_identity),
    (4, "tree convolution", tree_convolution_lemma),
    (5, "Ramanujan certification", ramanujan_certification),
    (6, "Ihara-Bass identity", ihara_bass),
    (7, "density profile consistency", density_consistency),
    (8, "optimal-lifting S-curve", optimal_lifting),
    (9, "Xi bounds", xi_bounds),
    (10, "walk trace", walk_trace),
]


def run_criterion(number: int, quick: bool = False) -> CriterionResult:
    _, name, fn = CRITERIA[number - 1]
    t0 = time.perf_counter()
    try:
        ok, detail = fn(quick)
    except Exception as exc:  # a crash is a failed criterion, with the reason
        ok, detail = False, f"error: {type(exc).__name__}: {exc}"
    return CriterionResult(number, name, bool(ok), detail, time.perf_counter() - t0)


def acceptance_suite(quick: bool = False, only=None, echo=None) -> dict:
    """Run the criteria and return a report dict; ``echo`` receives each line."""
    results = []
    for number, _, _ in CRITERIA:
        if only and number not in only:
            continue
        res = run_criterion(number, quick)
        if echo:
            echo(res.line())
        results.append(res)
    return {
        "quick": quick,
        "checks": [asdict(r) for r in results],
        "passed": all(r.passed for r in results),
        "constants": {"convolution_constant": calibration.CONVOLUTION_CONSTANT},
    }
