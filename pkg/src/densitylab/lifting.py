"""Optimal-lifting experiments.

Coverage of the coset space Gamma_N \\ SL_2(Z) by reductions of integer
matrices of bounded max-entry norm, the crossing exponent of the coverage
curve, and distance concentration on finite graphs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, ResourceError
from .graphs import Graph
from .matgroups import QuotientSpace, SubgroupSpec, enumerate_quotient, enumerate_sl2_box

NOT_HIT = np.iinfo(np.int64).max
MAX_LIFT_T = 4096
EPS_GRID = (0.1, 0.25, 0.5)
DIST_SAMPLE_CAP = 5000
DIST_CHUNK = 256


@dataclass(frozen=True)
class CoverageCurve:
    spec: SubgroupSpec
    index: int
    annulus: bool
    rows: list  # (T, ball_size, covered, fraction)
    sources: int = 1

    def fractions(self) -> np.ndarray:
        return np.array([r[3] for r in self.rows])


def _norms(mats: np.ndarray) -> np.ndarray:
    return np.abs(mats).reshape(len(mats), -1).max(axis=1)


def _min_norm_table(space: QuotientSpace, sources, t_max: int) -> tuple[np.ndarray, np.ndarray]:
    """best[s, y] = least max-entry norm of gamma with x_s . gamma = y (NOT_HIT if > t_max).

    Also returns the sorted norms of the whole box, for ball sizes.
    """
    N = space.spec.level
    best = np.full((len(sources), space.index), NOT_HIT, dtype=np.int64)
    box = enumerate_sl2_box(t_max)
    norms = _norms(box)
    red = box % N
    for k, s in enumerate(sources):
        r = np.array(space.reps[s].rows, dtype=np.int64)
        np.minimum.at(best[k], space.locate(r @ red), norms)
    return best, np.sort(norms)


def _covering_radius(space: QuotientSpace, sources, t_cap: int) -> int:
    """Smallest box radius at which every source reaches every coset."""
    N = space.spec.level
    best = np.full((len(sources), space.index), NOT_HIT, dtype=np.int64)
    lo, T = 0, 8
    while True:
        box = enumerate_sl2_box(T, lo)
        red = box % N
        norms = _norms(box)
        for k, s in enumerate(sources):
            r = np.array(space.reps[s].rows, dtype=np.int64)
            np.minimum.at(best[k], space.locate(r @ red), norms)
        if best.max() < NOT_HIT:
            return int(best.max())
        if T >= t_cap:
            raise ResourceError(f"coverage incomplete at T = {t_cap}")
        lo, T = T + 1, min(2 * T, t_cap)


def coverage_curve(spec: SubgroupSpec, T_grid=None, annulus: bool = False,
                   sources=None, space: QuotientSpace | None = None,
                   t_cap: int = MAX_LIFT_T) -> CoverageCurve:
    """Fraction of cosets reached by reductions of the norm ball, per T.

    A coset y counts as covered from the source x when x . gamma = y for some
    gamma with max|entry| <= T (or T/2 < max|entry| <= T with ``annulus``).
    For principal congruence subgroups the quotient is a group and one
    source (the identity coset) suffices. Otherwise the fraction is averaged
    over ``sources`` (default: all cosets), which is the pair coverage.
    When ``T_grid`` is omitted the grid is 1..(covering radius).
    """
    if spec.n != 2:
        raise InputError("coverage is implemented for SL_2")
    space = space or enumerate_quotient(spec)
    if sources is None:
        sources = [0] if spec.kind == "principal" else list(range(space.index))
    sources = list(sources)
    if T_grid is None:
        T_grid = range(1, _covering_radius(space, sources, t_cap) + 1)
    grid = [int(t) for t in T_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])) or not grid or grid[0] < 0:
        raise InputError("T grid must be ascending and non-negative")
    if grid[-1] > t_cap:
        raise ResourceError(f"T grid exceeds cap {t_cap}")
    best, norms = _min_norm_table(space, sources, grid[-1])
    total = len(sources) * space.index
    rows = []
    if not annulus:
        flat = np.sort(best.ravel())
        for T in grid:
            covered = int(np.searchsorted(flat, T, side="right"))
            ball = int(np.searchsorted(norms, T, side="right"))
            rows.append((T, ball, covered, covered / total))
    else:
        N = spec.level
        box = enumerate_sl2_box(grid[-1])
        bn = _norms(box)
        for T in grid:
            sel = box[(bn > T / 2) & (bn <= T)] % N
            covered = 0
            for s in sources:
                r = np.array(space.reps[s].rows, dtype=np.int64)
                covered += np.unique(space.locate(r @ sel)).size if len(sel) else 0
            rows.append((T, len(sel), covered, covered / total))
    return CoverageCurve(spec, space.index, annulus, rows, len(sources))


@dataclass(frozen=True)
class LiftingExponent:
    f: float
    kappa: float | None  # None when unreached
    low: float | None
    high: float | None

    @property
    def reached(self) -> bool:
        return self.kappa is not None


def lifting_exponent(curve: CoverageCurve, f: float) -> LiftingExponent:
    """kappa with coverage(index^{kappa/2}) = f, interpolated linearly in log T.

    The error bar is the pair of grid points bracketing the crossing.
    """
    if not 0 < f <= 1:
        raise InputError("target fraction must lie in (0, 1]")
    li = math.log(curve.index)
    rows = curve.rows
    for k, (T, _, _, frac) in enumerate(rows):
        if frac >= f - 1e-12:
            if T <= 0:
                return LiftingExponent(f, 0.0, 0.0, 0.0)
            if k == 0:
                kap = 2 * math.log(T) / li
                return LiftingExponent(f, kap, 0.0, kap)
            T0, f0 = rows[k - 1][0], rows[k - 1][3]
            lo = math.log(max(T0, 1))
            hi = math.log(T)
            w = (f - f0) / (frac - f0) if frac > f0 else 1.0
            x = lo + w * (hi - lo)
            return LiftingExponent(f, 2 * x / li, 2 * lo / li, 2 * hi / li)
    return LiftingExponent(f, None, None, None)


# --------------------------------------------------------------------------
# distance concentration

@dataclass(frozen=True)
class DistanceStats:
    source: str
    n: int
    histogram: np.ndarray  # counts of ordered pairs (x, y), x a sampled source, by distance
    mean: float
    within: dict = field(default_factory=dict)  # eps -> fraction with d < (1 + eps) log_q n
    sampled_sources: int = 0
    seed: int | None = None

    @property
    def pairs(self) -> int:
        return int(self.histogram.sum())


def almost_diameter(graph: Graph, eps=EPS_GRID, sample_cap: int = DIST_SAMPLE_CAP,
                    seed: int = 0) -> DistanceStats:
    """Histogram of BFS distances over ordered pairs.

    Uses all sources up to ``sample_cap`` vertices, otherwise ``sample_cap``
    sources drawn without replacement with ``seed``. Pairs with x = y are
    excluded.
    """
    from scipy.sparse.csgraph import shortest_path

    n = graph.n
    if n > 10**5:
        raise ResourceError("almost_diameter is capped at 1e5 vertices")
    A = graph.adjacency()
    if n > sample_cap:
        rng = np.random.default_rng(seed)
        srcs = np.sort(rng.choice(n, size=sample_cap, replace=False))
        used_seed = seed
    else:
        srcs = np.arange(n)
        used_seed = None
    hist = np.zeros(1, dtype=np.int64)
    for i in range(0, len(srcs), DIST_CHUNK):
        blk = srcs[i:i + DIST_CHUNK]
        D = shortest_path(A, method="D", unweighted=True, indices=blk)
        bad = np.argwhere(~np.isfinite(D))
        if bad.size:
            r, c = bad[0]
            raise InputError(f"graph is disconnected: no path between {blk[r]} and {c}")
        h = np.bincount(D.astype(np.int64).ravel())
        if h.size > hist.size:
            h[: hist.size] += hist
            hist = h
        else:
            hist[: h.size] += h
    hist[0] -= len(srcs)
    total = hist.sum()
    if total == 0:
        raise InputError("need at least two vertices")
    mean = float((np.arange(hist.size) * hist).sum() / total)
    within = {}
    try:
        q = graph.q
    except InputError:
        q = None  # irregular: no natural base for the logarithm
    if q is not None and q > 1:
        base = math.log(n) / math.log(q)
        for e in eps:
            thr = (1 + e) * base
            ds = np.arange(hist.size)
            within[e] = float(hist[ds < thr].sum() / total)
    return DistanceStats(graph.provenance, n, hist, mean, within, len(srcs), used_seed)
