"""Lattice-point counts in congruence subgroups.

Three independent routes:
  * brute force over the max-norm box (:func:`count_bruteforce`);
  * the divisor-based count for principal congruence subgroups of SL_2(Z)
    (:func:`count_sarnak_xue_fast`), which uses a + d = 2 mod N^2;
  * conjugator-averaged length-ball counts, either directly or through fixed
    points of the action on the coset space (:func:`radius_profile`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import cartan
from .errors import InputError, ResourceError
from .matgroups import (IntMatrix, QuotientSpace, SubgroupSpec, contains_batch,
                        enumerate_quotient, enumerate_sl2_box, inverse_batch)

BRUTE_CAP_SL2 = 1000
BRUTE_CAP_SL3 = 4
FAST_CAP = 20000


@dataclass(frozen=True)
class BallCount:
    spec: SubgroupSpec
    bound_kind: str  # "norm" or "length"
    bound: float
    count: int
    conjugator: IntMatrix | None = None


# --------------------------------------------------------------------------
# box enumeration

def enumerate_sl3_box(T: int) -> np.ndarray:
    """All g in SL_3(Z) with max|entry| <= T as an (M, 3, 3) array."""
    if T > BRUTE_CAP_SL3:
        raise ResourceError(f"SL_3 box enumeration capped at T <= {BRUTE_CAP_SL3}")
    r = np.arange(-T, T + 1, dtype=np.int64)
    vecs = np.stack(np.meshgrid(r, r, r, indexing="ij"), axis=-1).reshape(-1, 3)
    out = []
    nv = len(vecs)
    for i in range(nv):
        u = vecs[i]
        w = np.cross(u, vecs)  # u x v for every v
        ok = np.any(w != 0, axis=1)
        vs, ws = vecs[ok], w[ok]
        # det [u; v; x] = x . (u x v) = 1
        hits = (ws @ vecs.T) == 1
        vi, xi = np.nonzero(hits)
        if vi.size:
            blk = np.empty((vi.size, 3, 3), dtype=np.int64)
            blk[:, 0, :] = u
            blk[:, 1, :] = vs[vi]
            blk[:, 2, :] = vecs[xi]
            out.append(blk)
    return np.concatenate(out) if out else np.zeros((0, 3, 3), dtype=np.int64)


def enumerate_box(n: int, T: int) -> np.ndarray:
    if n == 2:
        if T > BRUTE_CAP_SL2:
            raise ResourceError(f"SL_2 brute force capped at T <= {BRUTE_CAP_SL2}")
        return enumerate_sl2_box(T)
    return enumerate_sl3_box(T)


def _conjugate(y: IntMatrix | None, mats: np.ndarray) -> np.ndarray:
    """y mats y^{-1} for every matrix in the batch."""
    if y is None:
        return mats
    ya = np.array(y.rows, dtype=np.int64)
    yi = np.array(y.inverse().rows, dtype=np.int64)
    return ya @ mats @ yi


def count_bruteforce(spec: SubgroupSpec, T: int, y: IntMatrix | None = None) -> BallCount:
    """#{gamma in the subgroup : max|entry of y^-1 gamma y| <= T}.

    Enumerates the box in the conjugated coordinates g = y^-1 gamma y and
    tests y g y^-1 for membership.
    """
    if T < 0:
        raise InputError("T must be >= 0")
    if y is not None and y.n != spec.n:
        raise InputError("conjugator dimension mismatch")
    box = enumerate_box(spec.n, int(T))
    count = int(np.count_nonzero(contains_batch(spec, _conjugate(y, box))))
    return BallCount(spec, "norm", T, count, y)


# --------------------------------------------------------------------------
# fast divisor-based count

@lru_cache(maxsize=4)
def _spf(limit: int) -> np.ndarray:
    """Smallest prime factor of every integer up to limit."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    spf[1:] = np.arange(1, limit + 1)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == p:
            blk = spf[p * p::p]
            mask = blk == np.arange(p * p, limit + 1, p)
            blk[mask] = p
    return spf


def _divisors_between(m: int, lo: int, hi: int, spf: np.ndarray) -> int:
    """Number of divisors e of m with lo <= e <= hi."""
    if lo > hi:
        return 0
    divs = [1]
    while m > 1:
        p = int(spf[m])
        k = 0
        while m % p == 0:
            m //= p
            k += 1
        divs = [d * p**j for d in divs for j in range(k + 1)]
    return sum(1 for d in divs if lo <= d <= hi)


def count_sarnak_xue_fast(N: int, T: int) -> BallCount:
    """#{gamma in Gamma(N) subset SL_2(Z) : max|entry| <= T}.

    a, d = 1 mod N forces a + d = 2 mod N^2. For each admissible (a, d) the
    pair (b, c) = (N b', N c') solves b' c' = (ad - 1)/N^2, counted through
    the divisors of the right-hand side with |b'|, |c'| <= T // N.
    """
    if N < 1 or T < 0:
        raise InputError("need N >= 1 and T >= 0")
    if T > FAST_CAP:
        raise ResourceError(f"fast count capped at T <= {FAST_CAP}")
    spec = SubgroupSpec(2, "principal", N)
    N2 = N * N
    B = T // N
    spf = _spf(max(2, (T * T + 1) // N2 + 1))
    total = 0
    kmin = -((2 * T + 2) // N2)
    for k in range(kmin, (2 * T - 2) // N2 + 1):
        s = 2 + k * N2
        if abs(s) > 2 * T:
            continue
        lo_a, hi_a = max(-T, s - T), min(T, s + T)
        a0 = lo_a + ((1 - lo_a) % N)
        for a in range(a0, hi_a + 1, N):
            d = s - a
            m = a * d - 1
            if m == 0:
                total += 2 * (2 * B + 1) - 1
                continue
            mm = abs(m) // N2
            # b' ranges over divisors with mm / B <= |b'| <= B
            total += 2 * _divisors_between(mm, -(-mm // B) if B else mm + 1, B, spf)
    return BallCount(spec, "norm", T, total)


def sarnak_xue_slope(N: int, Ts) -> tuple[float, list[tuple[int, int]]]:
    """Least-squares slope of log N(T, Gamma(N)) against log T."""
    data = [(int(T), count_sarnak_xue_fast(N, int(T)).count) for T in Ts]
    x = np.log([t for t, _ in data])
    y = np.log([c for _, c in data])
    slope = float(np.polyfit(x, y, 1)[0])
    return slope, data


def log_grid(lo: int, hi: int, points: int) -> list[int]:
    return sorted({int(round(v)) for v in np.geomspace(lo, hi, points)})


def sl_n_lower_bound(n: int, N: int, T: int) -> int:
    """Size of the unipotent family I + (strictly upper part = 0 mod N), entries <= T."""
    if n not in (2, 3):
        raise InputError("n must be 2 or 3")
    if N < 1 or T < 0:
        raise InputError("need N >= 1, T >= 0")
    return (2 * (T // N) + 1) ** (n * (n - 1) // 2)


# --------------------------------------------------------------------------
# fixed points and the weak-injective-radius profile

def fixed_point_count(space: QuotientSpace | SubgroupSpec, g: IntMatrix) -> int:
    """#{y in Gamma_N \\ Gamma_1 : y g y^-1 in Gamma_N}."""
    if isinstance(space, SubgroupSpec):
        space = enumerate_quotient(space)
    return space.fixed_points(g)


def length_ball(n: int, d0: float, length_kind: str = "cartan") -> tuple[np.ndarray, np.ndarray]:
    """All g in SL_n(Z) with length <= d0, and their lengths.

    Both length kinds satisfy max|entry| <= e^{d0/2}, so the box of that
    radius contains the ball.
    """
    T = int(math.floor(math.exp(d0 / 2.0) + 1e-9))
    box = enumerate_box(n, T)
    L = element_lengths(box, length_kind)
    keep = L <= d0 + 1e-12
    return box[keep], L[keep]


def element_lengths(mats: np.ndarray, length_kind: str = "cartan") -> np.ndarray:
    if length_kind == "cartan":
        L = cartan.lengths_batch(mats)
        return np.maximum(L, 0.0)
    if length_kind == "lognorm":
        mx = np.abs(mats).reshape(len(mats), -1).max(axis=1)
        return 2.0 * np.log(mx.astype(float))
    raise InputError(f"unknown length kind {length_kind!r}")


def _fixed_point_indicator(space: QuotientSpace, mats: np.ndarray) -> np.ndarray:
    """c(g) for every g in the batch, via the permutation action."""
    N = space.spec.level
    counts = np.zeros(len(mats), dtype=np.int64)
    red = mats % N
    for i, rep in enumerate(space.reps):
        r = np.array(rep.rows, dtype=np.int64)
        counts += space.locate(r @ red) == i
    return counts


def _direct_counts(space: QuotientSpace, lifts, mats: np.ndarray) -> np.ndarray:
    """Per g: number of lifts y with y g y^-1 in the subgroup."""
    counts = np.zeros(len(mats), dtype=np.int64)
    for y in lifts:
        counts += contains_batch(space.spec, _conjugate(y, mats))
    return counts


@dataclass(frozen=True)
class RadiusProfile:
    spec: SubgroupSpec
    index: int
    length_kind: str
    method: str
    rows: list  # (d0, averaged count as Fraction, reference e^{d0/2}, ratio)
    totals: dict  # method -> list of integer totals per d0

    def paths_agree(self) -> bool:
        vals = list(self.totals.values())
        return all(v == vals[0] for v in vals)


def radius_profile(spec: SubgroupSpec, d0_grid, length_kind: str = "cartan",
                   method: str = "both", space: QuotientSpace | None = None,
                   lifts=None) -> RadiusProfile:
    """Averaged counts (1/index) sum_y N(Gamma_N, d0, y) over a grid of d0.

    ``direct`` conjugates every g of the length ball by a lift of each coset
    and tests membership; ``fixed-point`` sums c(g) over the same ball using
    the permutation action on the coset space. ``both`` runs the two and
    keeps both totals.
    """
    grid = sorted(float(d) for d in d0_grid)
    if not grid or grid[0] < 0:
        raise InputError("d0 grid must be non-empty and non-negative")
    if method not in ("both", "direct", "fixed-point"):
        raise InputError(f"unknown method {method!r}")
    space = space or enumerate_quotient(spec)
    mats, L = length_ball(spec.n, grid[-1], length_kind)
    per = {}
    if method in ("both", "direct"):
        lifts = lifts if lifts is not None else space.small_lifts()
        per["direct"] = _direct_counts(space, lifts, mats)
    if method in ("both", "fixed-point"):
        per["fixed-point"] = _fixed_point_indicator(space, mats)
    totals = {k: [int(v[L <= d + 1e-12].sum()) for d in grid] for k, v in per.items()}
    first = next(iter(totals.values()))
    rows = []
    for d, tot in zip(grid, first):
        avg = Fraction(tot, space.index)
        ref = math.exp(d / 2.0)
        rows.append((d, avg, ref, float(avg) / ref))
    return RadiusProfile(spec, space.index, length_kind, method, rows, totals)


def conjugated_ball_count(spec: SubgroupSpec, d0: float, y: IntMatrix,
                          length_kind: str = "cartan") -> int:
    """N(Gamma_N, d0, y) = #{gamma in Gamma_N : l(y^-1 gamma y) <= d0}, literally.

    Enumerates gamma in the subgroup inside a box large enough to contain
    every candidate (l(gamma) <= d0 + 2 l(y)), then filters. Slow; used as an
    oracle for small cases.
    """
    ly = cartan.length(y) if length_kind == "cartan" else 2 * math.log(max(1, y.max_entry()))
    if length_kind == "lognorm":
        # max-entry growth under conjugation is bounded by 4 |y|^2 for SL_2
        T = int(math.exp(d0 / 2.0) * 4 * y.max_entry() ** 2) + 1
    else:
        T = int(math.floor(math.exp((d0 + 2 * ly) / 2.0) + 1e-9))
    box = enumerate_box(spec.n, T)
    box = box[contains_batch(spec, box)]
    yi = y.inverse()
    back = _conjugate(yi, box)
    return int(np.count_nonzero(element_lengths(back, length_kind) <= d0 + 1e-12))
