"""Geometry of the (q+1)-regular tree.

Tree distance plays the role of the length l. Everything here is exact
integer arithmetic except the spherical-function recursion and the
eigenvalue/p dictionary.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import InputError

MAX_RADIUS = 12
TEMPERED_TOL = 1e-9


@dataclass(frozen=True)
class TreeModel:
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise InputError("branching q must be >= 1")

    def sphere_size(self, r: int) -> int:
        return sphere_size(self.q, r)

    def ball_size(self, r: int) -> int:
        return ball_size(self.q, r)


def sphere_size(q: int, r: int) -> int:
    if r < 0:
        return 0
    return 1 if r == 0 else (q + 1) * q ** (r - 1)


def ball_size(q: int, r: int) -> int:
    return sum(sphere_size(q, k) for k in range(r + 1))


def _branches(q: int, t: int, d: int) -> int:
    """Edges leaving the geodesic [x, y] at the point at distance t from x."""
    if d == 0:
        return q + 1
    return q if t in (0, d) else q - 1


def tree_convolution(q: int, r1: int, r2: int, d: int) -> int:
    """|B_r1(x) & B_r2(y)| for vertices x, y at distance d.

    A vertex z hangs off the geodesic from x to y at the point t with height h,
    so d(x, z) = t + h and d(y, z) = d - t + h.
    """
    if q < 1 or d < 0 or r1 < 0 or r2 < 0:
        raise InputError("need q >= 1 and non-negative radii and distance")
    if max(r1, r2) > MAX_RADIUS:
        raise InputError(f"radii are capped at {MAX_RADIUS}")
    total = 0
    for t in range(d + 1):
        hmax = min(r1 - t, r2 - (d - t))
        if hmax < 0:
            continue
        total += 1
        b = _branches(q, t, d)
        for h in range(1, hmax + 1):
            total += b * q ** (h - 1)
    return total


def convolution_table(q: int, r1: int, r2: int) -> dict[int, int]:
    return {d: tree_convolution(q, r1, r2, d) for d in range(r1 + r2 + 2)}


def _ball_with_ray(q: int, radius: int, d: int):
    """Adjacency of B_radius(x) plus a path from x to a vertex y at distance d.

    The ray follows the first child at every level, so inside the ball it
    reuses existing vertices. Returns (adjacency lists, y).
    """
    adj: list[list[int]] = [[]]
    depth = [0]
    frontier = [0]
    for level in range(radius):
        nxt = []
        for v in frontier:
            kids = q + 1 if level == 0 else q
            for _ in range(kids):
                u = len(adj)
                adj.append([v])
                adj[v].append(u)
                depth.append(level + 1)
                nxt.append(u)
        frontier = nxt
    # walk the first-child ray
    y = 0
    for step in range(d):
        kids = [u for u in adj[y] if depth[u] == depth[y] + 1]
        if kids:
            y = kids[0]
        else:
            u = len(adj)
            adj.append([y])
            adj[y].append(u)
            depth.append(depth[y] + 1)
            y = u
    return adj, y


def _bfs(adj, src: int) -> np.ndarray:
    dist = np.full(len(adj), -1, dtype=np.int64)
    dist[src] = 0
    dq = deque([src])
    while dq:
        v = dq.popleft()
        for u in adj[v]:
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                dq.append(u)
    return dist


def bfs_convolution_counts(q: int, max_radius: int, d: int) -> np.ndarray:
    """Oracle: counts[r1, r2] = |B_r1(x) & B_r2(y)| by BFS on an explicit tree.

    The explicit tree is B_max_radius(x) together with the geodesic to y; it is
    a convex subtree, so its distances agree with the infinite tree.
    """
    adj, y = _ball_with_ray(q, max_radius, d)
    dx, dy = _bfs(adj, 0), _bfs(adj, y)
    inside = dx <= max_radius
    hist = np.zeros((max_radius + 1, max_radius + 1 + d), dtype=np.int64)
    np.add.at(hist, (dx[inside], dy[inside]), 1)
    cum = hist.cumsum(axis=0).cumsum(axis=1)
    return cum[:, : max_radius + 1]


@dataclass(frozen=True)
class ConvolutionReport:
    q: int
    r: int
    slack: float
    rows: list  # (d, count, bound, ratio)
    max_ratio: float
    holds: bool
    degenerate: bool


def check_convolution_lemma(q: int, r: int, slack: float) -> ConvolutionReport:
    """Compare |B_r(x) & B_r(y)| with slack * q^{(2r - d)/2} for all d <= 2r.

    For q = 1 the tree is a line, the count is the overlap length and the
    ratio grows linearly in r; the report flags this as degenerate.
    """
    rows = []
    for d in range(2 * r + 1):
        c = tree_convolution(q, r, r, d)
        bound = float(q) ** ((2 * r - d) / 2)
        rows.append((d, c, bound, c / bound))
    mr = max(x[3] for x in rows)
    return ConvolutionReport(q, r, slack, rows, mr, mr <= slack, q == 1)


def p_to_eigen(p: float, q: int) -> float:
    """Adjacency eigenvalue of the spherical representation with parameter p."""
    if not p >= 2:
        raise InputError("p must lie in [2, inf]")
    if math.isinf(p):
        return float(q + 1)
    return q ** (1.0 / p) + q ** (1.0 - 1.0 / p)


def eigen_to_p(lam: float, q: int, tol: float = TEMPERED_TOL) -> float:
    """Inverse of p_to_eigen on |lam|; tempered values map to 2."""
    x = abs(lam)
    if x > q + 1 + 1e-9:
        raise InputError(f"|lambda| = {x} exceeds the degree {q + 1}")
    if x >= q + 1 - 1e-12:
        return math.inf
    if x <= 2.0 * math.sqrt(q) + tol:
        return 2.0
    root = 0.5 * (x + math.sqrt(x * x - 4.0 * q))
    frac = math.log(root) / math.log(q)
    if frac >= 1.0:
        return math.inf
    return 1.0 / (1.0 - frac)


def xi_tree(d: int, p: float, q: int) -> float:
    return xi_tree_profile(d, p, q)[d]


def xi_tree_profile(dmax: int, p: float, q: int) -> np.ndarray:
    """phi(0..dmax) for the spherical function with eigenvalue p_to_eigen(p, q).

    phi(0) = 1, phi(1) = lambda / (q + 1), then
    q phi(d + 1) = lambda phi(d) - phi(d - 1).
    """
    if dmax < 0:
        raise InputError("distance must be >= 0")
    lam = p_to_eigen(p, q)
    phi = np.empty(dmax + 2)
    phi[0] = 1.0
    phi[1] = lam / (q + 1)
    for k in range(1, dmax + 1):
        phi[k + 1] = (lam * phi[k] - phi[k - 1]) / q
    return phi[: dmax + 1]


def recursion_residuals(phi: np.ndarray, p: float, q: int) -> np.ndarray:
    lam = p_to_eigen(p, q)
    return np.array([lam * phi[k] - q * phi[k + 1] - phi[k - 1] for k in range(1, len(phi) - 1)])
