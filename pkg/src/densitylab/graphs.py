"""Regular graph builders: LPS Ramanujan graphs, Cayley graphs of SL_2(F_p),
configuration-model random regular graphs, small named graphs, and the
edge-list file format ("u v" per line, 0-indexed, undirected).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import InputError, ResourceError


@dataclass(frozen=True, eq=False)
class Graph:
    """An undirected graph stored as an (m, 2) edge array.

    ``degree`` is the common degree k = q + 1 when the graph is regular and
    None otherwise.
    """

    n: int
    edges: np.ndarray
    provenance: str
    multigraph: bool
    degree: int | None

    @property
    def q(self) -> int:
        if self.degree is None:
            raise InputError(f"{self.provenance} is not regular")
        return self.degree - 1

    @property
    def m(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        np.add.at(deg, self.edges[:, 0], 1)
        np.add.at(deg, self.edges[:, 1], 1)
        return deg

    def adjacency(self, dtype=float) -> sp.csr_matrix:
        u, v = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        data = np.ones(rows.size, dtype=dtype)
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def adjacency_dense(self) -> np.ndarray:
        return self.adjacency().toarray()

    def neighbors(self) -> list[np.ndarray]:
        a = self.adjacency(dtype=np.int64)
        return [a.indices[a.indptr[i]:a.indptr[i + 1]] for i in range(self.n)]

    def is_bipartite(self) -> bool:
        from scipy.sparse.csgraph import breadth_first_order

        colour = np.full(self.n, -1)
        a = self.adjacency()
        for s in range(self.n):
            if colour[s] >= 0:
                continue
            order, pred = breadth_first_order(a, s, directed=False)
            colour[s] = 0
            for v in order[1:]:
                colour[v] = 1 - colour[pred[v]]
        u, v = self.edges[:, 0], self.edges[:, 1]
        return bool(np.all(colour[u] != colour[v]))

    def to_edge_list(self, path: str | Path) -> None:
        with open(path, "w") as fh:
            for u, v in self.edges:
                fh.write(f"{u} {v}\n")


def make_graph(n: int, edges, provenance: str) -> Graph:
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if e.size and (e.min() < 0 or e.max() >= n):
        raise InputError("edge endpoint out of range")
    key = np.sort(e, axis=1)
    multi = bool(np.any(key[:, 0] == key[:, 1])) or len(np.unique(key, axis=0)) != len(key)
    deg = np.zeros(n, dtype=np.int64)
    np.add.at(deg, e[:, 0], 1)
    np.add.at(deg, e[:, 1], 1)
    k = int(deg[0]) if n and np.all(deg == deg[0]) else None
    return Graph(n, e, provenance, multi, k)


def read_edge_list(path: str | Path) -> Graph:
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise InputError(f"{path}:{lineno}: expected 'u v'")
            try:
                pairs.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise InputError(f"{path}:{lineno}: non-integer vertex") from None
    if not pairs:
        raise InputError(f"{path}: no edges")
    n = max(max(p) for p in pairs) + 1
    return make_graph(n, pairs, f"file({path})")


# --------------------------------------------------------------------------
# small named graphs

def cycle_graph(n: int) -> Graph:
    return make_graph(n, [(i, (i + 1) % n) for i in range(n)], f"C{n}")


def complete_graph(n: int) -> Graph:
    return make_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)], f"K{n}")


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return make_graph(10, outer + spokes + inner, "Petersen")


# --------------------------------------------------------------------------
# 2x2 matrices over F_p, stored as (M, 4) int64 rows (a, b, c, d)

def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _sqrt_mod(a: int, p: int) -> int:
    for x in range(p):
        if x * x % p == a % p:
            return x
    raise InputError(f"{a} is not a square mod {p}")


def _mul(s: np.ndarray, g: np.ndarray, p: int) -> np.ndarray:
    """Left-multiply every row of g by the single matrix s (mod p)."""
    a, b, c, d = (int(x) for x in s)
    out = np.empty_like(g)
    out[:, 0] = (a * g[:, 0] + b * g[:, 2]) % p
    out[:, 1] = (a * g[:, 1] + b * g[:, 3]) % p
    out[:, 2] = (c * g[:, 0] + d * g[:, 2]) % p
    out[:, 3] = (c * g[:, 1] + d * g[:, 3]) % p
    return out


def _code(g: np.ndarray, p: int) -> np.ndarray:
    return ((g[:, 0] * p + g[:, 1]) * p + g[:, 2]) * p + g[:, 3]


def sl2_elements(p: int) -> np.ndarray:
    """All of SL_2(F_p) as an (p(p^2-1), 4) array."""
    inv = np.zeros(p, dtype=np.int64)
    for r in range(1, p):
        inv[r] = pow(r, -1, p)
    blocks = []
    ar = np.arange(p, dtype=np.int64)
    # a != 0: (b, c) free, d = (1 + bc)/a
    A, B, C = np.meshgrid(ar[1:], ar, ar, indexing="ij")
    A, B, C = A.ravel(), B.ravel(), C.ravel()
    D = (1 + B * C) % p * inv[A] % p
    blocks.append(np.stack([A, B, C, D], axis=1))
    # a == 0: b != 0, c = -1/b, d free
    B, D = np.meshgrid(ar[1:], ar, indexing="ij")
    B, D = B.ravel(), D.ravel()
    C = (-inv[B]) % p
    blocks.append(np.stack([np.zeros_like(B), B, C, D], axis=1))
    return np.concatenate(blocks)


def _canon_psl(g: np.ndarray, p: int) -> np.ndarray:
    neg = (-g) % p
    pick = _code(neg, p) < _code(g, p)
    out = g.copy()
    out[pick] = neg[pick]
    return out


def _canon_pgl(g: np.ndarray, p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for r in range(1, p):
        inv[r] = pow(r, -1, p)
    lead = np.where(g[:, 0] != 0, g[:, 0], g[:, 1])
    return g * inv[lead][:, None] % p


def _cayley(elements: np.ndarray, gens: list, p: int, canon, provenance: str) -> Graph:
    codes = _code(elements, p)
    order = np.argsort(codes)
    sorted_codes = codes[order]
    n = len(elements)
    src = np.arange(n, dtype=np.int64)
    if not gens:
        raise InputError(f"{provenance}: empty generator set")
    arcs = []
    for s in gens:
        img = canon(_mul(np.asarray(s, dtype=np.int64), elements, p), p)
        c = _code(img, p)
        pos = np.searchsorted(sorted_codes, c)
        if np.any(pos >= n) or np.any(sorted_codes[np.minimum(pos, n - 1)] != c):
            raise InputError("generator image left the vertex set")
        arcs.append(np.stack([src, order[pos]], axis=1))
    arcs = np.concatenate(arcs)
    # each undirected edge appears once from each end since gens are inverse-closed
    loops = arcs[arcs[:, 0] == arcs[:, 1]]
    fwd = arcs[arcs[:, 0] < arcs[:, 1]]
    edges = np.concatenate([fwd, loops[::2]]) if len(loops) else fwd
    g = make_graph(n, edges, provenance)
    if g.degree != len(gens):
        raise InputError(f"{provenance}: expected a {len(gens)}-regular graph")
    return g


def lps_generators(p: int, q: int, projective_scale: bool = True) -> list[tuple]:
    """The p + 1 matrices over F_q attached to a^2+b^2+c^2+d^2 = p, a > 0 odd.

    With projective_scale the matrices are divided by a square root of p so
    they lie in SL_2(F_q) (requires p to be a square mod q).
    """
    sols = []
    r = math.isqrt(p)
    evens = range(-(r // 2) * 2, r + 1, 2)
    for a in range(1, r + 1, 2):
        for b in evens:
            for c in evens:
                for d in evens:
                    if a * a + b * b + c * c + d * d == p:
                        sols.append((a, b, c, d))
    i = _sqrt_mod(q - 1, q)
    scale = pow(_sqrt_mod(p, q), -1, q) if projective_scale else 1
    mats = []
    for a, b, c, d in sols:
        m = ((a + b * i), (c + d * i), (-c + d * i), (a - b * i))
        mats.append(tuple(x * scale % q for x in m))
    return mats


def build_lps(p: int, q: int, allow_bipartite: bool = False) -> Graph:
    """The (p+1)-regular LPS graph X^{p,q}.

    On PSL_2(F_q) when p is a square mod q, else (only with allow_bipartite)
    the bipartite graph on PGL_2(F_q).
    """
    if not (is_prime(p) and is_prime(q)) or p == q or p % 4 != 1 or q % 4 != 1:
        raise InputError("p and q must be distinct primes congruent to 1 mod 4")
    if q <= 2 * math.sqrt(p):
        raise InputError("need q > 2 sqrt(p)")
    if legendre(p, q) == 1:
        gens = lps_generators(p, q)
        elems = np.unique(_canon_psl(sl2_elements(q), q), axis=0)
        g = _cayley(elems, gens, q, _canon_psl, f"LPS({p},{q})")
    elif allow_bipartite:
        gens = lps_generators(p, q, projective_scale=False)
        elems = _pgl2_elements(q)
        g = _cayley(elems, gens, q, _canon_pgl, f"LPS({p},{q})/PGL")
    else:
        raise InputError(f"({p}|{q}) = -1: the LPS graph is bipartite on PGL_2; pass allow_bipartite")
    if len(gens) != p + 1:
        raise InputError(f"found {len(gens)} quaternion generators, expected {p + 1}")
    if g.multigraph:
        raise InputError(f"{g.provenance} has loops or multiple edges")
    return g


def _pgl2_elements(q: int) -> np.ndarray:
    ar = np.arange(q, dtype=np.int64)
    grid = np.stack(np.meshgrid(ar, ar, ar, ar, indexing="ij"), axis=-1).reshape(-1, 4)
    det = (grid[:, 0] * grid[:, 3] - grid[:, 1] * grid[:, 2]) % q
    lead = np.where(grid[:, 0] != 0, grid[:, 0], grid[:, 1])
    return grid[(det != 0) & (lead == 1)]


CAYLEY_FAMILIES = {
    "unipotent": [(1, 1, 0, 1), (1, -1, 0, 1), (1, 0, 1, 1), (1, 0, -1, 1)],
}


def build_cayley_sl2(p: int, family="unipotent") -> Graph:
    """Cayley graph of SL_2(F_p) for a named or explicit symmetric generator set.

    An explicit set is a list of (a, b, c, d) tuples closed under inverses.
    Raises InputError when the set does not generate (graph disconnected).
    """
    from scipy.sparse.csgraph import connected_components

    if not is_prime(p) or p < 3:
        raise InputError("p must be a prime >= 3")
    if isinstance(family, str):
        if family not in CAYLEY_FAMILIES:
            raise InputError(f"unknown generator family {family!r}")
        raw, name = CAYLEY_FAMILIES[family], family
    else:
        raw, name = list(family), "custom"
    gens = [tuple(x % p for x in s) for s in raw]
    for a, b, c, d in gens:
        if (a * d - b * c) % p != 1:
            raise InputError(f"generator {(a, b, c, d)} is not in SL_2(F_{p})")
    g = _cayley(sl2_elements(p), gens, p, lambda x, _p: x, f"Cayley(SL2(F{p}),{name})")
    ncomp = connected_components(g.adjacency(), directed=False)[0]
    if ncomp > 1:
        raise InputError(f"{g.provenance}: generators do not generate ({ncomp} components)")
    return g


def random_regular(n: int, k: int, seed: int, max_tries: int = 200_000) -> Graph:
    """Uniform simple k-regular graph: configuration model plus rejection."""
    if (n * k) % 2 or not (0 <= k < n):
        raise InputError("need n*k even and k < n")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), k)
    for _ in range(max_tries):
        perm = rng.permutation(stubs).reshape(-1, 2)
        if np.any(perm[:, 0] == perm[:, 1]):
            continue
        key = np.sort(perm, axis=1)
        code = key[:, 0] * n + key[:, 1]
        if len(np.unique(code)) != len(code):
            continue
        return make_graph(n, key, f"RandomRegular({n},{k},{seed})")
    raise ResourceError(f"no simple {k}-regular graph on {n} vertices after {max_tries} tries")
