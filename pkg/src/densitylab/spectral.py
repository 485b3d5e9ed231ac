"""Adjacency and non-backtracking spectra of regular graphs, density profiles
M(p), the Ihara-Bass determinant identity and closed-walk trace checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import InputError, ResourceError
from .graphs import Graph
from .trees import TEMPERED_TOL, eigen_to_p

MAX_DENSE_ADJ = 5000
MAX_DENSE_NB = 8000
TRIVIAL_TOL = 1e-8


@dataclass(frozen=True)
class GraphSpectrum:
    kind: str  # "adjacency" or "nonbacktracking"
    eigenvalues: np.ndarray
    q: int | None = None
    bipartite: bool = False


@dataclass(frozen=True)
class DensityProfile:
    q: int
    n: int
    samples: list  # (p, M(p))
    alpha: float | None = None

    def as_dict(self) -> dict[float, int]:
        return {p: m for p, m in self.samples}


def adjacency_spectrum(graph: Graph) -> GraphSpectrum:
    if graph.n > MAX_DENSE_ADJ:
        raise ResourceError(f"dense adjacency eigensolve capped at n <= {MAX_DENSE_ADJ}")
    ev = np.linalg.eigvalsh(graph.adjacency_dense())[::-1]
    q = graph.degree - 1 if graph.degree else None
    return GraphSpectrum("adjacency", ev, q, graph.is_bipartite())


def directed_edges(graph: Graph) -> np.ndarray:
    e = graph.edges
    return np.concatenate([e, e[:, ::-1]])


def nonbacktracking_matrix(graph: Graph) -> sp.csr_matrix:
    """Hashimoto operator: (u->v) maps to every (v->w) with w != u."""
    if graph.multigraph:
        raise InputError("non-backtracking operator requires a simple graph")
    arcs = directed_edges(graph)
    m2 = len(arcs)
    order = np.argsort(arcs[:, 0], kind="stable")
    starts = np.searchsorted(arcs[order, 0], np.arange(graph.n + 1))
    rows, cols = [], []
    for i, (u, v) in enumerate(arcs):
        out = order[starts[v]:starts[v + 1]]
        out = out[arcs[out, 1] != u]
        rows.append(np.full(out.size, i))
        cols.append(out)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    return sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(m2, m2))


def _ihara_roots(lam: np.ndarray, q: int) -> np.ndarray:
    disc = np.sqrt((lam * lam - 4.0 * q).astype(complex))
    return np.concatenate([(lam + disc) / 2.0, (lam - disc) / 2.0])


def nonbacktracking_spectrum(graph: Graph, method: str = "auto") -> GraphSpectrum:
    """Eigenvalues of the Hashimoto operator B.

    ``quadratic`` solves mu^2 - lambda mu + q = 0 for every adjacency
    eigenvalue and adds |E| - |V| copies each of +1 and -1 (regular graphs
    only). ``direct`` runs a dense eigensolve on B. ``auto`` picks the
    quadratic route for regular graphs.
    """
    if method == "auto":
        method = "quadratic" if graph.degree is not None else "direct"
    if method == "quadratic":
        if graph.degree is None:
            raise InputError("quadratic route needs a regular graph")
        q = graph.degree - 1
        adj = adjacency_spectrum(graph)
        extra = graph.m - graph.n
        if extra < 0:
            raise InputError("graph has fewer edges than vertices")
        mu = np.concatenate([_ihara_roots(adj.eigenvalues, q),
                             np.ones(extra), -np.ones(extra)]).astype(complex)
    elif method == "direct":
        if 2 * graph.m > MAX_DENSE_NB:
            raise ResourceError(f"dense non-backtracking eigensolve capped at 2|E| <= {MAX_DENSE_NB}")
        mu = np.linalg.eigvals(nonbacktracking_matrix(graph).toarray())
        q = graph.degree - 1 if graph.degree else None
    else:
        raise InputError(f"unknown method {method!r}")
    order = np.lexsort((-mu.imag, -np.abs(mu)))
    return GraphSpectrum("nonbacktracking", mu[order], q, graph.is_bipartite())


def nonbacktracking_top(graph: Graph, k: int = 8, seed: int = 0) -> np.ndarray:
    """The k largest-modulus eigenvalues of B by Arnoldi iteration."""
    from scipy.sparse.linalg import eigs

    B = nonbacktracking_matrix(graph)
    v0 = np.random.default_rng(seed).standard_normal(B.shape[0])
    vals = eigs(B, k=k, which="LM", v0=v0, return_eigenvectors=False, tol=1e-12, maxiter=100_000)
    return vals[np.argsort(-np.abs(vals))]


def spectral_gap(graph: Graph, seed: int = 0) -> float:
    """degree - lambda_2 from the two largest adjacency eigenvalues (Lanczos)."""
    from scipy.sparse.linalg import eigsh

    k = _require_regular(graph) + 1
    if graph.n <= 2:
        raise InputError("need at least three vertices")
    A = graph.adjacency(dtype=float)
    v0 = np.random.default_rng(seed).standard_normal(graph.n)
    vals = np.sort(eigsh(A, k=2, which="LA", v0=v0, tol=1e-10, return_eigenvectors=False))
    return float(k - vals[0])


def _require_regular(graph_or_q):
    if isinstance(graph_or_q, Graph):
        if graph_or_q.degree is None:
            raise InputError(f"{graph_or_q.provenance} is not regular")
        return graph_or_q.degree - 1
    return int(graph_or_q)


def nontrivial_adjacency(eigenvalues: np.ndarray, q: int) -> np.ndarray:
    """Drop the eigenvalues +-(q+1) (trivial and, if bipartite, sign) ones."""
    ev = np.asarray(eigenvalues, dtype=float)
    return ev[np.abs(ev) < q + 1 - TRIVIAL_TOL]


def nontrivial_nonbacktracking(mu: np.ndarray, q: int) -> np.ndarray:
    """Drop the eigenvalues +-q paired with the trivial adjacency eigenvalues."""
    mu = np.asarray(mu, dtype=complex)
    if q == 1:
        return mu
    trivial = np.abs(np.abs(mu) - q) < TRIVIAL_TOL * q
    return mu[~trivial]


def nb_to_p(mu: complex, q: int, tol: float = TEMPERED_TOL) -> float:
    """p attached to a non-backtracking eigenvalue via |mu| = q^{1 - 1/p}."""
    r = abs(mu)
    if q == 1 or r <= math.sqrt(q) + tol:
        return 2.0
    frac = math.log(r) / math.log(q)
    if frac >= 1.0 - 1e-12:
        return math.inf
    return 1.0 / (1.0 - frac)


def density_profile(eigenvalues, q: int, p_grid) -> DensityProfile:
    """M(p) = number of nontrivial eigenvalues lambda with p(lambda) >= p."""
    ev = np.asarray(eigenvalues, dtype=float)
    if np.any(np.abs(ev) > q + 1 + 1e-6):
        raise InputError("eigenvalue exceeds the degree; is the graph (q+1)-regular?")
    ps = np.array([eigen_to_p(x, q) for x in nontrivial_adjacency(ev, q)])
    samples = [(float(p), int(np.count_nonzero(ps >= p))) for p in p_grid]
    return DensityProfile(q, len(ev), samples)


def density_profile_nb(mu, q: int, p_grid, n: int, circle_tol: float = 1e-6) -> DensityProfile:
    """M(p) read from the non-backtracking spectrum through |mu| = q^{1-1/p}.

    A representation contributes the roots of mu^2 - lambda mu + q. When it
    is tempered both roots lie on |mu| = sqrt(q) and the pair counts once;
    otherwise only the root outside that circle is used. The +-1 eigenvalues
    from the cycle space lie inside the circle and carry no representation.
    """
    if q < 2:
        raise InputError("the eigenvalue dictionary needs q >= 2")
    mu = nontrivial_nonbacktracking(mu, q)
    r, s = np.abs(mu), math.sqrt(q)
    on = np.abs(r - s) <= circle_tol * s
    big = mu[(r > s) & ~on]
    ps = np.array([nb_to_p(x, q) for x in big])
    tempered = int(np.count_nonzero(on)) // 2
    samples = []
    for p in p_grid:
        m = int(np.count_nonzero(ps >= p)) + (tempered if p <= 2 else 0)
        samples.append((float(p), m))
    return DensityProfile(q, n, samples)


def graph_density_profile(graph: Graph, p_grid) -> DensityProfile:
    q = _require_regular(graph)
    return density_profile(adjacency_spectrum(graph).eigenvalues, q, p_grid)


def fit_density_alpha(profiles: list[DensityProfile]) -> float | None:
    """Least-squares alpha in log M(p) = c_p + (1 - alpha (1 - 2/p)) log n.

    Uses every (graph, p) with p > 2 and M(p) > 0, with a separate intercept
    per p. Returns None with fewer than three distinct n or no usable data.
    """
    if len({pr.n for pr in profiles}) < 3:
        return None
    ps = sorted({p for pr in profiles for p, _ in pr.samples if p > 2})
    rows, rhs = [], []
    for pr in profiles:
        logn = math.log(pr.n)
        for p, m in pr.samples:
            if p <= 2 or m <= 0 or math.isinf(p):
                continue
            row = np.zeros(len(ps) + 1)
            row[ps.index(p)] = 1.0
            row[-1] = -(1.0 - 2.0 / p) * logn
            rows.append(row)
            rhs.append(math.log(m) - logn)
    if len(rows) <= len(ps):
        return None
    A = np.array(rows)
    used = np.any(A[:, :-1] != 0, axis=0)
    A = np.concatenate([A[:, :-1][:, used], A[:, -1:]], axis=1)
    sol, *_ = np.linalg.lstsq(A, np.array(rhs), rcond=None)
    return float(sol[-1])


def ihara_bass_check(graph: Graph, us) -> list[tuple[float, float, float, float]]:
    """Rows (u, det(I - uB), (1-u^2)^{|E|-|V|} det(I - uA + q u^2 I), rel. error)."""
    q = _require_regular(graph)
    if 2 * graph.m > MAX_DENSE_NB:
        raise ResourceError("Ihara-Bass check uses dense determinants of B")
    B = nonbacktracking_matrix(graph).toarray()
    A = graph.adjacency_dense()
    I_b, I_a = np.eye(len(B)), np.eye(graph.n)
    rows = []
    for u in us:
        s1, l1 = np.linalg.slogdet(I_b - u * B)
        s2, l2 = np.linalg.slogdet(I_a - u * A + q * u * u * I_a)
        l2 += (graph.m - graph.n) * math.log1p(-u * u)
        rel = abs(s1 * math.exp(l1 - l2) - s2) if s2 != 0 else math.inf
        rows.append((float(u), float(s1 * math.exp(l1)), float(s2 * math.exp(l2)), rel))
    return rows


@dataclass
class RamanujanReport:
    q: int
    n: int
    bipartite: bool
    max_adjacency: float
    max_nonbacktracking: float
    adjacency_ok: bool
    nonbacktracking_ok: bool
    consistent: bool
    pairing_error: float = 0.0
    notes: list = field(default_factory=list)


def ramanujan_report(graph: Graph, nb_method: str = "arnoldi", tol: float = 1e-6,
                     seed: int = 0) -> RamanujanReport:
    """Certify max |lambda| <= 2 sqrt(q) and max |mu| <= sqrt(q) separately.

    The adjacency side is a dense symmetric eigensolve; the non-backtracking
    side works on B itself (Arnoldi for the top of the spectrum, or a dense
    solve), so the two maxima are computed independently.
    """
    q = _require_regular(graph)
    adj = adjacency_spectrum(graph)
    lam = nontrivial_adjacency(adj.eigenvalues, q)
    max_lam = float(np.max(np.abs(lam))) if lam.size else 0.0
    if nb_method == "arnoldi":
        k = 6 if not adj.bipartite else 8
        mu = nontrivial_nonbacktracking(nonbacktracking_top(graph, k=k, seed=seed), q)
    else:
        mu = nontrivial_nonbacktracking(nonbacktracking_spectrum(graph, nb_method).eigenvalues, q)
    max_mu = float(np.max(np.abs(mu))) if mu.size else 0.0
    a_ok = max_lam <= 2 * math.sqrt(q) + tol
    b_ok = max_mu <= math.sqrt(q) + tol
    # p-sensitive pairing: each non-tempered lambda must carry |mu| = q^{1-1/p}
    pair_err = 0.0
    for x in lam[np.abs(lam) > 2 * math.sqrt(q) + TEMPERED_TOL]:
        p = eigen_to_p(x, q)
        big = abs(_ihara_roots(np.array([abs(x)]), q)[0])
        pair_err = max(pair_err, abs(big - q ** (1 - 1 / p)))
    return RamanujanReport(q, graph.n, adj.bipartite, max_lam, max_mu, a_ok, b_ok,
                           a_ok == b_ok, pair_err)


# --------------------------------------------------------------------------
# closed walks

def closed_walk_counts(graph: Graph, kmax: int) -> list[int]:
    """tr A^k for k = 1..kmax by integer dynamic programming over vertices."""
    A = graph.adjacency(dtype=np.int64)
    X = np.eye(graph.n, dtype=np.int64)
    out = []
    for _ in range(kmax):
        X = A @ X
        out.append(int(np.trace(X)))
    return out


def closed_nb_walk_counts(graph: Graph, kmax: int) -> list[int]:
    """tr B^k for k = 1..kmax: closed non-backtracking walks (cyclically reduced)."""
    B = nonbacktracking_matrix(graph).astype(np.int64)
    X = np.eye(B.shape[0], dtype=np.int64)
    out = []
    for _ in range(kmax):
        X = B @ X
        out.append(int(np.trace(X)))
    return out


@dataclass
class WalkTraceReport:
    graph: str
    rows: list  # (k, adjacency power sum, adjacency walks, nb power sum, nb walks)
    max_rel_error: float
    passed: bool


def _rel(a: float, b: float, scale: float) -> float:
    return abs(a - b) / max(1.0, abs(b), scale)


def walk_trace_check(graph: Graph, kmax: int = 8, nb_method: str = "auto",
                     tol: float = 1e-6) -> WalkTraceReport:
    """Compare eigenvalue power sums with integer closed-walk counts.

    Errors are relative to max(1, |count|, sum |eigenvalue|^k); the last term
    keeps cancellation-heavy sums that are exactly zero well-posed.
    """
    if kmax > 8 or kmax < 1:
        raise InputError("kmax must be in 1..8")
    if graph.n > 2000:
        raise ResourceError("walk trace check capped at n <= 2000")
    lam = adjacency_spectrum(graph).eigenvalues
    mu = nonbacktracking_spectrum(graph, nb_method).eigenvalues
    wa = closed_walk_counts(graph, kmax)
    wb = closed_nb_walk_counts(graph, kmax)
    rows, worst = [], 0.0
    for k in range(1, kmax + 1):
        sa = float(np.sum(lam ** k))
        sb = complex(np.sum(mu ** k))
        ea = _rel(sa, wa[k - 1], float(np.sum(np.abs(lam) ** k)))
        eb = max(_rel(sb.real, wb[k - 1], float(np.sum(np.abs(mu) ** k))),
                 abs(sb.imag) / max(1.0, float(np.sum(np.abs(mu) ** k))))
        worst = max(worst, ea, eb)
        rows.append((k, sa, wa[k - 1], sb.real, wb[k - 1]))
    return WalkTraceReport(graph.provenance, rows, worst, worst < tol)
