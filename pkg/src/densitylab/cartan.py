"""Cartan and Iwasawa data for SL_n(R), the associated length functions, and
Monte-Carlo estimates of the Harish-Chandra functions Xi_p.

The length of g is l(g) = sum_i (n-1-2i) ln sigma_i, with sigma the singular
values in descending order (logarithms base e).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError

DET_TOL = 1e-6


def weights(n: int) -> np.ndarray:
    return np.array([n - 1 - 2 * i for i in range(n)], dtype=float)


@dataclass(frozen=True)
class CartanData:
    n: int
    sigma: np.ndarray
    l: float
    l_tilde: float


@dataclass(frozen=True)
class IwasawaData:
    n: int
    H: np.ndarray


def _as_matrix(g) -> np.ndarray:
    if hasattr(g, "to_array"):
        g = g.to_array()
    a = np.asarray(g, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError("expected a square matrix")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix has non-finite entries")
    return a


def cartan_decompose(g) -> CartanData:
    a = _as_matrix(g)
    n = a.shape[0]
    det = np.linalg.det(a)
    if abs(det - 1.0) >= DET_TOL * max(1.0, np.abs(a).max() ** n):
        raise InputError(f"det(g) = {det!r} is not 1")
    sigma = np.linalg.svd(a, compute_uv=False)
    logs = np.log(sigma)
    return CartanData(n, sigma, float(weights(n) @ logs), float(logs[0]))


def length(g) -> float:
    return cartan_decompose(g).l


def lengths_batch(mats: np.ndarray) -> np.ndarray:
    """l for every matrix of an (M, n, n) array (no determinant check)."""
    mats = np.asarray(mats, dtype=float)
    if mats.shape[0] == 0:
        return np.zeros(0)
    n = mats.shape[-1]
    if n == 2:
        # sigma_1^2 is the larger root of x^2 - F x + 1, F the squared Frobenius norm
        F = np.einsum("mij,mij->m", mats, mats)
        s2 = 0.5 * (F + np.sqrt(np.maximum(F * F - 4.0, 0.0)))
        return np.log(s2)
    sig = np.linalg.svd(mats, compute_uv=False)
    return np.log(sig) @ weights(n)


def length_compare(g) -> tuple[float, float, float]:
    """(l, l_tilde, l / l_tilde); the ratio is nan when l_tilde == 0."""
    c = cartan_decompose(g)
    ratio = c.l / c.l_tilde if c.l_tilde > 1e-12 else math.nan
    return c.l, c.l_tilde, ratio


def iwasawa(g) -> IwasawaData:
    """H(g) for g = k exp(H) n, read off the QR factorisation."""
    a = _as_matrix(g)
    q, r = np.linalg.qr(a)
    d = np.abs(np.diag(r))
    if np.any(d < 1e-12 * max(1.0, np.abs(a).max())):
        raise NumericalError("rank-deficient matrix in Iwasawa decomposition")
    return IwasawaData(a.shape[0], np.log(d))


def check_subadditivity(g1, g2, tol: float = 1e-6) -> bool:
    a, b = _as_matrix(g1), _as_matrix(g2)
    return length(a @ b) <= length(a) + length(b) + tol


def haar_orthogonal(n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed O(n) samples: QR of a Gaussian, R diagonal made positive."""
    z = rng.standard_normal((size, n, n))
    q, r = np.linalg.qr(z)
    s = np.sign(np.diagonal(r, axis1=1, axis2=2))
    s[s == 0] = 1.0
    return q * s[:, None, :]


def random_sl(n: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Gaussian matrices rescaled to determinant one."""
    shape = (n, n) if size is None else (size, n, n)
    z = rng.standard_normal(shape)
    det = np.linalg.det(z)
    neg = det < 0
    if size is None:
        if neg:
            z[0] *= -1
    else:
        z[neg, 0, :] *= -1
    det = np.abs(det)
    scale = det ** (1.0 / n)
    return z / (scale if size is None else scale[:, None, None])


def _xi_chunk(g: np.ndarray, exponent: float, size: int, seed) -> tuple[float, float]:
    rng = np.random.default_rng(seed)
    n = g.shape[0]
    k = haar_orthogonal(n, size, rng)
    _, r = np.linalg.qr(g @ k)
    diag = np.abs(np.diagonal(r, axis1=1, axis2=2))
    if np.any(diag < 1e-300):
        raise NumericalError("degenerate QR while sampling Xi_p")
    log_delta = np.log(diag) @ weights(n)
    vals = np.exp(-exponent * log_delta)
    return float(vals.sum()), float((vals * vals).sum())


def xi_p_montecarlo(g, p: float, samples: int = 10**5, seed: int = 0,
                    chunk: int = 50_000, threads: int = 1) -> tuple[float, float]:
    """Monte-Carlo estimate of Xi_p(g) = int_K delta(gk)^(-1/p) dk.

    Returns (estimate, standard error). The sample budget is split into
    fixed-size chunks with spawned seeds, so the result does not depend on
    ``threads``.
    """
    a = _as_matrix(g)
    if not (p >= 2):
        raise InputError("p must lie in [2, inf]")
    if samples < 1000:
        raise InputError("need at least 1000 samples")
    exponent = 0.0 if math.isinf(p) else 1.0 / p
    sizes = [chunk] * (samples // chunk)
    if samples % chunk:
        sizes.append(samples % chunk)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(sizes, seeds))
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda j: _xi_chunk(a, exponent, *j), jobs))
    else:
        parts = [_xi_chunk(a, exponent, *j) for j in jobs]
    s1 = math.fsum(x for x, _ in parts)
    s2 = math.fsum(y for _, y in parts)
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0) * samples / (samples - 1)
    return mean, math.sqrt(var / samples)


def xi2_sl2_exact(t: float) -> float:
    """Xi_2(diag(e^{t/2}, e^{-t/2})) in closed form, (2/pi) e^{-t/2} K(1 - e^{-2t})."""
    from scipy.special import ellipkm1

    return 2.0 / math.pi * math.exp(-t / 2.0) * float(ellipkm1(math.exp(-2.0 * t)))


def xi_upper_bound(t: float) -> float:
    return 2.0 * (1.0 + t) * math.exp(-t / 2.0)


def xi_lower_bound(t: float) -> float:
    return math.exp(-t / 2.0)
