"""Exact arithmetic in SL_n(Z) and SL_n(Z/N), congruence subgroups, and
finite coset spaces with their right action.

Integer matrices use Python ints, so products never overflow. Vectorised
helpers operate on int64 arrays of shape (M, n, n) and are only used where
entries are known to stay far below 2**31.
"""
from __future__ import annotations

import csv
import io
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, ResourceError

DEFAULT_COSET_CAP = 10**7


def _det(rows: Sequence[Sequence[int]]) -> int:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if n == 3:
        (a, b, c), (d, e, f), (g, h, i) = rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    raise InputError(f"dimension {n} not supported")


def _matmul(x, y, n):
    return tuple(
        tuple(sum(x[i][k] * y[k][j] for k in range(n)) for j in range(n))
        for i in range(n)
    )


@dataclass(frozen=True)
class IntMatrix:
    """A determinant-one integer matrix of size 2 or 3."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in r) for r in self.rows)
        n = len(rows)
        if n not in (2, 3) or any(len(r) != n for r in rows):
            raise InputError("IntMatrix must be a square 2x2 or 3x3 matrix")
        if _det(rows) != 1:
            raise InputError(f"determinant of {rows} is {_det(rows)}, not 1")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls, n: int = 2) -> "IntMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if other.n != self.n:
            raise InputError("dimension mismatch")
        return IntMatrix(_matmul(self.rows, other.rows, self.n))

    def inverse(self) -> "IntMatrix":
        r = self.rows
        if self.n == 2:
            (a, b), (c, d) = r
            return IntMatrix(((d, -b), (-c, a)))
        # adjugate; det is 1
        cof = [[0] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                minor = [[r[x][y] for y in range(3) if y != j] for x in range(3) if x != i]
                cof[i][j] = (-1) ** (i + j) * _det(minor)
        return IntMatrix(tuple(tuple(cof[j][i] for j in range(3)) for i in range(3)))

    def max_entry(self) -> int:
        return max(abs(x) for r in self.rows for x in r)

    def to_array(self, dtype=float) -> np.ndarray:
        return np.array(self.rows, dtype=dtype)

    def __repr__(self) -> str:
        return f"IntMatrix({[list(r) for r in self.rows]})"


@dataclass(frozen=True)
class ModMatrix:
    """An n x n matrix over Z/N with determinant one."""

    modulus: int
    rows: tuple

    def __post_init__(self):
        N = self.modulus
        if N < 1:
            raise InputError("modulus must be >= 1")
        rows = tuple(tuple(int(x) % N for x in r) for r in self.rows)
        if _det(rows) % N != 1 % N:
            raise InputError(f"{rows} does not have determinant 1 mod {N}")
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return len(self.rows)

    def __matmul__(self, other: "ModMatrix") -> "ModMatrix":
        if other.modulus != self.modulus or other.n != self.n:
            raise InputError("modulus or dimension mismatch")
        return ModMatrix(self.modulus, _matmul(self.rows, other.rows, self.n))

    def is_identity(self) -> bool:
        N = self.modulus
        return all(
            x == (1 % N if i == j else 0)
            for i, r in enumerate(self.rows)
            for j, x in enumerate(r)
        )

    def flat(self) -> tuple:
        return tuple(x for r in self.rows for x in r)


def reduce_mod(g: IntMatrix, N: int) -> ModMatrix:
    if N < 1:
        raise InputError("level must be >= 1")
    return ModMatrix(N, g.rows)


# --------------------------------------------------------------------------
# congruence subgroups

_KINDS = ("principal", "gamma0", "gamma2")


@dataclass(frozen=True)
class SubgroupSpec:
    """A congruence subgroup of SL_n(Z), n in {2, 3}.

    kind is one of ``principal`` (g = I mod N), ``gamma0`` (last row zero mod
    N except the corner) or ``gamma2`` (SL_3 only: all entries below the
    diagonal zero mod N).
    """

    n: int
    kind: str
    level: int

    def __post_init__(self):
        if self.n not in (2, 3):
            raise InputError("ambient group must be SL_2 or SL_3")
        if self.kind not in _KINDS:
            raise InputError(f"unknown subgroup kind {self.kind!r}")
        if self.level < 1:
            raise InputError("level must be >= 1")
        if self.kind == "gamma2" and self.n != 3:
            raise InputError("gamma2 is only defined inside SL_3")

    @classmethod
    def parse(cls, text: str, n: int = 2) -> "SubgroupSpec":
        """Parse ``principal(5)``, ``gamma0(7)``, ``Gamma2(3)``..."""
        t = text.strip().lower().replace(" ", "")
        if "(" not in t or not t.endswith(")"):
            raise InputError(f"cannot parse subgroup {text!r}")
        kind, arg = t[:-1].split("(", 1)
        kind = {"gamma": "principal", "p": "principal"}.get(kind, kind)
        try:
            level = int(arg)
        except ValueError:
            raise InputError(f"bad level in {text!r}") from None
        return cls(n, kind, level)

    def __str__(self) -> str:
        return f"{self.kind}({self.level}) in SL{self.n}"

    # positions that must vanish mod N (off-identity pattern for principal)
    def _zero_positions(self):
        n = self.n
        if self.kind == "gamma0":
            return [(n - 1, j) for j in range(n - 1)]
        if self.kind == "gamma2":
            return [(i, j) for i in range(n) for j in range(i)]
        return [(i, j) for i in range(n) for j in range(n) if i != j]


def subgroup_contains(spec: SubgroupSpec, g: IntMatrix) -> bool:
    if g.n != spec.n:
        raise InputError(f"matrix of size {g.n} tested against {spec}")
    N = spec.level
    if any(g.rows[i][j] % N for i, j in spec._zero_positions()):
        return False
    if spec.kind == "principal":
        return all((g.rows[i][i] - 1) % N == 0 for i in range(spec.n))
    return True


def contains_batch(spec: SubgroupSpec, mats: np.ndarray) -> np.ndarray:
    """Vectorised membership test for an (M, n, n) integer array."""
    mats = np.asarray(mats)
    if mats.ndim != 3 or mats.shape[1:] != (spec.n, spec.n):
        raise InputError(f"expected shape (M, {spec.n}, {spec.n}), got {mats.shape}")
    N = spec.level
    ok = np.ones(mats.shape[0], dtype=bool)
    for i, j in spec._zero_positions():
        ok &= mats[:, i, j] % N == 0
    if spec.kind == "principal":
        for i in range(spec.n):
            ok &= (mats[:, i, i] - 1) % N == 0
    return ok


# --------------------------------------------------------------------------
# generators

def standard_generators(n: int) -> tuple[list[IntMatrix], list[str]]:
    """S, T for SL_2; the twelve elementary matrices e_ij(+-1) for SL_3."""
    if n == 2:
        return [IntMatrix(((0, -1), (1, 0))), IntMatrix(((1, 1), (0, 1)))], ["S", "T"]
    gens, names = [], []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for s in (1, -1):
                rows = [[int(a == b) for b in range(n)] for a in range(n)]
                rows[i][j] = s
                gens.append(IntMatrix(rows))
                names.append(f"e{i}{j}({s:+d})")
    return gens, names


# --------------------------------------------------------------------------
# coset labels

def _units(N: int) -> list[int]:
    if N == 1:
        return [0]
    return [u for u in range(1, N) if math.gcd(u, N) == 1]


def _proj_label(v: Sequence[int], N: int, units: Sequence[int]) -> tuple:
    return min(tuple((u * x) % N for x in v) for u in units)


def _span_label(r1, r2, N: int) -> tuple:
    return tuple(sorted({
        tuple((x * a + y * b) % N for a, b in zip(r1, r2))
        for x in range(N) for y in range(N)
    }))


def coset_label(spec: SubgroupSpec, m: ModMatrix):
    """Canonical label of the right coset H m, H the image of the subgroup.

    principal: the matrix itself; gamma0: least unit multiple of the last
    row (a point of projective space); gamma2: that point together with the
    submodule spanned by the last two rows.
    """
    N = spec.level
    if spec.kind == "principal":
        return m.flat()
    units = _units(N)
    last = m.rows[-1]
    if spec.kind == "gamma0":
        return _proj_label(last, N, units)
    return (_proj_label(last, N, units), _span_label(m.rows[-2], last, N))


# --------------------------------------------------------------------------
# quotient space

@dataclass(frozen=True, eq=False)
class QuotientSpace:
    """The coset space Gamma_N \\ Gamma_1 with the right action of Gamma_1.

    ``table[c, s]`` is the coset ``c * generators[s]``. Coset 0 is the
    identity coset; the others are numbered in breadth-first order.
    """

    spec: SubgroupSpec
    labels: tuple
    reps: tuple  # ModMatrix per coset, first one reached
    lifts: tuple  # IntMatrix per coset: product of generators along the BFS tree
    generators: tuple
    generator_names: tuple
    table: np.ndarray
    _label_index: dict = field(repr=False, compare=False)

    @property
    def index(self) -> int:
        return len(self.labels)

    def coset_of(self, g) -> int:
        m = g if isinstance(g, ModMatrix) else reduce_mod(g, self.spec.level)
        return self._label_index[coset_label(self.spec, m)]

    def act(self, coset: int, g: IntMatrix) -> int:
        """Right action: the coset of rep(coset) * g."""
        return self.coset_of(self.reps[coset] @ reduce_mod(g, self.spec.level))

    def permutation(self, g: IntMatrix) -> np.ndarray:
        gm = reduce_mod(g, self.spec.level)
        return np.array([self.coset_of(r @ gm) for r in self.reps], dtype=np.int64)

    def apply_word(self, coset: int, word: Iterable[int]) -> int:
        for s in word:
            coset = int(self.table[coset, s])
        return coset

    def fixed_points(self, g: IntMatrix) -> int:
        perm = self.permutation(g)
        return int(np.count_nonzero(perm == np.arange(self.index)))

    # -- vectorised location of many integer matrices -----------------------
    def locate(self, mats: np.ndarray) -> np.ndarray:
        """Coset id of each matrix in an (M, n, n) integer array."""
        mats = np.asarray(mats, dtype=np.int64)
        N, n = self.spec.level, self.spec.n
        if N == 1:
            return np.zeros(mats.shape[0], dtype=np.int64)
        red = mats % N
        if self.spec.kind == "principal":
            codes = _encode(red.reshape(len(red), -1), N)
            order, sorted_codes = self._principal_codes()
            pos = np.searchsorted(sorted_codes, codes)
            return order[pos]
        if self.spec.kind == "gamma0":
            table = self._row_table()
            return table[_encode(red[:, n - 1, :], N)]
        return np.array([self.coset_of(ModMatrix(N, m.tolist())) for m in red], dtype=np.int64)

    def _principal_codes(self):
        cache = self.__dict__.get("_pcodes")
        if cache is None:
            N = self.spec.level
            codes = _encode(np.array(self.labels, dtype=np.int64), N)
            order = np.argsort(codes)
            cache = (order, codes[order])
            object.__setattr__(self, "_pcodes", cache)
        return cache

    def _row_table(self):
        cache = self.__dict__.get("_rtable")
        if cache is None:
            N, n = self.spec.level, self.spec.n
            units = _units(N)
            cache = np.full(N**n, -1, dtype=np.int64)
            for code in range(N**n):
                v = [(code // N ** (n - 1 - k)) % N for k in range(n)]
                lab = _proj_label(v, N, units)
                cache[code] = self._label_index.get(lab, -1)
            object.__setattr__(self, "_rtable", cache)
        return cache

    def small_lifts(self, cap: int | None = None) -> list[IntMatrix]:
        """Integer lift of each coset with the least possible max-entry.

        SL_2 only; found by scanning the box of matrices with entries up to
        ``cap`` (default N**2). Cosets with no lift in the box keep their
        breadth-first lift.
        """
        if self.spec.n != 2:
            return list(self.lifts)
        N = self.spec.level
        cap = max(1, N * N if cap is None else cap)
        best: list[IntMatrix | None] = [None] * self.index
        missing = self.index
        for T in range(1, cap + 1):
            box = enumerate_sl2_box(T, min_norm=T)
            ids = self.locate(box)
            for m, c in zip(box, ids):
                if best[c] is None:
                    best[c] = IntMatrix(m.tolist())
                    missing -= 1
            if missing == 0:
                break
        return [b if b is not None else l for b, l in zip(best, self.lifts)]

    def to_csv(self, fh=None) -> str:
        buf = fh if fh is not None else io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["coset_id", "generator_id", "image_coset_id"])
        for c in range(self.index):
            for s in range(len(self.generators)):
                w.writerow([c, s, int(self.table[c, s])])
        return buf.getvalue() if fh is None else ""


def _encode(arr: np.ndarray, N: int) -> np.ndarray:
    arr = np.asarray(arr, dtype=np.int64)
    code = np.zeros(arr.shape[0], dtype=np.int64)
    for k in range(arr.shape[1]):
        code = code * N + arr[:, k]
    return code


def enumerate_quotient(spec: SubgroupSpec, cap: int = DEFAULT_COSET_CAP) -> QuotientSpace:
    """Breadth-first coset enumeration over the standard generators."""
    gens, names = standard_generators(spec.n)
    N = spec.level
    gens_mod = [reduce_mod(g, N) for g in gens]
    ident = IntMatrix.identity(spec.n)
    first = reduce_mod(ident, N)
    labels = [coset_label(spec, first)]
    index = {labels[0]: 0}
    reps, lifts = [first], [ident]
    rows: list[list[int]] = []
    queue = deque([0])
    while queue:
        c = queue.popleft()
        row = []
        for s, gm in enumerate(gens_mod):
            img = reps[c] @ gm
            lab = coset_label(spec, img)
            j = index.get(lab)
            if j is None:
                j = len(labels)
                if j >= cap:
                    raise ResourceError(f"{spec}: more than {cap} cosets")
                index[lab] = j
                labels.append(lab)
                reps.append(img)
                lifts.append(lifts[c] @ gens[s])
                queue.append(j)
            row.append(j)
        rows.append(row)
    table = np.array(rows, dtype=np.int64).reshape(len(labels), len(gens))
    table.setflags(write=False)
    return QuotientSpace(spec, tuple(labels), tuple(reps), tuple(lifts),
                         tuple(gens), tuple(names), table, index)


def brute_force_sl_mod_count(n: int, N: int) -> int:
    """Number of determinant-one n x n matrices over Z/N, by exhaustion."""
    if N == 1:
        return 1
    grids = np.indices((N,) * (n * n)).reshape(n * n, -1)
    m = grids.T.reshape(-1, n, n).astype(np.int64)
    det = np.rint(np.linalg.det(m)).astype(np.int64) if n > 2 else m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
    return int(np.count_nonzero(det % N == 1 % N))


# --------------------------------------------------------------------------
# enumeration of integer matrices in a max-norm box

def _inverse_table(m: int) -> np.ndarray:
    inv = np.full(m, -1, dtype=np.int64)
    if m == 1:
        inv[0] = 0
        return inv
    for r in range(1, m):
        if math.gcd(r, m) == 1:
            inv[r] = pow(r, -1, m)
    return inv


def enumerate_sl2_box(T: int, min_norm: int = 0) -> np.ndarray:
    """All g in SL_2(Z) with min_norm <= max|entry| <= T, as an (M, 2, 2) array.

    Loops over a and b and steps c through the residue class that makes
    d = (1 + bc)/a integral, so the work is O(T^2 log T) instead of O(T^3).
    """
    if T < 0:
        return np.zeros((0, 2, 2), dtype=np.int64)
    if T > 20000:
        raise ResourceError("box enumeration is capped at T <= 20000")
    out = []
    rng = np.arange(-T, T + 1, dtype=np.int64)
    if T >= 1:  # a == 0 forces bc = -1
        for b, c in ((1, -1), (-1, 1)):
            blk = np.empty((rng.size, 4), dtype=np.int64)
            blk[:, 0], blk[:, 1], blk[:, 2], blk[:, 3] = 0, b, c, rng
            out.append(blk)
    inv_cache: dict[int, np.ndarray] = {}
    for a in range(-T, T + 1):
        if a == 0:
            continue
        m = abs(a)
        inv = inv_cache.get(m)
        if inv is None:
            inv = inv_cache[m] = _inverse_table(m)
        bi = inv[rng % m]
        keep = bi >= 0
        b = rng[keep]
        c0 = (-bi[keep]) % m
        c_start = -T + ((c0 + T) % m)
        J = (2 * T) // m + 1
        C = c_start[:, None] + m * np.arange(J, dtype=np.int64)[None, :]
        B = np.broadcast_to(b[:, None], C.shape)
        ok = C <= T
        num = 1 + B * C
        D = num // a
        ok &= np.abs(D) <= T
        cnt = int(ok.sum())
        if cnt:
            blk = np.empty((cnt, 4), dtype=np.int64)
            blk[:, 0] = a
            blk[:, 1] = B[ok]
            blk[:, 2] = C[ok]
            blk[:, 3] = D[ok]
            out.append(blk)
    if not out:
        return np.zeros((0, 2, 2), dtype=np.int64)
    allm = np.concatenate(out)
    if min_norm > 0:
        allm = allm[np.abs(allm).max(axis=1) >= min_norm]
    return allm.reshape(-1, 2, 2)


def inverse_batch(mats: np.ndarray) -> np.ndarray:
    """Inverses of determinant-one integer matrices (n = 2 or 3)."""
    mats = np.asarray(mats, dtype=np.int64)
    n = mats.shape[-1]
    if n == 2:
        out = np.empty_like(mats)
        out[:, 0, 0] = mats[:, 1, 1]
        out[:, 1, 1] = mats[:, 0, 0]
        out[:, 0, 1] = -mats[:, 0, 1]
        out[:, 1, 0] = -mats[:, 1, 0]
        return out
    out = np.empty_like(mats)
    for i in range(3):
        for j in range(3):
            r = [x for x in range(3) if x != j]
            c = [y for y in range(3) if y != i]
            minor = (mats[:, r[0], c[0]] * mats[:, r[1], c[1]]
                     - mats[:, r[0], c[1]] * mats[:, r[1], c[0]])
            out[:, i, j] = (-1) ** (i + j) * minor
    return out
