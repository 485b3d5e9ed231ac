import io
import itertools

import numpy as np
import pytest

from densitylab.errors import InputError, ResourceError
from densitylab.matgroups import (IntMatrix, ModMatrix, SubgroupSpec, brute_force_sl_mod_count,
                                  contains_batch, enumerate_quotient, enumerate_sl2_box,
                                  inverse_batch, reduce_mod, subgroup_contains)

from conftest import random_word_matrix


def M(*rows):
    return IntMatrix(tuple(tuple(r) for r in rows))


def test_intmatrix_rejects_bad_determinant():
    with pytest.raises(InputError):
        M((2, 0), (0, 1))


def test_inverse_is_exact(rng):
    for _ in range(50):
        g = random_word_matrix(rng, 3, 12)
        assert g @ g.inverse() == IntMatrix.identity(3)


def test_big_entries_promote():
    g = M((1, 2**40), (0, 1))
    h = g @ g @ g
    assert h.rows[0][1] == 3 * 2**40
    assert (g @ M((1, 0), (2**40, 1))).rows[0][0] == 1 + 2**80


@pytest.mark.parametrize("spec,g,expected", [
    (SubgroupSpec(2, "principal", 2), ((3, 2), (4, 3)), True),
    (SubgroupSpec(2, "principal", 2), ((1, 1), (0, 1)), False),
    (SubgroupSpec(2, "gamma0", 3), ((1, 0), (3, 1)), True),
])
def test_subgroup_contains_examples(spec, g, expected):
    assert subgroup_contains(spec, M(*g)) is expected


def test_contains_dimension_mismatch():
    with pytest.raises(InputError):
        subgroup_contains(SubgroupSpec(3, "principal", 2), IntMatrix.identity(2))


def test_gamma2_is_sl3_only():
    with pytest.raises(InputError):
        SubgroupSpec(2, "gamma2", 3)


@pytest.mark.parametrize("g,N,expected", [
    (((3, 2), (4, 3)), 2, ((1, 0), (0, 1))),
    (((1, 5), (0, 1)), 5, ((1, 0), (0, 1))),
    (((2, 1), (1, 1)), 3, ((2, 1), (1, 1))),
])
def test_reduce_mod_examples(g, N, expected):
    assert reduce_mod(M(*g), N).rows == expected


def test_reduce_mod_homomorphism(rng):
    for N in (2, 5, 12):
        for _ in range(30):
            g, h = random_word_matrix(rng), random_word_matrix(rng)
            assert reduce_mod(g @ h, N) == reduce_mod(g, N) @ reduce_mod(h, N)


def test_principal_membership_matches_reduction(rng):
    for N in (2, 3, 4, 7):
        spec = SubgroupSpec(2, "principal", N)
        for _ in range(100):
            g = random_word_matrix(rng, 2, 20)
            assert subgroup_contains(spec, g) == reduce_mod(g, N).is_identity()


@pytest.mark.parametrize("N", range(1, 9))
def test_principal_index_matches_brute_force(N):
    assert enumerate_quotient(SubgroupSpec(2, "principal", N)).index == brute_force_sl_mod_count(2, N)


def test_quotient_examples():
    assert enumerate_quotient(SubgroupSpec(2, "principal", 1)).index == 1
    assert enumerate_quotient(SubgroupSpec(2, "principal", 5)).index == 120
    assert enumerate_quotient(SubgroupSpec(2, "gamma0", 5)).index == 6


def _proj_line_size(N, n):
    """Number of points of P^{n-1}(Z/N): unimodular vectors modulo units."""
    vecs = [v for v in itertools.product(range(N), repeat=n)
            if np.gcd.reduce(list(v) + [N]) == 1]
    units = [u for u in range(N) if np.gcd(u, N) == 1]
    return len(vecs) // len(units)


@pytest.mark.parametrize("n,N", [(2, 4), (2, 6), (2, 7), (3, 3), (3, 4)])
def test_gamma0_index_is_projective_space(n, N):
    assert enumerate_quotient(SubgroupSpec(n, "gamma0", N)).index == _proj_line_size(N, n)


def test_gamma2_index_sl3():
    # stabiliser of a flag (point in a line) in P^2(F_3): 13 points x 4 lines each
    assert enumerate_quotient(SubgroupSpec(3, "gamma2", 3)).index == 52


def test_sl3_principal_index():
    assert enumerate_quotient(SubgroupSpec(3, "principal", 2)).index == brute_force_sl_mod_count(3, 2)


def test_cap_raises():
    with pytest.raises(ResourceError):
        enumerate_quotient(SubgroupSpec(2, "principal", 7), cap=100)


@pytest.mark.parametrize("spec", [SubgroupSpec(2, "principal", 6), SubgroupSpec(2, "gamma0", 9),
                                  SubgroupSpec(3, "gamma0", 3), SubgroupSpec(3, "gamma2", 2)])
def test_action_rows_are_permutations(spec):
    q = enumerate_quotient(spec)
    for s in range(q.table.shape[1]):
        assert sorted(q.table[:, s]) == list(range(q.index))


def test_composition_is_right_action(rng):
    q = enumerate_quotient(SubgroupSpec(2, "gamma0", 6))
    for _ in range(50):
        g, h = random_word_matrix(rng), random_word_matrix(rng)
        # pi(gh) = pi(h) o pi(g)
        assert np.array_equal(q.permutation(g @ h), q.permutation(h)[q.permutation(g)])


def test_table_matches_reduction_on_random_words(rng):
    for spec in (SubgroupSpec(2, "principal", 5), SubgroupSpec(2, "gamma0", 7)):
        q = enumerate_quotient(spec)
        for _ in range(500):
            c = int(rng.integers(q.index))
            word = rng.integers(len(q.generators), size=int(rng.integers(1, 15)))
            g = q.lifts[c]
            for s in word:
                g = g @ q.generators[s]
            assert q.apply_word(c, word) == q.coset_of(g)


def test_locate_matches_coset_of(rng):
    for spec in (SubgroupSpec(2, "principal", 6), SubgroupSpec(2, "gamma0", 8), SubgroupSpec(3, "gamma2", 2)):
        q = enumerate_quotient(spec)
        mats = [random_word_matrix(rng, spec.n, 10) for _ in range(40)]
        arr = np.array([m.rows for m in mats], dtype=np.int64)
        assert list(q.locate(arr)) == [q.coset_of(m) for m in mats]


def test_small_lifts_are_lifts():
    q = enumerate_quotient(SubgroupSpec(2, "gamma0", 7))
    lifts = q.small_lifts()
    assert [q.coset_of(y) for y in lifts] == list(range(q.index))
    assert max(y.max_entry() for y in lifts) <= max(y.max_entry() for y in q.lifts)


def test_csv_export():
    q = enumerate_quotient(SubgroupSpec(2, "gamma0", 3))
    lines = q.to_csv().splitlines()
    assert lines[0] == "coset_id,generator_id,image_coset_id"
    assert len(lines) == 1 + q.index * 2


def _naive_box(T):
    r = range(-T, T + 1)
    return sorted((a, b, c, d) for a, b, c, d in itertools.product(r, r, r, r) if a * d - b * c == 1)


@pytest.mark.parametrize("T", [0, 1, 2, 3, 5])
def test_box_enumeration_matches_naive(T):
    got = sorted(map(tuple, enumerate_sl2_box(T).reshape(-1, 4).tolist()))
    assert got == _naive_box(T)


def test_box_min_norm_shell():
    shell = enumerate_sl2_box(6, min_norm=4)
    full = enumerate_sl2_box(6)
    norms = np.abs(full).reshape(len(full), -1).max(axis=1)
    assert len(shell) == int(np.count_nonzero(norms >= 4))


def test_contains_batch_and_inverse_batch(rng):
    spec = SubgroupSpec(2, "gamma0", 4)
    box = enumerate_sl2_box(4)
    flags = contains_batch(spec, box)
    assert list(flags) == [subgroup_contains(spec, IntMatrix(m.tolist())) for m in box]
    prod = box @ inverse_batch(box)
    assert np.all(prod == np.eye(2, dtype=np.int64))


def test_modmatrix_checks_determinant():
    with pytest.raises(InputError):
        ModMatrix(5, ((2, 0), (0, 1)))
