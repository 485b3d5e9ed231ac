import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from densitylab import calibration, trees
from densitylab.errors import InputError


def test_convolution_examples():
    assert trees.tree_convolution(2, 2, 2, 4) == 1
    assert trees.tree_convolution(2, 2, 2, 0) == trees.ball_size(2, 2) == 10


@pytest.mark.parametrize("q", [2, 3])
def test_closed_form_matches_bfs(q):
    R = 8
    for d in range(2 * R + 1):
        bfs = trees.bfs_convolution_counts(q, R, d)
        for r1 in range(R + 1):
            for r2 in range(R + 1):
                assert trees.tree_convolution(q, r1, r2, d) == bfs[r1, r2]


def test_q3_radius4_against_bfs():
    for d in range(9):
        assert trees.tree_convolution(3, 4, 4, d) == trees.bfs_convolution_counts(3, 8, d)[4, 4]


def test_sphere_and_ball_sizes():
    assert [trees.sphere_size(2, r) for r in range(4)] == [1, 3, 6, 12]
    assert trees.TreeModel(3).ball_size(2) == 1 + 4 + 12


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 5), st.integers(0, 8), st.integers(0, 8), st.integers(0, 18))
def test_convolution_symmetric_and_bounded(q, r1, r2, d):
    c = trees.tree_convolution(q, r1, r2, d)
    assert c == trees.tree_convolution(q, r2, r1, d)
    assert c <= min(trees.ball_size(q, r1), trees.ball_size(q, r2))
    assert (c == 0) == (d > r1 + r2)


def test_convolution_constant_frozen():
    worst = max(trees.check_convolution_lemma(q, r, 0).max_ratio for q in (2, 3, 4) for r in range(11))
    assert worst <= calibration.CONVOLUTION_CONSTANT
    # the sup (q+1)/(q-1) is approached: the constant is not loose
    assert worst > calibration.CONVOLUTION_CONSTANT - 0.01


def test_lemma_q2_r8_within_four():
    assert all(trees.check_convolution_lemma(2, r, 4.0).holds for r in range(9))


def test_far_end_ratio_is_one():
    rep = trees.check_convolution_lemma(3, 5, calibration.CONVOLUTION_CONSTANT)
    d, count, bound, ratio = rep.rows[-1]
    assert (d, count, bound, ratio) == (10, 1, 1.0, 1.0)


def test_q1_degenerate():
    rep = trees.check_convolution_lemma(1, 10, calibration.CONVOLUTION_CONSTANT)
    assert rep.degenerate
    assert rep.rows[0][1] == 21  # overlap length of two equal intervals
    assert rep.max_ratio == 21


def test_convolution_input_errors():
    with pytest.raises(InputError):
        trees.tree_convolution(0, 1, 1, 1)
    with pytest.raises(InputError):
        trees.tree_convolution(2, trees.MAX_RADIUS + 1, 1, 1)


def test_eigen_p_dictionary():
    assert trees.eigen_to_p(2 * math.sqrt(5), 5) == 2.0
    assert math.isinf(trees.eigen_to_p(6, 5))
    assert trees.p_to_eigen(2, 7) == pytest.approx(2 * math.sqrt(7))
    assert trees.p_to_eigen(math.inf, 7) == 8
    lam = 4 ** (1 / 3) + 4 ** (2 / 3)
    assert lam == pytest.approx(4.1072, abs=1e-4)
    assert trees.eigen_to_p(lam, 4) == pytest.approx(3.0, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.floats(2.05, 50.0), st.integers(2, 12))
def test_dictionary_round_trip(p, q):
    # lambda(p) is flat at p = 2, so the inverse is only well conditioned away from it
    assert trees.eigen_to_p(trees.p_to_eigen(p, q), q) == pytest.approx(p, rel=1e-6)


def test_near_tempered_snaps_to_two():
    assert trees.eigen_to_p(2 * math.sqrt(3) + 1e-10, 3) == 2.0
    assert trees.eigen_to_p(-2 * math.sqrt(3), 3) == 2.0


def test_dictionary_errors():
    with pytest.raises(InputError):
        trees.eigen_to_p(7.0, 5)
    with pytest.raises(InputError):
        trees.p_to_eigen(1.5, 3)


def test_spherical_function():
    phi = trees.xi_tree_profile(20, 3.0, 4)
    assert phi[0] == 1.0
    assert np.max(np.abs(trees.recursion_residuals(phi, 3.0, 4))) < 1e-12
    assert trees.xi_tree(0, 2.5, 3) == 1.0
    # trivial representation: constant function
    assert np.allclose(trees.xi_tree_profile(10, math.inf, 3), 1.0)


def test_spherical_function_averages_over_spheres():
    # oracle: the spherical function is the sphere average of the eigenfunction,
    # so (A phi)(0) = lambda phi(0) reads (q+1) phi(1) = lambda
    q, p = 3, 4.0
    phi = trees.xi_tree_profile(5, p, q)
    assert (q + 1) * phi[1] == pytest.approx(trees.p_to_eigen(p, q))
