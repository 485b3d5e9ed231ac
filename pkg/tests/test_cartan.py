import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from densitylab import cartan
from densitylab.errors import InputError, NumericalError


def a_t(t):
    return np.diag([math.exp(t / 2), math.exp(-t / 2)])


def test_sl2_diagonal_length():
    assert cartan.length(np.diag([math.e, 1 / math.e])) == pytest.approx(2.0, abs=1e-12)


def test_identity_lengths():
    c = cartan.cartan_decompose(np.eye(3))
    assert c.l == pytest.approx(0.0, abs=1e-14)
    assert c.l_tilde == pytest.approx(0.0, abs=1e-14)


def test_sl3_diagonal_length():
    g = np.diag([math.exp(1 / 3), math.exp(1 / 3), math.exp(-2 / 3)])
    assert cartan.length(g) == pytest.approx(2.0, abs=1e-12)


def test_length_compare_ratios():
    t = 10.0
    assert cartan.length_compare(a_t(t))[2] == pytest.approx(2.0, abs=0.1)
    g1 = np.diag([math.exp(t / 3), math.exp(t / 3), math.exp(-2 * t / 3)])
    g2 = np.diag([math.exp(2 * t / 3), math.exp(-t / 3), math.exp(-t / 3)])
    assert cartan.length_compare(g1)[2] == pytest.approx(6.0, abs=1e-9)
    assert cartan.length_compare(g2)[2] == pytest.approx(3.0, abs=1e-9)


def test_ratio_undefined_at_identity():
    assert math.isnan(cartan.length_compare(np.eye(2))[2])


def test_input_errors():
    with pytest.raises(InputError):
        cartan.cartan_decompose(np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(InputError):
        cartan.cartan_decompose(np.diag([2.0, 1.0]))


def test_sigma_invariants(rng):
    for n in (2, 3):
        for g in cartan.random_sl(n, rng, size=200):
            c = cartan.cartan_decompose(g)
            assert np.all(np.diff(c.sigma) <= 0)
            assert np.prod(c.sigma) == pytest.approx(1.0, abs=1e-9)
            assert c.l >= -1e-12


def test_lengths_batch_matches_svd(rng):
    for n in (2, 3):
        gs = cartan.random_sl(n, rng, size=300)
        assert np.allclose(cartan.lengths_batch(gs), [cartan.length(g) for g in gs], atol=1e-9)


def test_inverse_symmetry_and_k_invariance(rng):
    for n in (2, 3):
        gs = cartan.random_sl(n, rng, size=10_000)
        L = cartan.lengths_batch(gs)
        Li = cartan.lengths_batch(np.linalg.inv(gs))
        assert np.max(np.abs(L - Li)) < 1e-6
        k1 = cartan.haar_orthogonal(n, 10_000, rng)
        k2 = cartan.haar_orthogonal(n, 10_000, rng)
        assert np.max(np.abs(cartan.lengths_batch(k1 @ gs @ k2) - L)) < 1e-6


def test_subadditivity_random_pairs(rng):
    for n in (2, 3):
        g1 = cartan.random_sl(n, rng, size=10_000)
        g2 = cartan.random_sl(n, rng, size=10_000)
        lhs = cartan.lengths_batch(g1 @ g2)
        rhs = cartan.lengths_batch(g1) + cartan.lengths_batch(g2)
        assert np.all(lhs <= rhs + 1e-6)


def test_subadditivity_examples():
    g = a_t(3.0) @ np.array([[1.0, 2.0], [0.0, 1.0]])
    assert cartan.check_subadditivity(g, np.linalg.inv(g))
    assert cartan.check_subadditivity(g, np.eye(2))
    assert cartan.length(g @ np.eye(2)) == pytest.approx(cartan.length(g))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=2, max_size=2))
def test_iwasawa_of_diagonal(logs):
    x, y = logs
    g = np.diag([math.exp(x), math.exp(y)]) @ np.array([[1.0, 0.7], [0.0, 1.0]])
    H = cartan.iwasawa(g).H
    assert np.allclose(H, [x, y], atol=1e-9)


def test_iwasawa_product_one(rng):
    g = cartan.random_sl(3, rng)
    assert np.exp(cartan.iwasawa(g).H).prod() == pytest.approx(1.0, abs=1e-9)


def test_iwasawa_rank_deficient():
    with pytest.raises(NumericalError):
        cartan.iwasawa(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_haar_samples_are_orthogonal(rng):
    k = cartan.haar_orthogonal(3, 100, rng)
    assert np.allclose(k @ np.swapaxes(k, 1, 2), np.eye(3), atol=1e-12)


def test_xi_identity_is_one():
    est, se = cartan.xi_p_montecarlo(np.eye(2), 2, samples=5000, seed=1)
    assert est == pytest.approx(1.0, abs=1e-12)
    assert se == pytest.approx(0.0, abs=1e-12)


def test_xi_reproducible_and_thread_independent():
    g = a_t(3.0)
    a = cartan.xi_p_montecarlo(g, 2, samples=30_000, seed=7, chunk=4000)
    b = cartan.xi_p_montecarlo(g, 2, samples=30_000, seed=7, chunk=4000)
    c = cartan.xi_p_montecarlo(g, 2, samples=30_000, seed=7, chunk=4000, threads=3)
    assert a == b
    assert c[0] == pytest.approx(a[0], abs=1e-12)


def test_xi_closed_form_oracle():
    # independent route: direct quadrature of the SL_2 integral over the circle,
    # delta(a_t k_theta)^{-1/2} = (e^t cos^2 + e^{-t} sin^2)^{-1/2}
    from scipy.integrate import quad

    for t in (1.0, 4.0, 8.0):
        f = lambda th: (math.exp(t) * math.cos(th) ** 2 + math.exp(-t) * math.sin(th) ** 2) ** -0.5
        val = quad(f, 0, 2 * math.pi, limit=200)[0] / (2 * math.pi)
        assert cartan.xi2_sl2_exact(t) == pytest.approx(val, rel=1e-9)


@pytest.mark.parametrize("t", [2.0, 4.0, 6.0])
def test_xi_bounds_examples(t):
    est, se = cartan.xi_p_montecarlo(a_t(t), 2, samples=200_000, seed=int(t))
    assert cartan.xi_lower_bound(t) <= est <= cartan.xi_upper_bound(t)
    assert abs(est - cartan.xi2_sl2_exact(t)) < 4 * se


def test_xi_p4_exceeds_p2_on_tested_points():
    for t in (1.0, 3.0, 5.0):
        e2 = cartan.xi_p_montecarlo(a_t(t), 2, samples=20_000, seed=3)[0]
        e4 = cartan.xi_p_montecarlo(a_t(t), 4, samples=20_000, seed=3)[0]
        assert e4 >= e2


def test_xi_p_infinity_is_one():
    assert cartan.xi_p_montecarlo(a_t(3.0), math.inf, samples=2000)[0] == pytest.approx(1.0)


def test_xi_domain_errors():
    with pytest.raises(InputError):
        cartan.xi_p_montecarlo(np.eye(2), 1.5)
    with pytest.raises(InputError):
        cartan.xi_p_montecarlo(np.eye(2), 2, samples=10)
