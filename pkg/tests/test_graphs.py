import itertools

import numpy as np
import pytest

from densitylab import graphs, spectral
from densitylab.errors import InputError


def test_lps_5_13_is_bipartite_on_pgl2():
    # 5 is not a square mod 13, so the construction lands in PGL_2(F_13)
    assert graphs.legendre(5, 13) == -1
    with pytest.raises(InputError):
        graphs.build_lps(5, 13)
    g = graphs.build_lps(5, 13, allow_bipartite=True)
    assert g.n == 13 * (13**2 - 1) == 2184
    assert g.degree == 6 and not g.multigraph
    assert g.is_bipartite()


def test_lps_13_17_non_bipartite():
    g = graphs.build_lps(13, 17)
    assert g.n == 17 * (17**2 - 1) // 2
    assert g.degree == 14 and not g.is_bipartite()


def _quaternion_count(p):
    """Solutions of a^2+b^2+c^2+d^2 = p with a odd positive and b, c, d even."""
    r = int(p**0.5) + 1
    return sum(1 for a, b, c, d in itertools.product(range(-r, r + 1), repeat=4)
               if a > 0 and a % 2 and b % 2 == c % 2 == d % 2 == 0 and a * a + b * b + c * c + d * d == p)


@pytest.mark.parametrize("p,q", [(5, 13), (5, 29), (13, 17)])
def test_lps_generators(p, q):
    gens = graphs.lps_generators(p, q, projective_scale=graphs.legendre(p, q) == 1)
    assert len(gens) == p + 1 == _quaternion_count(p)
    # closed under inverses up to scalars
    def canon(m):
        lead = m[0] or m[1]
        inv = pow(lead, -1, q)
        return tuple(x * inv % q for x in m)
    keys = {canon(m) for m in gens}
    for a, b, c, d in gens:
        assert canon((d % q, -b % q, -c % q, a % q)) in keys


def test_lps_input_errors():
    with pytest.raises(InputError):
        graphs.build_lps(3, 13)
    with pytest.raises(InputError):
        graphs.build_lps(13, 5)


def test_cayley_sizes():
    assert graphs.build_cayley_sl2(3).n == 24
    g = graphs.build_cayley_sl2(7)
    assert g.n == 336 and g.degree == 4 and not g.multigraph


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47])
def test_cayley_connected_with_gap(p):
    g = graphs.build_cayley_sl2(p)
    assert spectral.spectral_gap(g) > 1e-3


def test_cayley_non_generating_set():
    with pytest.raises(InputError):
        graphs.build_cayley_sl2(5, [(1, 1, 0, 1), (1, -1, 0, 1)])
    with pytest.raises(InputError):
        graphs.build_cayley_sl2(5, "nope")


def test_random_regular():
    g = graphs.random_regular(10, 3, seed=4)
    assert g.m == 15 and not g.multigraph
    assert np.bincount(g.degrees()).tolist() == [0, 0, 0, 10]
    h = graphs.random_regular(10, 3, seed=4)
    assert np.array_equal(g.edges, h.edges)
    with pytest.raises(InputError):
        graphs.random_regular(5, 3, seed=0)


def test_edge_list_round_trip(tmp_path):
    g = graphs.petersen_graph()
    path = tmp_path / "pet.txt"
    g.to_edge_list(path)
    h = graphs.read_edge_list(path)
    assert h.n == 10 and h.degree == 3
    assert np.array_equal(np.sort(h.edges, axis=1), np.sort(g.edges, axis=1))


def test_edge_list_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1 2\n")
    with pytest.raises(InputError):
        graphs.read_edge_list(bad)
    bad.write_text("0 x\n")
    with pytest.raises(InputError):
        graphs.read_edge_list(bad)


def test_irregular_graph_has_no_q():
    g = graphs.make_graph(3, [(0, 1), (1, 2)], "path")
    assert g.degree is None
    with pytest.raises(InputError):
        g.q
