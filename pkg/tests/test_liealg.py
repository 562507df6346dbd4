import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from prolongation.errors import ConfigurationError, ResourceError
from prolongation.liealg import (
    build_root_system,
    delete_node,
    weight_multiplicities,
    weyl_dimension,
)


def test_cartan_matrices():
    assert build_root_system("A", 2).cartan_matrix == ((2, -1), (-1, 2))
    assert build_root_system("B", 2).cartan_matrix == ((2, -1), (-2, 2))
    d4 = build_root_system("D", 4)
    assert len(d4.positive_roots) == 12
    assert d4.rho == (1, 1, 1, 1)


@pytest.mark.parametrize("series,lo,count", [("A", 1, lambda r: r * (r + 1) // 2), ("B", 2, lambda r: r * r), ("D", 3, lambda r: r * (r - 1))])
def test_positive_root_counts(series, lo, count):
    for r in range(lo, 7):
        rd = build_root_system(series, r)
        assert len(rd.positive_roots) == count(r)
        assert all(rd.cartan_matrix[i][i] == 2 for i in range(r))


def test_bad_series_and_rank():
    for args in [("C", 3), ("E", 6), ("B", 1), ("D", 2), ("A", 0)]:
        with pytest.raises(ConfigurationError):
            build_root_system(*args)


def test_weyl_dimension_examples():
    for n in range(1, 7):
        assert weyl_dimension(build_root_system("A", n), (1,) + (0,) * (n - 1)) == n + 1
    assert weyl_dimension(build_root_system("B", 3), (1, 1, 0)) == 105
    assert weyl_dimension(build_root_system("B", 2), (0, 1)) == 4
    # vector and half-spin representations of so(8)
    d4 = build_root_system("D", 4)
    assert weyl_dimension(d4, (1, 0, 0, 0)) == 8
    assert weyl_dimension(d4, (0, 0, 1, 0)) == 8
    assert weyl_dimension(d4, (0, 1, 0, 0)) == 28


def test_multiplicity_examples():
    a1 = weight_multiplicities(build_root_system("A", 1), (2,))
    assert dict(a1.items()) == {(2,): 1, (0,): 1, (-2,): 1}
    a2 = weight_multiplicities(build_root_system("A", 2), (1, 1))
    assert a2[(0, 0)] == 2 and len(a2) == 7 and a2.total() == 8
    b2 = weight_multiplicities(build_root_system("B", 2), (1, 0))
    assert len(b2) == 5 and set(dict(b2.items()).values()) == {1}


def test_cap_is_enforced():
    with pytest.raises(ResourceError) as info:
        weight_multiplicities(build_root_system("B", 4), (3, 1, 0, 1), cap=1000)
    assert info.value.cap == 1000


series_rank = st.sampled_from([("A", 1), ("A", 2), ("A", 3), ("B", 2), ("B", 3), ("D", 3), ("D", 4)])


@settings(max_examples=40, deadline=None)
@given(series_rank, st.data())
def test_multiplicities_sum_and_weyl_invariance(sr, data):
    rd = build_root_system(*sr)
    lam = tuple(data.draw(st.lists(st.integers(0, 2), min_size=rd.rank, max_size=rd.rank)))
    dim = weyl_dimension(rd, lam)
    assume(dim <= 3000)
    table = weight_multiplicities(rd, lam)
    assert table.total() == dim
    assert table[lam] == 1
    assert (dim == 1) == (sum(lam) == 0)
    for mu, m in table.items():
        for i in range(rd.rank):
            assert table[rd.reflect(mu, i)] == m


def test_node_deletion():
    assert delete_node(build_root_system("A", 3), 0).series == "A2"
    assert delete_node(build_root_system("B", 2), 0).series == "A1"
    assert delete_node(build_root_system("D", 3), 0).series == "A1xA1"
    assert delete_node(build_root_system("B", 3), 0).series == "B2"
