import pytest
from hypothesis import given, strategies as st

from specfold.field_tower import ExtensionField
from specfold.species import casimir, double, dynkin_species, species_from_arrows
from specfold.tensor_algebra import (
    FiniteGradedAlgebra,
    GenArrow,
    TruncationHit,
    casimir_vector,
    double_tensor_algebra,
    preprojective,
    socle,
    tensor_algebra,
)


def path_dim(s):
    """K-dimension of T(S) by summing over directed paths.

    dim_K (M (x)_D N) = dim_K M * dim_K N / dim_K D.
    """
    total = sum(s.degree(v) for v in s.vertices)
    frontier = [(a.target, s.bimodule_degree(a)) for a in s.arrows]
    while frontier:
        total += sum(d for _, d in frontier)
        frontier = [
            (a.target, d * s.bimodule_degree(a) // s.degree(v))
            for v, d in frontier for a in s.arrows if a.source == v
        ]
    return total


def c3():
    return species_from_arrows("C", 3, [(1, 2), (2, 3)])


def test_tensor_algebra_a2():
    t = tensor_algebra(dynkin_species("A", 2))
    assert t.dim == 3
    assert t.hilbert() == {(0, 0): 2, (1, 0): 1}


def test_tensor_algebra_a1():
    t = tensor_algebra(dynkin_species("A", 1))
    assert t.dim == 1
    assert t.top_degree == 0


@pytest.mark.parametrize("s", [
    c3(),
    dynkin_species("B", 3),
    dynkin_species("D", 4, [False, True, False]),
    dynkin_species("A", 4, [True, False, True]),
    dynkin_species("G", 2),
    dynkin_species("F", 4),
])
def test_tensor_algebra_matches_path_count(s):
    t = tensor_algebra(s)
    assert t.dim == path_dim(s)
    assert all(b.deg[1] == 0 for b in t.info)


def test_c3_tensor_dim():
    assert tensor_algebra(c3()).dim == 9


@pytest.mark.parametrize("family,n", [("A", 2), ("A", 3), ("A", 4), ("D", 4), ("D", 5), ("E", 6)])
def test_preprojective_dim_simply_laced(family, n):
    # n h (h + 1) / 6 for simply-laced types
    h = {"A": n + 1, "D": 2 * n - 2, "E": 12}[family]
    assert preprojective(dynkin_species(family, n)).dim == n * h * (h + 1) // 6


def test_preprojective_a2_hilbert():
    pi = preprojective(dynkin_species("A", 2))
    assert pi.hilbert() == {(0, 0): 2, (1, 0): 1, (1, 1): 1}


def test_preprojective_a1_is_the_field():
    pi = preprojective(dynkin_species("A", 1))
    assert pi.dim == 1


@pytest.mark.parametrize("family,n,flips", [
    ("C", 3, [[False, False], [True, False], [True, True]]),
    ("B", 2, [[False], [True]]),
    ("D", 4, [[False, False, False], [True, False, True]]),
])
def test_preprojective_dim_ignores_orientation(family, n, flips):
    dims = {preprojective(dynkin_species(family, n, f)).dim for f in flips}
    assert len(dims) == 1


@pytest.mark.parametrize("family,n,h", [("A", 3, 4), ("G", 2, 6), ("D", 4, 6), ("B", 3, 6)])
def test_socle_degree(family, n, h):
    pi = preprojective(dynkin_species(family, n))
    soc = socle(pi)
    assert {x.degree for x in soc} == {h - 2}
    assert sorted(x.vertex for x in soc) == sorted(pi.vertices)
    assert all(x.d_dim == 1 for x in soc)


def test_casimir_vanishes_in_preprojective():
    s = c3()
    d = double(s)
    c = casimir(d)
    assert casimir_vector(double_tensor_algebra(s, 2), c) != {}
    assert casimir_vector(preprojective(s), c) == {}


def test_truncation_hit_on_cycle():
    g = ExtensionField(7, 1)
    arrows = [GenArrow("a", 1, 2, 1), GenArrow("b", 2, 1, 1)]
    with pytest.raises(TruncationHit):
        FiniteGradedAlgebra(g, {1: 1, 2: 1}, arrows, (), 4)
    loose = FiniteGradedAlgebra(g, {1: 1, 2: 1}, arrows, (), 4, strict=False)
    assert loose.top_degree == 4


def test_full_associativity_small():
    assert preprojective(dynkin_species("A", 3)).check_associative()
    assert preprojective(dynkin_species("B", 2)).check_associative()


PI_C3 = preprojective(c3())
index = st.integers(0, PI_C3.dim - 1)


@given(index, index, index)
def test_associative_c3(a, b, c):
    left = PI_C3.mul_vec(PI_C3.mul(a, b), {c: 1})
    right = PI_C3.mul_vec({a: 1}, PI_C3.mul(b, c))
    assert left == right


@given(index, index)
def test_product_is_homogeneous(a, b):
    want = tuple(x + y for x, y in zip(PI_C3.info[a].deg, PI_C3.info[b].deg))
    for k in PI_C3.mul(a, b):
        assert PI_C3.info[k].deg == want
        assert PI_C3.info[k].src == PI_C3.info[b].src
        assert PI_C3.info[k].tgt == PI_C3.info[a].tgt


@given(index)
def test_units_act_trivially(a):
    b = PI_C3.info[a]
    assert PI_C3.mul(PI_C3.unit(b.tgt), a) == {a: 1}
    assert PI_C3.mul(a, PI_C3.unit(b.src)) == {a: 1}
