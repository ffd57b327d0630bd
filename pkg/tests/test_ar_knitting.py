from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from specfold.ar_knitting import (
    TableMismatch,
    coxeter,
    injective_classes,
    knit,
    nakayama_permutation,
    path_weights,
    projective_classes,
    weight,
)
from specfold.species import DynkinType, dynkin_edges, dynkin_species, species_from_arrows
from specfold.tensor_algebra import tensor_algebra

TYPES = [("A", 1), ("A", 2), ("A", 5), ("B", 2), ("B", 4), ("C", 3), ("C", 4), ("D", 4),
         ("D", 5), ("D", 6), ("E", 6), ("E", 7), ("F", 4), ("G", 2)]


def h_of(family, n):
    return {"A": n + 1, "B": 2 * n, "C": 2 * n, "D": 2 * n - 2}.get(
        family, {("E", 6): 12, ("E", 7): 18, ("E", 8): 30, ("F", 4): 12, ("G", 2): 6}.get((family, n)))


def tits_form(s, x):
    """sum d_i x_i^2 - sum_a dim_K(M_a) x_s x_t."""
    pos = {v: i for i, v in enumerate(s.vertices)}
    q = sum(s.degree(v) * x[pos[v]] ** 2 for v in s.vertices)
    for a in s.arrows:
        q -= s.bimodule_degree(a) * x[pos[a.source]] * x[pos[a.target]]
    return q


def test_a2_projectives():
    s = dynkin_species("A", 2)
    assert projective_classes(s) == [(1, 1), (0, 1)]
    assert injective_classes(s) == [(1, 0), (1, 1)]


def test_c3_projectives_count_multiplicity():
    s = species_from_arrows("C", 3, [(1, 2), (2, 3)])
    # M over G = F^2 at vertex 2, so P_1 contains S_2 twice
    assert projective_classes(s)[0] == (1, 2, 2)


@pytest.mark.parametrize("s", [species_from_arrows("C", 3, [(1, 2), (2, 3)]), dynkin_species("F", 4),
                               dynkin_species("G", 2), dynkin_species("D", 5, [True, False, True, False])])
def test_projectives_match_tensor_algebra(s):
    # coordinate j of [P_i] is dim_K(e_j T e_i) / d_j
    t = tensor_algebra(s)
    for i, cls in zip(s.vertices, projective_classes(s)):
        for j, c in zip(s.vertices, cls):
            count = sum(1 for b in t.info if b.src == i and b.tgt == j)
            assert count == c * s.degree(j)


def test_sink_projective_is_simple():
    s = dynkin_species("A", 3)  # 1 -> 2 -> 3
    assert projective_classes(s)[2] == (0, 0, 1)


@pytest.mark.parametrize("family,n", TYPES)
def test_coxeter_has_order_h(family, n):
    c = coxeter(dynkin_species(family, n))
    h = h_of(family, n)
    eye = np.eye(n, dtype=np.int64)
    assert (np.linalg.matrix_power(c, h) == eye).all()
    assert all(not (np.linalg.matrix_power(c, k) == eye).all() for k in range(1, h))


@pytest.mark.parametrize("family,n", TYPES)
def test_indecomposables_are_positive_roots(family, n):
    s = dynkin_species(family, n)
    ar = knit(s)
    assert len(ar.vertices) == n * h_of(family, n) // 2
    dims = [v.dim for v in ar.vertices.values()]
    assert len(set(dims)) == len(dims)
    for v in ar.vertices.values():
        assert tits_form(s, v.dim) == v.delta


def test_vertex_counts():
    assert len(knit(species_from_arrows("C", 3, [(1, 2), (2, 3)])).vertices) == 9
    assert len(knit(dynkin_species("A", 2)).vertices) == 3
    assert len(knit(dynkin_species("D", 4)).vertices) == 12


@pytest.mark.parametrize("family,n,sigma", [
    ("A", 4, {1: 4, 2: 3, 3: 2, 4: 1}),
    ("D", 5, {1: 2, 2: 1, 3: 3, 4: 4, 5: 5}),
    ("D", 4, {1: 1, 2: 2, 3: 3, 4: 4}),
    ("E", 6, {1: 5, 2: 4, 3: 3, 4: 2, 5: 1, 6: 6}),
    ("F", 4, {1: 1, 2: 2, 3: 3, 4: 4}),
    ("G", 2, {1: 1, 2: 2}),
])
def test_sigma_values(family, n, sigma):
    assert nakayama_permutation(knit(dynkin_species(family, n))).sigma == sigma


@pytest.mark.parametrize("family,n", TYPES)
def test_sigma_is_a_diagram_automorphism(family, n):
    s = dynkin_species(family, n)
    sigma = nakayama_permutation(knit(s)).sigma
    edges = {frozenset(e) for e in dynkin_edges(family, n)}
    assert {frozenset((sigma[a], sigma[b])) for a, b in edges} == edges
    assert all(s.degree(sigma[v]) == s.degree(v) for v in s.vertices)


def test_homogeneity():
    c3 = nakayama_permutation(knit(species_from_arrows("C", 3, [(1, 2), (2, 3)])))
    assert c3.homogeneous == 3
    d4 = nakayama_permutation(knit(dynkin_species("D", 4)))
    assert d4.homogeneous == 3
    a2 = nakayama_permutation(knit(dynkin_species("A", 2)))
    assert a2.homogeneous is None
    assert a2.lengths[1] + a2.lengths[2] == 3


def test_table_mismatch_is_raised():
    s = dynkin_species("A", 3)
    wrong = DynkinType("B", 3, ((1, 1), (2, 2), (3, 3)))
    with pytest.raises(TableMismatch):
        nakayama_permutation(knit(replace(s, dynkin=wrong)))


@pytest.mark.parametrize("family,n", TYPES)
def test_projective_to_injective_weight(family, n):
    s = dynkin_species(family, n)
    ar = knit(s)
    for i, key in ar.injective_at.items():
        assert weight(ar, (i, 0), key) == h_of(family, n) - 2
        assert ar.vertices[key].dim == injective_classes(s)[s.vertices.index(i)]


def test_arrows_have_weight_one():
    ar = knit(dynkin_species("E", 6))
    assert all(weight(ar, a.source, a.target) == 1 for a in ar.arrows)
    for key in ar.vertices:
        nxt = ar.tau_inverse(key)
        if nxt is not None:
            assert weight(ar, key, nxt) == 2


SPECIES = [dynkin_species("D", 5, [True, False, True, False]), dynkin_species("F", 4, [False, True, True]),
           species_from_arrows("C", 3, [(1, 2), (3, 2)])]


@given(st.sampled_from(range(len(SPECIES))), st.data())
def test_weight_is_path_independent(k, data):
    ar = knit(SPECIES[k])
    keys = sorted(ar.vertices)
    x = data.draw(st.sampled_from(keys))
    y = data.draw(st.sampled_from(keys))
    lengths = path_weights(ar, x, y)
    assert len(lengths) <= 1
    if lengths:
        assert lengths == [weight(ar, x, y)]


@pytest.mark.parametrize("s", [dynkin_species("D", 5, [False, True, True, False]),
                               species_from_arrows("C", 3, [(2, 1), (2, 3)]), dynkin_species("F", 4)])
def test_projective_arrows_transport_to_injectives(s):
    ar = knit(s)
    sigma = nakayama_permutation(ar).sigma
    pairs = {(a.source, a.target): a.d for a in ar.arrows}
    for a in ar.arrows:
        (i, ti), (j, tj) = a.source, a.target
        if ti == 0 and tj == 0:
            ii, jj = ar.injective_at[i], ar.injective_at[j]
            assert pairs.get((ii, jj)) == a.d
            assert sigma[i] == ii[0] and sigma[j] == jj[0]


def test_dot_output():
    dot = knit(dynkin_species("A", 2)).to_dot()
    assert dot.startswith("digraph AR {")
    assert dot.count("->") == 2
