import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from specfold.acceptance import (
    biexact_case,
    c3_species,
    d4_species,
    kunneth_case,
    random_complex,
    random_free_module,
    random_map,
)
from specfold.homological import (
    almost_koszul_resolution,
    homology,
    split_by_star_degree,
    zero_map,
)
from specfold.segre import (
    HomologyLeak,
    SegreAlgebra,
    compare_with_segre,
    identity_map,
    product_koszul_complex,
    segre_map,
    star_dims,
    tot_segre,
    tensor_species_presentation,
    verify_product_homology,
)
from specfold.species import dynkin_species, realize, sigma_stable_orientation
from specfold.tensor_algebra import preprojective, tensor_algebra

P = 7
GOLDEN = Path(__file__).parent / "golden"

PI_A2 = preprojective(dynkin_species("A", 2))
PI_A3 = preprojective(realize(sigma_stable_orientation("A", 3), P))
PI_C3 = preprojective(c3_species(P))
PI_D4 = preprojective(d4_species(P))


def names(module):
    return sorted("".join(map(str, s.vertex)) for s in module.summands)


@pytest.mark.parametrize("a,b", [(PI_A2, PI_A2), (PI_A3, PI_C3), (PI_C3, PI_D4)])
def test_dimension_formula(a, b):
    da, db = star_dims(a), star_dims(b)
    want = sum(n * db.get(k, 0) for k, n in da.items())
    assert SegreAlgebra(a, b).dim == want


@pytest.mark.parametrize("s", [c3_species(P), dynkin_species("D", 4), dynkin_species("B", 3)])
def test_segre_with_a1_is_star_zero_part(s):
    prod = SegreAlgebra(preprojective(dynkin_species("A", 1)), preprojective(s))
    assert prod.dim == tensor_algebra(s).dim
    assert all(b.deg[1] == 0 for b in prod.info)


PROD = SegreAlgebra(PI_A3, PI_A3)
idx = st.integers(0, PROD.dim - 1)


@given(idx, idx, idx)
def test_segre_is_associative(x, y, z):
    assert PROD.mul_vec(PROD.mul(x, y), {z: 1}) == PROD.mul_vec({x: 1}, PROD.mul(y, z))


def test_identity_segre_identity():
    rng = np.random.default_rng(1)
    X = random_free_module(PI_A3, rng, 0, 1, 3)
    Y = random_free_module(PI_C3, rng, 0, 1, 2)
    s = SegreAlgebra(PI_A3, PI_C3)
    m = segre_map(s, identity_map(X), identity_map(Y)).matrix()
    assert (m == np.eye(m.shape[0], dtype=np.int64)).all()


def test_map_segre_zero_is_zero():
    rng = np.random.default_rng(2)
    X0 = random_free_module(PI_A3, rng, 0, 0, 2)
    X1 = random_free_module(PI_A3, rng, 1, 0, 2)
    Y = random_free_module(PI_A3, rng, 0, 0, 2)
    f = random_map(X1, X0, rng)
    m = segre_map(PROD, f, zero_map(Y, Y)).matrix()
    assert not m.any()


@settings(max_examples=20)
@given(st.integers(0, 2 ** 32 - 1))
def test_segre_map_is_functorial(seed):
    rng = np.random.default_rng(seed)
    X = [random_free_module(PI_A3, rng, d, 0, 2) for d in (0, 1, 2)]
    Y = [random_free_module(PI_A3, rng, d, 0, 2) for d in (0, 1, 2)]
    f1, f2 = random_map(X[1], X[0], rng), random_map(X[2], X[1], rng)
    g1, g2 = random_map(Y[1], Y[0], rng), random_map(Y[2], Y[1], rng)
    lhs = segre_map(PROD, f1.compose(f2), g1.compose(g2)).matrix()
    rhs = segre_map(PROD, f1, g1).matrix() @ segre_map(PROD, f2, g2).matrix() % P
    assert (lhs == rhs).all()


@settings(max_examples=15)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([0, 1]))
def test_kunneth(seed, star):
    rng = np.random.default_rng(seed)
    X = random_complex(PI_A3, rng, star)
    Y = random_complex(PI_C3, rng, star)
    assert kunneth_case(PI_A3, PI_C3, X, Y)


@settings(max_examples=10)
@given(st.integers(0, 2 ** 32 - 1), st.booleans())
def test_biexact(seed, left):
    rng = np.random.default_rng(seed)
    assert biexact_case(PI_A3, PI_C3, rng, 0, left)


def _split(pi, i):
    return split_by_star_degree(almost_koszul_resolution(pi, i))


def test_c3_d4_product_complex():
    ps = product_koszul_complex(PI_C3, _split(PI_C3, 1), PI_D4, _split(PI_D4, 2), (1, 2))
    gold = json.loads((GOLDEN / "c3xd4_product.json").read_text())
    assert [names(t) for t in ps.cone.terms] == [sorted(t) for t in gold["terms"]]
    h = ps.cone.meta["homology"]
    assert all(not h[i] for i in range(1, ps.cone.length))
    assert ps.cone.meta["top_stars"] == [gold["top_star_degree"]]


def test_product_homology_checks_the_simple():
    ps = product_koszul_complex(PI_C3, _split(PI_C3, 1), PI_D4, _split(PI_D4, 2), (1, 2), check=False)
    with pytest.raises(HomologyLeak):
        verify_product_homology(ps, (1, 1))


@pytest.mark.parametrize("a,b", [(PI_A2, PI_A2), (PI_A3, PI_A3), (PI_A3, PI_C3)])
def test_presentation_matches_segre(a, b):
    seg = compare_with_segre(tensor_species_presentation(a, b), a, b)
    assert sum(seg.values()) == SegreAlgebra(a, b).dim


def test_presentation_rejects_two_extension_fields():
    pi_b2 = preprojective(dynkin_species("B", 2))
    with pytest.raises(ValueError):
        tensor_species_presentation(PI_C3, pi_b2)


def test_tot_of_star_zero_parts():
    r1 = almost_koszul_resolution(PI_A3, 2)
    r2 = almost_koszul_resolution(PI_A3, 2)
    # star shifts differ between terms, so only the star-0 parts combine
    sp1, sp2 = split_by_star_degree(r1), split_by_star_degree(r2)
    tot = tot_segre(PROD, sp1.R, sp2.R).complex
    h = homology(tot)
    assert h[0] == {((0, 0), (2, 2)): 1}
