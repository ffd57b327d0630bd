import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from specfold.field_tower import (
    ExtensionField,
    Inconsistent,
    Matrix,
    PrimeField,
    RationalField,
    Reducer,
    check_prime,
    default_prime,
    irreducible_poly,
    kernel_basis,
    kernel_mod,
    rank,
    rank_mod,
    rref,
    rref_mod,
    solve,
    solve_mod,
)


def brute_rank(rows, p):
    """Oracle: |row space| = p^rank, counted by enumerating every combination."""
    rows = [tuple(r) for r in rows]
    span = set()
    for coeffs in itertools.product(range(p), repeat=len(rows)):
        v = tuple(sum(c * r[j] for c, r in zip(coeffs, rows)) % p for j in range(len(rows[0])))
        span.add(v)
    r = 0
    while p ** r < len(span):
        r += 1
    return r


def test_rref_identity_and_zero():
    f = PrimeField(7)
    eye = Matrix.identity(f, 3)
    r, piv = rref(eye)
    assert r == eye and piv == [0, 1, 2]
    z = Matrix.zero(f, 2, 4)
    r, piv = rref(z)
    assert r == z and piv == []


def test_rank_nullity_against_enumeration():
    rng = random.Random(5)
    f = PrimeField(7)
    for _ in range(3):
        rows = [[rng.randrange(7) for _ in range(7)] for _ in range(5)]
        rows[4] = [(a + 2 * b) % 7 for a, b in zip(rows[0], rows[1])]
        m = Matrix.from_rows(f, rows)
        r = rank(m)
        assert r + len(kernel_basis(m)) == 7
        assert r == brute_rank(rows, 7) == 4


def test_kernel_examples():
    f = PrimeField(5)
    assert kernel_basis(Matrix.identity(f, 3)) == []
    assert kernel_basis(Matrix.zero(f, 1, 3)) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    (v,) = kernel_basis(Matrix.from_rows(f, [[1, 1]]))
    assert v == [4, 1]


def test_solve():
    f = PrimeField(7)
    assert solve(Matrix.identity(f, 3), [1, 2, 3]) == [1, 2, 3]
    with pytest.raises(Inconsistent):
        solve(Matrix.zero(f, 2, 2), [1, 0])
    m = Matrix.from_rows(f, [[2, 1, 0], [0, 3, 1], [1, 0, 4]])
    x = [3, 5, 6]
    b = m.apply(x)
    assert solve(m, b) == x
    assert m.apply(solve(m, b)) == b


def test_rationals_do_not_overflow():
    q = RationalField()
    m = Matrix.from_rows(q, [[Fraction(10 ** 30), 1], [1, Fraction(1, 10 ** 30)]])
    assert rank(m) == 1


def test_numpy_path_agrees_with_generic_rref():
    rng = np.random.default_rng(3)
    f = PrimeField(11)
    for _ in range(10):
        a = rng.integers(0, 11, size=(4, 6))
        a[3] = (a[0] + 5 * a[2]) % 11
        r1, p1 = rref(Matrix.from_rows(f, a.tolist()))
        r2, p2 = rref_mod(a, 11)
        assert p1 == p2
        assert [list(row) for row in r1.entries[:len(p1)]] == r2[:len(p2)].tolist()
        K = kernel_mod(a, 11)
        assert not (a @ K.T % 11).any()
        assert rank_mod(a, 11) + len(K) == 6


def test_solve_mod_and_reducer():
    a = np.array([[1, 2, 0], [0, 1, 1]])
    x = solve_mod(a, np.array([3, 4]), 7)
    assert ((a @ x - np.array([3, 4])) % 7 == 0).all()
    with pytest.raises(Inconsistent):
        solve_mod(np.array([[1, 1], [2, 2]]), np.array([1, 0]), 7)
    red = Reducer(np.array([[1, 1, 0]]), 3, 7)
    assert not red.reduce(np.array([2, 2, 0])).any()
    assert red.reduce(np.array([0, 0, 1])).any()


def test_prime_checks(monkeypatch):
    for bad in (2, 9, 65537, 1):
        with pytest.raises(ValueError):
            check_prime(bad)
    check_prime(7)
    monkeypatch.setenv("SPECFOLD_PRIME", "13")
    assert default_prime() == 13
    monkeypatch.delenv("SPECFOLD_PRIME")
    assert default_prime() == 7


def test_irreducible_polynomials_are_fixed():
    assert irreducible_poly(7, 2) == (1, 0)       # x^2 + 1
    assert irreducible_poly(7, 1) == (0,)
    for k in (2, 3):
        g = ExtensionField(7, k)
        # the field has no zero divisors: x^(p^k - 1) = 1 for every unit
        for a in list(g.elements())[1:20]:
            assert g.pow(a, 7 ** k - 1) == g.one


@pytest.mark.parametrize("field", [PrimeField(7), ExtensionField(7, 2), ExtensionField(7, 3),
                                   ExtensionField(11, 2), RationalField()])
def test_field_axioms(field):
    rng = random.Random(17)
    for _ in range(10 ** 4 if not isinstance(field, RationalField) else 2000):
        a, b, c = field.random(rng), field.random(rng), field.random(rng)
        assert field.mul(field.mul(a, b), c) == field.mul(a, field.mul(b, c))
        assert field.add(field.add(a, b), c) == field.add(a, field.add(b, c))
        assert field.mul(a, field.add(b, c)) == field.add(field.mul(a, b), field.mul(a, c))
        assert field.mul(a, b) == field.mul(b, a)
        if not field.is_zero(a):
            assert field.mul(a, field.inv(a)) == field.one


@given(st.integers(0, 48), st.integers(0, 48))
def test_frobenius_is_a_field_automorphism(i, j):
    g = ExtensionField(7, 2)
    a, b = g.power(i), g.power(j)
    fr = g.frobenius
    assert fr(g.mul(a, b)) == g.mul(fr(a), fr(b))
    assert fr(g.add(a, b)) == g.add(fr(a), fr(b))
    assert fr(fr(a)) == a
    assert fr(g.embed(i)) == g.embed(i)


@given(st.lists(st.lists(st.integers(0, 6), min_size=4, max_size=4), min_size=1, max_size=5))
def test_rank_is_row_order_independent(rows):
    f = PrimeField(7)
    a = rank(Matrix.from_rows(f, rows))
    b = rank(Matrix.from_rows(f, rows[::-1]))
    assert a == b == rank_mod(np.array(rows), 7)
