"""Exact scalars, univariate factorization, and linear algebra."""

from fractions import Fraction
from functools import reduce

import pytest
from hypothesis import given, settings, strategies as st

from orbint.arith import (CycElem, CyclotomicField, QQ, UniPoly, char_poly,
                          cyclotomic_polynomial, determinant,
                          factor_univariate, solve_linear,
                          squarefree_decomposition)
from orbint.budgets import Budget
from orbint.errors import DegreeTooLarge

K3 = CyclotomicField(3)
K4 = CyclotomicField(4)

rationals = st.builds(Fraction, st.integers(-50, 50), st.integers(1, 12))


def cyc3(coords):
    return CycElem(K3, tuple(Fraction(c) for c in coords))


cyc_elems = st.tuples(rationals, rationals).map(cyc3)


# --- field axioms -----------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(cyc_elems, cyc_elems, cyc_elems)
def test_cyclotomic_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == 0


@settings(max_examples=40, deadline=None)
@given(cyc_elems)
def test_cyclotomic_inverse(a):
    if a:
        assert a * a.inverse() == 1


def test_canonical_forms_unique():
    z = K3.generator
    # zeta^2 reduces against Phi_3 = t^2 + t + 1
    assert z * z == -1 - z
    assert z ** 3 == 1
    assert hash(K3.coerce(Fraction(1, 2))) == hash(Fraction(1, 2))
    # conductor 4: zeta = i
    i = K4.generator
    assert i * i == -1


def test_cyclotomic_polynomials():
    assert cyclotomic_polynomial(1) == [Fraction(-1), Fraction(1)]
    assert cyclotomic_polynomial(2) == [Fraction(1), Fraction(1)]
    assert cyclotomic_polynomial(3) == [Fraction(1)] * 3
    assert cyclotomic_polynomial(4) == [Fraction(1), Fraction(0), Fraction(1)]
    assert cyclotomic_polynomial(6) == [Fraction(1), Fraction(-1), Fraction(1)]


# --- factorization ----------------------------------------------------------

def poly(coeffs, field=QQ):
    return UniPoly(field, coeffs)


def multiply_back(factors, field=QQ):
    acc = UniPoly(field, [1])
    for f, m in factors:
        for _ in range(m):
            acc = acc * f
    return acc


def rational_root_candidates(p: UniPoly):
    """Independent oracle: all rational roots lie among +-(divisors of the
    constant term over divisors of the leading coefficient)."""
    const = p.coeffs[0]
    lead = p.coeffs[-1]
    if not const:
        return {Fraction(0)}
    nums = [d for d in range(1, abs(const.numerator * const.denominator) + 1)
            if (const.numerator * const.denominator) % d == 0]
    dens = [d for d in range(1, abs(lead.numerator * lead.denominator) + 1)
            if (lead.numerator * lead.denominator) % d == 0]
    out = set()
    for n in nums:
        for d in dens:
            out.add(Fraction(n, d))
            out.add(Fraction(-n, d))
    return out


def test_difference_of_squares():
    fac = factor_univariate(poly([-1, 0, 1]))
    assert fac == [(poly([-1, 1]), 1), (poly([1, 1]), 1)]


def test_sum_of_squares_irreducible():
    assert factor_univariate(poly([1, 0, 1])) == [(poly([1, 0, 1]), 1)]


def test_cube_root_of_two_irreducible():
    p = poly([-2, 0, 0, 1])
    # oracle: no rational root among the divisor candidates, and a cubic
    # with no rational root is irreducible
    assert all(p.eval(r) != 0 for r in rational_root_candidates(p))
    assert factor_univariate(p) == [(p, 1)]


def test_multiplicities():
    p = poly([0, 0, 1]) * poly([-1, 1]) * poly([-1, 1])
    fac = factor_univariate(p)
    assert fac == [(poly([-1, 1]), 2), (poly([0, 1]), 2)]


def test_swinnerton_dyer_recombination():
    # x^4 - 10x^2 + 1 factors into quadratics modulo every prime but is
    # irreducible over Q; exercises subset recombination
    p = poly([1, 0, -10, 0, 1])
    assert factor_univariate(p) == [(p, 1)]


def test_quartic_with_two_quadratic_factors():
    p = poly([1, 1, 1]) * poly([4, -2, 1])
    fac = factor_univariate(p)
    assert fac == [(poly([1, 1, 1]), 1), (poly([4, -2, 1]), 1)]


def test_degree_bound():
    p = poly([1] + [0] * 64 + [1])  # x^65 + 1
    with pytest.raises(DegreeTooLarge):
        factor_univariate(p, Budget(degree_bound=64))


def test_factor_over_cyclotomic_splits():
    z = K3.generator
    # x^2 + x + 1 = (x - zeta)(x - zeta^2) over Q(zeta_3)
    f = UniPoly(K3, [1, 1, 1])
    fac = factor_univariate(f)
    assert len(fac) == 2
    assert multiply_back(fac, K3).monic() == f.monic()
    roots = [(-g.coeffs[0]) for g, _ in fac]
    assert {roots[0], roots[1]} == {z, z * z}


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4),
                          st.integers(1, 3)),
                min_size=1, max_size=3))
def test_factor_multiply_back(spec):
    factors = [poly([a, b, c]) for a, b, c in spec]
    product = reduce(lambda x, y: x * y, factors)
    if product.degree < 1:
        return
    fac = factor_univariate(product)
    assert multiply_back(fac).monic() == product.monic()
    # irreducibility self-check: no factor splits against candidate roots,
    # except through genuine linear factors it already exposes
    for f, _ in fac:
        if f.degree > 1:
            assert all(f.eval(r) != 0 for r in rational_root_candidates(f))


def test_squarefree_decomposition():
    p = poly([0, 0, 1]) * poly([-1, 1]) * poly([-1, 1])
    parts = squarefree_decomposition(p)
    assert parts == [(poly([0, -1, 1]), 2)]


# --- linear algebra ---------------------------------------------------------

def test_solve_identity():
    sol = solve_linear(QQ, [[1, 0], [0, 1]], [5, 7])
    assert sol.consistent
    assert sol.solution == (Fraction(5), Fraction(7))
    assert sol.nullspace == ()


def test_solve_rank_one():
    sol = solve_linear(QQ, [[1, 1], [2, 2]], [1, 2])
    assert sol.consistent
    x, y = sol.solution
    assert x + y == 1
    assert len(sol.nullspace) == 1
    nx, ny = sol.nullspace[0]
    assert nx + ny == 0 and (nx, ny) != (0, 0)


def test_solve_inconsistent_witness():
    sol = solve_linear(QQ, [[1, 1], [2, 2]], [1, 3])
    assert not sol.consistent
    assert sol.solution is None
    assert sol.witness in (0, 1)


def test_solve_over_extension():
    z = K3.generator
    sol = solve_linear(K3, [[z, 1], [1, z]], [1, 0])
    assert sol.consistent
    a, b = sol.solution
    assert z * a + b == 1 and a + z * b == 0


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        solve_linear(QQ, [[1, 0]], [1, 2])


def test_char_poly():
    assert char_poly(QQ, [[0, 1], [1, 0]]) == poly([-1, 0, 1])
    assert char_poly(QQ, [[0, 0], [1, 0]]) == poly([0, 0, 1])
    assert char_poly(QQ, [[2]]) == poly([-2, 1])


def test_determinant():
    assert determinant(QQ, [[1, 2], [3, 4]]) == Fraction(-2)
    z = K3.generator
    assert determinant(K3, [[z, 0], [0, z * z]]) == 1


def test_factor_over_gaussian_extension():
    # conductor 4: x^2 + 1 = (x - i)(x + i)
    i = K4.generator
    f = UniPoly(K4, [1, 0, 1])
    fac = factor_univariate(f)
    assert len(fac) == 2
    roots = {-g.coeffs[0] for g, _ in fac}
    assert roots == {i, -i}
