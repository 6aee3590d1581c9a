from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uplike import (
    Basis,
    FactoredSymbol,
    Mask,
    apply_subdivision,
    box3_mask,
    bspline_mask,
    contractivity,
    delta,
    difference_scheme,
    directional_difference,
    divided_difference_symbols,
    iterated_norm,
    operator_norm,
    product,
    smoothing_factor,
)
from uplike.errors import CapExceeded, DimensionMismatch, MissingFullFactor, NotContractiveWithin
from uplike.lattice import LatticeData, from_mapping, linear_combination
from uplike.masks import full_smoothing_factor, satisfies_eq5
from uplike.operators import coset_norms, iterated_symbol, single_factorization

from _strategies import bases, directions, dyadics, factored_symbols, lattice_data, masks

F = Fraction


def values(data):
    """{index: Fraction} of the nonzero samples."""
    out = {}
    for idx in data.nonzero_indices():
        idx = tuple(int(x) for x in idx)
        out[idx] = Fraction(data.value(idx))
    return out


def brute_subdivision(a, f):
    """Direct sum over pairs, independent of the strided implementation."""
    out = {}
    fv = values(f)
    for beta, fb in fv.items():
        for alpha, c in a.items():
            g = tuple(x + 2 * b for x, b in zip(alpha, beta))
            out[g] = out.get(g, 0) + c.as_fraction() * fb
    return {k: v for k, v in out.items() if v}


# -- apply_subdivision ------------------------------------------------------


def test_subdivision_examples():
    g = apply_subdivision(Mask({0: 1, 1: 1}), delta(1, exact=True))
    assert values(g) == {(0,): 1, (1,): 1}
    assert g.level == 1
    g = apply_subdivision(bspline_mask(1), delta(1, exact=True))
    assert values(g) == {(0,): F(1, 2), (1,): 1, (2,): F(1, 2)}


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        apply_subdivision(box3_mask(0), delta(1))


def test_cap_checked_before_allocation():
    with pytest.raises(CapExceeded):
        apply_subdivision(box3_mask(3), delta(2), cap=10)


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_subdivision_matches_brute_force(data):
    d = data.draw(st.sampled_from([1, 2]))
    a = data.draw(masks(dim=d))
    f = data.draw(lattice_data(d))
    assert values(apply_subdivision(a, f)) == brute_subdivision(a, f)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_float_and_exact_agree(data):
    d = data.draw(st.sampled_from([1, 2]))
    a = data.draw(masks(dim=d))
    f = data.draw(lattice_data(d))
    exact = apply_subdivision(a, f)
    flt = apply_subdivision(a, f.as_float())
    assert exact.origin == flt.origin
    np.testing.assert_allclose(exact.to_float(), flt.values, rtol=1e-12, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_linearity(data):
    d = data.draw(st.sampled_from([1, 2]))
    a = data.draw(masks(dim=d))
    f, g = data.draw(lattice_data(d)), data.draw(lattice_data(d))
    s, t = data.draw(dyadics()), data.draw(dyadics())
    lhs = apply_subdivision(a, linear_combination([(s, f), (t, g)]))
    rhs = linear_combination([(s, apply_subdivision(a, f)), (t, apply_subdivision(a, g))])
    assert lhs.same_values(rhs)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_mass_preservation(data):
    d = data.draw(st.sampled_from([1, 2]))
    a = bspline_mask(data.draw(st.integers(0, 5))) if d == 1 else box3_mask(data.draw(st.integers(0, 2)))
    f = data.draw(lattice_data(d))
    assert apply_subdivision(a, f).total() == 2**d * f.total()


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_positivity(data):
    d = data.draw(st.sampled_from([1, 2]))
    a = data.draw(masks(dim=d, nonnegative=True))
    f = data.draw(lattice_data(d, nonnegative=True))
    g = apply_subdivision(a, f)
    assert all(v >= 0 for v in values(g).values())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 6), st.lists(st.integers(1, 9), min_size=1, max_size=8))
def test_support_recursion(m, vals):
    u = len(vals) - 1
    f = from_mapping({i: v for i, v in enumerate(vals)}, 1, exact=True)
    g = apply_subdivision(bspline_mask(m), f)
    assert set(k[0] for k in values(g)) == set(range(2 * u + m + 2))


def test_float_reproducible():
    f = from_mapping({0: 0.3, 1: 0.7, 2: 0.1}, 1)
    a = bspline_mask(5)
    x = apply_subdivision(a, apply_subdivision(a, f)).values
    y = apply_subdivision(a, apply_subdivision(a, f)).values
    assert x.tobytes() == y.tobytes()


# -- norms ------------------------------------------------------------------


def test_operator_norm_examples():
    assert operator_norm(bspline_mask(1)) == 1
    assert operator_norm(box3_mask(0)) == 1
    assert operator_norm(Mask({0: F(1, 4), 1: F(1, 2), 2: F(1, 4)})) == F(1, 2)


def test_iterated_norm_examples():
    b = Mask({0: F(1, 4), 1: F(1, 2), 2: F(1, 4)})
    assert iterated_norm(b, 2) == F(1, 4)
    assert iterated_norm(b, 1) == operator_norm(b)
    with pytest.raises(ValueError):
        iterated_norm(b, 0)


def test_iterated_symbol_by_hand():
    # (1+z)^2 (1+z^2)^2 / 16
    b = Mask({0: F(1, 4), 1: F(1, 2), 2: F(1, 4)})
    expected = {0: 1, 1: 2, 2: 3, 3: 4, 4: 3, 5: 2, 6: 1}
    assert iterated_symbol(b, 2) == Mask({k: F(v, 16) for k, v in expected.items()})


def matrix_norm(a, n):
    """sup_gamma sum_beta |(S_a^n)(gamma, beta)| from explicit responses to deltas."""
    R = max(max(abs(x) for x in alpha) for alpha in a.support) + 2
    d = a.dim
    rows: dict = {}
    grid = np.ndindex(*(2 * R + 1,) * d)
    for off in grid:
        beta = tuple(o - R for o in off)
        f = from_mapping({beta: 1}, d, exact=True)
        for _ in range(n):
            f = apply_subdivision(a, f)
        for gamma, v in values(f).items():
            rows.setdefault(gamma, 0)
            rows[gamma] += abs(v)
    # rows depend on gamma mod 2^n only; use a full period near the origin
    period = np.ndindex(*(2**n,) * d)
    return max(rows.get(tuple(g), 0) for g in period)


@settings(max_examples=25, deadline=None)
@given(masks(dim=1, max_size=4, lo=-2, hi=2), st.integers(1, 3))
def test_iterated_norm_matches_matrix_oracle_1d(a, n):
    assert iterated_norm(a, n) == matrix_norm(a, n)


@settings(max_examples=10, deadline=None)
@given(masks(dim=2, max_size=3, lo=-1, hi=1), st.integers(1, 2))
def test_iterated_norm_matches_matrix_oracle_2d(a, n):
    assert iterated_norm(a, n) == matrix_norm(a, n)


@settings(max_examples=60, deadline=None)
@given(masks(), st.integers(1, 2), st.integers(1, 2))
def test_submultiplicative(a, m, n):
    assert iterated_norm(a, m + n) <= iterated_norm(a, m) * iterated_norm(a, n)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_eq5_positive_masks_have_unit_norms(data):
    d = data.draw(st.sampled_from([1, 2]))
    e = bspline_mask(data.draw(st.integers(0, 5))) if d == 1 else box3_mask(data.draw(st.integers(0, 2)))
    u = data.draw(directions(d))
    e = product(e, smoothing_factor(u, d))
    assert satisfies_eq5(e)
    for n in (1, 2, 3):
        assert iterated_norm(e, n) == 1


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_smoothing_factor_damping(data):
    d = data.draw(st.sampled_from([1, 2]))
    e = data.draw(masks(dim=d, nonnegative=True))
    u = data.draw(directions(d))
    assert operator_norm(product(e, smoothing_factor(u, d))) <= operator_norm(e)


def test_coset_norms():
    cn = coset_norms(Mask({0: F(1, 4), 1: F(-1, 2), 2: F(1, 4)}))
    assert cn == {(0,): F(1, 2), (1,): F(1, 2)}


# -- difference schemes and contractivity ------------------------------------


def test_difference_scheme_univariate_example():
    c = FactoredSymbol(Mask({0: 1, 1: 1}), [(1,)], [Basis(((1,),))])
    assert c.symbol() == bspline_mask(2)
    scheme = difference_scheme(c)
    assert scheme.diagonal_symbols == (Mask({0: F(1, 4), 1: F(1, 2), 2: F(1, 4)}),)
    assert divided_difference_symbols(c) == [bspline_mask(1)]


def test_difference_scheme_box3_example():
    s3 = smoothing_factor((1, 1), 2)
    c = FactoredSymbol(s3.scaled(4), (), [Basis.canonical(2)])
    assert c.symbol() == box3_mask(0)
    assert single_factorization(box3_mask(0), Basis.canonical(2)) == c
    b11, b22 = difference_scheme(c).diagonal_symbols
    # base / 2 = 2 s_(1,1)
    assert b11 == product(s3, smoothing_factor((0, 1), 2)).scaled(2)
    assert b22 == product(s3, smoothing_factor((1, 0), 2)).scaled(2)
    assert operator_norm(b11) == F(1, 2) and operator_norm(b22) == F(1, 2)


def test_missing_full_factor():
    with pytest.raises(MissingFullFactor):
        difference_scheme(FactoredSymbol(bspline_mask(0)))


def test_contractivity_examples():
    rep = contractivity(FactoredSymbol(Mask({0: 1, 1: 1}), (), [Basis(((1,),))]))
    assert rep.L == 1 and rep.rho == F(1, 2)
    assert rep.per_direction_norms == (F(1, 2),)
    with pytest.raises(NotContractiveWithin) as info:
        contractivity(FactoredSymbol(Mask({0: 2}), (), [Basis(((1,),))]), max_L=4)
    assert info.value.max_L == 4 and len(info.value.norms) == 4


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_class_one_symbols_are_contractive(data):
    """Positive base with unit sub-mask sums times one full factor: L = 1 and rho <= 1/2."""
    d = data.draw(st.sampled_from([1, 2]))
    base = bspline_mask(data.draw(st.integers(0, 4))) if d == 1 else box3_mask(data.draw(st.integers(0, 1)))
    D = data.draw(st.lists(directions(d), max_size=2))
    V = data.draw(bases(d))
    rep = contractivity(FactoredSymbol(base, D, [V]))
    assert rep.L == 1 and rep.rho <= F(1, 2)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_divided_difference_is_twice_diagonal(data):
    c = data.draw(factored_symbols(data.draw(st.sampled_from([1, 2]))))
    scheme = difference_scheme(c)
    assert divided_difference_symbols(c) == [b.scaled(2) for b in scheme.diagonal_symbols]


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_commutation_forward_differences_shift(data):
    d = data.draw(st.sampled_from([1, 2]))
    c = data.draw(factored_symbols(d))
    f = data.draw(lattice_data(d))
    V = c.full_factors[0]
    for v, b in zip(V.vectors, difference_scheme(c).diagonal_symbols):
        lhs = directional_difference(apply_subdivision(c.symbol(), f), v)
        rhs = apply_subdivision(b, directional_difference(f, v)).translate(v)
        assert lhs.same_values(rhs)


def test_factored_symbol_direction_order():
    a = FactoredSymbol(Mask.delta(2), [(1, 1), (1, 0)], [Basis.canonical(2)])
    b = FactoredSymbol(Mask.delta(2), [(1, 0), (1, 1)], [Basis.canonical(2)])
    assert a == b and a.j == 1


def test_directional_difference_stencils():
    f = from_mapping({0: 1, 1: 3}, 1, exact=True)
    fwd = directional_difference(f, (1,))
    assert values(fwd) == {(-1,): 1, (0,): 2, (1,): -3}
    bwd = directional_difference(f, (1,), backward=True)
    assert values(bwd) == {(0,): 1, (1,): 2, (2,): -3}
