import csv
import io
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uplike import (
    Mask,
    MaskSequence,
    box3_mask,
    bspline_mask,
    cascade,
    cauchy_gap,
    empirical_support,
    esupp,
    hausdorff_distance,
    phi_k,
    smoothness_probe,
    stationary_blf,
)
from uplike.errors import CapExceeded
from uplike.lattice import delta, from_mapping
from uplike.masks import product
from uplike.runner import scaled_difference_norms, sup_gap

F = Fraction


def samples(data):
    return {int(i[0]) if data.dim == 1 else tuple(int(x) for x in i): data.value(tuple(int(x) for x in i))
            for i in data.nonzero_indices()}


def test_cascade_examples():
    seq = MaskSequence.univariate_up(1)
    r = cascade(seq, 1, exact=True)
    assert samples(r.final) == {0: 1, 1: 1}
    # upsampled {1, 1} convolved with (1+z)^2/2
    r = cascade(seq, 2, exact=True)
    assert samples(r.final) == {0: F(1, 2), 1: 1, 2: 1, 3: 1, 4: F(1, 2)}
    assert len(r.levels) == 2 and r.levels[0].level == 1


def test_cascade_levels_follow_the_recursion():
    seq = MaskSequence.univariate_up(2)
    r = cascade(seq, 6, exact=True)
    from uplike import apply_subdivision

    f = delta(1, exact=True)
    for k, level in enumerate(r.levels):
        f = apply_subdivision(seq.mask(k), f)
        assert level.same_values(f)


def test_cascade_rejects_zero_levels():
    with pytest.raises(ValueError):
        cascade(MaskSequence.univariate_up(1), 0)


def test_cascade_cap():
    with pytest.raises(CapExceeded):
        cascade(MaskSequence.bivariate_up(1), 8, cap=10_000)


def test_physical_coordinates():
    r = cascade(MaskSequence.bivariate_up(1), 3)
    assert r.physical(2, (4, 2)) == (F(1, 2), F(1, 4))
    assert r.physical(0, 1) == (F(1, 2),)


def test_hat_function():
    K = 10
    r = stationary_blf(bspline_mask(1), K)
    f = r.final
    # S^K delta samples the hat at (alpha + 1) 2^-K
    assert f.value(2**K - 1) == 1.0
    assert abs(f.value(2**K) - 1.0) <= 2**-K
    xs = np.arange(-1, 2 ** (K + 1))
    ref = 1 - np.abs((xs + 1) / 2**K - 1)
    np.testing.assert_allclose([f.value(int(x)) for x in xs], ref, atol=1e-12)
    P = empirical_support(r)
    # last nonzero index is 2^(K+1) - 2
    assert hausdorff_distance(P, esupp(bspline_mask(1))) == 2.0 ** (1 - K)


def test_haar_cascade_ones():
    r = stationary_blf(bspline_mask(0), 3, exact=True)
    assert samples(r.final) == {i: 1 for i in range(8)}


def test_box3_stationary_support():
    r = stationary_blf(box3_mask(0), 5)
    P = empirical_support(r)
    H = esupp(box3_mask(0))
    assert H.contains(P)
    assert hausdorff_distance(P, H) <= 2 * 2**0.5 * 2**-5


def test_preset_identities():
    for r in (1, 2, 3):
        u, b = MaskSequence.univariate_up(r), MaskSequence.bivariate_up(r)
        for m in range(4):
            for j in range(r):
                assert u.mask(m * r + j) == bspline_mask(m)
                assert b.mask(m * r + j) == box3_mask(m)


@pytest.mark.parametrize("r", [1, 3])
def test_powers_preset(r):
    a = box3_mask(0)
    seq = MaskSequence.powers(a, r)
    for k in range(4):
        expected = a
        for _ in range(k):
            expected = product(expected, a)
        expected = expected.scaled(F(1, 4**k))
        for j in range(r):
            assert seq.mask(k * r + j) == expected
    assert seq.mask(3 * r) == box3_mask(3)


def test_explicit_sequence_repeats_last():
    seq = MaskSequence.explicit([bspline_mask(0), bspline_mask(2)])
    assert seq.mask(1) == seq.mask(50) == bspline_mask(2)
    with pytest.raises(ValueError):
        MaskSequence.explicit([])
    with pytest.raises(IndexError):
        seq.mask(-1)


def test_invalid_r():
    with pytest.raises(ValueError):
        MaskSequence.univariate_up(0)


def test_repeats():
    seq = MaskSequence.univariate_up(1)
    r = cascade(seq, 3, repeats=2)
    assert r.repeats == [2, 2, 2]
    assert r.final.level == 6
    with pytest.raises(ValueError):
        cascade(seq, 2, repeats=0)
    r = cascade(seq, 3, repeats=lambda k: k + 1)
    assert r.final.level == 6


@settings(max_examples=20, deadline=None)
@given(st.lists(st.integers(0, 9), min_size=1, max_size=6).filter(any), st.integers(1, 5))
def test_nonnegative_initial_data_stays_nonnegative(vals, K):
    f = from_mapping({i: v for i, v in enumerate(vals)}, 1, exact=True)
    r = cascade(MaskSequence.univariate_up(2), K, initial=f, exact=True)
    for level in r.levels:
        assert all(v >= 0 for v in samples(level).values())
    assert r.final.total() == 2**K * sum(vals)


# -- phi_k and gaps -----------------------------------------------------------


def test_phi_k_structure():
    seq = MaskSequence.univariate_up(1)
    p = phi_k(seq, 2, 3, exact=True)
    assert p.samples.level == 5
    r = cascade(MaskSequence.explicit([seq.mask(0), seq.mask(1), seq.mask(2)]), 5, exact=True)
    assert p.samples.same_values(r.final)
    with pytest.raises(ValueError):
        phi_k(seq, 5, 0)
    with pytest.raises(ValueError):
        phi_k(seq, -1, 2)


def test_phi_0_is_characteristic_function():
    p = phi_k(MaskSequence.univariate_up(1), 0, 6, exact=True)
    assert samples(p.samples) == {i: 1 for i in range(64)}


def test_gap_zero_cases():
    seq = MaskSequence.univariate_up(1)
    assert cauchy_gap(seq, 3, 0, inner=4) == 0.0
    stat = MaskSequence.constant(bspline_mask(2))
    for k in range(1, 4):
        assert cauchy_gap(stat, k, 1, levels=10) <= 1e-14
        # different final levels: only the O(2^-level) sampling offset remains
        assert cauchy_gap(stat, k, 2, inner=6) <= 2.0 ** -(k + 4)


def test_gap_grid_validation():
    seq = MaskSequence.univariate_up(1)
    with pytest.raises(ValueError, match="incompatible"):
        cauchy_gap(seq, 3, 1)
    with pytest.raises(ValueError, match="incompatible"):
        cauchy_gap(seq, 5, 2, levels=7)
    with pytest.raises(ValueError):
        cauchy_gap(seq, 1, 1, inner=3, levels=8)


def test_gap_ladder_shrinks():
    seq = MaskSequence.univariate_up(1)
    g = [cauchy_gap(seq, k, 1, levels=14) for k in range(1, 5)]
    assert all(b < a for a, b in zip(g, g[1:]))
    # same answer from exact data
    ge = cauchy_gap(seq, 2, 1, levels=12, exact=True)
    assert ge == pytest.approx(cauchy_gap(seq, 2, 1, levels=12), abs=1e-12)


def test_sup_gap_uses_common_points():
    f = from_mapping({0: 1.0, 1: 5.0, 2: 1.0}, 1, level=1)
    g = from_mapping({0: 1.0, 1: 2.0}, 1, level=0)
    # common points are x = 0 and x = 1 (f indices 0 and 2)
    assert sup_gap(f, g) == 1.0


# -- smoothness probe ------------------------------------------------------------


def test_probe_zero_data():
    seq = MaskSequence.univariate_up(1)
    zero = from_mapping({0: 0}, 1, exact=True)
    r = cascade(seq, 4, initial=zero, exact=True)
    assert smoothness_probe(r, 2) == [0.0, 0.0, 0.0]


def test_probe_needs_two_levels():
    r = cascade(MaskSequence.univariate_up(1), 1)
    with pytest.raises(ValueError, match="insufficient"):
        smoothness_probe(r, 1)
    with pytest.raises(ValueError):
        scaled_difference_norms(r, 0)


def test_probe_hat_orders():
    r = stationary_blf(bspline_mask(1), 12, exact=True)
    # first differences of a Lipschitz function: unscaled norms halve
    assert smoothness_probe(r, 1)[-1] == pytest.approx(0.5)
    # second differences see the kinks: ratio 1
    assert smoothness_probe(r, 2)[-1] == pytest.approx(1.0)
    # third differences of a kinked function blow up
    assert smoothness_probe(r, 3)[-1] == pytest.approx(2.0)


def test_probe_custom_scaling():
    r = stationary_blf(bspline_mask(1), 10, exact=True)
    assert smoothness_probe(r, 2, scale_power=2)[-1] == pytest.approx(2.0)


def test_csv_export():
    r = cascade(MaskSequence.univariate_up(1), 2)
    text = r.to_csv()
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["level", "x_1", "value"]
    assert rows[1] == ["2", "0", "0.5"]
    assert len(rows) == 6
    allrows = list(csv.reader(io.StringIO(r.to_csv(which="all"))))
    assert len(allrows) == 1 + 2 + 5
    buf = io.StringIO()
    r.to_csv(buf)
    assert buf.getvalue() == text


def test_csv_bivariate_header_and_precision():
    r = cascade(MaskSequence.bivariate_up(1), 2)
    rows = list(csv.reader(io.StringIO(r.to_csv())))
    assert rows[0] == ["level", "x_1", "x_2", "value"]
    for row in rows[1:]:
        assert float(row[3]) > 0
