from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exactsamp.core import Update, builtin_measures, huber_measure, lp_measure, tukey_measure
from exactsamp import oracle
from exactsamp.oracle import (
    BranchBudgetExceeded,
    enumerate_single_repetition,
    gof_test,
    target_distribution,
)
from exactsamp.exactrand import np_substream


def ups(coords):
    return [Update(c) for c in coords]


def test_frozen_gsampler_example():
    law = oracle.gsampler_law(ups([1, 1, 2]), lp_measure(2), zeta=3)
    assert law.probs == {1: Fraction(4, 9), 2: Fraction(1, 9)}
    assert law.mass_fail == Fraction(4, 9)
    assert law.conditional() == {1: Fraction(4, 5), 2: Fraction(1, 5)}


def test_empty_stream_bottom():
    law = oracle.gsampler_law([], lp_measure(1), zeta=1)
    assert law.mass_bottom == 1


def test_target_distribution_examples():
    t = target_distribution({1: 2, 2: 1}, lp_measure(2))
    assert t.probs == {1: Fraction(4, 5), 2: Fraction(1, 5)}
    t = target_distribution({1: 1, 2: 1, 3: 1}, huber_measure(2))
    assert all(v == Fraction(1, 3) for v in t.probs.values())
    t = target_distribution({1: 1, 2: 2}, tukey_measure(2))
    assert t.probs == {1: Fraction(37, 101), 2: Fraction(64, 101)}


def test_target_zero_freqs_dropped():
    t = target_distribution({1: 2, 2: 0}, lp_measure(1))
    assert set(t.probs) == {1}


def test_symbolic_coefficients_telescope():
    coords = [1, 2, 1, 1, 3, 2]
    freqs = {1: 3, 2: 2, 3: 1}
    coeffs = oracle.gsampler_coefficients(ups(coords))
    assert coeffs == {i: {f: Fraction(1)} for i, f in freqs.items()}


def test_mutant_coefficients_differ():
    coords = [1, 1, 2]
    good = oracle.gsampler_coefficients(ups(coords))
    bad = oracle.gsampler_coefficients(ups(coords), inclusive=True)
    assert good != bad
    # The mutant law telescopes to G(f_i + 1) - G(1) instead of G(f_i).
    assert bad[1] == {3: Fraction(1), 1: Fraction(-1)}


@given(st.lists(st.integers(1, 3), min_size=1, max_size=9))
@settings(max_examples=80)
def test_symbolic_telescoping_any_stream(coords):
    freqs = {}
    for c in coords:
        freqs[c] = freqs.get(c, 0) + 1
    assert oracle.gsampler_coefficients(ups(coords)) == \
        {i: {f: Fraction(1)} for i, f in freqs.items()}


def test_matrix_law_l1_rows():
    from exactsamp.matrixsampler import L1RowMeasure
    stream = [Update(1, col=1), Update(1, col=2), Update(2, col=1), Update(2, col=1)]
    law = oracle.matrix_law(stream, L1RowMeasure())
    assert law.conditional() == {1: Fraction(1, 2), 2: Fraction(1, 2)}


def test_matrix_coefficients_telescope():
    stream = [Update(1, col=1), Update(1, col=2), Update(2, col=1)]
    coeffs = oracle.matrix_coefficients(stream, d=2)
    assert coeffs == {1: {(1, 1): Fraction(1)}, 2: {(1, 0): Fraction(1)}}


def test_sw_law_matches_window_target():
    coords = [1, 1, 2, 3, 3]
    W = 3
    law = oracle.sw_gsampler_law(ups(coords), W, lp_measure(1), zeta=1)
    target = target_distribution({2: 1, 3: 2}, lp_measure(1))
    assert law.conditional() == target.probs


def test_sw_lp_frozen_example():
    # active f=(2,1) in a window of 3, F=3: per-repetition masses 4/18, 1/18.
    coords = [1, 1, 2]
    law = oracle.sw_lp_law(ups(coords), W=3, p=2, F=3)
    assert law.probs == {1: Fraction(4, 18), 2: Fraction(1, 18)}
    assert law.conditional() == {1: Fraction(4, 5), 2: Fraction(1, 5)}


def test_pair_law_example():
    law = oracle.pair_l2_law({1: 2, 2: 2}, 4)
    assert law.probs == {1: Fraction(1, 4), 2: Fraction(1, 4)}
    assert law.conditional() == {1: Fraction(1, 2), 2: Fraction(1, 2)}


def test_block_law_total_mass():
    freqs = {1: 3, 2: 2, 3: 1}
    W, p = 6, 3
    law = oracle.block_lp_law(freqs, W, p)
    for i, f in freqs.items():
        assert law.probs[i] == Fraction(f ** p, W ** p)


def test_multipass_l1_law():
    freqs = {1: 1, 2: 2, 3: 3, 4: 4}
    law = oracle.multipass_law(freqs, 4, Fraction(1, 2), p=1)
    assert law.probs == {i: Fraction(f, 10) for i, f in freqs.items()}


def test_multipass_lp_law_conditional():
    law = oracle.multipass_law({1: 2, 2: 1}, 4, Fraction(1, 2), p=2)
    assert law.conditional() == {1: Fraction(4, 5), 2: Fraction(1, 5)}


def test_dispatch():
    spec = {"kind": "gsampler", "measure": lp_measure(1), "zeta": 1}
    law = enumerate_single_repetition(ups([1, 2]), spec)
    assert law.conditional() == {1: Fraction(1, 2), 2: Fraction(1, 2)}
    with pytest.raises(ValueError):
        enumerate_single_repetition([], {"kind": "nope"})


def test_branch_budget():
    with pytest.raises(BranchBudgetExceeded):
        oracle.pair_l2_law({i: 2 for i in range(1, 10)}, 18)


def test_gof_calibration():
    # Histograms drawn from the target itself should pass most of the time.
    rng = np_substream(0, "gof")
    target = {1: 0.5, 2: 0.3, 3: 0.2}
    passes = 0
    for _ in range(40):
        draw = rng.multinomial(20000, [0.5, 0.3, 0.2])
        hist = {k + 1: int(v) for k, v in enumerate(draw)}
        if gof_test(hist, target).pvalue > 0.01:
            passes += 1
    assert passes >= 37


def test_gof_power():
    rng = np_substream(0, "gofp")
    draw = rng.multinomial(10 ** 6, [0.4, 0.4, 0.2])
    hist = {k + 1: int(v) for k, v in enumerate(draw)}
    rep = gof_test(hist, {1: 0.5, 2: 0.3, 3: 0.2})
    assert rep.pvalue < 1e-6
    assert rep.tv > 0.05


def test_gof_zero_prob_cell():
    rep = gof_test({1: 100, 2: 5}, {1: 1.0})
    assert rep.pvalue == 0.0


def test_gof_rejects_empty():
    with pytest.raises(ValueError):
        gof_test({}, {1: 1.0})


def test_gof_tv_identity():
    rep = gof_test({1: 500, 2: 500}, {1: 0.5, 2: 0.5})
    assert rep.tv == 0.0
