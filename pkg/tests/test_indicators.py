import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from doess import indicators as ind
from doess import sequences as sq
from doess.spin import SX, SY

from oracles import indicators as oracle


def test_matches_oracle_on_random_words():
    # the acceptance suite repeats this on 1000 words
    rng = np.random.default_rng(2024)
    codes = sq.random_codes(rng, 24, size=200)
    got = ind.indicator_matrix(codes)
    for w, g in zip(codes, got):
        assert np.abs(g - oracle(w)).max() < 1e-6


@pytest.mark.parametrize("form", ["ising_zz", "heisenberg"])
@pytest.mark.parametrize("null_slot", ["pi_slot", "interval_only"])
def test_matches_oracle_other_forms(form, null_slot):
    rng = np.random.default_rng(7)
    codes = sq.random_codes(rng, 12, size=40)
    codes[::3, ::2] = 0
    got = ind.indicator_matrix(codes, null_slot, form)
    for w, g in zip(codes, got):
        ref = oracle(w, null_slot, form)
        assert np.abs(np.nan_to_num(g) - np.nan_to_num(ref)).max() < 1e-6


def test_xy8_and_xy16_known_values():
    # frozen from the oracle above
    for name in ("xy8", "xy16"):
        v = ind.indicator_vector(sq.baseline(name))
        assert np.allclose(v, [0.0, 0.0, 1.0, 0.25, 0.0], atol=1e-10)
        assert np.allclose(v, oracle(sq.baseline(name).codes), atol=1e-10)


def test_reference_word_cancels_disorder_and_interactions():
    v = ind.indicator_vector(sq.baseline("droid_r2d2"))
    assert v[0] < 1e-10 and v[2] < 1e-10 and v[4] < 1e-10
    # finite-width residuals, frozen from the oracle
    assert np.allclose(v[[1, 3]], oracle(sq.baseline("droid_r2d2").codes)[[1, 3]], atol=1e-10)
    assert np.allclose(v[[1, 3]], [0.0562697698, 0.0578902215], atol=1e-9)


def test_all_null_word():
    v = ind.indicator_vector(sq.PulseSequence((0,) * 24))
    assert np.allclose(v, [1.0, 1.0, 1.0, 1.0, 0.0])


def test_opposite_pulse_pair_has_no_over_rotation_term():
    assert ind.indicator_5_pulse_error(sq.PulseSequence((1, 2))) == pytest.approx(0.0, abs=1e-12)
    assert ind.indicator_5_pulse_error(sq.PulseSequence((1, 1))) == pytest.approx(1.0)


def test_toggling_frame_sign_convention():
    # after +X pi/2 the disorder operator Z appears as +Y in the toggling frame
    frames = ind.toggling_frames((5,))
    assert np.allclose(frames[1], SY)
    frames = ind.toggling_frames((7,))
    assert np.allclose(frames[1], -SX)


def test_named_entry_points_agree_with_vector():
    s = sq.PulseSequence((1, 5, 0, 12, 7, 3))
    v = ind.indicator_vector(s)
    named = [ind.indicator_1_disorder_free(s), ind.indicator_2_disorder_pulse(s),
             ind.indicator_3_interaction_free(s), ind.indicator_4_interaction_pulse(s),
             ind.indicator_5_pulse_error(s)]
    assert np.allclose(v, named)


def test_series_equals_indicators_of_repetitions():
    rng = np.random.default_rng(5)
    codes = sq.random_codes(rng, 10, size=20)
    series = ind.series_batch(codes, R=6)
    for w, s in zip(codes, series):
        for r in range(1, 7):
            assert np.allclose(s[:, r - 1], ind.indicator_vector(tuple(w) * r), atol=1e-10)


def test_series_is_flat_for_identity_net_words():
    s = ind.indicator_series(sq.baseline("droid_r2d2"), R=8)
    assert np.allclose(s, s[:, :1], atol=1e-12)


def test_series_rejects_zero_repetitions():
    with pytest.raises(ValueError):
        ind.indicator_series(sq.baseline("xy8"), R=0)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(0, 12), min_size=1, max_size=30))
def test_indicator_ranges(codes):
    v = ind.indicator_vector(codes)
    assert np.all(np.isfinite(v))
    assert np.all(v >= -1e-12)
    assert np.all(v[[0, 1, 4]] <= 1 + 1e-12)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 12), min_size=1, max_size=20), st.sampled_from([1, 2, 3, 4]))
def test_global_axis_relabelling_invariance(codes, shift):
    # relabelling +X -> +Y -> -X -> -Y is a global Z rotation, which leaves all norms unchanged
    perm = {1: 3, 3: 2, 2: 4, 4: 1}
    def relabel(c):
        if c == 0:
            return 0
        block, axis = divmod(c - 1, 4)
        return 4 * block + perm[axis + 1]
    mapped = list(codes)
    for _ in range(shift):
        mapped = [relabel(c) for c in mapped]
    assert np.allclose(ind.indicator_vector(codes), ind.indicator_vector(mapped), atol=1e-10)
