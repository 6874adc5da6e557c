import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from decorr import xcorr
from decorr.errors import (AlphabetMismatch, EmptyInput, FftSizeOverflow, InputError,
                           RoundingResidualExceeded)
from decorr.seqcore import NormalizedSequence, Sequence, decompose, normalize
from decorr.xcorr import (coincidence, correlate_channel_fft, correlate_channel_naive,
                          correlate_real, numeric_xcorr, overlap)

from conftest import WORKED_B1, WORKED_C1, brute_matches, brute_products

CORRELATORS = [correlate_channel_naive, correlate_channel_fft]


def channels(codes, M):
    return decompose(NormalizedSequence(codes, M))


@pytest.mark.parametrize("fn", CORRELATORS)
def test_worked_example(fn, backend_name):
    k = fn(WORKED_B1, WORKED_C1, backend=backend_name)
    assert k.at(3) == 6
    assert k.values.size == 49 and k.offset == 24


@pytest.mark.parametrize("fn", CORRELATORS)
def test_self_correlation_peak(fn):
    assert fn([1, 1, 1], [1, 1, 1]).at(0) == 3


@pytest.mark.parametrize("fn", CORRELATORS)
def test_small_derived_example(fn):
    k = fn([1, 0, 1], [0, 1, 0])
    assert k.values.tolist() == brute_products([1, 0, 1], [0, 1, 0]) == [0, 1, 0, 1, 0]
    assert k.displacements.tolist() == [-2, -1, 0, 1, 2]


@pytest.mark.parametrize("fn", CORRELATORS)
def test_zero_channel_annihilates(fn, rng):
    c = rng.integers(0, 2, 37)
    assert not fn(np.zeros(20, dtype=int), c).values.any()


@pytest.mark.parametrize("fn", CORRELATORS)
def test_input_validation(fn):
    with pytest.raises(EmptyInput):
        fn([], [1])
    with pytest.raises(InputError):
        fn([0, 2], [1])


def test_fft_matches_naive_random(rng, backend_name):
    for _ in range(200):
        b = rng.integers(0, 2, int(rng.integers(1, 257)))
        c = rng.integers(0, 2, int(rng.integers(1, 257)))
        naive = correlate_channel_naive(b, c, backend=backend_name)
        fast = correlate_channel_fft(b, c, backend=backend_name)
        assert np.array_equal(naive.values, fast.values)
        assert naive.offset == fast.offset


def test_unequal_lengths_range():
    k = correlate_channel_naive([1, 1], [1, 1, 1, 1])
    assert k.displacements.tolist() == [-1, 0, 1, 2, 3]
    assert k.values.tolist() == [1, 2, 2, 2, 1]


def test_overlap():
    assert overlap(3, 3).tolist() == [1, 2, 3, 2, 1]
    assert overlap(2, 4).tolist() == [1, 2, 2, 2, 1]


def test_fft_size():
    assert xcorr.fft_size(1) == 1
    assert xcorr.fft_size(49) == 64
    assert xcorr.fft_size(64) == 64
    with pytest.raises(FftSizeOverflow):
        xcorr.fft_size(xcorr.MAX_FFT_SIZE + 1)


def test_fft_size_cap_enforced(monkeypatch):
    monkeypatch.setattr(xcorr, "MAX_FFT_SIZE", 32)
    with pytest.raises(FftSizeOverflow):
        correlate_channel_fft(np.ones(20, dtype=int), np.ones(20, dtype=int))


def test_rounding_guard():
    assert xcorr.round_counts(np.array([1.1, 2.9, -0.2])).tolist() == [1, 3, 0]
    with pytest.raises(RoundingResidualExceeded):
        xcorr.round_counts(np.array([1.0, 2.3]))


def test_rounding_guard_triggers_in_pipeline(monkeypatch):
    real = xcorr._fft_correlate_raw

    def noisy(*args, **kwargs):
        return real(*args, **kwargs) + 0.4

    monkeypatch.setattr(xcorr, "_fft_correlate_raw", noisy)
    with pytest.raises(RoundingResidualExceeded):
        coincidence(channels([1, 2], 2), channels([2, 1], 2), "fft")


@pytest.mark.parametrize("engine", xcorr.ENGINES)
def test_identity_comparison(engine, rng):
    codes = rng.integers(1, 5, 50)
    E = coincidence(channels(codes, 4), channels(codes, 4), engine)
    assert E.at(0) == 50


@pytest.mark.parametrize("engine", xcorr.ENGINES)
def test_small_coincidence_example(engine):
    E = coincidence(channels([1, 2, 3], 3), channels([3, 1, 2], 3), engine)
    assert E.values.tolist() == brute_matches([1, 2, 3], [3, 1, 2]).tolist() == [1, 0, 0, 2, 0]
    assert E.displacements.tolist() == [-2, -1, 0, 1, 2]
    assert E.values.dtype == np.int64


def test_alphabet_mismatch():
    with pytest.raises(AlphabetMismatch):
        coincidence(channels([1, 2], 2), channels([1, 2], 3))


def test_unknown_engine():
    with pytest.raises(InputError):
        coincidence(channels([1], 1), channels([1], 1), "gpu")


def test_uniform_floor_near_quarter(rng):
    total = 0
    for _ in range(20):
        E = coincidence(channels(rng.integers(1, 5, 512), 4), channels(rng.integers(1, 5, 512), 4))
        total += E.at(0)
    # 20 pairs: mean of E_0 has standard error sqrt(96/20) ~ 2.2
    assert abs(total / 20 - 128) < 4 * np.sqrt(96 / 20)


@pytest.mark.parametrize("engine", xcorr.ENGINES)
def test_threads_do_not_change_output(engine, rng):
    s = channels(rng.integers(1, 7, 300), 6)
    q = channels(rng.integers(1, 7, 211), 6)
    one = coincidence(s, q, engine, threads=1)
    many = coincidence(s, q, engine, threads=4)
    assert np.array_equal(one.values, many.values)


def test_numeric_xcorr_scalar():
    s = NormalizedSequence([1], 1)
    for engine in xcorr.ENGINES:
        assert numeric_xcorr(s, s, engine).tolist() == [1.0]


@pytest.mark.parametrize("engine", xcorr.ENGINES)
def test_numeric_xcorr_small(engine):
    s, q = NormalizedSequence([1, 2], 2), NormalizedSequence([2, 1], 2)
    # sum_i s[i] q[i+p] over p = -1, 0, 1
    assert numeric_xcorr(s, q, engine).tolist() == brute_products([1, 2], [2, 1]) == [4, 4, 1]


def test_correlate_real_engines_agree(rng):
    a, b = rng.normal(size=30), rng.normal(size=45)
    assert np.allclose(correlate_real(a, b, "fft"), correlate_real(a, b, "naive"), atol=1e-10)
    assert np.allclose(correlate_real(a, b, "naive"), brute_products(a, b), atol=1e-10)


# -- properties ---------------------------------------------------------------

pair_st = st.integers(1, 8).flatmap(lambda M: st.tuples(
    st.just(M),
    st.lists(st.integers(1, M), min_size=1, max_size=80),
    st.lists(st.integers(1, M), min_size=1, max_size=80)))


@settings(max_examples=150, deadline=None)
@given(pair_st)
def test_engines_match_brute_force(data):
    M, s, q = data
    expected = brute_matches(s, q)
    for engine in xcorr.ENGINES:
        assert np.array_equal(coincidence(channels(s, M), channels(q, M), engine).values, expected)


@settings(max_examples=150, deadline=None)
@given(pair_st)
def test_conservation_bounds_symmetry(data):
    M, s, q = data
    E = coincidence(channels(s, M), channels(q, M))
    ns = np.bincount(s, minlength=M + 1)
    nq = np.bincount(q, minlength=M + 1)
    assert E.values.sum() == int(np.dot(ns, nq))
    assert np.all(E.values >= 0) and np.all(E.values <= overlap(len(s), len(q)))
    R = coincidence(channels(q, M), channels(s, M))
    assert np.array_equal(E.values, R.values[::-1])


@settings(max_examples=100, deadline=None)
@given(pair_st, st.randoms(use_true_random=False))
def test_relabeling_invariance(data, rnd):
    M, s, q = data
    perm = list(range(1, M + 1))
    rnd.shuffle(perm)
    E = coincidence(channels(s, M), channels(q, M))
    P = coincidence(channels([perm[c - 1] for c in s], M), channels([perm[c - 1] for c in q], M))
    assert np.array_equal(E.values, P.values)


@settings(max_examples=100, deadline=None)
@given(pair_st, st.integers(1, 30), st.data())
def test_shared_suffix_adds_to_E0(data, t, draw):
    M, s, q = data
    n = min(len(s), len(q))
    s, q = s[:n], q[:n]
    suffix = draw.draw(st.lists(st.integers(1, M), min_size=t, max_size=t))
    before = coincidence(channels(s, M), channels(q, M)).at(0)
    after = coincidence(channels(s + suffix, M), channels(q + suffix, M)).at(0)
    assert after == before + t


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=1, max_size=50),
       st.lists(st.integers(-20, 20), min_size=1, max_size=50),
       st.integers(2, 50))
def test_scaling_raw_inputs_is_invisible(a, b, k):
    s1, q1 = normalize(Sequence(a), Sequence(b))
    s2, q2 = normalize(Sequence(np.array(a) * k), Sequence(np.array(b) * k))
    E1 = coincidence(decompose(s1), decompose(q1))
    E2 = coincidence(decompose(s2), decompose(q2))
    assert np.array_equal(E1.values, E2.values)
