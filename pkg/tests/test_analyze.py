import json

import numpy as np
import pytest

from decorr.analyze import (Peak, calibrate_floor, compare, detect_peaks, empirical_match_prob,
                            expected_floor, peak_to_background, smoothed_floor)
from decorr.errors import DimensionMismatch, DivisionByZeroBackground, EmptySignal
from decorr.seqcore import NormalizedSequence, Sequence, decompose
from decorr.smooth import rect_kernel, smoothed_coincidence
from decorr.synth import gen_planted, gen_uniform, random_planted_spec
from decorr.xcorr import CoincidenceSignal, coincidence


def chan(codes, M):
    return decompose(NormalizedSequence(codes, M))


def test_floor_quarter_of_length():
    model = expected_floor(512, 512, 4)
    mean, std = model.at(0)
    assert mean == 128
    assert std == pytest.approx(np.sqrt(512 * 0.25 * 0.75))


def test_floor_single_symbol():
    model = expected_floor(10, 7, 1)
    assert model.at(0) == (7.0, 0.0)


def test_floor_partial_overlap():
    assert expected_floor(100, 100, 4).at(60)[0] == 10


def test_floor_partial_overlap_monte_carlo():
    cal = calibrate_floor(100, 4, 10_000, seed=7)
    i = 60 + 99
    assert abs(cal.mean[i] - 10) <= 3 * cal.standard_error[i]


def test_floor_invariants():
    for Ns, Nq, M in [(5, 9, 3), (64, 64, 4), (1, 1, 2)]:
        model = expected_floor(Ns, Nq, M)
        assert np.all(model.mean >= 0) and np.all(model.std >= 0)
    assert expected_floor(30, 30, 5).at(0)[0] == 30 / 5


def test_smoothed_floor_monte_carlo():
    # propagated mean/std of channel-smoothed counts against simulation
    N, M, trials, w = 64, 4, 3000, 4.5
    model = smoothed_floor(expected_floor(N, N, M), rect_kernel(w))
    rng = np.random.default_rng(3)
    acc = np.zeros(2 * N - 1)
    acc2 = np.zeros(2 * N - 1)
    for _ in range(trials):
        S = smoothed_coincidence(chan(rng.integers(1, M + 1, N), M),
                                 chan(rng.integers(1, M + 1, N), M), w).values
        acc += S
        acc2 += S * S
    mean = acc / trials
    std = np.sqrt(acc2 / trials - mean ** 2)
    for p in (0, 20, -40):
        i = p + N - 1
        assert abs(mean[i] - model.mean[i]) <= 3.5 * model.std[i] / np.sqrt(trials)
        assert std[i] == pytest.approx(model.std[i], rel=0.06)


def test_self_comparison_peak():
    for N in (32, 100, 512):
        codes = gen_uniform(N, 4, N).values
        E = coincidence(chan(codes, 4), chan(codes, 4))
        peaks = detect_peaks(E, expected_floor(N, N, 4))
        assert peaks[0].displacement == 0 and peaks[0].height == N
        assert peaks[0].z > 5


def _signal(values):
    values = np.asarray(values)
    n = (values.size + 1) // 2
    return CoincidenceSignal(values, n - 1, n, n, 2)


def _flat_model(n, mean=0.0, std=0.0):
    size = 2 * n - 1
    return type(expected_floor(n, n, 2))(np.full(size, mean), np.full(size, std), 2, n, n, 0.5)


def test_plateau_reports_all_tied_maxima():
    E = _signal([0, 5, 5, 0, 3, 0, 1])
    peaks = detect_peaks(E, _flat_model(4), z_min=0, min_excess=1)
    assert [(p.displacement, p.height) for p in peaks] == [(-2, 5), (-1, 5), (1, 3), (3, 1)]


def test_wide_plateau_and_edges():
    E = _signal([3, 0, 5, 5, 5, 0, 0, 0, 2])
    peaks = detect_peaks(E, _flat_model(5), z_min=0, min_excess=1)
    assert [p.displacement for p in peaks] == [-2, -1, 0, -4, 4]


def test_flat_signal_has_no_peak():
    E = _signal([2, 2, 2, 2, 2])
    assert detect_peaks(E, _flat_model(3), z_min=0) == []


def test_thresholds():
    E = _signal([0, 4, 0, 9, 0])
    model = _flat_model(3, mean=2.0, std=1.0)
    assert [p.displacement for p in detect_peaks(E, model, z_min=5)] == [1]
    assert [p.displacement for p in detect_peaks(E, model, z_min=1)] == [1, -1]
    assert detect_peaks(E, model, z_min=0, min_excess=8) == []
    top = detect_peaks(E, model, z_min=5)[0]
    assert top == Peak(1, 9, 7.0, 7.0)


def test_zero_std_floor():
    E = _signal([0, 3, 0])
    peaks = detect_peaks(E, _flat_model(2, mean=1.0, std=0.0))
    assert peaks[0].z == np.inf


def test_dimension_mismatch():
    E = _signal([1, 2, 1])
    with pytest.raises(DimensionMismatch):
        detect_peaks(E, expected_floor(3, 3, 2))


def test_detect_peaks_deterministic(rng):
    codes = rng.integers(1, 5, 300)
    E = coincidence(chan(codes, 4), chan(np.roll(codes, 7), 4))
    model = expected_floor(300, 300, 4)
    assert detect_peaks(E, model, 3) == detect_peaks(E, model, 3)


def test_uniform_pairs_rarely_produce_peaks():
    N, M, clean = 512, 4, 0
    model = expected_floor(N, N, M)
    for seed in range(100):
        E = coincidence(chan(gen_uniform(N, M, [seed, 1]).values, M),
                        chan(gen_uniform(N, M, [seed, 2]).values, M))
        central = [p for p in detect_peaks(E, model) if abs(p.displacement) < 0.8 * N]
        clean += not central
    assert clean >= 95


def test_planted_block_detected():
    s, q, truth = gen_planted(random_planted_spec(512, 4, 130, 4, seed=11))
    report = compare(s, q)
    d = next(d for d, n in truth if n == 130)
    hit = [p for p in report.peaks if p.displacement == d]
    assert hit and hit[0].height >= 130


def test_peak_to_background():
    assert peak_to_background(np.full(9, 3.0)) == 1.0
    assert peak_to_background(_signal([1, 1, 4, 1, 1])) == pytest.approx(4 / 2)
    with pytest.raises(DivisionByZeroBackground):
        peak_to_background([7, 0, 0, 0, 0, 0, 0, 0])
    with pytest.raises(EmptySignal):
        peak_to_background([])


def test_empirical_match_prob():
    assert empirical_match_prob([1, 1, 2, 2], [1, 2, 2, 2], 2) == pytest.approx(0.5)
    assert empirical_match_prob([1, 1], [2, 2], 2) == 0


def test_compare_report():
    s, q, truth = gen_planted(random_planted_spec(512, 4, 130, 5, seed=2))
    report = compare(s, q, baseline=True)
    assert report.Ns == 512 and report.Nq == q.length and report.M == 4
    assert report.ratios["coincidence"] > report.ratios["numeric"]
    assert report.timing_ms > 0
    doc = report.to_dict()
    assert "timing_ms" not in doc
    assert "timing_ms" in report.to_dict(include_timing=True)
    assert json.dumps(doc, sort_keys=True) == json.dumps(compare(s, q, baseline=True).to_dict(),
                                                         sort_keys=True)


@pytest.mark.parametrize("mode", ["channels", "codes"])
def test_compare_smoothed(mode):
    s, q, truth = gen_planted(random_planted_spec(512, 4, 130, 4, seed=5))
    report = compare(s, q, w=4.5, smooth_mode=mode)
    assert report.smoothed is not None and report.smoothed.smoothed
    assert report.smoothed_noise is not None
    assert "smoothed" in report.ratios
    d = next(d for d, n in truth if n == 130)
    assert any(p.displacement == d for p in report.peaks)


def test_compare_accepts_plain_lists():
    report = compare([1, 2, 3, 1], [1, 2, 3, 1])
    assert report.signal.at(0) == 4
