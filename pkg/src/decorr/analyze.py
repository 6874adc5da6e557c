"""Noise floor, peak detection and comparison reports."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, DivisionByZeroBackground, EmptySignal, InputError
from .seqcore import AlphabetSpec, NormalizedSequence, Sequence, decompose, normalize
from .smooth import kernel_autocorrelation, rect_kernel, smooth_codes, smoothed_coincidence
from .synth import gen_uniform
from .xcorr import CoincidenceSignal, coincidence, numeric_xcorr, overlap

CONVENTION = "E[p] = #{i : s[i] == q[i + p]}, p = -(Ns-1) .. Nq-1"


@dataclass(frozen=True)
class NoiseModel:
    """Expected coincidence count and its spread at every displacement.

    Under the uniform-random model each compared pair matches independently
    with probability ``match_prob`` (``1/M``), so the count at displacement
    ``p`` is binomial over ``overlap(p)`` trials.
    """

    mean: np.ndarray
    std: np.ndarray
    M: int
    Ns: int
    Nq: int
    match_prob: float

    @property
    def offset(self) -> int:
        return self.Ns - 1

    def at(self, p: int) -> tuple[float, float]:
        return float(self.mean[p + self.offset]), float(self.std[p + self.offset])


def expected_floor(Ns: int, Nq: int, M: int, match_prob: Optional[float] = None) -> NoiseModel:
    """Binomial floor ``mean = overlap * pi``, ``std = sqrt(overlap * pi * (1 - pi))``
    with ``pi = 1/M`` unless given."""
    if M < 1:
        raise InputError("M must be >= 1")
    pi = 1.0 / M if match_prob is None else float(match_prob)
    n = overlap(Ns, Nq).astype(np.float64)
    return NoiseModel(n * pi, np.sqrt(n * pi * (1.0 - pi)), M, Ns, Nq, pi)


def smoothed_floor(model: NoiseModel, kernel) -> NoiseModel:
    """Floor for channel-smoothed signals.

    Counts at different displacements are pairwise uncorrelated under the
    uniform model, so the mean is convolved with the kernel autocorrelation
    ``a`` and the variance with ``a**2``.
    """
    kernel = kernel if hasattr(kernel, "taps") else rect_kernel(kernel)
    a = kernel_autocorrelation(kernel)
    pad = kernel.taps.size - 1
    L = model.mean.size
    mean = np.convolve(model.mean, a, mode="full")[pad:pad + L]
    var = np.convolve(model.std ** 2, a ** 2, mode="full")[pad:pad + L]
    return NoiseModel(mean, np.sqrt(np.maximum(var, 0.0)), model.M, model.Ns, model.Nq,
                      model.match_prob)


def empirical_match_prob(s_codes, q_codes, M) -> float:
    """Chance that two independently drawn positions match, from symbol frequencies."""
    fs = np.bincount(np.asarray(s_codes, dtype=np.int64), minlength=M + 1)[1:] / len(s_codes)
    fq = np.bincount(np.asarray(q_codes, dtype=np.int64), minlength=M + 1)[1:] / len(q_codes)
    return float(np.dot(fs, fq))


@dataclass(frozen=True)
class Peak:
    displacement: int
    height: float
    excess: float
    z: float

    def as_dict(self):
        h = self.height
        return {
            "displacement": int(self.displacement),
            "height": int(h) if float(h).is_integer() else float(h),
            "excess": float(self.excess),
            "z": float(self.z) if np.isfinite(self.z) else "inf",
        }


def detect_peaks(E: CoincidenceSignal, model: NoiseModel, z_min: float = 5.0,
                 min_excess: float = 1) -> list[Peak]:
    """Displacements whose count is a local maximum standing clear of the floor.

    ``p`` is reported when ``E[p] >= mean[p] + z_min * std[p]``,
    ``E[p] - mean[p] >= min_excess`` and ``E[p]`` is not below either
    neighbour while exceeding at least one. Plateaus report every tied
    sample. Output is sorted by height (descending), then displacement.
    """
    values = np.asarray(E.values, dtype=np.float64)
    if values.size != model.mean.size or E.Ns != model.Ns or E.Nq != model.Nq:
        raise DimensionMismatch("noise model does not match the signal dimensions")
    if values.size == 0:
        return []

    local_max = _local_maxima(values)

    excess = values - model.mean
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(model.std > 0, excess / model.std,
                     np.where(excess > 0, np.inf, 0.0))
    keep = local_max & (values >= model.mean + z_min * model.std) & (excess >= min_excess)

    idx = np.nonzero(keep)[0]
    order = np.lexsort((idx, -values[idx]))
    return [Peak(int(i - E.offset), E.values[i].item(), float(excess[i]), float(z[i]))
            for i in idx[order]]


def _local_maxima(values):
    # a run of equal samples is a maximum when every existing neighbour is
    # lower and it has at least one neighbour; all samples of the run count
    starts = np.concatenate([[0], np.flatnonzero(np.diff(values) != 0) + 1])
    lengths = np.diff(np.concatenate([starts, [values.size]]))
    level = values[starts]
    above_left = np.concatenate([[True], level[1:] > level[:-1]])
    above_right = np.concatenate([level[:-1] > level[1:], [True]])
    is_max = above_left & above_right & (level.size > 1)
    return np.repeat(is_max, lengths)


def peak_to_background(signal) -> float:
    """Maximum divided by the mean over the central half of the displacement range."""
    values = np.asarray(getattr(signal, "values", signal), dtype=np.float64)
    if values.size == 0:
        raise EmptySignal("empty signal")
    q = values.size // 4
    background = values[q:values.size - q].mean()
    if background == 0:
        raise DivisionByZeroBackground("background mean is zero")
    return float(values.max() / background)


@dataclass
class ComparisonReport:
    """Outcome of one pairwise comparison.

    ``signal`` (and ``smoothed``/``baseline`` when requested) are kept for
    CSV and plot output; :meth:`to_dict` gives the serializable summary.
    """

    Ns: int
    Nq: int
    M: int
    engine: str
    peaks: list
    noise: NoiseModel
    signal: CoincidenceSignal
    w: Optional[float] = None
    smooth_mode: Optional[str] = None
    smoothed: Optional[CoincidenceSignal] = None
    smoothed_noise: Optional[NoiseModel] = None
    baseline: Optional[np.ndarray] = None
    ratios: dict = field(default_factory=dict)
    timing_ms: float = 0.0
    z_min: float = 5.0

    @property
    def detection_signal(self) -> CoincidenceSignal:
        return self.smoothed if self.smoothed is not None else self.signal

    def to_dict(self, include_timing=False) -> dict:
        mean0, std0 = self.noise.at(0) if -(self.Ns - 1) <= 0 <= self.Nq - 1 else (0.0, 0.0)
        doc = {
            "convention": CONVENTION,
            "signal": {
                "Ns": self.Ns,
                "Nq": self.Nq,
                "M": self.M,
                "engine": self.engine,
                "w": self.w,
                "smooth_mode": self.smooth_mode,
                "displacement_range": [-(self.Ns - 1), self.Nq - 1],
            },
            "noise": {
                "model": "binomial",
                "match_prob": self.noise.match_prob,
                "mean_at_zero": mean0,
                "std_at_zero": std0,
            },
            "z_min": self.z_min,
            "peaks": [p.as_dict() for p in self.peaks],
            "peak_to_background": dict(self.ratios),
        }
        if self.smoothed_noise is not None:
            doc["noise"]["smoothed_match_prob"] = self.smoothed_noise.match_prob
        if include_timing:
            doc["timing_ms"] = self.timing_ms
        return doc


def compare(a, b, engine="fft", alphabet: AlphabetSpec = AlphabetSpec(), w=None,
            smooth_mode="channels", baseline=False, z_min=5.0, min_excess=1,
            threads=1, backend=None) -> ComparisonReport:
    """Normalize, decompose, correlate and analyse two raw sequences.

    ``timing_ms`` covers normalization through the (smoothed) coincidence
    signal; peak detection, the baseline and any I/O are excluded.
    """
    a = a if isinstance(a, Sequence) else Sequence(a)
    b = b if isinstance(b, Sequence) else Sequence(b)

    t0 = time.perf_counter()
    s, q = normalize(a, b, alphabet)
    sc, qc = decompose(s), decompose(q)
    E = coincidence(sc, qc, engine, threads, backend)
    smoothed = None
    if w is not None:
        if smooth_mode == "codes":
            smoothed = smoothed_coincidence(s, q, w, engine, "codes", threads, backend)
        else:
            smoothed = smoothed_coincidence(sc, qc, w, engine, smooth_mode, threads, backend)
    elapsed = (time.perf_counter() - t0) * 1e3

    noise = expected_floor(s.length, q.length, s.M)
    report = ComparisonReport(s.length, q.length, s.M, engine, [], noise, E,
                              timing_ms=elapsed, z_min=z_min)
    ratios = {"coincidence": _safe_ratio(E)}
    if smoothed is not None:
        report.w = float(w)
        report.smooth_mode = smooth_mode
        report.smoothed = smoothed
        if smooth_mode == "codes":
            ss, qs = smooth_codes(s, q, rect_kernel(w))
            pi = empirical_match_prob(ss.codes, qs.codes, ss.M)
            report.smoothed_noise = expected_floor(s.length, q.length, ss.M, pi)
        else:
            report.smoothed_noise = smoothed_floor(noise, rect_kernel(w))
        ratios["smoothed"] = _safe_ratio(smoothed)
    if baseline:
        report.baseline = numeric_xcorr(s, q, engine, backend)
        ratios["numeric"] = _safe_ratio(report.baseline)
    report.ratios = ratios

    model = report.smoothed_noise if smoothed is not None else noise
    report.peaks = detect_peaks(report.detection_signal, model, z_min, min_excess)
    return report


def _safe_ratio(signal):
    try:
        return peak_to_background(signal)
    except DivisionByZeroBackground:
        return None


@dataclass(frozen=True)
class FloorCalibration:
    """Empirical per-displacement mean and variance of uniform-pair counts."""

    N: int
    M: int
    trials: int
    mean: np.ndarray
    var: np.ndarray
    model: NoiseModel

    @property
    def standard_error(self) -> np.ndarray:
        return self.model.std / np.sqrt(self.trials)


def calibrate_floor(N: int, M: int, trials: int, seed=0, engine="fft",
                    backend=None) -> FloorCalibration:
    """Monte Carlo check of the noise floor with ``trials`` uniform pairs."""
    if trials < 2:
        raise InputError("need at least two trials")
    children = np.random.SeedSequence(seed).spawn(2 * trials)
    total = np.zeros(2 * N - 1)
    total_sq = np.zeros(2 * N - 1)
    for t in range(trials):
        a = gen_uniform(N, M, children[2 * t]).values
        b = gen_uniform(N, M, children[2 * t + 1]).values
        # codes already lie in 1..M; skip normalize so M stays fixed
        E = coincidence(decompose(NormalizedSequence(a, M)),
                        decompose(NormalizedSequence(b, M)), engine,
                        backend=backend).values.astype(np.float64)
        total += E
        total_sq += E * E
    mean = total / trials
    var = (total_sq - trials * mean ** 2) / (trials - 1)
    return FloorCalibration(N, M, trials, mean, np.maximum(var, 0.0), expected_floor(N, N, M))

