"""Frequency-domain analysis: magnitude spectra, spectrograms, peak picking.

Scaling convention (documented because every tool picks its own): spectra
are one-sided with magnitudes ``c_k * |X_k| / N_fft`` where ``c_k`` is 2 for
interior bins and 1 for DC and (when present) Nyquist. A bin-aligned cosine
of amplitude A therefore shows a single peak of magnitude A. Parseval's
identity in this scaling reads

    sum(x**2) == N_fft * (M_dc**2 + M_nyq**2 + sum(M_interior**2) / 2)

which :meth:`Spectrum.time_domain_energy` evaluates.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParameterError, ParseError, ShapeError
from .signals import SampledSignal

__all__ = [
    "Spectrum",
    "Spectrogram",
    "SpectralPeak",
    "fft_magnitude",
    "stft",
    "find_peaks",
    "write_spectrum_csv",
    "read_spectrum_csv",
    "write_spectrogram_csv",
    "read_spectrogram_csv",
    "write_peaks_csv",
    "read_peaks_csv",
]


@dataclass(eq=False)
class Spectrum:
    """One-sided magnitude spectrum on a uniform bin grid."""

    bin_frequencies: np.ndarray
    magnitudes: np.ndarray
    bin_width: float
    fft_size: int

    def __post_init__(self):
        self.bin_frequencies = np.asarray(self.bin_frequencies, dtype=np.float64)
        self.magnitudes = np.asarray(self.magnitudes, dtype=np.float64)
        if self.bin_frequencies.shape != self.magnitudes.shape or self.bin_frequencies.ndim != 1:
            raise ShapeError("bin_frequencies and magnitudes must be matching 1-d arrays")
        if self.bin_width <= 0:
            raise ParameterError(f"bin_width must be positive, got {self.bin_width}")
        if self.fft_size < 2:
            raise ParameterError(f"fft_size must be >= 2, got {self.fft_size}")
        if self.bin_frequencies.size > 1 and np.any(np.diff(self.bin_frequencies) <= 0):
            raise ParameterError("bin frequencies must be strictly ascending")
        if np.any(self.magnitudes < 0):
            raise ParameterError("magnitudes must be nonnegative")

    @property
    def sample_rate(self) -> float:
        return self.bin_width * self.fft_size

    def _has_nyquist_bin(self) -> bool:
        return self.fft_size % 2 == 0

    def time_domain_energy(self) -> float:
        """Sum of squared time samples implied by Parseval under this scaling."""
        m = self.magnitudes
        if self._has_nyquist_bin():
            interior = m[1:-1]
            edges = m[0] ** 2 + m[-1] ** 2
        else:
            interior = m[1:]
            edges = m[0] ** 2
        return float(self.fft_size * (edges + np.sum(interior ** 2) / 2.0))


@dataclass(eq=False)
class Spectrogram:
    """Short-time magnitude spectra: one row per frame, one column per bin."""

    frame_times: np.ndarray
    bin_frequencies: np.ndarray
    magnitudes: np.ndarray
    window_length: int
    hop: int

    def __post_init__(self):
        self.frame_times = np.asarray(self.frame_times, dtype=np.float64)
        self.bin_frequencies = np.asarray(self.bin_frequencies, dtype=np.float64)
        self.magnitudes = np.asarray(self.magnitudes, dtype=np.float64)
        if self.hop < 1:
            raise ParameterError(f"hop must be >= 1, got {self.hop}")
        if self.magnitudes.ndim != 2:
            raise ShapeError("magnitudes must be a frames x bins matrix")
        if self.magnitudes.shape[0] != self.frame_times.size:
            raise ShapeError("magnitudes row count must equal frame count")
        if self.magnitudes.shape[1] != self.bin_frequencies.size:
            raise ShapeError("magnitudes column count must equal bin count")


@dataclass(frozen=True)
class SpectralPeak:
    frequency: float
    magnitude: float
    bin_index: int


def _one_sided_magnitudes(transform: np.ndarray, fft_size: int) -> np.ndarray:
    mags = np.abs(transform) / fft_size
    if fft_size % 2 == 0:
        mags[1:-1] *= 2.0
    else:
        mags[1:] *= 2.0
    return mags


def fft_magnitude(signal: SampledSignal, fft_size: int | None = None) -> Spectrum:
    """One-sided magnitude spectrum (full signal length, or a power-of-two size).

    With an explicit ``fft_size`` the signal is truncated or zero-padded to
    that length, matching the usual FFT semantics.
    """
    if len(signal) < 2:
        raise ShapeError(f"signal must have at least 2 samples, got {len(signal)}")
    if fft_size is None:
        fft_size = len(signal)
    else:
        if fft_size < 2 or (fft_size & (fft_size - 1)) != 0:
            raise ParameterError(f"fft_size must be a power of two, got {fft_size}")
    transform = np.fft.rfft(signal.samples, n=fft_size)
    mags = _one_sided_magnitudes(transform, fft_size)
    freqs = np.fft.rfftfreq(fft_size, d=1.0 / signal.sample_rate)
    return Spectrum(freqs, mags, bin_width=signal.sample_rate / fft_size, fft_size=fft_size)


_WINDOWS = {
    "rectangular": np.ones,
    "hann": np.hanning,
}


def stft(signal: SampledSignal, window_length: int, hop: int,
         window: str = "hann") -> Spectrogram:
    """Short-time Fourier transform; frame times mark window centers."""
    if window_length < 2:
        raise ParameterError(f"window_length must be >= 2, got {window_length}")
    if window_length > len(signal):
        raise ShapeError(
            f"window_length {window_length} exceeds signal length {len(signal)}")
    if hop < 1:
        raise ParameterError(f"hop must be >= 1, got {hop}")
    if window not in _WINDOWS:
        raise ParameterError(f"unknown window {window!r} (expected one of {sorted(_WINDOWS)})")
    taper = _WINDOWS[window](window_length)
    n_frames = (len(signal) - window_length) // hop + 1
    starts = np.arange(n_frames) * hop
    frames = np.stack([signal.samples[s:s + window_length] * taper for s in starts])
    transform = np.fft.rfft(frames, axis=1)
    mags = np.stack([_one_sided_magnitudes(row, window_length) for row in transform])
    freqs = np.fft.rfftfreq(window_length, d=1.0 / signal.sample_rate)
    times = signal.start_time + (starts + window_length / 2.0) / signal.sample_rate
    return Spectrogram(times, freqs, mags, window_length=window_length, hop=hop)


def find_peaks(spectrum: Spectrum, relative_threshold: float = 0.1,
               min_separation: float = 0.0) -> list[SpectralPeak]:
    """Local maxima above a relative threshold, thinned to a minimum spacing.

    Candidates are kept greedily in descending magnitude (ties broken toward
    lower frequency) and returned sorted by frequency.
    """
    if not 0 < relative_threshold <= 1:
        raise ParameterError(f"relative_threshold must lie in (0, 1], got {relative_threshold}")
    if min_separation < 0:
        raise ParameterError(f"min_separation must be >= 0, got {min_separation}")
    m = spectrum.magnitudes
    peak_floor = relative_threshold * float(m.max()) if m.size else 0.0
    if peak_floor <= 0.0:
        return []
    candidates = []
    for k in range(m.size):
        if m[k] < peak_floor:
            continue
        if k > 0 and m[k] < m[k - 1]:
            continue
        if k < m.size - 1 and m[k] < m[k + 1]:
            continue
        candidates.append(k)
    candidates.sort(key=lambda k: (-m[k], spectrum.bin_frequencies[k]))
    kept: list[int] = []
    for k in candidates:
        fk = spectrum.bin_frequencies[k]
        if all(abs(fk - spectrum.bin_frequencies[j]) >= min_separation for j in kept):
            kept.append(k)
    kept.sort(key=lambda k: spectrum.bin_frequencies[k])
    return [SpectralPeak(float(spectrum.bin_frequencies[k]), float(m[k]), int(k)) for k in kept]


def write_spectrum_csv(spectrum: Spectrum, path) -> None:
    lines = [
        f"# fft_size={spectrum.fft_size}",
        f"# sample_rate={float(spectrum.sample_rate)!r}",
        "frequency_hz,magnitude",
    ]
    lines.extend(f"{float(f)!r},{float(v)!r}"
                 for f, v in zip(spectrum.bin_frequencies, spectrum.magnitudes))
    Path(path).write_text("\n".join(lines) + "\n")


def read_spectrum_csv(path) -> Spectrum:
    path = Path(path)
    meta: dict[str, float] = {}
    freqs, mags = [], []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line == "frequency_hz,magnitude":
            continue
        if line.startswith("#"):
            key, _, val = line.lstrip("# ").partition("=")
            meta[key] = float(val)
            continue
        try:
            f_text, _, m_text = line.partition(",")
            freqs.append(float(f_text))
            mags.append(float(m_text))
        except ValueError as e:
            raise ParseError(f"{path}:{lineno}: bad spectrum row {line!r}") from e
    if "fft_size" not in meta or "sample_rate" not in meta:
        raise ParseError(f"{path}: missing fft_size/sample_rate metadata")
    fft_size = int(meta["fft_size"])
    return Spectrum(np.array(freqs), np.array(mags),
                    bin_width=meta["sample_rate"] / fft_size, fft_size=fft_size)


def write_spectrogram_csv(spectrogram: Spectrogram, path) -> None:
    """CSV matrix: frequency header row, one time-stamped row per frame."""
    header = "time_s," + ",".join(f"f_{float(f)!r}" for f in spectrogram.bin_frequencies)
    lines = [
        f"# window_length={spectrogram.window_length}",
        f"# hop={spectrogram.hop}",
        header,
    ]
    for t, row in zip(spectrogram.frame_times, spectrogram.magnitudes):
        lines.append(f"{float(t)!r}," + ",".join(f"{float(v)!r}" for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_spectrogram_csv(path) -> Spectrogram:
    path = Path(path)
    meta: dict[str, int] = {}
    freqs: np.ndarray | None = None
    times, rows = [], []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line.lstrip("# ").partition("=")
            meta[key] = int(val)
            continue
        if line.startswith("time_s,"):
            freqs = np.array([float(c[2:]) for c in line.split(",")[1:]])
            continue
        try:
            cells = line.split(",")
            times.append(float(cells[0]))
            rows.append([float(c) for c in cells[1:]])
        except ValueError as e:
            raise ParseError(f"{path}:{lineno}: bad spectrogram row") from e
    if freqs is None or "window_length" not in meta or "hop" not in meta:
        raise ParseError(f"{path}: missing header or metadata")
    return Spectrogram(np.array(times), freqs, np.array(rows),
                       window_length=meta["window_length"], hop=meta["hop"])


def write_peaks_csv(peaks: list[SpectralPeak], path) -> None:
    lines = ["frequency_hz,magnitude,bin_index"]
    lines.extend(f"{p.frequency!r},{p.magnitude!r},{p.bin_index}" for p in peaks)
    Path(path).write_text("\n".join(lines) + "\n")


def read_peaks_csv(path) -> list[SpectralPeak]:
    peaks = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line == "frequency_hz,magnitude,bin_index":
            continue
        try:
            f_text, m_text, k_text = line.split(",")
            peaks.append(SpectralPeak(float(f_text), float(m_text), int(k_text)))
        except ValueError as e:
            raise ParseError(f"{path}:{lineno}: bad peak row {line!r}") from e
    return peaks
