"""Signal recognition: feature extraction, signature library, classification.

The defense pipeline is: receive -> magnitude spectrum on the library's bin
grid -> Pearson correlation against each stored template -> threshold. A
signal whose best correlation clears the threshold is labeled with that
template's name, otherwise "unknown". Time/frequency features are extracted
alongside for inspection; the decision statistic is the template correlation.

Matching spectra are block-averaged: the signal is cut into disjoint
``fft_size`` blocks whose one-sided magnitudes are averaged (a short signal
is zero-padded into a single block). Templates are stored normalized to unit
energy. Libraries persist as versioned JSON with stable key order; floats
survive the round trip bit-exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ConflictError, ParameterError, ParseError, ShapeError
from .signals import SampledSignal
from .spectral import Spectrum, fft_magnitude, find_peaks

__all__ = [
    "FeatureVector",
    "SignatureEntry",
    "SignatureLibrary",
    "ClassificationResult",
    "UNKNOWN_LABEL",
    "DEFAULT_FFT_SIZE",
    "DEFAULT_THRESHOLD",
    "extract_features",
    "matching_spectrum",
    "spectral_correlation",
    "classify",
    "library_add",
    "library_save",
    "library_load",
]

UNKNOWN_LABEL = "unknown"
DEFAULT_FFT_SIZE = 4096
DEFAULT_THRESHOLD = 0.8

LIBRARY_FORMAT = "radsim-signature-library"
LIBRARY_MAJOR_VERSION = 1
LIBRARY_MINOR_VERSION = 0

# Peak-picking defaults for the dominant_peaks feature; fixed for determinism.
_PEAK_THRESHOLD = 0.05
_PEAK_SEPARATION_BINS = 4
_MAX_DOMINANT_PEAKS = 5


@dataclass(frozen=True)
class FeatureVector:
    """Interpretable time- and frequency-domain summary of a signal."""

    rms_power: float
    zero_crossing_rate: float
    crest_factor: float
    spectral_centroid: float
    spectral_bandwidth: float
    spectral_entropy: float
    dominant_peaks: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if self.rms_power < 0:
            raise ParameterError(f"rms_power must be >= 0, got {self.rms_power}")
        if not 0 <= self.zero_crossing_rate <= 1:
            raise ParameterError(f"zero_crossing_rate must lie in [0, 1], got {self.zero_crossing_rate}")
        if not 0 <= self.spectral_entropy <= 1:
            raise ParameterError(f"spectral_entropy must lie in [0, 1], got {self.spectral_entropy}")
        if len(self.dominant_peaks) > _MAX_DOMINANT_PEAKS:
            raise ParameterError(f"at most {_MAX_DOMINANT_PEAKS} dominant peaks allowed")
        rels = [rel for _, rel in self.dominant_peaks]
        if any(r2 > r1 for r1, r2 in zip(rels, rels[1:])):
            raise ParameterError("dominant_peaks must be sorted by descending magnitude")

    def as_dict(self) -> dict:
        return {
            "rms_power": self.rms_power,
            "zero_crossing_rate": self.zero_crossing_rate,
            "crest_factor": self.crest_factor,
            "spectral_centroid": self.spectral_centroid,
            "spectral_bandwidth": self.spectral_bandwidth,
            "spectral_entropy": self.spectral_entropy,
            "dominant_peaks": [[f, r] for f, r in self.dominant_peaks],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureVector":
        try:
            return cls(
                rms_power=data["rms_power"],
                zero_crossing_rate=data["zero_crossing_rate"],
                crest_factor=data["crest_factor"],
                spectral_centroid=data["spectral_centroid"],
                spectral_bandwidth=data["spectral_bandwidth"],
                spectral_entropy=data["spectral_entropy"],
                dominant_peaks=tuple((f, r) for f, r in data["dominant_peaks"]),
            )
        except KeyError as e:
            raise ParseError(f"feature vector missing key {e.args[0]!r}") from e


@dataclass(frozen=True)
class SignatureEntry:
    label: str
    features: FeatureVector
    template_spectrum: Spectrum
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.label:
            raise ParameterError("label must be nonempty")
        energy = float(np.sum(self.template_spectrum.magnitudes ** 2))
        if abs(energy - 1.0) > 1e-9:
            raise ParameterError(f"template spectrum energy must be 1, got {energy}")


@dataclass(eq=False)
class SignatureLibrary:
    """Labeled template spectra sharing one analysis grid (fft_size, sample_rate)."""

    fft_size: int = DEFAULT_FFT_SIZE
    sample_rate: float = 48000.0
    entries: tuple[SignatureEntry, ...] = ()

    def __post_init__(self):
        if self.fft_size < 2 or (self.fft_size & (self.fft_size - 1)) != 0:
            raise ParameterError(f"fft_size must be a power of two, got {self.fft_size}")
        if self.sample_rate <= 0:
            raise ParameterError(f"sample_rate must be positive, got {self.sample_rate}")
        self.entries = tuple(self.entries)
        labels = [e.label for e in self.entries]
        if len(labels) != len(set(labels)):
            raise ConflictError("duplicate labels in signature library")

    def __len__(self) -> int:
        return len(self.entries)

    def labels(self) -> list[str]:
        return [e.label for e in self.entries]


@dataclass(frozen=True)
class ClassificationResult:
    label: str
    score: float
    runner_up: tuple[str, float] | None = None


def extract_features(signal: SampledSignal) -> FeatureVector:
    """Deterministic feature set; needs at least 64 samples."""
    x = signal.samples
    if x.size < 64:
        raise ShapeError(f"signal must have at least 64 samples, got {x.size}")
    rms = float(np.sqrt(np.mean(x ** 2)))
    crossings = int(np.count_nonzero(x[:-1] * x[1:] < 0))
    zcr = crossings / (x.size - 1)
    crest = float(np.max(np.abs(x)) / rms) if rms > 0 else 0.0

    spectrum = fft_magnitude(signal)
    mags = spectrum.magnitudes
    freqs = spectrum.bin_frequencies
    total = float(mags.sum())
    if total > 0:
        centroid = float((freqs * mags).sum() / total)
        bandwidth = float(np.sqrt(((freqs - centroid) ** 2 * mags).sum() / total))
    else:
        centroid = 0.0
        bandwidth = 0.0

    power = mags ** 2
    power_total = float(power.sum())
    if power_total > 0 and mags.size > 1:
        p = power / power_total
        nonzero = p[p > 0]
        entropy = float(-(nonzero * np.log(nonzero)).sum() / math.log(mags.size))
        entropy = min(max(entropy, 0.0), 1.0)
    else:
        entropy = 0.0

    peaks = find_peaks(spectrum, relative_threshold=_PEAK_THRESHOLD,
                       min_separation=_PEAK_SEPARATION_BINS * spectrum.bin_width)
    peaks.sort(key=lambda pk: (-pk.magnitude, pk.frequency))
    top = peaks[:_MAX_DOMINANT_PEAKS]
    max_mag = top[0].magnitude if top else 0.0
    dominant = tuple((pk.frequency, pk.magnitude / max_mag) for pk in top)

    return FeatureVector(rms, zcr, crest, centroid, bandwidth, entropy, dominant)


def matching_spectrum(signal: SampledSignal, fft_size: int = DEFAULT_FFT_SIZE) -> Spectrum:
    """Magnitude spectrum averaged over disjoint fft_size blocks, unit energy."""
    if fft_size < 2 or (fft_size & (fft_size - 1)) != 0:
        raise ParameterError(f"fft_size must be a power of two, got {fft_size}")
    if len(signal) == 0:
        raise ShapeError("cannot analyze an empty signal")
    n_blocks = max(1, len(signal) // fft_size)
    acc = np.zeros(fft_size // 2 + 1)
    for b in range(n_blocks):
        block = SampledSignal(signal.sample_rate,
                              signal.samples[b * fft_size:(b + 1) * fft_size])
        acc += fft_magnitude(block, fft_size=fft_size).magnitudes
    mean = acc / n_blocks
    energy = math.sqrt(float(np.sum(mean ** 2)))
    if energy == 0.0:
        raise ParameterError("signal spectrum has zero energy; cannot normalize")
    freqs = np.fft.rfftfreq(fft_size, d=1.0 / signal.sample_rate)
    return Spectrum(freqs, mean / energy, bin_width=signal.sample_rate / fft_size,
                    fft_size=fft_size)


def spectral_correlation(a: Spectrum, b: Spectrum) -> float:
    """Pearson correlation of two magnitude spectra on identical bin grids."""
    if a.magnitudes.size != b.magnitudes.size:
        raise ShapeError(f"bin counts differ: {a.magnitudes.size} vs {b.magnitudes.size}")
    if not np.allclose(a.bin_frequencies, b.bin_frequencies, rtol=0.0, atol=1e-9):
        raise ShapeError("bin grids differ; spectra are not comparable")
    da = a.magnitudes - a.magnitudes.mean()
    db = b.magnitudes - b.magnitudes.mean()
    va = float(np.dot(da, da))
    vb = float(np.dot(db, db))
    if va == 0.0 or vb == 0.0:
        raise ParameterError("zero-variance spectrum; correlation is undefined")
    return float(np.dot(da, db) / math.sqrt(va * vb))


def classify(signal: SampledSignal, library: SignatureLibrary,
             threshold: float = DEFAULT_THRESHOLD) -> ClassificationResult:
    """Nearest-template decision by spectral correlation with a detection threshold."""
    if len(library) == 0:
        raise ConfigurationError("signature library is empty")
    if not 0 < threshold < 1:
        raise ParameterError(f"threshold must lie in (0, 1), got {threshold}")
    if signal.sample_rate != library.sample_rate:
        raise ConfigurationError(
            f"signal sample rate {signal.sample_rate} does not match the library "
            f"grid ({library.sample_rate}); analysis bins would not align")
    probe = matching_spectrum(signal, library.fft_size)
    scored = sorted(
        ((spectral_correlation(probe, e.template_spectrum), e.label) for e in library.entries),
        key=lambda sc: (-sc[0], sc[1]))
    best_score, best_label = scored[0]
    runner_up = (scored[1][1], scored[1][0]) if len(scored) > 1 else None
    label = best_label if best_score >= threshold else UNKNOWN_LABEL
    return ClassificationResult(label, best_score, runner_up)


def library_add(library: SignatureLibrary, label: str, signal: SampledSignal,
                metadata: dict | None = None) -> SignatureLibrary:
    """Return a new library with the signal's template and features added."""
    if not label:
        raise ParameterError("label must be nonempty")
    if label in library.labels():
        raise ConflictError(f"label {label!r} already exists in the library")
    if signal.sample_rate != library.sample_rate:
        raise ConfigurationError(
            f"signal sample rate {signal.sample_rate} does not match the library "
            f"grid ({library.sample_rate})")
    entry = SignatureEntry(
        label=label,
        features=extract_features(signal),
        template_spectrum=matching_spectrum(signal, library.fft_size),
        metadata=dict(metadata or {}),
    )
    return SignatureLibrary(library.fft_size, library.sample_rate, library.entries + (entry,))


def library_save(library: SignatureLibrary, path) -> None:
    doc = {
        "format": LIBRARY_FORMAT,
        "version": {"major": LIBRARY_MAJOR_VERSION, "minor": LIBRARY_MINOR_VERSION},
        "fft_size": library.fft_size,
        "sample_rate": library.sample_rate,
        "entries": [
            {
                "label": e.label,
                "features": e.features.as_dict(),
                "template_magnitudes": [float(v) for v in e.template_spectrum.magnitudes],
                "metadata": e.metadata,
            }
            for e in library.entries
        ],
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")


def library_load(path) -> SignatureLibrary:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}") from e
    if not isinstance(doc, dict) or doc.get("format") != LIBRARY_FORMAT:
        raise ParseError(f"{path}: not a signature library file")
    version = doc.get("version", {})
    if version.get("major") != LIBRARY_MAJOR_VERSION:
        raise ParseError(
            f"{path}: unsupported library major version {version.get('major')!r} "
            f"(supported: {LIBRARY_MAJOR_VERSION})")
    try:
        fft_size = int(doc["fft_size"])
        sample_rate = float(doc["sample_rate"])
        raw_entries = doc["entries"]
    except KeyError as e:
        raise ParseError(f"{path}: missing key {e.args[0]!r}") from e
    freqs = np.fft.rfftfreq(fft_size, d=1.0 / sample_rate)
    entries = []
    for raw in raw_entries:
        try:
            mags = np.array(raw["template_magnitudes"], dtype=np.float64)
            if mags.size != freqs.size:
                raise ParseError(
                    f"{path}: template for {raw.get('label')!r} has {mags.size} bins, "
                    f"expected {freqs.size}")
            entries.append(SignatureEntry(
                label=raw["label"],
                features=FeatureVector.from_dict(raw["features"]),
                template_spectrum=Spectrum(freqs, mags, bin_width=sample_rate / fft_size,
                                           fft_size=fft_size),
                metadata=dict(raw.get("metadata", {})),
            ))
        except KeyError as e:
            raise ParseError(f"{path}: entry missing key {e.args[0]!r}") from e
    return SignatureLibrary(fft_size, sample_rate, tuple(entries))
