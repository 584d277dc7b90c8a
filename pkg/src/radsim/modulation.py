"""Carrier generation and binary ASK/FSK/PSK modulation with coherent receivers.

Conventions:

* carriers are cosines ``A * cos(2*pi*fc*t + theta0)``;
* FSK signals bit 0 at ``fc - bit_rate/2`` and bit 1 at ``fc + bit_rate/2``,
  phase-continuous across bit boundaries by default (``phase_continuous=False``
  restores the literal per-bit cosine definition);
* ASK gates the carrier on for 1 and off for 0; PSK flips the carrier phase
  by pi for 0;
* ``sample_rate / bit_rate`` must be an integer so bit boundaries land
  exactly on samples.

The demodulators are idealized coherent receivers (carrier frequency, phase
and bit timing known); they exist so transmit/receive round trips can be
verified and bit error rates measured.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import BitStream
from .errors import ConfigurationError, ParameterError, ShapeError
from .signals import SampledSignal

__all__ = [
    "CarrierSpec",
    "samples_per_bit",
    "generate_carrier",
    "ask_modulate",
    "fsk_modulate",
    "psk_modulate",
    "compose_emitted",
    "ask_demodulate",
    "fsk_demodulate",
    "psk_demodulate",
]


@dataclass(frozen=True)
class CarrierSpec:
    """Cosine carrier: center frequency fc, amplitude A, initial phase, sample rate."""

    center_frequency: float
    amplitude: float = 1.0
    initial_phase: float = 0.0
    sample_rate: float = 48000.0

    def __post_init__(self):
        if self.amplitude <= 0:
            raise ParameterError(f"amplitude must be positive, got {self.amplitude}")
        if self.sample_rate <= 0:
            raise ParameterError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.center_frequency < 0:
            raise ParameterError(f"center_frequency must be >= 0, got {self.center_frequency}")
        if self.center_frequency > 0 and self.sample_rate <= 2 * self.center_frequency:
            raise ConfigurationError(
                f"sample_rate {self.sample_rate} violates Nyquist for carrier at "
                f"{self.center_frequency} Hz (needs > {2 * self.center_frequency})")


def _check_nyquist(spec: CarrierSpec, max_frequency: float) -> None:
    if spec.sample_rate <= 2 * max_frequency:
        raise ConfigurationError(
            f"sample_rate {spec.sample_rate} violates Nyquist for content up to "
            f"{max_frequency} Hz (needs > {2 * max_frequency})")


def samples_per_bit(spec: CarrierSpec, bit_rate: float) -> int:
    """Integer samples per bit; rejects non-integer ratios so bit edges stay exact."""
    if bit_rate <= 0:
        raise ParameterError(f"bit_rate must be positive, got {bit_rate}")
    ratio = spec.sample_rate / bit_rate
    spb = round(ratio)
    if spb < 1 or abs(ratio - spb) > 1e-9:
        raise ConfigurationError(
            f"sample_rate/bit_rate = {ratio} is not a positive integer; "
            "choose rates with an exact integer samples-per-bit")
    return int(spb)


def generate_carrier(spec: CarrierSpec, duration: float) -> SampledSignal:
    """Pure carrier tone of the given duration (sample count = round(duration*fs))."""
    if duration <= 0:
        raise ParameterError(f"duration must be positive, got {duration}")
    n = int(round(duration * spec.sample_rate))
    t = np.arange(n) / spec.sample_rate
    samples = spec.amplitude * np.cos(2 * np.pi * spec.center_frequency * t + spec.initial_phase)
    return SampledSignal(spec.sample_rate, samples)


def _fsk_tones(spec: CarrierSpec, bit_rate: float) -> tuple[float, float]:
    f0 = spec.center_frequency - bit_rate / 2.0
    f1 = spec.center_frequency + bit_rate / 2.0
    if f0 < 0:
        raise ConfigurationError(
            f"bit_rate {bit_rate} places the low tone at {f0} Hz; "
            "the carrier frequency must be at least bit_rate/2")
    _check_nyquist(spec, f1)
    return f0, f1


def fsk_modulate(stream: BitStream, spec: CarrierSpec, phase_continuous: bool = True) -> SampledSignal:
    """Binary FSK: tone fc - R/2 for 0, fc + R/2 for 1 (R = bit rate)."""
    f0, f1 = _fsk_tones(spec, stream.bit_rate)
    spb = samples_per_bit(spec, stream.bit_rate)
    freqs = np.where(stream.bits == 1, f1, f0)
    k = np.arange(spb)
    if phase_continuous:
        # Phase accumulates across bit boundaries: no discontinuity, no splatter.
        increments = 2 * np.pi * freqs * spb / spec.sample_rate
        starts = spec.initial_phase + np.concatenate(([0.0], np.cumsum(increments[:-1])))
        phases = starts[:, None] + 2 * np.pi * freqs[:, None] * k[None, :] / spec.sample_rate
    else:
        # Literal per-bit cosine of the global time axis.
        t = (np.arange(len(stream) * spb) / spec.sample_rate).reshape(len(stream), spb)
        phases = 2 * np.pi * freqs[:, None] * t + spec.initial_phase
    samples = spec.amplitude * np.cos(phases).ravel()
    return SampledSignal(spec.sample_rate, samples)


def ask_modulate(stream: BitStream, spec: CarrierSpec) -> SampledSignal:
    """On-off keying: carrier for 1, silence for 0."""
    spb = samples_per_bit(spec, stream.bit_rate)
    carrier = generate_carrier(spec, len(stream) * spb / spec.sample_rate)
    gate = np.repeat(stream.bits.astype(np.float64), spb)
    return SampledSignal(spec.sample_rate, carrier.samples * gate)


def psk_modulate(stream: BitStream, spec: CarrierSpec) -> SampledSignal:
    """Binary PSK: carrier phase 0 for 1, phase pi (negated carrier) for 0."""
    spb = samples_per_bit(spec, stream.bit_rate)
    carrier = generate_carrier(spec, len(stream) * spb / spec.sample_rate)
    chips = np.repeat(np.where(stream.bits == 1, 1.0, -1.0), spb)
    return SampledSignal(spec.sample_rate, carrier.samples * chips)


def compose_emitted(carrier: SampledSignal, modulated: SampledSignal) -> SampledSignal:
    """Sample-wise sum of carrier and modulated signal (the emitted signal)."""
    if carrier.sample_rate != modulated.sample_rate:
        raise ShapeError(
            f"sample rates differ: {carrier.sample_rate} vs {modulated.sample_rate}")
    if len(carrier) != len(modulated):
        raise ShapeError(f"lengths differ: {len(carrier)} vs {len(modulated)}")
    return SampledSignal(carrier.sample_rate, carrier.samples + modulated.samples,
                         carrier.start_time)


def _bit_windows(signal: SampledSignal, spb: int, n_bits: int) -> np.ndarray:
    if n_bits < 1:
        raise ParameterError(f"n_bits must be >= 1, got {n_bits}")
    needed = n_bits * spb
    if len(signal) < needed:
        raise ShapeError(f"signal has {len(signal)} samples, need {needed} for {n_bits} bits")
    return signal.samples[:needed].reshape(n_bits, spb)


def fsk_demodulate(signal: SampledSignal, spec: CarrierSpec, n_bits: int,
                   bit_rate: float) -> BitStream:
    """Per-bit tone correlation at f0/f1; larger magnitude wins, ties decode as 0."""
    f0, f1 = _fsk_tones(spec, bit_rate)
    spb = samples_per_bit(spec, bit_rate)
    windows = _bit_windows(signal, spb, n_bits)
    t = (signal.start_time + np.arange(n_bits * spb) / spec.sample_rate).reshape(n_bits, spb)
    mag0 = np.abs((windows * np.exp(-2j * np.pi * f0 * t)).sum(axis=1))
    mag1 = np.abs((windows * np.exp(-2j * np.pi * f1 * t)).sum(axis=1))
    bits = (mag1 > mag0).astype(np.uint8)
    return BitStream(bits, bit_rate)


def psk_demodulate(signal: SampledSignal, spec: CarrierSpec, n_bits: int,
                   bit_rate: float) -> BitStream:
    """Coherent correlation with the carrier; positive correlation decodes as 1."""
    spb = samples_per_bit(spec, bit_rate)
    windows = _bit_windows(signal, spb, n_bits)
    reference = generate_carrier(spec, n_bits * spb / spec.sample_rate).samples.reshape(n_bits, spb)
    correlation = (windows * reference).sum(axis=1)
    bits = (correlation > 0).astype(np.uint8)
    return BitStream(bits, bit_rate)


def ask_demodulate(signal: SampledSignal, spec: CarrierSpec, n_bits: int,
                   bit_rate: float, threshold_fraction: float = 0.5) -> BitStream:
    """Per-bit energy detector against a fraction of the full-carrier bit energy."""
    if not 0 < threshold_fraction < 1:
        raise ParameterError(f"threshold_fraction must lie in (0, 1), got {threshold_fraction}")
    spb = samples_per_bit(spec, bit_rate)
    windows = _bit_windows(signal, spb, n_bits)
    reference = generate_carrier(spec, n_bits * spb / spec.sample_rate).samples.reshape(n_bits, spb)
    energies = (windows ** 2).sum(axis=1)
    thresholds = threshold_fraction * (reference ** 2).sum(axis=1)
    bits = (energies >= thresholds).astype(np.uint8)
    return BitStream(bits, bit_rate)
