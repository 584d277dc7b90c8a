"""Channel degradation: scalar attenuation plus additive white Gaussian noise.

Attenuation models space loss and field-to-line coupling as a single dB
gain. When noise is sized by SNR, the variance is derived from the measured
mean power of the *attenuated* signal, so ``snr_db`` means "SNR at the
receiver". Noise is drawn from PCG64, deterministic per seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ParameterError, ShapeError
from .signals import SampledSignal

__all__ = ["ChannelParams", "apply_channel", "measure_snr"]


@dataclass(frozen=True)
class ChannelParams:
    """Attenuation in dB plus exactly one noise specification (snr_db or noise_power)."""

    attenuation_db: float = 0.0
    snr_db: float | None = None
    noise_power: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.attenuation_db < 0:
            raise ParameterError(f"attenuation_db must be >= 0, got {self.attenuation_db}")
        if (self.snr_db is None) == (self.noise_power is None):
            raise ConfigurationError("exactly one of snr_db / noise_power must be set")
        if self.noise_power is not None and self.noise_power < 0:
            raise ParameterError(f"noise_power must be >= 0, got {self.noise_power}")

    @property
    def linear_gain(self) -> float:
        return 10.0 ** (-self.attenuation_db / 20.0)


def apply_channel(signal: SampledSignal, params: ChannelParams) -> SampledSignal:
    """Scale by the attenuation gain and add i.i.d. Gaussian noise."""
    if len(signal) == 0:
        raise ShapeError("cannot apply a channel to an empty signal")
    scaled = params.linear_gain * signal.samples
    if params.noise_power is not None:
        variance = params.noise_power
    else:
        power = float(np.mean(scaled ** 2))
        if power == 0.0:
            raise ParameterError("cannot size noise by SNR for a zero-power signal")
        variance = power / 10.0 ** (params.snr_db / 10.0)
    if variance > 0.0:
        rng = np.random.default_rng(params.seed)
        scaled = scaled + math.sqrt(variance) * rng.standard_normal(len(signal))
    return SampledSignal(signal.sample_rate, scaled, signal.start_time)


def measure_snr(clean: SampledSignal, noisy: SampledSignal) -> float:
    """Output SNR in dB after a least-squares gain fit of clean onto noisy.

    Returns ``math.inf`` when the residual is exactly zero (no noise).
    """
    if clean.sample_rate != noisy.sample_rate:
        raise ShapeError(f"sample rates differ: {clean.sample_rate} vs {noisy.sample_rate}")
    if len(clean) != len(noisy):
        raise ShapeError(f"lengths differ: {len(clean)} vs {len(noisy)}")
    clean_energy = float(np.dot(clean.samples, clean.samples))
    if clean_energy == 0.0:
        raise ParameterError("clean signal has zero power; SNR is undefined")
    gain = float(np.dot(clean.samples, noisy.samples)) / clean_energy
    fitted = gain * clean.samples
    residual = noisy.samples - fitted
    noise_power = float(np.mean(residual ** 2))
    if noise_power == 0.0:
        return math.inf
    signal_power = float(np.mean(fitted ** 2))
    return 10.0 * math.log10(signal_power / noise_power)
