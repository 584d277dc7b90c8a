"""Payload generation and line coding.

Covers hex/binary payload conversion, seeded random payloads, Manchester
encoding (0: high->low mid-bit, 1: low->high mid-bit, IEEE-802.3 style)
and rendering bit streams as rectangular baseband waveforms.

Random payloads are drawn from numpy's default PCG64 generator so a 64-bit
seed reproduces the exact same stream everywhere.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, ParameterError, ParseError, ShapeError
from .signals import SampledSignal

HIGH = 1
LOW = 0

_HEX_DIGITS = set(string.hexdigits)


@dataclass(eq=False)
class BitStream:
    """An ordered binary payload transmitted at ``bit_rate`` bits per second."""

    bits: np.ndarray
    bit_rate: float

    def __post_init__(self):
        if self.bit_rate <= 0:
            raise ParameterError(f"bit_rate must be positive, got {self.bit_rate}")
        self.bits = np.asarray(self.bits, dtype=np.uint8)
        if self.bits.ndim != 1:
            raise ShapeError(f"bits must be one-dimensional, got shape {self.bits.shape}")
        if self.bits.size and not np.all((self.bits == 0) | (self.bits == 1)):
            raise ParameterError("bits must contain only 0 and 1")

    def __len__(self) -> int:
        return int(self.bits.size)

    @property
    def bit_duration(self) -> float:
        return 1.0 / self.bit_rate


@dataclass(eq=False)
class LineCodeSignal:
    """Half-bit level sequence produced by a line coder (1=high, 0=low)."""

    levels: np.ndarray
    half_bit_duration: float

    def __post_init__(self):
        if self.half_bit_duration <= 0:
            raise ParameterError(f"half_bit_duration must be positive, got {self.half_bit_duration}")
        self.levels = np.asarray(self.levels, dtype=np.int8)
        if self.levels.ndim != 1:
            raise ShapeError(f"levels must be one-dimensional, got shape {self.levels.shape}")
        if self.levels.size % 2 != 0:
            raise ShapeError(f"level count must be even (two half-bits per bit), got {self.levels.size}")
        if self.levels.size and not np.all((self.levels == HIGH) | (self.levels == LOW)):
            raise ParameterError("levels must contain only HIGH (1) and LOW (0)")

    def __len__(self) -> int:
        return int(self.levels.size)


def hex_to_bits(hex_text: str, bit_rate: float) -> BitStream:
    """Expand hex digits into bits, most significant bit of each nibble first."""
    for pos, ch in enumerate(hex_text):
        if ch not in _HEX_DIGITS:
            raise ParseError(f"invalid hex digit {ch!r} at position {pos}")
    bits = np.zeros(4 * len(hex_text), dtype=np.uint8)
    for i, ch in enumerate(hex_text):
        nibble = int(ch, 16)
        for b in range(4):
            bits[4 * i + b] = (nibble >> (3 - b)) & 1
    return BitStream(bits, bit_rate)


def bits_to_hex(stream: BitStream) -> str:
    """Inverse of :func:`hex_to_bits`; uppercase output."""
    n = len(stream)
    if n % 4 != 0:
        raise ShapeError(f"bit count must be divisible by 4, got {n}")
    digits = []
    for i in range(0, n, 4):
        nibble = (int(stream.bits[i]) << 3) | (int(stream.bits[i + 1]) << 2) \
            | (int(stream.bits[i + 2]) << 1) | int(stream.bits[i + 3])
        digits.append(format(nibble, "X"))
    return "".join(digits)


def random_payload(seed: int, n_bits: int, bit_rate: float) -> BitStream:
    """Uniform random bits from PCG64; identical seed gives identical stream."""
    if n_bits < 1:
        raise ParameterError(f"n_bits must be >= 1, got {n_bits}")
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=n_bits, dtype=np.uint8)
    return BitStream(bits, bit_rate)


def manchester_encode(stream: BitStream) -> LineCodeSignal:
    """Encode bits as mid-bit transitions: 0 -> (high, low), 1 -> (low, high)."""
    if len(stream) == 0:
        raise ShapeError("cannot Manchester-encode an empty stream")
    levels = np.empty(2 * len(stream), dtype=np.int8)
    levels[0::2] = 1 - stream.bits  # first half-bit: high for 0, low for 1
    levels[1::2] = stream.bits
    return LineCodeSignal(levels, half_bit_duration=1.0 / (2.0 * stream.bit_rate))


def manchester_decode(signal: LineCodeSignal) -> BitStream:
    """Exact inverse of :func:`manchester_encode`."""
    first = signal.levels[0::2]
    second = signal.levels[1::2]
    bad = np.nonzero(first == second)[0]
    if bad.size:
        i = int(bad[0])
        pair = "high,high" if first[i] == HIGH else "low,low"
        raise ParseError(f"invalid Manchester pair ({pair}) at bit {i}")
    return BitStream(second.astype(np.uint8), bit_rate=1.0 / (2.0 * signal.half_bit_duration))


def rectangular_waveform(stream: BitStream, sample_rate: float,
                         high_level: float = 1.0, low_level: float = 0.0) -> SampledSignal:
    """Render bits as a piecewise-constant waveform (the time-domain view of a binary signal)."""
    if sample_rate < 2 * stream.bit_rate:
        raise ConfigurationError(
            f"sample_rate {sample_rate} is below 2 x bit_rate ({2 * stream.bit_rate})")
    samples_per_bit = int(round(sample_rate / stream.bit_rate))
    levels = np.where(stream.bits == 1, float(high_level), float(low_level))
    return SampledSignal(sample_rate, np.repeat(levels, samples_per_bit))


def write_bits(stream: BitStream, path) -> None:
    """Serialize as a text file of '0'/'1' characters with a trailing newline."""
    Path(path).write_text("".join(str(int(b)) for b in stream.bits) + "\n")


def read_bits(path, bit_rate: float) -> BitStream:
    text = Path(path).read_text().rstrip("\n")
    for pos, ch in enumerate(text):
        if ch not in "01":
            raise ParseError(f"{path}: invalid bit character {ch!r} at position {pos}")
    bits = np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0") if text else np.zeros(0, np.uint8)
    return BitStream(bits, bit_rate)


def write_levels(signal: LineCodeSignal, path) -> None:
    """Serialize half-bit levels as '1'/'0' characters (1=high, 0=low)."""
    Path(path).write_text("".join(str(int(v)) for v in signal.levels) + "\n")


def read_levels(path, half_bit_duration: float) -> LineCodeSignal:
    text = Path(path).read_text().rstrip("\n")
    for pos, ch in enumerate(text):
        if ch not in "01":
            raise ParseError(f"{path}: invalid level character {ch!r} at position {pos}")
    levels = np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0") if text else np.zeros(0, np.uint8)
    return LineCodeSignal(levels.astype(np.int8), half_bit_duration)
