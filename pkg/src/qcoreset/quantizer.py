"""Rounding-based scalar quantizer and its worst-case displacement bound."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import DEFAULT_B0, DEFAULT_ME
from .errors import ConfigurationError, DomainError

DOMAIN_SLACK = 1e-9


@dataclass(frozen=True)
class QuantizerSpec:
    b: int
    me: int = DEFAULT_ME
    b0: int = DEFAULT_B0

    def __post_init__(self):
        if self.b < 1 + self.me or self.b > self.b0:
            raise ConfigurationError(
                f"bit width {self.b} outside [{1 + self.me}, {self.b0}] for me={self.me}"
            )

    @property
    def s(self) -> int:
        """Significant digits kept after the implicit leading one."""
        return self.b - 1 - self.me


def _round_scalar(x: float, s: int) -> float:
    if x == 0.0 or s >= 52:
        return x
    mant, e = math.frexp(abs(x))
    exponent = e - 1
    scaled = math.ldexp(abs(x), s - exponent)  # in [2**s, 2**(s+1)), exact
    mag = math.ldexp(math.floor(scaled + 0.5), exponent - s)
    return -mag if x < 0 else mag


def quantize_scalar(x: float, spec) -> float:
    """Round ``x`` to ``spec.s`` significant digits, ties away from zero.

    A carry out of the significand (1.11 -> 10.0) simply bumps the exponent.
    """
    s = spec.s if isinstance(spec, QuantizerSpec) else int(spec)
    return _round_scalar(float(x), s)


def round_significand(values, s) -> np.ndarray:
    """Vectorized rounding of ``values`` to ``s`` significant digits.

    ``s`` may be a scalar or an array broadcastable against ``values``.
    """
    values = np.asarray(values, dtype=np.float64)
    s = np.asarray(s, dtype=np.int64)
    mag = np.abs(values)
    _, e = np.frexp(mag)
    exponent = e.astype(np.int64) - 1
    scaled = np.ldexp(mag, (s - exponent).astype(np.int32))
    rounded = np.ldexp(np.floor(scaled + 0.5), (exponent - s).astype(np.int32))
    out = np.where((mag == 0) | (s >= 52), mag, rounded)
    return np.copysign(out, values)


def quantize_points(points, spec: QuantizerSpec) -> np.ndarray:
    """Entrywise :func:`quantize_scalar` over a matrix in the normalized domain."""
    points = np.asarray(points, dtype=np.float64)
    if points.size and np.abs(points).max() > 1.0 + DOMAIN_SLACK:
        raise DomainError(f"entry {np.abs(points).max()!r} outside [-1, 1]")
    if spec.s >= 52:
        return points.copy()
    return round_significand(points, spec.s)


def delta_from_norm(b: int, max_norm: float, me: int = DEFAULT_ME, b0: int = DEFAULT_B0) -> float:
    if b < 1 + me or b > b0:
        raise ConfigurationError(f"bit width {b} outside [{1 + me}, {b0}]")
    return math.ldexp(float(max_norm), -(b - 1 - me))


def delta_bound(b: int, dataset) -> float:
    """Largest displacement ``2**-(b-1-me) * max_norm`` a b-bit quantization can cause."""
    return delta_from_norm(b, dataset.max_norm, dataset.me, dataset.b0)


class RoundingQuantizer:
    """The (quantize, displacement bound) pair the optimizer plugs in.

    Another scalar or vector quantizer can stand in as long as it offers the
    same two methods.
    """

    name = "rounding"

    def quantize_points(self, points, b, me=DEFAULT_ME, b0=DEFAULT_B0):
        return quantize_points(points, QuantizerSpec(b, me, b0))

    def delta_bound(self, b, dataset):
        return delta_bound(b, dataset)
