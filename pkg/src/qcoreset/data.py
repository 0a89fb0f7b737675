"""Dataset ingestion, normalization and the bit-level floating point model."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyInputError, ExponentUnderflow, InputParseError, NumericError

DEFAULT_B0 = 64
DEFAULT_ME = 11


@dataclass(frozen=True, eq=False)
class Dataset:
    """An n x d point matrix together with its storage precision.

    ``max_norm`` is the largest Euclidean row norm; it is recomputed from
    ``points`` when not supplied.
    """

    points: np.ndarray
    max_norm: float = None
    b0: int = DEFAULT_B0
    me: int = DEFAULT_ME
    source: str = field(default="", compare=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise EmptyInputError("dataset needs at least one row and one column")
        if not np.all(np.isfinite(pts)):
            raise NumericError("dataset contains non-finite values")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.max_norm is None:
            object.__setattr__(self, "max_norm", row_max_norm(pts))

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.b0, self.me, self.max_norm) == (other.b0, other.me, other.max_norm) and np.array_equal(
            self.points, other.points
        )

    __hash__ = None

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def nbits(self) -> int:
        """Size of the raw dataset in bits, n * d * b0."""
        return self.n * self.d * self.b0

    def subset(self, rows) -> "Dataset":
        """Rows ``rows`` as a new dataset with its own max_norm."""
        return Dataset(self.points[np.asarray(rows)], b0=self.b0, me=self.me, source=self.source)


def row_max_norm(points) -> float:
    points = np.asarray(points, dtype=np.float64)
    if points.size == 0:
        return 0.0
    return float(np.sqrt(np.einsum("ij,ij->i", points, points)).max())


def _parse_rows(lines, has_header):
    rows = []
    width = None
    reader = csv.reader(lines)
    for lineno, row in enumerate(reader, start=1):
        if has_header and lineno == 1:
            continue
        if not row or all(not c.strip() for c in row):
            continue
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InputParseError(f"expected {width} columns, found {len(row)}", line=lineno)
        try:
            values = [float(c) for c in row]
        except ValueError:
            raise InputParseError(f"non-numeric cell in {row!r}", line=lineno) from None
        if not all(math.isfinite(v) for v in values):
            raise InputParseError("non-finite cell", line=lineno)
        rows.append(values)
    if not rows:
        raise EmptyInputError("no data rows found")
    return np.array(rows, dtype=np.float64)


def sniff_header(path) -> bool:
    """True when the first row of ``path`` contains a non-numeric cell."""
    with open(path, newline="", encoding="utf-8") as fh:
        first = next(csv.reader(fh), [])
    for cell in first:
        try:
            float(cell)
        except ValueError:
            return True
    return False


def load_csv(path, has_header: bool = False) -> np.ndarray:
    """Parse a comma-separated file into an n x d float matrix (file row order)."""
    with open(path, newline="", encoding="utf-8") as fh:
        return _parse_rows(fh, has_header)


def parse_csv_text(text: str, has_header: bool = False) -> np.ndarray:
    return _parse_rows(text.splitlines(), has_header)


def normalize(raw, b0: int = DEFAULT_B0, me: int = DEFAULT_ME, source: str = "") -> Dataset:
    """Center every column on its mean, then divide by its largest absolute value.

    Constant columns become all zeros.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim == 1:
        raw = raw.reshape(-1, 1)
    if raw.size == 0:
        raise EmptyInputError("cannot normalize an empty matrix")
    if not np.all(np.isfinite(raw)):
        raise NumericError("matrix contains non-finite values")
    with np.errstate(over="ignore", invalid="ignore"):
        centered = raw - raw.mean(axis=0)
    if not np.all(np.isfinite(centered)):
        raise NumericError("column mean overflowed; rescale the input before loading")
    scale = np.abs(centered).max(axis=0)
    scale[scale == 0] = 1.0
    out = centered / scale
    # centering again removes the O(eps) mean left by the division
    out -= out.mean(axis=0)
    np.clip(out, -1.0, 1.0, out=out)
    return Dataset(out, b0=b0, me=me, source=source)


def load_dataset(path, has_header=None, b0: int = DEFAULT_B0, me: int = DEFAULT_ME) -> Dataset:
    if has_header is None:
        has_header = sniff_header(path)
    return normalize(load_csv(path, has_header), b0=b0, me=me, source=str(path))


def save_csv(points, path, header=None):
    points = np.asarray(points, dtype=np.float64)
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header:
            writer.writerow(header)
        for row in points:
            writer.writerow([repr(float(v)) for v in row])


# -- bit-level model -------------------------------------------------------


@dataclass(frozen=True)
class FloatCode:
    """Sign / exponent / significand decomposition of one nonzero attribute.

    ``digits[0]`` is the implicit leading 1; it is never stored, so the
    encoded width is ``1 + me + s``.
    """

    sign: int
    exponent: int
    digits: tuple
    s: int

    def value(self) -> float:
        frac = 0
        for j, a in enumerate(self.digits):
            if a:
                frac += 1 << (self.s - j)
        mag = math.ldexp(frac, self.exponent - self.s)
        return -mag if self.sign else mag

    def bit_width(self, me: int) -> int:
        return 1 + me + self.s


ZERO_CODE = None
"""Zero has no normalized decomposition; callers encode it as the all-zero word."""


def exponent_range(me: int):
    return -(1 << (me - 1)), (1 << (me - 1)) - 1


def decompose(x: float, me: int = DEFAULT_ME, b0: int = DEFAULT_B0, s: int = None) -> FloatCode:
    """Split ``x`` into sign, exponent and ``s`` significant digits (truncated).

    With the default ``s = b0 - 1 - me`` the decomposition is exact for every
    double in the normal range.
    """
    x = float(x)
    if not math.isfinite(x):
        raise NumericError(f"cannot decompose {x}")
    if x == 0.0:
        raise ValueError("zero has no normalized code; use the dedicated zero word")
    if s is None:
        s = b0 - 1 - me
    if s < 0:
        raise ValueError(f"negative significand width for b0={b0}, me={me}")
    mant, e = math.frexp(abs(x))
    exponent = e - 1
    lo, hi = exponent_range(me)
    if exponent < lo:
        raise ExponentUnderflow(f"exponent {exponent} below {lo}: {x!r} flushes to zero")
    if exponent > hi:
        raise NumericError(f"exponent {exponent} exceeds {hi}")
    # 53-bit integer significand, exact for every double
    sig = int(math.ldexp(mant, 53))
    bits = [(sig >> (52 - j)) & 1 for j in range(53)]
    if s + 1 <= 53:
        digits = tuple(bits[: s + 1])
    else:
        digits = tuple(bits) + (0,) * (s + 1 - 53)
    return FloatCode(sign=1 if x < 0 else 0, exponent=exponent, digits=digits, s=s)


def reconstruct(code) -> float:
    if code is ZERO_CODE:
        return 0.0
    return code.value()
