"""Robust coreset construction (weighted k-means centers), quantization and bit accounting."""
from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .clustering import kmeans
from .data import DEFAULT_B0, DEFAULT_ME, Dataset
from .quantizer import QuantizerSpec, quantize_points


@dataclass(frozen=True)
class WeightedCoreset:
    points: np.ndarray
    weights: np.ndarray
    b: int
    me: int = DEFAULT_ME
    b0: int = DEFAULT_B0
    source_n: int = 0
    # largest distance from a source point to its representative, when known
    radius: float = None

    @property
    def k(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def bit_size(self) -> int:
        return bit_size(self)

    def to_json(self) -> str:
        # json writes floats with repr(), which round-trips every double exactly
        doc = {
            "k": self.k,
            "d": self.d,
            "b": self.b,
            "me": self.me,
            "points": self.points.tolist(),
            "weights": [float(w) for w in self.weights],
            "source_n": self.source_n,
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str, b0: int = DEFAULT_B0) -> "WeightedCoreset":
        doc = json.loads(text)
        d = int(doc["d"])
        points = np.array(doc["points"], dtype=np.float64).reshape(-1, d)
        if points.shape[0] != int(doc["k"]):
            raise ValueError(f"coreset file declares k={doc['k']} but has {points.shape[0]} points")
        return cls(
            points=points,
            weights=np.array(doc["weights"], dtype=np.float64),
            b=int(doc["b"]),
            me=int(doc["me"]),
            b0=b0,
            source_n=int(doc["source_n"]),
        )

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "WeightedCoreset":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def bit_size(coreset) -> int:
    """Transmitted size k * d * b; weights are not counted."""
    if coreset.k == 0:
        return 0
    return int(coreset.k * coreset.d * coreset.b)


def weight_bits(coreset) -> int:
    """Extra bits needed to ship the weights at full precision (informational)."""
    return int(coreset.k * coreset.b0)


def build_rcc(dataset: Dataset, k: int, seed: int = 0) -> WeightedCoreset:
    """k-means centers of ``dataset`` weighted by their cluster sizes, at full precision."""
    result = kmeans(dataset, k, seed)
    return WeightedCoreset(
        points=result.centers,
        weights=result.weights,
        b=dataset.b0,
        me=dataset.me,
        b0=dataset.b0,
        source_n=dataset.n,
        radius=result.max_distance(dataset.points),
    )


def apply_quantizer(coreset: WeightedCoreset, b: int) -> WeightedCoreset:
    spec = QuantizerSpec(b, coreset.me, coreset.b0)
    return replace(coreset, points=quantize_points(coreset.points, spec), b=b)


def merge(coresets) -> WeightedCoreset:
    """Union of per-node coresets; ``b`` is the widest member width.

    Members may use different widths, so account bits per member rather than
    through the merged ``bit_size``.
    """
    coresets = list(coresets)
    first = coresets[0]
    return WeightedCoreset(
        points=np.vstack([c.points for c in coresets]),
        weights=np.concatenate([c.weights for c in coresets]),
        b=max(c.b for c in coresets),
        me=first.me,
        b0=first.b0,
        source_n=sum(c.source_n for c in coresets),
    )
