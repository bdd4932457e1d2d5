"""Fixed-length barcode signatures and a leave-one-out nearest-neighbour harness."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import InvalidArgument
from .persistence import Barcode

DEFAULT_TOP_K = 10


@dataclass(frozen=True)
class SignatureVector:
    """Top-``k`` lifespans per degree, degrees concatenated in increasing order."""

    values: np.ndarray
    degrees: tuple
    k: int
    cap: float

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "degrees", tuple(self.degrees))

    def __len__(self):
        return self.values.size

    def block(self, degree: int) -> np.ndarray:
        i = self.degrees.index(degree)
        return self.values[i * self.k:(i + 1) * self.k]


def top_lifespans(barcode: Barcode, degrees: Sequence[int] = (0, 1), k: int = DEFAULT_TOP_K,
                  cap: float = math.inf) -> SignatureVector:
    """The ``k`` longest lifespans in each degree, zero-padded.

    Essential intervals count as ending at ``cap``.
    """
    if k < 1:
        raise InvalidArgument(f"k must be >= 1, got {k}")
    degrees = tuple(sorted(set(int(p) for p in degrees)))
    finite_deaths = [d for _, _, d in barcode.intervals if math.isfinite(d)]
    if finite_deaths and cap < max(finite_deaths):
        raise InvalidArgument(f"cap {cap} is below the largest finite death {max(finite_deaths)}")
    blocks = []
    for p in degrees:
        life = barcode.lifespans(p, cap)[:k]
        if np.any(~np.isfinite(life)):
            raise InvalidArgument("essential interval with an infinite cap")
        blocks.append(np.pad(life, (0, k - life.size)))
    values = np.concatenate(blocks) if blocks else np.zeros(0)
    return SignatureVector(values, degrees, k, cap)


def loo_nn_classify(signatures, labels, return_predictions: bool = False):
    """Leave-one-out 1-NN accuracy under Euclidean distance.

    Distance ties go to the smaller sample index.
    """
    X = np.array([s.values if isinstance(s, SignatureVector) else np.asarray(s, dtype=float)
                  for s in signatures], dtype=object)
    lengths = {len(x) for x in X}
    if len(lengths) > 1:
        raise InvalidArgument(f"signatures have different lengths: {sorted(lengths)}")
    X = np.array([np.asarray(x, dtype=float) for x in X])
    y = np.asarray(labels)
    if len(y) != len(X):
        raise InvalidArgument("one label per signature is required")
    if len(np.unique(y)) < 2:
        raise InvalidArgument("need at least two distinct labels")
    diff = X[:, None, :] - X[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(dist, np.inf)
    # argmin returns the first (smallest) index among ties
    pred = y[np.argmin(dist, axis=1)]
    acc = float(np.mean(pred == y))
    if return_predictions:
        return acc, pred
    return acc


def confusion_counts(labels, predictions) -> dict:
    """``{(true, predicted): count}`` for every observed pair."""
    out: dict = {}
    for t, p in zip(labels, predictions):
        key = (t.item() if hasattr(t, "item") else t, p.item() if hasattr(p, "item") else p)
        out[key] = out.get(key, 0) + 1
    return dict(sorted(out.items()))
