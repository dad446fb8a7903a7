"""Spherical geometry for linear scoring vectors and deterministic batch rankings.

A scoring vector is a unit vector ``theta`` in R^d; it scores an item ``x`` by
the inner product ``<theta, x>`` and ranks a batch of items by descending
score, breaking exact score ties by ascending item index.  Distances between
scoring vectors are geodesic (angular) distances on the unit sphere, with the
usual log/exp maps for tangent-space computations.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import comb
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

FloatArray = NDArray[np.float64]
ScoringVector = FloatArray

# Numerical guards.
ZERO_NORM_EPS = 1e-12       # below this a vector counts as zero
ANTIPODAL_MARGIN = 1e-9     # log_map is undefined within this margin of pi
TANGENT_ORTHO_TOL = 1e-6    # exp_map requires tangents orthogonal to this tolerance
UNIT_NORM_TOL = 1e-6        # profile rows must be unit vectors to this tolerance


class DimensionMismatchError(ValueError):
    """Operands have incompatible dimensions."""


class ZeroVectorError(ValueError):
    """A vector that must be nonzero has (numerically) zero norm."""


class AntipodalPairError(ValueError):
    """The log map is undefined for (numerically) antipodal vectors."""


class TieBreak(Enum):
    """Deterministic tie-break policies for equal scores."""

    BY_INDEX = "by-index"  # lower original item index ranks first


def unit_vector(v: Sequence[float] | FloatArray) -> FloatArray:
    """Return ``v`` scaled to unit length.

    Raises ZeroVectorError if ``v`` has norm <= ZERO_NORM_EPS.  A vector that
    is already unit length within 1e-12 is returned unscaled so that repeated
    normalization is bitwise idempotent.
    """
    v = np.asarray(v, dtype=np.float64)
    n = float(np.linalg.norm(v))
    if n <= ZERO_NORM_EPS:
        raise ZeroVectorError(f"cannot normalize vector with norm {n!r}")
    if abs(n - 1.0) < 1e-12:
        return v.copy()
    return v / n


def angular_distance(x: FloatArray, y: FloatArray) -> float:
    """Geodesic distance on the sphere between the directions of x and y.

    Defined for any nonzero vectors; the cosine is clamped to [-1, 1] before
    arccos so floating-point drift can never produce NaN.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"shape mismatch: {x.shape} vs {y.shape}")
    nx = float(np.linalg.norm(x))
    ny = float(np.linalg.norm(y))
    if nx == 0.0 or ny == 0.0:
        raise ZeroVectorError("angular distance requires nonzero vectors")
    c = float(np.dot(x, y) / (nx * ny))
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def score(theta: FloatArray, item: FloatArray) -> float:
    """Linear score ``<theta, item>``."""
    theta = np.asarray(theta, dtype=np.float64)
    item = np.asarray(item, dtype=np.float64)
    if theta.shape != item.shape:
        raise DimensionMismatchError(f"shape mismatch: {theta.shape} vs {item.shape}")
    return float(np.dot(theta, item))


@dataclass(frozen=True)
class Ranking:
    """A strict total order over a batch: ``order[0]`` is the top item.

    ``tie_events`` counts how many adjacent score equalities were broken by
    the index tie-break when the ranking was produced.
    """

    order: tuple[int, ...]
    tie_events: int = 0

    @property
    def m(self) -> int:
        return len(self.order)

    def positions(self) -> FloatArray:
        """positions()[item] == rank position of that item (0 = top)."""
        pos = np.empty(len(self.order), dtype=np.int64)
        pos[np.asarray(self.order, dtype=np.int64)] = np.arange(len(self.order))
        return pos


def order_to_positions(order: NDArray[np.int64]) -> NDArray[np.int64]:
    """Invert an order array (item indices by rank) into a position array."""
    order = np.asarray(order, dtype=np.int64)
    pos = np.empty_like(order)
    pos[order] = np.arange(order.shape[0], dtype=np.int64)
    return pos


def rank_batch(
    theta: FloatArray,
    items: FloatArray,
    tie_break: TieBreak = TieBreak.BY_INDEX,
) -> Ranking:
    """Rank a batch of items by descending linear score under ``theta``.

    Equal scores are broken by ascending item index (the only supported
    policy), so identical inputs always produce bit-identical rankings.
    Scaling ``theta`` by any positive constant leaves the ranking unchanged.
    """
    theta = np.asarray(theta, dtype=np.float64)
    items = np.asarray(items, dtype=np.float64)
    if items.ndim != 2:
        raise DimensionMismatchError("items must be a 2-D array of shape (m, d)")
    if items.shape[0] < 1:
        raise DimensionMismatchError("batch must contain at least one item")
    if theta.ndim != 1 or items.shape[1] != theta.shape[0]:
        raise DimensionMismatchError(
            f"items of dim {items.shape[1]} incompatible with theta of dim {theta.shape}"
        )
    if not (np.isfinite(theta).all() and np.isfinite(items).all()):
        raise ValueError("rank_batch requires finite scores (no NaN/inf inputs)")
    if not isinstance(tie_break, TieBreak):
        raise TypeError(f"unsupported tie_break: {tie_break!r}")
    scores = items @ theta
    # Stable argsort on negated scores: descending score, ties by low index.
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    ties = int(np.count_nonzero(sorted_scores[1:] == sorted_scores[:-1]))
    return Ranking(tuple(int(i) for i in order), ties)


def log_map(base: FloatArray, target: FloatArray) -> FloatArray:
    """Tangent vector at unit ``base`` pointing toward unit ``target``.

    The result is orthogonal to ``base`` with norm equal to the angular
    distance.  Undefined (raises AntipodalPairError) within 1e-9 of pi.
    """
    base = np.asarray(base, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    ang = angular_distance(base, target)
    if ang >= np.pi - ANTIPODAL_MARGIN:
        raise AntipodalPairError(f"log map undefined at angular distance {ang!r}")
    w = target - base * float(np.dot(base, target))
    nw = float(np.linalg.norm(w))
    if nw <= ZERO_NORM_EPS:
        return np.zeros_like(base)
    return w * (ang / nw)


def exp_map(base: FloatArray, tangent: FloatArray) -> FloatArray:
    """Geodesic step from unit ``base`` along a tangent vector.

    ``tangent`` must be orthogonal to ``base`` within 1e-6.  The zero tangent
    returns ``base``; otherwise the result is renormalized to unit length so
    that downstream angular distances stay exact.
    """
    base = np.asarray(base, dtype=np.float64)
    tangent = np.asarray(tangent, dtype=np.float64)
    if base.shape != tangent.shape:
        raise DimensionMismatchError(f"shape mismatch: {base.shape} vs {tangent.shape}")
    t = float(np.linalg.norm(tangent))
    if abs(float(np.dot(base, tangent))) > TANGENT_ORTHO_TOL * max(1.0, t):
        raise ValueError("exp_map requires a tangent orthogonal to the base point")
    if t == 0.0:
        return base.copy()
    out = np.cos(t) * base + np.sin(t) * (tangent / t)
    return unit_vector(out)


@dataclass(frozen=True)
class Profile:
    """A finite population of voter scoring vectors with positive weights.

    ``vectors`` has shape (n, d) with unit rows; ``weights`` has shape (n,),
    strictly positive, summing to 1.
    """

    vectors: FloatArray
    weights: FloatArray

    def __post_init__(self) -> None:
        vectors = np.asarray(self.vectors, dtype=np.float64)
        weights = np.asarray(self.weights, dtype=np.float64)
        if vectors.ndim != 2:
            raise DimensionMismatchError("vectors must have shape (n, d)")
        n, d = vectors.shape
        if n < 1 or d < 1:
            raise DimensionMismatchError("profile needs n >= 1 voters of dim d >= 1")
        if weights.shape != (n,):
            raise DimensionMismatchError(
                f"weights shape {weights.shape} does not match n={n}"
            )
        if not np.isfinite(vectors).all() or not np.isfinite(weights).all():
            raise ValueError("profile entries must be finite")
        norms = np.linalg.norm(vectors, axis=1)
        if np.any(np.abs(norms - 1.0) > UNIT_NORM_TOL):
            raise ValueError("profile rows must be unit vectors")
        if np.any(weights <= 0.0):
            raise ValueError("profile weights must be strictly positive")
        if abs(float(weights.sum()) - 1.0) > 1e-9:
            raise ValueError("profile weights must sum to 1")
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "weights", weights)

    @property
    def n(self) -> int:
        return int(self.vectors.shape[0])

    @property
    def d(self) -> int:
        return int(self.vectors.shape[1])


def make_profile(
    vectors: Sequence[Sequence[float]] | FloatArray,
    weights: Sequence[float] | FloatArray | None = None,
) -> Profile:
    """Build a Profile, normalizing rows to unit length and weights to sum 1.

    ``weights=None`` assigns the uniform weight 1/n to every voter.  Rows and
    weights already normalized are passed through untouched so that building
    a profile from saved data is bitwise faithful.
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2:
        raise DimensionMismatchError("vectors must have shape (n, d)")
    rows = np.stack([unit_vector(row) for row in vectors])
    n = rows.shape[0]
    if weights is None:
        w = np.full(n, 1.0 / n)
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (n,):
            raise DimensionMismatchError(f"weights shape {w.shape} does not match n={n}")
        if np.any(w <= 0.0):
            raise ValueError("weights must be strictly positive")
        total = float(w.sum())
        if abs(total - 1.0) > 1e-12:
            w = w / total
    return Profile(rows, w)


def pair_count(m: int) -> int:
    """Number of unordered item pairs in a batch of m items."""
    if m < 1:
        raise ValueError("batch size must be >= 1")
    return comb(m, 2)
