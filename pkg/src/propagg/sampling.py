"""Counter-addressed random sampling of item batches.

Every random draw in this package is addressed, not sequential: a 128-bit
Philox key is formed from ``(master_seed, stream_id)`` and each logical draw
site owns a disjoint 256-bit counter block.  Item ``index`` of a stream uses
counter ``[0, 0, index, lane]``, so any item can be regenerated in isolation
and parallel or serial evaluation orders produce identical samples.  Batch
``b`` of size ``m`` contains exactly the items with indices
``b*m, ..., b*m + m - 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .core import FloatArray, unit_vector

_MASK64 = (1 << 64) - 1

# Gaussian draws are clipped at +/- this many standard deviations so that all
# sampled items are finite and bounded.
GAUSS_CLIP_SIGMA = 38.0


@dataclass(frozen=True)
class SeedSpec:
    """A (master_seed, stream_id) pair naming one independent random stream."""

    master_seed: int
    stream_id: int = 0

    def key(self) -> np.ndarray:
        return np.array(
            [self.master_seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64
        )


def generator_at(spec: SeedSpec, index: int, lane: int = 0) -> np.random.Generator:
    """Fresh generator positioned at the counter block for one draw site.

    Draws from the returned generator advance only the low counter word, so
    distinct ``(index, lane)`` blocks can never overlap.
    """
    counter = np.zeros(4, dtype=np.uint64)
    counter[2] = index & _MASK64
    counter[3] = lane & _MASK64
    return np.random.Generator(np.random.Philox(key=spec.key(), counter=counter))


@dataclass(frozen=True)
class UniformSphere:
    """Uniform distribution on the unit sphere in R^dim."""

    dim: int

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be >= 1")


@dataclass(frozen=True)
class IsotropicGaussian:
    """Isotropic normal items in R^dim with scale ``sigma`` (not normalized)."""

    dim: int
    sigma: float = 1.0

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not (self.sigma > 0.0 and np.isfinite(self.sigma)):
            raise ValueError("sigma must be positive and finite")


@dataclass(frozen=True)
class Acg:
    """Angular central Gaussian on the sphere, concentrated around +/- axis.

    An item is ``x = z / ||z||`` with ``z ~ N(0, lam*I + (1-lam)*v v^T)`` for
    the unit axis ``v``.  The covariance square root has the closed form
    ``sqrt(lam)*I + (1-sqrt(lam))*v v^T``, so no matrix decomposition is
    needed.  ``lam = 1`` reproduces UniformSphere draws exactly (same stream,
    same outputs); small ``lam`` concentrates mass near the +/- axis poles.
    """

    axis: tuple[float, ...]
    lam: float

    def __post_init__(self) -> None:
        axis = unit_vector(np.asarray(self.axis, dtype=np.float64))
        if not (0.0 < self.lam <= 1.0):
            raise ValueError("lam must lie in (0, 1]")
        object.__setattr__(self, "axis", tuple(float(a) for a in axis))

    @property
    def dim(self) -> int:
        return len(self.axis)

    def axis_array(self) -> FloatArray:
        return np.asarray(self.axis, dtype=np.float64)


ItemDistribution = Union[UniformSphere, IsotropicGaussian, Acg]


def _item_from_generator(dist: ItemDistribution, g: np.random.Generator) -> FloatArray:
    z = np.clip(g.standard_normal(dist.dim), -GAUSS_CLIP_SIGMA, GAUSS_CLIP_SIGMA)
    if isinstance(dist, IsotropicGaussian):
        return dist.sigma * z
    if isinstance(dist, Acg):
        v = dist.axis_array()
        rl = np.sqrt(dist.lam)
        z = rl * z + (1.0 - rl) * v * float(v @ z)
    n = float(np.linalg.norm(z))
    if n <= 1e-300:  # astronomically unlikely; keep the output well defined
        out = np.zeros(dist.dim)
        out[0] = 1.0
        return out
    return z / n


def sample_item(dist: ItemDistribution, spec: SeedSpec, index: int) -> FloatArray:
    """Sample the item owned by ``index`` on the stream named by ``spec``."""
    if index < 0:
        raise ValueError("index must be >= 0")
    return _item_from_generator(dist, generator_at(spec, index))


def sample_batch(
    dist: ItemDistribution, m: int, spec: SeedSpec, batch_index: int
) -> FloatArray:
    """Sample batch ``batch_index`` of ``m`` items as an (m, dim) array.

    Row ``j`` equals ``sample_item(dist, spec, batch_index*m + j)``; disjoint
    batch indices therefore share no generator state.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if batch_index < 0:
        raise ValueError("batch_index must be >= 0")
    base = batch_index * m
    key = spec.key()
    counter = np.zeros(4, dtype=np.uint64)
    out = np.empty((m, dist.dim), dtype=np.float64)
    # One bit generator, repositioned per item: cheaper than m fresh objects
    # and bit-identical to sample_item (the counter block fully determines
    # the stream).
    bg = np.random.Philox(key=key)
    state = bg.state
    for j in range(m):
        counter[2] = (base + j) & _MASK64
        state["state"]["counter"] = counter.copy()
        state["buffer_pos"] = 4  # discard any buffered outputs
        bg.state = state
        out[j] = _item_from_generator(dist, np.random.Generator(bg))
    return out


_DIST_RE = re.compile(r"^\s*([a-zA-Z-]+)\s*(?::(.*))?$")


def parse_distribution(text: str, dim: int) -> ItemDistribution:
    """Parse a distribution descriptor string.

    Accepted forms::

        uniform-sphere
        gaussian:sigma=1.0
        acg:lambda=0.1,axis=30deg          (dim 2 only: axis by angle)
        acg:lambda=0.1,axis=1|0|0          (general dim: coordinates, '|'-separated)
    """
    match = _DIST_RE.match(text)
    if not match:
        raise ValueError(f"unrecognized distribution spec: {text!r}")
    kind = match.group(1).lower()
    params: dict[str, str] = {}
    body = match.group(2)
    if body:
        for part in body.split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise ValueError(f"malformed parameter {part!r} in {text!r}")
            k, v = part.split("=", 1)
            params[k.strip().lower()] = v.strip()
    if kind == "uniform-sphere":
        if params:
            raise ValueError("uniform-sphere takes no parameters")
        return UniformSphere(dim)
    if kind == "gaussian":
        sigma = float(params.pop("sigma", "1.0"))
        if params:
            raise ValueError(f"unknown gaussian parameters: {sorted(params)}")
        return IsotropicGaussian(dim, sigma)
    if kind == "acg":
        if "lambda" not in params:
            raise ValueError("acg requires lambda=<value in (0,1]>")
        lam = float(params.pop("lambda"))
        axis_text = params.pop("axis", None)
        if params:
            raise ValueError(f"unknown acg parameters: {sorted(params)}")
        if axis_text is None:
            raise ValueError("acg requires axis=<angle>deg (dim 2) or axis=c0|c1|...")
        if axis_text.endswith("deg"):
            if dim != 2:
                raise ValueError("angle-valued axis is only defined for dim 2")
            ang = np.deg2rad(float(axis_text[: -len("deg")]))
            axis = np.array([np.cos(ang), np.sin(ang)])
        else:
            axis = np.array([float(c) for c in axis_text.split("|")])
            if axis.shape[0] != dim:
                raise ValueError(
                    f"axis has {axis.shape[0]} coordinates but dim is {dim}"
                )
        return Acg(tuple(axis), lam)
    raise ValueError(f"unknown distribution kind: {kind!r}")


def distribution_label(dist: ItemDistribution) -> str:
    """Canonical descriptor string for manifests and logs."""
    if isinstance(dist, UniformSphere):
        return "uniform-sphere"
    if isinstance(dist, IsotropicGaussian):
        return f"gaussian:sigma={dist.sigma!r}"
    if isinstance(dist, Acg):
        axis = "|".join(repr(a) for a in dist.axis)
        return f"acg:lambda={dist.lam!r},axis={axis}"
    raise TypeError(f"not an item distribution: {dist!r}")
