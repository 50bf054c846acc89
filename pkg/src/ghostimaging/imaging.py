"""Forward simulation and correlation reconstruction.

The bucket detector reads ``B = P^T T`` (one value per pattern) and the
image is recovered by second-order correlation ``G = (1/M) P B`` where ``M``
is the number of patterns.  Products are accumulated in float64 over row
blocks of ``P`` so the uint8 pattern matrix never has to be widened in full;
for integer-valued scenes every partial sum is an exact integer, so noiseless
results do not depend on the block size.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .exceptions import DegenerateRangeError, DimensionMismatchError, InvalidArgumentError
from .patterns import PSEUDO_HADAMARD, PatternMatrix

__all__ = [
    "Scene",
    "BucketSignal",
    "Reconstruction",
    "bucket_signal",
    "add_noise",
    "reconstruct",
    "hcgi_expected",
    "shcgi_expected",
    "normalize",
    "minmax",
    "mse",
    "evaluate",
]

# float64 elements per block when widening pattern rows
_BLOCK_ELEMENTS = 1 << 23


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Scene:
    """Transmittance image flattened row-major.

    Attributes:
        shape: ``(rows, cols)`` of the 2-D image.
        values: length ``rows * cols`` vector with entries in [0, 1].
    """

    shape: tuple[int, int]
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).reshape(-1)
        shape = tuple(int(s) for s in self.shape)
        if len(shape) != 2 or shape[0] * shape[1] != values.size:
            raise DimensionMismatchError(
                f"scene shape {shape} does not match {values.size} values"
            )
        if values.size and (values.min() < 0 or values.max() > 1):
            raise InvalidArgumentError("scene values must lie in [0, 1]")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "values", _readonly(values))

    @classmethod
    def from_image(cls, image) -> "Scene":
        image = np.asarray(image)
        return cls(image.shape, image.reshape(-1))

    @property
    def n_pixels(self) -> int:
        return self.values.size

    @property
    def is_binary(self) -> bool:
        return bool(np.all((self.values == 0) | (self.values == 1)))

    def image(self) -> np.ndarray:
        return self.values.reshape(self.shape)


@dataclass(frozen=True, eq=False)
class BucketSignal:
    """Detector readings, one per pattern."""

    values: np.ndarray
    noise_sigma: float = 0.0
    seed: object = None

    def __post_init__(self):
        if self.values.dtype != object:
            _readonly(self.values)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True, eq=False)
class Reconstruction:
    """Correlation image and, once evaluated, its normalized form and MSE.

    ``normalized`` omits pixel 0 when ``excluded_first`` is set.
    """

    raw: np.ndarray
    normalized: np.ndarray | None = None
    excluded_first: bool = False
    mse: float | None = None
    g_min: float | None = None
    g_max: float | None = None


def _entries(P) -> np.ndarray:
    return P.entries if isinstance(P, PatternMatrix) else np.asarray(P)


def _block_rows(m: int) -> int:
    return max(1, _BLOCK_ELEMENTS // max(m, 1))


def _as_fractions(v) -> np.ndarray:
    out = np.empty(len(v), dtype=object)
    for i, x in enumerate(v):
        out[i] = x if isinstance(x, Fraction) else Fraction(x)
    return out


def bucket_signal(P, scene, exact: bool = False) -> BucketSignal:
    """Noiseless bucket readings ``B[n] = <column n of P, T>``.

    Args:
        P: a :class:`PatternMatrix` or any 2-D array with patterns as columns
            (e.g. a +/-1 Hadamard matrix).
        scene: a :class:`Scene` or a plain vector ``T``.
        exact: compute with :class:`~fractions.Fraction` arithmetic.
    """
    e = _entries(P)
    t = scene.values if isinstance(scene, Scene) else np.asarray(scene)
    t = t.reshape(-1)
    if e.shape[0] != t.size:
        raise DimensionMismatchError(
            f"patterns have {e.shape[0]} pixels but the scene has {t.size}"
        )
    if exact:
        return BucketSignal(e.astype(object).T.dot(_as_fractions(t)))
    t = t.astype(np.float64)
    n, m = e.shape
    b = np.zeros(m, dtype=np.float64)
    step = _block_rows(m)
    for s in range(0, n, step):
        b += t[s:s + step] @ e[s:s + step].astype(np.float64)
    return BucketSignal(b)


def add_noise(B: BucketSignal, sigma: float, seed=None) -> BucketSignal:
    """Additive Gaussian detector noise relative to the mean reading.

    Each reading gets an independent ``Normal(0, (sigma * mean(B))**2)`` draw
    from ``default_rng(seed)``.  With ``sigma == 0`` or a zero mean signal the
    readings are returned unchanged.
    """
    if sigma < 0:
        raise InvalidArgumentError(f"sigma must be non-negative, got {sigma}")
    values = np.asarray(B.values, dtype=np.float64)
    scale = sigma * values.mean() if values.size else 0.0
    if scale == 0:
        return BucketSignal(values.copy(), noise_sigma=float(sigma), seed=seed)
    rng = np.random.default_rng(seed)
    noisy = values + rng.normal(0.0, abs(scale), size=values.size)
    return BucketSignal(noisy, noise_sigma=float(sigma), seed=seed)


def reconstruct(P, B, exact: bool = False) -> Reconstruction:
    """Second-order correlation ``G = (1/M) sum_n P[:, n] B[n]``.

    ``M`` is the number of patterns, which reduces to the familiar ``1/N``
    for square Hadamard sets and ``1/K`` for Special-Hadamard sets.
    """
    e = _entries(P)
    b = B.values if isinstance(B, BucketSignal) else np.asarray(B)
    n, m = e.shape
    if b.size != m:
        raise DimensionMismatchError(f"{m} patterns but {b.size} bucket readings")
    if exact:
        raw = e.astype(object).dot(_as_fractions(b)) / Fraction(m)
        return Reconstruction(raw)
    b = b.astype(np.float64)
    g = np.empty(n, dtype=np.float64)
    step = _block_rows(m)
    for s in range(0, n, step):
        g[s:s + step] = e[s:s + step].astype(np.float64) @ b
    return Reconstruction(g / m)


def _oracle_input(T) -> np.ndarray:
    t = np.asarray(T)
    if t.dtype == object:
        return _as_fractions(t)
    return t.astype(np.float64)


def hcgi_expected(T) -> np.ndarray:
    """Closed-form noiseless reconstruction for pseudo-Hadamard patterns.

    ``G[0] = (sum(T) + T[0]) / 2`` and ``G[k] = (sum(T) + T[0]) / 4 + T[k] / 4``.
    Works on float arrays and on object arrays of fractions.
    """
    t = _oracle_input(T)
    offset = (t.sum() + t[0]) / 4
    g = offset + t / 4
    g[0] = (t.sum() + t[0]) / 2
    return g


def shcgi_expected(T) -> np.ndarray:
    """Closed-form noiseless reconstruction for Special-Hadamard patterns:
    ``G = sum(T) / 4 + T / 4``, an affine image of ``T``."""
    t = _oracle_input(T)
    return t.sum() / 4 + t / 4


def normalize(G, exclude_first: bool = False) -> tuple[np.ndarray, float, float]:
    """Min-max normalization ``(G - G_min) / (G_max - G_min)``.

    With ``exclude_first`` the maximum is taken over pixels 1.. while the
    minimum still runs over every pixel, and pixel 0 is dropped from the
    output.

    Returns:
        ``(g, g_min, g_max)``.

    Raises:
        DegenerateRangeError: ``g_max == g_min``.
    """
    g = np.asarray(G, dtype=np.float64).reshape(-1)
    if exclude_first:
        if g.size < 2:
            raise DimensionMismatchError("need at least 2 pixels to exclude the first")
        g_min, g_max = float(g.min()), float(g[1:].max())
        kept = g[1:]
    else:
        if g.size < 1:
            raise DimensionMismatchError("empty reconstruction")
        g_min, g_max = float(g.min()), float(g.max())
        kept = g
    if not g_max > g_min:
        raise DegenerateRangeError(
            f"cannot normalize a constant image (G_min = G_max = {g_min})"
        )
    out = np.clip((kept - g_min) / (g_max - g_min), 0.0, 1.0)
    return out, g_min, g_max


def minmax(T) -> np.ndarray:
    t = np.asarray(T, dtype=np.float64)
    return (t - t.min()) / (t.max() - t.min())


def mse(g, T, exclude_first: bool = False) -> float:
    """Mean squared error between a normalized image and the scene."""
    g = np.asarray(g, dtype=np.float64).reshape(-1)
    t = np.asarray(T, dtype=np.float64).reshape(-1)
    if exclude_first:
        t = t[1:]
    if g.size != t.size:
        raise DimensionMismatchError(f"lengths differ: {g.size} vs {t.size}")
    return float(np.mean((g - t) ** 2))


def evaluate(recon: Reconstruction, T, exclude_first: bool = False) -> Reconstruction:
    """Fill in the normalized image and MSE of a raw reconstruction."""
    g, g_min, g_max = normalize(recon.raw, exclude_first)
    return replace(
        recon,
        normalized=g,
        excluded_first=exclude_first,
        mse=mse(g, T, exclude_first),
        g_min=g_min,
        g_max=g_max,
    )


def default_exclude_first(P) -> bool:
    return isinstance(P, PatternMatrix) and P.kind == PSEUDO_HADAMARD
