"""Projector-ready {0, 1} pattern matrices.

A :class:`PatternMatrix` is laid out pixels x measurements: column ``n``,
reshaped row-major to the scene shape, is the ``n``-th projected pattern.

Randomness uses numpy's ``PCG64`` bit generator via
``numpy.random.default_rng(seed)``; the exact draws are documented on each
generator so pattern sets can be regenerated from the seed alone.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exceptions import DimensionMismatchError, InvalidArgumentError
from .hadamard import factor_order, hadamard, hadamard_rows
from .pgm import write_pgm

PSEUDO_HADAMARD = "pseudo_hadamard"
SPECIAL_HADAMARD = "special_hadamard"
RANDOM_BINARY = "random_binary"
KINDS = (PSEUDO_HADAMARD, SPECIAL_HADAMARD, RANDOM_BINARY)

# explicit rank check only below this many entries; above it the structure
# argument (distinct non-first rows of a verified matrix) is relied upon
_RANK_CHECK_LIMIT = 1 << 18


@dataclass(frozen=True, eq=False)
class PatternMatrix:
    """Binary pattern matrix with provenance metadata.

    Attributes:
        kind: one of ``pseudo_hadamard``, ``special_hadamard``, ``random_binary``.
        entries: read-only ``uint8`` array of shape ``(rows, cols)``.
        seed: RNG seed for the random kinds, else ``None``.
        source_rows: rows of the parent pseudo-Hadamard matrix picked for a
            Special-Hadamard matrix, in selection order.
    """

    kind: str
    entries: np.ndarray
    seed: int | None = None
    source_rows: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown pattern kind {self.kind!r}")
        e = self.entries
        if e.ndim != 2 or e.dtype != np.uint8:
            raise InvalidArgumentError("entries must be a 2-D uint8 array")
        if e.size and e.max() > 1:
            raise InvalidArgumentError("pattern entries must be 0 or 1")
        e.flags.writeable = False

    @property
    def rows(self) -> int:
        """Pixel count N."""
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        """Measurement count (K for Special-Hadamard)."""
        return self.entries.shape[1]

    def manifest(self) -> dict:
        out = {"kind": self.kind, "rows": self.rows, "cols": self.cols, "seed": self.seed}
        if self.kind == SPECIAL_HADAMARD:
            out["K"] = self.cols
            out["N"] = self.rows
            out["source_rows"] = [int(r) for r in self.source_rows]
        return out


def to_pseudo(h) -> PatternMatrix:
    """Map a +/-1 Hadamard matrix to {0, 1} via ``(h + 1) / 2``."""
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatchError("Hadamard matrix must be square")
    return PatternMatrix(PSEUDO_HADAMARD, ((h + 1) // 2).astype(np.uint8))


def pseudo_hadamard(order: int) -> PatternMatrix:
    return to_pseudo(hadamard(order))


def special_hadamard(K: int, N: int, seed=None) -> PatternMatrix:
    """Special-Hadamard matrix: ``N`` random non-first rows of the order-``K``
    pseudo-Hadamard matrix.

    Rows are drawn uniformly without replacement with
    ``default_rng(seed).choice(K - 1, size=N, replace=False) + 1``.

    Raises:
        InvalidOrderError: ``K`` is not an admissible order.
        InvalidArgumentError: ``N`` outside ``[1, K - 1]``; fewer than ``N``
            independent rows would leave the image under-determined.
    """
    factor_order(K)
    if not 1 <= N <= K - 1:
        raise InvalidArgumentError(
            f"N={N} pixels needs 1 <= N <= K-1={K - 1}; "
            "too few independent patterns would give an incomplete image"
        )
    rng = np.random.default_rng(seed)
    source = rng.choice(K - 1, size=N, replace=False) + 1
    entries = hadamard_rows(K, source)
    entries += 1
    entries >>= 1
    entries = entries.view(np.uint8)
    _assert_full_row_rank(entries, source, K)
    source.flags.writeable = False
    return PatternMatrix(SPECIAL_HADAMARD, entries, seed=seed, source_rows=source)


def _assert_full_row_rank(entries: np.ndarray, source: np.ndarray, K: int) -> None:
    # Distinct rows >= 1 of a normalized pseudo-Hadamard matrix have Gram
    # (K/4)(I + J), which is nonsingular; the explicit rank is a cheap
    # cross-check on small inputs only.
    if len(np.unique(source)) != len(source) or source.min() < 1 or source.max() >= K:
        raise AssertionError("Special-Hadamard rows must be distinct and non-first")
    if entries.size <= _RANK_CHECK_LIMIT:
        rank = np.linalg.matrix_rank(entries.astype(np.float64))
        if rank != entries.shape[0]:
            raise AssertionError(f"Special-Hadamard rank {rank} < {entries.shape[0]}")


def random_binary(N: int, M: int, seed=None) -> PatternMatrix:
    """I.i.d. Bernoulli(1/2) patterns.

    Draws ``ceil(N*M/8)`` bytes with ``default_rng(seed).integers(0, 256,
    dtype=uint8)`` and unpacks them big-endian bit first, filling the matrix
    row-major.
    """
    if N < 1 or M < 1:
        raise InvalidArgumentError(f"N and M must be >= 1, got N={N}, M={M}")
    rng = np.random.default_rng(seed)
    nbytes = -(-N * M // 8)
    raw = rng.integers(0, 256, size=nbytes, dtype=np.uint8)
    bits = np.unpackbits(raw, count=N * M)
    return PatternMatrix(RANDOM_BINARY, bits.reshape(N, M), seed=seed)


def make_patterns(kind: str, n_pixels: int, count: int, seed=None) -> PatternMatrix:
    """Dispatch on ``kind``; ``count`` is the number of measurements."""
    if kind == PSEUDO_HADAMARD:
        if count != n_pixels:
            raise InvalidArgumentError(
                f"pseudo-Hadamard needs count == pixel count ({n_pixels}), got {count}"
            )
        return pseudo_hadamard(count)
    if kind == SPECIAL_HADAMARD:
        return special_hadamard(count, n_pixels, seed)
    if kind == RANDOM_BINARY:
        return random_binary(n_pixels, count, seed)
    raise InvalidArgumentError(f"unknown pattern kind {kind!r}")


def pattern_image(P: PatternMatrix, index: int, shape: tuple[int, int]) -> np.ndarray:
    """Column ``index`` reshaped row-major to ``shape``."""
    n1, n2 = shape
    if n1 * n2 != P.rows:
        raise DimensionMismatchError(f"shape {shape} does not hold {P.rows} pixels")
    if not 0 <= index < P.cols:
        raise IndexError(f"pattern index {index} out of range [0, {P.cols})")
    return P.entries[:, index].reshape(n1, n2)


def gram(P, exact: bool = False) -> np.ndarray:
    """``(1/M) P P^T`` with ``M`` the number of patterns.

    With ``exact=True`` the result is an object array of
    :class:`fractions.Fraction`; meant for small matrices.
    """
    e = P.entries if isinstance(P, PatternMatrix) else np.asarray(P)
    m = e.shape[1]
    counts = e.astype(np.int64) @ e.T.astype(np.int64)
    if not exact:
        return counts / m
    out = np.empty(counts.shape, dtype=object)
    for idx, v in np.ndenumerate(counts):
        out[idx] = Fraction(int(v), m)
    return out


def save_patterns(P: PatternMatrix, output_dir, shape: tuple[int, int] | None = None) -> list[str]:
    """Write one 0/255 graymap per pattern plus ``manifest.json``.

    ``shape`` defaults to a single row of ``P.rows`` pixels.
    """
    shape = tuple(shape) if shape is not None else (1, P.rows)
    if shape[0] * shape[1] != P.rows:
        raise DimensionMismatchError(f"shape {shape} does not hold {P.rows} pixels")
    os.makedirs(output_dir, exist_ok=True)
    width = max(4, len(str(P.cols - 1)))
    paths = []
    for n in range(P.cols):
        path = os.path.join(output_dir, f"pattern_{n:0{width}d}.pgm")
        paths.append(write_pgm(path, pattern_image(P, n, shape) * 255))
    manifest = dict(P.manifest(), shape=list(shape), files=[os.path.basename(p) for p in paths])
    with open(os.path.join(output_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths
