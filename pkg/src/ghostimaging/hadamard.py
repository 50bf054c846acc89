"""Hadamard matrices for every order in {2^i, 12*2^i, 20*2^i}.

Orders that are powers of two come from Sylvester doubling.  The 12 and 20
families start from a Paley type-I matrix (q = 11 and q = 19) and are then
doubled with the same Sylvester step, so the whole admissible set is covered
constructively and deterministically.

All matrices are returned as read-only ``int8`` arrays in normalized form:
row 0 and column 0 are all +1.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .exceptions import InvalidOrderError, SizeLimitError

__all__ = [
    "BASE_ORDERS",
    "MAX_ORDER",
    "valid_orders",
    "is_valid_order",
    "factor_order",
    "nearest_orders",
    "sylvester",
    "paley",
    "hadamard",
    "hadamard_rows",
    "verify_hadamard",
    "to_text",
]

#: Odd-free base orders of the admissible families and the Paley prime for each.
BASE_ORDERS = {1: None, 12: 11, 20: 19}

#: Default cap on the matrix dimension; guards against accidental exhaustion.
MAX_ORDER = 1 << 16


def valid_orders(limit: int) -> list[int]:
    """Return every admissible order ``n <= limit`` in increasing order.

    Examples:
        >>> valid_orders(24)
        [1, 2, 4, 8, 12, 16, 20, 24]
    """
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    members = set()
    for base in BASE_ORDERS:
        n = base
        while n <= limit:
            members.add(n)
            n *= 2
    return sorted(members)


def _split(order) -> tuple[int, int] | None:
    if isinstance(order, (bool, np.bool_)):
        return None
    try:
        if int(order) != order or order < 1:
            return None
    except (TypeError, ValueError):
        return None
    n, i = int(order), 0
    while n % 2 == 0 and n not in BASE_ORDERS:
        n //= 2
        i += 1
    return (n, i) if n in BASE_ORDERS else None


def factor_order(order: int) -> tuple[int, int]:
    """Split ``order`` into ``(base, i)`` with ``order == base * 2**i``.

    Raises:
        InvalidOrderError: if ``order`` is not admissible.
    """
    split = _split(order)
    if split is None:
        raise InvalidOrderError(_invalid_message(order))
    return split


def is_valid_order(order: int) -> bool:
    return _split(order) is not None


def nearest_orders(order: int) -> tuple[int | None, int]:
    """Closest admissible orders below and above ``order``.

    The lower neighbour is ``None`` when ``order <= 1``.
    """
    order = max(int(order), 0)
    lower = None
    if order > 1:
        lower = [n for n in valid_orders(order) if n < order]
        lower = lower[-1] if lower else None
    upper = order + 1
    while not is_valid_order(upper):
        upper += 1
    return lower, upper


def _invalid_message(order) -> str:
    try:
        lower, upper = nearest_orders(int(order))
    except (TypeError, ValueError):
        return f"order {order!r} is not an admissible Hadamard order"
    return (
        f"order {order} is not an admissible Hadamard order "
        f"(nearest valid orders: {lower}, {upper})"
    )


def _check_cap(order: int, max_order: int | None) -> None:
    cap = MAX_ORDER if max_order is None else max_order
    if order > cap:
        raise SizeLimitError(f"order {order} exceeds the size cap {cap}")


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _double(h: np.ndarray) -> np.ndarray:
    return np.block([[h, h], [h, -h]])


def sylvester(k: int, max_order: int | None = None) -> np.ndarray:
    """Sylvester matrix of order ``2**k``.

    ``H(1) = [+1]`` and ``H(2n) = [[H(n), H(n)], [H(n), -H(n)]]``.

    Raises:
        SizeLimitError: if ``2**k`` exceeds the size cap.
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    _check_cap(1 << k, max_order)
    h = np.ones((1, 1), dtype=np.int8)
    for _ in range(k):
        h = _double(h)
    return _freeze(h)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def paley(q: int, max_order: int | None = None) -> np.ndarray:
    """Normalized Paley type-I matrix of order ``q + 1``.

    Built as ``I + C`` with ``C = [[0, 1], [-1, Q]]`` and ``Q`` the Jacobsthal
    matrix of the quadratic character on GF(q); rows 1..q are then negated so
    that column 0 is all +1.

    Args:
        q: prime with ``q % 4 == 3``.
    """
    if not _is_prime(q) or q % 4 != 3:
        raise ValueError(f"q must be a prime congruent to 3 mod 4, got {q}")
    _check_cap(q + 1, max_order)
    chi = np.full(q, -1, dtype=np.int8)
    chi[0] = 0
    chi[np.unique(np.arange(1, q) ** 2 % q)] = 1
    idx = np.arange(q)
    jacobsthal = chi[(idx[None, :] - idx[:, None]) % q]

    h = np.empty((q + 1, q + 1), dtype=np.int8)
    h[0, :] = 1
    h[1:, 0] = -1
    h[1:, 1:] = jacobsthal + np.eye(q, dtype=np.int8)
    h[1:, :] *= -1
    return _freeze(h)


@lru_cache(maxsize=None)
def _base_matrix(base: int) -> np.ndarray:
    q = BASE_ORDERS[base]
    return sylvester(0) if q is None else paley(q)


def hadamard(order: int, max_order: int | None = None) -> np.ndarray:
    """Normalized Hadamard matrix of an admissible order.

    The order is factored as ``base * 2**i``; the base comes from
    :func:`sylvester` or :func:`paley` and is doubled ``i`` times.

    Raises:
        InvalidOrderError: ``order`` is not in the admissible set; the message
            names the nearest valid orders.
        SizeLimitError: ``order`` exceeds the size cap.
    """
    base, i = factor_order(order)
    _check_cap(int(order), max_order)
    h = _base_matrix(base).copy()
    for _ in range(i):
        h = _double(h)
    return _freeze(h)


@lru_cache(maxsize=32)
def _sylvester_table(k: int) -> np.ndarray:
    return sylvester(k, max_order=1 << k)


def _sylvester_rows(k: int, rows: np.ndarray) -> np.ndarray:
    # H(2^k) = kron(H(2^hi), H(2^lo)); two small tables instead of the full matrix.
    hi = k // 2
    lo = k - hi
    t_hi = _sylvester_table(hi)
    t_lo = _sylvester_table(lo)
    out = t_hi[rows >> lo][:, :, None] * t_lo[rows & ((1 << lo) - 1)][:, None, :]
    return out.reshape(len(rows), 1 << k)


def hadamard_rows(
    order: int,
    rows,
    max_order: int | None = None,
    chunk: int = 512,
) -> np.ndarray:
    """Selected rows of ``hadamard(order)`` without building the full matrix.

    Doubling ``i`` times is a Kronecker product with the Sylvester matrix, so
    row ``r`` equals ``kron(sylvester(i)[r // base], base_matrix[r % base])``.
    The result is bit-identical to ``hadamard(order)[rows]``.
    """
    base, i = factor_order(order)
    _check_cap(int(order), max_order)
    rows = np.asarray(rows, dtype=np.int64).reshape(-1)
    if rows.size and (rows.min() < 0 or rows.max() >= order):
        raise IndexError(f"row indices must lie in [0, {order})")
    b = _base_matrix(base)
    out = np.empty((rows.size, int(order)), dtype=np.int8)
    for start in range(0, rows.size, chunk):
        r = rows[start:start + chunk]
        syl = _sylvester_rows(i, r // base)
        block = syl[:, :, None] * b[r % base][:, None, :]
        out[start:start + chunk] = block.reshape(len(r), int(order))
    return out


def verify_hadamard(h) -> bool:
    """True iff ``h`` is square, has entries in {-1, +1} and ``h h^T = n I``.

    The Gram product is computed in 64-bit integers, so the check is exact.
    """
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.size == 0:
        return False
    if not np.all((h == 1) | (h == -1)):
        return False
    hi = h.astype(np.int64)
    n = h.shape[0]
    return bool(np.array_equal(hi @ hi.T, n * np.eye(n, dtype=np.int64)))


def to_text(h) -> str:
    """Render as a grid of ``+``/``-`` characters, one row per line."""
    h = np.asarray(h)
    return "\n".join("".join("+" if v > 0 else "-" for v in row) for row in h)
