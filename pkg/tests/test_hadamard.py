import numpy as np
import pytest
from hypothesis import given, strategies as st

from ghostimaging.exceptions import InvalidOrderError, SizeLimitError
from ghostimaging.hadamard import (
    hadamard,
    hadamard_rows,
    is_valid_order,
    nearest_orders,
    paley,
    sylvester,
    to_text,
    valid_orders,
    verify_hadamard,
)


def _oracle_is_admissible(n):
    # odd part 1 for powers of two; 3 or 5 with at least 2^2 for 12*2^i, 20*2^i
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    return n == 1 or (n in (3, 5) and v >= 2)


@pytest.mark.parametrize("limit, expected", [
    (4, [1, 2, 4]),
    (24, [1, 2, 4, 8, 12, 16, 20, 24]),
    (48, [1, 2, 4, 8, 12, 16, 20, 24, 32, 40, 48]),
])
def test_valid_orders_examples(limit, expected):
    assert valid_orders(limit) == expected


@pytest.mark.parametrize("limit", [1, 7, 100, 1000, 5000])
def test_valid_orders_against_odd_part_oracle(limit):
    assert valid_orders(limit) == [n for n in range(1, limit + 1) if _oracle_is_admissible(n)]


@given(st.integers(1, 3000), st.integers(1, 3000))
def test_valid_orders_prefix(a, b):
    lo, hi = sorted((a, b))
    small, big = valid_orders(lo), valid_orders(hi)
    assert big[:len(small)] == small
    assert all(x < y for x, y in zip(big, big[1:]))


def test_valid_orders_rejects_nonpositive():
    with pytest.raises(ValueError):
        valid_orders(0)


def test_sylvester_small_cases():
    assert sylvester(0).tolist() == [[1]]
    assert sylvester(1).tolist() == [[1, 1], [1, -1]]
    h = sylvester(2)
    assert (h.astype(int) @ h.T.astype(int) == 4 * np.eye(4)).all()
    assert (h[0] == 1).all() and (h[:, 0] == 1).all()


def test_sylvester_size_cap():
    with pytest.raises(SizeLimitError):
        sylvester(5, max_order=16)
    with pytest.raises(SizeLimitError):
        hadamard(1 << 17)


@pytest.mark.parametrize("q", [3, 7, 11, 19, 23])
def test_paley_orthogonal(q):
    h = paley(q)
    assert h.shape == (q + 1, q + 1)
    assert verify_hadamard(h)
    assert (h[0] == 1).all() and (h[:, 0] == 1).all()


@pytest.mark.parametrize("q", [2, 5, 9, 13, 15])
def test_paley_rejects_bad_q(q):
    with pytest.raises(ValueError):
        paley(q)


@pytest.mark.parametrize("n", valid_orders(64))
def test_hadamard_every_order_to_64(n):
    h = hadamard(n)
    assert h.shape == (n, n) and h.dtype == np.int8
    assert verify_hadamard(h)
    assert (h[0] == 1).all() and (h[:, 0] == 1).all()


def test_hadamard_24_built_from_12():
    h = hadamard(24)
    h12 = hadamard(12)
    assert np.array_equal(h, np.block([[h12, h12], [h12, -h12]]))
    assert verify_hadamard(h)


def test_hadamard_is_deterministic_and_read_only():
    a, b = hadamard(40), hadamard(40)
    assert np.array_equal(a, b)
    with pytest.raises(ValueError):
        a[0, 0] = -1


@pytest.mark.parametrize("order, lower, upper", [(6, 4, 8), (6000, 5120, 6144), (3, 2, 4)])
def test_hadamard_invalid_order_names_neighbours(order, lower, upper):
    with pytest.raises(InvalidOrderError, match=f"{lower}, {upper}"):
        hadamard(order)
    assert nearest_orders(order) == (lower, upper)


@pytest.mark.parametrize("bad", [0, -4, 2.5, "8", True])
def test_invalid_order_types(bad):
    assert not is_valid_order(bad)
    with pytest.raises(InvalidOrderError):
        hadamard(bad)


@pytest.mark.parametrize("n", valid_orders(640))
def test_hadamard_rows_matches_full_matrix(n):
    rows = np.random.default_rng(n).permutation(n)
    assert np.array_equal(hadamard_rows(n, rows, chunk=7), hadamard(n)[rows])


def test_hadamard_rows_range_check():
    with pytest.raises(IndexError):
        hadamard_rows(8, [8])


def test_verify_hadamard_examples():
    h = sylvester(3)
    assert verify_hadamard(h)
    assert not verify_hadamard(np.ones((2, 2), dtype=int))
    assert not verify_hadamard(np.ones((2, 3), dtype=int))
    assert not verify_hadamard(np.zeros((0, 0)))
    assert not verify_hadamard(2 * h)


def test_verify_hadamard_any_single_flip_fails():
    h = sylvester(3)
    for i in range(8):
        for j in range(8):
            g = h.copy()
            g[i, j] = -g[i, j]
            assert not verify_hadamard(g)


def test_to_text():
    assert to_text(sylvester(2)) == "++++\n+-+-\n++--\n+--+"
