import json
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from conftest import brute_gram_counts
from ghostimaging.exceptions import DimensionMismatchError, InvalidArgumentError, InvalidOrderError
from ghostimaging.hadamard import hadamard, valid_orders
from ghostimaging.patterns import (
    PatternMatrix,
    gram,
    make_patterns,
    pattern_image,
    pseudo_hadamard,
    random_binary,
    save_patterns,
    special_hadamard,
    to_pseudo,
)
from ghostimaging.pgm import read_pgm


def test_to_pseudo_examples():
    assert to_pseudo(np.array([[1, 1], [1, -1]])).entries.tolist() == [[1, 1], [1, 0]]
    assert to_pseudo(np.array([[1]])).entries.tolist() == [[1]]
    p = to_pseudo(hadamard(8))
    assert p.kind == "pseudo_hadamard" and p.entries.shape == (8, 8)


def test_pseudo_gram_order_4_frozen():
    expected = [[1, .5, .5, .5], [.5, .5, .25, .25], [.5, .25, .5, .25], [.5, .25, .25, .5]]
    p = pseudo_hadamard(4)
    counts = brute_gram_counts(p.entries)
    assert [[Fraction(c, 4) for c in row] for row in counts] == [
        [Fraction(v) for v in row] for row in expected
    ]
    assert gram(p).tolist() == expected


@pytest.mark.parametrize("n", [v for v in valid_orders(64) if v >= 2])
def test_pseudo_gram_structure(n):
    g = gram(pseudo_hadamard(n), exact=True)
    assert g[0, 0] == 1
    for j in range(1, n):
        assert g[0, j] == g[j, 0] == Fraction(1, 2)
        assert g[j, j] == Fraction(1, 2)
    off = g[1:, 1:][~np.eye(n - 1, dtype=bool)]
    assert all(v == Fraction(1, 4) for v in off)


def test_special_hadamard_k4_n3():
    allowed = {(1, 0, 1, 0), (1, 1, 0, 0), (1, 0, 0, 1)}
    for seed in range(20):
        s = special_hadamard(4, 3, seed=seed)
        assert {tuple(r) for r in s.entries.tolist()} == allowed
        assert sorted(s.source_rows.tolist()) == [1, 2, 3]
        assert gram(s).tolist() == [[.5, .25, .25], [.25, .5, .25], [.25, .25, .5]]


def test_special_hadamard_k2():
    assert special_hadamard(2, 1, seed=0).entries.tolist() == [[1, 0]]


@pytest.mark.parametrize("K, N, err", [
    (4, 4, InvalidArgumentError), (4, 0, InvalidArgumentError), (6, 3, InvalidOrderError),
])
def test_special_hadamard_errors(K, N, err):
    with pytest.raises(err):
        special_hadamard(K, N, seed=0)


def test_special_rows_come_from_parent():
    s = special_hadamard(40, 25, seed=3)
    parent = (hadamard(40) + 1) // 2
    assert np.array_equal(s.entries, parent[s.source_rows])
    assert s.source_rows.min() >= 1 and len(set(s.source_rows.tolist())) == 25
    assert np.linalg.matrix_rank(s.entries.astype(float)) == 25


def test_special_is_seed_deterministic():
    a, b = special_hadamard(64, 30, seed=9), special_hadamard(64, 30, seed=9)
    assert np.array_equal(a.entries, b.entries)
    assert not np.array_equal(a.entries, special_hadamard(64, 30, seed=10).entries)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([4, 8, 12, 16, 20, 24, 32, 40]), st.data())
def test_special_gram_property(K, data):
    N = data.draw(st.integers(1, K - 1))
    seed = data.draw(st.integers(0, 2**32 - 1))
    s = special_hadamard(K, N, seed=seed)
    counts = np.array(brute_gram_counts(s.entries))
    # (1/K) S S^T == 1/4 (I + J) exactly  <=>  4 * counts == K * (I + J)
    assert np.array_equal(4 * counts, K * (np.eye(N, dtype=int) + 1))


def test_random_binary_deterministic():
    a = random_binary(4, 8, seed=5)
    b = random_binary(4, 8, seed=5)
    assert np.array_equal(a.entries, b.entries)
    assert a.kind == "random_binary" and a.seed == 5
    assert set(np.unique(a.entries)) <= {0, 1}


def test_random_binary_pixel_means_concentrate():
    # Hoeffding: P(|mean - 1/2| > 0.01) <= 2 exp(-2 * 1e6 * 1e-4) = 2e-87 per pixel
    p = random_binary(1024, 10**6, seed=2024)
    means = p.entries.sum(axis=1, dtype=np.int64) / 10**6
    assert means.min() >= 0.49 and means.max() <= 0.51


def test_random_binary_all_2x2_matrices_occur():
    counts = Counter(random_binary(2, 2, seed=s).entries.tobytes() for s in range(1600))
    assert len(counts) == 16
    observed = np.array(list(counts.values()))
    chi2 = ((observed - 100) ** 2 / 100).sum()
    assert chi2 < stats.chi2.ppf(0.999, df=15)


def test_random_binary_rejects_empty():
    with pytest.raises(InvalidArgumentError):
        random_binary(0, 3)


def test_pattern_matrix_validation():
    with pytest.raises(InvalidArgumentError):
        PatternMatrix("random_binary", np.array([[2]], dtype=np.uint8))
    with pytest.raises(InvalidArgumentError):
        PatternMatrix("speckle", np.array([[1]], dtype=np.uint8))
    p = pseudo_hadamard(4)
    with pytest.raises(ValueError):
        p.entries[0, 0] = 0


def test_make_patterns_dispatch():
    assert make_patterns("pseudo_hadamard", 8, 8).kind == "pseudo_hadamard"
    assert make_patterns("special_hadamard", 5, 8, seed=1).entries.shape == (5, 8)
    assert make_patterns("random_binary", 5, 9, seed=1).entries.shape == (5, 9)
    with pytest.raises(InvalidArgumentError):
        make_patterns("pseudo_hadamard", 8, 16)


def test_pattern_image_examples():
    p = PatternMatrix("random_binary", np.array([[1], [0], [0], [1]], dtype=np.uint8))
    assert pattern_image(p, 0, (2, 2)).tolist() == [[1, 0], [0, 1]]
    q = PatternMatrix("random_binary", np.array([[1, 1, 0, 0, 1, 0]], dtype=np.uint8).T)
    assert pattern_image(q, 0, (2, 3)).tolist() == [[1, 1, 0], [0, 1, 0]]
    with pytest.raises(DimensionMismatchError):
        pattern_image(p, 0, (3, 2))
    with pytest.raises(IndexError):
        pattern_image(p, 1, (2, 2))


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 1000))
def test_reshape_then_flatten_is_identity(n1, n2, seed):
    p = random_binary(n1 * n2, 3, seed=seed)
    for n in range(3):
        assert np.array_equal(pattern_image(p, n, (n1, n2)).reshape(-1), p.entries[:, n])


def test_save_patterns(tmp_path):
    s = special_hadamard(4, 3, seed=7)
    paths = save_patterns(s, tmp_path, shape=(3, 1))
    assert len(paths) == 4
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["kind"] == "special_hadamard"
    assert manifest["K"] == 4 and manifest["N"] == 3 and manifest["seed"] == 7
    assert manifest["source_rows"] == s.source_rows.tolist()
    img, maxval = read_pgm(paths[1])
    assert np.array_equal(img.reshape(-1), s.entries[:, 1] * 255)
