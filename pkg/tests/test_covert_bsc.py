import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from covertlab.covert_bsc import (
    bhattacharyya,
    bsc_decode,
    bsc_encode,
    bsc_plan_capacity,
    gen_codebook,
    load_codebook,
    save_codebook,
)
from covertlab.exceptions import InvalidInputError, InvalidParameterError, ResourceError
from covertlab.rngstat import make_rng


def test_k_zero_single_row():
    book = gen_codebook(500, 0, 0.05)
    assert book.size == 1 and book.rows.shape == (1, 500)
    assert bsc_decode(np.zeros(500, dtype=np.uint8), book, 0.1) == 0


def test_zero_weight_is_degenerate():
    book = gen_codebook(100, 3, 0.0)
    assert book.degenerate and not book.rows.any()


def test_row_weight_concentrates():
    book = gen_codebook(10**4, 8, 0.01)
    assert 80 <= book.weights.mean() <= 120
    sd = math.sqrt(10**4 * 0.01 * 0.99)
    assert np.all(np.abs(book.weights - 100) <= 5 * sd)


def test_encode_returns_row():
    book = gen_codebook(300, 4, 0.05, public_seed=3)
    assert np.array_equal(bsc_encode(0, book), book.rows[0])
    assert np.array_equal(bsc_encode(11, book), book.rows[11])
    with pytest.raises(InvalidInputError):
        bsc_encode(16, book)
    with pytest.raises(InvalidInputError):
        bsc_encode(1.0, book)


def test_rows_distinct_and_collision_bound():
    book = gen_codebook(10**3, 8, 0.05)
    assert book.distinct
    assert len({r.tobytes() for r in book.rows}) == 256
    assert book.collision_bound < 1e-6


def test_codebook_reproducible_and_seeded():
    a = gen_codebook(400, 5, 0.05, public_seed=1)
    b = gen_codebook(400, 5, 0.05, public_seed=1)
    c = gen_codebook(400, 5, 0.05, public_seed=2)
    assert np.array_equal(a.rows, b.rows)
    assert not np.array_equal(a.rows, c.rows)


def test_noiseless_exhaustive_loopback():
    book = gen_codebook(10**3, 8, 0.05)
    for m in range(book.size):
        assert bsc_decode(bsc_encode(m, book), book, 0.0) == m


def test_single_flip_inside_decoding_radius():
    book = gen_codebook(10**3, 6, 0.05)
    rows = book.rows.astype(int)
    dist = (rows[:, None, :] != rows[None, :, :]).sum(axis=2)
    np.fill_diagonal(dist, book.n)
    assert dist.min() >= 3
    g = make_rng(2).generator
    for m in range(book.size):
        r = bsc_encode(m, book)
        r[g.integers(book.n)] ^= 1
        assert bsc_decode(r, book, 0.05) == m


def _oracle_decode(r, rows):
    return int(np.argmin([(r != row).sum() for row in rows]))


def test_block_error_matches_brute_force_oracle():
    n, k, q_c, p_b, trials = 10**4, 8, 0.01, 0.05, 1000
    book = gen_codebook(n, k, q_c)
    rows = book.rows
    lib = oracle = 0
    for t in range(trials):
        g = make_rng(8, ("bsc-oracle", t)).generator
        m = int(g.integers(book.size))
        r = rows[m] ^ (g.random(n) < p_b).astype(np.uint8)
        lib += bsc_decode(r, book, p_b) != m
        oracle += _oracle_decode(r, rows) != m
    assert lib == oracle
    assert lib / trials <= 0.1


def test_decode_validation():
    book = gen_codebook(100, 2, 0.1)
    with pytest.raises(InvalidParameterError):
        bsc_decode(np.zeros(100, dtype=np.uint8), book, 0.5)
    with pytest.raises(InvalidInputError):
        bsc_decode(np.zeros(99, dtype=np.uint8), book, 0.1)


def test_generation_limits():
    with pytest.raises(ResourceError):
        gen_codebook(100, 17, 0.1)
    with pytest.raises(InvalidParameterError):
        gen_codebook(100, 2, 0.6)


def test_plan_capacity_union_bound():
    n, q_c, p_b = 10**4, 0.01, 0.05
    k = bsc_plan_capacity(n, q_c, p_b)
    d = 2 * n * q_c * (1 - q_c)
    z = bhattacharyya(p_b)
    assert (2**k - 1) * z**d <= 0.1 < (2 ** (k + 1) - 1) * z**d
    assert bsc_plan_capacity(n, q_c, p_b, k_max=8) == min(k, 8)


@settings(max_examples=50, deadline=None)
@given(st.integers(100, 10**6), st.floats(0.001, 0.2))
def test_plan_capacity_monotone_in_noise(n, p_b):
    q_c = 1 / math.sqrt(n)
    assert bsc_plan_capacity(n, q_c, p_b) >= bsc_plan_capacity(n, q_c, min(0.49, 2 * p_b))


def test_codebook_file_roundtrip(tmp_path):
    book = gen_codebook(700, 5, 0.03, public_seed=9)
    save_codebook(book, tmp_path / "c.txt")
    back = load_codebook(tmp_path / "c.txt")
    assert np.array_equal(back.rows, book.rows)
    (tmp_path / "bad.txt").write_text("n=7\n")
    with pytest.raises(InvalidInputError):
        load_codebook(tmp_path / "bad.txt")
