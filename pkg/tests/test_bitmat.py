"""GF(2) linear algebra checked against slow dense numpy oracles."""

from __future__ import annotations

import numpy as np
import pytest

from mrpke.bitmat import BitMatrix, NoSolution, random_full_rank, solve
from mrpke.rng import Expander

from .conftest import np_rng


# ---------------------------------------------------------------------------
# dense reference implementations (the oracles)
# ---------------------------------------------------------------------------


def dense_rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Textbook Gauss-Jordan over GF(2); leftmost column, topmost row."""
    a = (a.copy() & 1).astype(np.uint8)
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        sel = None
        for i in range(r, rows):
            if a[i, c]:
                sel = i
                break
        if sel is None:
            continue
        a[[r, sel]] = a[[sel, r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def dense_rank(a: np.ndarray) -> int:
    return len(dense_rref(a)[1])


def dense_kernel(a: np.ndarray) -> np.ndarray:
    """RREF basis of the right kernel, via RREF of the textbook basis."""
    rows, cols = a.shape
    r, pivots = dense_rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for idx, f in enumerate(free):
        basis[idx, f] = 1
        for i, p in enumerate(pivots):
            basis[idx, p] = r[i, f]
    return dense_rref(basis)[0][: len(free)]


def random_dense(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.integers(0, 2, size=(rows, cols), dtype=np.uint8)


# ---------------------------------------------------------------------------
# tests
# ---------------------------------------------------------------------------


SHAPES = [(1, 1), (3, 5), (5, 3), (7, 9), (16, 16), (40, 17), (65, 130), (130, 65), (97, 203)]


def test_pack_round_trip():
    rng = np_rng(1)
    for rows, cols in SHAPES:
        d = random_dense(rng, rows, cols)
        m = BitMatrix.from_dense(d)
        assert np.array_equal(m.to_dense(), d)


def test_bytes_round_trip():
    rng = np_rng(2)
    for rows, cols in SHAPES:
        d = random_dense(rng, rows, cols)
        m = BitMatrix.from_dense(d)
        raw = m.to_bytes()
        assert len(raw) == rows * ((cols + 7) // 8)
        m2 = BitMatrix.from_bytes(raw, rows, cols)
        assert m2 == m
        blob = m.serialize()
        m3, used = BitMatrix.deserialize(blob + b"trailing")
        assert used == len(blob)
        assert m3 == m


def test_bit_order_is_lsb_first():
    # bit j of a serialized byte is (byte >> (j % 8)) & 1
    m = BitMatrix.from_dense(np.array([[1, 0, 0, 0, 0, 0, 0, 0, 1]], dtype=np.uint8))
    assert m.to_bytes() == bytes([0x01, 0x01])


def test_from_bytes_rejects_bad_padding():
    with pytest.raises(ValueError):
        BitMatrix.from_bytes(bytes([0xFF]), 1, 3)


def test_mul_against_dense(xof):
    rng = np_rng(3)
    for ra, inner, cb in [(3, 4, 5), (17, 65, 9), (64, 64, 64), (70, 130, 33), (1, 200, 1)]:
        da = random_dense(rng, ra, inner)
        db = random_dense(rng, inner, cb)
        expect = (da @ db) % 2
        got = BitMatrix.from_dense(da).mul(BitMatrix.from_dense(db)).to_dense()
        assert np.array_equal(got, expect)


def test_mul_t_against_dense():
    rng = np_rng(4)
    da = random_dense(rng, 13, 131)
    db = random_dense(rng, 21, 131)
    expect = (da @ db.T) % 2
    got = BitMatrix.from_dense(da).mul_t(BitMatrix.from_dense(db)).to_dense()
    assert np.array_equal(got, expect)


def test_transpose_against_dense():
    rng = np_rng(5)
    for rows, cols in SHAPES:
        d = random_dense(rng, rows, cols)
        assert np.array_equal(BitMatrix.from_dense(d).transpose().to_dense(), d.T)


def test_rref_matches_dense_oracle():
    rng = np_rng(6)
    for rows, cols in SHAPES:
        d = random_dense(rng, rows, cols)
        m = BitMatrix.from_dense(d)
        r, u, pivots = m.rref()
        expect_r, expect_piv = dense_rref(d)
        assert np.array_equal(r.to_dense(), expect_r)
        assert pivots == expect_piv
        # transform property: r = u * m, u invertible
        assert u.mul(m) == r
        assert u.rank() == rows


def test_rref_low_rank():
    rng = np_rng(7)
    for _ in range(20):
        basis = random_dense(rng, 4, 30)
        comb = random_dense(rng, 25, 4)
        d = (comb @ basis) % 2
        m = BitMatrix.from_dense(d)
        r, u, pivots = m.rref()
        er, ep = dense_rref(d)
        assert np.array_equal(r.to_dense(), er)
        assert pivots == ep
        assert m.rank() == dense_rank(d) <= 4


def test_rank_against_dense():
    rng = np_rng(8)
    for rows, cols in SHAPES:
        d = random_dense(rng, rows, cols)
        assert BitMatrix.from_dense(d).rank() == dense_rank(d)


def test_kernel_basis_is_rref_and_matches_oracle():
    rng = np_rng(9)
    for rows, cols in SHAPES + [(2, 3), (1, 3)]:
        d = random_dense(rng, rows, cols)
        m = BitMatrix.from_dense(d)
        k = m.kernel_basis()
        expect = dense_kernel(d)
        assert np.array_equal(k.to_dense(), expect)
        assert k.rows == cols - dense_rank(d)
        # annihilation
        if k.rows:
            assert m.mul_t(k).is_zero()


def test_kernel_basis_not_naive_order():
    # regression: the textbook free-column basis is not itself in RREF
    d = np.array([[1, 1, 1]], dtype=np.uint8)
    k = BitMatrix.from_dense(d).kernel_basis()
    assert np.array_equal(k.to_dense(), np.array([[1, 0, 1], [0, 1, 1]], dtype=np.uint8))


def test_rank_plus_kernel_dim(xof):
    for rows, cols in SHAPES:
        m = BitMatrix.random(rows, cols, xof)
        assert m.rank() + m.kernel_basis().rows == cols


def test_solve_round_trip():
    rng = np_rng(10)
    for rows, cols in [(5, 9), (20, 33), (64, 100), (33, 129)]:
        a = random_dense(rng, rows, cols)
        x0 = random_dense(rng, 7, rows)
        b = (x0 @ a) % 2
        am = BitMatrix.from_dense(a)
        bm = BitMatrix.from_dense(b)
        x = solve(am, bm)
        assert x.mul(am) == bm


def test_solve_detects_inconsistency():
    rng = np_rng(11)
    a = random_dense(rng, 3, 10)
    bad = np.ones((1, 10), dtype=np.uint8)
    while dense_rank(np.vstack([a, bad])) == dense_rank(a):
        bad = random_dense(rng, 1, 10)
    with pytest.raises(NoSolution):
        solve(BitMatrix.from_dense(a), BitMatrix.from_dense(bad))


def test_solve_is_deterministic():
    rng = np_rng(12)
    a = random_dense(rng, 12, 8)  # rank-deficient rows: many solutions exist
    x0 = random_dense(rng, 3, 12)
    b = (x0 @ a) % 2
    am = BitMatrix.from_dense(a)
    bm = BitMatrix.from_dense(b)
    assert solve(am, bm) == solve(am.copy(), bm.copy())


def test_random_full_rank(xof):
    m = random_full_rank(40, 100, xof)
    assert m.rank() == 40
    with pytest.raises(ValueError):
        random_full_rank(5, 3, xof)


def test_identity_and_add():
    i5 = BitMatrix.identity(5)
    assert np.array_equal(i5.to_dense(), np.eye(5, dtype=np.uint8))
    assert (i5 + i5).is_zero()


def test_determinism_same_seed():
    a = BitMatrix.random(20, 90, Expander(bytes(32), b"x"))
    b = BitMatrix.random(20, 90, Expander(bytes(32), b"x"))
    c = BitMatrix.random(20, 90, Expander(bytes(32), b"y"))
    assert a == b
    assert a != c
