"""Gabidulin encode/decode round trips and failure behavior."""

from __future__ import annotations

import random

import pytest

from mrpke.bitmat import BitMatrix
from mrpke.codes import sample_error_column_support, sample_support
from mrpke.fields import field
from mrpke.gabidulin import DecodeFailure, GabidulinCode, sample_gabidulin
from mrpke.rng import Expander


def make_code(n: int, kappa: int, seed: int = 0) -> GabidulinCode:
    ctx = field(n)  # extension degree = length (square case used by the PKE)
    return sample_gabidulin(ctx, n, kappa, Expander(bytes([seed]) + bytes(31), b"gab"))


def rank_error(n: int, m: int, rank: int, xof: Expander) -> BitMatrix:
    if rank == 0:
        return BitMatrix.zeros(n, m)
    s = sample_support(m, rank, xof)
    # columns of the n x m error live... row space over F_2^m has dim = rank
    err = sample_error_column_support(s, n, xof)
    return err.matrix.transpose()


@pytest.fixture
def xof():
    return Expander(bytes(32), b"gabtest")


def test_radius_examples():
    assert make_code(35, 3).radius() == 16
    assert make_code(8, 3).radius() == 2
    assert make_code(8, 8).radius() == 0
    ctx = field(53)
    assert sample_gabidulin(ctx, 53, 3, Expander(bytes(32))).radius() == 25


def test_encode_qdeg0(xof):
    code = make_code(8, 1)
    c = 0xB3
    word = code.encode([c])
    symbols = code.matrix_to_symbols(word)
    assert symbols == [code.ctx.mul(c, g) for g in code.g]


def test_encode_zero(xof):
    code = make_code(8, 3)
    assert code.encode([0, 0, 0]).is_zero()


def test_encode_injective():
    code = make_code(8, 3)
    rng = random.Random(1)
    seen = set()
    for _ in range(1000):
        msg = tuple(rng.randrange(code.ctx.order) for _ in range(3))
        seen.add(code.encode(list(msg)).to_bytes())
    assert len(seen) >= 995  # distinct msgs -> distinct codewords


def test_encode_linearity():
    code = make_code(8, 3)
    ctx = code.ctx
    rng = random.Random(2)
    for _ in range(20):
        m1 = [rng.randrange(ctx.order) for _ in range(3)]
        m2 = [rng.randrange(ctx.order) for _ in range(3)]
        a = rng.randrange(ctx.order)
        left = code.encode([ctx.mul(a, x) ^ y for x, y in zip(m1, m2)])
        scaled = code.symbols_to_matrix(
            [ctx.mul(a, s) for s in code.matrix_to_symbols(code.encode(m1))]
        )
        assert left == scaled + code.encode(m2)


@pytest.mark.parametrize("n,kappa", [(8, 3), (35, 3)])
def test_round_trip_all_ranks(n, kappa, xof):
    code = make_code(n, kappa)
    rng = random.Random(n)
    for rank in range(code.radius() + 1):
        for _ in range(5):
            msg = [rng.randrange(code.ctx.order) for _ in range(kappa)]
            e = rank_error(n, n, rank, xof)
            assert e.rank() == rank
            assert code.decode(code.encode(msg) + e) == msg


def test_uniform_y_bottom(xof):
    code = make_code(35, 3)
    bottoms = 0
    trials = 200
    for _ in range(trials):
        y = BitMatrix.random(35, 35, xof)
        try:
            msg = code.decode(y)
        except DecodeFailure:
            bottoms += 1
        else:
            # never silent: claimed decodings must be within the radius
            assert (code.encode(msg) + y).rank() <= code.radius()
    assert bottoms >= 0.99 * trials


def test_beyond_radius_never_silent(xof):
    code = make_code(8, 3)
    rng = random.Random(3)
    for _ in range(300):
        msg = [rng.randrange(code.ctx.order) for _ in range(3)]
        e = rank_error(8, 8, code.radius() + 1 + rng.randrange(2), xof)
        y = code.encode(msg) + e
        try:
            got = code.decode(y)
        except DecodeFailure:
            continue
        assert (code.encode(got) + y).rank() <= code.radius()


def test_determinism():
    a = make_code(8, 3, seed=7)
    b = make_code(8, 3, seed=7)
    assert a.g == b.g
