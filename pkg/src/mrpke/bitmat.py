"""Bit-packed dense GF(2) matrices.

A :class:`BitMatrix` stores its rows as little-endian 64-bit words (bit ``j``
of a row lives in word ``j // 64`` at bit position ``j % 64``).  Padding bits
beyond the column count are always zero, which makes equality, hashing and
serialization canonical.

All elimination-based operations (``rref``, ``rank``, ``kernel_basis``,
``solve``) are deterministic with the leftmost-column / topmost-row pivot
rule, so every subspace has a unique RREF basis and support comparisons are
plain bit comparisons.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .rng import Expander


class NoSolution(Exception):
    """Raised by :func:`solve` when the system is inconsistent."""


def _nwords(cols: int) -> int:
    return (cols + 63) // 64


class BitMatrix:
    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: np.ndarray | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        self.rows = rows
        self.cols = cols
        if words is None:
            words = np.zeros((rows, _nwords(cols)), dtype=np.uint64)
        else:
            if words.shape != (rows, _nwords(cols)) or words.dtype != np.uint64:
                raise ValueError("words array has wrong shape or dtype")
            words = np.ascontiguousarray(words)
        self.words = words

    # -- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        m = cls(n, n)
        idx = np.arange(n)
        m.words[idx, idx // 64] = np.uint64(1) << (idx % 64).astype(np.uint64)
        return m

    @classmethod
    def random(cls, rows: int, cols: int, xof: Expander) -> "BitMatrix":
        return cls(rows, cols, xof.bit_rows(rows, cols))

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "BitMatrix":
        dense = np.asarray(dense, dtype=np.uint8) & 1
        if dense.ndim != 2:
            raise ValueError("expected a 2-D array")
        rows, cols = dense.shape
        nw = _nwords(cols)
        packed = np.packbits(dense, axis=1, bitorder="little")
        buf = np.zeros((rows, nw * 8), dtype=np.uint8)
        buf[:, : packed.shape[1]] = packed
        return cls(rows, cols, buf.view("<u8").astype(np.uint64))

    def to_dense(self) -> np.ndarray:
        if self.rows == 0:
            return np.zeros((0, self.cols), dtype=np.uint8)
        raw = self.words.astype("<u8").view(np.uint8)
        bits = np.unpackbits(raw, axis=1, bitorder="little")
        return bits[:, : self.cols].copy()

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.words.copy())

    # -- element access ------------------------------------------------------

    def get(self, i: int, j: int) -> int:
        return int((self.words[i, j // 64] >> np.uint64(j % 64)) & np.uint64(1))

    def set(self, i: int, j: int, value: int) -> None:
        mask = np.uint64(1) << np.uint64(j % 64)
        if value & 1:
            self.words[i, j // 64] |= mask
        else:
            self.words[i, j // 64] &= ~mask

    # -- algebra -------------------------------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (
            self.rows == other.rows
            and self.cols == other.cols
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self):
        return hash((self.rows, self.cols, self.words.tobytes()))

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        self._check_same_shape(other)
        return BitMatrix(self.rows, self.cols, self.words ^ other.words)

    __sub__ = __add__  # characteristic 2

    def _check_same_shape(self, other: "BitMatrix") -> None:
        if self.rows != other.rows or self.cols != other.cols:
            raise ValueError("shape mismatch")

    def mul(self, other: "BitMatrix") -> "BitMatrix":
        """Matrix product over GF(2)."""
        if self.cols != other.rows:
            raise ValueError("inner dimension mismatch")
        out = BitMatrix(self.rows, other.cols)
        if self.rows and self.cols and other.cols:
            _kernels.mul_rowcomb(self.words, self.cols, other.words, out.words)
        return out

    def mul_t(self, other: "BitMatrix") -> "BitMatrix":
        """Product with the transpose: self * other^T."""
        return self.mul(other.transpose())

    def transpose(self) -> "BitMatrix":
        out = BitMatrix(self.cols, self.rows)
        if self.rows and self.cols:
            _kernels.transpose(self.words, self.rows, self.cols, out.words)
        return out

    def hstack(self, other: "BitMatrix") -> "BitMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        dense = np.hstack([self.to_dense(), other.to_dense()])
        return BitMatrix.from_dense(dense)

    def _augment_words(self, extra: "BitMatrix") -> np.ndarray:
        """Concatenate word arrays at a word boundary (for augmented RREF)."""
        return np.hstack([self.words, extra.words])

    def rref(self) -> tuple["BitMatrix", "BitMatrix", list[int]]:
        """Return (R, U, pivots) with R = U * self in RREF, U invertible."""
        nw = _nwords(self.cols)
        ident = BitMatrix.identity(self.rows)
        w = np.hstack([self.words, ident.words]) if self.rows else np.zeros(
            (0, nw + _nwords(self.rows)), dtype=np.uint64
        )
        pivots = np.zeros(min(self.rows, self.cols) + 1, dtype=np.int64)
        rank = int(_kernels.rref_inplace(w, self.cols, pivots)) if self.rows else 0
        r = BitMatrix(self.rows, self.cols, np.ascontiguousarray(w[:, :nw]))
        u = BitMatrix(self.rows, self.rows, np.ascontiguousarray(w[:, nw:]))
        return r, u, [int(p) for p in pivots[:rank]]

    def rref_in_place(self) -> list[int]:
        """Reduce self to RREF; returns the pivot columns."""
        pivots = np.zeros(min(self.rows, self.cols) + 1, dtype=np.int64)
        if self.rows:
            rank = int(_kernels.rref_inplace(self.words, self.cols, pivots))
        else:
            rank = 0
        return [int(p) for p in pivots[:rank]]

    def rank(self) -> int:
        if self.rows == 0 or self.cols == 0:
            return 0
        w = self.words.copy()
        pivots = np.zeros(min(self.rows, self.cols) + 1, dtype=np.int64)
        return int(_kernels.rref_inplace(w, self.cols, pivots))

    def kernel_basis(self) -> "BitMatrix":
        """RREF basis of {x : self * x^T = 0}, shape (cols - rank) x cols.

        Implemented with a single reversed-column elimination: the free
        columns of RREF(self with columns reversed) are exactly the pivot
        columns of the kernel's RREF basis, so no second elimination pass is
        needed.  The result equals RREF of any kernel basis (RREF bases are
        unique per subspace).
        """
        n = self.cols
        if self.rows == 0 or n == 0:
            return BitMatrix.identity(n)
        rev = BitMatrix(self.rows, n)
        _kernels.reverse_cols(self.words, n, rev.words)
        pivots = np.zeros(min(self.rows, n) + 1, dtype=np.int64)
        rank = int(_kernels.rref_inplace(rev.words, n, pivots))
        k = BitMatrix(n - rank, n)
        if n - rank:
            _kernels.kernel_from_reversed_rref(rev.words, n, rank, pivots, k.words)
        return k

    def select_columns(self, cols: list[int] | np.ndarray) -> "BitMatrix":
        idx = np.asarray(cols, dtype=np.int64)
        out = BitMatrix(self.rows, len(idx))
        if self.rows and len(idx):
            _kernels.gather_cols(self.words, idx, out.words)
        return out

    def scatter_columns(self, cols: list[int] | np.ndarray, width: int) -> "BitMatrix":
        """Place column j of self at column cols[j] of a rows x width matrix."""
        idx = np.asarray(cols, dtype=np.int64)
        out = BitMatrix(self.rows, width)
        if self.rows and len(idx):
            _kernels.scatter_cols(self.words, idx, out.words)
        return out

    def is_zero(self) -> bool:
        return not self.words.any()

    # -- serialization -------------------------------------------------------

    def row_bytes(self) -> int:
        return (self.cols + 7) // 8

    def to_bytes(self) -> bytes:
        """Row-major packed bits, LSB-first within bytes, rows byte-aligned."""
        rb = self.row_bytes()
        raw = self.words.astype("<u8").tobytes()
        per_row = self.words.shape[1] * 8
        return b"".join(
            raw[i * per_row : i * per_row + rb] for i in range(self.rows)
        )

    @classmethod
    def from_bytes(cls, data: bytes, rows: int, cols: int) -> "BitMatrix":
        rb = (cols + 7) // 8
        if len(data) != rows * rb:
            raise ValueError("byte length does not match dimensions")
        nw = _nwords(cols)
        buf = np.zeros((rows, nw * 8), dtype=np.uint8)
        if rows:
            buf[:, :rb] = np.frombuffer(data, dtype=np.uint8).reshape(rows, rb)
        m = cls(rows, cols, buf.view("<u8").astype(np.uint64))
        rem = cols % 64
        if rem and nw:
            pad = m.words[:, -1] >> np.uint64(rem)
            if pad.any():
                raise ValueError("nonzero padding bits")
        return m

    def serialize(self) -> bytes:
        """Self-describing form: 4-byte LE rows, 4-byte LE cols, payload."""
        return (
            self.rows.to_bytes(4, "little")
            + self.cols.to_bytes(4, "little")
            + self.to_bytes()
        )

    @classmethod
    def deserialize(cls, data: bytes) -> tuple["BitMatrix", int]:
        """Parse a serialized matrix; returns (matrix, bytes consumed)."""
        if len(data) < 8:
            raise ValueError("truncated header")
        rows = int.from_bytes(data[:4], "little")
        cols = int.from_bytes(data[4:8], "little")
        need = 8 + rows * ((cols + 7) // 8)
        if len(data) < need:
            raise ValueError("truncated payload")
        return cls.from_bytes(data[8:need], rows, cols), need

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def solve(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """Canonical X with X * a = b, or raise :class:`NoSolution`.

    The solution is the canonical one obtained from RREF(a): coefficients are
    read off at the pivot columns and mapped back through the row transform.
    """
    if a.cols != b.cols:
        raise ValueError("column mismatch")
    r, u, pivots = a.rref()
    coeff = b.select_columns(pivots)  # b.rows x rank, coefficients w.r.t. R
    c_ext = BitMatrix(b.rows, a.rows)
    if pivots and b.rows:
        c_ext.words[:, : coeff.words.shape[1]] = coeff.words
    if c_ext.mul(r) != b:
        raise NoSolution("rows of b are not in the row space of a")
    return c_ext.mul(u)


def random_full_rank(rows: int, cols: int, xof: Expander, attempts: int = 256) -> BitMatrix:
    """Uniform full-row-rank matrix by rejection; raises after ``attempts``."""
    if rows > cols:
        raise ValueError("cannot have full row rank with rows > cols")
    for _ in range(attempts):
        m = BitMatrix.random(rows, cols, xof)
        if m.rank() == rows:
            return m
    raise RuntimeError("failed to sample a full-rank matrix")
