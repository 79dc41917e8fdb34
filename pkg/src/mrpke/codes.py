"""Matrix codes over GF(2): vectorization, trace inner product, duality,
support-constrained error sampling, and code surgery (augment / shorten).

A matrix code of length m x n and dimension k is stored as a k x mn
:class:`BitMatrix` whose rows are the row-major vectorizations of a basis.
Bases are always kept in RREF, so code equality is bit equality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitmat import BitMatrix, random_full_rank
from .rng import Expander


# ---------------------------------------------------------------------------
# vectorization and the trace form
# ---------------------------------------------------------------------------


def rho(mat: BitMatrix) -> BitMatrix:
    """Row-major flattening of an m x n matrix to a 1 x mn row vector."""
    return BitMatrix.from_dense(mat.to_dense().reshape(1, -1))

def rho_inv(vec: BitMatrix, m: int, n: int) -> BitMatrix:
    """Inverse of :func:`rho`; raises ValueError on length mismatch."""
    if vec.rows != 1 or vec.cols != m * n:
        raise ValueError("vector shape does not match target matrix shape")
    return BitMatrix.from_dense(vec.to_dense().reshape(m, n))


def trace_inner(a: BitMatrix, b: BitMatrix) -> int:
    """Trace(A B^T) over GF(2) = dot product of the vectorizations."""
    if a.rows != b.rows or a.cols != b.cols:
        raise ValueError("shape mismatch")
    return int(np.bitwise_count(a.words & b.words).sum() & 1)


# ---------------------------------------------------------------------------
# subspaces (supports)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """Subspace of F_2^ambient_dim with a canonical RREF basis."""

    ambient_dim: int
    basis: BitMatrix

    def __post_init__(self):
        if self.basis.cols != self.ambient_dim:
            raise ValueError("basis width does not match ambient dimension")

    @property
    def dim(self) -> int:
        return self.basis.rows

    def contains_matrix_columns(self, mat: BitMatrix) -> bool:
        """True iff every column of ``mat`` lies in the subspace."""
        stacked = BitMatrix.from_dense(
            np.vstack([self.basis.to_dense(), mat.transpose().to_dense()])
        )
        return stacked.rank() == self.dim

    @classmethod
    def from_span(cls, rows: BitMatrix) -> "Subspace":
        r = rows.copy()
        pivots = r.rref_in_place()
        basis = BitMatrix.from_dense(r.to_dense()[: len(pivots)])
        return cls(rows.cols, basis)


def sample_support(ambient_dim: int, dim: int, xof: Expander) -> Subspace:
    """Uniform dim-dimensional subspace of F_2^ambient_dim."""
    if dim > ambient_dim:
        raise ValueError("dim exceeds ambient dimension")
    if dim == 0:
        return Subspace(ambient_dim, BitMatrix.zeros(0, ambient_dim))
    m = random_full_rank(dim, ambient_dim, xof)
    m.rref_in_place()
    return Subspace(ambient_dim, m)


def column_support(mat: BitMatrix) -> Subspace:
    """Span of the columns of an m x n matrix, as a subspace of F_2^m."""
    return Subspace.from_span(mat.transpose())


def row_support(mat: BitMatrix) -> Subspace:
    """Span of the rows, as a subspace of F_2^n."""
    return Subspace.from_span(mat)


@dataclass(frozen=True)
class SupportedError:
    support: Subspace
    matrix: BitMatrix


def sample_error_column_support(s: Subspace, n: int, xof: Expander) -> SupportedError:
    """Uniform m x n matrix whose column span equals ``s`` exactly.

    Factors as V * P with V an m x r basis of the support and P a uniform
    full-row-rank r x n matrix (rejection-sampled), which forces the span to
    be all of ``s`` rather than a subspace of it.
    """
    r = s.dim
    if r > n:
        raise ValueError("support dimension exceeds column count")
    if r == 0:
        return SupportedError(s, BitMatrix.zeros(s.ambient_dim, n))
    p = random_full_rank(r, n, xof)
    mat = s.basis.transpose().mul(p)
    return SupportedError(s, mat)


def sample_error_row_support(s: Subspace, m: int, xof: Expander) -> SupportedError:
    """Uniform m x n matrix whose row span equals ``s`` exactly (shape m x ambient)."""
    d = s.dim
    if d > m:
        raise ValueError("support dimension exceeds row count")
    if d == 0:
        return SupportedError(s, BitMatrix.zeros(m, s.ambient_dim))
    q = random_full_rank(d, m, xof)
    mat = q.transpose().mul(s.basis)
    return SupportedError(s, mat)


# ---------------------------------------------------------------------------
# matrix codes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatrixCode:
    m: int
    n: int
    gen: BitMatrix  # k x mn, rows independent, in RREF

    def __post_init__(self):
        if self.gen.cols != self.m * self.n:
            raise ValueError("generator width must be m*n")

    @property
    def dim(self) -> int:
        return self.gen.rows

    @classmethod
    def from_rows(cls, m: int, n: int, rows: BitMatrix) -> "MatrixCode":
        """Build a code from (possibly dependent) vectorized generators."""
        r = rows.copy()
        pivots = r.rref_in_place()
        basis = BitMatrix.from_dense(r.to_dense()[: len(pivots)])
        return cls(m, n, basis)

    @classmethod
    def random(cls, m: int, n: int, k: int, xof: Expander) -> "MatrixCode":
        gen = random_full_rank(k, m * n, xof)
        gen.rref_in_place()
        return cls(m, n, gen)

    def contains(self, vec: BitMatrix) -> bool:
        stacked = BitMatrix.from_dense(np.vstack([self.gen.to_dense(), vec.to_dense()]))
        return stacked.rank() == self.dim

    def sample_codeword(self, xof: Expander) -> BitMatrix:
        coeff = BitMatrix.random(1, self.dim, xof)
        return coeff.mul(self.gen)


def dual(c: MatrixCode) -> MatrixCode:
    """The trace-form dual; dimension mn - dim(c)."""
    return MatrixCode(c.m, c.n, c.gen.kernel_basis())


def augment(c: MatrixCode, extra_rows: BitMatrix) -> MatrixCode:
    """Span of the code plus extra vectorized matrices; dependent rows drop."""
    if extra_rows.cols != c.m * c.n:
        raise ValueError("extra row width must be m*n")
    stacked = BitMatrix.from_dense(
        np.vstack([c.gen.to_dense(), extra_rows.to_dense()])
    )
    return MatrixCode.from_rows(c.m, c.n, stacked)


def shorten_columns(c: MatrixCode, a: int) -> MatrixCode:
    """Subcode with the first ``a`` matrix columns zero, those columns removed.

    Coordinates are reordered so the killed positions lead, the generator is
    re-echelonized, and the rows supported only on surviving positions are
    kept.  The result has dimension >= dim(c) - a*m.
    """
    if not 0 <= a <= c.n:
        raise ValueError("a out of range")
    if a == 0:
        return c
    m, n = c.m, c.n
    dense = c.gen.to_dense().reshape(c.dim, m, n) if c.dim else np.zeros(
        (0, m, n), np.uint8
    )
    killed = dense[:, :, :a].reshape(c.dim, m * a)
    kept = dense[:, :, a:].reshape(c.dim, m * (n - a))
    reordered = BitMatrix.from_dense(np.hstack([killed, kept]))
    pivots = reordered.rref_in_place()
    red = reordered.to_dense()[: len(pivots)]
    keep_rows = [i for i, p in enumerate(pivots) if p >= m * a]
    sub = red[keep_rows, m * a :] if keep_rows else np.zeros((0, m * (n - a)), np.uint8)
    return MatrixCode.from_rows(m, n - a, BitMatrix.from_dense(sub))


def inner_product_matrix(es: list[BitMatrix], fs: list[BitMatrix]) -> BitMatrix:
    """D with D[i][j] = <F_i, E_j>, shape len(fs) x len(es)."""
    d = np.zeros((len(fs), len(es)), dtype=np.uint8)
    for i, f in enumerate(fs):
        for j, e in enumerate(es):
            d[i, j] = trace_inner(f, e)
    return BitMatrix.from_dense(d)


def stack_vectorized(mats: list[BitMatrix]) -> BitMatrix:
    """Stack rho(M) for each matrix into one (len x mn) BitMatrix."""
    dense = np.stack([m.to_dense().reshape(-1) for m in mats])
    return BitMatrix.from_dense(dense)
