"""Gabidulin codes: evaluation encoder and bounded-rank-distance decoder.

A codeword is the evaluation of a linearized polynomial of q-degree < kappa
on a GF(2)-independent vector g of length n, expanded to an n x m bit matrix
(one row per symbol over GF(2^m)).  Decoding is an interpolation
(Welch-Berlekamp style) reconstruction: find a nonzero pair (V, N) with

    V(y_i) = N(g_i),   qdeg V <= tau,  qdeg N < kappa + tau,

divide f = V^{-1} o N by linearized left division, and accept only if the
re-encoding of f lies within rank distance tau of the input.  The decoder
therefore never returns a wrong message silently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bitmat import BitMatrix
from .fields import FieldCtx, QPoly
from .rng import Expander


class DecodeFailure(Exception):
    """The received word is not within the guaranteed decoding radius."""


@dataclass(frozen=True)
class GabidulinCode:
    ctx: FieldCtx
    g: tuple[int, ...]  # evaluation vector, GF(2)-independent
    kappa: int

    def __post_init__(self):
        n = len(self.g)
        if not self.kappa <= n <= self.ctx.m:
            raise ValueError("need kappa <= n <= m")
        if self.ctx.rank_of_vector(self.g) != n:
            raise ValueError("evaluation points must be GF(2)-independent")

    @property
    def n(self) -> int:
        return len(self.g)

    def radius(self) -> int:
        """Guaranteed decoding radius floor((n - kappa) / 2)."""
        return (self.n - self.kappa) // 2

    # -- symbol <-> bit-matrix conversion -------------------------------------

    def symbols_to_matrix(self, symbols) -> BitMatrix:
        m = self.ctx.m
        dense = np.zeros((len(symbols), m), dtype=np.uint8)
        for i, e in enumerate(symbols):
            for j in range(m):
                dense[i, j] = (e >> j) & 1
        return BitMatrix.from_dense(dense)

    def matrix_to_symbols(self, mat: BitMatrix) -> list[int]:
        if mat.rows != self.n or mat.cols != self.ctx.m:
            raise ValueError("matrix shape does not match code")
        dense = mat.to_dense().astype(object)
        return [int(sum(int(b) << j for j, b in enumerate(row))) for row in dense]

    # -- encoding --------------------------------------------------------------

    def encode(self, msg) -> BitMatrix:
        if len(msg) != self.kappa:
            raise ValueError("message must have kappa symbols")
        poly = QPoly(self.ctx, list(msg))
        return self.symbols_to_matrix(poly.eval_many(list(self.g)))

    # -- decoding ----------------------------------------------------------------

    def decode(self, y: BitMatrix) -> list[int]:
        """Recover the message from y = encode(msg) + e, rank(e) <= radius.

        Raises :class:`DecodeFailure` for anything outside the radius.
        """
        ctx = self.ctx
        n, kappa = self.n, self.kappa
        tau = self.radius()
        ys = self.matrix_to_symbols(y)

        # interpolation system: columns are V_0..V_tau (evaluated on y) and
        # N_0..N_{kappa+tau-1} (evaluated on g); each row is one equation.
        vcols = tau + 1
        ncols_poly = kappa + tau
        width = vcols + ncols_poly
        mat = np.zeros((n, width, 2), dtype=np.uint64)
        for i in range(n):
            yp = ys[i]
            for a in range(vcols):
                mat[i, a, 0] = yp & 0xFFFFFFFFFFFFFFFF
                mat[i, a, 1] = yp >> 64
                yp = ctx.frobenius(yp)
            gp = self.g[i]
            for b in range(ncols_poly):
                mat[i, vcols + b, 0] = gp & 0xFFFFFFFFFFFFFFFF
                mat[i, vcols + b, 1] = gp >> 64
                gp = ctx.frobenius(gp)
        pivots = np.zeros(width + 1, dtype=np.int64)
        rank = int(_kernels.gf_rref(mat, ctx.m, ctx._mlo, ctx._mhi, pivots))
        if rank == width:
            raise DecodeFailure("interpolation system has no nonzero solution")
        piv = set(int(p) for p in pivots[:rank])
        free = next(c for c in range(width) if c not in piv)
        sol = [0] * width
        sol[free] = 1
        for idx, p in enumerate(pivots[:rank]):
            e = int(mat[idx, free, 0]) | (int(mat[idx, free, 1]) << 64)
            sol[int(p)] = e

        vpoly = QPoly(ctx, sol[:vcols])
        npoly = QPoly(ctx, sol[vcols:])
        if vpoly.qdeg < 0:
            raise DecodeFailure("locator polynomial vanished")
        f = _left_divide(ctx, vpoly, npoly, kappa)
        if f is None:
            raise DecodeFailure("reconstruction is not a valid codeword")
        msg = f.coeffs + [0] * (kappa - len(f.coeffs))
        residual = self.encode(msg) + y
        if residual.rank() > tau:
            raise DecodeFailure("re-encode check failed")
        return msg


def _left_divide(ctx: FieldCtx, v: QPoly, npoly: QPoly, kappa: int) -> QPoly | None:
    """Return f with v o f = npoly and qdeg f < kappa, or None.

    Linearized long division from the top: the leading coefficient of
    v o (c X^(2^d)) is v_top * c^(2^(qdeg v)), so each step solves for one
    coefficient of f via an inverse Frobenius (i.e. m - qdeg v squarings).
    """
    vdeg = v.qdeg
    vtop_inv = ctx.inv(v.coeffs[vdeg])
    rem = npoly
    coeffs = [0] * kappa
    while rem.qdeg >= 0:
        d = rem.qdeg - vdeg
        if d < 0 or d >= kappa:
            return None
        c = ctx.mul(rem.coeffs[rem.qdeg], vtop_inv)
        c = ctx.frobenius(c, ctx.m - vdeg)  # undo the 2^vdeg power
        coeffs[d] = c
        step = v.compose(QPoly(ctx, [0] * d + [c]))
        rem = rem + step
    return QPoly(ctx, coeffs)


def sample_gabidulin(ctx: FieldCtx, n: int, kappa: int, xof: Expander,
                     attempts: int = 256) -> GabidulinCode:
    """Deterministically derive a code from an expander stream.

    The evaluation vector is redrawn wholesale until it is GF(2)-independent.
    """
    for _ in range(attempts):
        g = tuple(ctx.random_elements(n, xof))
        if ctx.rank_of_vector(g) == n:
            return GabidulinCode(ctx, g, kappa)
    raise RuntimeError("failed to sample an independent evaluation vector")
