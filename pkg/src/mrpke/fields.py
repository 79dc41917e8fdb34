"""GF(2^m) arithmetic and linearized (q-)polynomials, q = 2.

Field elements are m-bit integers interpreted in the polynomial basis
{1, x, ..., x^(m-1)} modulo a fixed irreducible polynomial.  The modulus per
degree is the lexicographically smallest irreducible polynomial of minimal
weight (a trinomial when one exists, otherwise a pentanomial); irreducibility
is re-checked deterministically at construction.

A linearized polynomial P = sum_j p_j X^(2^j) induces a GF(2)-linear map on
the field, which is what the Gabidulin layer builds on.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import _kernels
from .bitmat import BitMatrix

# Precomputed moduli (exponents of nonzero terms, descending). Each entry is
# re-verified by the deterministic irreducibility test at construction time.
_KNOWN_MODULI: dict[int, tuple[int, ...]] = {
    8: (8, 4, 3, 1, 0),
    35: (35, 2, 0),
    53: (53, 6, 2, 1, 0),
    75: (75, 6, 3, 1, 0),
}


# ---------------------------------------------------------------------------
# integer polynomial helpers over GF(2) (bit i = coefficient of x^i)
# ---------------------------------------------------------------------------


def _poly_mulmod(a: int, b: int, f: int, m: int) -> int:
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> m & 1:
            a ^= f
    return r


def _poly_powmod_x2k(k: int, f: int, m: int) -> int:
    """x^(2^k) mod f by repeated squaring."""
    r = 2  # the polynomial x
    for _ in range(k):
        r = _poly_mulmod(r, r, f, m)
    return r


def _poly_gcd(a: int, b: int) -> int:
    while b:
        while a.bit_length() >= b.bit_length() and a:
            a ^= b << (a.bit_length() - b.bit_length())
        a, b = b, a
    return a


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def is_irreducible(f: int, m: int) -> bool:
    """Deterministic (Rabin) irreducibility test for degree-m f over GF(2)."""
    if f.bit_length() != m + 1 or not (f & 1):
        return False
    if _poly_powmod_x2k(m, f, m) != 2:  # x^(2^m) == x mod f
        return False
    for p in _prime_factors(m):
        h = _poly_powmod_x2k(m // p, f, m) ^ 2
        if _poly_gcd(f, h) != 1:
            return False
    return True


def minimal_weight_modulus(m: int) -> int:
    """Lexicographically smallest minimal-weight irreducible of degree m."""
    base = (1 << m) | 1
    for a in range(1, m):
        f = base | (1 << a)
        if is_irreducible(f, m):
            return f
    for c in range(3, m):
        for b in range(2, c):
            for a in range(1, b):
                f = base | (1 << c) | (1 << b) | (1 << a)
                if is_irreducible(f, m):
                    return f
    raise ValueError(f"no sparse irreducible of degree {m}")  # pragma: no cover


# ---------------------------------------------------------------------------
# field context
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def field(m: int) -> "FieldCtx":
    return FieldCtx(m)


class FieldCtx:
    """Immutable GF(2^m) context; all operations are pure."""

    def __init__(self, m: int, modulus: int | None = None):
        if not 2 <= m <= 128:
            raise ValueError("degree out of supported range [2, 128]")
        if modulus is None:
            exps = _KNOWN_MODULI.get(m)
            if exps is not None:
                modulus = 0
                for e in exps:
                    modulus |= 1 << e
            else:
                modulus = minimal_weight_modulus(m)
        if not is_irreducible(modulus, m):
            raise ValueError("modulus is not irreducible of the stated degree")
        self.m = m
        self.modulus = modulus
        low = modulus ^ (1 << m)  # modulus minus its leading term
        self._mlo = np.uint64(low & 0xFFFFFFFFFFFFFFFF)
        self._mhi = np.uint64(low >> 64)
        self.order = 1 << m

    # -- scalar ops (elements are plain ints in [0, 2^m)) --------------------

    def _check(self, *elems: int) -> None:
        for e in elems:
            if not 0 <= e < self.order:
                raise ValueError("element out of range")

    @staticmethod
    def add(a: int, b: int) -> int:
        return a ^ b

    def mul(self, a: int, b: int) -> int:
        self._check(a, b)
        lo, hi = _kernels.gf_mul(
            np.uint64(a & 0xFFFFFFFFFFFFFFFF),
            np.uint64(a >> 64),
            np.uint64(b & 0xFFFFFFFFFFFFFFFF),
            np.uint64(b >> 64),
            self.m,
            self._mlo,
            self._mhi,
        )
        return int(lo) | (int(hi) << 64)

    def inv(self, a: int) -> int:
        self._check(a)
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        lo, hi = _kernels.gf_inv(
            np.uint64(a & 0xFFFFFFFFFFFFFFFF),
            np.uint64(a >> 64),
            self.m,
            self._mlo,
            self._mhi,
        )
        return int(lo) | (int(hi) << 64)

    def frobenius(self, a: int, k: int = 1) -> int:
        """a^(2^k); k = 1 is the squaring map."""
        self._check(a)
        lo, hi = _kernels.gf_pow2k(
            np.uint64(a & 0xFFFFFFFFFFFFFFFF),
            np.uint64(a >> 64),
            k % self.m if k >= 0 else (k % self.m),
            self.m,
            self._mlo,
            self._mhi,
        )
        return int(lo) | (int(hi) << 64)

    # -- array helpers (shape (..., 2) uint64 limbs) --------------------------

    def to_limbs(self, elems) -> np.ndarray:
        arr = np.empty((len(elems), 2), dtype=np.uint64)
        for i, e in enumerate(elems):
            arr[i, 0] = e & 0xFFFFFFFFFFFFFFFF
            arr[i, 1] = e >> 64
        return arr

    @staticmethod
    def from_limbs(arr: np.ndarray) -> list[int]:
        return [int(lo) | (int(hi) << 64) for lo, hi in arr]

    def random_elements(self, n: int, xof) -> list[int]:
        return [xof.randrange(self.order) for _ in range(n)]

    def vector_to_bitmatrix(self, elems) -> BitMatrix:
        """n x m matrix whose row i holds the basis coefficients of elems[i]."""
        dense = np.zeros((len(elems), self.m), dtype=np.uint8)
        for i, e in enumerate(elems):
            for j in range(self.m):
                dense[i, j] = (e >> j) & 1
        return BitMatrix.from_dense(dense)

    def rank_of_vector(self, elems) -> int:
        """GF(2)-rank of the span of field elements."""
        return self.vector_to_bitmatrix(elems).rank()

    def __repr__(self) -> str:
        return f"FieldCtx(m={self.m}, modulus={self.modulus:#x})"


# ---------------------------------------------------------------------------
# linearized polynomials
# ---------------------------------------------------------------------------


class QPoly:
    """Linearized polynomial sum_j coeffs[j] * X^(2^j) over a FieldCtx."""

    def __init__(self, ctx: FieldCtx, coeffs):
        self.ctx = ctx
        coeffs = list(coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        ctx._check(*coeffs)
        self.coeffs = coeffs

    @property
    def qdeg(self) -> int:
        """q-degree (index of the highest nonzero coefficient; -1 for zero)."""
        return len(self.coeffs) - 1

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QPoly)
            and self.ctx is other.ctx
            and self.coeffs == other.coeffs
        )

    def __call__(self, x: int) -> int:
        return self.eval(x)

    def eval(self, x: int) -> int:
        ctx = self.ctx
        acc = 0
        pw = x
        for c in self.coeffs:
            acc ^= ctx.mul(c, pw)
            pw = ctx.frobenius(pw)
        return acc

    def eval_many(self, xs) -> list[int]:
        if not self.coeffs:
            return [0] * len(xs)
        ctx = self.ctx
        coeffs = ctx.to_limbs(self.coeffs)
        pts = ctx.to_limbs(xs)
        out = np.empty_like(pts)
        _kernels.qpoly_eval_many(coeffs, pts, out, ctx.m, ctx._mlo, ctx._mhi)
        return ctx.from_limbs(out)

    def __add__(self, other: "QPoly") -> "QPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [0] * (n - len(self.coeffs))
        b = other.coeffs + [0] * (n - len(other.coeffs))
        return QPoly(self.ctx, [x ^ y for x, y in zip(a, b)])

    def compose(self, other: "QPoly") -> "QPoly":
        """(self o other): x -> self(other(x)); q-degrees add."""
        ctx = self.ctx
        if not self.coeffs or not other.coeffs:
            return QPoly(ctx, [])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, p in enumerate(self.coeffs):
            if p == 0:
                continue
            for j, q in enumerate(other.coeffs):
                if q == 0:
                    continue
                out[i + j] ^= ctx.mul(p, ctx.frobenius(q, i))
        return QPoly(ctx, out)


def qpoly_interpolate(ctx: FieldCtx, points) -> QPoly:
    """Unique P with q-degree < len(points) and P(x_i) = y_i.

    Requires the x_i to be linearly independent over GF(2); raises
    ValueError otherwise (the generalized Vandermonde system is singular).
    """
    n = len(points)
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    if n == 0:
        return QPoly(ctx, [])
    # system A[i][j] = x_i^(2^j), augmented with y
    mat = np.zeros((n, n + 1, 2), dtype=np.uint64)
    for i, x in enumerate(xs):
        v = x
        for j in range(n):
            mat[i, j, 0] = v & 0xFFFFFFFFFFFFFFFF
            mat[i, j, 1] = v >> 64
        ys_i = ys[i]
        mat[i, n, 0] = ys_i & 0xFFFFFFFFFFFFFFFF
        mat[i, n, 1] = ys_i >> 64
    # fill powers: column j+1 = frobenius of column j
    for j in range(1, n):
        for i in range(n):
            e = int(mat[i, j - 1, 0]) | (int(mat[i, j - 1, 1]) << 64)
            e = ctx.frobenius(e)
            mat[i, j, 0] = e & 0xFFFFFFFFFFFFFFFF
            mat[i, j, 1] = e >> 64
    pivots = np.zeros(n + 1, dtype=np.int64)
    rank = int(_kernels.gf_rref(mat, ctx.m, ctx._mlo, ctx._mhi, pivots))
    if rank < n or pivots[rank - 1] == n:
        raise ValueError("interpolation points are GF(2)-dependent")
    coeffs = [int(mat[i, n, 0]) | (int(mat[i, n, 1]) << 64) for i in range(n)]
    return QPoly(ctx, coeffs)
