"""Compiled kernels for bit-packed GF(2) linear algebra and GF(2^m) arithmetic.

Conventions
-----------
* A GF(2) matrix is a ``(rows, nwords)`` uint64 array; bit ``j`` of a row is
  stored in word ``j // 64`` at position ``j % 64`` (LSB-first).  Padding bits
  beyond the column count are kept at zero.
* A GF(2^m) element (m <= 128) is a pair of uint64 limbs ``(lo, hi)`` holding
  the coefficients of its polynomial-basis representation.
* All kernels are single-threaded; the package targets one core.
"""

from __future__ import annotations

import numpy as np
from numba import njit, uint64

_U1 = np.uint64(1)


@njit(cache=True, inline="always")
def _ctz(v):
    """Index of the least significant set bit of a nonzero uint64."""
    n = 0
    if v & uint64(0xFFFFFFFF) == uint64(0):
        n += 32
        v >>= uint64(32)
    if v & uint64(0xFFFF) == uint64(0):
        n += 16
        v >>= uint64(16)
    if v & uint64(0xFF) == uint64(0):
        n += 8
        v >>= uint64(8)
    if v & uint64(0xF) == uint64(0):
        n += 4
        v >>= uint64(4)
    if v & uint64(0x3) == uint64(0):
        n += 2
        v >>= uint64(2)
    if v & uint64(0x1) == uint64(0):
        n += 1
    return n


@njit(cache=True)
def rref_inplace(w, ncols, pivots):
    """Reduce ``w`` to reduced row-echelon form over its first ``ncols`` columns.

    Row operations act on the full word width of ``w``, so callers may augment
    extra columns (e.g. an identity block) to recover the row transform.
    Pivot selection is deterministic: leftmost column first, topmost row first.
    ``pivots`` must have room for ``min(rows, ncols)`` entries; the pivot
    column indices are written there in increasing order.

    Returns the rank.

    The elimination is blocked over 64-column panels ("method of the four
    Russians"): each panel selects its pivot rows with a single-word
    mini-elimination, fully reduces those rows against each other, then clears
    the panel from every other row with 8-bit lookup tables.
    """
    nrows, twords = w.shape
    npanels = (ncols + 63) >> 6
    rank = 0
    tables = np.zeros((8, 256, twords), dtype=np.uint64)
    colw = np.zeros(nrows, dtype=np.uint64)
    chosen = np.zeros(nrows, dtype=np.uint8)
    piv_rows = np.zeros(64, dtype=np.int64)
    piv_bits = np.zeros(64, dtype=np.int64)

    for p in range(npanels):
        if rank >= nrows:
            break
        base = p << 6
        nbits = min(64, ncols - base)

        # --- select panel pivots with a mini-elimination on the panel word
        for i in range(rank, nrows):
            colw[i] = w[i, p]
            chosen[i] = 0
        npiv = 0
        for b in range(nbits):
            mask = _U1 << uint64(b)
            sel = -1
            for i in range(rank, nrows):
                if chosen[i] == 0 and (colw[i] & mask) != uint64(0):
                    sel = i
                    break
            if sel < 0:
                continue
            chosen[sel] = 1
            piv_rows[npiv] = sel
            piv_bits[npiv] = b
            npiv += 1
            pv = colw[sel]
            for i in range(rank, nrows):
                if i != sel and (colw[i] & mask) != uint64(0):
                    colw[i] ^= pv
        if npiv == 0:
            continue

        # --- reduce the pivot rows against each other (full width)
        for a in range(npiv):
            ra = piv_rows[a]
            ba = uint64(piv_bits[a])
            for c in range(npiv):
                if c == a:
                    continue
                rc = piv_rows[c]
                if (w[rc, p] >> ba) & _U1:
                    for t in range(p, twords):
                        w[rc, t] ^= w[ra, t]

        # --- build 8-bit combination tables over the pivot rows
        wleft = twords - p
        ntab = (npiv + 7) >> 3
        for k in range(ntab):
            lo = k << 3
            cnt = min(8, npiv - lo)
            size = 1 << cnt
            for t in range(wleft):
                tables[k, 0, t] = uint64(0)
            for idx in range(1, size):
                lsb = idx & (-idx)
                j = _ctz(uint64(lsb))
                src = piv_rows[lo + j]
                prev = idx ^ lsb
                for t in range(wleft):
                    tables[k, idx, t] = tables[k, prev, t] ^ w[src, p + t]

        # --- clear the panel columns from every non-pivot row
        contiguous = npiv == 64
        if contiguous:
            for j in range(64):
                if piv_bits[j] != j:
                    contiguous = False
                    break
        for i in range(nrows):
            skip = False
            for a in range(npiv):
                if piv_rows[a] == i:
                    skip = True
                    break
            if skip:
                continue
            v = w[i, p]
            if contiguous:
                idx = v
            else:
                idx = uint64(0)
                for j in range(npiv):
                    idx |= ((v >> uint64(piv_bits[j])) & _U1) << uint64(j)
            if idx == uint64(0):
                continue
            for k in range(ntab):
                part = (idx >> uint64(k << 3)) & uint64(0xFF)
                if part != uint64(0):
                    ip = np.int64(part)
                    for t in range(wleft):
                        w[i, p + t] ^= tables[k, ip, t]

        # --- move pivot rows into place (keeps pivot order by column)
        for a in range(npiv):
            target = rank + a
            src = piv_rows[a]
            if src != target:
                for t in range(twords):
                    tmp = w[target, t]
                    w[target, t] = w[src, t]
                    w[src, t] = tmp
                for c in range(a + 1, npiv):
                    if piv_rows[c] == target:
                        piv_rows[c] = src
                        break
            pivots[rank + a] = base + piv_bits[a]
        rank += npiv
    return rank


@njit(cache=True)
def transpose(win, nrows, ncols, wout):
    """Bit-transpose ``win`` (nrows x ncols) into ``wout`` (ncols rows)."""
    nbr = (nrows + 63) >> 6
    nbc = (ncols + 63) >> 6
    blk = np.zeros(64, dtype=np.uint64)
    for bi in range(nbr):
        r0 = bi << 6
        rcnt = min(64, nrows - r0)
        for bj in range(nbc):
            c0 = bj << 6
            ccnt = min(64, ncols - c0)
            for r in range(rcnt):
                blk[r] = win[r0 + r, bj]
            for r in range(rcnt, 64):
                blk[r] = uint64(0)
            # 64x64 in-register transpose (swap network, LSB-first bit order)
            j = 32
            m = uint64(0x00000000FFFFFFFF)
            while j != 0:
                k = 0
                while k < 64:
                    t = ((blk[k] >> uint64(j)) ^ blk[k + j]) & m
                    blk[k] ^= t << uint64(j)
                    blk[k + j] ^= t
                    k = (k + j + 1) & ~j
                j >>= 1
                m ^= m << uint64(j)
            for c in range(ccnt):
                wout[c0 + c, bi] = blk[c]


@njit(cache=True)
def mul_rowcomb(aw, colsa, bw, cw):
    """Matrix product C = A * B over GF(2) by row combination.

    ``aw`` is rowsA x wordsA (colsa columns), ``bw`` is colsa x wordsB,
    ``cw`` (zero-initialised) receives rowsA x wordsB.
    """
    rowsa, wordsa = aw.shape
    wordsb = bw.shape[1]
    for i in range(rowsa):
        for jw in range(wordsa):
            v = aw[i, jw]
            base = jw << 6
            while v != uint64(0):
                b = _ctz(v)
                v &= v - _U1
                col = base + b
                if col < colsa:
                    for t in range(wordsb):
                        cw[i, t] ^= bw[col, t]


@njit(cache=True)
def reverse_cols(win, ncols, wout):
    """Write ``win`` with column order reversed into ``wout``."""
    nrows = win.shape[0]
    for i in range(nrows):
        for j in range(ncols):
            jj = ncols - 1 - j
            bit = (win[i, j >> 6] >> uint64(j & 63)) & _U1
            if bit:
                wout[i, jj >> 6] |= _U1 << uint64(jj & 63)


@njit(cache=True)
def kernel_from_reversed_rref(rw, ncols, rank, pivots, kw):
    """Assemble the RREF kernel basis from a reversed-column RREF.

    ``rw``/``pivots`` describe RREF(M with columns reversed); the kernel of M
    then has the unique RREF basis whose row for each reversed-free column
    ``f`` (taken in descending order) has a leading 1 at original column
    ``ncols-1-f`` and entries ``rw[i, f]`` at original columns
    ``ncols-1-pivots[i]``.
    """
    is_piv = np.zeros(ncols, dtype=np.uint8)
    for i in range(rank):
        is_piv[pivots[i]] = 1
    row = 0
    for f in range(ncols - 1, -1, -1):
        if is_piv[f]:
            continue
        lead = ncols - 1 - f
        kw[row, lead >> 6] |= _U1 << uint64(lead & 63)
        for i in range(rank):
            if (rw[i, f >> 6] >> uint64(f & 63)) & _U1:
                c = ncols - 1 - pivots[i]
                kw[row, c >> 6] |= _U1 << uint64(c & 63)
        row += 1


@njit(cache=True)
def gather_cols(win, cols, wout):
    """wout[:, j] = win[:, cols[j]] (bit gather)."""
    nrows = win.shape[0]
    for i in range(nrows):
        for j in range(cols.shape[0]):
            c = cols[j]
            if (win[i, c >> 6] >> uint64(c & 63)) & _U1:
                wout[i, j >> 6] |= _U1 << uint64(j & 63)


@njit(cache=True)
def scatter_cols(win, cols, wout):
    """wout[:, cols[j]] = win[:, j] (bit scatter)."""
    nrows = win.shape[0]
    for i in range(nrows):
        for j in range(cols.shape[0]):
            if (win[i, j >> 6] >> uint64(j & 63)) & _U1:
                c = cols[j]
                wout[i, c >> 6] |= _U1 << uint64(c & 63)


# ---------------------------------------------------------------------------
# GF(2^m) arithmetic on two-limb elements
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def gf_mul(alo, ahi, blo, bhi, m, mlo, mhi):
    """Product in GF(2^m); ``(mlo, mhi)`` hold the modulus minus x^m."""
    rlo = uint64(0)
    rhi = uint64(0)
    if m <= 64:
        topmask = _U1 << uint64(m - 1)
        for i in range(m - 1, -1, -1):
            top = rlo & topmask
            rlo <<= _U1
            if top != uint64(0):
                rlo ^= mlo
                rlo &= (topmask << _U1) - _U1 if m < 64 else ~uint64(0)
            if (blo >> uint64(i)) & _U1:
                rlo ^= alo
        if m < 64:
            rlo &= (_U1 << uint64(m)) - _U1
        return rlo, uint64(0)
    topmask = _U1 << uint64(m - 65)
    himask = (topmask << _U1) - _U1
    for i in range(m - 1, -1, -1):
        top = rhi & topmask
        rhi = ((rhi << _U1) | (rlo >> uint64(63))) & himask
        rlo <<= _U1
        if top != uint64(0):
            rlo ^= mlo
            rhi ^= mhi
        if i >= 64:
            bit = (bhi >> uint64(i - 64)) & _U1
        else:
            bit = (blo >> uint64(i)) & _U1
        if bit:
            rlo ^= alo
            rhi ^= ahi
    return rlo, rhi


@njit(cache=True, inline="always")
def gf_sq(alo, ahi, m, mlo, mhi):
    return gf_mul(alo, ahi, alo, ahi, m, mlo, mhi)


@njit(cache=True)
def gf_inv(alo, ahi, m, mlo, mhi):
    """Inverse via a^(2^m - 2); a must be nonzero."""
    slo, shi = alo, ahi
    rlo, rhi = uint64(1), uint64(0)
    first = True
    for _ in range(m - 1):
        slo, shi = gf_sq(slo, shi, m, mlo, mhi)
        if first:
            rlo, rhi = slo, shi
            first = False
        else:
            rlo, rhi = gf_mul(rlo, rhi, slo, shi, m, mlo, mhi)
    return rlo, rhi


@njit(cache=True)
def gf_pow2k(alo, ahi, k, m, mlo, mhi):
    """k-fold Frobenius a^(2^k)."""
    for _ in range(k):
        alo, ahi = gf_sq(alo, ahi, m, mlo, mhi)
    return alo, ahi


@njit(cache=True)
def gf_mul_vec(a, b, out, m, mlo, mhi):
    """Componentwise products of element arrays shaped (n, 2)."""
    for i in range(a.shape[0]):
        lo, hi = gf_mul(a[i, 0], a[i, 1], b[i, 0], b[i, 1], m, mlo, mhi)
        out[i, 0] = lo
        out[i, 1] = hi


@njit(cache=True)
def gf_rref(mat, m, mlo, mhi, pivots):
    """Gauss-Jordan over GF(2^m) on ``mat`` shaped (rows, cols, 2).

    Deterministic leftmost-column / topmost-row pivoting.  Returns the rank;
    pivot column indices go to ``pivots``.
    """
    rows, cols = mat.shape[0], mat.shape[1]
    rank = 0
    for c in range(cols):
        if rank >= rows:
            break
        sel = -1
        for i in range(rank, rows):
            if mat[i, c, 0] != uint64(0) or mat[i, c, 1] != uint64(0):
                sel = i
                break
        if sel < 0:
            continue
        if sel != rank:
            for j in range(cols):
                for t in range(2):
                    tmp = mat[rank, j, t]
                    mat[rank, j, t] = mat[sel, j, t]
                    mat[sel, j, t] = tmp
        ilo, ihi = gf_inv(mat[rank, c, 0], mat[rank, c, 1], m, mlo, mhi)
        for j in range(c, cols):
            lo, hi = gf_mul(mat[rank, j, 0], mat[rank, j, 1], ilo, ihi, m, mlo, mhi)
            mat[rank, j, 0] = lo
            mat[rank, j, 1] = hi
        for i in range(rows):
            if i == rank:
                continue
            flo, fhi = mat[i, c, 0], mat[i, c, 1]
            if flo == uint64(0) and fhi == uint64(0):
                continue
            for j in range(c, cols):
                lo, hi = gf_mul(flo, fhi, mat[rank, j, 0], mat[rank, j, 1], m, mlo, mhi)
                mat[i, j, 0] ^= lo
                mat[i, j, 1] ^= hi
        pivots[rank] = c
        rank += 1
    return rank


@njit(cache=True)
def qpoly_eval_many(coeffs, points, out, m, mlo, mhi):
    """Evaluate the linearized polynomial sum_j coeffs[j] * x^(2^j) at points."""
    deg1 = coeffs.shape[0]
    for i in range(points.shape[0]):
        plo, phi = points[i, 0], points[i, 1]
        acc_lo = uint64(0)
        acc_hi = uint64(0)
        for j in range(deg1):
            lo, hi = gf_mul(coeffs[j, 0], coeffs[j, 1], plo, phi, m, mlo, mhi)
            acc_lo ^= lo
            acc_hi ^= hi
            plo, phi = gf_sq(plo, phi, m, mlo, mhi)
        out[i, 0] = acc_lo
        out[i, 1] = acc_hi
