"""Desk-scale executable attacks that validate the cost models: kernel
guessing on single low-rank-codeword instances, the augmented-code
construction for multi-instance inputs, brute-force oracles for tiny
shapes, and a full support-recovery pipeline.

Everything here runs at toy sizes only; at the registered parameter sets
these procedures are exactly what the estimator prices out of reach.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bitmat import BitMatrix, random_full_rank
from .codes import (
    MatrixCode,
    Subspace,
    augment,
    column_support,
    rho,
    rho_inv,
    sample_error_column_support,
    sample_support,
    stack_vectorized,
)
from .estimator import MinRankShape, MslShape
from .rng import Expander


class Exhausted(Exception):
    """Guess budget exceeded; carries the number of iterations spent."""

    def __init__(self, iterations: int):
        super().__init__(f"budget exhausted after {iterations} iterations")
        self.iterations = iterations


class TooLarge(Exception):
    """Brute-force request beyond the enumeration cap."""


@dataclass(frozen=True)
class MinRankInstance:
    shape: MinRankShape
    code: MatrixCode
    planted: BitMatrix | None = None  # m x n error of rank <= t, if known

    def __post_init__(self):
        if self.code.dim != self.shape.k:
            raise ValueError("code dimension does not match shape")
        if self.planted is not None:
            if self.planted.rank() > self.shape.t:
                raise ValueError("planted error rank exceeds t")
            if not self.code.contains(rho(self.planted)):
                raise ValueError("planted error is not in the code")


@dataclass(frozen=True)
class MslInstance:
    """Multi-instance input: one code, N targets sharing a column support."""

    shape: MslShape
    code: MatrixCode
    targets: list[BitMatrix]  # N matrices Y_j = c_j + E_j, each m x n
    errors: list[BitMatrix]  # the planted E_j (verification only)
    support: Subspace  # the planted shared column support, dim t


def random_instance(shape: MinRankShape, xof: Expander, plant: bool = True) -> MinRankInstance:
    """Random code of the right dimension, optionally containing a planted
    rank-t matrix."""
    if shape.q != 2:
        raise ValueError("executable attacks are implemented for q = 2")
    m, n, k, t = shape.m, shape.n, shape.k, shape.t
    if not plant:
        return MinRankInstance(shape, MatrixCode.random(m, n, k, xof))
    while True:
        support = sample_support(m, t, xof)
        err = sample_error_column_support(support, n, xof).matrix
        rows = BitMatrix.random(k - 1, m * n, xof)
        code = MatrixCode.from_rows(m, n, BitMatrix.from_dense(
            np.vstack([rows.to_dense(), rho(err).to_dense()])
        ))
        if code.dim == k:
            return MinRankInstance(shape, code, err)


def sample_msl_instance(shape: MslShape, xof: Expander) -> MslInstance:
    """N targets Y_j = c_j + E_j with independent E_j sharing one support."""
    m, n = shape.m, shape.n
    while True:
        support = sample_support(m, shape.t, xof)
        errors = [sample_error_column_support(support, n, xof).matrix
                  for _ in range(shape.N)]
        if stack_vectorized(errors).rank() == shape.N:
            break
    code = MatrixCode.random(m, n, shape.k, xof)
    targets = [rho_inv(code.sample_codeword(xof) + rho(e), m, n) for e in errors]
    return MslInstance(shape, code, targets, errors, support)


# ---------------------------------------------------------------------------
# kernel attack
# ---------------------------------------------------------------------------


def _low_rank_solutions(code_mats: list[BitMatrix], gen: BitMatrix,
                        w: BitMatrix, t: int) -> list[BitMatrix]:
    """Nonzero code elements E (from the kernel-basis solutions of E*W = 0)
    with rank <= t."""
    m, n = code_mats[0].rows, code_mats[0].cols
    rows = [rho(b.mul(w)) for b in code_mats]
    system = BitMatrix.from_dense(np.vstack([r.to_dense() for r in rows]))
    sols = system.transpose().kernel_basis()  # x with sum x_i vec(B_i W) = 0
    found = []
    for i in range(sols.rows):
        coeff = BitMatrix.from_dense(sols.to_dense()[i : i + 1])
        cand = rho_inv(coeff.mul(gen), m, n)
        if not cand.is_zero() and cand.rank() <= t:
            found.append(cand)
    return found


def kernel_attack(inst: MinRankInstance, xof: Expander,
                  max_iters: int = 1 << 16) -> tuple[BitMatrix, int]:
    """Guess an l-dimensional subspace W of F_2^n with E*W = 0, l = ceil(k/m).

    Each guess solves the linear system over the code coefficients and tests
    every kernel-basis solution for rank <= t.  Returns (E, iterations used).
    """
    shape = inst.shape
    if shape.k >= shape.m * shape.n:
        raise ValueError("instance dimension must be below m*n")
    m, n, t = shape.m, shape.n, shape.t
    if t >= min(m, n) and shape.k >= 1:
        # the rank condition is vacuous; any nonzero code element qualifies
        first = rho_inv(
            BitMatrix.from_dense(inst.code.gen.to_dense()[:1]), m, n
        )
        return first, 1
    ell = -(-shape.k // m)
    code_mats = [rho_inv(BitMatrix.from_dense(inst.code.gen.to_dense()[i : i + 1]), m, n)
                 for i in range(shape.k)]
    gen = inst.code.gen
    for it in range(1, max_iters + 1):
        w = random_full_rank(min(ell, n), n, xof).transpose()  # n x l
        found = _low_rank_solutions(code_mats, gen, w, t)
        if found:
            return found[0], it
    raise Exhausted(max_iters)


def brute_force_minrank(inst: MinRankInstance) -> list[BitMatrix]:
    """All nonzero rank-<=t code elements, by enumerating the whole code."""
    shape = inst.shape
    if shape.q**shape.k > 1 << 24:
        raise TooLarge("code too large to enumerate")
    m, n = shape.m, shape.n
    gen = inst.code.gen.to_dense()
    out = []
    for mask in range(1, 1 << shape.k):
        acc = np.zeros(m * n, dtype=np.uint8)
        mm = mask
        while mm:
            i = (mm & -mm).bit_length() - 1
            acc ^= gen[i]
            mm &= mm - 1
        cand = BitMatrix.from_dense(acc.reshape(m, n))
        if cand.rank() <= shape.t:
            out.append(cand)
    return out


# ---------------------------------------------------------------------------
# multi-instance machinery
# ---------------------------------------------------------------------------


def build_caug(msl: MslInstance) -> MinRankInstance:
    """Span(B_1..B_k, Y_1..Y_N): a (k+N)-dimensional instance containing
    every planted error (each E_j = Y_j - c_j lies in the span)."""
    aug = augment(msl.code, stack_vectorized(msl.targets))
    shape = MinRankShape(msl.shape.q, msl.shape.m, msl.shape.n, aug.dim, msl.shape.t)
    planted = msl.errors[0] if aug.contains(rho(msl.errors[0])) else None
    return MinRankInstance(shape, aug, planted)


def _error_combinations(msl: MslInstance):
    """All nonzero F_2-combinations of the planted errors."""
    if (1 << msl.shape.N) > 1 << 20:
        raise TooLarge("too many combinations to enumerate")
    m, n = msl.shape.m, msl.shape.n
    dense = [e.to_dense() for e in msl.errors]
    for mask in range(1, 1 << msl.shape.N):
        acc = np.zeros((m, n), dtype=np.uint8)
        mm = mask
        while mm:
            i = (mm & -mm).bit_length() - 1
            acc ^= dense[i]
            mm &= mm - 1
        yield BitMatrix.from_dense(acc)


def verify_shortening(msl: MslInstance, a: int | None = None) -> bool:
    """Does some combination of the errors have its first a columns zero?
    Guaranteed (for independent errors) when a <= floor((N-1)/t)."""
    if a is None:
        a = (msl.shape.N - 1) // msl.shape.t
    if a == 0:
        return True
    m = msl.shape.m
    for cand in _error_combinations(msl):
        cols = cand.to_dense()[:, :a]
        if not cols.any():
            return True
    return False


def lowest_combination_rank(msl: MslInstance) -> int:
    """Minimum rank over all nonzero combinations of the planted errors."""
    return min(c.rank() for c in _error_combinations(msl))


# ---------------------------------------------------------------------------
# support recovery pipeline
# ---------------------------------------------------------------------------


def recover_support(codeword: BitMatrix) -> Subspace:
    """Column support of a found low-rank codeword."""
    return column_support(codeword)


def support_consistent(msl: MslInstance, support: Subspace) -> bool:
    """True iff every target equals codeword + error with columns in the
    support: with L the left annihilator of the support, L*Y_j must lie in
    the projected code L*C."""
    m, n = msl.shape.m, msl.shape.n
    annihilator = support.basis.kernel_basis()  # (m - dim) x m, L * s = 0
    if annihilator.rows == 0:
        return True
    rows = annihilator.rows
    proj_gen = []
    for i in range(msl.code.dim):
        b = rho_inv(BitMatrix.from_dense(msl.code.gen.to_dense()[i : i + 1]), m, n)
        proj_gen.append(rho(annihilator.mul(b)))
    proj_code = MatrixCode.from_rows(rows, n, BitMatrix.from_dense(
        np.vstack([r.to_dense() for r in proj_gen])
    ))
    return all(proj_code.contains(rho(annihilator.mul(y))) for y in msl.targets)


def msl_attack_pipeline(msl: MslInstance, xof: Expander,
                        max_iters: int = 1 << 16) -> tuple[Subspace, int]:
    """Augment, kernel-attack the augmented code, and recover the shared
    support from the found low-rank codeword; re-validated against every
    target before returning."""
    inst = build_caug(msl)
    spent = 0
    while spent < max_iters:
        word, iters = kernel_attack(inst, xof, max_iters - spent)
        spent += iters
        support = recover_support(word)
        if support.dim <= msl.shape.t and support_consistent(msl, support):
            return support, spent
    raise Exhausted(spent)
