"""Single-bit rank-support encryption (the warm-up scheme).

Keys: l1 independent uniform matrix codes with one noisy codeword each; the
noise matrices share a single column support of dimension r.  Encrypting 1
sends l2 uniform matrices; encrypting 0 sends l2 elements of the dual of the
summed public code, each masked by an error with a shared row support of
dimension d.  Decryption computes the l2 x l1 matrix of trace inner products
between ciphertext and secret matrices and thresholds its rank at r*d: the
shared-support rank bound makes the 0-branch deterministic, while uniform
ciphertexts exceed the threshold with probability 1 - O(2^(rd+1-l2)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bitmat import BitMatrix
from .codes import (
    inner_product_matrix,
    sample_error_column_support,
    sample_error_row_support,
    sample_support,
    stack_vectorized,
)
from .rng import Expander


@dataclass(frozen=True)
class OneBitParams:
    m: int
    n: int
    l1: int
    l2: int
    ks: tuple[int, ...]  # per-instance code dimensions k_1..k_l1
    r: int
    d: int

    def __post_init__(self):
        problems = self.validate()
        if problems:
            raise ValueError("; ".join(problems))

    def validate(self) -> list[str]:
        p = []
        if len(self.ks) != self.l1:
            p.append("need one k_j per public instance")
        if any(k > self.m * self.n for k in self.ks):
            p.append("k_j exceeds mn")
        if not self.m >= self.n:
            p.append("need m >= n")
        if not self.n > self.r:
            p.append("need n > r")
        if not self.r >= self.d >= 1:
            p.append("need r >= d >= 1")
        if not self.r * self.d < min(self.l1, self.l2):
            p.append("need rd < min(l1, l2)")
        return p

    @classmethod
    def equal_dims(cls, m: int, n: int, l1: int, l2: int, k: int, r: int, d: int):
        return cls(m, n, l1, l2, (k,) * l1, r, d)


@dataclass(frozen=True)
class OneBitPublicKey:
    bases: tuple[BitMatrix, ...]  # B^(j): k_j x mn vectorized generators
    ys: tuple[BitMatrix, ...]  # Y^(j): 1 x mn noisy codewords


@dataclass(frozen=True)
class OneBitSecretKey:
    errors: tuple[BitMatrix, ...]  # E^(j): m x n, shared column support


def ob_keygen(p: OneBitParams, xof: Expander) -> tuple[OneBitPublicKey, OneBitSecretKey]:
    support = sample_support(p.m, p.r, xof)
    bases = []
    ys = []
    errors = []
    for j in range(p.l1):
        b = BitMatrix.random(p.ks[j], p.m * p.n, xof)
        lam = BitMatrix.random(1, p.ks[j], xof)
        e = sample_error_column_support(support, p.n, xof).matrix
        y = lam.mul(b) + stack_vectorized([e])
        bases.append(b)
        ys.append(y)
        errors.append(e)
    return OneBitPublicKey(tuple(bases), tuple(ys)), OneBitSecretKey(tuple(errors))


def summed_code_rows(p: OneBitParams, pk: OneBitPublicKey) -> BitMatrix:
    """All public generators and noisy codewords stacked (the summed span)."""
    dense = np.vstack(
        [b.to_dense() for b in pk.bases] + [y.to_dense() for y in pk.ys]
    )
    return BitMatrix.from_dense(dense)


def ob_encrypt(p: OneBitParams, pk: OneBitPublicKey, bit: int,
               xof: Expander) -> list[BitMatrix]:
    """Encrypt one bit; returns l2 matrices of shape m x n."""
    if bit not in (0, 1):
        raise ValueError("plaintext must be a bit")
    if bit == 1:
        return [BitMatrix.random(p.m, p.n, xof) for _ in range(p.l2)]
    dual_basis = summed_code_rows(p, pk).kernel_basis()
    support = sample_support(p.n, p.d, xof)
    out = []
    for _ in range(p.l2):
        coeff = BitMatrix.random(1, dual_basis.rows, xof)
        cperp = coeff.mul(dual_basis)
        f = sample_error_row_support(support, p.m, xof).matrix
        mat = BitMatrix.from_dense(
            cperp.to_dense().reshape(p.m, p.n) ^ f.to_dense()
        )
        out.append(mat)
    return out


def ob_decision_matrix(p: OneBitParams, sk: OneBitSecretKey,
                       ct: list[BitMatrix]) -> BitMatrix:
    if len(ct) != p.l2 or any(c.rows != p.m or c.cols != p.n for c in ct):
        raise ValueError("ciphertext shape mismatch")
    return inner_product_matrix(list(sk.errors), ct)


def ob_decrypt(p: OneBitParams, sk: OneBitSecretKey, ct: list[BitMatrix]) -> int:
    return 0 if ob_decision_matrix(p, sk, ct).rank() <= p.r * p.d else 1


def demo_params(l2: int = 6) -> OneBitParams:
    """Canonical experiment point: n = rd + 1 keeps the vectorized secret
    errors in an (rd+1)-dimensional space, so the Enc(1) misdecode rate sits
    at the q^(rd+1-l2) scale of the failure bound rather than far below it."""
    return OneBitParams.equal_dims(m=8, n=2, l1=8, l2=l2, k=1, r=1, d=1)


def misdecode_trial(p: OneBitParams, seed: bytes, bit: int) -> tuple[int, int]:
    """One seeded trial; returns (decrypted bit, decision-matrix rank)."""
    xof = Expander(seed, b"onebit-demo")
    pk, sk = ob_keygen(p, xof)
    ct = ob_encrypt(p, pk, bit, xof)
    d = ob_decision_matrix(p, sk, ct)
    return (0 if d.rank() <= p.r * p.d else 1), d.rank()
