"""Toy-scale search-to-decision reduction: hybrid distributions over
syndrome instances, the rank-one-update predictor embedding, and
Goldreich-Levin list decoding of the noisy inner-product predictor.

Instances are in dual (syndrome) form: each of N instances is a pair
(H_j, s_j) with H_j a full-rank (mn-k) x mn check matrix and s_j either the
syndrome of a low-rank error (all errors sharing one column support) or a
uniform vector.  The hybrid H_i has the first i instances real.

Given a distinguisher between adjacent hybrids, the predictor embeds the
inner product e*r into the challenge via M := H + u^T r: the modified
instance is real exactly when e*r = 0.  Goldreich-Levin then list-decodes
e from the predictor, and candidates are validated against every syndrome
before the recovered support is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bitmat import BitMatrix, NoSolution, random_full_rank, solve
from .codes import Subspace, column_support, rho, rho_inv, sample_error_column_support, sample_support
from .estimator import MslShape
from .rng import Expander


class ReductionFailure(Exception):
    """No candidate of any hybrid index passed syndrome validation."""


@dataclass(frozen=True)
class HybridSample:
    """What a distinguisher sees: N checks with real or uniform syndromes."""

    index: int  # number of leading real instances
    checks: list[BitMatrix]
    syndromes: list[BitMatrix]


@dataclass(frozen=True)
class DualInstance:
    """A fully real instance plus its secrets (verification only)."""

    shape: MslShape
    checks: list[BitMatrix]
    syndromes: list[BitMatrix]
    errors: list[BitMatrix]
    support: Subspace


def _random_check(shape: MslShape, xof: Expander) -> BitMatrix:
    return random_full_rank(shape.m * shape.n - shape.k, shape.m * shape.n, xof)


def sample_dual_instance(shape: MslShape, xof: Expander) -> DualInstance:
    support = sample_support(shape.m, shape.t, xof)
    checks, syndromes, errors = [], [], []
    for _ in range(shape.N):
        h = _random_check(shape, xof)
        e = sample_error_column_support(support, shape.n, xof).matrix
        checks.append(h)
        errors.append(e)
        syndromes.append(rho(e).mul_t(h))
    return DualInstance(shape, checks, syndromes, errors, support)


def sample_hybrid(shape: MslShape, i: int, xof: Expander) -> HybridSample:
    """Exact hybrid distribution: first i real, the rest uniform."""
    if not 0 <= i <= shape.N:
        raise ValueError("hybrid index out of range")
    support = sample_support(shape.m, shape.t, xof)
    checks, syndromes = [], []
    for j in range(shape.N):
        h = _random_check(shape, xof)
        checks.append(h)
        if j < i:
            e = sample_error_column_support(support, shape.n, xof).matrix
            syndromes.append(rho(e).mul_t(h))
        else:
            syndromes.append(BitMatrix.random(1, h.rows, xof))
    return HybridSample(i, checks, syndromes)


# ---------------------------------------------------------------------------
# demonstration oracles
# ---------------------------------------------------------------------------


def _low_rank_candidates(m: int, n: int, t: int) -> BitMatrix:
    """All nonzero m x n matrices of rank <= t, vectorized (toy sizes)."""
    if t != 1 or m > 8 or n > 8:
        raise ValueError("candidate enumeration implemented for t=1, m,n <= 8")
    rows = []
    for u in range(1, 1 << m):
        uvec = np.array([(u >> a) & 1 for a in range(m)], dtype=np.uint8)
        for v in range(1, 1 << n):
            vvec = np.array([(v >> b) & 1 for b in range(n)], dtype=np.uint8)
            rows.append(np.outer(uvec, vvec).reshape(-1))
    dense = np.unique(np.stack(rows), axis=0)
    return BitMatrix.from_dense(dense)


class RankStatisticOracle:
    """Distinguishes hybrids by counting instances whose syndrome has a
    rank-<=t preimage (brute force over all low-rank matrices; toy only).

    Outputs 1 when at least `threshold` instances have a preimage, i.e. it
    believes the sample is the hybrid with `threshold` leading real
    instances.  The honest statistic distinguishes adjacent hybrids at the
    threshold index almost perfectly, so the oracle answers honestly with
    probability `epsilon` and flips a fair coin otherwise; its measured
    advantage at the threshold index is then ~= epsilon.
    """

    def __init__(self, shape: MslShape, threshold: int = 1,
                 epsilon: float = 1.0, seed: bytes = b"\x00" * 32):
        self.shape = shape
        self.threshold = threshold
        self.epsilon = epsilon
        self._cands = _low_rank_candidates(shape.m, shape.n, shape.t)
        self._coin = Expander(seed, b"oracle-noise")
        self._tables: dict[BitMatrix, np.ndarray] = {}

    def _has_preimage(self, h: BitMatrix, s: BitMatrix) -> bool:
        table = self._tables.get(h)
        if table is None:
            table = self._cands.mul_t(h).words  # candidates x (mn-k), packed
            if len(self._tables) > 64:
                self._tables.clear()
            self._tables[h] = table
        return bool(np.all(table == s.words[0], axis=1).any())

    def __call__(self, sample: HybridSample) -> int:
        if self.epsilon < 1.0 and self._coin.randrange(10**9) >= int(self.epsilon * 10**9):
            return self._coin.randrange(2)
        count = sum(
            self._has_preimage(h, s) for h, s in zip(sample.checks, sample.syndromes)
        )
        return 1 if count >= self.threshold else 0


class CoinOracle:
    """Zero-advantage control oracle."""

    epsilon = 0.0

    def __init__(self, seed: bytes = b"\x00" * 32):
        self._coin = Expander(seed, b"coin-oracle")

    def __call__(self, sample: HybridSample) -> int:
        return self._coin.randrange(2)


def measure_advantage(oracle, shape: MslShape, i: int, xof: Expander,
                      trials: int = 400) -> float:
    """Empirical P[oracle = 1 | H_i] - P[oracle = 1 | H_{i-1}]."""
    hi = sum(oracle(sample_hybrid(shape, i, xof)) for _ in range(trials))
    lo = sum(oracle(sample_hybrid(shape, i - 1, xof)) for _ in range(trials))
    return (hi - lo) / trials


# ---------------------------------------------------------------------------
# the predictor embedding
# ---------------------------------------------------------------------------


def a_prime(inst: DualInstance, i0: int, r: BitMatrix, oracle, xof: Expander) -> int:
    """Predict e_{i0} * r from a distinguisher for (H_{i0-1}, H_{i0}).

    Instance i0's check is replaced by M := H + u^T r with uniform u; its
    syndrome then reads e*M^T + (e*r)*u, so the modified sample is the
    hybrid with i0 real instances exactly when e*r = 0.  Instances beyond
    i0 get fresh uniform syndromes.
    """
    if not 1 <= i0 <= inst.shape.N:
        raise ValueError("hybrid index out of range")
    u = BitMatrix.random(1, inst.checks[i0 - 1].rows, xof)
    modified = inst.checks[i0 - 1] + u.transpose().mul(r)
    checks = list(inst.checks)
    syndromes = list(inst.syndromes)
    checks[i0 - 1] = modified
    for j in range(i0, inst.shape.N):
        syndromes[j] = BitMatrix.random(1, checks[j].rows, xof)
    bit = oracle(HybridSample(i0, checks, syndromes))
    return 1 - bit  # oracle says "real" exactly when e*r = 0


# ---------------------------------------------------------------------------
# Goldreich-Levin list decoding
# ---------------------------------------------------------------------------

LIST_CAP = 1 << 12


def goldreich_levin(predictor, nbits: int, epsilon: float, xof: Expander,
                    cap: int = LIST_CAP) -> list[BitMatrix]:
    """List-decode x from a predictor of x*r correct w.p. 1/2 + epsilon.

    Pairwise-independent decoder: kappa base vectors r_1..r_kappa, one
    candidate per guess of (x*r_1, ..., x*r_kappa); bit p of a candidate is
    the majority over nonzero subsets S of predictor(r_S + delta_p) + beta_S.
    The list (and hence kappa) is capped.
    """
    if epsilon <= 0:
        raise ValueError("declared advantage must be positive")
    kappa = max(3, math.ceil(2 * math.log2(1 / epsilon)) + 3)
    while (1 << kappa) > cap:
        kappa -= 1
    base = [BitMatrix.random(1, nbits, xof) for _ in range(kappa)]
    nsub = (1 << kappa) - 1
    unit = np.eye(nbits, dtype=np.uint8)

    preds = np.zeros((nsub, nbits), dtype=np.int8)
    for smask in range(1, nsub + 1):
        r_s = BitMatrix.zeros(1, nbits)
        mm = smask
        while mm:
            r_s = r_s + base[(mm & -mm).bit_length() - 1]
            mm &= mm - 1
        r_dense = r_s.to_dense()[0]
        for p in range(nbits):
            query = BitMatrix.from_dense((r_dense ^ unit[p]).reshape(1, nbits))
            preds[smask - 1, p] = predictor(query)

    smasks = np.arange(1, nsub + 1, dtype=np.uint32)
    betas = np.arange(0, 1 << kappa, dtype=np.uint32)
    parity = np.bitwise_count(betas[:, None] & smasks[None, :]) & 1  # guesses x subsets
    sign_b = 1 - 2 * parity.astype(np.int32)
    sign_p = 1 - 2 * preds.astype(np.int32)
    score = sign_b @ sign_p  # [guess, p]: sum over S of +-1 votes for bit 0
    bits = (score < 0).astype(np.uint8)
    seen, out = set(), []
    for row in bits:
        key = row.tobytes()
        if key not in seen:
            seen.add(key)
            out.append(BitMatrix.from_dense(row.reshape(1, nbits)))
    return out[:cap]


# ---------------------------------------------------------------------------
# the full demonstration
# ---------------------------------------------------------------------------


def support_explains(inst: DualInstance, support: Subspace) -> bool:
    """Does every instance admit an error with columns in `support`?

    Errors with column support in S parameterize as E = B^T P with B the
    t x m support basis, so each syndrome condition is linear in P.
    """
    m, n = inst.shape.m, inst.shape.n
    tdim = support.dim
    if tdim == 0:
        return all(s.is_zero() for s in inst.syndromes)
    bdense = support.basis.to_dense()
    rows = np.zeros((tdim * n, m * n), dtype=np.uint8)
    for c in range(tdim):
        for b in range(n):
            for a in range(m):
                rows[c * n + b, a * n + b] = bdense[c, a]
    param = BitMatrix.from_dense(rows)  # (t*n) x mn, vec(B^T P) rows
    for h, s in zip(inst.checks, inst.syndromes):
        try:
            solve(param.mul_t(h), s)
        except NoSolution:
            return False
    return True


def full_reduction_demo(inst: DualInstance, oracle, xof: Expander,
                        epsilon: float | None = None) -> tuple[Subspace, int]:
    """Sweep hybrid indices, list-decode a candidate error per index, and
    return the first support validated against every syndrome."""
    shape = inst.shape
    m, n = shape.m, shape.n
    eps = epsilon if epsilon is not None else max(getattr(oracle, "epsilon", 0.5), 1e-3)
    # a distinguishing advantage of eps yields a predictor correct with
    # probability 1/2 + eps/2
    pred_eps = eps / 2
    for i0 in range(1, shape.N + 1):
        def predictor(r: BitMatrix) -> int:
            return a_prime(inst, i0, r, oracle, xof)

        for cand in goldreich_levin(predictor, m * n, pred_eps, xof):
            err = rho_inv(cand, m, n)
            if err.is_zero() or err.rank() > shape.t:
                continue
            if cand.mul_t(inst.checks[i0 - 1]) != inst.syndromes[i0 - 1]:
                continue
            support = column_support(err)
            if support_explains(inst, support):
                return support, i0
    raise ReductionFailure("no validated candidate at any hybrid index")
