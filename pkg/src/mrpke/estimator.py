"""Attack-cost models for multi-instance low-rank recovery.

Covers exact solution counting (Gaussian binomials, rank enumeration),
reductions from the multi-instance problem to a single low-rank-codeword
(MinRank) instance, and three attack cost models: the kernel-guessing
attack, Support Minors bilinear modeling, and the Minors/Hilbert-series
model.  All combinatorics use exact big-integer arithmetic, converting to
log2 only at the boundary.

Cost conventions (fixed here, used consistently by the grid search):
- Hybridization guesses ``l`` support columns and ``v`` solution
  coordinates, multiplying cost by q^(l*t+v) while shrinking the variable
  count by l*m+v; guessing is capped so at least m variables remain.
- Support Minors solves its sparse linear system by Wiedemann-style
  methods: cost K*(t+1)*M^2 field operations for M monomial columns.
- At q=2 monomial counts are square-free: C(K, d) monomials of degree d,
  and equations/monomials are aggregated over all degrees up to b.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, inf, log2

from .pke import PARAM_SETS, Params

OMEGA_DEFAULT = 2.8

# Hilbert series are expanded as truncated power series; a series still
# positive at this degree corresponds to an astronomically expensive solve,
# reported as infinite cost.
_SERIES_CAP = 64


class InvalidReduction(Exception):
    """Reduction parameters violate their preconditions."""


class NoLinearization(Exception):
    """No bi-degree linearizes the Support Minors system, even hybridized."""


class DegenerateSeries(Exception):
    """Hilbert-series truncation leaves the empty polynomial."""


@dataclass(frozen=True)
class MinRankShape:
    q: int
    m: int
    n: int
    k: int
    t: int


@dataclass(frozen=True)
class MslShape:
    q: int
    m: int
    n: int
    N: int
    k: int
    t: int


@dataclass(frozen=True)
class CostReport:
    attack: str  # "Kernel" | "SupportMinors" | "Minors"
    log2_cost: float
    delta: int
    a: int
    l: int
    v: int
    b: int | None  # linearization degree (SM) or series degree D (Minors)
    shape: MinRankShape  # the (delta, a)-reduced shape the attack ran on
    omega: float
    side: str | None = None  # "key" | "ciphertext" when applicable


# ---------------------------------------------------------------------------
# exact counting
# ---------------------------------------------------------------------------


def qbinom(m: int, t: int, q: int = 2) -> int:
    """Gaussian binomial: number of t-dimensional subspaces of F_q^m."""
    if t < 0 or t > m:
        return 0
    num = den = 1
    for i in range(t):
        num *= q**m - q**i
        den *= q**t - q**i
    return num // den


def rank_count(t: int, n: int, w: int, q: int = 2) -> int:
    """Number of t x n matrices of rank exactly w over F_q."""
    if w < 0 or w > min(t, n):
        return 0
    out = qbinom(n, w, q)
    for i in range(w):
        out *= q**t - q**i
    return out


def expected_solutions(s: MslShape) -> float:
    """log2 of the expected number of shared-support solution tuples."""
    lq = log2(s.q)
    return log2(qbinom(s.m, s.t, s.q)) + s.t * s.n * s.N * lq - s.N * (s.m * s.n - s.k) * lq


# ---------------------------------------------------------------------------
# multi-instance -> single-instance reduction
# ---------------------------------------------------------------------------


def msl_reduce(s: MslShape, delta: int, a: int) -> MinRankShape:
    """Reduced single-instance shape after trading delta rank and a columns.

    The N instances buy: a rank drop of delta (consuming delta*(n-t+delta)
    instances), deletion of a columns (consuming a*(t-delta) more), and a
    final dimension drop by the residual multiplicity rho >= 1.
    """
    if not 0 <= delta <= s.t:
        raise InvalidReduction("delta out of range")
    if a < 0:
        raise InvalidReduction("negative column deletions")
    rho = s.N - delta * (s.n - s.t + delta) - a * (s.t - delta)
    if rho < 1:
        raise InvalidReduction("not enough instances for this (delta, a)")
    k = max(s.k + s.N - a * s.m - rho, 0)
    return MinRankShape(s.q, s.m, s.n - a, k, s.t - delta)


def max_column_deletions(s: MslShape, delta: int) -> int:
    """Largest valid a for a given delta (a = floor((N-1)/t) at delta=0)."""
    if delta == s.t:
        return 0
    budget = s.N - 1 - delta * (s.n - s.t + delta)
    return max(budget // (s.t - delta), 0) if budget >= 0 else -1


def poly_threshold(s: MslShape) -> int:
    """Instance count above which the reduction solves in polynomial time."""
    return -((-(s.k * s.t + s.m)) // (s.m - 1))  # ceil division


# ---------------------------------------------------------------------------
# kernel attack
# ---------------------------------------------------------------------------


def kernel_cost(s: MinRankShape, omega: float = OMEGA_DEFAULT) -> float:
    """log2 cost of kernel guessing: omega*log2(k) + t*ceil(k/m)*log2(q)."""
    dim = max(s.k, 1)
    return omega * log2(dim) + s.t * -(-dim // s.m) * log2(s.q)


def _kernel_hybrid_best(s: MinRankShape, omega: float) -> tuple[float, int]:
    """Best kernel cost over column guesses l (keeping >= m variables).

    Guessing v individual coordinates costs 1 bit each but cancels at most
    t < m bits per m coordinates from the exponent, so v = 0 is always
    optimal and is pruned from the grid.
    """
    lq = log2(s.q)
    best, best_l = inf, 0
    l = 0
    while s.k - l * s.m >= s.m or l == 0:
        sub = MinRankShape(s.q, s.m, s.n, s.k - l * s.m, s.t)
        if sub.k < 1:
            break
        c = l * s.t * lq + kernel_cost(sub, omega)
        if c < best:
            best, best_l = c, l
        l += 1
    return best, best_l


# ---------------------------------------------------------------------------
# Support Minors
# ---------------------------------------------------------------------------


def sm_counts(s: MinRankShape, b: int) -> tuple[int, int]:
    """Independent equations N_b and monomials M_b at bi-degree (1, b)."""
    if b < 1:
        raise ValueError("b must be >= 1")
    m, n, K, t = s.m, s.n, s.k, s.t
    nb = sum(
        (-1) ** (i + 1) * comb(n, t + i) * comb(K + b - 1 - i, b - i) * comb(m + i - 1, i)
        for i in range(1, b + 1)
    )
    mb = comb(K + b - 1, b) * comb(n, t)
    return nb, mb


def _sm_counts_q2(m: int, n: int, K: int, t: int, b: int) -> tuple[int, int]:
    """Aggregated square-free counts at q=2: sums over degrees 1..b with
    C(K, d) monomials of degree d."""
    nb = mb = 0
    for bp in range(1, b + 1):
        nb += sum(
            (-1) ** (i + 1) * comb(n, t + i) * comb(K, bp - i) * comb(m + i - 1, i)
            for i in range(1, bp + 1)
        )
        mb += comb(K, bp) * comb(n, t)
    return nb, mb


def _sm_linearized_counts(m, n, K, t, b, q):
    if q == 2:
        return _sm_counts_q2(m, n, K, t, b)
    return sm_counts(MinRankShape(q, m, n, K, t), b)


def sm_cost(s: MinRankShape, omega: float = OMEGA_DEFAULT) -> CostReport:
    """Best Support Minors cost over hybrid guesses (l, v) and degree b.

    Cost model: q^(l*t+v) * K'*(t+1) * M^2 with K' remaining variables and
    M aggregated monomials at the first linearizing degree b < t+2.
    """
    q, m, t = s.q, s.m, s.t
    lq = log2(s.q)
    best: CostReport | None = None
    for l in range(0, max(s.n - t, 1)):
        kl = s.k - l * m
        nl = s.n - l
        if kl < 1 or nl <= t:
            break
        if best is not None and l * t * lq >= best.log2_cost:
            break
        for b in range(1, t + 2):
            def linearizes(v: int) -> bool:
                nb, mb = _sm_linearized_counts(m, nl, kl - v, t, b, q)
                return mb >= 1 and nb >= mb - 1

            if linearizes(0):
                v = 0
            elif kl >= 2 and linearizes(kl - 1):
                lo, hi = 0, kl - 1
                while lo < hi:
                    mid = (lo + hi) // 2
                    if linearizes(mid):
                        hi = mid
                    else:
                        lo = mid + 1
                v = lo
            else:
                continue
            nb, mb = _sm_linearized_counts(m, nl, kl - v, t, b, q)
            if nb <= 0 or mb <= 0:
                continue
            c = (l * t + v) * lq + log2(max(kl - v, 1) * (t + 1)) + 2 * log2(mb)
            if best is None or c < best.log2_cost:
                best = CostReport("SupportMinors", c, 0, 0, l, v, b, s, omega)
    if best is None:
        raise NoLinearization(f"no linearizing degree for {s}")
    return best


# ---------------------------------------------------------------------------
# Minors (Hilbert series)
# ---------------------------------------------------------------------------


def _series_mul(a: tuple, b: tuple, cap: int) -> tuple:
    out = [0] * cap
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            if i + j >= cap:
                break
            if bj:
                out[i + j] += ai * bj
    return tuple(out)


@lru_cache(maxsize=None)
def _minors_det_series(m: int, n: int, t: int, cap: int) -> tuple:
    """det of the t x t matrix with entries sum_l C(m-i,l)C(n-j,l) x^l,
    as a power series truncated at degree cap (Laplace over column subsets,
    memoized)."""
    ent = [
        [
            tuple(comb(m - i, l) * comb(n - j, l) for l in range(min(min(m - i, n - j) + 1, cap)))
            for j in range(1, t + 1)
        ]
        for i in range(1, t + 1)
    ]
    memo: dict = {}

    def rec(row: int, colmask: int) -> tuple:
        if row == t:
            return (1,) + (0,) * (cap - 1)
        key = (row, colmask)
        if key in memo:
            return memo[key]
        acc = [0] * cap
        sign = 1
        for j in range(t):
            if not (colmask >> j) & 1:
                continue
            term = _series_mul(ent[row][j], rec(row + 1, colmask & ~(1 << j)), cap)
            if sign > 0:
                acc = [x + y for x, y in zip(acc, term)]
            else:
                acc = [x - y for x, y in zip(acc, term)]
            sign = -sign
        out = tuple(acc)
        memo[key] = out
        return out

    return rec(0, (1 << t) - 1)


@lru_cache(maxsize=None)
def hilbert_degree(m: int, n: int, K: int, t: int) -> int | None:
    """D = 1 + degree of the truncated Hilbert series
    [(1-x)^((m-t)(n-t)-(K+1)) det(A(x)) / x^C(t,2)], truncating (exclusive)
    at the first non-positive coefficient.

    Returns None when the series is still positive at the cap (cost treated
    as infinite); raises DegenerateSeries when truncation leaves nothing.
    """
    e = (m - t) * (n - t) - (K + 1)
    det = _minors_det_series(m, n, t, _SERIES_CAP)
    shift = t * (t - 1) // 2

    def pref(i: int) -> int:
        if e >= 0:
            return (-1 if i % 2 else 1) * comb(e, i)
        return comb(-e + i - 1, i)

    d_count = 0
    for d in range(_SERIES_CAP - shift):
        c = sum(det[d + shift - i] * pref(i) for i in range(d + 1) if d + shift - i < _SERIES_CAP)
        if c <= 0:
            if d_count == 0:
                raise DegenerateSeries(f"empty Hilbert series for {(m, n, K, t)}")
            return d_count
        d_count += 1
    return None


def minors_cost(s: MinRankShape, omega: float = OMEGA_DEFAULT) -> CostReport:
    """Best Minors cost over hybrid guesses (l, v), keeping >= m variables.

    Cost model: q^(l*t+v) * C(K'+D, D)^omega with D the Hilbert-series
    degree bound of the remaining (m, n-l, K', t) system.
    """
    q, m, t = s.q, s.m, s.t
    lq = log2(q)
    best: CostReport | None = None
    for l in range(0, max(s.n - t, 1)):
        kl = s.k - l * m
        nl = s.n - l
        if (kl < m and l > 0) or kl < 1 or nl <= t:
            break
        if best is not None and l * t * lq >= best.log2_cost:
            break

        cache: dict[int, int | None] = {}

        def d_at(v: int) -> int | None:
            if v not in cache:
                try:
                    cache[v] = hilbert_degree(m, nl, kl - v, t)
                except DegenerateSeries:
                    cache[v] = None
            return cache[v]

        # D is non-increasing in v (fewer variables, faster truncation), so
        # within a constant-D run the cost grows by 1 per v; only the left
        # edges of the runs can be optimal.  Find them by bisection.
        vmax = max(kl - m, 0)
        cands = {0, vmax}
        stack = [(0, vmax)]
        while stack:
            lo, hi = stack.pop()
            if hi - lo <= 1:
                continue
            if d_at(lo) == d_at(hi) and d_at(lo) is not None:
                continue
            mid = (lo + hi) // 2
            cands.add(mid)
            stack.append((lo, mid))
            stack.append((mid, hi))
        for v in sorted(cands):
            dd = d_at(v)
            if dd is None:
                continue
            c = (l * t + v) * lq + omega * log2(comb(kl - v + dd, dd))
            if best is None or c < best.log2_cost:
                best = CostReport("Minors", c, 0, 0, l, v, dd, s, omega)
    if best is None:
        return CostReport("Minors", inf, 0, 0, 0, 0, None, s, omega)
    return best


# ---------------------------------------------------------------------------
# grid search and table reproduction
# ---------------------------------------------------------------------------


def _reduced_shapes(s: MslShape):
    for delta in range(0, s.t + 1):
        amax = max_column_deletions(s, delta)
        if amax < 0:
            continue
        for a in range(0, amax + 1):
            try:
                red = msl_reduce(s, delta, a)
            except InvalidReduction:  # pragma: no cover - amax guards this
                continue
            if red.k < 1 or red.t < 1 or red.n <= red.t:
                continue
            yield delta, a, red


def best_attack(s: MslShape, omega: float = OMEGA_DEFAULT,
                attacks: tuple[str, ...] = ("Kernel", "SupportMinors", "Minors")) -> CostReport:
    """Cheapest attack over (delta, a) reductions, hybrid guesses, and the
    three cost models."""
    best: CostReport | None = None
    for delta, a, red in _reduced_shapes(s):
        if "Kernel" in attacks:
            c, l = _kernel_hybrid_best(red, omega)
            rep = CostReport("Kernel", c, delta, a, l, 0, None, red, omega)
            if best is None or rep.log2_cost < best.log2_cost:
                best = rep
        if "SupportMinors" in attacks:
            try:
                rep = sm_cost(red, omega)
                rep = CostReport(rep.attack, rep.log2_cost, delta, a, rep.l, rep.v,
                                 rep.b, red, omega)
                if best is None or rep.log2_cost < best.log2_cost:
                    best = rep
            except NoLinearization:
                pass
        if "Minors" in attacks:
            rep = minors_cost(red, omega)
            rep = CostReport(rep.attack, rep.log2_cost, delta, a, rep.l, rep.v,
                             rep.b, red, omega)
            if best is None or rep.log2_cost < best.log2_cost:
                best = rep
    if best is None:
        raise InvalidReduction(f"no valid reduction for {s}")
    return best


def key_side_shape(p: Params) -> MslShape:
    return MslShape(p.q, p.m, p.n, p.l1, p.k, p.r)


def ciphertext_side_shape(p: Params) -> MslShape:
    return MslShape(p.q, p.m, p.n, p.l2, p.mn - p.k - p.l1, p.d)


def attack_costs(p: Params, omega: float = OMEGA_DEFAULT) -> dict[str, CostReport]:
    """Per-attack minimum over the key side and the ciphertext side."""
    out: dict[str, CostReport] = {}
    sides = (("key", key_side_shape(p)), ("ciphertext", ciphertext_side_shape(p)))
    for attack in ("Kernel", "SupportMinors", "Minors"):
        best: CostReport | None = None
        for side, shape in sides:
            rep = best_attack(shape, omega, attacks=(attack,))
            rep = CostReport(rep.attack, rep.log2_cost, rep.delta, rep.a, rep.l,
                             rep.v, rep.b, rep.shape, omega, side)
            if best is None or rep.log2_cost < best.log2_cost:
                best = rep
        out[attack] = best
    return out


def table_reproduce(omega: float = OMEGA_DEFAULT) -> list[dict]:
    """One row per registered parameter set: attack bits and payload sizes."""
    rows = []
    for p in PARAM_SETS.values():
        costs = attack_costs(p, omega)
        rows.append(
            {
                "set": p.name,
                "kernel_bits": costs["Kernel"].log2_cost,
                "sm_bits": costs["SupportMinors"].log2_cost,
                "minors_bits": costs["Minors"].log2_cost,
                "kernel_side": costs["Kernel"].side,
                "sm_side": costs["SupportMinors"].side,
                "minors_side": costs["Minors"].side,
                "pk_bytes": p.pk_payload_bytes,
                "ct_bytes": p.ct_payload_bytes,
            }
        )
    return rows


def stationary_note(shape: MinRankShape, omega: float = OMEGA_DEFAULT) -> CostReport:
    """Stationary multi-instance variants cost as a single instance: best
    attack on the one-instance problem of the same shape."""
    s = MslShape(shape.q, shape.m, shape.n, 1, shape.k, shape.t)
    return best_attack(s, omega)
