"""The multi-bit PKE: compressed dual-representation keys, encryption with
shared-row-support errors, Gabidulin-decoded decryption, and serialization.

Key generation publishes ``seed || E * H^T`` instead of the large matrix
``T = S*G + E``: the seed expands deterministically to a full-rank parity
check H, the generator G = ker(H), and the Gabidulin code, so both parties
can reconstruct the same canonical lift T' of the syndrome.  The secret key
stores S' with T' = S'*G + E.

Sizes (payload bits): pk l1*(mn-k), ct l2*k + l2*l1, bit-packed LSB-first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bitmat import BitMatrix, random_full_rank
from .codes import (
    sample_error_column_support,
    sample_error_row_support,
    sample_support,
    stack_vectorized,
)
from .fields import field
from .gabidulin import DecodeFailure, GabidulinCode, sample_gabidulin
from .rng import SEED_BYTES, Expander, random_seed


class ValidationError(Exception):
    """Parameter-set invariant violations (carries the full list)."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


class DecryptError(Exception):
    """Decryption failed (malformed or out-of-radius ciphertext)."""


@dataclass(frozen=True)
class Params:
    name: str
    level: int
    m: int
    n: int
    k: int
    r: int
    d: int
    l1: int
    l2: int
    kappa: int = 3
    q: int = 2

    @property
    def mn(self) -> int:
        return self.m * self.n

    @property
    def pk_payload_bits(self) -> int:
        return self.l1 * (self.mn - self.k)

    @property
    def ct_payload_bits(self) -> int:
        return self.l2 * self.k + self.l2 * self.l1

    @property
    def pk_payload_bytes(self) -> int:
        return (self.pk_payload_bits + 7) // 8

    @property
    def ct_payload_bytes(self) -> int:
        return (self.ct_payload_bits + 7) // 8

    @property
    def msg_bits(self) -> int:
        return self.kappa * self.l1

    @property
    def msg_bytes(self) -> int:
        return (self.msg_bits + 7) // 8

    @property
    def sk_payload_bytes(self) -> int:
        return (self.l1 * self.k + 7) // 8


PARAM_SETS: dict[str, Params] = {
    "mrpke-1": Params("mrpke-1", 1, 81, 81, 3201, 4, 4, 35, 35),
    "mrpke-3": Params("mrpke-3", 3, 103, 103, 5270, 5, 5, 53, 53),
    "mrpke-5": Params("mrpke-5", 5, 115, 115, 6613, 6, 6, 75, 75),
}

_SET_IDS = {"mrpke-1": 1, "mrpke-3": 3, "mrpke-5": 5}
_ID_SETS = {v: k for k, v in _SET_IDS.items()}


def validate_params(p: Params) -> dict:
    """Check every Params invariant; returns slack figures or raises."""
    problems = []
    if p.k > p.mn:
        problems.append("k exceeds mn")
    if not p.r * p.d < min(p.l1, p.l2):
        problems.append("need r*d < min(l1, l2)")
    radius = (p.l2 - p.kappa) // 2
    if p.r * p.d > radius:
        problems.append("decoder radius smaller than r*d")
    if p.l2 > p.l1:
        problems.append("need l2 <= l1 (code length <= extension degree)")
    if p.r > p.n or p.d > p.n:
        problems.append("support dimension exceeds n")
    gv = p.m * (1 - math.sqrt(p.k / (p.m * p.n)))
    if p.r >= gv:
        problems.append("r is not below the Gilbert-Varshamov radius")
    if problems:
        raise ValidationError(problems)
    return {
        "gv_radius": gv,
        "gv_slack": gv - p.r,
        "decoder_radius": radius,
        "decoder_margin": radius - p.r * p.d,
    }


# ---------------------------------------------------------------------------
# seed expansion (public material)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PublicExpansion:
    h: BitMatrix  # (mn-k) x mn, full rank
    g: BitMatrix  # k x mn, RREF kernel basis of h
    g_pivots: np.ndarray  # pivot columns of g (g is in RREF)
    gab: GabidulinCode
    h_transform: BitMatrix  # U with U*h in RREF
    h_pivots: np.ndarray  # pivot columns of h

    def lift(self, syndrome: BitMatrix) -> BitMatrix:
        """Canonical T' with T' * h^T = syndrome (support on h's pivots)."""
        z = syndrome.mul_t(self.h_transform)
        return z.scatter_columns(self.h_pivots, self.h.cols)


_EXPANSION_CACHE: dict[tuple[Params, bytes], PublicExpansion] = {}
_CACHE_MAX = 3


def expand_public(p: Params, seed: bytes) -> PublicExpansion:
    """Deterministic (H, G, Gabidulin code, lift data) from a public seed.

    Domain-separated sub-streams let light consumers (decryption) expand only
    the Gabidulin stream without paying for H.
    """
    key = (p, bytes(seed))
    hit = _EXPANSION_CACHE.get(key)
    if hit is not None:
        return hit
    root = Expander(seed, b"public")
    hstream = root.child("H")
    rows = p.mn - p.k
    for _ in range(256):
        h = BitMatrix.random(rows, p.mn, hstream)
        r, u, pivots = h.rref()
        if len(pivots) == rows:
            break
    else:  # pragma: no cover - probability ~2^-k per draw
        raise RuntimeError("failed to expand a full-rank parity check")
    # Free-column kernel basis assembled straight from the RREF of H (no
    # second elimination): with pivot set P and free set F, row j of G has a
    # 1 in free column f_j, R[i, f_j] in pivot column p_i, and 0 elsewhere,
    # so G restricted to F is the identity and X*G = B solves by selecting
    # the F-columns of B.
    piv = np.asarray(pivots, dtype=np.int64)
    free = np.setdiff1d(np.arange(p.mn, dtype=np.int64), piv)
    g = BitMatrix.identity(p.k).scatter_columns(free, p.mn) + \
        r.select_columns(free).transpose().scatter_columns(piv, p.mn)
    gab = expand_gabidulin(p, seed)
    exp = PublicExpansion(
        h=h,
        g=g,
        g_pivots=free,
        gab=gab,
        h_transform=u,
        h_pivots=piv,
    )
    if len(_EXPANSION_CACHE) >= _CACHE_MAX:
        _EXPANSION_CACHE.pop(next(iter(_EXPANSION_CACHE)))
    _EXPANSION_CACHE[key] = exp
    return exp


_GAB_CACHE: dict[tuple[Params, bytes], GabidulinCode] = {}


def expand_gabidulin(p: Params, seed: bytes) -> GabidulinCode:
    """Expand only the Gabidulin stream (all decryption needs)."""
    key = (p, bytes(seed))
    hit = _GAB_CACHE.get(key)
    if hit is not None:
        return hit
    gstream = Expander(seed, b"public").child("gab")
    gab = sample_gabidulin(field(p.l1), p.l2, p.kappa, gstream)
    if len(_GAB_CACHE) >= _CACHE_MAX:
        _GAB_CACHE.pop(next(iter(_GAB_CACHE)))
    _GAB_CACHE[key] = gab
    return gab


# ---------------------------------------------------------------------------
# keys, ciphertexts, messages
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PublicKey:
    params: Params
    seed: bytes
    syndrome: BitMatrix  # l1 x (mn-k) = E * H^T


@dataclass(frozen=True)
class SecretKey:
    params: Params
    seed: bytes
    sprime: BitMatrix  # l1 x k with T' = S'*G + E


@dataclass(frozen=True)
class Ciphertext:
    params: Params
    u: BitMatrix  # l2 x k
    v: BitMatrix  # l2 x l1


def _solve_against_rref(g: BitMatrix, pivots: np.ndarray, b: BitMatrix) -> BitMatrix:
    """Canonical X with X*g = b for g already in RREF (same X as solve(g, b))."""
    x = b.select_columns(pivots)
    if x.mul(g) != b:
        raise ValueError("rows not in the row space of g")
    return x


def keygen(p: Params, seed: bytes | None = None) -> tuple[PublicKey, SecretKey]:
    validate_params(p)
    if seed is None:
        seed = random_seed()
    root = Expander(seed, b"keygen")
    pk_seed = root.child("public-seed").read(SEED_BYTES)
    secret = root.child("errors")
    exp = expand_public(p, pk_seed)

    support = sample_support(p.m, p.r, secret)
    errors = [sample_error_column_support(support, p.n, secret).matrix
              for _ in range(p.l1)]
    e = stack_vectorized(errors)  # l1 x mn
    syndrome = e.mul_t(exp.h)  # l1 x (mn-k)
    tprime = exp.lift(syndrome)
    sprime = _solve_against_rref(exp.g, exp.g_pivots, tprime + e)
    return (
        PublicKey(p, pk_seed, syndrome),
        SecretKey(p, pk_seed, sprime),
    )


def encrypt(pk: PublicKey, msg: list[int], seed: bytes | None = None) -> Ciphertext:
    p = pk.params
    if len(msg) != p.kappa or any(not 0 <= x < (1 << p.l1) for x in msg):
        raise ValueError("message must be kappa symbols of l1 bits")
    if seed is None:
        seed = random_seed()
    xof = Expander(seed, b"encrypt")
    exp = expand_public(p, pk.seed)
    tprime = exp.lift(pk.syndrome)

    support = sample_support(p.n, p.d, xof)
    fs = [sample_error_row_support(support, p.m, xof).matrix for _ in range(p.l2)]
    f = stack_vectorized(fs)  # l2 x mn
    u = f.mul_t(exp.g)
    v = f.mul_t(tprime) + exp.gab.encode(msg)
    return Ciphertext(p, u, v)


def encrypt_with_expansion(p: Params, g: BitMatrix, tprime: BitMatrix,
                           gab: GabidulinCode, msg: list[int],
                           seed: bytes) -> Ciphertext:
    """Encrypt from the uncompressed representation (G, T', code) directly.

    Produces the identical ciphertext as :func:`encrypt` under the same seed;
    used to check interoperability of the two public-key representations.
    """
    xof = Expander(seed, b"encrypt")
    support = sample_support(p.n, p.d, xof)
    fs = [sample_error_row_support(support, p.m, xof).matrix for _ in range(p.l2)]
    f = stack_vectorized(fs)
    return Ciphertext(p, f.mul_t(g), f.mul_t(tprime) + gab.encode(msg))


def decrypt(sk: SecretKey, ct: Ciphertext) -> list[int]:
    p = sk.params
    if ct.u.rows != p.l2 or ct.u.cols != p.k or ct.v.rows != p.l2 or ct.v.cols != p.l1:
        raise DecryptError("ciphertext shape mismatch")
    gab = expand_gabidulin(p, sk.seed)
    w = ct.v + ct.u.mul_t(sk.sprime)
    try:
        return gab.decode(w)
    except DecodeFailure as exc:
        raise DecryptError("undecodable ciphertext") from exc


# ---------------------------------------------------------------------------
# bit-level (de)serialization
# ---------------------------------------------------------------------------

_MAGIC_PK = b"MRPK"
_MAGIC_SK = b"MRSK"
_MAGIC_CT = b"MRCT"
_VERSION = 0x01


def _pack_bits(bits: np.ndarray) -> bytes:
    return np.packbits(bits, bitorder="little").tobytes()

def _unpack_bits(data: bytes, nbits: int) -> np.ndarray:
    if len(data) != (nbits + 7) // 8:
        raise ValueError("payload length mismatch")
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder="little")
    if bits[nbits:].any():
        raise ValueError("nonzero padding bits")
    return bits[:nbits]


def _matrices_to_bytes(mats: list[BitMatrix]) -> bytes:
    bits = np.concatenate([m.to_dense().reshape(-1) for m in mats])
    return _pack_bits(bits)


def _matrices_from_bytes(data: bytes, shapes: list[tuple[int, int]]) -> list[BitMatrix]:
    total = sum(r * c for r, c in shapes)
    bits = _unpack_bits(data, total)
    out = []
    pos = 0
    for r, c in shapes:
        out.append(BitMatrix.from_dense(bits[pos : pos + r * c].reshape(r, c)))
        pos += r * c
    return out


def _header(magic: bytes, p: Params) -> bytes:
    if p.name not in _SET_IDS:
        raise ValueError("only registered parameter sets are serializable")
    return magic + bytes([_VERSION, _SET_IDS[p.name]])


def _parse_header(data: bytes, magic: bytes) -> Params:
    if len(data) < 6 or data[:4] != magic:
        raise ValueError("bad magic")
    if data[4] != _VERSION:
        raise ValueError("unsupported version")
    name = _ID_SETS.get(data[5])
    if name is None:
        raise ValueError("unknown parameter-set id")
    return PARAM_SETS[name]


def serialize_pk(pk: PublicKey) -> bytes:
    return _header(_MAGIC_PK, pk.params) + pk.seed + _matrices_to_bytes([pk.syndrome])


def deserialize_pk(data: bytes) -> PublicKey:
    p = _parse_header(data, _MAGIC_PK)
    body = data[6:]
    if len(body) != SEED_BYTES + p.pk_payload_bytes:
        raise ValueError("public key length mismatch")
    seed = body[:SEED_BYTES]
    (syn,) = _matrices_from_bytes(body[SEED_BYTES:], [(p.l1, p.mn - p.k)])
    return PublicKey(p, seed, syn)


def serialize_sk(sk: SecretKey) -> bytes:
    return _header(_MAGIC_SK, sk.params) + sk.seed + _matrices_to_bytes([sk.sprime])


def deserialize_sk(data: bytes) -> SecretKey:
    p = _parse_header(data, _MAGIC_SK)
    body = data[6:]
    if len(body) != SEED_BYTES + p.sk_payload_bytes:
        raise ValueError("secret key length mismatch")
    (sp,) = _matrices_from_bytes(body[SEED_BYTES:], [(p.l1, p.k)])
    return SecretKey(p, body[:SEED_BYTES], sp)


def serialize_ct(ct: Ciphertext) -> bytes:
    return _header(_MAGIC_CT, ct.params) + _matrices_to_bytes([ct.u, ct.v])


def deserialize_ct(data: bytes) -> Ciphertext:
    p = _parse_header(data, _MAGIC_CT)
    body = data[6:]
    if len(body) != p.ct_payload_bytes:
        raise ValueError("ciphertext length mismatch")
    u, v = _matrices_from_bytes(body, [(p.l2, p.k), (p.l2, p.l1)])
    return Ciphertext(p, u, v)


# ---------------------------------------------------------------------------
# messages and KATs
# ---------------------------------------------------------------------------


def msg_to_bytes(p: Params, msg: list[int]) -> bytes:
    bits = np.zeros(p.msg_bits, dtype=np.uint8)
    for i, sym in enumerate(msg):
        for j in range(p.l1):
            bits[i * p.l1 + j] = (sym >> j) & 1
    return _pack_bits(bits)


def msg_from_bytes(p: Params, data: bytes) -> list[int]:
    bits = _unpack_bits(data, p.msg_bits)
    return [
        int(sum(int(b) << j for j, b in enumerate(bits[i * p.l1 : (i + 1) * p.l1])))
        for i in range(p.kappa)
    ]


def random_message(p: Params, xof: Expander) -> list[int]:
    return [xof.randrange(1 << p.l1) for _ in range(p.kappa)]


def kat_generate(p: Params, count: int = 16) -> str:
    """Known-answer vectors: deterministic chain seeded per index."""
    lines = [f"# mrpke KAT, set = {p.name}", ""]
    for i in range(count):
        master = Expander(bytes([i]) * SEED_BYTES, f"kat/{p.name}".encode())
        kg_seed = master.child("keygen").read(SEED_BYTES)
        enc_seed = master.child("encrypt").read(SEED_BYTES)
        pk, sk = keygen(p, kg_seed)
        msg = random_message(p, master.child("message"))
        ct = encrypt(pk, msg, enc_seed)
        lines.append(f"count = {i}")
        lines.append(f"seed = {kg_seed.hex().upper()}")
        lines.append(f"pk = {serialize_pk(pk).hex().upper()}")
        lines.append(f"sk = {serialize_sk(sk).hex().upper()}")
        lines.append(f"msg = {msg_to_bytes(p, msg).hex().upper()}")
        lines.append(f"ct = {serialize_ct(ct).hex().upper()}")
        lines.append("")
    return "\n".join(lines)


def kat_verify(text: str) -> int:
    """Verify a KAT file; returns vector count, raises ValueError on mismatch."""
    blocks: list[dict[str, str]] = []
    cur: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            if cur:
                blocks.append(cur)
                cur = {}
            continue
        key, _, val = line.partition("=")
        cur[key.strip()] = val.strip()
    if cur:
        blocks.append(cur)
    n = 0
    for blk in blocks:
        if "count" not in blk:
            continue
        pk = deserialize_pk(bytes.fromhex(blk["pk"]))
        sk = deserialize_sk(bytes.fromhex(blk["sk"]))
        ct = deserialize_ct(bytes.fromhex(blk["ct"]))
        p = pk.params
        msg = msg_from_bytes(p, bytes.fromhex(blk["msg"]))
        if pk.seed != bytes.fromhex(blk["seed"]) and "seed" in blk:
            # the recorded seed is the keygen master seed; re-derive and check
            kg_seed = bytes.fromhex(blk["seed"])
            pk2, sk2 = keygen(p, kg_seed)
            if serialize_pk(pk2) != bytes.fromhex(blk["pk"]):
                raise ValueError(f"count {blk['count']}: pk mismatch")
            if serialize_sk(sk2) != bytes.fromhex(blk["sk"]):
                raise ValueError(f"count {blk['count']}: sk mismatch")
        if decrypt(sk, ct) != msg:
            raise ValueError(f"count {blk['count']}: decryption mismatch")
        n += 1
    if n == 0:
        raise ValueError("no vectors found")
    return n
