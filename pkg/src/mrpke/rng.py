"""Deterministic byte expansion from short seeds.

All randomness in the package flows through :class:`Expander`, a SHAKE-256
based extendable-output stream in counter mode.  Independent sub-streams are
obtained through domain-separation labels, so a consumer can expand only the
part of the key material it needs (e.g. decryption never touches the large
parity-check stream).
"""

from __future__ import annotations

import hashlib
import os

import numpy as np

SEED_BYTES = 32
_BLOCK = 1 << 16


class Expander:
    """Deterministic SHAKE-256 byte stream with domain separation.

    The stream is defined block-wise as

        block[i] = SHAKE-256(len(domain) || domain || seed || i)

    with ``len(domain)`` as two little-endian bytes and ``i`` as eight
    little-endian bytes, each block ``2**16`` bytes long.  Two expanders with
    the same seed but different domains produce independent-looking streams,
    and a stream can be consumed incrementally.
    """

    def __init__(self, seed: bytes, domain: bytes = b"") -> None:
        if len(seed) != SEED_BYTES:
            raise ValueError(f"seed must be {SEED_BYTES} bytes, got {len(seed)}")
        self.seed = bytes(seed)
        self.domain = bytes(domain)
        self._prefix = len(self.domain).to_bytes(2, "little") + self.domain + self.seed
        self._counter = 0
        self._buf = b""

    def child(self, tag: str) -> "Expander":
        """Return an independent sub-stream labelled by ``tag``."""
        sep = b"/" if self.domain else b""
        return Expander(self.seed, self.domain + sep + tag.encode())

    def _next_block(self) -> bytes:
        h = hashlib.shake_256(self._prefix + self._counter.to_bytes(8, "little"))
        self._counter += 1
        return h.digest(_BLOCK)

    def read(self, n: int) -> bytes:
        """Return the next ``n`` bytes of the stream."""
        if n < 0:
            raise ValueError("n must be non-negative")
        parts = []
        have = len(self._buf)
        if have:
            take = min(have, n)
            parts.append(self._buf[:take])
            self._buf = self._buf[take:]
            n -= take
        while n > 0:
            block = self._next_block()
            if n >= len(block):
                parts.append(block)
                n -= len(block)
            else:
                parts.append(block[:n])
                self._buf = block[n:]
                n = 0
        return b"".join(parts)

    def uint64(self) -> int:
        return int.from_bytes(self.read(8), "little")

    def randrange(self, bound: int) -> int:
        """Uniform integer in [0, bound) via rejection sampling."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        nbytes = (bound.bit_length() + 7) // 8
        limit = 1 << (8 * nbytes)
        cutoff = limit - (limit % bound)
        while True:
            x = int.from_bytes(self.read(nbytes), "little")
            if x < cutoff:
                return x % bound

    def bit_rows(self, rows: int, cols: int) -> np.ndarray:
        """Return a ``rows x ceil(cols/64)`` uint64 array of packed random bits.

        Bit ``j`` of a row lives at word ``j // 64``, position ``j % 64``
        (LSB-first).  Bits at positions >= cols are zeroed.
        """
        nwords = (cols + 63) // 64
        raw = self.read(rows * nwords * 8)
        w = np.frombuffer(raw, dtype="<u8").astype(np.uint64).reshape(rows, nwords)
        rem = cols % 64
        if rem and nwords:
            w[:, -1] &= np.uint64((1 << rem) - 1)
        return w


def random_seed() -> bytes:
    """Fresh seed from OS entropy."""
    return os.urandom(SEED_BYTES)
