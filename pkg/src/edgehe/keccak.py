"""Keccak-f[1600] permutation and the sponge used as the sampler PRNG.

The sponge runs at a 1088-bit rate (512-bit capacity) with the standard XOF
domain-separation padding (0x1F ... 0x80), i.e. SHAKE256 framing, so the
published extendable-output test vectors apply directly.  Seeds of any
length are accepted; a 200-byte seed spans two rate blocks and is absorbed
across two permutation calls.
"""

from __future__ import annotations

RATE_BITS = 1088
RATE_BYTES = RATE_BITS // 8
CAPACITY_BITS = 512

_ROUND_CONSTANTS = (
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A, 0x8000000080008000,
    0x000000000000808B, 0x0000000080000001, 0x8000000080008081, 0x8000000000008009,
    0x000000000000008A, 0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089, 0x8000000000008003,
    0x8000000000008002, 0x8000000000000080, 0x000000000000800A, 0x800000008000000A,
    0x8000000080008081, 0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
)

_M64 = (1 << 64) - 1


class SpongeFinalized(Exception):
    """absorb_seed called after the sponge switched to squeezing."""


def keccak_f1600(state: list[int]) -> list[int]:
    """One Keccak-f[1600] permutation over 25 little-endian 64-bit lanes.

    Lanes are indexed x + 5*y.  The rho/pi step below is fully unrolled with
    the rotation offsets folded in; this keeps the permutation fast enough
    to feed the statistical sampler tests.
    """
    (s00, s01, s02, s03, s04,
     s05, s06, s07, s08, s09,
     s10, s11, s12, s13, s14,
     s15, s16, s17, s18, s19,
     s20, s21, s22, s23, s24) = state
    for rc in _ROUND_CONSTANTS:
        # theta
        c0 = s00 ^ s05 ^ s10 ^ s15 ^ s20
        c1 = s01 ^ s06 ^ s11 ^ s16 ^ s21
        c2 = s02 ^ s07 ^ s12 ^ s17 ^ s22
        c3 = s03 ^ s08 ^ s13 ^ s18 ^ s23
        c4 = s04 ^ s09 ^ s14 ^ s19 ^ s24
        d0 = c4 ^ ((c1 << 1 | c1 >> 63) & _M64)
        d1 = c0 ^ ((c2 << 1 | c2 >> 63) & _M64)
        d2 = c1 ^ ((c3 << 1 | c3 >> 63) & _M64)
        d3 = c2 ^ ((c4 << 1 | c4 >> 63) & _M64)
        d4 = c3 ^ ((c0 << 1 | c0 >> 63) & _M64)
        s00 ^= d0; s05 ^= d0; s10 ^= d0; s15 ^= d0; s20 ^= d0
        s01 ^= d1; s06 ^= d1; s11 ^= d1; s16 ^= d1; s21 ^= d1
        s02 ^= d2; s07 ^= d2; s12 ^= d2; s17 ^= d2; s22 ^= d2
        s03 ^= d3; s08 ^= d3; s13 ^= d3; s18 ^= d3; s23 ^= d3
        s04 ^= d4; s09 ^= d4; s14 ^= d4; s19 ^= d4; s24 ^= d4
        # rho + pi
        b00 = s00
        b01 = ((s06 << 44) | (s06 >> 20)) & _M64
        b02 = ((s12 << 43) | (s12 >> 21)) & _M64
        b03 = ((s18 << 21) | (s18 >> 43)) & _M64
        b04 = ((s24 << 14) | (s24 >> 50)) & _M64
        b05 = ((s03 << 28) | (s03 >> 36)) & _M64
        b06 = ((s09 << 20) | (s09 >> 44)) & _M64
        b07 = ((s10 << 3) | (s10 >> 61)) & _M64
        b08 = ((s16 << 45) | (s16 >> 19)) & _M64
        b09 = ((s22 << 61) | (s22 >> 3)) & _M64
        b10 = ((s01 << 1) | (s01 >> 63)) & _M64
        b11 = ((s07 << 6) | (s07 >> 58)) & _M64
        b12 = ((s13 << 25) | (s13 >> 39)) & _M64
        b13 = ((s19 << 8) | (s19 >> 56)) & _M64
        b14 = ((s20 << 18) | (s20 >> 46)) & _M64
        b15 = ((s04 << 27) | (s04 >> 37)) & _M64
        b16 = ((s05 << 36) | (s05 >> 28)) & _M64
        b17 = ((s11 << 10) | (s11 >> 54)) & _M64
        b18 = ((s17 << 15) | (s17 >> 49)) & _M64
        b19 = ((s23 << 56) | (s23 >> 8)) & _M64
        b20 = ((s02 << 62) | (s02 >> 2)) & _M64
        b21 = ((s08 << 55) | (s08 >> 9)) & _M64
        b22 = ((s14 << 39) | (s14 >> 25)) & _M64
        b23 = ((s15 << 41) | (s15 >> 23)) & _M64
        b24 = ((s21 << 2) | (s21 >> 62)) & _M64
        # chi + iota
        s00 = (b00 ^ (~b01 & b02) ^ rc) & _M64
        s01 = (b01 ^ (~b02 & b03)) & _M64
        s02 = (b02 ^ (~b03 & b04)) & _M64
        s03 = (b03 ^ (~b04 & b00)) & _M64
        s04 = (b04 ^ (~b00 & b01)) & _M64
        s05 = (b05 ^ (~b06 & b07)) & _M64
        s06 = (b06 ^ (~b07 & b08)) & _M64
        s07 = (b07 ^ (~b08 & b09)) & _M64
        s08 = (b08 ^ (~b09 & b05)) & _M64
        s09 = (b09 ^ (~b05 & b06)) & _M64
        s10 = (b10 ^ (~b11 & b12)) & _M64
        s11 = (b11 ^ (~b12 & b13)) & _M64
        s12 = (b12 ^ (~b13 & b14)) & _M64
        s13 = (b13 ^ (~b14 & b10)) & _M64
        s14 = (b14 ^ (~b10 & b11)) & _M64
        s15 = (b15 ^ (~b16 & b17)) & _M64
        s16 = (b16 ^ (~b17 & b18)) & _M64
        s17 = (b17 ^ (~b18 & b19)) & _M64
        s18 = (b18 ^ (~b19 & b15)) & _M64
        s19 = (b19 ^ (~b15 & b16)) & _M64
        s20 = (b20 ^ (~b21 & b22)) & _M64
        s21 = (b21 ^ (~b22 & b23)) & _M64
        s22 = (b22 ^ (~b23 & b24)) & _M64
        s23 = (b23 ^ (~b24 & b20)) & _M64
        s24 = (b24 ^ (~b20 & b21)) & _M64
    return [s00, s01, s02, s03, s04, s05, s06, s07, s08, s09,
            s10, s11, s12, s13, s14, s15, s16, s17, s18, s19,
            s20, s21, s22, s23, s24]


class KeccakSponge:
    """1088-bit-rate sponge: absorb seed bytes, then squeeze a keystream.

    Single-owner mutable state.  ``absorb_seed`` may be called repeatedly
    before the first squeeze; the first squeeze applies the XOF padding and
    finalizes the sponge.
    """

    def __init__(self, seed: bytes | None = None):
        self.state = [0] * 25
        self.absorbed = 0
        self._pending = bytearray()
        self._finalized = False
        self._block = b""
        self.squeeze_offset = 0
        if seed is not None:
            self.absorb_seed(seed)

    def absorb_seed(self, seed: bytes) -> "KeccakSponge":
        if self._finalized:
            raise SpongeFinalized("cannot absorb after squeezing has started")
        self._pending.extend(seed)
        self.absorbed += len(seed)
        while len(self._pending) >= RATE_BYTES:
            self._absorb_block(bytes(self._pending[:RATE_BYTES]))
            del self._pending[:RATE_BYTES]
            self.state = keccak_f1600(self.state)
        return self

    def _absorb_block(self, block: bytes) -> None:
        for i in range(0, len(block), 8):
            lane = block[i:i + 8]
            self.state[i // 8] ^= int.from_bytes(lane, "little")

    def _finalize(self) -> None:
        pad = bytearray(RATE_BYTES - len(self._pending))
        pad[0] = 0x1F
        pad[-1] |= 0x80
        self._absorb_block(bytes(self._pending) + bytes(pad))
        self._pending.clear()
        self.state = keccak_f1600(self.state)
        self._finalized = True
        self._refill()

    def _refill(self) -> None:
        self._block = b"".join(
            lane.to_bytes(8, "little") for lane in self.state[:RATE_BYTES // 8]
        )
        self.squeeze_offset = 0

    def squeeze(self, nbytes: int) -> bytes:
        """Next ``nbytes`` of keystream; consecutive calls continue the stream."""
        if not self._finalized:
            self._finalize()
        out = bytearray()
        while nbytes > 0:
            if self.squeeze_offset == RATE_BYTES:
                self.state = keccak_f1600(self.state)
                self._refill()
            take = min(nbytes, RATE_BYTES - self.squeeze_offset)
            out += self._block[self.squeeze_offset:self.squeeze_offset + take]
            self.squeeze_offset += take
            nbytes -= take
        return bytes(out)


def shake256(message: bytes, nbytes: int) -> bytes:
    """One-shot XOF at rate 1088 (for known-answer checks and convenience)."""
    return KeccakSponge(message).squeeze(nbytes)
