"""Error and uniform samplers driven by the Keccak keystream.

Bit conventions, frozen for reproducibility:

* The keystream is consumed as bytes; within a byte, bits are taken
  most-significant first.
* Binomial sampling reads exactly 42 bits per coefficient (two 21-bit
  strings) and rounds the per-polynomial budget up to a whole byte, i.e.
  ceil(42*n / 8) bytes are consumed and any trailing bits of the last byte
  are discarded (the alignment padding).
* Ternary sampling rejects on 8-bit chunks: values >= 255 are retried
  (255 = 3 * 85 leaves 0..254 uniform over residues mod 3), and accepted
  chunks map through v mod 3 as 0 -> -1, 1 -> 0, 2 -> +1.  The per-accepted
  arithmetic is branch-free; rejection retries are expected once per 256
  draws.
* Uniform-mod-q sampling rejects on ceil(log2 q)-bit chunks read
  big-endian from ceil(width/8) bytes, masked down to the chunk width.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .keccak import KeccakSponge
from .modarith import ModulusContext

BINOMIAL_HALF_BITS = 21          # sigma = sqrt(21/2)
BINOMIAL_BOUND = BINOMIAL_HALF_BITS
TERNARY_REJECT_THRESHOLD = 255   # accept byte values 0..254


@dataclass
class SampledPolynomial:
    coeffs: list[int]
    distribution: str            # binomial_k21 | ternary_uniform | uniform_mod_q
    n: int

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.n:
            raise ValueError("coefficient count does not match degree")


def sample_binomial(stream: KeccakSponge, n: int) -> SampledPolynomial:
    """Centered binomial coefficients: HW(x) - HW(y) over 21-bit strings."""
    if n & (n - 1):
        raise ValueError("degree must be a power of two")
    nbytes = (42 * n + 7) // 8
    raw = np.frombuffer(stream.squeeze(nbytes), dtype=np.uint8)
    bits = np.unpackbits(raw)[: 42 * n].reshape(n, 42)
    hw_x = bits[:, :BINOMIAL_HALF_BITS].sum(axis=1, dtype=np.int64)
    hw_y = bits[:, BINOMIAL_HALF_BITS:].sum(axis=1, dtype=np.int64)
    return SampledPolynomial((hw_x - hw_y).tolist(), "binomial_k21", n)


def sample_ternary(stream: KeccakSponge, n: int) -> SampledPolynomial:
    """Uniform coefficients over {-1, 0, +1} via rejection on byte chunks."""
    out = np.empty(0, dtype=np.int64)
    need = n
    while need > 0:
        chunk = np.frombuffer(stream.squeeze(need), dtype=np.uint8)
        accepted = chunk[chunk < TERNARY_REJECT_THRESHOLD]
        out = np.concatenate([out, accepted.astype(np.int64) % 3 - 1])
        need = n - len(out)
    return SampledPolynomial(out.tolist(), "ternary_uniform", n)


def sample_uniform_mod_q(
    stream: KeccakSponge, n: int, ctx: ModulusContext
) -> SampledPolynomial:
    """Uniform residues in [0, q) via rejection on bit_length(q)-bit chunks."""
    width = ctx.q.bit_length()
    chunk_bytes = (width + 7) // 8
    drop = 8 * chunk_bytes - width
    out: list[int] = []
    while len(out) < n:
        need = n - len(out)
        raw = stream.squeeze(need * chunk_bytes)
        for i in range(need):
            v = int.from_bytes(raw[i * chunk_bytes:(i + 1) * chunk_bytes], "big") >> drop
            if v < ctx.q:
                out.append(v)
    return SampledPolynomial(out, "uniform_mod_q", n)


def lift_signed(coeffs: list[int], ctx: ModulusContext) -> list[int]:
    """Signed small coefficients into Z_q: negatives stored as q - |c|."""
    q = ctx.q
    return [c % q for c in coeffs]


def center(residues: list[int], ctx: ModulusContext) -> list[int]:
    """Centered representatives in (-q/2, q/2]."""
    q = ctx.q
    half = q // 2
    return [r - q if r > half else r for r in residues]
