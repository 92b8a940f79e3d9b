import numpy as np
import pytest

from edgehe.keccak import KeccakSponge
from edgehe.modarith import find_context
from edgehe.samplers import (
    BINOMIAL_HALF_BITS,
    TERNARY_REJECT_THRESHOLD,
    SampledPolynomial,
    center,
    lift_signed,
    sample_binomial,
    sample_ternary,
    sample_uniform_mod_q,
)


class StubStream:
    """Deterministic byte source standing in for the sponge."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def squeeze(self, nbytes: int) -> bytes:
        out = self.data[self.pos:self.pos + nbytes]
        if len(out) < nbytes:
            raise AssertionError("stub stream exhausted")
        self.pos += nbytes
        return out


def reference_binomial(data: bytes, n: int) -> list[int]:
    # independent bit-convention oracle: MSB-first within each byte
    bits = []
    for byte in data:
        for k in range(7, -1, -1):
            bits.append((byte >> k) & 1)
    out = []
    for i in range(n):
        chunk = bits[42 * i:42 * (i + 1)]
        out.append(sum(chunk[:21]) - sum(chunk[21:]))
    return out


class TestBinomial:
    def test_all_zero_stream(self):
        poly = sample_binomial(StubStream(bytes(42)), 8)
        assert poly.coeffs == [0] * 8

    def test_all_ones_stream_cancels(self):
        poly = sample_binomial(StubStream(b"\xff" * 42), 8)
        assert poly.coeffs == [0] * 8

    def test_extreme_coefficient(self):
        # 21 one-bits then 21 zero-bits: HW(x)-HW(y) = 21
        data = b"\xff\xff\xf8" + bytes(18)
        assert sample_binomial(StubStream(data), 4).coeffs == [21, 0, 0, 0]

    def test_matches_reference_bit_convention(self):
        data = bytes((i * 37 + 11) % 256 for i in range(42 * 16 // 8))
        poly = sample_binomial(StubStream(data), 16)
        assert poly.coeffs == reference_binomial(data, 16)

    def test_byte_budget_is_exact(self):
        # a polynomial consumes ceil(42n/8) bytes, then the stream continues
        n = 64
        used = (42 * n + 7) // 8
        s1 = KeccakSponge(b"budget")
        sample_binomial(s1, n)
        s2 = KeccakSponge(b"budget")
        s2.squeeze(used)
        assert s1.squeeze(32) == s2.squeeze(32)

    def test_range_and_metadata(self):
        poly = sample_binomial(KeccakSponge(b"r"), 256)
        assert poly.distribution == "binomial_k21"
        assert poly.n == 256
        assert all(-BINOMIAL_HALF_BITS <= c <= BINOMIAL_HALF_BITS
                   for c in poly.coeffs)

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            sample_binomial(KeccakSponge(b"x"), 100)

    def test_statistics(self):
        coeffs = np.array(sample_binomial(KeccakSponge(b"stats"), 1 << 17).coeffs)
        assert abs(coeffs.mean()) < 0.05
        assert abs(coeffs.var() - 10.5) < 0.3


class TestTernary:
    def test_rejection_and_mapping(self):
        data = bytes([0, 1, 2, 255, 254, 3])
        poly = sample_ternary(StubStream(data), 5)
        assert poly.coeffs == [-1, 0, 1, 1, -1]

    def test_threshold_boundary(self):
        # 254 is the largest accepted byte; 255 always rejected
        assert TERNARY_REJECT_THRESHOLD == 255
        poly = sample_ternary(StubStream(bytes([254, 255, 0])), 2)
        assert poly.coeffs == [1, -1]

    def test_values_and_metadata(self):
        poly = sample_ternary(KeccakSponge(b"t"), 512)
        assert poly.distribution == "ternary_uniform"
        assert set(poly.coeffs) <= {-1, 0, 1}

    def test_statistics(self):
        coeffs = np.array(sample_ternary(KeccakSponge(b"stats"), 1 << 17).coeffs)
        for v in (-1, 0, 1):
            assert abs((coeffs == v).mean() - 1 / 3) < 0.01


class TestUniform:
    def test_rejection_on_masked_chunks(self):
        ctx = find_context(1024, 30)
        # 0xFFFFFFFF >> 2 = 2^30 - 1 >= q: rejected; then 1 and 5 accepted
        data = b"\xff\xff\xff\xff" + bytes([0, 0, 0, 7]) + bytes([0, 0, 0, 20])
        poly = sample_uniform_mod_q(StubStream(data), 2, ctx)
        assert poly.coeffs == [1, 5]

    def test_range(self):
        ctx = find_context(256, 30)
        poly = sample_uniform_mod_q(KeccakSponge(b"u"), 256, ctx)
        assert poly.distribution == "uniform_mod_q"
        assert all(0 <= c < ctx.q for c in poly.coeffs)

    def test_statistics(self):
        ctx = find_context(256, 30)
        coeffs = np.array(sample_uniform_mod_q(KeccakSponge(b"s"), 1 << 14, ctx).coeffs,
                          dtype=np.float64)
        assert abs(coeffs.mean() / ctx.q - 0.5) < 0.01

    def test_60bit_modulus(self):
        ctx = find_context(64, 60)
        poly = sample_uniform_mod_q(KeccakSponge(b"w"), 64, ctx)
        assert all(0 <= c < ctx.q for c in poly.coeffs)


class TestHelpers:
    def test_lift_center_roundtrip(self):
        ctx = find_context(64, 30)
        signed = list(range(-21, 22)) + [0]
        assert center(lift_signed(signed, ctx), ctx) == signed

    def test_lift_negative_representation(self):
        ctx = find_context(64, 30)
        assert lift_signed([-1], ctx) == [ctx.q - 1]

    def test_determinism(self):
        a = sample_binomial(KeccakSponge(b"d"), 128).coeffs
        b = sample_binomial(KeccakSponge(b"d"), 128).coeffs
        assert a == b

    def test_length_validation(self):
        with pytest.raises(ValueError):
            SampledPolynomial([0, 1], "ternary_uniform", 3)
