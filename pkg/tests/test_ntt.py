import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgehe.modarith import barrett_mul, find_context, find_context_chain
from edgehe.ntt import (
    DegreeMismatch,
    NttPlan,
    _swap_schedule,
    bit_reverse,
    intt_fast,
    intt_swap4,
    ntt_fast,
    ntt_swap4,
    physical_address,
    poly_mul_negacyclic,
)


def oracle_ntt(a, psi, q):
    """Brute-force negacyclic transform: evaluation at odd psi powers."""
    n = len(a)
    return [sum(a[j] * pow(psi, (2 * i + 1) * j, q) for j in range(n)) % q
            for i in range(n)]


def schoolbook_negacyclic(a, b, q):
    n = len(a)
    out = [0] * n
    for i in range(n):
        for j in range(n):
            k = i + j
            if k >= n:
                out[k - n] = (out[k - n] - a[i] * b[j]) % q
            else:
                out[k] = (out[k] + a[i] * b[j]) % q
    return out


class TestForwardOracle:
    @pytest.mark.parametrize("n", [8, 16, 32, 64])
    def test_matches_brute_force(self, n, rng):
        for bits in (14, 30):
            ctx = find_context(n, bits)
            plan = NttPlan(n, ctx)
            for _ in range(25):
                a = [rng.randrange(ctx.q) for _ in range(n)]
                got = ntt_swap4(bit_reverse(a), plan)
                assert got == oracle_ntt(a, ctx.psi, ctx.q)

    @pytest.mark.parametrize("bfus", [1, 2])
    def test_parallel_variants_match_oracle(self, bfus, rng):
        n = 64
        ctx = find_context(n, 30)
        plan = NttPlan(n, ctx, bfus)
        a = [rng.randrange(ctx.q) for _ in range(n)]
        assert ntt_swap4(bit_reverse(a), plan) == oracle_ntt(a, ctx.psi, ctx.q)

    def test_impulse_transforms_to_all_ones(self):
        n = 32
        ctx = find_context(n, 30)
        a = [1] + [0] * (n - 1)
        assert ntt_swap4(bit_reverse(a), NttPlan(n, ctx)) == [1] * n

    def test_linearity(self, rng):
        n = 128
        ctx = find_context(n, 30)
        plan = NttPlan(n, ctx)
        a = [rng.randrange(ctx.q) for _ in range(n)]
        b = [rng.randrange(ctx.q) for _ in range(n)]
        sa = ntt_swap4(bit_reverse(a), plan)
        sb = ntt_swap4(bit_reverse(b), plan)
        ab = [(x + y) % ctx.q for x, y in zip(a, b)]
        assert ntt_swap4(bit_reverse(ab), plan) == [
            (x + y) % ctx.q for x, y in zip(sa, sb)]


class TestInverse:
    @pytest.mark.parametrize("n", [8, 16, 32, 64, 256, 1024])
    def test_roundtrip_exact(self, n, rng):
        ctx = find_context(n, 30)
        plan = NttPlan(n, ctx)
        for _ in range(5):
            a = [rng.randrange(ctx.q) for _ in range(n)]
            assert intt_swap4(ntt_swap4(a, plan), plan) == a

    def test_roundtrip_60bit(self, rng):
        n = 256
        ctx = find_context(n, 60)
        plan = NttPlan(n, ctx)
        a = [rng.randrange(ctx.q) for _ in range(n)]
        assert intt_swap4(ntt_swap4(a, plan), plan) == a

    def test_inverse_layout_is_bit_reversed(self, rng):
        # forward input is bit-reversed, so intt(oracle values) must return
        # the bit-reversed coefficients
        n = 64
        ctx = find_context(n, 30)
        plan = NttPlan(n, ctx)
        a = [rng.randrange(ctx.q) for _ in range(n)]
        back = intt_swap4(oracle_ntt(a, ctx.psi, ctx.q), plan)
        assert bit_reverse(back) == a


class TestFastPath:
    @pytest.mark.parametrize("n", [16, 64, 512])
    def test_bit_identical_to_physical(self, n, rng):
        ctx = find_context(n, 30)
        plan = NttPlan(n, ctx)
        a = [rng.randrange(ctx.q) for _ in range(n)]
        abr = bit_reverse(a)
        assert list(map(int, ntt_fast(abr, plan))) == ntt_swap4(abr, plan)
        ah = ntt_swap4(abr, plan)
        assert list(map(int, intt_fast(ah, plan))) == intt_swap4(ah, plan)

    def test_wide_modulus_python_fallback(self, rng):
        n = 64
        ctx = find_context(n, 60)
        plan = NttPlan(n, ctx)
        a = [rng.randrange(ctx.q) for _ in range(n)]
        abr = bit_reverse(a)
        assert list(map(int, ntt_fast(abr, plan))) == ntt_swap4(abr, plan)


class TestSwapDiscipline:
    def test_stage0_layout_single_bfu(self):
        # four-butterfly flush groups: first outputs fill the group's slots
        # in read order, second outputs follow
        stages, _ = _swap_schedule(64, 4)
        layout = [None] * 64
        for i, (rp, w1, w2) in enumerate(stages[0]):
            layout[w1] = 2 * i
            layout[w2] = 2 * i + 1
        assert layout[:16] == [0, 2, 4, 6, 1, 3, 5, 7,
                               8, 10, 12, 14, 9, 11, 13, 15]

    def test_stage0_layout_two_bfu(self):
        stages, _ = _swap_schedule(64, 8)
        layout = [None] * 64
        for i, (rp, w1, w2) in enumerate(stages[0]):
            layout[w1] = 2 * i
            layout[w2] = 2 * i + 1
        assert layout[:16] == [0, 2, 4, 6, 8, 10, 12, 14,
                               1, 3, 5, 7, 9, 11, 13, 15]

    @pytest.mark.parametrize("n", [32, 64, 256, 1024])
    def test_final_permutation_formula(self, n):
        # the closed-form physical address must emerge from the schedule
        _, final_pos = _swap_schedule(n, 4)
        logn = n.bit_length() - 1
        assert final_pos == [physical_address(i, logn) for i in range(n)]

    @pytest.mark.parametrize("n,group", [(64, 4), (64, 8), (256, 4), (256, 16)])
    def test_each_stage_reads_and_writes_every_slot_once(self, n, group):
        stages, _ = _swap_schedule(n, group)
        for sched in stages:
            reads = sorted(p for (rp, _, _) in sched for p in (rp, rp + 1))
            writes = sorted(w for (_, w1, w2) in sched for w in (w1, w2))
            assert reads == list(range(n))
            assert writes == list(range(n))

    @pytest.mark.parametrize("bfus", [1, 2, 4])
    def test_output_independent_of_bfus(self, bfus, rng):
        n = 256
        ctx = find_context(n, 30)
        a = [rng.randrange(ctx.q) for _ in range(n)]
        base = ntt_swap4(bit_reverse(a), NttPlan(n, ctx, 1))
        assert ntt_swap4(bit_reverse(a), NttPlan(n, ctx, bfus)) == base


class TestTwiddles:
    @pytest.mark.parametrize("n", [16, 256, 1024])
    def test_recurrence_matches_offline_table(self, n):
        # stage s twiddle j must equal psi^((n/m)(2j+1)), m = 2^(s+1)
        ctx = find_context(n, 30)
        plan = NttPlan(n, ctx)
        for s in range(plan.logn):
            m = 1 << (s + 1)
            wbase = pow(ctx.psi, n // m, ctx.q)
            table = [pow(wbase, 2 * j + 1, ctx.q) for j in range(m // 2)]
            assert plan.stage_twiddles(s) == table

    def test_inverse_twiddles(self):
        n = 64
        ctx = find_context(n, 30)
        plan = NttPlan(n, ctx)
        for s in range(plan.logn):
            fwd = plan.stage_twiddles(s)
            inv = plan.stage_twiddles(s, inverse=True)
            assert all(barrett_mul(f, i, ctx) == 1 for f, i in zip(fwd, inv))


class TestPolyMul:
    @pytest.mark.parametrize("n", [8, 16, 32, 64])
    def test_matches_schoolbook(self, n, rng):
        ctx = find_context(n, 30)
        plan = NttPlan(n, ctx)
        for _ in range(25):
            a = [rng.randrange(ctx.q) for _ in range(n)]
            b = [rng.randrange(ctx.q) for _ in range(n)]
            assert poly_mul_negacyclic(a, b, plan) == schoolbook_negacyclic(a, b, ctx.q)

    def test_x_to_the_n_wraps_negatively(self):
        # X^(n-1) * X = -1 mod (X^n + 1)
        n = 16
        ctx = find_context(n, 30)
        plan = NttPlan(n, ctx)
        a = [0] * n
        a[n - 1] = 1
        b = [0] * n
        b[1] = 1
        expected = [ctx.q - 1] + [0] * (n - 1)
        assert poly_mul_negacyclic(a, b, plan) == expected


class TestBitReverse:
    @given(st.integers(min_value=1, max_value=9))
    @settings(max_examples=20, deadline=None)
    def test_involution(self, logn):
        a = list(range(1 << logn))
        random.Random(logn).shuffle(a)
        assert bit_reverse(bit_reverse(a)) == a

    def test_known_order_8(self):
        assert bit_reverse(list(range(8))) == [0, 4, 2, 6, 1, 5, 3, 7]

    def test_non_power_of_two_rejected(self):
        with pytest.raises(ValueError):
            bit_reverse([1, 2, 3])


class TestValidation:
    def test_degree_mismatch(self, plan256):
        with pytest.raises(DegreeMismatch):
            ntt_swap4([0] * 128, plan256)
        with pytest.raises(DegreeMismatch):
            intt_swap4([0] * 512, plan256)
        with pytest.raises(DegreeMismatch):
            ntt_fast([0] * 128, plan256)

    def test_plan_rejects_bad_bfus(self, ctx256):
        with pytest.raises(ValueError):
            NttPlan(256, ctx256, 3)

    def test_plan_rejects_too_many_bfus(self, ctx256):
        with pytest.raises(ValueError):
            NttPlan(256, ctx256, 16)   # needs n >= 32*bfus

    def test_degenerate_sizes_single_bfu_only(self):
        ctx = find_context(16, 30)
        assert NttPlan(16, ctx).degenerate
        with pytest.raises(ValueError):
            NttPlan(16, ctx, 2)

    def test_context_degree_mismatch(self, ctx256):
        with pytest.raises(ValueError):
            NttPlan(512, ctx256)


class TestConvolutionTheorem:
    def test_pointwise_product_is_negacyclic_convolution(self, rng):
        # the chain of limb moduli must all agree with the schoolbook result
        n = 32
        for ctx in find_context_chain(n, 30, 2):
            plan = NttPlan(n, ctx)
            a = [rng.randrange(ctx.q) for _ in range(n)]
            b = [rng.randrange(ctx.q) for _ in range(n)]
            assert poly_mul_negacyclic(a, b, plan) == schoolbook_negacyclic(a, b, ctx.q)
