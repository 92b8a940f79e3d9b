"""Negacyclic NTT/iNTT with the swap-group memory discipline.

The forward transform takes its input in bit-reversed index order and
returns NTT(a) in normal order, where NTT(a)[i] = sum_j a[j] psi^((2i+1)j):
the 2N-th root psi is folded into the per-stage twiddle schedule (merged-psi
Cooley-Tukey), so stage s with block size m = 2^(s+1) steps its twiddle as

    w_0 = psi^(N/m),  w_(j+1) = w_j * omega_m,  omega_m = psi^(2N/m),

advancing once every N/m butterflies when butterflies are issued
twiddle-class-major.  The inverse runs the stages backwards with
Gentleman-Sande butterflies on psi^-1 powers and one final n^-1 scaling;
it returns coefficients in the forward transform's bit-reversed input
layout, so intt_swap4(ntt_swap4(a)) == a exactly.

Physically, every stage reads adjacent memory pairs.  The reordering step
buffers 4*B consecutive butterfly outputs (B = parallel butterfly units)
and writes the 8*B results back with all first outputs preceding all
second outputs, which places the next stage's operand pairs in adjacent
slots and spreads consecutive butterflies across banks.  After the last
stage the values sit at the physical addresses given by
``physical_address``; the transform undoes that permutation on the way out.

Degenerate sizes N < 32 cannot form full 4-butterfly groups in their late
stages; such plans fall back to a 2-butterfly (swap2-style) grouping and
are marked ``degenerate`` (they exist for oracle testing only).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .modarith import ModulusContext, barrett_mul

_SUPPORTED_BFUS = (1, 2, 4, 8, 16, 32)


class DegreeMismatch(Exception):
    """Input vector length does not match the plan's degree."""


def bit_reverse(a: list) -> list:
    """Permute element i to index reverse_bits(i); involutive."""
    n = len(a)
    if n & (n - 1):
        raise ValueError("length must be a power of two")
    logn = n.bit_length() - 1
    out = [None] * n
    for i in range(n):
        r = 0
        x = i
        for _ in range(logn):
            r = (r << 1) | (x & 1)
            x >>= 1
        out[r] = a[i]
    return out


def physical_address(i: int, logn: int) -> int:
    """Final-stage physical slot of logical index i for the 4-group discipline.

    Bit layout {i[logn-3:2], i[logn-1:logn-2], i[1:0]}: the two top bits
    rotate below the middle field while the two low bits stay put.
    """
    low = i & 3
    top = (i >> (logn - 2)) & 3
    mid = (i >> 2) & ((1 << (logn - 4)) - 1)
    return (mid << 4) | (top << 2) | low


@lru_cache(maxsize=64)
def _swap_schedule(n: int, group: int):
    """Per-stage butterfly address streams for the swap-group discipline.

    Returns (stages, final_pos).  stages[s] is a list over butterflies in
    issue order of (read_slot, write_slot_first, write_slot_second); the
    second read slot is always read_slot + 1.  final_pos maps logical index
    to physical slot after the last stage.  The streams are data
    independent, so the bank simulator replays them directly.
    """
    logn = n.bit_length() - 1
    pos = list(range(n))
    stages = []
    for s in range(logn):
        m = 1 << (s + 1)
        half = m >> 1
        blocks = n // m
        sched = []
        pending = []  # (l1, l2, p1) for the current group
        for j in range(half):
            for blk in range(blocks):
                l1 = blk * m + j
                l2 = l1 + half
                p1 = pos[l1]
                assert pos[l2] == p1 + 1, "swap discipline broke pair adjacency"
                pending.append((l1, l2, p1))
                if len(pending) == group:
                    slots = [p for (_, _, p) in pending for p in (p, p + 1)]
                    for idx, (la, lb, rp) in enumerate(pending):
                        w1 = slots[idx]
                        w2 = slots[group + idx]
                        pos[la] = w1
                        pos[lb] = w2
                        sched.append((rp, w1, w2))
                    pending = []
        assert not pending, "stage butterfly count not a multiple of the group"
        stages.append(sched)
    return stages, pos


@dataclass
class NttPlan:
    """Immutable transform plan: degree, modulus context, parallel BFU count."""

    n: int
    ctx: ModulusContext
    bfus: int = 1
    degenerate: bool = field(init=False)

    def __post_init__(self) -> None:
        if self.n & (self.n - 1) or self.n < 4:
            raise ValueError("degree must be a power of two >= 4")
        if self.bfus not in _SUPPORTED_BFUS:
            raise ValueError(f"bfus must be one of {_SUPPORTED_BFUS}")
        if self.ctx.n != self.n:
            raise ValueError("modulus context degree mismatch")
        if self.n >= 32:
            if self.n < 32 * self.bfus:
                raise ValueError("need n >= 32 * bfus for full swap groups")
            self.degenerate = False
        else:
            if self.bfus != 1:
                raise ValueError("degenerate sizes support a single BFU only")
            self.degenerate = True
        self._fw_tw: list[list[int]] | None = None
        self._inv_tw: list[list[int]] | None = None

    @property
    def logn(self) -> int:
        return self.n.bit_length() - 1

    @property
    def group(self) -> int:
        # swap2-style fallback below 32; full 4*B groups otherwise
        return 4 * self.bfus if not self.degenerate else max(1, self.n // 4)

    @property
    def schedule(self):
        return _swap_schedule(self.n, self.group)

    def _twiddles(self, inverse: bool) -> list[list[int]]:
        attr = "_inv_tw" if inverse else "_fw_tw"
        cached = getattr(self, attr)
        if cached is not None:
            return cached
        q = self.ctx.q
        root = self.ctx.psi_inv if inverse else self.ctx.psi
        out = []
        for s in range(self.logn):
            m = 1 << (s + 1)
            w = pow(root, self.n // m, q)
            ratio = w * w % q
            row = []
            for _ in range(m // 2):
                row.append(w)
                w = w * ratio % q
            out.append(row)
        object.__setattr__(self, attr, out)
        return out

    def stage_twiddles(self, stage: int, inverse: bool = False) -> list[int]:
        """Twiddle value per class j of a stage, as the recurrence generates them."""
        return self._twiddles(inverse)[stage]


def ntt_swap4(a: list[int], plan: NttPlan) -> list[int]:
    """Forward transform through the physical swap-group memory simulation.

    Input in bit-reversed order, output in normal order.
    """
    if len(a) != plan.n:
        raise DegreeMismatch(f"expected {plan.n} coefficients, got {len(a)}")
    q = plan.ctx.q
    f = plan.ctx.barrett_factor
    sh = plan.ctx.shift
    mem = list(a)
    stages, final_pos = plan.schedule
    twiddles = plan._twiddles(inverse=False)
    g = plan.group
    for s, sched in enumerate(stages):
        class_size = plan.n >> (s + 1)
        tw = twiddles[s]
        # reorder-unit semantics: a whole group reads before any of its
        # writes land, so buffer per group (write slots overlap the read
        # slots of later butterflies in the same group)
        for base in range(0, len(sched), g):
            chunk = sched[base:base + g]
            outs = []
            for off, (rp, w1, w2) in enumerate(chunk):
                w = tw[(base + off) // class_size]
                u = mem[rp]
                v = mem[rp + 1]
                t = v * w
                t -= ((t * f) >> sh) * q
                if t >= q:
                    t -= q
                hi = u + t
                if hi >= q:
                    hi -= q
                lo = u - t
                if lo < 0:
                    lo += q
                outs.append((w1, hi, w2, lo))
            for w1, hi, w2, lo in outs:
                mem[w1] = hi
                mem[w2] = lo
    return [mem[final_pos[l]] for l in range(plan.n)]


def intt_swap4(a_hat: list[int], plan: NttPlan) -> list[int]:
    """Inverse transform; returns coefficients in bit-reversed input layout.

    Replays the forward stages backwards: reads from the slots the forward
    stage wrote (the reorder-unit groups) and writes back to the adjacent
    pairs it read.
    """
    if len(a_hat) != plan.n:
        raise DegreeMismatch(f"expected {plan.n} coefficients, got {len(a_hat)}")
    q = plan.ctx.q
    f = plan.ctx.barrett_factor
    sh = plan.ctx.shift
    stages, final_pos = plan.schedule
    mem = [0] * plan.n
    for l, p in enumerate(final_pos):
        mem[p] = a_hat[l]
    twiddles = plan._twiddles(inverse=True)
    g = plan.group
    for s in range(plan.logn - 1, -1, -1):
        class_size = plan.n >> (s + 1)
        tw = twiddles[s]
        sched = stages[s]
        # mirror the forward group buffering: the slot set a group wrote is
        # exactly the pair set it read, so read the whole group first
        for base in range(0, len(sched), g):
            chunk = sched[base:base + g]
            outs = []
            for off, (rp, w1, w2) in enumerate(chunk):
                w = tw[(base + off) // class_size]
                x = mem[w1]
                y = mem[w2]
                hi = x + y
                if hi >= q:
                    hi -= q
                d = x - y
                if d < 0:
                    d += q
                t = d * w
                t -= ((t * f) >> sh) * q
                if t >= q:
                    t -= q
                outs.append((rp, hi, t))
            for rp, hi, t in outs:
                mem[rp] = hi
                mem[rp + 1] = t
    n_inv = plan.ctx.n_inv
    return [barrett_mul(c, n_inv, plan.ctx) for c in mem]


def _fast_supported(plan: NttPlan) -> bool:
    return plan.ctx.q < (1 << 31)


def ntt_fast(a, plan: NttPlan):
    """Vectorized forward transform, bit-identical to ntt_swap4.

    numpy path for moduli below 2^31 (products fit in uint64); plain loops
    otherwise.  Accepts a list or uint64 array, returns a uint64 array.
    """
    if len(a) != plan.n:
        raise DegreeMismatch(f"expected {plan.n} coefficients, got {len(a)}")
    if not _fast_supported(plan):
        return np.array(_ntt_py(list(map(int, a)), plan), dtype=np.uint64)
    q = np.uint64(plan.ctx.q)
    A = np.asarray(a, dtype=np.uint64).copy()
    for s in range(plan.logn):
        m = 1 << (s + 1)
        half = m >> 1
        tw = np.array(plan.stage_twiddles(s), dtype=np.uint64)
        V = A.reshape(plan.n // m, m)
        E = V[:, :half]
        O = V[:, half:]
        t = O * tw[np.newaxis, :] % q
        O[:] = (E + (q - t)) % q
        E[:] = (E + t) % q
    return A


def intt_fast(a_hat, plan: NttPlan):
    """Vectorized inverse transform, bit-identical to intt_swap4."""
    if len(a_hat) != plan.n:
        raise DegreeMismatch(f"expected {plan.n} coefficients, got {len(a_hat)}")
    if not _fast_supported(plan):
        return np.array(_intt_py(list(map(int, a_hat)), plan), dtype=np.uint64)
    q = np.uint64(plan.ctx.q)
    A = np.asarray(a_hat, dtype=np.uint64).copy()
    for s in range(plan.logn - 1, -1, -1):
        m = 1 << (s + 1)
        half = m >> 1
        tw = np.array(plan.stage_twiddles(s, inverse=True), dtype=np.uint64)
        V = A.reshape(plan.n // m, m)
        E = V[:, :half]
        O = V[:, half:]
        d = (E + (q - O)) % q
        E[:] = (E + O) % q
        O[:] = d * tw[np.newaxis, :] % q
    return A * np.uint64(plan.ctx.n_inv) % q


def _ntt_py(a: list[int], plan: NttPlan) -> list[int]:
    q = plan.ctx.q
    A = list(a)
    for s in range(plan.logn):
        m = 1 << (s + 1)
        half = m >> 1
        tw = plan.stage_twiddles(s)
        for j in range(half):
            w = tw[j]
            for blk in range(plan.n // m):
                i1 = blk * m + j
                i2 = i1 + half
                t = A[i2] * w % q
                u = A[i1]
                A[i1] = (u + t) % q
                A[i2] = (u - t) % q
    return A


def _intt_py(a_hat: list[int], plan: NttPlan) -> list[int]:
    q = plan.ctx.q
    A = list(a_hat)
    for s in range(plan.logn - 1, -1, -1):
        m = 1 << (s + 1)
        half = m >> 1
        tw = plan.stage_twiddles(s, inverse=True)
        for j in range(half):
            w = tw[j]
            for blk in range(plan.n // m):
                i1 = blk * m + j
                i2 = i1 + half
                x, y = A[i1], A[i2]
                A[i1] = (x + y) % q
                A[i2] = (x - y) * w % q
    n_inv = plan.ctx.n_inv
    return [c * n_inv % q for c in A]


def poly_mul_negacyclic(a: list[int], b: list[int], plan: NttPlan) -> list[int]:
    """a * b mod (X^N + 1, q); inputs and output in natural coefficient order."""
    if len(a) != plan.n or len(b) != plan.n:
        raise DegreeMismatch("operand length mismatch")
    a_hat = ntt_swap4(bit_reverse(a), plan)
    b_hat = ntt_swap4(bit_reverse(b), plan)
    c_hat = [barrett_mul(x, y, plan.ctx) for x, y in zip(a_hat, b_hat)]
    return bit_reverse(intt_swap4(c_hat, plan))
