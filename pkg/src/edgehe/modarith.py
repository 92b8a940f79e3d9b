"""Modular arithmetic over word-sized NTT-friendly primes.

All reductions go through Barrett's method (two multiplies, a shift and a
single conditional subtraction) so that the arithmetic mirrors what a
division-free hardware multiplier would do.  A ``ModulusContext`` bundles a
prime q with q = 1 (mod 2N), its Barrett constant, and the 2N-th root of
unity psi that drives the negacyclic transforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache


class NoPrimeFound(Exception):
    """No prime of the requested width satisfies q = 1 (mod 2n)."""


# Deterministic Miller-Rabin witness set, valid for all inputs below 2^64
# (and a strong probabilistic test above that).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(x: int) -> bool:
    if x < 2:
        return False
    for p in _MR_WITNESSES:
        if x % p == 0:
            return x == p
    d = x - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        v = pow(a, d, x)
        if v == 1 or v == x - 1:
            continue
        for _ in range(s - 1):
            v = v * v % x
            if v == x - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class ModulusContext:
    """An NTT-friendly prime with its precomputed transform constants.

    Immutable after construction; safe to share between threads.
    """

    q: int
    n: int
    shift: int
    barrett_factor: int
    psi: int
    psi_inv: int
    n_inv: int

    def __post_init__(self) -> None:
        q, n = self.q, self.n
        if n < 2 or n & (n - 1):
            raise ValueError(f"n={n} is not a power of two")
        if not is_prime(q):
            raise ValueError(f"q={q} is not prime")
        if q % (2 * n) != 1:
            raise ValueError(f"q={q} is not 1 mod 2n (n={n})")
        if pow(self.psi, 2 * n, q) != 1 or pow(self.psi, n, q) != q - 1:
            raise ValueError("psi is not a primitive 2n-th root of unity")
        if self.psi * self.psi_inv % q != 1:
            raise ValueError("psi_inv inconsistent")
        if n * self.n_inv % q != 1:
            raise ValueError("n_inv inconsistent")

    @property
    def bits(self) -> int:
        return self.q.bit_length()


def barrett_mul(a: int, b: int, ctx: ModulusContext) -> int:
    """(a * b) mod q via Barrett reduction.

    Wide multiply, multiply by the precomputed factor, shift, subtract, and
    at most one conditional subtraction.  With shift = 2*bitwidth(q) + 1 the
    intermediate estimate is off by at most one multiple of q.
    """
    wide = a * b
    t = (wide * ctx.barrett_factor) >> ctx.shift
    r = wide - t * ctx.q
    if r >= ctx.q:
        r -= ctx.q
    return r


def mod_add_sub(a: int, b: int, ctx: ModulusContext) -> tuple[int, int]:
    """((a + b) mod q, (a - b) mod q), each with one conditional correction."""
    q = ctx.q
    s = a + b
    if s >= q:
        s -= q
    d = a - b
    if d < 0:
        d += q
    return s, d


def _minimal_primitive_root(n: int, q: int) -> int:
    """Smallest primitive 2n-th root of unity mod q.

    2n is a power of two, so every odd power of one primitive root is
    primitive; minimising over those gives a deterministic choice.
    """
    m = 2 * n
    exp = (q - 1) // m
    base = None
    for g in range(2, q):
        x = pow(g, exp, q)
        if pow(x, m // 2, q) == q - 1:
            base = x
            break
    assert base is not None, "q prime with q=1 mod 2n always has a generator"
    best = base
    cur = base
    sq = base * base % q
    for _ in range(3, m, 2):
        cur = cur * sq % q
        if cur < best:
            best = cur
    return best


def make_context(n: int, q: int) -> ModulusContext:
    """Build a context around a caller-supplied prime q = 1 (mod 2n)."""
    psi = _minimal_primitive_root(n, q)
    shift = 2 * q.bit_length() + 1
    return ModulusContext(
        q=q,
        n=n,
        shift=shift,
        barrett_factor=(1 << shift) // q,
        psi=psi,
        psi_inv=pow(psi, -1, q),
        n_inv=pow(n, -1, q),
    )


@lru_cache(maxsize=None)
def find_context(n: int, bits: int) -> ModulusContext:
    """Context for the largest prime below 2^bits with q = 1 (mod 2n)."""
    if n < 8 or n > 1 << 14 or n & (n - 1):
        raise ValueError(f"n={n} must be a power of two in [8, 2^14]")
    q = ((1 << bits) - 2) // (2 * n) * (2 * n) + 1
    while q > 2 * n:
        if is_prime(q):
            return make_context(n, q)
        q -= 2 * n
    raise NoPrimeFound(f"no prime = 1 mod {2*n} below 2^{bits}")


def find_context_chain(n: int, bits: int, count: int) -> list[ModulusContext]:
    """The ``count`` largest distinct primes below 2^bits with q = 1 (mod 2n)."""
    out: list[ModulusContext] = []
    q = ((1 << bits) - 2) // (2 * n) * (2 * n) + 1
    while q > 2 * n and len(out) < count:
        if is_prime(q):
            out.append(make_context(n, q))
        q -= 2 * n
    if len(out) < count:
        raise NoPrimeFound(
            f"only {len(out)} primes = 1 mod {2*n} below 2^{bits}, wanted {count}"
        )
    return out
