"""RNS-CKKS edge operations: keygen, encrypt, decrypt, fixed-point codec.

Messages live in R_Q = Z_Q[X]/(X^N + 1) with Q a product of word-sized
primes; every polynomial is carried as its residue limbs mod each q_i.
Encryption is c0 = mu * pk0 + m + e0, c1 = mu * pk1 + e1 with a ternary mu
and binomial e0, e1 sampled once per ciphertext and reduced into each limb.
Decryption computes c0 + c1 * s pointwise in the NTT domain and inverse
transforms; it operates on the last limb q_ell by default (the modulus the
decryption congruence is stated against), with an all-limbs mode for
testing, since the identity holds limb by limb either way.

Encode/decode are coefficient-wise fixed point (round(v * 2^scale_bits)
with centered lift), declared plumbing in place of canonical-embedding slot
packing, which belongs to the host-side library.

Datapath sequencing: ``encrypt`` drives an ``EdgeDatapath`` that mirrors
the two-bank-group schedule (one pipeline invocation per output polynomial
per limb, two per limb for the (c0, c1) pair); ``encrypt_direct`` evaluates
the same expressions without the sequencer and is bit-identical.  The
transforms default to the vectorized fast path, which is bit-identical to
the physical swap-group simulation (``physical=True`` forces the latter).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .banksim import PipelineOp
from .keccak import KeccakSponge
from .modarith import ModulusContext, find_context_chain
from .ntt import NttPlan, bit_reverse, intt_fast, intt_swap4, ntt_fast, ntt_swap4
from .samplers import (
    BINOMIAL_HALF_BITS,
    sample_binomial,
    sample_ternary,
    sample_uniform_mod_q,
)


class InvalidParams(Exception):
    """Scheme parameters violate a precondition (degree, primes, scale)."""


class ParamsMismatch(Exception):
    """Operands were built under different scheme parameters."""


class DomainError(Exception):
    """Coefficient-domain and NTT-domain operands were mixed."""


class ScaleOverflow(Exception):
    """A value does not fit the fixed-point range at the current scale."""


class FormatError(Exception):
    """Malformed ciphertext bytes."""


CIPHERTEXT_MAGIC = b"RISE1"
DEFAULT_LIMB_BITS = 30
DEFAULT_SCALE_BITS = 20
# levels chosen so limb_bits * levels matches the supported log Q points
PRESET_LEVELS = {1 << 10: 2, 1 << 12: 3, 1 << 14: 13}

SIGMA = math.sqrt(BINOMIAL_HALF_BITS / 2)


@dataclass(frozen=True)
class SchemeParams:
    n: int
    limbs: tuple[ModulusContext, ...]
    scale_bits: int = DEFAULT_SCALE_BITS

    def __post_init__(self) -> None:
        if self.n < 4 or self.n & (self.n - 1):
            raise InvalidParams(f"n={self.n} is not a power of two")
        if not self.limbs:
            raise InvalidParams("at least one modulus limb is required")
        qs = [c.q for c in self.limbs]
        if len(set(qs)) != len(qs):
            raise InvalidParams("limb moduli must be distinct")
        for c in self.limbs:
            if c.n != self.n:
                raise InvalidParams(f"limb q={c.q} built for degree {c.n}, not {self.n}")
            if c.q % (2 * self.n) != 1:
                raise InvalidParams(f"q={c.q} is not 1 mod 2n")
        if not 1 <= self.scale_bits < min(qs).bit_length() - 1:
            raise InvalidParams(f"scale_bits={self.scale_bits} out of range")

    @property
    def ell(self) -> int:
        return len(self.limbs)

    @property
    def moduli(self) -> tuple[int, ...]:
        return tuple(c.q for c in self.limbs)

    @property
    def log_q(self) -> int:
        return sum(c.q.bit_length() for c in self.limbs)

    @property
    def params_id(self) -> str:
        h = hashlib.sha256()
        h.update(self.n.to_bytes(4, "little"))
        h.update(self.scale_bits.to_bytes(1, "little"))
        for q in self.moduli:
            h.update(q.to_bytes(8, "little"))
        return h.hexdigest()[:16]


def make_params(n: int, levels: int | None = None,
                limb_bits: int = DEFAULT_LIMB_BITS,
                scale_bits: int = DEFAULT_SCALE_BITS) -> SchemeParams:
    """Parameter set with the ``levels`` largest NTT-friendly limb primes."""
    if levels is None:
        try:
            levels = PRESET_LEVELS[n]
        except KeyError:
            raise InvalidParams(f"no preset level count for n={n}") from None
    ctxs = find_context_chain(n, limb_bits, levels)
    return SchemeParams(n=n, limbs=tuple(ctxs), scale_bits=scale_bits)


@dataclass
class RnsPolynomial:
    """Residue-limb polynomial with an explicit transform-domain tag."""

    limbs: list[np.ndarray]
    domain: str                       # coeff | ntt
    moduli: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.domain not in ("coeff", "ntt"):
            raise DomainError(f"unknown domain tag {self.domain!r}")
        if len(self.limbs) != len(self.moduli):
            raise ValueError("limb count does not match modulus count")
        n = len(self.limbs[0])
        for arr, q in zip(self.limbs, self.moduli):
            if len(arr) != n:
                raise ValueError("limb length mismatch")
            if arr.dtype != np.uint64:
                raise ValueError("limbs must be uint64 arrays")
        self.n = n

    @classmethod
    def zeros(cls, params: SchemeParams, domain: str = "coeff") -> "RnsPolynomial":
        return cls([np.zeros(params.n, dtype=np.uint64) for _ in params.limbs],
                   domain, params.moduli)

    @classmethod
    def from_signed(cls, coeffs, params: SchemeParams) -> "RnsPolynomial":
        """Small signed integer coefficients reduced into every limb."""
        c = np.asarray(coeffs, dtype=np.int64)
        if len(c) != params.n:
            raise ValueError("coefficient count does not match degree")
        limbs = [np.mod(c, q).astype(np.uint64) for q in params.moduli]
        return cls(limbs, "coeff", params.moduli)

    def copy(self) -> "RnsPolynomial":
        return RnsPolynomial([l.copy() for l in self.limbs], self.domain, self.moduli)


@dataclass
class KeyPair:
    s: RnsPolynomial          # ternary secret, NTT domain
    pk0: RnsPolynomial        # NTT domain
    pk1: RnsPolynomial        # NTT domain
    params_id: str


@dataclass
class Ciphertext:
    c0: RnsPolynomial         # NTT domain
    c1: RnsPolynomial         # NTT domain
    params_id: str

    def __post_init__(self) -> None:
        if self.c0.moduli != self.c1.moduli or self.c0.n != self.c1.n:
            raise ParamsMismatch("ciphertext halves disagree on parameters")
        if self.c0.domain != "ntt" or self.c1.domain != "ntt":
            raise DomainError("ciphertext polynomials must be in the NTT domain")


# ---------------------------------------------------------------------------
# domain transforms


@lru_cache(maxsize=16)
def _brv_perm(n: int) -> np.ndarray:
    return np.array(bit_reverse(list(range(n))), dtype=np.int64)


@lru_cache(maxsize=64)
def _plan(n: int, q: int) -> NttPlan:
    from .modarith import make_context

    return NttPlan(n, make_context(n, q))


def to_ntt(poly: RnsPolynomial, physical: bool = False) -> RnsPolynomial:
    """coeff -> ntt; the only sanctioned forward domain transition."""
    if poly.domain != "coeff":
        raise DomainError("to_ntt requires a coeff-domain polynomial")
    perm = _brv_perm(poly.n)
    out = []
    for arr, q in zip(poly.limbs, poly.moduli):
        plan = _plan(poly.n, q)
        if physical:
            res = np.array(ntt_swap4([int(x) for x in arr[perm]], plan),
                           dtype=np.uint64)
        else:
            res = ntt_fast(arr[perm], plan)
        out.append(res)
    return RnsPolynomial(out, "ntt", poly.moduli)


def to_coeff(poly: RnsPolynomial, physical: bool = False) -> RnsPolynomial:
    """ntt -> coeff; the only sanctioned inverse domain transition."""
    if poly.domain != "ntt":
        raise DomainError("to_coeff requires an ntt-domain polynomial")
    perm = _brv_perm(poly.n)
    out = []
    for arr, q in zip(poly.limbs, poly.moduli):
        plan = _plan(poly.n, q)
        if physical:
            res = np.array(intt_swap4([int(x) for x in arr], plan),
                           dtype=np.uint64)[perm]
        else:
            res = np.asarray(intt_fast(arr, plan))[perm]
        out.append(res)
    return RnsPolynomial(out, "coeff", poly.moduli)


def _pointwise(a: RnsPolynomial, b: RnsPolynomial, op) -> RnsPolynomial:
    if a.domain != b.domain:
        raise DomainError(f"cannot mix {a.domain} and {b.domain} operands")
    if a.moduli != b.moduli or a.n != b.n:
        raise ParamsMismatch("operand parameter mismatch")
    out = [op(x, y, np.uint64(q)) for x, y, q in zip(a.limbs, b.limbs, a.moduli)]
    return RnsPolynomial(out, a.domain, a.moduli)


def poly_add(a: RnsPolynomial, b: RnsPolynomial) -> RnsPolynomial:
    return _pointwise(a, b, lambda x, y, q: (x + y) % q)


def poly_sub(a: RnsPolynomial, b: RnsPolynomial) -> RnsPolynomial:
    return _pointwise(a, b, lambda x, y, q: (x + (q - y)) % q)


def poly_mul(a: RnsPolynomial, b: RnsPolynomial) -> RnsPolynomial:
    """Pointwise product; meaningful in the NTT domain."""
    if a.domain != "ntt":
        raise DomainError("pointwise multiplication requires NTT-domain operands")
    return _pointwise(a, b, lambda x, y, q: x * y % q)


# ---------------------------------------------------------------------------
# datapath sequencer


class EdgeDatapath:
    """Unified en/decrypt pipeline shared by both output polynomials.

    One invocation streams one output polynomial of one limb through the
    two bank groups (operands transform in BG0 while the accumulator sits
    in BG1), so an encryption costs two invocations per limb.
    """

    def __init__(self, physical: bool = False):
        self.invocations = 0
        self.physical = physical

    def _transform_limb(self, signed: np.ndarray, q: int, n: int) -> np.ndarray:
        plan = _plan(n, q)
        perm = _brv_perm(n)
        residues = np.mod(signed.astype(np.int64), q).astype(np.uint64)
        if self.physical:
            return np.array(ntt_swap4([int(x) for x in residues[perm]], plan),
                            dtype=np.uint64)
        return ntt_fast(residues[perm], plan)

    def output_poly(self, q: int, n: int, key_limb: np.ndarray,
                    mu: np.ndarray, addends: list[np.ndarray]) -> np.ndarray:
        """key_limb * NTT(mu) + sum(NTT(addend_i)), one pipeline pass."""
        self.invocations += 1
        uq = np.uint64(q)
        acc = self._transform_limb(mu, q, n) * key_limb % uq
        for term in addends:
            acc = (acc + self._transform_limb(term, q, n)) % uq
        return acc

    def inverse_poly(self, q: int, n: int, c0: np.ndarray, c1: np.ndarray,
                     s: np.ndarray) -> np.ndarray:
        """intt(c0 + c1 * s), the decryption pass (inputs already NTT)."""
        self.invocations += 1
        uq = np.uint64(q)
        acc = (c0 + c1 * s % uq) % uq
        plan = _plan(n, q)
        perm = _brv_perm(n)
        if self.physical:
            return np.array(intt_swap4([int(x) for x in acc], plan),
                            dtype=np.uint64)[perm]
        return np.asarray(intt_fast(acc, plan))[perm]


# ---------------------------------------------------------------------------
# key generation


def _stream(seed: bytes, tag: bytes) -> KeccakSponge:
    return KeccakSponge(seed + b"/" + tag)


def keygen(params: SchemeParams, seed: bytes) -> KeyPair:
    """Ternary secret, uniform pk1, pk0 = -(pk1 * s + e_pk); all NTT domain."""
    n = params.n
    s_small = np.array(sample_ternary(_stream(seed, b"sk"), n).coeffs, dtype=np.int64)
    e_small = np.array(sample_binomial(_stream(seed, b"epk"), n).coeffs, dtype=np.int64)
    s_hat = to_ntt(RnsPolynomial.from_signed(s_small, params))
    e_hat = to_ntt(RnsPolynomial.from_signed(e_small, params))
    a_limbs = []
    for i, ctx in enumerate(params.limbs):
        a = sample_uniform_mod_q(_stream(seed, b"pk_a%d" % i), n, ctx)
        a_limbs.append(np.array(a.coeffs, dtype=np.uint64))
    pk1 = RnsPolynomial(a_limbs, "ntt", params.moduli)
    pk0 = poly_sub(RnsPolynomial.zeros(params, "ntt"),
                   poly_add(poly_mul(pk1, s_hat), e_hat))
    # construction identity: pk0 + pk1*s + e_pk = 0 in every limb
    check = poly_add(poly_add(pk0, poly_mul(pk1, s_hat)), e_hat)
    for limb in check.limbs:
        if limb.any():
            raise AssertionError("public key identity violated")
    return KeyPair(s=s_hat, pk0=pk0, pk1=pk1, params_id=params.params_id)


# ---------------------------------------------------------------------------
# encryption / decryption


def _encryption_randomness(params: SchemeParams, seed: bytes, zero_noise: bool):
    n = params.n
    if zero_noise:
        z = np.zeros(n, dtype=np.int64)
        return z, z, z
    mu = np.array(sample_ternary(_stream(seed, b"mu"), n).coeffs, dtype=np.int64)
    e0 = np.array(sample_binomial(_stream(seed, b"e0"), n).coeffs, dtype=np.int64)
    e1 = np.array(sample_binomial(_stream(seed, b"e1"), n).coeffs, dtype=np.int64)
    return mu, e0, e1


def _check_encrypt_args(m: RnsPolynomial, keys: KeyPair, params: SchemeParams):
    if m.domain != "coeff":
        raise DomainError("message must be in the coefficient domain")
    if m.moduli != params.moduli or m.n != params.n:
        raise ParamsMismatch("message parameter mismatch")
    if keys.params_id != params.params_id:
        raise ParamsMismatch("key was generated under different parameters")


def encrypt(m: RnsPolynomial, keys: KeyPair, params: SchemeParams, seed: bytes,
            datapath: EdgeDatapath | None = None,
            _zero_noise: bool = False) -> Ciphertext:
    """Sequenced encryption: two datapath invocations per limb.

    ``_zero_noise`` is a test hook forcing mu = e0 = e1 = 0.
    """
    _check_encrypt_args(m, keys, params)
    dp = datapath if datapath is not None else EdgeDatapath()
    mu, e0, e1 = _encryption_randomness(params, seed, _zero_noise)
    n = params.n
    c0_limbs, c1_limbs = [], []
    for i, q in enumerate(params.moduli):
        m_signed = m.limbs[i].astype(np.int64)
        c0_limbs.append(dp.output_poly(q, n, keys.pk0.limbs[i], mu, [m_signed, e0]))
        c1_limbs.append(dp.output_poly(q, n, keys.pk1.limbs[i], mu, [e1]))
    return Ciphertext(
        c0=RnsPolynomial(c0_limbs, "ntt", params.moduli),
        c1=RnsPolynomial(c1_limbs, "ntt", params.moduli),
        params_id=params.params_id,
    )


def encrypt_direct(m: RnsPolynomial, keys: KeyPair, params: SchemeParams,
                   seed: bytes, _zero_noise: bool = False) -> Ciphertext:
    """Unsequenced evaluation of the same expressions (reference path)."""
    _check_encrypt_args(m, keys, params)
    mu, e0, e1 = _encryption_randomness(params, seed, _zero_noise)
    mu_hat = to_ntt(RnsPolynomial.from_signed(mu, params))
    e0_hat = to_ntt(RnsPolynomial.from_signed(e0, params))
    e1_hat = to_ntt(RnsPolynomial.from_signed(e1, params))
    m_hat = to_ntt(m)
    c0 = poly_add(poly_add(poly_mul(mu_hat, keys.pk0), m_hat), e0_hat)
    c1 = poly_add(poly_mul(mu_hat, keys.pk1), e1_hat)
    return Ciphertext(c0=c0, c1=c1, params_id=params.params_id)


def decrypt(ct: Ciphertext, s: RnsPolynomial, params: SchemeParams,
            all_limbs: bool = False,
            datapath: EdgeDatapath | None = None) -> RnsPolynomial:
    """c0 + c1 * s, inverse transformed; coefficient-domain result.

    Defaults to the last limb q_ell only (the congruence is stated mod
    q_ell; it holds in every limb, so ``all_limbs=True`` runs them all).
    """
    if ct.params_id != params.params_id:
        raise ParamsMismatch("ciphertext was produced under different parameters")
    if s.domain != "ntt" or s.moduli != params.moduli:
        raise ParamsMismatch("secret key parameter mismatch")
    dp = datapath if datapath is not None else EdgeDatapath()
    idxs = range(params.ell) if all_limbs else [params.ell - 1]
    limbs, moduli = [], []
    for i in idxs:
        q = params.moduli[i]
        limbs.append(dp.inverse_poly(q, params.n, ct.c0.limbs[i],
                                     ct.c1.limbs[i], s.limbs[i]))
        moduli.append(q)
    return RnsPolynomial(limbs, "coeff", tuple(moduli))


def ct_add(a: Ciphertext, b: Ciphertext) -> Ciphertext:
    """Pointwise ciphertext addition (homomorphic add)."""
    if a.params_id != b.params_id:
        raise ParamsMismatch("ciphertexts from different parameter sets")
    return Ciphertext(c0=poly_add(a.c0, b.c0), c1=poly_add(a.c1, b.c1),
                      params_id=a.params_id)


def noise_bound(params: SchemeParams) -> int:
    """Infinity-norm bound on decrypt(encrypt(m)) - m for a fresh ciphertext.

    The residual error is -mu*e_pk + e0 + e1*s.  With binomial sigma and
    ternary mu, s, a product coefficient is a sum of n terms of variance
    (2/3)*sigma^2, so its std is sigma*sqrt(2n/3); a 6-sigma tail factor on
    each of the three terms gives

        B_clean = 6*sigma * (1 + 2*sqrt(2n/3)).
    """
    return math.ceil(6 * SIGMA * (1 + 2 * math.sqrt(2 * params.n / 3)))


# ---------------------------------------------------------------------------
# fixed-point codec


def encode_fixed(values, params: SchemeParams) -> RnsPolynomial:
    """Coefficient-wise fixed point: coeff_i = round(values[i] * 2^scale)."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or len(v) > params.n:
        raise ValueError("values must be a vector of length <= n")
    scaled = np.rint(v * float(1 << params.scale_bits)).astype(np.int64)
    limit = min(params.moduli) // 2
    if len(scaled) and int(np.abs(scaled).max()) >= limit:
        raise ScaleOverflow(
            f"|value| * 2^{params.scale_bits} must stay below q_min/2 = {limit}")
    coeffs = np.zeros(params.n, dtype=np.int64)
    coeffs[: len(scaled)] = scaled
    return RnsPolynomial.from_signed(coeffs, params)


def decode_fixed(poly: RnsPolynomial, params: SchemeParams,
                 count: int | None = None) -> np.ndarray:
    """Centered lift of the first limb divided by 2^scale_bits."""
    if poly.domain != "coeff":
        raise DomainError("decode requires a coefficient-domain polynomial")
    q = poly.moduli[0]
    arr = poly.limbs[0].astype(np.int64)
    half = q // 2
    centered = np.where(arr > half, arr - q, arr)
    out = centered.astype(np.float64) / float(1 << params.scale_bits)
    return out[:count] if count is not None else out


# ---------------------------------------------------------------------------
# serialization


def _word_bytes(q: int) -> int:
    return 4 if q.bit_length() <= 32 else 8


def serialize_ciphertext(ct: Ciphertext, params: SchemeParams) -> bytes:
    """magic, n (u32), ell (u8), q_i (u64 each), scale_bits (u8), c0, c1."""
    if ct.params_id != params.params_id:
        raise ParamsMismatch("ciphertext does not match the given parameters")
    out = bytearray()
    out += CIPHERTEXT_MAGIC
    out += params.n.to_bytes(4, "little")
    out += params.ell.to_bytes(1, "little")
    for q in params.moduli:
        out += q.to_bytes(8, "little")
    out += params.scale_bits.to_bytes(1, "little")
    for poly in (ct.c0, ct.c1):
        for limb, q in zip(poly.limbs, params.moduli):
            dtype = "<u4" if _word_bytes(q) == 4 else "<u8"
            out += limb.astype(dtype).tobytes()
    return bytes(out)


def deserialize_ciphertext(data: bytes) -> tuple[Ciphertext, SchemeParams]:
    """Parse and validate the binary ciphertext format."""
    from .modarith import make_context

    if len(data) < 11 or data[:5] != CIPHERTEXT_MAGIC:
        raise FormatError("bad magic")
    pos = 5
    n = int.from_bytes(data[pos:pos + 4], "little"); pos += 4
    ell = data[pos]; pos += 1
    if n < 4 or n & (n - 1) or ell < 1:
        raise FormatError(f"invalid header (n={n}, ell={ell})")
    if len(data) < pos + 8 * ell + 1:
        raise FormatError("truncated header")
    qs = []
    for _ in range(ell):
        qs.append(int.from_bytes(data[pos:pos + 8], "little")); pos += 8
    scale_bits = data[pos]; pos += 1
    try:
        params = SchemeParams(
            n=n, limbs=tuple(make_context(n, q) for q in qs), scale_bits=scale_bits)
    except (ValueError, InvalidParams) as exc:
        raise FormatError(f"invalid parameters in header: {exc}") from exc
    body = sum(2 * n * _word_bytes(q) for q in qs)
    if len(data) != pos + body:
        raise FormatError(f"body length {len(data) - pos}, expected {body}")
    polys = []
    for _ in range(2):
        limbs = []
        for q in qs:
            wb = _word_bytes(q)
            dtype = "<u4" if wb == 4 else "<u8"
            arr = np.frombuffer(data[pos:pos + n * wb], dtype=dtype).astype(np.uint64)
            pos += n * wb
            if (arr >= q).any():
                raise FormatError("limb coefficient out of range")
            limbs.append(arr)
        polys.append(RnsPolynomial(limbs, "ntt", params.moduli))
    ct = Ciphertext(c0=polys[0], c1=polys[1], params_id=params.params_id)
    return ct, params


KEYPAIR_MAGIC = b"RISEK"


def serialize_keypair(keys: KeyPair, params: SchemeParams) -> bytes:
    """Same header layout as ciphertexts, then s, pk0, pk1 limbs."""
    if keys.params_id != params.params_id:
        raise ParamsMismatch("key pair does not match the given parameters")
    out = bytearray()
    out += KEYPAIR_MAGIC
    out += params.n.to_bytes(4, "little")
    out += params.ell.to_bytes(1, "little")
    for q in params.moduli:
        out += q.to_bytes(8, "little")
    out += params.scale_bits.to_bytes(1, "little")
    for poly in (keys.s, keys.pk0, keys.pk1):
        for limb, q in zip(poly.limbs, params.moduli):
            dtype = "<u4" if _word_bytes(q) == 4 else "<u8"
            out += limb.astype(dtype).tobytes()
    return bytes(out)


def deserialize_keypair(data: bytes) -> tuple[KeyPair, SchemeParams]:
    from .modarith import make_context

    if len(data) < 11 or data[:5] != KEYPAIR_MAGIC:
        raise FormatError("bad key magic")
    pos = 5
    n = int.from_bytes(data[pos:pos + 4], "little"); pos += 4
    ell = data[pos]; pos += 1
    if n < 4 or n & (n - 1) or ell < 1 or len(data) < pos + 8 * ell + 1:
        raise FormatError("invalid key header")
    qs = []
    for _ in range(ell):
        qs.append(int.from_bytes(data[pos:pos + 8], "little")); pos += 8
    scale_bits = data[pos]; pos += 1
    try:
        params = SchemeParams(
            n=n, limbs=tuple(make_context(n, q) for q in qs), scale_bits=scale_bits)
    except (ValueError, InvalidParams) as exc:
        raise FormatError(f"invalid parameters in key header: {exc}") from exc
    body = sum(3 * n * _word_bytes(q) for q in qs)
    if len(data) != pos + body:
        raise FormatError("truncated key body")
    polys = []
    for _ in range(3):
        limbs = []
        for q in qs:
            wb = _word_bytes(q)
            dtype = "<u4" if wb == 4 else "<u8"
            arr = np.frombuffer(data[pos:pos + n * wb], dtype=dtype).astype(np.uint64)
            pos += n * wb
            if (arr >= q).any():
                raise FormatError("key limb coefficient out of range")
            limbs.append(arr)
        polys.append(RnsPolynomial(limbs, "ntt", params.moduli))
    keys = KeyPair(s=polys[0], pk0=polys[1], pk1=polys[2],
                   params_id=params.params_id)
    return keys, params


# ---------------------------------------------------------------------------
# bank-group schedules for the pipeline simulator


def encryption_schedule(params: SchemeParams) -> list[list[PipelineOp]]:
    """Both per-limb datapath passes of an encryption, as bank-group steps."""
    steps: list[list[PipelineOp]] = []
    # pass 1: c0 = ntt(mu)*pk0 + ntt(m) + ntt(e0)
    steps += [
        [PipelineOp("load", 0, "mu")],
        [PipelineOp("ntt", 0, "mu"), PipelineOp("load", 1, "pk0")],
        [PipelineOp("mul", None, "mu*pk0")],
        [PipelineOp("load", 0, "m")],
        [PipelineOp("ntt", 0, "m")],
        [PipelineOp("add", None, "+m")],
        [PipelineOp("load", 0, "e0")],
        [PipelineOp("ntt", 0, "e0")],
        [PipelineOp("add", None, "+e0")],
        [PipelineOp("store", 1, "c0")],
    ]
    # pass 2: c1 = ntt(mu)*pk1 + ntt(e1)
    steps += [
        [PipelineOp("load", 0, "mu")],
        [PipelineOp("ntt", 0, "mu"), PipelineOp("load", 1, "pk1")],
        [PipelineOp("mul", None, "mu*pk1")],
        [PipelineOp("load", 0, "e1")],
        [PipelineOp("ntt", 0, "e1")],
        [PipelineOp("add", None, "+e1")],
        [PipelineOp("store", 1, "c1")],
    ]
    return steps


def decryption_schedule(params: SchemeParams) -> list[list[PipelineOp]]:
    """One decryption limb: m = intt(c0 + c1*s)."""
    return [
        [PipelineOp("load", 0, "c1")],
        [PipelineOp("load", 1, "s")],
        [PipelineOp("mul", None, "c1*s")],
        [PipelineOp("load", 0, "c0")],
        [PipelineOp("add", None, "+c0")],
        [PipelineOp("intt", 1, "m")],
        [PipelineOp("store", 1, "m")],
    ]
