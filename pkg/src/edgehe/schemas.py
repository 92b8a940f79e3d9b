"""Request/response models for the HTTP service.

Binary payloads (keys, ciphertexts) travel as base64 strings; everything
else is plain JSON.  The CLI talks to these models exclusively, whether it
runs the service in process or against a remote URL.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class ParamsRequest(BaseModel):
    n: int = 4096
    levels: int | None = None
    limb_bits: int = 30
    scale_bits: int = 20
    moduli: list[int] | None = None


class ParamsInfo(BaseModel):
    n: int
    ell: int
    log_q: int
    scale_bits: int
    moduli: list[int]
    params_id: str


class KeygenRequest(ParamsRequest):
    seed_hex: str = Field(pattern=r"^([0-9a-fA-F]{2})+$")


class KeygenResponse(BaseModel):
    params: ParamsInfo
    keypair_b64: str


class EncryptRequest(BaseModel):
    keypair_b64: str
    message: list[float]
    seed_hex: str = Field(pattern=r"^([0-9a-fA-F]{2})+$")
    zero_noise: bool = False


class EncryptResponse(BaseModel):
    ciphertext_b64: str
    ct_bytes: int
    datapath_invocations: int


class DecryptRequest(BaseModel):
    keypair_b64: str
    ciphertext_b64: str
    all_limbs: bool = False
    count: int | None = None


class DecryptResponse(BaseModel):
    values: list[float]


class SampleRequest(BaseModel):
    kind: str = Field(pattern=r"^(binomial|ternary|uniform)$")
    n: int = 1024
    seed_hex: str = Field(pattern=r"^([0-9a-fA-F]{2})+$")
    q_bits: int = 30          # uniform sampling modulus width


class SampleResponse(BaseModel):
    kind: str
    n: int
    coeffs: list[int]
    mean: float
    variance: float


class NttBenchRequest(BaseModel):
    n: int = 256
    bfus: int = 1
    q_bits: int = 30
    trials: int = 3
    physical: bool = True


class NttBenchResponse(BaseModel):
    n: int
    bfus: int
    q: int
    roundtrip_ok: bool
    butterflies_per_transform: int
    simulated_cycles: int
    wall_seconds_per_transform: float


class SimulateRequest(BaseModel):
    target: str = Field(default="ntt", pattern=r"^(ntt|encryption|decryption)$")
    n: int = 256
    bfus: int = 1
    reorder: bool = True
    port_model: str = Field(default="1rw", pattern=r"^(1rw|1r1w|2r2w)$")
    include_trace: bool = False
    levels: int | None = None       # for pipeline targets


class SimulateSummary(BaseModel):
    total_cycles: int
    conflicts: int
    stalls: int
    peak_wb_occupancy: int
    peak_resident_polys: int


class SimulateResponse(BaseModel):
    summary: SimulateSummary
    trace: list[list] | None = None   # rows of [cycle, bank, op, addr, source]


class FpsEstimateRequest(BaseModel):
    frame: str = Field(default="qqvga", pattern=r"^(qqvga|qvga|custom)$")
    width: int | None = None
    height: int | None = None
    bits_per_pixel: int = 8
    n: int = 4096
    levels: int | None = None
    limb_bits: int = 30
    clock_hz: float = 1e9
    bandwidth_bps: float | None = None
    bandwidth_preset: str | None = Field(
        default=None, pattern=r"^(mid_band_5g_max|mid_band_5g_min)$")
    bfus: int = 1


class RunRequest(BaseModel):
    config: dict = Field(default_factory=dict)
    workdir: str | None = None


class RunResponse(BaseModel):
    exit_code: int
    report: dict
    artifacts: dict


class HealthResponse(BaseModel):
    status: str
    version: str


class ErrorResponse(BaseModel):
    error: str
    error_type: str
