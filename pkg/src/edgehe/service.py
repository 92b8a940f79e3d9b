"""FastAPI service exposing the conversion datapath and simulators.

Stateless: keys and ciphertexts travel base64-encoded in each request, so
the service can be replicated freely.  Domain errors map to 400 with the
error class name; everything else is a 500.
"""

from __future__ import annotations

import base64
import statistics
import tempfile
import time

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__, ckks
from .banksim import BankConfig, BankTrace, simulate_ntt, simulate_pipeline
from .ckks import (
    DomainError,
    FormatError,
    InvalidParams,
    ParamsMismatch,
    ScaleOverflow,
    SchemeParams,
    make_params,
)
from .keccak import KeccakSponge
from .modarith import NoPrimeFound, find_context, make_context
from .ntt import DegreeMismatch, NttPlan, bit_reverse, intt_swap4, ntt_swap4
from .pipeline import run_pipeline
from .samplers import sample_binomial, sample_ternary, sample_uniform_mod_q
from .schemas import (
    DecryptRequest,
    DecryptResponse,
    EncryptRequest,
    EncryptResponse,
    FpsEstimateRequest,
    HealthResponse,
    KeygenRequest,
    KeygenResponse,
    NttBenchRequest,
    NttBenchResponse,
    ParamsInfo,
    RunRequest,
    RunResponse,
    SampleRequest,
    SampleResponse,
    SimulateRequest,
    SimulateResponse,
    SimulateSummary,
)
from .throughput import BANDWIDTH_PRESETS, FRAME_PRESETS, FrameSpec, fps_estimate

_CLIENT_ERRORS = (
    InvalidParams, ParamsMismatch, DomainError, ScaleOverflow, FormatError,
    NoPrimeFound, DegreeMismatch, ValueError,
)

app = FastAPI(title="edgehe", version=__version__)


@app.exception_handler(Exception)
async def _error_handler(request: Request, exc: Exception):
    status = 400 if isinstance(exc, _CLIENT_ERRORS) else 500
    return JSONResponse(
        status_code=status,
        content={"error": str(exc), "error_type": type(exc).__name__},
    )


def _params_from(req) -> SchemeParams:
    if getattr(req, "moduli", None):
        limbs = tuple(make_context(req.n, int(q)) for q in req.moduli)
        return SchemeParams(n=req.n, limbs=limbs, scale_bits=req.scale_bits)
    return make_params(req.n, req.levels, limb_bits=req.limb_bits,
                       scale_bits=req.scale_bits)


def _params_info(params: SchemeParams) -> ParamsInfo:
    return ParamsInfo(
        n=params.n, ell=params.ell, log_q=params.log_q,
        scale_bits=params.scale_bits, moduli=list(params.moduli),
        params_id=params.params_id,
    )


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/keygen", response_model=KeygenResponse)
def keygen(req: KeygenRequest) -> KeygenResponse:
    params = _params_from(req)
    keys = ckks.keygen(params, bytes.fromhex(req.seed_hex))
    blob = ckks.serialize_keypair(keys, params)
    return KeygenResponse(
        params=_params_info(params),
        keypair_b64=base64.b64encode(blob).decode(),
    )


@app.post("/encrypt", response_model=EncryptResponse)
def encrypt(req: EncryptRequest) -> EncryptResponse:
    keys, params = ckks.deserialize_keypair(base64.b64decode(req.keypair_b64))
    m = ckks.encode_fixed(np.asarray(req.message, dtype=np.float64), params)
    dp = ckks.EdgeDatapath()
    ct = ckks.encrypt(m, keys, params, bytes.fromhex(req.seed_hex),
                      datapath=dp, _zero_noise=req.zero_noise)
    blob = ckks.serialize_ciphertext(ct, params)
    return EncryptResponse(
        ciphertext_b64=base64.b64encode(blob).decode(),
        ct_bytes=len(blob),
        datapath_invocations=dp.invocations,
    )


@app.post("/decrypt", response_model=DecryptResponse)
def decrypt(req: DecryptRequest) -> DecryptResponse:
    keys, params = ckks.deserialize_keypair(base64.b64decode(req.keypair_b64))
    ct, ct_params = ckks.deserialize_ciphertext(base64.b64decode(req.ciphertext_b64))
    if ct_params.params_id != params.params_id:
        raise ParamsMismatch("ciphertext and key parameters disagree")
    pt = ckks.decrypt(ct, keys.s, params, all_limbs=req.all_limbs)
    values = ckks.decode_fixed(pt, params, count=req.count)
    return DecryptResponse(values=[float(x) for x in values])


@app.post("/sample", response_model=SampleResponse)
def sample(req: SampleRequest) -> SampleResponse:
    stream = KeccakSponge(bytes.fromhex(req.seed_hex))
    if req.kind == "binomial":
        poly = sample_binomial(stream, req.n)
    elif req.kind == "ternary":
        poly = sample_ternary(stream, req.n)
    else:
        ctx = find_context(req.n, req.q_bits)
        poly = sample_uniform_mod_q(stream, req.n, ctx)
    coeffs = poly.coeffs
    return SampleResponse(
        kind=req.kind, n=req.n, coeffs=[int(c) for c in coeffs],
        mean=float(statistics.fmean(coeffs)),
        variance=float(statistics.pvariance(coeffs)),
    )


@app.post("/ntt-bench", response_model=NttBenchResponse)
def ntt_bench(req: NttBenchRequest) -> NttBenchResponse:
    ctx = find_context(req.n, req.q_bits)
    plan = NttPlan(req.n, ctx, req.bfus)
    rng = np.random.default_rng(0)
    ok = True
    elapsed = 0.0
    for _ in range(req.trials):
        a = [int(x) for x in rng.integers(0, ctx.q, req.n)]
        t0 = time.perf_counter()
        if req.physical:
            back = bit_reverse(intt_swap4(ntt_swap4(bit_reverse(a), plan), plan))
        else:
            from .ntt import intt_fast, ntt_fast

            back = [int(x) for x in
                    intt_fast(ntt_fast(bit_reverse(a), plan), plan)]
            back = bit_reverse(back)
        elapsed += time.perf_counter() - t0
        ok = ok and back == a
    cfg = BankConfig(n=req.n, b=req.bfus)
    trace = simulate_ntt(plan, cfg)
    return NttBenchResponse(
        n=req.n, bfus=req.bfus, q=ctx.q, roundtrip_ok=ok,
        butterflies_per_transform=(req.n // 2) * plan.logn,
        simulated_cycles=trace.total_cycles,
        wall_seconds_per_transform=elapsed / (2 * req.trials),
    )


def _summary(trace: BankTrace) -> SimulateSummary:
    return SimulateSummary(
        total_cycles=trace.total_cycles,
        conflicts=trace.conflict_count,
        stalls=trace.stall_count,
        peak_wb_occupancy=trace.peak_wb_occupancy,
        peak_resident_polys=trace.peak_resident_polys,
    )


@app.post("/simulate", response_model=SimulateResponse)
def simulate(req: SimulateRequest) -> SimulateResponse:
    cfg = BankConfig(n=req.n, b=req.bfus, port_model=req.port_model)
    if req.target == "ntt":
        ctx = find_context(req.n, 30)
        plan = NttPlan(req.n, ctx, req.bfus)
        trace = simulate_ntt(plan, cfg, reorder=req.reorder,
                             store_trace=req.include_trace)
    else:
        params = make_params(req.n, req.levels)
        sched = (ckks.encryption_schedule(params) if req.target == "encryption"
                 else ckks.decryption_schedule(params))
        trace = simulate_pipeline(sched, cfg, store_trace=req.include_trace)
    rows = None
    if req.include_trace and trace.events is not None:
        rows = [[c, b, op, a, src] for (c, b, op, a, src) in trace.events]
    return SimulateResponse(summary=_summary(trace), trace=rows)


@app.post("/fps-estimate")
def fps(req: FpsEstimateRequest) -> dict:
    if req.frame == "custom":
        if req.width is None or req.height is None:
            raise ValueError("custom frames need width and height")
        frame = FrameSpec(req.width, req.height, req.bits_per_pixel)
    else:
        frame = FRAME_PRESETS[req.frame]()
    params = make_params(req.n, req.levels, limb_bits=req.limb_bits)
    bw = req.bandwidth_bps
    if bw is None:
        bw = BANDWIDTH_PRESETS[req.bandwidth_preset or "mid_band_5g_max"]
    report = fps_estimate(frame, params, clock_hz=req.clock_hz,
                          bandwidth_bps=bw, bfus=req.bfus)
    return report.to_dict()


@app.post("/run", response_model=RunResponse)
def run(req: RunRequest) -> RunResponse:
    workdir = req.workdir or tempfile.mkdtemp(prefix="edgehe-run-")
    result = run_pipeline(req.config, workdir)
    return RunResponse(exit_code=result.exit_code, report=result.report,
                       artifacts=result.artifacts)
