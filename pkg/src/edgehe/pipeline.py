"""End-to-end roundtrip orchestration: keygen, encode, encrypt, decrypt, decode.

``run_pipeline`` executes the whole conversion path from a JSON-style
config, writes the ciphertext, decoded output, and a report to disk, and
classifies failures into stable exit codes so scripted callers can branch
on the error class.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import ckks
from .ckks import (
    DomainError,
    FormatError,
    InvalidParams,
    ParamsMismatch,
    ScaleOverflow,
    SchemeParams,
    make_params,
)
from .modarith import NoPrimeFound, make_context

REPORT_VERSION = 1

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID_PARAMS = 2
EXIT_FORMAT = 3
EXIT_SCALE_OVERFLOW = 4
EXIT_PARAMS_MISMATCH = 5
EXIT_NOISE_EXCEEDED = 6

_EXIT_BY_ERROR = (
    (InvalidParams, EXIT_INVALID_PARAMS),
    (NoPrimeFound, EXIT_INVALID_PARAMS),
    (FormatError, EXIT_FORMAT),
    (ScaleOverflow, EXIT_SCALE_OVERFLOW),
    (ParamsMismatch, EXIT_PARAMS_MISMATCH),
    (DomainError, EXIT_PARAMS_MISMATCH),
)


class StageFailure(Exception):
    """Wraps a stage error with the stage tag and its exit code."""

    def __init__(self, stage: str, exc: Exception):
        self.stage = stage
        self.cause = exc
        self.exit_code = EXIT_ERROR
        for cls, code in _EXIT_BY_ERROR:
            if isinstance(exc, cls):
                self.exit_code = code
                break
        super().__init__(f"[{stage}] {type(exc).__name__}: {exc}")


@dataclass
class PipelineResult:
    exit_code: int
    report: dict
    artifacts: dict = field(default_factory=dict)


DEFAULT_CONFIG = {
    "n": 4096,
    "levels": None,           # preset for n when omitted
    "limb_bits": 30,
    "scale_bits": 20,
    "seed": "00" * 16,        # hex
    "message": None,          # list of floats; random when omitted
    "message_file": None,     # JSON file with a list of floats
    "moduli": None,           # explicit q list overrides limb search
    "network_hop": True,      # serialize + reparse between encrypt and decrypt
    "all_limbs": False,
}


def _build_params(cfg: dict) -> SchemeParams:
    if cfg.get("moduli"):
        limbs = tuple(make_context(cfg["n"], int(q)) for q in cfg["moduli"])
        return SchemeParams(n=cfg["n"], limbs=limbs, scale_bits=cfg["scale_bits"])
    return make_params(cfg["n"], cfg.get("levels"),
                       limb_bits=cfg.get("limb_bits", 30),
                       scale_bits=cfg.get("scale_bits", 20))


def _stage(name: str):
    def wrap(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Exception as exc:
            raise StageFailure(name, exc) from exc
    return wrap


def run_pipeline(config: dict | None = None, workdir: str | Path = ".") -> PipelineResult:
    """Full roundtrip; writes ct.bin, decoded.json, and report.json.

    Exit code 0 iff the roundtrip error stays within the documented noise
    bound; otherwise a per-error-class code (see EXIT_* constants).
    """
    cfg = dict(DEFAULT_CONFIG)
    cfg.update(config or {})
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    report: dict = {"report_version": REPORT_VERSION, "stages": {}}
    artifacts: dict = {}
    t_all = time.perf_counter()

    def timed(name, fn, *args, **kwargs):
        t0 = time.perf_counter()
        out = _stage(name)(fn, *args, **kwargs)
        report["stages"][name] = round(time.perf_counter() - t0, 6)
        return out

    try:
        params = timed("params", _build_params, cfg)
        seed = bytes.fromhex(cfg["seed"])
        report["params"] = {
            "n": params.n, "ell": params.ell, "log_q": params.log_q,
            "scale_bits": params.scale_bits, "moduli": list(params.moduli),
        }

        if cfg.get("message_file"):
            values = np.asarray(
                json.loads(Path(cfg["message_file"]).read_text()), dtype=np.float64)
        elif cfg.get("message") is not None:
            values = np.asarray(cfg["message"], dtype=np.float64)
        else:
            rng = np.random.default_rng(int.from_bytes(seed, "little") & 0xFFFFFFFF)
            values = rng.uniform(-1.0, 1.0, params.n)

        keys = timed("keygen", ckks.keygen, params, seed)
        m = timed("encode", ckks.encode_fixed, values, params)
        ct = timed("encrypt", ckks.encrypt, m, keys, params, seed + b"/enc")

        blob = ckks.serialize_ciphertext(ct, params)
        ct_path = workdir / "ct.bin"
        ct_path.write_bytes(blob)
        artifacts["ciphertext"] = str(ct_path)
        report["ct_bytes"] = len(blob)

        if cfg["network_hop"]:
            ct, params_rx = timed("network_hop", ckks.deserialize_ciphertext, blob)

        pt = timed("decrypt", ckks.decrypt, ct, keys.s, params,
                   all_limbs=cfg["all_limbs"])
        decoded = timed("decode", ckks.decode_fixed, pt, params, count=len(values))

        bound = (ckks.noise_bound(params) + 1) / (1 << params.scale_bits)
        err = float(np.abs(decoded - values).max()) if len(values) else 0.0
        report["roundtrip_error"] = err
        report["noise_bound"] = bound
        report["within_bound"] = err <= bound

        out_path = workdir / "decoded.json"
        out_path.write_text(json.dumps([float(x) for x in decoded]))
        artifacts["decoded"] = str(out_path)

        exit_code = EXIT_OK if err <= bound else EXIT_NOISE_EXCEEDED
        if exit_code != EXIT_OK:
            report["error"] = "roundtrip error exceeds noise bound"
    except StageFailure as fail:
        report["error"] = str(fail)
        report["failed_stage"] = fail.stage
        exit_code = fail.exit_code

    report["elapsed"] = round(time.perf_counter() - t_all, 6)
    report["exit_code"] = exit_code
    report_path = workdir / "report.json"
    report_path.write_text(json.dumps(report, indent=2))
    artifacts["report"] = str(report_path)
    return PipelineResult(exit_code=exit_code, report=report, artifacts=artifacts)
