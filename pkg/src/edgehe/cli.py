"""Command-line client for the conversion service.

Every command is a thin wrapper over the HTTP API: by default the service
runs in process (no socket), and ``--server URL`` targets a running
instance instead.  The RISE_SEED environment variable overrides any seed
option for reproducible CI runs.
"""

from __future__ import annotations

import base64
import csv
import json
import os
import sys
from pathlib import Path

import click

DEFAULT_SEED = "00" * 16


class _Client:
    """In-process or remote JSON transport."""

    def __init__(self, server: str | None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app, raise_server_exceptions=False)

    def post(self, path: str, payload: dict) -> dict:
        resp = self._client.post(path, json=payload)
        body = resp.json()
        if resp.status_code != 200:
            msg = body.get("error", resp.text) if isinstance(body, dict) else resp.text
            etype = body.get("error_type", "Error") if isinstance(body, dict) else "Error"
            raise click.ClickException(f"{etype}: {msg}")
        return body

    def get(self, path: str) -> dict:
        resp = self._client.get(path)
        if resp.status_code != 200:
            raise click.ClickException(resp.text)
        return resp.json()


def _seed_hex(seed: str) -> str:
    return os.environ.get("RISE_SEED", seed)


def _emit(data: dict) -> None:
    click.echo(json.dumps(data, indent=2))


@click.group()
@click.option("--server", default=None, envvar="EDGEHE_SERVER",
              help="Service URL; defaults to running in process.")
@click.pass_context
def main(ctx, server):
    """Edge-side CKKS conversion datapath tools."""
    ctx.obj = _Client(server)


@main.command()
@click.option("--n", default=4096, show_default=True)
@click.option("--levels", default=None, type=int)
@click.option("--limb-bits", default=30, show_default=True)
@click.option("--scale-bits", default=20, show_default=True)
@click.option("--seed", default=DEFAULT_SEED, help="Hex seed.")
@click.option("--out", type=click.Path(), default="keys.bin", show_default=True)
@click.pass_obj
def keygen(client, n, levels, limb_bits, scale_bits, seed, out):
    """Generate a key pair and write it to a binary file."""
    body = client.post("/keygen", {
        "n": n, "levels": levels, "limb_bits": limb_bits,
        "scale_bits": scale_bits, "seed_hex": _seed_hex(seed),
    })
    Path(out).write_bytes(base64.b64decode(body["keypair_b64"]))
    _emit({"params": body["params"], "key_file": out})


@main.command()
@click.option("--key", type=click.Path(exists=True), required=True)
@click.option("--in", "in_file", type=click.Path(exists=True), required=True,
              help="JSON file with a list of real values.")
@click.option("--out", type=click.Path(), default="ct.bin", show_default=True)
@click.option("--seed", default=DEFAULT_SEED, help="Hex seed.")
@click.pass_obj
def encrypt(client, key, in_file, out, seed):
    """Encrypt a message file into a ciphertext binary."""
    message = json.loads(Path(in_file).read_text())
    body = client.post("/encrypt", {
        "keypair_b64": base64.b64encode(Path(key).read_bytes()).decode(),
        "message": message,
        "seed_hex": _seed_hex(seed),
    })
    Path(out).write_bytes(base64.b64decode(body["ciphertext_b64"]))
    _emit({"ciphertext": out, "ct_bytes": body["ct_bytes"],
           "datapath_invocations": body["datapath_invocations"]})


@main.command()
@click.option("--key", type=click.Path(exists=True), required=True)
@click.option("--in", "in_file", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), default=None,
              help="Write decoded values here instead of stdout.")
@click.option("--count", default=None, type=int, help="Values to keep.")
@click.option("--all-limbs", is_flag=True)
@click.pass_obj
def decrypt(client, key, in_file, out, count, all_limbs):
    """Decrypt a ciphertext binary and decode the values."""
    body = client.post("/decrypt", {
        "keypair_b64": base64.b64encode(Path(key).read_bytes()).decode(),
        "ciphertext_b64": base64.b64encode(Path(in_file).read_bytes()).decode(),
        "all_limbs": all_limbs,
        "count": count,
    })
    if out:
        Path(out).write_text(json.dumps(body["values"]))
        _emit({"decoded": out, "count": len(body["values"])})
    else:
        _emit({"values": body["values"]})


@main.command()
@click.option("--kind", type=click.Choice(["binomial", "ternary", "uniform"]),
              default="binomial", show_default=True)
@click.option("--n", default=1024, show_default=True)
@click.option("--seed", default=DEFAULT_SEED, help="Hex seed.")
@click.option("--q-bits", default=30, show_default=True)
@click.option("--out", type=click.Path(), default=None,
              help="Write raw coefficients as JSON.")
@click.pass_obj
def sample(client, kind, n, seed, q_bits, out):
    """Draw one polynomial from a sampler and report statistics."""
    body = client.post("/sample", {
        "kind": kind, "n": n, "seed_hex": _seed_hex(seed), "q_bits": q_bits,
    })
    if out:
        Path(out).write_text(json.dumps(body["coeffs"]))
    _emit({"kind": body["kind"], "n": body["n"], "mean": body["mean"],
           "variance": body["variance"],
           **({"coeff_file": out} if out else {})})


@main.command("ntt-bench")
@click.option("--n", default=256, show_default=True)
@click.option("--bfus", default=1, show_default=True)
@click.option("--q-bits", default=30, show_default=True)
@click.option("--trials", default=3, show_default=True)
@click.option("--physical/--fast", default=True,
              help="Physical memory simulation vs vectorized transform.")
@click.pass_obj
def ntt_bench(client, n, bfus, q_bits, trials, physical):
    """Transform roundtrip check with wall time and simulated cycles."""
    _emit(client.post("/ntt-bench", {
        "n": n, "bfus": bfus, "q_bits": q_bits,
        "trials": trials, "physical": physical,
    }))


@main.command()
@click.option("--target", type=click.Choice(["ntt", "encryption", "decryption"]),
              default="ntt", show_default=True)
@click.option("--n", default=256, show_default=True)
@click.option("--bfus", default=1, show_default=True)
@click.option("--reorder/--no-reorder", default=True)
@click.option("--port-model", type=click.Choice(["1rw", "1r1w", "2r2w"]),
              default="1rw", show_default=True)
@click.option("--levels", default=None, type=int)
@click.option("--trace-out", type=click.Path(), default=None,
              help="Write the event trace as CSV.")
@click.pass_obj
def simulate(client, target, n, bfus, reorder, port_model, levels, trace_out):
    """Replay an address stream or pipeline schedule on the bank model."""
    body = client.post("/simulate", {
        "target": target, "n": n, "bfus": bfus, "reorder": reorder,
        "port_model": port_model, "levels": levels,
        "include_trace": trace_out is not None,
    })
    if trace_out:
        with open(trace_out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["cycle", "bank", "op", "addr", "source"])
            writer.writerows(body["trace"] or [])
    _emit({"summary": body["summary"],
           **({"trace_file": trace_out} if trace_out else {})})


@main.command("fps-estimate")
@click.option("--frame", type=click.Choice(["qqvga", "qvga", "custom"]),
              default="qqvga", show_default=True)
@click.option("--width", default=None, type=int)
@click.option("--height", default=None, type=int)
@click.option("--bits-per-pixel", default=8, show_default=True)
@click.option("--n", default=4096, show_default=True)
@click.option("--levels", default=None, type=int)
@click.option("--limb-bits", default=30, show_default=True)
@click.option("--clock-hz", default=1e9, show_default=True)
@click.option("--bandwidth-bps", default=None, type=float)
@click.option("--bandwidth-preset",
              type=click.Choice(["mid_band_5g_max", "mid_band_5g_min"]),
              default=None)
@click.option("--bfus", default=1, show_default=True)
@click.pass_obj
def fps_estimate(client, frame, width, height, bits_per_pixel, n, levels,
                 limb_bits, clock_hz, bandwidth_bps, bandwidth_preset, bfus):
    """Video-frame ciphertext count, sizes, and FPS ceilings."""
    _emit(client.post("/fps-estimate", {
        "frame": frame, "width": width, "height": height,
        "bits_per_pixel": bits_per_pixel, "n": n, "levels": levels,
        "limb_bits": limb_bits, "clock_hz": clock_hz,
        "bandwidth_bps": bandwidth_bps, "bandwidth_preset": bandwidth_preset,
        "bfus": bfus,
    }))


@main.command()
@click.option("--config", type=click.Path(exists=True), default=None,
              help="JSON config file; defaults applied for missing keys.")
@click.option("--workdir", type=click.Path(), default=None)
@click.option("--n", default=None, type=int, help="Override config degree.")
@click.option("--seed", default=None, help="Override config seed (hex).")
@click.pass_obj
def run(client, config, workdir, n, seed):
    """Full keygen, encode, encrypt, decrypt, decode roundtrip."""
    cfg = json.loads(Path(config).read_text()) if config else {}
    if n is not None:
        cfg["n"] = n
    if seed is not None:
        cfg["seed"] = seed
    if "RISE_SEED" in os.environ:
        cfg["seed"] = os.environ["RISE_SEED"]
    body = client.post("/run", {"config": cfg, "workdir": workdir})
    _emit(body)
    sys.exit(body["exit_code"])


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
