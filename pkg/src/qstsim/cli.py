"""Command line client for the simulation service.

The CLI is a thin HTTP client: every subcommand builds a request, sends it
to the service and renders the response.  By default the service app runs
in-process (no server needed); pass --server to target a running instance.
File emission happens client side from the returned series, so the service
itself never touches the filesystem.

Environment: QSTSIM_SEED is accepted and echoed into the output manifest for
forward compatibility; the deterministic backends do not consume it.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import math
import os
import sys
from pathlib import Path

import httpx
import numpy as np

from .dynamics import TimeSeries
from .errors import ConfigError
from .hamiltonians import EFFECTIVE_INDEX
from .scenario import _P_COLUMNS, config_from_dict, emit

DEFAULT_TOL = 1e-6


class ClientError(Exception):
    pass


class ServiceClient:
    """Minimal JSON-over-HTTP client; in-process ASGI transport by default."""

    def __init__(self, server: str | None = None):
        self.server = server

    def request(self, method: str, path: str, payload: dict | None = None) -> dict:
        if self.server:
            with httpx.Client(base_url=self.server, timeout=600.0) as client:
                response = client.request(method, path, json=payload)
        else:
            response = asyncio.run(self._in_process(method, path, payload))
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise ClientError(f"{path} failed ({response.status_code}): {detail}")
        return response.json()

    async def _in_process(self, method: str, path: str, payload: dict | None):
        from .service import app  # deferred so --server mode avoids the import

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://qstsim.internal", timeout=600.0
        ) as client:
            return await client.request(method, path, json=payload)


def _load_config_dict(path: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ClientError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ClientError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ClientError("config file must hold a JSON object")
    return raw


def _apply_overrides(cfg: dict, args: argparse.Namespace) -> dict:
    cfg = dict(cfg)
    if getattr(args, "backend", None):
        cfg["backend"] = args.backend
    if getattr(args, "out", None):
        cfg["output"] = args.out
    if getattr(args, "format", None):
        cfg["format"] = args.format
    if getattr(args, "fixed_step", None) is not None:
        cfg["fixed_step"] = args.fixed_step
    return cfg


def _validate_locally(cfg: dict):
    try:
        return config_from_dict(cfg)
    except ConfigError as exc:
        raise ClientError(f"invalid configuration: {exc}") from None


def _wire_config(cfg: dict) -> dict:
    return {k: v for k, v in cfg.items() if k != "output"}


def _series_from_wire(entry: dict) -> TimeSeries:
    times = np.array(entry["times"], dtype=float)
    pops = np.zeros((len(times), 4))
    for name, key in _P_COLUMNS:
        pops[:, EFFECTIVE_INDEX[key]] = entry["populations"][name]
    fid = None if entry.get("fidelity") is None else np.array(entry["fidelity"], dtype=float)
    renorm = (
        None
        if entry.get("fidelity_renormalized") is None
        else np.array(entry["fidelity_renormalized"], dtype=float)
    )
    return TimeSeries(
        times,
        pops,
        backend=entry["backend"],
        fidelity=fid,
        fidelity_renormalized=renorm,
        basis_labels=("00", "01", "10", "11"),
    )


def _write_outputs(cfg: dict, report: dict, series: list[dict], out_prefix: str) -> list[str]:
    config = _validate_locally(cfg)
    fmt = config.format
    theta_index = {f"{t:.12g}": i for i, t in enumerate(config.theta_list)}
    written = []
    for entry in series:
        key = f"{entry['theta']:.12g}"
        idx = theta_index.get(key, 0)
        path = f"{out_prefix}.{entry['backend']}.theta{idx}.{fmt}"
        emit(_series_from_wire(entry), fmt, path, config=config, theta=entry["theta"])
        written.append(path)
    manifest = {
        "config": config.to_dict(),
        "report": report,
        "files": written,
        "seed": os.environ.get("QSTSIM_SEED"),
    }
    manifest_path = f"{out_prefix}.manifest.json"
    Path(manifest_path).write_text(json.dumps(manifest, indent=2))
    written.append(manifest_path)
    return written


def _print_report(report: dict):
    print(f"predicted transfer time: {report['t_star_formula']:.6g}")
    for rec in report["per_theta"]:
        theta = rec["theta"]
        print(f"theta = {theta:.6g} ({math.degrees(theta):.4g} deg)")
        for res in rec["results"]:
            fid = res.get("fidelity_at_transfer")
            fid_text = f"  F(t*) = {fid:.6f}" if fid is not None else ""
            print(
                f"  {res['backend']:>12}: transfer time {res['transfer_time']:.6g}{fid_text}"
            )
        for pair, delta in rec.get("deltas", {}).items():
            print(f"  {pair}: max population delta {delta:.3e}")


def _cmd_simulate(args) -> int:
    cfg = _apply_overrides(_load_config_dict(args.config), args)
    _validate_locally(cfg)
    client = ServiceClient(args.server)
    out_prefix = cfg.get("output")
    payload = {"config": _wire_config(cfg), "include_series": bool(out_prefix)}
    data = client.request("POST", "/simulate", payload)
    _print_report(data["report"])
    if out_prefix:
        for path in _write_outputs(cfg, data["report"], data["series"], out_prefix):
            print(f"wrote {path}")
    return 0


def _cmd_compare(args) -> int:
    cfg = _apply_overrides(_load_config_dict(args.config), args)
    cfg["backend"] = "all"
    _validate_locally(cfg)
    client = ServiceClient(args.server)
    out_prefix = cfg.get("output")
    payload = {
        "config": _wire_config(cfg),
        "tolerance": args.tol,
        "include_series": bool(out_prefix),
    }
    data = client.request("POST", "/compare", payload)
    _print_report(data["report"])
    if out_prefix:
        for path in _write_outputs(cfg, data["report"], data["series"], out_prefix):
            print(f"wrote {path}")
    max_delta = data["report"]["max_delta"]
    if data["within_tolerance"]:
        print(f"backends agree: max delta {max_delta:.3e} <= tol {args.tol:.3e}")
        return 0
    print(f"backend disagreement: max delta {max_delta:.3e} > tol {args.tol:.3e}")
    return 1


def _cmd_sweep(args) -> int:
    cfg = _apply_overrides(_load_config_dict(args.config), args)
    _validate_locally(cfg)
    client = ServiceClient(args.server)
    payload = {
        "config": _wire_config(cfg),
        "axis": args.axis,
        "start": args.start,
        "stop": args.stop,
        "steps": args.steps,
    }
    data = client.request("POST", "/sweep", payload)
    header = f"{args.axis},transfer_time,fidelity_at_transfer,resonant"
    lines = [header]
    for row in data["rows"]:
        lines.append(
            f"{row['value']:.12g},{row['transfer_time']:.12g},"
            f"{row['fidelity_at_transfer']:.12g},{int(row['resonant'])}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        path = Path(f"{args.out}.sweep.{args.axis}.csv")
        path.write_text(text)
        print(f"wrote {path}")
    else:
        print(text, end="")
    return 0


def _cmd_calibrate(args) -> int:
    cfg = _apply_overrides(_load_config_dict(args.config), args)
    _validate_locally(cfg)
    client = ServiceClient(args.server)
    payload = {
        "config": _wire_config(cfg),
        "target_fidelity": args.target_fidelity,
        "target_theta": args.target_theta,
    }
    data = client.request("POST", "/calibrate", payload)
    print(f"recovered k1 = k2 = {data['k1']:.6g}")
    print(
        f"target F = {data['target_fidelity']} at theta = {data['target_theta']:.6g}: "
        f"achieved {data['achieved_fidelity']:.6f}"
        + (" (clamped to zero decay)" if data["clamped"] else "")
    )
    print(f"transfer time: {data['transfer_time']:.6g}")
    for theta, fid in data["fidelities"].items():
        print(f"  F(theta={theta}) = {fid:.6f}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("qstsim.service:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qstsim",
        description="State transfer simulation client (runs the service in-process unless --server is given)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_backend=True):
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--server", default=None, help="service base URL (default: in-process)")
        if with_backend:
            p.add_argument("--backend", default=None, help="override backend")
        p.add_argument("--out", default=None, help="output path prefix")
        p.add_argument("--format", default=None, choices=["csv", "json"], help="output format")
        p.add_argument("--fixed-step", dest="fixed_step", type=int, default=None,
                       help="substeps per sample interval for reproducible output")

    p_sim = sub.add_parser("simulate", help="run a scenario and emit time series")
    add_common(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_cmp = sub.add_parser("compare", help="run all backends and gate on agreement")
    add_common(p_cmp, with_backend=False)
    p_cmp.add_argument("--tol", type=float, default=DEFAULT_TOL, help="max allowed population delta")
    p_cmp.set_defaults(func=_cmd_compare)

    p_swp = sub.add_parser("sweep", help="scan one model parameter on the closed-form path")
    add_common(p_swp, with_backend=False)
    p_swp.add_argument("--axis", required=True, help="model parameter name")
    p_swp.add_argument("--start", type=float, required=True)
    p_swp.add_argument("--stop", type=float, required=True)
    p_swp.add_argument("--steps", type=int, required=True)
    p_swp.set_defaults(func=_cmd_sweep)

    p_cal = sub.add_parser("calibrate", help="recover dephasing constants for a target fidelity")
    add_common(p_cal, with_backend=False)
    p_cal.add_argument("--target-fidelity", type=float, default=0.990)
    p_cal.add_argument("--target-theta", default="pi/4")
    p_cal.set_defaults(func=_cmd_calibrate)

    p_srv = sub.add_parser("serve", help="run the HTTP service")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ClientError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
