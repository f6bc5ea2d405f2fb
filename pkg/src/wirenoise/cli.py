"""Command-line client for the noise-analysis service.

The service normally runs in process over an ASGI transport, so no server
is needed; ``--server URL`` points the same commands at a remote
deployment instead.  Exit codes: 0 success, 1 I/O failure, 2 invalid
configuration, 3 verification failure.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import math
import sys

import httpx


def _request(path: str, payload: dict, server: str | None):
    async def go():
        if server is None:
            from .service.app import create_app

            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(transport=transport,
                                         base_url="http://wirenoise.local",
                                         timeout=None) as client:
                return await client.post(path, json=payload)
        async with httpx.AsyncClient(base_url=server, timeout=None) as client:
            return await client.post(path, json=payload)

    return asyncio.run(go())


def _round12(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}") if math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_round12(v) for v in obj]
    return obj


def _emit(text: str, out: str | None) -> int:
    if out is None:
        sys.stdout.write(text)
        return 0
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=sys.stderr)
        return 1
    return 0


def _emit_json(obj, out: str | None) -> int:
    return _emit(json.dumps(_round12(obj), sort_keys=True, indent=2) + "\n", out)


def _post_or_fail(path, payload, server):
    """Returns the response JSON, or an integer exit code on failure."""
    try:
        resp = _request(path, payload, server)
    except httpx.HTTPError as exc:
        print(f"error: service request failed: {exc}", file=sys.stderr)
        return 1
    if resp.status_code in (400, 422):
        detail = resp.json().get("detail", resp.text)
        print(f"error: invalid configuration: {detail}", file=sys.stderr)
        return 2
    if resp.status_code != 200:
        print(f"error: service returned status {resp.status_code}", file=sys.stderr)
        return 1
    return resp.json()


def _squeezing_payload(args) -> dict:
    payload = {"protocol": args.protocol}
    for key in ("db", "alpha", "g", "epsilon"):
        val = getattr(args, key, None)
        if val is not None:
            payload[key] = val
    return payload


def _cmd_sweep(args) -> int:
    payload = _squeezing_payload(args)
    payload.update(n=args.n, grid=args.grid)
    body = _post_or_fail("/sweep-rotation", payload, args.server)
    if isinstance(body, int):
        return body
    if args.format == "csv":
        lines = [",".join(body["header"])] + [",".join(row) for row in body["rows"]]
        return _emit("\n".join(lines) + "\n", args.out)
    return _emit_json(body, args.out)


def _cmd_gate_noise(args) -> int:
    if len(args.gate) == 1:
        gate = args.gate[0]
    elif len(args.gate) == 4:
        try:
            gate = [float(v) for v in args.gate]
        except ValueError:
            print("error: matrix entries must be numbers", file=sys.stderr)
            return 2
    else:
        print("error: give a gate as R(t)S(e)R(p) text or four matrix entries", file=sys.stderr)
        return 2
    payload = _squeezing_payload(args)
    payload.update(gate=gate, seed=args.seed)
    if args.n is not None:
        payload["n"] = args.n
    body = _post_or_fail("/gate-noise", payload, args.server)
    if isinstance(body, int):
        return body
    return _emit_json(body, args.out)


def _cmd_verify(args) -> int:
    payload = {"samples": args.samples, "seed": args.seed,
               "oracle_samples": args.oracle_samples}
    if args.corrupt_kernel:
        payload["corrupt_kernel"] = True
    if args.db is not None:
        payload["db"] = args.db
    if args.alpha is not None:
        payload["alpha"] = args.alpha
    body = _post_or_fail("/verify", payload, args.server)
    if isinstance(body, int):
        return body
    code = _emit_json(body, args.out)
    if code != 0:
        return code
    return 0 if body["passed"] else 3


def _cmd_oracle_check(args) -> int:
    payload = {"samples": args.samples, "seed": args.seed, "mc_samples": args.mc_samples}
    body = _post_or_fail("/oracle-check", payload, args.server)
    if isinstance(body, int):
        return body
    code = _emit_json(body, args.out)
    if code != 0:
        return code
    return 0 if body["passed"] else 3


def _cmd_remodel(args) -> int:
    payload = {"g": args.g, "epsilon": args.epsilon, "mode": args.mode}
    body = _post_or_fail("/remodel", payload, args.server)
    if isinstance(body, int):
        return body
    if args.format == "csv":
        keys = ["mode", "epsilon_odd", "epsilon_even", "input_rescale", "shear_rescale"]
        row = [body["mode"]] + [f"{body[k]:.12g}" for k in keys[1:]]
        return _emit(",".join(keys) + "\n" + ",".join(row) + "\n", args.out)
    return _emit_json(body, args.out)


def _add_common(parser, protocol=True):
    if protocol:
        parser.add_argument("--protocol", choices=["cvw", "macronode", "dictionary"],
                            required=True)
    parser.add_argument("--db", type=float, help="squeezing level in dB")
    parser.add_argument("--alpha", type=float, help="squeezing parameter")
    parser.add_argument("--g", type=float, help="edge-weight override (cvw only)")
    parser.add_argument("--epsilon", type=float, help="self-loop override (cvw only)")


def _add_output(parser, formats=("csv", "json"), default="csv"):
    parser.add_argument("--out", help="output path (stdout when omitted)")
    parser.add_argument("--format", choices=list(formats), default=default)
    parser.add_argument("--server", help="remote service URL (in-process when omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wirenoise",
                                     description="Finite-squeezing noise analysis for CV wires")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-rotation", help="scalar variance of rotation gates over an angle grid")
    _add_common(p)
    p.add_argument("--n", type=int, required=True, help="measurements per gate")
    p.add_argument("--grid", type=int, default=629)
    _add_output(p)
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("gate-noise", help="minimum scalar variance for one gate")
    p.add_argument("gate", nargs="+",
                   help="R(theta)S(eta)R(phi) text or four matrix entries")
    _add_common(p)
    p.add_argument("--n", type=int, help="measurements (default: protocol minimum)")
    p.add_argument("--seed", type=int, default=0)
    _add_output(p, formats=("json",), default="json")
    p.set_defaults(fn=_cmd_gate_noise)

    p = sub.add_parser("verify", help="randomized bound checks plus oracle cross-validation")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--db", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--oracle-samples", type=int, default=200)
    p.add_argument("--corrupt-kernel", action="store_true", help=argparse.SUPPRESS)
    _add_output(p, formats=("json",), default="json")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("oracle-check", help="simulator-versus-formula equivalence check")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mc-samples", type=int, default=0)
    _add_output(p, formats=("json",), default="json")
    p.set_defaults(fn=_cmd_oracle_check)

    p = sub.add_parser("remodel", help="weight-1 remodeling of a weight-g wire")
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--mode", choices=["alternating-selfloop", "uniform-rescaled"],
                   default="uniform-rescaled")
    _add_output(p, default="json")
    p.set_defaults(fn=_cmd_remodel)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
