"""Command-line client for the rhcube service.

Every subcommand builds one request, sends it through the HTTP API (by
default against the in-process service application, or against a running
server with ``--server``), prints the JSON response with sorted keys to
standard output and maps the outcome to an exit code:

    0  success / decided
    1  axiom-validation failure
    2  malformed input
    3  inconclusive randomized result

The default tolerance can be overridden with the RHCUBE_TOL environment
variable; an explicit ``--tol`` flag wins over it.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys

import httpx

from .linalg import DEFAULT_RANK_TOL, DEFAULT_TOL

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_MALFORMED = 2
EXIT_INCONCLUSIVE = 3

TOL_ENV_VAR = "RHCUBE_TOL"


def _default_tol(fallback: float) -> float:
    value = os.environ.get(TOL_ENV_VAR)
    if value is None:
        return fallback
    try:
        return float(value)
    except ValueError:
        return fallback


def _request(path: str, payload: dict, server: str | None):
    if server:
        with httpx.Client(base_url=server, timeout=300.0) as client:
            resp = client.post(path, json=payload)
        return resp.status_code, resp.json()

    from .service import app

    async def go():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport,
                                     base_url="http://rhcube.internal") as client:
            return await client.post(path, json=payload)

    resp = asyncio.run(go())
    return resp.status_code, resp.json()


def _emit(payload) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True, allow_nan=False) + "\n")


class _CliError(Exception):
    def __init__(self, code: int, payload: dict):
        super().__init__(str(payload))
        self.code = code
        self.payload = payload


def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise _CliError(EXIT_MALFORMED, {
            "error": {"code": "malformed", "message": f"no such file: {path}"}
        }) from None
    except json.JSONDecodeError as exc:
        raise _CliError(EXIT_MALFORMED, {
            "error": {"code": "malformed", "message": f"{path}: {exc}"}
        }) from None


def _error_exit(status: int, body) -> int:
    detail = body.get("detail") if isinstance(body, dict) else None
    if isinstance(detail, dict) and detail.get("code") == "invalid-object":
        _emit({"error": detail})
        return EXIT_INVALID
    if isinstance(detail, dict):
        _emit({"error": detail})
        return EXIT_MALFORMED
    _emit({"error": {"code": "malformed", "message": str(body), "http_status": status}})
    return EXIT_MALFORMED


def _run(path: str, payload: dict, server, decide) -> int:
    status, body = _request(path, payload, server)
    if status != 200:
        return _error_exit(status, body)
    _emit(body)
    return decide(body)


def _decide_ok(_body) -> int:
    return EXIT_OK


def _decide_validate(body) -> int:
    return EXIT_OK if body.get("ok") else EXIT_INVALID


def _decide_status(body) -> int:
    return EXIT_OK if body.get("status") in ("ok", "decided") else EXIT_INCONCLUSIVE


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="rhcube",
        description="Validate, transform and decompose polydisk hypercube objects.",
    )
    parser.add_argument("--server", default=None,
                        help="base URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_tol(p, default=DEFAULT_TOL):
        p.add_argument("--tol", type=float, default=_default_tol(default))

    p = sub.add_parser("validate", help="check the axioms of one or more objects")
    p.add_argument("files", nargs="+")
    add_tol(p)

    p = sub.add_parser("good-eig", help="residual eigenvalue integer-gap scan")
    p.add_argument("file")
    add_tol(p)

    p = sub.add_parser("rh", help="monodromy-side transform of a pre-d-module")
    p.add_argument("file")
    add_tol(p)

    p = sub.add_parser("inv-rh", help="connection-side transform of a verdier object")
    p.add_argument("file")
    p.add_argument("--sigma", type=float, default=0.0,
                   help="base of the residue strip, must lie in (-1, 0]")
    add_tol(p)

    p = sub.add_parser("jh", help="Jordan-Holder factors with multiplicities")
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=0)
    add_tol(p, DEFAULT_RANK_TOL)

    p = sub.add_parser("sequiv", help="compare semisimplifications of two objects")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--seed", type=int, default=0)
    add_tol(p, DEFAULT_RANK_TOL)

    p = sub.add_parser("stable", help="stability (= simplicity) of an object")
    p.add_argument("file")
    p.add_argument("--seed", type=int, default=0)
    add_tol(p, DEFAULT_RANK_TOL)

    p = sub.add_parser("degenerate", help="one-parameter degeneration along a filtration")
    p.add_argument("file")
    p.add_argument("--filtration", required=True, help="filtration document file")
    p.add_argument("--tau", default="1.0", help="scale parameter, complex allowed")
    add_tol(p)

    p = sub.add_parser("jacobian", help="rigidity rank of the one-arrow transform")
    p.add_argument("file")
    p.add_argument("--arrow", default=None, help="restrict to one arrow key like [1]|1")
    p.add_argument("--step", type=float, default=1e-5)
    p.add_argument("--sv-tol", type=float, default=1e-5)

    p = sub.add_parser("gen", help="generate a named test object")
    p.add_argument("builder")
    p.add_argument("--r", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--alpha")
    p.add_argument("--style")
    p.add_argument("--good", action="store_true")
    p.add_argument("--of", action="append", default=None,
                   help="component spec for direct-sum, repeatable")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("strata", help="stratum and cover enumerations")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--r", type=int, required=True)

    args = parser.parse_args(argv)

    try:
        return _dispatch(args)
    except _CliError as exc:
        _emit(exc.payload)
        return exc.code


def _dispatch(args) -> int:
    if args.command == "validate":
        worst = EXIT_OK
        reports = []
        for path in args.files:
            doc = _load_json(path)
            status, body = _request("/validate", {"object": doc, "tol": args.tol},
                                    args.server)
            if status != 200:
                return _error_exit(status, body)
            reports.append({"file": path, **body})
            if not body.get("ok"):
                worst = max(worst, EXIT_INVALID)
        _emit(reports if len(reports) > 1 else reports[0])
        return worst

    if args.command == "good-eig":
        doc = _load_json(args.file)
        return _run("/good-eig", {"object": doc, "tol": args.tol}, args.server,
                    _decide_ok)

    if args.command == "rh":
        doc = _load_json(args.file)
        return _run("/rh", {"object": doc, "tol": args.tol}, args.server, _decide_ok)

    if args.command == "inv-rh":
        doc = _load_json(args.file)
        return _run("/inv-rh", {"object": doc, "tol": args.tol, "sigma": args.sigma},
                    args.server, _decide_ok)

    if args.command == "jh":
        doc = _load_json(args.file)
        return _run("/jh", {"object": doc, "seed": args.seed, "tol": args.tol},
                    args.server, _decide_status)

    if args.command == "sequiv":
        doc_a = _load_json(args.file_a)
        doc_b = _load_json(args.file_b)
        return _run("/sequiv", {"object_a": doc_a, "object_b": doc_b,
                                "seed": args.seed, "tol": args.tol},
                    args.server, _decide_status)

    if args.command == "stable":
        doc = _load_json(args.file)
        return _run("/stable", {"object": doc, "seed": args.seed, "tol": args.tol},
                    args.server, _decide_status)

    if args.command == "degenerate":
        doc = _load_json(args.file)
        filt = _load_json(args.filtration)
        return _run("/degenerate", {"object": doc, "filtration": filt,
                                    "tau": args.tau, "tol": args.tol},
                    args.server, _decide_ok)

    if args.command == "jacobian":
        doc = _load_json(args.file)
        payload = {"object": doc, "step": args.step, "sv_tol": args.sv_tol}
        if args.arrow:
            payload["arrow"] = args.arrow
        return _run("/jacobian", payload, args.server, _decide_ok)

    if args.command == "gen":
        params = {}
        for key in ("r", "d", "n", "alpha", "style"):
            value = getattr(args, key)
            if value is not None:
                params[key] = value
        if args.good:
            params["good"] = True
        if args.of:
            params["of"] = args.of
        return _run("/gen", {"builder": args.builder, "params": params,
                             "seed": args.seed}, args.server, _decide_ok)

    if args.command == "strata":
        return _run("/strata", {"d": args.d, "r": args.r}, args.server, _decide_ok)

    raise _CliError(EXIT_MALFORMED,
                    {"error": {"code": "malformed",
                               "message": f"unknown command {args.command!r}"}})


if __name__ == "__main__":
    raise SystemExit(main())
