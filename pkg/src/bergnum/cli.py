"""berg: thin command-line client of the bergnum service.

Every subcommand issues one HTTP request.  Without --server the requests run
against an in-process instance of the same application, so the CLI works
standalone; pointing --server at a running `berg serve` reuses that process's
weight and kernel caches.

Exit codes: 0 ok, 1 error, 2 inconclusive or partial results.  Output is CSV
with a versioned header comment (floats printed to 17 significant digits, so
identical inputs produce byte-identical output), or raw JSON under --json.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

from .config import DEFAULTS, Settings
from .errors import BergnumError

_CSV_HEADER = "# bergnum csv v1"


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _settings(args) -> Settings:
    if getattr(args, "config", None):
        return Settings.load(args.config)
    return DEFAULTS


def _request(args, method: str, path: str, payload: dict | None = None):
    """One request against the remote server or an in-process app instance."""
    if args.server:
        with httpx.Client(base_url=args.server, timeout=600.0) as client:
            return client.request(method, path, json=payload)

    import asyncio

    from .service.app import create_app

    async def go():
        transport = httpx.ASGITransport(app=create_app(_settings(args)))
        async with httpx.AsyncClient(transport=transport, timeout=None,
                                     base_url="http://bergnum.local") as client:
            return await client.request(method, path, json=payload)

    return asyncio.run(go())


def _weight_arg(value: str):
    """A weight spec string, or @file.json for a structured document."""
    if value.startswith("@"):
        return json.loads(Path(value[1:]).read_text(encoding="utf-8"))
    return value


def _validate_weight(value) -> None:
    from .weights import parse_weight, weight_from_json
    if isinstance(value, dict):
        weight_from_json(value)
    else:
        parse_weight(value)


def _validate_symbol(value: str) -> None:
    from .analytic import parse_symbol
    parse_symbol(value)


def _post(args, path: str, payload: dict) -> dict:
    resp = _request(args, "POST", path, payload)
    body = resp.json()
    if resp.status_code >= 400:
        raise BergnumError(body.get("error", f"HTTP {resp.status_code}"))
    return body


def _get(args, path: str) -> dict:
    resp = _request(args, "GET", path)
    body = resp.json()
    if resp.status_code >= 400:
        raise BergnumError(body.get("error", f"HTTP {resp.status_code}"))
    return body


def _emit(rows: list[list], header: list[str], args) -> None:
    print(_CSV_HEADER)
    print(",".join(header))
    for row in rows:
        print(",".join(_fmt(x) for x in row))


# ---------------------------------------------------------------------------
# Subcommand handlers (return the process exit code)
# ---------------------------------------------------------------------------

def cmd_weights_classify(args) -> int:
    weight = _weight_arg(args.weight)
    if args.dry_run:
        _validate_weight(weight)
        print("ok: inputs valid")
        return 0
    body = _post(args, "/weights/classify",
                 {"weight": weight, "k_max": args.k_max,
                  "x_pow_max": args.x_pow_max})
    if args.json:
        print(json.dumps(body, indent=2, sort_keys=True))
    else:
        rows = [[k, v] for k, v in sorted(body["verdicts"].items())]
        rows += [[k, v if v is not None else "nan"]
                 for k, v in sorted(body["constants"].items())]
        _emit(rows, ["quantity", "value"], args)
    return 2 if "inconclusive" in body["verdicts"].values() else 0


def cmd_kernel_norm(args) -> int:
    weight, nu = _weight_arg(args.weight), _weight_arg(args.nu)
    if args.dry_run:
        _validate_weight(weight)
        _validate_weight(nu)
        print("ok: inputs valid")
        return 0
    payload = {"weight": weight, "nu": nu, "p": args.p, "N": args.N,
               "k_max": args.k_max}
    if args.z:
        payload["z"] = args.z
    body = _post(args, "/compute/kernel-norm", payload)
    if args.json:
        print(json.dumps(body, indent=2, sort_keys=True))
    else:
        _emit([[r["z"], r["norm"], r.get("bound")] for r in body["rows"]],
              ["z", "norm", "bound"], args)
    return 0


def cmd_project(args) -> int:
    weight = _weight_arg(args.weight)
    if args.dry_run:
        _validate_weight(weight)
        _validate_symbol(args.symbol)
        print("ok: inputs valid")
        return 0
    body = _post(args, "/compute/project",
                 {"weight": weight, "symbol": args.symbol, "n_max": args.n_max})
    if args.json:
        print(json.dumps(body, indent=2, sort_keys=True))
    else:
        rows = [[n, re, im] for n, (re, im) in enumerate(
            zip(body["coefficients_re"], body["coefficients_im"]))]
        _emit(rows, ["n", "re", "im"], args)
    return 0


def cmd_v_transform(args) -> int:
    weight, nu = _weight_arg(args.weight), _weight_arg(args.nu)
    if args.dry_run:
        _validate_weight(weight)
        _validate_weight(nu)
        _validate_symbol(args.symbol)
        print("ok: inputs valid")
        return 0
    z_re, z_im = [], []
    for z in args.z or ["0"]:
        parts = z.split(",")
        z_re.append(float(parts[0]))
        z_im.append(float(parts[1]) if len(parts) > 1 else 0.0)
    body = _post(args, "/compute/v-transform",
                 {"weight": weight, "nu": nu, "symbol": args.symbol,
                  "z_re": z_re, "z_im": z_im, "n_max": args.n_max,
                  "sup_over_lattice": args.sup})
    if args.json:
        print(json.dumps(body, indent=2, sort_keys=True))
    else:
        rows = [[a, b, vr, vi] for a, b, vr, vi in
                zip(z_re, z_im, body["values_re"], body["values_im"])]
        if body.get("sup") is not None:
            rows.append(["sup", "", body["sup"], ""])
        _emit(rows, ["z_re", "z_im", "value_re", "value_im"], args)
    return 0


def cmd_hankel_norm(args) -> int:
    weight = _weight_arg(args.weight)
    if args.dry_run:
        _validate_weight(weight)
        _validate_symbol(args.symbol)
        print("ok: inputs valid")
        return 0
    body = _post(args, "/compute/hankel-norm",
                 {"weight": weight, "symbol": args.symbol, "p": args.p,
                  "d": args.d, "trials": args.trials, "seed": args.seed})
    if args.json:
        print(json.dumps(body, indent=2, sort_keys=True))
    else:
        _emit([[body["p"], body["d"], body["value"],
                body.get("value_half") if body.get("value_half") is not None
                else "", body["kind"]]],
              ["p", "d", "value", "value_half", "kind"], args)
    return 0


def cmd_bmo(args) -> int:
    weight = _weight_arg(args.weight)
    if args.dry_run:
        _validate_weight(weight)
        _validate_symbol(args.symbol)
        print("ok: inputs valid")
        return 0
    body = _post(args, "/compute/bmo",
                 {"weight": weight, "symbol": args.symbol, "p": args.p,
                  "r": args.r, "lattice_delta": args.delta,
                  "lattice_level": args.level})
    if args.json:
        print(json.dumps(body, indent=2, sort_keys=True))
    else:
        _emit([[body["bmo"], body["ba"],
                body.get("bo") if body.get("bo") is not None else "",
                body["degenerate_points"], body["lattice_points"]]],
              ["bmo", "ba", "bo", "degenerate_points", "lattice_points"], args)
    return 0


def cmd_experiment(args) -> int:
    if args.action == "list":
        body = _get(args, "/experiments")
        if args.json:
            print(json.dumps(body, indent=2, sort_keys=True))
        else:
            _emit([[n] for n in body["experiments"]], ["experiment"], args)
        return 0
    # run
    from .experiments import list_experiments
    if args.name not in list_experiments():
        print(f"error: unknown experiment {args.name!r}", file=sys.stderr)
        return 1
    if args.dry_run:
        print("ok: inputs valid")
        return 0
    payload = {"persist": args.persist, "params": {}}
    if args.depth:
        payload["depth"] = args.depth
    body = _post(args, f"/experiments/{args.name}/run", payload)
    if args.json:
        print(json.dumps(body, indent=2, sort_keys=True))
    else:
        rows = [["verdict", body["verdict"], "", ""]]
        for rep in body.get("reports", []):
            rows.append([rep["name"], rep["verdict"],
                         rep.get("band") if rep.get("band") is not None else "",
                         rep.get("drift_slope")])
        _emit(rows, ["comparison", "verdict", "band", "drift"], args)
    return 0 if body["verdict"] == "pass" else 2


def cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app
    uvicorn.run(create_app(_settings(args)), host=args.host, port=args.port)
    return 0


def cmd_config_schema(args) -> int:
    schema = Settings().model_json_schema()
    text = json.dumps(schema, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="berg",
        description="weighted Bergman kernel / Hankel / oscillation toolkit")
    parser.add_argument("--server", help="URL of a running service; default "
                                         "runs in-process")
    parser.add_argument("--config", help="JSON settings file")
    parser.add_argument("--json", action="store_true",
                        help="print raw JSON responses")
    sub = parser.add_subparsers(dest="command", required=True)

    weights = sub.add_parser("weights", help="weight operations")
    wsub = weights.add_subparsers(dest="wcommand", required=True)
    wc = wsub.add_parser("classify", help="tri-state class verdicts")
    wc.add_argument("--weight", required=True,
                    help="name grammar (std:alpha=0, exp:c=1, power:beta=1, "
                         "pw:<file>, expr:<text>, counterexample:default) or "
                         "@file.json")
    wc.add_argument("--k-max", type=int, default=14)
    wc.add_argument("--x-pow-max", type=int, default=12)
    wc.add_argument("--dry-run", action="store_true")
    wc.set_defaults(func=cmd_weights_classify)

    kn = sub.add_parser("kernel-norm", help="factored-kernel weighted p-norms")
    kn.add_argument("--weight", required=True)
    kn.add_argument("--nu", required=True)
    kn.add_argument("--p", type=float, default=2.0)
    kn.add_argument("--N", type=int, default=1)
    kn.add_argument("--z", type=float, action="append",
                    help="modulus; repeatable (default: dyadic grid)")
    kn.add_argument("--k-max", type=int, default=8)
    kn.add_argument("--dry-run", action="store_true")
    kn.set_defaults(func=cmd_kernel_norm)

    pj = sub.add_parser("project", help="projection coefficients")
    pj.add_argument("--weight", required=True)
    pj.add_argument("--symbol", required=True)
    pj.add_argument("--n-max", type=int, default=64)
    pj.add_argument("--dry-run", action="store_true")
    pj.set_defaults(func=cmd_project)

    vt = sub.add_parser("v-transform", help="tail-power transform values")
    vt.add_argument("--weight", required=True)
    vt.add_argument("--nu", required=True)
    vt.add_argument("--symbol", required=True)
    vt.add_argument("--z", action="append", help="point re[,im]; repeatable")
    vt.add_argument("--n-max", type=int, default=128)
    vt.add_argument("--sup", action="store_true", help="also lattice sup")
    vt.add_argument("--dry-run", action="store_true")
    vt.set_defaults(func=cmd_v_transform)

    hn = sub.add_parser("hankel-norm", help="operator norm (exact p=2, "
                                            "Monte-Carlo lower bound else)")
    hn.add_argument("--weight", required=True)
    hn.add_argument("--symbol", required=True)
    hn.add_argument("--p", type=float, default=2.0)
    hn.add_argument("--d", type=int, default=64)
    hn.add_argument("--trials", type=int, default=200)
    hn.add_argument("--seed", type=int, default=20240)
    hn.add_argument("--dry-run", action="store_true")
    hn.set_defaults(func=cmd_hankel_norm)

    bm = sub.add_parser("bmo", help="lattice oscillation norms")
    bm.add_argument("--weight", required=True)
    bm.add_argument("--symbol", required=True)
    bm.add_argument("--p", type=float, default=2.0)
    bm.add_argument("--r", type=float, default=1.0)
    bm.add_argument("--delta", type=float, default=0.7)
    bm.add_argument("--level", type=int, default=6)
    bm.add_argument("--dry-run", action="store_true")
    bm.set_defaults(func=cmd_bmo)

    ex = sub.add_parser("experiment", help="named experiment runner")
    ex.add_argument("action", choices=["list", "run"])
    ex.add_argument("name", nargs="?")
    ex.add_argument("--depth", type=int)
    ex.add_argument("--persist", action="store_true",
                    help="write results/<name>/<timestamp>/ on the server")
    ex.add_argument("--jobs", type=int, default=0)
    ex.add_argument("--dry-run", action="store_true")
    ex.set_defaults(func=cmd_experiment)

    sv = sub.add_parser("serve", help="run the HTTP service")
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--port", type=int, default=8421)
    sv.set_defaults(func=cmd_serve)

    cs = sub.add_parser("config-schema", help="print the settings JSON schema")
    cs.add_argument("--out")
    cs.set_defaults(func=cmd_config_schema)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "experiment" and args.action == "run" and not args.name:
        print("error: experiment run requires a name", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except BergnumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(f"error: transport failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
