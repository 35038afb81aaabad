"""Command-line client for the verification service.

The CLI only reads files, builds service requests, and renders responses to
stdout and exit codes; every operation runs through the service layer.  By
default requests are handled in-process; ``--server`` sends them to a
running service instead.

Exit codes: 0 pass/valid, 1 definite negative verdict (witness on stdout),
2 usage or document error, 3 inconclusive (truncated exploration or partial
unfolding).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

EXIT_PASS = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3

_NEGATIVE_KINDS = {"NonCommutingDiagram", "UnsafeNet"}


class ClientError(Exception):
    def __init__(self, info: dict):
        super().__init__(info.get("message", "request failed"))
        self.info = info


class Client:
    """Thin transport: in-process handler calls or HTTP to a remote service."""

    def __init__(self, server: str | None):
        self.server = server

    def call(self, path: str, payload: dict) -> dict:
        if self.server is None:
            return self._call_local(path, payload)
        return self._call_remote(path, payload)

    def _call_local(self, path: str, payload: dict) -> dict:
        from .service import handlers, models

        table = {
            "/validate": (models.ValidateRequest, handlers.handle_validate),
            "/check": (models.CheckRequest, handlers.handle_check),
            "/compose": (models.ComposeRequest, handlers.handle_compose),
            "/morphism/check": (models.MorphismCheckRequest, handlers.handle_check_morphism),
            "/unfold": (models.UnfoldRequest, handlers.handle_unfold),
            "/reach": (models.ReachRequest, handlers.handle_reach),
            "/refine/certify": (models.CertifyRequest, handlers.handle_certify),
            "/refine/compose": (models.RefineComposeRequest, handlers.handle_refine_compose),
        }
        model, handler = table[path]
        try:
            response = handler(model.model_validate(payload))
        except handlers.ServiceFailure as exc:
            raise ClientError(exc.info.model_dump()) from exc
        return response.model_dump()

    def _call_remote(self, path: str, payload: dict) -> dict:
        import httpx

        reply = httpx.post(self.server.rstrip("/") + path, json=payload, timeout=300.0)
        if reply.status_code == 400:
            raise ClientError(reply.json().get("error", {}))
        reply.raise_for_status()
        return reply.json()


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _scenario_payload(manifest: str) -> dict:
    from .errors import ParseError
    from .textio import load_scenario_files

    try:
        return load_scenario_files(manifest)
    except ParseError as exc:
        print(f"error: {manifest}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _fail(info: dict) -> int:
    line = f" (line {info['line']})" if info.get("line") else ""
    clauses = f" clauses: {', '.join(info['clauses'])}" if info.get("clauses") else ""
    print(f"error [{info.get('kind', '?')}]: {info.get('message', '')}{line}{clauses}", file=sys.stderr)
    if info.get("kind") in _NEGATIVE_KINDS:
        return EXIT_NEGATIVE
    return EXIT_USAGE


def cmd_validate(args, client: Client) -> int:
    try:
        out = client.call("/validate", {"net": _read(args.net)})
    except ClientError as exc:
        return _fail(exc.info)
    if out["ok"]:
        print(f"valid {out['name']}")
        return EXIT_PASS
    err = out["error"]
    print(f"invalid: {err['message']}")
    return EXIT_NEGATIVE


def cmd_check(args, client: Client) -> int:
    payload = {
        "net": _read(args.net),
        "property": args.property,
        "cap": args.cap,
        "limit": args.limit,
    }
    try:
        out = client.call("/check", payload)
    except ClientError as exc:
        return _fail(exc.info)
    print(f"{args.property}: {out['verdict']} ({out['detail']})")
    if out.get("witness"):
        sys.stdout.write(out["witness"])
    return {"pass": EXIT_PASS, "fail": EXIT_NEGATIVE}.get(out["verdict"], EXIT_INCONCLUSIVE)


def cmd_compose(args, client: Client) -> int:
    payload = {
        "net1": _read(args.net1),
        "net2": _read(args.net2),
        "p_simplify": args.p_simplify,
        "auto_prefix": args.auto_prefix,
        "name": args.name,
    }
    try:
        out = client.call("/compose", payload)
    except ClientError as exc:
        return _fail(exc.info)
    if args.output:
        Path(args.output).write_text(out["net"], encoding="utf-8")
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(out["net"])
    print(
        f"# channels: {', '.join(out['channel_places']) or '-'} | "
        f"sync: {', '.join(out['sync_transitions']) or '-'} | "
        f"smd: {'yes' if out['smd'] else 'no'}",
        file=sys.stderr,
    )
    return EXIT_PASS


def cmd_check_morphism(args, client: Client) -> int:
    payload = {
        "morphism": _read(args.map),
        "source": _read(args.source),
        "target": _read(args.target),
        "alpha_hat": args.alpha_hat,
        "local": args.local,
        "well_marked": args.well_marked,
    }
    try:
        out = client.call("/morphism/check", payload)
    except ClientError as exc:
        return _fail(exc.info)
    ok = out["valid"]
    print(f"morphism: {'valid' if ok else 'invalid'}")
    for failure in out["failures"]:
        print(f"  failed {failure}")
    if out.get("local_passed") is not None:
        print(f"local condition: {'pass' if out['local_passed'] else 'fail'}")
        for entry in out["local"]:
            mark = "pass" if entry["passed"] else "fail"
            extra = f" uncovered: {', '.join(entry['uncovered'])}" if entry["uncovered"] else ""
            print(f"  place {entry['place']}: {mark}{extra}")
        ok = ok and out["local_passed"]
    if out.get("well_marked") is not None:
        print(f"well-marked: {'yes' if out['well_marked'] else 'no'}")
        ok = ok and out["well_marked"]
    return EXIT_PASS if ok else EXIT_NEGATIVE


def cmd_refine_certify(args, client: Client) -> int:
    payload = {
        "scenario": _scenario_payload(args.manifest),
        "audit": args.audit,
        "cap": args.cap,
        "limit": args.limit,
    }
    try:
        out = client.call("/refine/certify", payload)
    except ClientError as exc:
        return _fail(exc.info)
    print(out["text"])
    return EXIT_PASS if out["certified"] else EXIT_NEGATIVE


def cmd_refine_compose(args, client: Client) -> int:
    payload = {
        "left": _scenario_payload(args.left),
        "right": _scenario_payload(args.right),
    }
    try:
        out = client.call("/refine/compose", payload)
    except ClientError as exc:
        return _fail(exc.info)
    if args.output:
        Path(args.output).write_text(out["net"], encoding="utf-8")
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(out["net"])
    print(
        f"# commutes: {'yes' if out['commutes'] else 'no'} | "
        f"matches direct composition: {'yes' if out['matches_direct'] else 'no'}",
        file=sys.stderr,
    )
    return EXIT_PASS if out["commutes"] else EXIT_NEGATIVE


def cmd_unfold(args, client: Client) -> int:
    try:
        out = client.call("/unfold", {"net": _read(args.net), "depth": args.depth})
    except ClientError as exc:
        return _fail(exc.info)
    print(
        f"unfolding: {out['conditions']} conditions, {out['events']} events"
        f"{' (partial)' if out['partial'] else ''}"
    )
    sys.stdout.write(out["listing"])
    return EXIT_INCONCLUSIVE if out["partial"] else EXIT_PASS


def cmd_reach(args, client: Client) -> int:
    payload = {
        "net": _read(args.net),
        "cap": args.cap,
        "limit": args.limit,
        "dot": args.dot,
    }
    try:
        out = client.call("/reach", payload)
    except ClientError as exc:
        return _fail(exc.info)
    print(
        f"reachability: {out['vertices']} markings, {out['edges']} edges, "
        f"{out['deadlocks']} deadlocks"
    )
    if out.get("dot"):
        sys.stdout.write(out["dot"])
    if out.get("unbounded"):
        print("unbounded:")
        sys.stdout.write(out["unbounded"])
        return EXIT_NEGATIVE
    if out["truncated"]:
        print("exploration truncated")
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def cmd_serve(args, _client: Client) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wfnet",
        description="workflow-net composition and soundness verifier",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="URL of a running service; default runs requests in-process",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate a net document")
    p.add_argument("net")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("check", help="check a property of a net")
    p.add_argument("property", choices=["sound", "smd", "safe"])
    p.add_argument("net")
    p.add_argument("--cap", type=int, default=8)
    p.add_argument("--limit", type=int, default=200_000)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("compose", help="compose two nets over channels and activities")
    p.add_argument("net1")
    p.add_argument("net2")
    p.add_argument("--p-simplify", action="store_true")
    p.add_argument("--auto-prefix", action="store_true")
    p.add_argument("--name")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("check-morphism", help="validate an abstraction morphism")
    p.add_argument("map")
    p.add_argument("--source", required=True, help="refined net document")
    p.add_argument("--target", required=True, help="abstract net document")
    p.add_argument("--alpha-hat", action="store_true", help="require label preservation")
    p.add_argument("--local", action="store_true", help="also check local unfolding conditions")
    p.add_argument("--well-marked", action="store_true")
    p.set_defaults(func=cmd_check_morphism)

    refine = sub.add_parser("refine", help="refinement certification and composition")
    refine_sub = refine.add_subparsers(dest="refine_command", required=True)

    p = refine_sub.add_parser("certify", help="certify a refinement scenario")
    p.add_argument("manifest")
    p.add_argument("--audit", action="store_true", help="also check the composed system explicitly")
    p.add_argument("--cap", type=int, default=8)
    p.add_argument("--limit", type=int, default=200_000)
    p.set_defaults(func=cmd_refine_certify)

    p = refine_sub.add_parser("compose", help="compose two intermediate refinements")
    p.add_argument("left", help="scenario manifest for the left side")
    p.add_argument("right", help="scenario manifest for the right side")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_refine_compose)

    p = sub.add_parser("unfold", help="unfold a net into its branching process")
    p.add_argument("net")
    p.add_argument("--depth", type=int, default=10_000)
    p.set_defaults(func=cmd_unfold)

    p = sub.add_parser("reach", help="explore the reachability graph")
    p.add_argument("net")
    p.add_argument("--cap", type=int, default=8)
    p.add_argument("--limit", type=int, default=200_000)
    p.add_argument("--dot", action="store_true", help="emit graph-description text")
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    client = Client(args.server)
    try:
        code = args.func(args, client)
    except SystemExit as exc:
        return int(exc.code or 0)
    except json.JSONDecodeError:
        print("error: malformed server response", file=sys.stderr)
        return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
