"""Command-line frontend.

Commands take document files (the same JSON the HTTP API stores) and
print the same report JSON the API would return, so scripts can consume
either interchangeably.

Exit status: 0 for definitive positive verdicts, 1 for definitive
negative ones, 2 when the prover gave up within its limits, 3 for usage
and validation problems.
"""

import argparse
import json
import sys
from typing import List, Optional

from . import gateway
from .documents import (Document, DocumentError, compile_document,
                        document_from_jsonable)
from .embedding import CompileError, compile_theory
from .services import UNKNOWN, VALID
from .store import StoreError
from .syntax import ArityError, LanguageError
from .tptp import clause_set_to_tptp

EXIT_POSITIVE = 0
EXIT_NEGATIVE = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the contract reserves 2 for
    # Unknown verdicts, so route usage problems to 3
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_document(path: str) -> Document:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict) and "document" in data and "revision" in data:
        data = data["document"]
    return document_from_jsonable(data)


def _limits(args) -> "gateway.ResourceLimits":
    return gateway.make_limits(args.limits_depth, args.limits_ms,
                               args.limits_atoms)


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _consistency_exit(status: str) -> int:
    if status == "Consistent":
        return EXIT_POSITIVE
    if status == "Inconsistent":
        return EXIT_NEGATIVE
    return EXIT_UNKNOWN


def cmd_check(args) -> int:
    payload = gateway.consistency_payload(_load_document(args.document),
                                          _limits(args))
    _emit(payload)
    return _consistency_exit(payload["consistency"]["status"])


def cmd_independence(args) -> int:
    payload = gateway.independence_payload(_load_document(args.document),
                                           _limits(args))
    _emit(payload)
    statuses = [payload["consistency"]["status"]]
    statuses += [s["status"] for s in payload["perFormula"].values()]
    if UNKNOWN in statuses:
        return EXIT_UNKNOWN
    if "Inconsistent" in statuses or "Dependent" in statuses:
        return EXIT_NEGATIVE
    return EXIT_POSITIVE


def cmd_query(args) -> int:
    payload = gateway.exec_payload(_load_document(args.legislation),
                                   _load_document(args.query),
                                   _limits(args))
    _emit(payload)
    if payload["verdict"] == VALID:
        return EXIT_POSITIVE
    if payload["verdict"] == UNKNOWN:
        return EXIT_UNKNOWN
    return EXIT_NEGATIVE


def cmd_test(args) -> int:
    payload = gateway.test_payload(_load_document(args.legislation),
                                   [_load_document(p) for p in args.queries],
                                   _limits(args))
    _emit(payload)
    if payload["failed"] == 0:
        return EXIT_POSITIVE
    if any(e["verdict"] == UNKNOWN for e in payload["tests"]):
        return EXIT_UNKNOWN
    return EXIT_NEGATIVE


def cmd_export(args) -> int:
    doc = _load_document(args.document)
    compiled = compile_document(doc)
    cs = compile_theory(compiled.formulas, signature=compiled.signature)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(clause_set_to_tptp(cs))
    _emit({"documentId": doc.id, "path": args.output,
           "clauses": len(cs.clauses)})
    return EXIT_POSITIVE


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app
    uvicorn.run(create_app(args.data_dir), host=args.host, port=args.port)
    return EXIT_POSITIVE


def _add_limits(p) -> None:
    p.add_argument("--limits-depth", type=int, default=None,
                   help="derivation depth cap")
    p.add_argument("--limits-ms", type=int, default=None,
                   help="prover time budget in milliseconds")
    p.add_argument("--limits-atoms", type=int, default=None,
                   help="ground atom cap for model search")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="normkit",
                     description="reason over annotated normative documents")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="consistency of one document")
    p.add_argument("document")
    _add_limits(p)
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("independence",
                       help="per-formula independence of one document")
    p.add_argument("document")
    _add_limits(p)
    p.set_defaults(run=cmd_independence)

    p = sub.add_parser("query",
                       help="does the legislation entail the query goal")
    p.add_argument("legislation")
    p.add_argument("query")
    _add_limits(p)
    p.set_defaults(run=cmd_query)

    p = sub.add_parser("test",
                       help="run test-marked queries against legislation")
    p.add_argument("legislation")
    p.add_argument("queries", nargs="+")
    _add_limits(p)
    p.set_defaults(run=cmd_test)

    p = sub.add_parser("export", help="write the TPTP-style clause export")
    p.add_argument("document")
    p.add_argument("output")
    p.set_defaults(run=cmd_export)

    p = sub.add_parser("serve", help="run the HTTP gateway")
    p.add_argument("--data-dir", default="data")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(run=cmd_serve)

    return parser


_ERROR_CODES = (
    (DocumentError, lambda e: e.code),
    (StoreError, lambda e: e.code),
    (ArityError, lambda e: "arity_conflict"),
    (CompileError, lambda e: "name_error"),
    (LanguageError, lambda e: "validation_error"),
    (ValueError, lambda e: "validation_error"),
    (OSError, lambda e: "io_error"),
)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except tuple(cls for cls, _pick in _ERROR_CODES) as e:
        for cls, pick in _ERROR_CODES:
            if isinstance(e, cls):
                error = {"code": pick(e), "message": str(e)}
                where = getattr(e, "where", None)
                if where is not None:
                    error["where"] = where
                _emit({"error": error})
                return EXIT_USAGE
        raise AssertionError("unreachable")


if __name__ == "__main__":
    raise SystemExit(main())
