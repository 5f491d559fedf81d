"""Command-line entry point: ``tribes <command> --in FILE ... [--out FILE]``.

Exit codes: 0 on success, 1 when a validation or verification fails (the
result document is still written), 2 on usage, I/O, syntax or schema
errors.  With ``--out`` every failure also leaves a JSON error document.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .documents import (
    dumps,
    loads,
    parse_fibration,
    parse_functor,
    parse_groupoid,
    parse_problem,
    serialize_fibration,
    serialize_functor,
    serialize_groupoid,
    write_atomic,
)
from .dot import to_dot
from .errors import (
    BudgetExceeded,
    DocumentSyntaxError,
    SchemaError,
    TribeError,
    ValidationError,
)
from .fibration import pullback, validate_fibration
from .groupoid import compose_functors, functor_equal
from .oracle import SearchBudget, find_fillers
from .paths import path_object
from .verify import verify_wfs
from .wfs import LiftingProblem, factorize, filler_failures, solve_lifting

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tribes", description="Weak factorization systems on finite groupoids.")
    parser.add_argument("--version", action="version", version=f"tribes {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, help_, inputs=True):
        p = sub.add_parser(name, help=help_)
        if inputs:
            p.add_argument("--in", dest="inputs", action="append", default=[], metavar="FILE",
                           help="input document (repeatable)")
        p.add_argument("--out", metavar="FILE", help="write the result here instead of stdout")
        p.add_argument("--format", choices=["json", "dot"], default=None)
        p.add_argument("--budget", type=int, default=10**6, metavar="N",
                       help="largest search space the oracle may explore")
        return p

    command("validate", "check every law of the given documents")
    command("pullback", "chosen pullback of a functor (first --in) along a fibration (second --in)")
    command("path", "path object of a fibration")
    command("factorize", "factor a functor as lambda then rho")
    command("lift", "solve a lifting problem (constructively when it names a factorization)")
    v = command("verify-wfs", "run the seeded verification suite", inputs=False)
    v.add_argument("--seed", type=int, default=0, metavar="N")
    v.add_argument("--max-objects", type=int, default=4, metavar="N")
    v.add_argument("--max-arrows", type=int, default=12, metavar="N")
    v.add_argument("--instances", type=int, default=20, metavar="N")
    command("export-dot", "render a groupoid or functor document as DOT")
    return parser


# -- helpers -------------------------------------------------------------------


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _inputs(args, n):
    if len(args.inputs) != n:
        raise UsageError(f"{args.command} takes exactly {n} --in file(s), got {len(args.inputs)}")
    return [_read(p) for p in args.inputs]


def _parse_any(doc):
    kind = doc.get("kind")
    parsers = {"groupoid": parse_groupoid, "functor": parse_functor, "fibration": parse_fibration}
    if kind == "problem":
        return parse_problem(doc)[0]
    if kind not in parsers:
        raise SchemaError("kind", f"unknown document kind {kind!r}")
    return parsers[kind](doc)


def _budget(args):
    if args.budget <= 0:
        raise UsageError("--budget must be positive")
    return SearchBudget(max_candidates=args.budget)


def _json_only(args):
    if args.format == "dot":
        raise UsageError(f"{args.command} has no DOT output")


# -- commands ------------------------------------------------------------------


def cmd_validate(args):
    _json_only(args)
    if not args.inputs:
        raise UsageError("validate needs at least one --in file")
    results, status = [], OK
    for path in args.inputs:
        doc = _read(path)
        entry = {"file": path, "kind": doc.get("kind"), "ok": True, "violations": []}
        try:
            _parse_any(doc)
        except ValidationError as exc:
            entry["ok"] = False
            entry["violations"] = [_violation(v) for v in exc.violations] or [{"detail": str(exc)}]
            status = FAILED
        results.append(entry)
    return {"kind": "validation", "ok": status == OK, "results": results}, status


def _violation(v):
    d = v.as_dict()
    return {"kind": d["kind"], "witness": _plain(d["witness"]), "detail": d["detail"]}


def _plain(x):
    if isinstance(x, (list, tuple)):
        return [_plain(y) for y in x]
    return x


def cmd_pullback(args):
    f_doc, p_doc = _inputs(args, 2)
    f = parse_functor(f_doc) if f_doc.get("kind") == "functor" else parse_fibration(f_doc)
    p = parse_fibration(p_doc)
    sq = pullback(f, p)
    if args.format == "dot":
        return to_dot(sq.apex), OK
    doc = {
        "kind": "pullback",
        "apex": serialize_groupoid(sq.apex),
        "proj0": serialize_fibration(sq.proj0),
        "proj1": serialize_functor(sq.proj1),
    }
    return doc, OK


def cmd_path(args):
    (p_doc,) = _inputs(args, 1)
    p = parse_fibration(p_doc)
    po = path_object(p)
    P = po.path_groupoid
    if args.format == "dot":
        return to_dot(P), OK
    doc = {
        "kind": "path-object",
        "objects": len(P.objects),
        "arrows": len(P.arrows),
        "path": serialize_groupoid(P),
        "unit": serialize_functor(po.unit),
        "boundary": serialize_fibration(po.boundary),
    }
    return doc, OK


def cmd_factorize(args):
    (f_doc,) = _inputs(args, 1)
    f = parse_functor(f_doc)
    fact = factorize(f)
    if args.format == "dot":
        return to_dot(fact.mid), OK
    verified = functor_equal(compose_functors(fact.rho, fact.lambda_), f) and not validate_fibration(fact.rho)
    doc = {
        "kind": "factorization",
        "f": serialize_functor(f),
        "mid": serialize_groupoid(fact.mid),
        "lambda": serialize_functor(fact.lambda_),
        "rho": serialize_fibration(fact.rho),
        "verified": verified,
    }
    return doc, OK if verified else FAILED


def cmd_lift(args):
    _json_only(args)
    (doc,) = _inputs(args, 1)
    prob, f = parse_problem(doc)
    if f is not None:
        fact = factorize(f)
        if not functor_equal(fact.lambda_, prob.left):
            raise ValidationError([], "left map is not the lambda of the named factorization")
        prob = LiftingProblem(fact.lambda_, prob.right, prob.top, prob.bottom, fact.witness)
        j = solve_lifting(prob).j
        bad = filler_failures(prob, j)
        out = {"kind": "filler", "method": "constructive", "filler": serialize_functor(j),
               "verified": not bad, "failures": bad}
        return out, OK if not bad else FAILED
    fillers = find_fillers(prob, _budget(args))
    out = {"kind": "filler", "method": "oracle", "count": len(fillers),
           "fillers": [serialize_functor(j) for j in fillers]}
    return out, OK if fillers else FAILED


def cmd_verify(args):
    _json_only(args)
    report = verify_wfs(args.seed, args.max_objects, args.max_arrows, _budget(args), args.instances)
    return report.to_document(), OK if report.ok else FAILED


def cmd_export_dot(args):
    (doc,) = _inputs(args, 1)
    value = _parse_any(doc)
    if isinstance(value, LiftingProblem):
        raise UsageError("export-dot renders groupoid, functor or fibration documents")
    if args.format == "json":
        return {"kind": "dot", "dot": to_dot(value)}, OK
    return to_dot(value), OK


COMMANDS = {
    "validate": cmd_validate,
    "pullback": cmd_pullback,
    "path": cmd_path,
    "factorize": cmd_factorize,
    "lift": cmd_lift,
    "verify-wfs": cmd_verify,
    "export-dot": cmd_export_dot,
}


# -- driver --------------------------------------------------------------------


def _error_document(exc, code):
    doc = {"kind": "error", "error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, DocumentSyntaxError):
        doc["line"], doc["column"] = exc.line, exc.column
    if isinstance(exc, SchemaError):
        doc["field"] = exc.field
    if isinstance(exc, ValidationError):
        doc["violations"] = [_violation(v) for v in exc.violations]
    return doc


def _out_from_argv(argv):
    for i, a in enumerate(argv):
        if a == "--out" and i + 1 < len(argv):
            return argv[i + 1]
        if a.startswith("--out="):
            return a.split("=", 1)[1]
    return None


def _emit(result, out):
    text = result if isinstance(result, str) else dumps(result)
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = _out_from_argv(argv)
    try:
        args = build_parser().parse_args(argv)
        result, code = COMMANDS[args.command](args)
        _emit(result, args.out)
        if code != OK:
            print(f"tribes {args.command}: failed (see the result document)", file=sys.stderr)
        return code
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    except (UsageError, DocumentSyntaxError, SchemaError, BudgetExceeded, OSError) as exc:
        err, code = exc, USAGE
    except TribeError as exc:
        err, code = exc, FAILED
    print(f"tribes: {type(err).__name__}: {err}", file=sys.stderr)
    if out:
        try:
            write_atomic(out, dumps(_error_document(err, code)))
        except OSError as exc:
            print(f"tribes: cannot write {out}: {exc.strerror}", file=sys.stderr)
            return USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
