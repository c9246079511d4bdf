"""Command-line interface.

Artifacts go to stdout (or ``-o``); diagnostics go to stderr, one per line
as ``SEVERITY CODE file:line:col message`` (or as JSON objects under
``--format=json``).  Exit status: 0 clean, 1 when any error-severity
diagnostic was produced, 2 for usage or I/O failures.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path

from . import calculus, checker, dtdgen, interop, styles, xmlio
from .diagnostics import Diagnostic, from_error, has_errors, sort_diagnostics
from .errors import OmlError
from .model import KnowledgeBase, Literal, ObjectInstance, Ontology


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _print_diags(diags, fmt: str):
    for d in sort_diagnostics(list(diags)):
        if fmt == "json":
            loc = d.location or (None, None, None)
            sys.stderr.write(
                json.dumps(
                    {
                        "severity": d.severity,
                        "code": d.code,
                        "message": d.message,
                        "file": loc[0],
                        "line": loc[1],
                        "col": loc[2],
                    },
                    sort_keys=True,
                )
                + "\n"
            )
        else:
            sys.stderr.write(d.format() + "\n")


def _exit_code(diags) -> int:
    return 1 if has_errors(diags) else 0


def _resolver(mappings: list[str]):
    table = {}
    for m in mappings or ():
        uri, sep, path = m.partition("=")
        if not sep:
            sys.stderr.write("error: --map expects URI=PATH, got %r\n" % m)
            raise SystemExit(2)
        table[uri] = path

    def resolve(uri: str) -> str:
        return _read(table[uri])

    return resolve


def _mode(args) -> str:
    if getattr(args, "strict", False):
        return "strict"
    if getattr(args, "lenient", False):
        return "lenient"
    return "strict" if os.environ.get("OML_STRICT") == "1" else "lenient"


def _load_kb(args, ontology_path: str, collection_path: str | None = None) -> KnowledgeBase:
    ho = getattr(args, "higher_order", False)
    resolver = _resolver(getattr(args, "map", None))
    ont_doc = xmlio.parse_oml(_read(ontology_path), source=ontology_path, higher_order=ho)
    if not isinstance(ont_doc.root, Ontology):
        raise OmlError("%s does not hold an ontology" % ontology_path)
    kb = xmlio.load_extends(ont_doc, resolver, higher_order=ho)
    if collection_path is not None:
        coll_doc = xmlio.parse_oml(_read(collection_path), source=collection_path, higher_order=ho)
        kb.collections.append(coll_doc.root)
    return kb


def cmd_parse(args) -> int:
    diags = []
    try:
        doc = xmlio.parse_oml(_read(args.file), source=args.file, higher_order=args.higher_order)
    except OmlError as err:
        diags.append(from_error(err))
        _print_diags(diags, args.format)
        return 1
    _emit(xmlio.serialize_generic(doc), args.output)
    return 0


def cmd_check(args) -> int:
    mode = _mode(args)
    resolver = _resolver(args.map)
    ontology = None
    if args.ontology:
        doc = xmlio.parse_oml(_read(args.ontology), source=args.ontology, higher_order=args.higher_order)
        ontology = xmlio.load_extends(doc, resolver, higher_order=args.higher_order).ontology
    all_diags = []
    for path in args.files:
        try:
            doc = xmlio.parse_oml(_read(path), source=path, higher_order=args.higher_order)
            kb = xmlio.load_extends(doc, resolver, higher_order=args.higher_order, ontology=ontology)
            all_diags.extend(checker.run_all(kb, mode))
        except OmlError as err:
            all_diags.append(from_error(err))
    _print_diags(all_diags, args.format)
    return _exit_code(all_diags)


def cmd_compile_dtd(args) -> int:
    try:
        kb = _load_kb(args, args.ontology)
        diags: list[Diagnostic] = []
        dtd = dtdgen.compile_dtd(kb.ontology, diagnostics=diags)
    except OmlError as err:
        _print_diags([from_error(err)], args.format)
        return 1
    _print_diags(diags, args.format)
    _emit(dtdgen.render_dtd(dtd), args.output)
    return 0


def cmd_validate_dtd(args) -> int:
    try:
        dtd = dtdgen.parse_dtd(_read(args.dtd))
    except OmlError as err:
        _print_diags([from_error(err)], args.format)
        return 1
    diags = dtdgen.validate_against_dtd(dtd, _read(args.xml), source=args.xml)
    _print_diags(diags, args.format)
    return _exit_code(diags)


def cmd_to_specific(args) -> int:
    try:
        kb = _load_kb(args, args.ontology, args.collection)
        text = styles.to_specific(kb, ontology_label=os.path.basename(args.ontology))
    except OmlError as err:
        _print_diags([from_error(err)], args.format)
        return 1
    _emit(text, args.output)
    return 0


def cmd_to_generic(args) -> int:
    try:
        kb = _load_kb(args, args.ontology)
        coll = styles.to_generic(
            _read(args.xml), kb.ontology, higher_order=args.higher_order, source=args.xml
        )
    except OmlError as err:
        _print_diags([from_error(err)], args.format)
        return 1
    _emit(xmlio.serialize_generic(coll), args.output)
    return 0


def cmd_export_rdf(args) -> int:
    try:
        kb = _load_kb(args, args.ontology, args.collection)
        diags: list[Diagnostic] = []
        doc = interop.export_rdfs(kb, diagnostics=diags)
    except OmlError as err:
        _print_diags([from_error(err)], args.format)
        return 1
    _print_diags(diags, args.format)
    _emit(interop.serialize_triples(doc), args.output)
    return 0


def cmd_import_rdf(args) -> int:
    try:
        doc = interop.parse_triples(_read(args.triples), source=args.triples)
        kb, warnings = interop.import_rdfs(doc)
    except OmlError as err:
        _print_diags([from_error(err)], args.format)
        return 1
    _print_diags(warnings, args.format)
    if args.ontology_out:
        _emit(xmlio.serialize_generic(kb.ontology), args.ontology_out)
    if args.collection_out:
        _emit(xmlio.serialize_generic(kb.collection), args.collection_out)
    return 0


def cmd_export_xol(args) -> int:
    try:
        kb = _load_kb(args, args.ontology, args.collection)
        text = interop.export_xol(kb)
    except OmlError as err:
        _print_diags([from_error(err)], args.format)
        return 1
    _emit(text, args.output)
    return 0


def cmd_import_xol(args) -> int:
    try:
        kb = interop.import_xol(_read(args.xol), source=args.xol)
    except OmlError as err:
        _print_diags([from_error(err)], args.format)
        return 1
    if args.ontology_out:
        _emit(xmlio.serialize_generic(kb.ontology), args.ontology_out)
    if args.collection_out:
        _emit(xmlio.serialize_generic(kb.collection), args.collection_out)
    return 0


def cmd_lint(args) -> int:
    try:
        kb = _load_kb(args, args.ontology, args.collection)
        diags = checker.lint_inclusion_implies_subtype(kb)
    except OmlError as err:
        _print_diags([from_error(err)], args.format)
        return 1
    _print_diags(diags, args.format)
    return _exit_code(diags)


_TOKEN = re.compile(r"\s*([(),]|[^\s(),]+)")


def parse_expression(text: str, ont: Ontology):
    """expr := NAME | identity(NAME) | compose(expr, expr) | transpose(expr)"""
    tokens = _TOKEN.findall(text)

    def parse(pos: int):
        if pos >= len(tokens):
            raise OmlError("unexpected end of expression")
        tok = tokens[pos]
        if tok in ("identity", "compose", "transpose") and pos + 1 < len(tokens) and tokens[pos + 1] == "(":
            if tok == "identity":
                name, pos = expect_name(pos + 2)
                pos = expect(pos, ")")
                return calculus.identity_type(ont, name), pos
            if tok == "transpose":
                inner, pos = parse(pos + 2)
                pos = expect(pos, ")")
                return calculus.transpose_type(ont, inner), pos
            first, pos = parse(pos + 2)
            pos = expect(pos, ",")
            second, pos = parse(pos)
            pos = expect(pos, ")")
            return calculus.compose_types(ont, first, second), pos
        if tok in ("(", ")", ","):
            raise OmlError("unexpected %r in expression" % tok)
        return ont.resolve_type(tok), pos + 1

    def expect(pos: int, tok: str) -> int:
        if pos >= len(tokens) or tokens[pos] != tok:
            raise OmlError("expected %r in expression" % tok)
        return pos + 1

    def expect_name(pos: int):
        if pos >= len(tokens) or tokens[pos] in ("(", ")", ","):
            raise OmlError("expected a type name in expression")
        return tokens[pos], pos + 1

    expr, pos = parse(0)
    if pos != len(tokens):
        raise OmlError("trailing input in expression")
    return expr


def _endpoint_text(x) -> str:
    if isinstance(x, ObjectInstance):
        return x.id or x.about or "(anonymous)"
    if isinstance(x, Literal):
        return '"%s"' % x.lexical
    return x


def cmd_calc(args) -> int:
    try:
        kb = _load_kb(args, args.ontology, args.collection)
        expr = parse_expression(args.expression, kb.ontology)
        src = calculus.source_name(kb.ontology, expr)
        tgt = calculus.target_name(kb.ontology, expr)
        pairs = calculus.relation_extension(kb, expr)
    except OmlError as err:
        _print_diags([from_error(err)], args.format)
        return 1
    lines = ["%s : %s -> %s" % (args.expression.strip(), src, tgt)]
    lines += sorted("(%s, %s)" % (_endpoint_text(a), _endpoint_text(b)) for a, b in pairs)
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="omlcore", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, output=True):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--higher-order", action="store_true")
        p.add_argument("--map", action="append", metavar="URI=PATH", help="resolve an extends URI to a local file")
        if output:
            p.add_argument("-o", "--output")

    p = sub.add_parser("parse", help="syntax check a document and echo its canonical form")
    p.add_argument("file")
    common(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("check", help="run every consistency check")
    p.add_argument("files", nargs="+")
    p.add_argument("--ontology", help="bind collections without an ontology attribute")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--lenient", action="store_true")
    common(p, output=False)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("compile-dtd", help="compile an ontology into a domain-specific DTD")
    p.add_argument("ontology")
    common(p)
    p.set_defaults(func=cmd_compile_dtd)

    p = sub.add_parser("validate-dtd", help="validate a document against a DTD")
    p.add_argument("dtd")
    p.add_argument("xml")
    common(p, output=False)
    p.set_defaults(func=cmd_validate_dtd)

    p = sub.add_parser("to-specific", help="translate a generic collection to specific style")
    p.add_argument("ontology")
    p.add_argument("collection")
    common(p)
    p.set_defaults(func=cmd_to_specific)

    p = sub.add_parser("to-generic", help="translate a specific-style document to generic style")
    p.add_argument("ontology")
    p.add_argument("xml")
    common(p)
    p.set_defaults(func=cmd_to_generic)

    p = sub.add_parser("export-rdf", help="export a knowledge base as triples")
    p.add_argument("ontology")
    p.add_argument("collection", nargs="?")
    common(p)
    p.set_defaults(func=cmd_export_rdf)

    p = sub.add_parser("import-rdf", help="rebuild a knowledge base from triples")
    p.add_argument("triples")
    p.add_argument("--ontology-out")
    p.add_argument("--collection-out")
    common(p, output=False)
    p.set_defaults(func=cmd_import_rdf)

    p = sub.add_parser("export-xol", help="export a knowledge base as a frame-exchange module")
    p.add_argument("ontology")
    p.add_argument("collection", nargs="?")
    common(p)
    p.set_defaults(func=cmd_export_xol)

    p = sub.add_parser("import-xol", help="rebuild a knowledge base from a frame-exchange module")
    p.add_argument("xol")
    p.add_argument("--ontology-out")
    p.add_argument("--collection-out")
    common(p, output=False)
    p.set_defaults(func=cmd_import_xol)

    p = sub.add_parser("lint", help="suggest subtype axioms implied by extension inclusion")
    p.add_argument("ontology")
    p.add_argument("collection")
    common(p, output=False)
    p.set_defaults(func=cmd_lint)

    p = sub.add_parser("calc", help="evaluate a relation expression and print its extension")
    p.add_argument("ontology")
    p.add_argument("collection")
    p.add_argument("expression")
    common(p)
    p.set_defaults(func=cmd_calc)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as err:
        sys.stderr.write("error: %s\n" % err)
        return 2
    except OmlError as err:
        _print_diags([from_error(err)], getattr(args, "format", "text"))
        return 1


if __name__ == "__main__":
    sys.exit(main())
