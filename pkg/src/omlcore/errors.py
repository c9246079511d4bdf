"""Exception hierarchy shared across the package.

Every error carries a stable ``code`` (see README for the registry) and an
optional ``location`` triple ``(source, line, column)`` so the CLI can turn
raised errors into diagnostics uniformly.
"""

from __future__ import annotations


class OmlError(Exception):
    code = "OML000"

    def __init__(self, message: str, location: tuple[str, int, int] | None = None):
        super().__init__(message)
        self.message = message
        self.location = location


class ParseError(OmlError):
    """XML well-formedness failure (always has a location)."""

    code = "SYN001"


class GrammarError(OmlError):
    """Document is well-formed XML but violates a grammar rule [1]-[30]."""

    code = "GRM001"

    def __init__(self, rule: int, message: str, location=None):
        super().__init__("rule [%d]: %s" % (rule, message), location)
        self.rule = rule


class DuplicateTypeName(OmlError):
    code = "DUP002"


class DuplicateInstanceId(OmlError):
    code = "DUP001"


class UnresolvedTypeRef(OmlError):
    code = "REF001"


class UnresolvedInstanceRef(OmlError):
    code = "REF002"


class UnknownPrefix(OmlError):
    code = "REF004"


class AmbiguousName(OmlError):
    code = "REF005"


class KindMismatch(OmlError):
    """Entity-level and relation-level types may never be related."""

    code = "KND001"


class DuplicateFunctionValue(OmlError):
    code = "FUN001"


class NotComposable(OmlError):
    code = "CAL001"


class ImportCycle(OmlError):
    code = "IMP001"


class UnresolvableImport(OmlError):
    code = "IMP002"


class NameCollision(OmlError):
    code = "DTD001"


class AmbiguousClassification(OmlError):
    code = "STY001"


class MissingClassification(OmlError):
    code = "STY002"


class UnnamedInstance(OmlError):
    code = "STY003"


class UnknownTag(OmlError):
    code = "STY004"


class UnknownAttribute(OmlError):
    code = "STY005"


class HigherOrderUnsupported(OmlError):
    code = "RDF001"


class DataTypeUnsupported(OmlError):
    code = "RDF002"


class XolSyntaxError(OmlError):
    code = "XOL001"


class UnsupportedConstruct(OmlError):
    code = "XOL002"
