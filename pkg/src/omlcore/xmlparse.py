"""Minimal XML reader and escaping helpers used by every serializer here.

The supported subset is elements, attributes, character data, comments and
the five predefined entities.  CDATA sections, processing instructions,
DOCTYPE subsets and numeric character references are rejected; the documents
this package exchanges never contain them and refusing keeps the reader
small and its error positions exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError

_ENTITIES = {"lt": "<", "gt": ">", "amp": "&", "apos": "'", "quot": '"'}


def is_name(s: str) -> bool:
    """XML Name: letter/'_'/':' start, then NameChar (letters, digits, .-_:)."""
    if not s:
        return False
    c = s[0]
    if not (c.isalpha() or c in "_:"):
        return False
    return all(c.isalnum() or c in ".-_:" for c in s[1:])


def is_nmtoken(s: str) -> bool:
    return bool(s) and all(c.isalnum() or c in ".-_:" for c in s)


def escape_text(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def escape_attr(s: str) -> str:
    return escape_text(s).replace('"', "&quot;")


@dataclass
class Comment:
    text: str
    line: int = 0
    col: int = 0


@dataclass(eq=False)
class Element:
    name: str
    attrs: dict[str, str] = field(default_factory=dict)
    children: list = field(default_factory=list)  # Element | Comment | str
    line: int = 0
    col: int = 0

    def child_elements(self) -> list["Element"]:
        return [c for c in self.children if isinstance(c, Element)]

    def text(self) -> str:
        return "".join(c for c in self.children if isinstance(c, str))

    @property
    def pos(self):
        return (self.line, self.col)


class _Reader:
    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source
        self.i = 0
        self.line = 1
        self.col = 1

    def eof(self) -> bool:
        return self.i >= len(self.text)

    def peek(self, n: int = 1) -> str:
        return self.text[self.i : self.i + n]

    def startswith(self, s: str) -> bool:
        return self.text.startswith(s, self.i)

    def advance(self, n: int = 1) -> str:
        chunk = self.text[self.i : self.i + n]
        self.i += len(chunk)
        nl = chunk.count("\n")
        if nl:
            self.line += nl
            self.col = len(chunk) - chunk.rindex("\n")
        else:
            self.col += len(chunk)
        return chunk

    def fail(self, msg: str, line: int | None = None, col: int | None = None):
        raise ParseError(
            msg, (self.source, line if line is not None else self.line, col if col is not None else self.col)
        )

    def expect(self, s: str):
        if not self.startswith(s):
            self.fail("expected %r" % s)
        self.advance(len(s))

    def skip_ws(self):
        while not self.eof() and self.peek() in " \t\r\n":
            self.advance()


def _read_name(r: _Reader) -> str:
    start = r.i
    c = r.peek()
    if not c or not (c.isalpha() or c in "_:"):
        r.fail("expected a name")
    r.advance()
    while not r.eof():
        c = r.peek()
        if c.isalnum() or c in ".-_:":
            r.advance()
        else:
            break
    return r.text[start : r.i]


def _decode_entity(r: _Reader) -> str:
    line, col = r.line, r.col
    r.advance()  # '&'
    if r.peek() == "#":
        r.fail("numeric character references are not supported", line, col)
    start = r.i
    while not r.eof() and r.peek() != ";":
        if r.peek() in "<& \t\r\n":
            r.fail("unterminated entity reference", line, col)
        r.advance()
    if r.eof():
        r.fail("unterminated entity reference", line, col)
    name = r.text[start : r.i]
    r.advance()  # ';'
    if name not in _ENTITIES:
        r.fail("unknown entity &%s;" % name, line, col)
    return _ENTITIES[name]


def _read_attr_value(r: _Reader) -> str:
    quote = r.peek()
    if quote not in "\"'":
        r.fail("attribute value must be quoted")
    r.advance()
    out = []
    while True:
        if r.eof():
            r.fail("unterminated attribute value")
        c = r.peek()
        if c == quote:
            r.advance()
            return "".join(out)
        if c == "<":
            r.fail("'<' not allowed in attribute value")
        if c == "&":
            out.append(_decode_entity(r))
        else:
            out.append(r.advance())


def _read_comment(r: _Reader) -> Comment:
    line, col = r.line, r.col
    r.advance(4)  # '<!--'
    end = r.text.find("-->", r.i)
    if end < 0:
        r.fail("unterminated comment", line, col)
    text = r.text[r.i : end]
    r.advance(end - r.i + 3)
    return Comment(text, line, col)


def _read_text(r: _Reader) -> str:
    out = []
    while not r.eof() and r.peek() != "<":
        if r.peek() == "&":
            out.append(_decode_entity(r))
        else:
            out.append(r.advance())
    return "".join(out)


def _read_element(r: _Reader) -> Element:
    line, col = r.line, r.col
    r.advance()  # '<'
    name = _read_name(r)
    elem = Element(name, line=line, col=col)
    while True:
        r.skip_ws()
        if r.startswith("/>"):
            r.advance(2)
            return elem
        if r.peek() == ">":
            r.advance()
            break
        aline, acol = r.line, r.col
        attr = _read_name(r)
        r.skip_ws()
        r.expect("=")
        r.skip_ws()
        value = _read_attr_value(r)
        if attr in elem.attrs:
            r.fail("duplicate attribute %r" % attr, aline, acol)
        elem.attrs[attr] = value
    # content until matching close tag
    while True:
        if r.eof():
            r.fail("missing closing tag for <%s>" % name, line, col)
        if r.startswith("</"):
            cline, ccol = r.line, r.col
            r.advance(2)
            close = _read_name(r)
            r.skip_ws()
            r.expect(">")
            if close != name:
                r.fail("closing tag </%s> does not match <%s>" % (close, name), cline, ccol)
            return elem
        elem.children.append(_read_node(r))


def _read_node(r: _Reader):
    if r.peek() != "<":
        return _read_text(r)
    if r.startswith("<!--"):
        return _read_comment(r)
    if r.startswith("<!"):
        r.fail("declarations (DOCTYPE, CDATA) are not supported")
    if r.startswith("<?"):
        r.fail("processing instructions are not supported")
    if r.startswith("</"):
        r.fail("unexpected closing tag")
    return _read_element(r)


def parse_fragment(text: str, source: str = "<xml>") -> list:
    """Parse a sequence of top-level elements and comments."""
    r = _Reader(text, source)
    nodes = []
    while True:
        r.skip_ws()
        if r.eof():
            return nodes
        node = _read_node(r)
        if isinstance(node, str):
            if node.strip():
                r.fail("text is not allowed at the top level")
            continue
        nodes.append(node)


def parse_document(text: str, source: str = "<xml>") -> Element:
    """Parse a document with exactly one root element."""
    roots = [n for n in parse_fragment(text, source) if isinstance(n, Element)]
    if not roots:
        raise ParseError("no root element found", (source, 1, 1))
    if len(roots) > 1:
        raise ParseError(
            "more than one root element", (source, roots[1].line, roots[1].col)
        )
    return roots[0]
