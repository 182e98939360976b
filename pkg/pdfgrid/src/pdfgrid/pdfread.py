"""Minimal PDF reader for digitally generated documents.

Parses the object structure, decodes Flate/ASCII85 content streams, and
interprets the subset of the content language needed for layout analysis:
graphics-state and text matrices, text-showing operators, and straight-line
path construction.  The output per page is a list of positioned text runs
and a list of ruled line segments in device coordinates.

Scanned (image-only) PDFs and embedded font encodings beyond WinAnsi are out
of scope; generator output (reportlab and similar) is the target.
"""

from __future__ import annotations

import base64
import re
import zlib
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple


class PdfError(Exception):
    """The bytes are not a readable PDF."""


class NoContentError(Exception):
    """Structurally valid PDF without any extractable content."""


Matrix = Tuple[float, float, float, float, float, float]

IDENTITY: Matrix = (1, 0, 0, 1, 0, 0)


def _compose(m: Matrix, n: Matrix) -> Matrix:
    """Matrix product m x n (PDF row-vector convention)."""
    a1, b1, c1, d1, e1, f1 = m
    a2, b2, c2, d2, e2, f2 = n
    return (
        a1 * a2 + b1 * c2,
        a1 * b2 + b1 * d2,
        c1 * a2 + d1 * c2,
        c1 * b2 + d1 * d2,
        e1 * a2 + f1 * c2 + e2,
        e1 * b2 + f1 * d2 + f2,
    )


def _apply(m: Matrix, x: float, y: float) -> Tuple[float, float]:
    a, b, c, d, e, f = m
    return (a * x + c * y + e, b * x + d * y + f)


@dataclass
class TextRun:
    x: float
    y: float
    size: float
    text: str


@dataclass
class Segment:
    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def horizontal(self) -> bool:
        return abs(self.y1 - self.y0) < 0.5 and abs(self.x1 - self.x0) >= 0.5

    @property
    def vertical(self) -> bool:
        return abs(self.x1 - self.x0) < 0.5 and abs(self.y1 - self.y0) >= 0.5


@dataclass
class PageContent:
    number: int
    width: float
    height: float
    runs: List[TextRun] = field(default_factory=list)
    segments: List[Segment] = field(default_factory=list)


# -- object-level parsing -----------------------------------------------------

_OBJ_RE = re.compile(rb"(\d+)\s+(\d+)\s+obj\b")
_WS = b"\x00\t\n\x0c\r "


class _Objects:
    def __init__(self, data: bytes):
        self.data = data
        self.raw: Dict[int, Tuple[dict, Optional[bytes]]] = {}
        for m in _OBJ_RE.finditer(data):
            num = int(m.group(1))
            end = data.find(b"endobj", m.end())
            if end < 0:
                continue
            body = data[m.end() : end]
            value, pos = _parse_value(body.decode("latin-1"), 0)
            stream = None
            stream_at = body.find(b"stream")
            if stream_at >= 0 and isinstance(value, dict):
                start = stream_at + len(b"stream")
                if body[start : start + 2] == b"\r\n":
                    start += 2
                elif body[start : start + 1] == b"\n":
                    start += 1
                stream_end = body.rfind(b"endstream")
                stream = body[start:stream_end]
            if isinstance(value, dict):
                self.raw[num] = (value, stream)

    def resolve(self, value):
        while isinstance(value, tuple) and len(value) == 2 and value[0] == "ref":
            entry = self.raw.get(value[1])
            if entry is None:
                return None
            value = entry[0] if entry[1] is None else value
            if isinstance(value, tuple) and value[0] == "ref":
                return entry[0]
        return value

    def dictionary(self, num: int) -> Optional[dict]:
        entry = self.raw.get(num)
        return entry[0] if entry else None

    def stream(self, num: int) -> Optional[bytes]:
        entry = self.raw.get(num)
        if entry is None or entry[1] is None:
            return None
        return _decode_stream(entry[0], entry[1])


def _decode_stream(info: dict, raw: bytes) -> bytes:
    filters = info.get("Filter")
    if filters is None:
        return raw.rstrip(b"\r\n")
    if not isinstance(filters, list):
        filters = [filters]
    data = raw
    for name in filters:
        if name == "ASCII85Decode":
            data = base64.a85decode(data.strip(_WS), adobe=True)
        elif name == "FlateDecode":
            try:
                data = zlib.decompress(data)
            except zlib.error as exc:
                raise PdfError(f"broken Flate stream: {exc}") from exc
        else:
            raise PdfError(f"unsupported stream filter {name}")
    return data


# -- PDF value grammar ----------------------------------------------------------

_NUMBER_RE = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)")
_NAME_RE = re.compile(r"/([^\s/<>\[\]()]*)")
_REF_RE = re.compile(r"(\d+)\s+(\d+)\s+R\b")


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text):
        if text[pos] in "\x00\t\n\x0c\r ":
            pos += 1
        elif text[pos] == "%":
            eol = text.find("\n", pos)
            pos = len(text) if eol < 0 else eol + 1
        else:
            break
    return pos


def _parse_value(text: str, pos: int):
    pos = _skip_ws(text, pos)
    if pos >= len(text):
        return None, pos
    ch = text[pos]
    if text.startswith("<<", pos):
        pos += 2
        out = {}
        while True:
            pos = _skip_ws(text, pos)
            if text.startswith(">>", pos):
                return out, pos + 2
            name = _NAME_RE.match(text, pos)
            if name is None:
                raise PdfError("dictionary key expected")
            key = name.group(1)
            value, pos = _parse_value(text, name.end())
            out[key] = value
    if ch == "[":
        pos += 1
        items = []
        while True:
            pos = _skip_ws(text, pos)
            if pos < len(text) and text[pos] == "]":
                return items, pos + 1
            value, pos = _parse_value(text, pos)
            items.append(value)
    if ch == "/":
        m = _NAME_RE.match(text, pos)
        return m.group(1), m.end()
    if ch == "(":
        literal, pos = _parse_string(text, pos)
        return ("str", literal), pos
    if ch == "<":
        end = text.find(">", pos)
        if end < 0:
            raise PdfError("unterminated hex string")
        hexdigits = re.sub(r"\s", "", text[pos + 1 : end])
        if len(hexdigits) % 2:
            hexdigits += "0"
        return ("str", bytes.fromhex(hexdigits).decode("cp1252", "replace")), end + 1
    ref = _REF_RE.match(text, pos)
    if ref is not None:
        return ("ref", int(ref.group(1))), ref.end()
    number = _NUMBER_RE.match(text, pos)
    if number is not None:
        literal = number.group(0)
        return (float(literal) if "." in literal else int(literal)), number.end()
    word = re.match(r"[A-Za-z]+", text[pos:])
    if word is not None:
        token = word.group(0)
        if token in ("true", "false", "null"):
            return {"true": True, "false": False, "null": None}[token], pos + len(token)
        return ("op", token), pos + len(token)
    raise PdfError(f"unparseable value near {text[pos:pos+20]!r}")


_STRING_ESCAPES = {
    "n": "\n", "r": "\r", "t": "\t", "b": "\b", "f": "\f",
    "(": "(", ")": ")", "\\": "\\",
}


def _parse_string(text: str, pos: int) -> Tuple[str, int]:
    assert text[pos] == "("
    pos += 1
    depth = 1
    out = []
    while pos < len(text):
        ch = text[pos]
        if ch == "\\":
            nxt = text[pos + 1] if pos + 1 < len(text) else ""
            if nxt in _STRING_ESCAPES:
                out.append(_STRING_ESCAPES[nxt])
                pos += 2
            elif nxt.isdigit():
                digits = re.match(r"[0-7]{1,3}", text[pos + 1 :]).group(0)
                out.append(bytes([int(digits, 8)]).decode("cp1252", "replace"))
                pos += 1 + len(digits)
            elif nxt in "\r\n":
                pos += 2
                if nxt == "\r" and pos < len(text) and text[pos] == "\n":
                    pos += 1
            else:
                out.append(nxt)
                pos += 2
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return "".join(out), pos + 1
        out.append(ch)
        pos += 1
    raise PdfError("unterminated string")


# -- content interpreter ---------------------------------------------------------

_AVERAGE_GLYPH_WIDTH = 0.5  # fraction of the font size; anchor-level accuracy


class _Interpreter:
    def __init__(self, page: PageContent):
        self.page = page
        self.ctm: Matrix = IDENTITY
        self.stack: List[Matrix] = []
        self.text_matrix: Matrix = IDENTITY
        self.line_matrix: Matrix = IDENTITY
        self.size = 12.0
        self.leading = 0.0
        self.path: List[Tuple[float, float, float, float]] = []
        self.point: Optional[Tuple[float, float]] = None

    def run(self, tokens: List) -> None:
        operands: List = []
        for token in tokens:
            if isinstance(token, tuple) and token and token[0] == "op":
                self._execute(token[1], operands)
                operands = []
            else:
                operands.append(token)

    # operators ---------------------------------------------------------------

    def _execute(self, op: str, args: List) -> None:
        handler = getattr(self, f"_op_{op.replace('*', '_star')}", None)
        if handler is not None:
            try:
                handler(args)
            except (TypeError, ValueError, IndexError):
                pass  # lenient: skip malformed operator uses

    def _op_q(self, args):
        self.stack.append(self.ctm)

    def _op_Q(self, args):
        if self.stack:
            self.ctm = self.stack.pop()

    def _op_cm(self, args):
        self.ctm = _compose(tuple(float(v) for v in args[-6:]), self.ctm)

    def _op_BT(self, args):
        self.text_matrix = IDENTITY
        self.line_matrix = IDENTITY

    def _op_Tf(self, args):
        self.size = float(args[-1])

    def _op_TL(self, args):
        self.leading = float(args[-1])

    def _op_Td(self, args):
        tx, ty = float(args[-2]), float(args[-1])
        self.line_matrix = _compose((1, 0, 0, 1, tx, ty), self.line_matrix)
        self.text_matrix = self.line_matrix

    def _op_TD(self, args):
        self.leading = -float(args[-1])
        self._op_Td(args)

    def _op_Tm(self, args):
        self.line_matrix = tuple(float(v) for v in args[-6:])
        self.text_matrix = self.line_matrix

    def _op_T_star(self, args):
        self._op_Td([0, -self.leading])

    def _show(self, text: str) -> None:
        if text:
            device = _compose(self.text_matrix, self.ctm)
            x, y = _apply(device, 0, 0)
            self.page.runs.append(TextRun(x, y, self.size, text))
        advance = len(text) * self.size * _AVERAGE_GLYPH_WIDTH
        self.text_matrix = _compose((1, 0, 0, 1, advance, 0), self.text_matrix)

    def _op_Tj(self, args):
        if args and isinstance(args[-1], tuple) and args[-1][0] == "str":
            self._show(args[-1][1])

    def _op_TJ(self, args):
        if not args or not isinstance(args[-1], list):
            return
        for item in args[-1]:
            if isinstance(item, tuple) and item and item[0] == "str":
                self._show(item[1])
            elif isinstance(item, (int, float)):
                advance = -item / 1000.0 * self.size
                self.text_matrix = _compose(
                    (1, 0, 0, 1, advance, 0), self.text_matrix
                )

    def _op_quote(self, args):  # unused name; ' handled in tokenizer mapping
        pass

    def _op_m(self, args):
        self.point = (float(args[-2]), float(args[-1]))

    def _op_l(self, args):
        target = (float(args[-2]), float(args[-1]))
        if self.point is not None:
            self.path.append((*self.point, *target))
        self.point = target

    def _op_re(self, args):
        x, y, w, h = (float(v) for v in args[-4:])
        corners = [(x, y), (x + w, y), (x + w, y + h), (x, y + h)]
        for start, end in zip(corners, corners[1:] + corners[:1]):
            self.path.append((*start, *end))
        self.point = (x, y)

    def _op_c(self, args):
        self.point = (float(args[-2]), float(args[-1]))

    _op_v = _op_y = _op_c

    def _paint(self, args):
        for x0, y0, x1, y1 in self.path:
            dx0, dy0 = _apply(self.ctm, x0, y0)
            dx1, dy1 = _apply(self.ctm, x1, y1)
            self.page.segments.append(Segment(dx0, dy0, dx1, dy1))
        self.path = []
        self.point = None

    _op_S = _op_s = _op_f = _op_F = _op_B = _op_b = _paint
    _op_f_star = _op_B_star = _op_b_star = _paint

    def _op_n(self, args):
        self.path = []
        self.point = None


def _tokenize_content(data: bytes) -> List:
    text = data.decode("latin-1")
    tokens: List = []
    pos = 0
    length = len(text)
    while pos < length:
        pos = _skip_ws(text, pos)
        if pos >= length:
            break
        ch = text[pos]
        if ch == "(":
            literal, pos = _parse_string(text, pos)
            tokens.append(("str", literal))
        elif text.startswith("<<", pos):
            value, pos = _parse_value(text, pos)
            tokens.append(value)
        elif ch == "<":
            value, pos = _parse_value(text, pos)
            tokens.append(value)
        elif ch == "[":
            value, pos = _parse_value(text, pos)
            tokens.append(value)
        elif ch == "/":
            m = _NAME_RE.match(text, pos)
            tokens.append(m.group(1))
            pos = m.end()
        elif ch == "'":
            tokens.append(("op", "T_star_show"))
            pos += 1
        elif ch == '"':
            tokens.append(("op", "T_star_show"))
            pos += 1
        else:
            number = _NUMBER_RE.match(text, pos)
            if number is not None and (ch.isdigit() or ch in "+-."):
                literal = number.group(0)
                tokens.append(float(literal) if "." in literal else int(literal))
                pos = number.end()
                continue
            word = re.match(r"[A-Za-z][A-Za-z0-9*]*", text[pos:])
            if word is not None:
                tokens.append(("op", word.group(0)))
                pos += len(word.group(0))
            else:
                pos += 1  # stray byte: skip
    return tokens


def _interpret(tokens: List, page: PageContent) -> None:
    # expand ' and " into T* followed by Tj on the pending string operand
    interpreter = _Interpreter(page)
    expanded: List = []
    pending: List = []
    for token in tokens:
        if isinstance(token, tuple) and token[:1] == ("op",) and token[1] == "T_star_show":
            strings = [t for t in pending if isinstance(t, tuple) and t[0] == "str"]
            expanded.append(("op", "T*"))
            if strings:
                expanded.append(strings[-1])
            expanded.append(("op", "Tj"))
            pending = []
            continue
        expanded.append(token)
        if isinstance(token, tuple) and token[:1] == ("op",):
            pending = []
        else:
            pending.append(token)
    interpreter.run(expanded)


# -- document assembly -------------------------------------------------------------


def read_pdf(data: bytes) -> List[PageContent]:
    if not data.startswith(b"%PDF-"):
        raise PdfError("missing %PDF header")
    objects = _Objects(data)
    if not objects.raw:
        raise PdfError("no objects found")

    catalog = None
    for num, (info, _) in objects.raw.items():
        if info.get("Type") == "Catalog":
            catalog = info
            break
    page_numbers: List[int] = []

    def walk(ref):
        node = objects.resolve(ref)
        target = ref[1] if isinstance(ref, tuple) else None
        if not isinstance(node, dict):
            return
        if node.get("Type") == "Pages":
            for kid in node.get("Kids", []):
                walk(kid)
        elif node.get("Type") == "Page" and target is not None:
            page_numbers.append(target)

    if catalog is not None and "Pages" in catalog:
        walk(catalog["Pages"])
    if not page_numbers:  # fall back to declaration order
        page_numbers = [
            num for num, (info, _) in sorted(objects.raw.items())
            if info.get("Type") == "Page"
        ]

    pages: List[PageContent] = []
    for index, num in enumerate(page_numbers, start=1):
        info = objects.dictionary(num)
        box = info.get("MediaBox") or [0, 0, 612, 792]
        if isinstance(box, tuple) and box[0] == "ref":
            box = objects.resolve(box) or [0, 0, 612, 792]
        page = PageContent(index, float(box[2]) - float(box[0]),
                           float(box[3]) - float(box[1]))
        contents = info.get("Contents")
        refs = contents if isinstance(contents, list) else [contents]
        blob = b""
        for ref in refs:
            if isinstance(ref, tuple) and ref[0] == "ref":
                chunk = objects.stream(ref[1])
                if chunk:
                    blob += chunk + b"\n"
        _interpret(_tokenize_content(blob), page)
        pages.append(page)
    return pages
