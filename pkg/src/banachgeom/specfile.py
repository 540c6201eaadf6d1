"""Text formats for space and code specs.

Space spec: `kind:` one of facet|vertex|lp|sum_inf|sum_1|quotient, `dim:`
and `p:` scalars, `rows:`/`kernel:` blocks of whitespace-separated rational
vectors (`a/b` fractions allowed), `parts:` a list of nested specs opened
by `-`, `parent:` a nested spec. Code specs add `rule:
basis|ball-grid|custom` and an optional `vectors:` block.

Example::

    kind: quotient
    parent:
      kind: facet
      dim: 2
      rows:
        1 0
        0 1
        1 1
    kernel:
      1 1
"""

from __future__ import annotations

from fractions import Fraction

from .codes import SeminormCode
from .errors import SpecFileError
from .spaces import construct_space

__all__ = ["parse_space_text", "parse_code_text", "load_space", "load_code"]

_SCALARS = {"kind", "dim", "p", "rule"}
_ROWS = {"rows", "kernel", "vectors"}
_NESTED = {"parent"}


def _rational(tok):
    try:
        return float(Fraction(tok))
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecFileError(f"bad rational {tok!r}") from exc


class _Lines:
    def __init__(self, text):
        self.items = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            indent = len(line) - len(line.lstrip())
            self.items.append((indent, line.strip(), lineno))
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else None

    def next(self):
        item = self.peek()
        if item is None:
            raise SpecFileError("unexpected end of spec")
        self.pos += 1
        return item


def _parse_mapping(lines, indent):
    out = {}
    while True:
        item = lines.peek()
        if item is None or item[0] < indent:
            return out
        ind, text, lineno = item
        if ind != indent:
            raise SpecFileError(f"line {lineno}: inconsistent indentation")
        if ":" not in text:
            raise SpecFileError(f"line {lineno}: expected 'key: value', got {text!r}")
        lines.next()
        key, _, value = text.partition(":")
        key = key.strip()
        value = value.strip()
        if key in _SCALARS:
            if not value:
                raise SpecFileError(f"line {lineno}: {key} needs a value")
            out[key] = value
        elif key in _ROWS:
            if value:
                raise SpecFileError(f"line {lineno}: {key} takes an indented block")
            out[key] = _parse_rows(lines, indent)
        elif key == "parts":
            out[key] = _parse_parts(lines, indent)
        elif key in _NESTED:
            out[key] = _parse_mapping(lines, _child_indent(lines, indent, lineno))
        else:
            raise SpecFileError(f"line {lineno}: unknown key {key!r}")


def _child_indent(lines, indent, lineno):
    item = lines.peek()
    if item is None or item[0] <= indent:
        raise SpecFileError(f"line {lineno}: expected an indented block")
    return item[0]


def _parse_rows(lines, indent):
    rows = []
    row_indent = None
    while True:
        item = lines.peek()
        if item is None or item[0] <= indent:
            break
        ind, text, lineno = item
        if row_indent is None:
            row_indent = ind
        if ind != row_indent or ":" in text:
            break
        lines.next()
        rows.append([_rational(tok) for tok in text.split()])
    if not rows:
        raise SpecFileError("empty vector block")
    if len({len(r) for r in rows}) != 1:
        raise SpecFileError("ragged vector block")
    return rows


def _parse_parts(lines, indent):
    parts = []
    while True:
        item = lines.peek()
        if item is None or item[0] <= indent:
            break
        ind, text, lineno = item
        if not text.startswith("-"):
            raise SpecFileError(f"line {lineno}: list items start with '-'")
        lines.next()
        sub = {}
        rest = text[1:].strip()
        if rest:
            if ":" not in rest:
                raise SpecFileError(f"line {lineno}: expected 'key: value' after '-'")
            key, _, value = rest.partition(":")
            sub[key.strip()] = value.strip()
        nxt = lines.peek()
        if nxt is not None and nxt[0] > ind:
            sub.update(_parse_mapping(lines, nxt[0]))
        parts.append(sub)
    if not parts:
        raise SpecFileError("empty parts list")
    return parts


def _normalise(raw):
    kind = raw.get("kind")
    if kind is None:
        raise SpecFileError("spec needs a kind")
    spec = {"kind": kind}
    if kind in ("facet", "vertex"):
        if "rows" not in raw:
            raise SpecFileError(f"{kind} spec needs rows")
        spec["rows"] = raw["rows"]
        if "dim" in raw and int(raw["dim"]) != len(raw["rows"][0]):
            raise SpecFileError("declared dim does not match row width")
    elif kind == "lp":
        if "p" not in raw or "dim" not in raw:
            raise SpecFileError("lp spec needs p and dim")
        p = raw["p"]
        spec["p"] = float("inf") if str(p) in ("inf", "infinity") else float(Fraction(p))
        spec["dim"] = int(raw["dim"])
    elif kind in ("sum_inf", "sum_1"):
        if "parts" not in raw:
            raise SpecFileError(f"{kind} spec needs parts")
        spec["parts"] = [_normalise(p) for p in raw["parts"]]
    elif kind == "quotient":
        if "parent" not in raw or "kernel" not in raw:
            raise SpecFileError("quotient spec needs parent and kernel")
        spec["parent"] = _normalise(raw["parent"])
        spec["kernel"] = raw["kernel"]
    else:
        raise SpecFileError(f"unknown kind {kind!r}")
    return spec


def parse_space_text(text):
    """Parse a space spec document into a PresentedSpace."""
    lines = _Lines(text)
    item = lines.peek()
    if item is None:
        raise SpecFileError("empty spec")
    raw = _parse_mapping(lines, item[0])
    if lines.peek() is not None:
        raise SpecFileError("trailing content outside the top-level block")
    return construct_space(_normalise(raw))


def parse_code_text(text):
    """Parse a code spec: a space spec plus rule/vectors."""
    lines = _Lines(text)
    item = lines.peek()
    if item is None:
        raise SpecFileError("empty spec")
    raw = _parse_mapping(lines, item[0])
    rule = raw.pop("rule", "basis")
    vectors = raw.pop("vectors", None)
    if rule not in ("basis", "ball-grid", "custom"):
        raise SpecFileError(f"unknown rule {rule!r}")
    space = construct_space(_normalise(raw))
    return SeminormCode(space, rule=rule, vectors=vectors)


def load_space(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_space_text(fh.read())


def load_code(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_code_text(fh.read())
