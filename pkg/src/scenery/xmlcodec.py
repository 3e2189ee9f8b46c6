"""X3D XML encoding for the supported subset: parse, canonical serialize,
and semantic equality.

Parsing is strict: unsupported elements or fields, type-mismatched
attribute values, USE-before-DEF and unresolvable routes are all rejected
with diagnostics carrying a line/column into the input.  Comments and
processing instructions are dropped; PROFILE/version attributes are kept
as scene metadata only.

Serialization is canonical (see docs/xml-form.md): 2-space indent,
attributes in schema order with defaults omitted, floats rendered as the
shortest decimal that preserves the stored value.  serialize(parse(x)) is
a byte-level fixpoint and parse(serialize(s)) reproduces s exactly.
"""

from __future__ import annotations

import math
import struct
import xml.parsers.expat
from dataclasses import dataclass
from xml.sax.saxutils import escape, quoteattr

from .scene.schema import (
    Access,
    CHILD_LEGAL_KINDS,
    FieldType,
    GROUPING_KINDS,
    SchemaError,
    attribute_specs,
    build_node,
    container_field,
    field_spec,
    get_field,
    resolve_route_field,
    sfnode_specs,
)
from .scene.types import (
    ColorRGB,
    Node,
    NodeKind,
    Rotation,
    Route,
    SceneGraph,
    UseRef,
    Vec3,
    snap32,
)

XML_EXTENSION = ".x3d"
_DEFAULT_PROFILE = "Immersive"
_DEFAULT_VERSION = "3.3"


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    code: str
    message: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.code}: {self.message}"


class XmlParseError(ValueError):
    """Parse failure; carries every diagnostic collected before giving up."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        head = "; ".join(str(d) for d in self.diagnostics[:3])
        more = f" (+{len(self.diagnostics) - 3} more)" if len(self.diagnostics) > 3 else ""
        super().__init__(head + more)


# ---------------------------------------------------------------------------
# Float rendering: shortest decimal string that parses back to the stored
# value.  Scene fields are single precision except times and rotations.

def _f32(x: float) -> float:
    return struct.unpack("<f", struct.pack("<f", x))[0]


def _shortest(x: float, max_prec: int, same) -> str:
    candidates = []
    if x == math.floor(x) and abs(x) < 1e16:
        candidates.append("%d" % x)
    for prec in range(1, max_prec + 1):
        s = "%.*g" % (prec, x)
        if same(float(s), x):
            candidates.append(s)
            break
    else:
        candidates.append(repr(x))
    return min(candidates, key=len)


def format_float32(x: float) -> str:
    if x == 0.0:
        return "0"
    return _shortest(x, 9, lambda a, b: _f32(a) == _f32(b))


def format_float64(x: float) -> str:
    if x == 0.0:
        return "0"
    return _shortest(x, 17, lambda a, b: a == b)


def _fmt_mfstring(values) -> str:
    parts = []
    for v in values:
        parts.append('"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"')
    return " ".join(parts)


def _format_value(ftype: FieldType, value) -> str:
    F = FieldType
    if ftype is F.BOOL:
        return "true" if value else "false"
    if ftype is F.INT32:
        return str(value)
    if ftype is F.FLOAT:
        return format_float32(value)
    if ftype is F.TIME:
        return format_float64(value)
    if ftype is F.STRING:
        return value
    if ftype is F.VEC3:
        return " ".join(format_float32(c) for c in value.as_tuple())
    if ftype is F.ROTATION:
        return " ".join(format_float64(c) for c in value.as_tuple())
    if ftype is F.COLOR:
        return " ".join(format_float32(c) for c in value.as_tuple())
    if ftype is F.MF_INT32:
        return " ".join(str(v) for v in value)
    if ftype is F.MF_FLOAT:
        return " ".join(format_float32(v) for v in value)
    if ftype is F.MF_STRING:
        return _fmt_mfstring(value)
    if ftype is F.MF_VEC3:
        return " ".join(" ".join(format_float32(c) for c in v.as_tuple()) for v in value)
    if ftype is F.MF_ROTATION:
        return " ".join(" ".join(format_float64(c) for c in v.as_tuple()) for v in value)
    if ftype is F.MF_COLOR:
        return " ".join(" ".join(format_float32(c) for c in v.as_tuple()) for v in value)
    raise SchemaError(f"cannot format {ftype}")


# ---------------------------------------------------------------------------
# Attribute lexing: runs of whitespace and commas separate numeric tokens.

def _tokens(text: str):
    return text.replace(",", " ").split()


def _parse_floats(text: str, snap: bool):
    out = []
    for tok in _tokens(text):
        v = float(tok)  # ValueError propagates to the caller's diagnostic
        if not math.isfinite(v):
            raise ValueError(f"non-finite number {tok!r}")
        out.append(snap32(v) if snap else v)
    return out


def _parse_mfstring(text: str):
    values = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace() or ch == ",":
            i += 1
            continue
        if ch != '"':
            raise ValueError("MFString items must be double-quoted")
        i += 1
        buf = []
        while i < n:
            ch = text[i]
            if ch == "\\" and i + 1 < n and text[i + 1] in '"\\':
                buf.append(text[i + 1])
                i += 2
                continue
            if ch == '"':
                break
            buf.append(ch)
            i += 1
        else:
            raise ValueError("unterminated string in MFString")
        values.append("".join(buf))
        i += 1
    return values


def _parse_attr(ftype: FieldType, text: str):
    F = FieldType
    if ftype is F.BOOL:
        if text == "true":
            return True
        if text == "false":
            return False
        raise ValueError(f"expected 'true' or 'false', got {text!r}")
    if ftype is F.INT32:
        return int(text, 10)
    if ftype is F.FLOAT:
        vals = _parse_floats(text, snap=True)
        if len(vals) != 1:
            raise ValueError("expected a single number")
        return vals[0]
    if ftype is F.TIME:
        vals = _parse_floats(text, snap=False)
        if len(vals) != 1:
            raise ValueError("expected a single number")
        return vals[0]
    if ftype is F.STRING:
        return text
    if ftype is F.VEC3:
        vals = _parse_floats(text, snap=True)
        if len(vals) != 3:
            raise ValueError(f"expected 3 numbers, got {len(vals)}")
        return Vec3(*vals)
    if ftype is F.ROTATION:
        vals = _parse_floats(text, snap=False)
        if len(vals) != 4:
            raise ValueError(f"expected 4 numbers, got {len(vals)}")
        return Rotation(Vec3(*vals[:3]), vals[3])
    if ftype is F.COLOR:
        vals = _parse_floats(text, snap=True)
        if len(vals) != 3:
            raise ValueError(f"expected 3 numbers, got {len(vals)}")
        return ColorRGB(*vals)
    if ftype is F.MF_INT32:
        return tuple(int(t, 10) for t in _tokens(text))
    if ftype is F.MF_FLOAT:
        return tuple(_parse_floats(text, snap=True))
    if ftype is F.MF_STRING:
        return tuple(_parse_mfstring(text))
    if ftype is F.MF_VEC3:
        vals = _parse_floats(text, snap=True)
        if len(vals) % 3:
            raise ValueError(f"expected a multiple of 3 numbers, got {len(vals)}")
        return tuple(Vec3(*vals[i : i + 3]) for i in range(0, len(vals), 3))
    if ftype is F.MF_ROTATION:
        vals = _parse_floats(text, snap=False)
        if len(vals) % 4:
            raise ValueError(f"expected a multiple of 4 numbers, got {len(vals)}")
        return tuple(Rotation(Vec3(*vals[i : i + 3]), vals[i + 3]) for i in range(0, len(vals), 4))
    if ftype is F.MF_COLOR:
        vals = _parse_floats(text, snap=True)
        if len(vals) % 3:
            raise ValueError(f"expected a multiple of 3 numbers, got {len(vals)}")
        return tuple(ColorRGB(*vals[i : i + 3]) for i in range(0, len(vals), 3))
    raise SchemaError(f"cannot parse attribute of type {ftype}")


# ---------------------------------------------------------------------------
# Raw element tree with source positions, built directly on expat so every
# diagnostic can point into the input bytes.

class _RawElement:
    __slots__ = ("tag", "attrs", "children", "line", "column")

    def __init__(self, tag, attrs, line, column):
        self.tag = tag
        self.attrs = attrs
        self.children = []
        self.line = line
        self.column = column


def _build_raw_tree(data: bytes):
    parser = xml.parsers.expat.ParserCreate("UTF-8")
    root = _RawElement("", {}, 0, 0)
    stack = [root]

    def start(tag, attrs):
        elem = _RawElement(
            tag, attrs, parser.CurrentLineNumber, parser.CurrentColumnNumber
        )
        stack[-1].children.append(elem)
        stack.append(elem)

    def end(tag):
        stack.pop()

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    try:
        parser.Parse(data, True)
    except xml.parsers.expat.ExpatError as exc:
        raise XmlParseError(
            [ParseDiagnostic(exc.lineno, exc.offset, "XML_SYNTAX", str(exc))]
        ) from exc
    if len(root.children) != 1:
        raise XmlParseError(
            [ParseDiagnostic(1, 0, "XML_SYNTAX", "expected exactly one document element")]
        )
    return root.children[0]


class _Converter:
    def __init__(self):
        self.diagnostics: list[ParseDiagnostic] = []
        self.defs: dict[str, Node] = {}
        self.open_defs: set[str] = set()  # DEFs whose element is still open

    def error(self, elem, code, message):
        self.diagnostics.append(ParseDiagnostic(elem.line, elem.column, code, message))

    def convert(self, doc: _RawElement) -> SceneGraph:
        meta: dict[str, str] = {}
        scene_elem = None
        if doc.tag != "X3D":
            self.error(doc, "XML_STRUCTURE", f"document element is <{doc.tag}>, expected <X3D>")
        else:
            # default profile/version stay implicit so a generated scene and
            # its reparse compare equal
            if doc.attrs.get("profile", _DEFAULT_PROFILE) != _DEFAULT_PROFILE:
                meta["profile"] = doc.attrs["profile"]
            if doc.attrs.get("version", _DEFAULT_VERSION) != _DEFAULT_VERSION:
                meta["version"] = doc.attrs["version"]
            for child in doc.children:
                if child.tag == "head":
                    for m in child.children:
                        if m.tag == "meta":
                            name = m.attrs.get("name")
                            if name:
                                meta[name] = m.attrs.get("content", "")
                        elif m.tag == "component":
                            # preserved as metadata only
                            meta.setdefault("components", "")
                            parts = [meta["components"]] if meta["components"] else []
                            parts.append(
                                f"{m.attrs.get('name', '')}:{m.attrs.get('level', '')}"
                            )
                            meta["components"] = " ".join(parts)
                        else:
                            self.error(m, "XML_STRUCTURE", f"unexpected <{m.tag}> in <head>")
                elif child.tag == "Scene":
                    if scene_elem is not None:
                        self.error(child, "XML_STRUCTURE", "multiple <Scene> elements")
                    scene_elem = child
                else:
                    self.error(child, "XML_STRUCTURE", f"unexpected <{child.tag}> under <X3D>")
        if scene_elem is None:
            if not self.diagnostics:
                self.error(doc, "XML_STRUCTURE", "missing <Scene> element")
            raise XmlParseError(self.diagnostics)

        roots: list = []
        routes: list[Route] = []
        for child in scene_elem.children:
            if child.tag == "ROUTE":
                route = self._convert_route(child)
                if route is not None:
                    routes.append(route)
                continue
            node = self._convert_node(child, container_ok=None)
            if node is not None:
                roots.append(node)

        if self.diagnostics:
            raise XmlParseError(self.diagnostics)
        return SceneGraph(roots=tuple(roots), routes=tuple(routes), meta=meta)

    def _convert_route(self, elem):
        missing = [a for a in ("fromNode", "fromField", "toNode", "toField") if a not in elem.attrs]
        if missing:
            self.error(elem, "ROUTE_ATTR", f"ROUTE missing {', '.join(missing)}")
            return None
        extra = set(elem.attrs) - {"fromNode", "fromField", "toNode", "toField"}
        if extra:
            self.error(elem, "ROUTE_ATTR", f"ROUTE has unknown attributes {sorted(extra)}")
        route = Route(
            elem.attrs["fromNode"],
            elem.attrs["fromField"],
            elem.attrs["toNode"],
            elem.attrs["toField"],
        )
        src = self.defs.get(route.from_node)
        dst = self.defs.get(route.to_node)
        if src is None:
            self.error(elem, "ROUTE_ENDPOINT", f"fromNode '{route.from_node}' is not DEF'd")
        if dst is None:
            self.error(elem, "ROUTE_ENDPOINT", f"toNode '{route.to_node}' is not DEF'd")
        if src is None or dst is None:
            return None
        out = resolve_route_field(src.kind, route.from_field, "out")
        into = resolve_route_field(dst.kind, route.to_field, "in")
        if out is None:
            self.error(elem, "ROUTE_FIELD", f"{src.kind.value} has no output '{route.from_field}'")
        if into is None:
            self.error(elem, "ROUTE_FIELD", f"{dst.kind.value} has no input '{route.to_field}'")
        if out is not None and into is not None and out[1] != into[1]:
            self.error(elem, "ROUTE_TYPE", f"event types differ: {out[1]} -> {into[1]}")
        return route

    def _convert_node(self, elem, container_ok):
        """Convert one element; returns Node/UseRef or None after an error."""
        try:
            kind = NodeKind(elem.tag)
        except ValueError:
            self.error(elem, "UNSUPPORTED_ELEMENT", f"unsupported element <{elem.tag}>")
            return None

        if "USE" in elem.attrs:
            name = elem.attrs["USE"]
            extra = set(elem.attrs) - {"USE", "containerField"}
            if extra:
                self.error(elem, "USE_WITH_FIELDS", f"USE node carries attributes {sorted(extra)}")
            if elem.children:
                self.error(elem, "USE_WITH_FIELDS", "USE node cannot have children")
            target = self.defs.get(name)
            if target is None:
                self.error(elem, "USE_FORWARD", f"USE '{name}' precedes or lacks its DEF")
                return None
            if name in self.open_defs:
                self.error(elem, "USE_CYCLE", f"USE '{name}' inside its own DEF subtree")
                return None
            if target.kind is not kind:
                self.error(
                    elem,
                    "USE_KIND",
                    f"USE '{name}' is a {target.kind.value}, written as <{elem.tag}>",
                )
            return UseRef(name)

        def_name = elem.attrs.get("DEF")
        if def_name is not None:
            if def_name in self.defs:
                self.error(elem, "DUP_DEF", f"duplicate DEF '{def_name}'")
                def_name = None

        fields: dict = {}
        for attr, text in elem.attrs.items():
            if attr in ("DEF", "containerField"):
                continue
            spec = field_spec(kind, attr)
            if spec is None or spec.access not in (Access.INIT, Access.IN_OUT) or spec.ftype in (
                FieldType.SFNODE,
                FieldType.MFNODE,
            ):
                self.error(elem, "UNSUPPORTED_FIELD", f"{kind.value} has no attribute '{attr}'")
                continue
            try:
                value = _parse_attr(spec.ftype, text)
            except ValueError as exc:
                self.error(elem, "FIELD_VALUE", f"{kind.value}.{attr}: {exc}")
                continue
            fields[attr] = value

        node = Node(kind=kind, def_name=def_name, fields={}, children=())
        if def_name is not None:
            self.defs[def_name] = node  # registered before children: DEF precedes USE
            self.open_defs.add(def_name)

        children: list = []
        for child_elem in elem.children:
            if child_elem.tag == "ROUTE":
                self.error(child_elem, "XML_STRUCTURE", "ROUTE must be a direct child of <Scene>")
                continue
            child = self._convert_node(child_elem, container_ok=kind)
            if child is None:
                continue
            child_kind = (
                self.defs[child.name].kind if isinstance(child, UseRef) else child.kind
            )
            target_field = child_elem.attrs.get("containerField") or container_field(child_kind)
            if target_field == "children":
                if kind not in GROUPING_KINDS:
                    self.error(
                        child_elem,
                        "BAD_CHILD",
                        f"<{child_elem.tag}> cannot be a child of <{elem.tag}>",
                    )
                    continue
                if child_kind not in CHILD_LEGAL_KINDS:
                    self.error(
                        child_elem,
                        "BAD_CHILD",
                        f"{child_kind.value} is not allowed in a children list",
                    )
                    continue
                children.append(child)
                continue
            spec = field_spec(kind, target_field)
            if spec is None or spec.ftype is not FieldType.SFNODE:
                self.error(
                    child_elem,
                    "BAD_CHILD",
                    f"<{elem.tag}> has no node field '{target_field}' for <{child_elem.tag}>",
                )
                continue
            if spec.child_kinds and child_kind not in spec.child_kinds:
                self.error(
                    child_elem,
                    "BAD_CHILD",
                    f"{kind.value}.{target_field} does not accept {child_kind.value}",
                )
                continue
            if target_field in fields:
                self.error(
                    child_elem, "BAD_CHILD", f"duplicate value for {kind.value}.{target_field}"
                )
                continue
            fields[target_field] = child

        if def_name is not None:
            self.open_defs.discard(def_name)
        try:
            built = build_node(kind, def_name=def_name, children=children, **fields)
        except (SchemaError, ValueError) as exc:
            self.error(elem, "FIELD_VALUE", str(exc))
            return None
        # Fix up the pre-registered DEF entry to the built node.
        node.fields = built.fields
        node.children = built.children
        return node


def parse_xml(data: bytes) -> SceneGraph:
    """Parse X3D XML bytes into a SceneGraph.

    Raises XmlParseError carrying one ParseDiagnostic per problem found.
    """
    if isinstance(data, str):
        data = data.encode("utf-8")
    try:
        data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise XmlParseError(
            [ParseDiagnostic(1, 0, "ENCODING", f"input is not UTF-8: {exc}")]
        ) from exc
    raw = _build_raw_tree(data)
    return _Converter().convert(raw)


# ---------------------------------------------------------------------------
# Canonical serialization.

def _attr_string(node: Node) -> str:
    parts = []
    if node.def_name is not None:
        parts.append(f"DEF={quoteattr(node.def_name)}")
    for spec in attribute_specs(node.kind):
        if spec.name in node.fields:
            text = _format_value(spec.ftype, node.fields[spec.name])
            parts.append(f"{spec.name}={quoteattr(text)}")
    return (" " + " ".join(parts)) if parts else ""


def _emit(item, kind_of_use, out, indent, container=None):
    pad = "  " * indent
    cf = f" containerField={quoteattr(container)}" if container else ""
    if isinstance(item, UseRef):
        kind = kind_of_use[item.name]
        out.append(f"{pad}<{kind.value} USE={quoteattr(item.name)}{cf}/>")
        return
    node: Node = item
    attrs = _attr_string(node)
    nested = [(s.name, node.fields[s.name]) for s in sfnode_specs(node.kind) if s.name in node.fields]
    if not nested and not node.children:
        out.append(f"{pad}<{node.kind.value}{attrs}{cf}/>")
        return
    out.append(f"{pad}<{node.kind.value}{attrs}{cf}>")
    for fname, fval in nested:
        child_kind = kind_of_use[fval.name] if isinstance(fval, UseRef) else fval.kind
        default_cf = container_field(child_kind)
        _emit(fval, kind_of_use, out, indent + 1, container=None if default_cf == fname else fname)
    for child in node.children:
        _emit(child, kind_of_use, out, indent + 1)
    out.append(f"{pad}</{node.kind.value}>")


def serialize_xml(scene: SceneGraph) -> bytes:
    """Canonical X3D XML bytes for a valid scene."""
    kind_of_use: dict[str, NodeKind] = {}
    from .scene.types import walk_scene

    for item, _ in walk_scene(scene):
        if isinstance(item, Node) and item.def_name:
            kind_of_use.setdefault(item.def_name, item.kind)

    meta = dict(scene.meta)
    profile = meta.pop("profile", _DEFAULT_PROFILE)
    version = meta.pop("version", _DEFAULT_VERSION)
    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    out.append(f"<X3D profile={quoteattr(profile)} version={quoteattr(version)}>")
    if meta:
        out.append("  <head>")
        for name in sorted(meta):
            out.append(
                f"    <meta name={quoteattr(name)} content={quoteattr(meta[name])}/>"
            )
        out.append("  </head>")
    out.append("  <Scene>")
    for root in scene.roots:
        _emit(root, kind_of_use, out, 2)
    for route in scene.routes:
        out.append(
            "    <ROUTE fromNode={} fromField={} toNode={} toField={}/>".format(
                quoteattr(route.from_node),
                quoteattr(route.from_field),
                quoteattr(route.to_node),
                quoteattr(route.to_field),
            )
        )
    out.append("  </Scene>")
    out.append("</X3D>")
    out.append("")
    return "\n".join(out).encode("utf-8")


# ---------------------------------------------------------------------------
# Semantic equality.

def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-9)


def _values_equal(ftype: FieldType, a, b) -> bool:
    F = FieldType
    if ftype in (F.FLOAT, F.TIME):
        return _close(a, b)
    if ftype is F.VEC3 or ftype is F.COLOR:
        return all(_close(x, y) for x, y in zip(a.as_tuple(), b.as_tuple()))
    if ftype is F.ROTATION:
        return all(_close(x, y) for x, y in zip(a.as_tuple(), b.as_tuple()))
    if ftype in (F.MF_FLOAT,):
        return len(a) == len(b) and all(_close(x, y) for x, y in zip(a, b))
    if ftype in (F.MF_VEC3, F.MF_ROTATION, F.MF_COLOR):
        return len(a) == len(b) and all(
            all(_close(x, y) for x, y in zip(u.as_tuple(), v.as_tuple()))
            for u, v in zip(a, b)
        )
    return a == b


def _nodes_equal(a, b) -> bool:
    if isinstance(a, UseRef) or isinstance(b, UseRef):
        return isinstance(a, UseRef) and isinstance(b, UseRef) and a.name == b.name
    if a.kind is not b.kind or a.def_name != b.def_name:
        return False
    if len(a.children) != len(b.children):
        return False
    for spec in attribute_specs(a.kind):
        if not _values_equal(spec.ftype, get_field(a, spec.name), get_field(b, spec.name)):
            return False
    for spec in sfnode_specs(a.kind):
        av = a.fields.get(spec.name)
        bv = b.fields.get(spec.name)
        if (av is None) != (bv is None):
            return False
        if av is not None and not _nodes_equal(av, bv):
            return False
    return all(_nodes_equal(ac, bc) for ac, bc in zip(a.children, b.children))


def semantic_equal(a: SceneGraph, b: SceneGraph) -> bool:
    """Tree isomorphism with tolerant reals and exact DEF/USE and routes.

    Fields absent on one side compare against the schema default, so an
    explicitly-default field equals an omitted one.
    """
    if a.meta != b.meta:
        return False
    if len(a.roots) != len(b.roots) or a.routes != b.routes:
        return False
    return all(_nodes_equal(x, y) for x, y in zip(a.roots, b.roots))
