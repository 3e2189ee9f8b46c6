"""S3DB1: compact self-describing binary encoding for scene graphs.

Layout (full bit layout in docs/binary-format.md):

    header   magic "S3DB" | u8 version | u8 flags | u32 body length | u32 CRC-32
    body     string table | node-kind table | meta | preorder node records | routes

Flag bit 0 marks a body passed through a raw DEFLATE (RFC 1951) stage; the
CRC (zlib CRC-32) covers the body exactly as stored.  Integers are LEB128
varints (zigzag for signed), coordinate lists are contiguous 32-bit floats,
times and rotations are 64-bit (rotation axes are renormalized on
construction, which has no single-precision fixpoint).  Decoding needs no
options: the stream describes itself.

This is deliberately not the standardized Fast Infoset `.x3db` encoding;
streams starting with "X3DB" are rejected as bad magic.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

from .scene.schema import (
    Access,
    FieldType,
    NODE_SCHEMAS,
    SchemaError,
    build_node,
    field_specs,
    resolve_route_field,
)
from .scene.types import Node, NodeKind, Route, SceneGraph, UseRef

BINARY_EXTENSION = ".s3db"
MAGIC = b"S3DB"
VERSION = 1
FLAG_COMPRESSED = 0x01

_MAX_DEPTH = 256
_MAX_BODY = 1 << 28  # 256 MiB decompression cap


@dataclass(frozen=True)
class EncodeOptions:
    compress_payload: bool = True
    string_table_dedup: bool = True


class BinaryDecodeError(ValueError):
    """Base for every typed decode failure."""


class BadMagicError(BinaryDecodeError):
    pass


class UnsupportedVersionError(BinaryDecodeError):
    pass


class TruncatedError(BinaryDecodeError):
    pass


class ChecksumError(BinaryDecodeError):
    pass


class FormatError(BinaryDecodeError):
    """Structurally invalid body: bad index, unknown token, schema breach."""


def _zigzag(n: int) -> int:
    return (n << 1) ^ (n >> 63) if n < 0 else n << 1


def _unzigzag(n: int) -> int:
    return (n >> 1) ^ -(n & 1)


class _Writer:
    def __init__(self, dedup: bool):
        self.parts: list[bytes] = []
        self.strings: list[str] = []
        self._string_ids: dict[str, int] = {}
        self.dedup = dedup
        self.kinds: list[str] = []
        self._kind_ids: dict[NodeKind, int] = {}

    def intern(self, s: str) -> int:
        if self.dedup:
            idx = self._string_ids.get(s)
            if idx is not None:
                return idx
        idx = len(self.strings)
        self.strings.append(s)
        if self.dedup:
            self._string_ids[s] = idx
        return idx

    def kind_token(self, kind: NodeKind) -> int:
        idx = self._kind_ids.get(kind)
        if idx is None:
            idx = len(self.kinds)
            self.kinds.append(kind.value)
            self._kind_ids[kind] = idx
            self.intern(kind.value)
        return idx

    def varint(self, n: int):
        out = bytearray()
        while True:
            b = n & 0x7F
            n >>= 7
            if n:
                out.append(b | 0x80)
            else:
                out.append(b)
                break
        self.parts.append(bytes(out))

    def raw(self, b: bytes):
        self.parts.append(b)

    def take(self) -> bytes:
        data = b"".join(self.parts)
        self.parts = []
        return data


def _write_value(w: _Writer, ftype: FieldType, value):
    F = FieldType
    if ftype is F.BOOL:
        w.raw(b"\x01" if value else b"\x00")
    elif ftype is F.INT32:
        w.varint(_zigzag(value))
    elif ftype is F.FLOAT:
        w.raw(struct.pack("<f", value))
    elif ftype is F.TIME:
        w.raw(struct.pack("<d", value))
    elif ftype is F.STRING:
        w.varint(w.intern(value))
    elif ftype is F.VEC3:
        w.raw(struct.pack("<3f", *value.as_tuple()))
    elif ftype is F.ROTATION:
        w.raw(struct.pack("<4d", *value.as_tuple()))
    elif ftype is F.COLOR:
        w.raw(struct.pack("<3f", *value.as_tuple()))
    elif ftype is F.MF_INT32:
        w.varint(len(value))
        for v in value:
            w.varint(_zigzag(v))
    elif ftype is F.MF_FLOAT:
        w.varint(len(value))
        w.raw(struct.pack(f"<{len(value)}f", *value))
    elif ftype is F.MF_STRING:
        w.varint(len(value))
        for v in value:
            w.varint(w.intern(v))
    elif ftype is F.MF_VEC3 or ftype is F.MF_COLOR:
        w.varint(len(value))
        flat = [c for v in value for c in v.as_tuple()]
        w.raw(struct.pack(f"<{len(flat)}f", *flat))
    elif ftype is F.MF_ROTATION:
        w.varint(len(value))
        flat = [c for v in value for c in v.as_tuple()]
        w.raw(struct.pack(f"<{len(flat)}d", *flat))
    else:
        raise SchemaError(f"cannot encode field type {ftype}")


def _write_node(w: _Writer, item):
    if isinstance(item, UseRef):
        w.varint(0)
        w.varint(w.intern(item.name))
        return
    node: Node = item
    w.varint(w.kind_token(node.kind) + 1)
    w.varint(w.intern(node.def_name) + 1 if node.def_name is not None else 0)
    specs = field_specs(node.kind)
    present = [
        (fid, spec)
        for fid, spec in enumerate(specs)
        if (spec.name in node.fields) or (spec.name == "children" and node.children)
    ]
    w.varint(len(present))
    for fid, spec in present:
        w.raw(bytes([fid]))
        if spec.ftype is FieldType.MFNODE:
            w.varint(len(node.children))
            for child in node.children:
                _write_node(w, child)
        elif spec.ftype is FieldType.SFNODE:
            _write_node(w, node.fields[spec.name])
        else:
            _write_value(w, spec.ftype, node.fields[spec.name])


def encode_binary(scene: SceneGraph, opts: EncodeOptions = EncodeOptions()) -> bytes:
    """Encode a valid scene; lossless under semantic_equal either way the
    options are set."""
    w = _Writer(dedup=opts.string_table_dedup)

    # Interning happens while streaming records, so build sections first
    # and assemble afterwards: the table must precede its uses on disk.
    meta_w: list[tuple[int, int]] = [
        (w.intern(k), w.intern(v)) for k, v in scene.meta.items()
    ]
    w.varint(len(scene.roots))
    for root in scene.roots:
        _write_node(w, root)
    roots_blob = w.take()

    w.varint(len(scene.routes))
    for r in scene.routes:
        for part in (r.from_node, r.from_field, r.to_node, r.to_field):
            w.varint(w.intern(part))
    routes_blob = w.take()

    w.varint(len(w.strings))
    for s in w.strings:
        raw = s.encode("utf-8")
        w.varint(len(raw))
        w.raw(raw)
    strings_blob = w.take()

    w.varint(len(w.kinds))
    for name in w.kinds:
        w.varint(w._string_ids[name] if w.dedup else w.strings.index(name))
    kinds_blob = w.take()

    w.varint(len(meta_w))
    for k, v in meta_w:
        w.varint(k)
        w.varint(v)
    meta_blob = w.take()

    body = strings_blob + kinds_blob + meta_blob + roots_blob + routes_blob
    flags = 0
    if opts.compress_payload:
        compressor = zlib.compressobj(9, zlib.DEFLATED, -15)
        body = compressor.compress(body) + compressor.flush()
        flags |= FLAG_COMPRESSED
    header = MAGIC + struct.pack("<BBII", VERSION, flags, len(body), zlib.crc32(body))
    return header + body


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise TruncatedError(
                f"need {n} bytes at offset {self.pos}, have {len(self.data) - self.pos}"
            )
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def varint(self) -> int:
        result = 0
        shift = 0
        while True:
            b = self.take(1)[0]
            result |= (b & 0x7F) << shift
            if not b & 0x80:
                return result
            shift += 7
            if shift > 63:
                raise FormatError("varint too long")

    def bounded_count(self, min_bytes_each: int) -> int:
        n = self.varint()
        if n * min_bytes_each > len(self.data) - self.pos:
            raise TruncatedError(f"count {n} exceeds remaining bytes")
        return n

    def done(self) -> bool:
        return self.pos == len(self.data)


def _read_value(r: _Reader, ftype: FieldType, strings):
    F = FieldType

    def string_at(idx):
        if idx >= len(strings):
            raise FormatError(f"string index {idx} out of range")
        return strings[idx]

    if ftype is F.BOOL:
        b = r.take(1)[0]
        if b > 1:
            raise FormatError(f"bool byte {b}")
        return b == 1
    if ftype is F.INT32:
        return _unzigzag(r.varint())
    if ftype is F.FLOAT:
        return struct.unpack("<f", r.take(4))[0]
    if ftype is F.TIME:
        return struct.unpack("<d", r.take(8))[0]
    if ftype is F.STRING:
        return string_at(r.varint())
    if ftype is F.VEC3:
        return tuple(struct.unpack("<3f", r.take(12)))
    if ftype is F.ROTATION:
        return tuple(struct.unpack("<4d", r.take(32)))
    if ftype is F.COLOR:
        return tuple(struct.unpack("<3f", r.take(12)))
    if ftype is F.MF_INT32:
        n = r.bounded_count(1)
        return tuple(_unzigzag(r.varint()) for _ in range(n))
    if ftype is F.MF_FLOAT:
        n = r.bounded_count(4)
        return struct.unpack(f"<{n}f", r.take(4 * n))
    if ftype is F.MF_STRING:
        n = r.bounded_count(1)
        return tuple(string_at(r.varint()) for _ in range(n))
    if ftype is F.MF_VEC3 or ftype is F.MF_COLOR:
        n = r.bounded_count(12)
        flat = struct.unpack(f"<{3 * n}f", r.take(12 * n))
        return tuple(flat[i : i + 3] for i in range(0, len(flat), 3))
    if ftype is F.MF_ROTATION:
        n = r.bounded_count(32)
        flat = struct.unpack(f"<{4 * n}d", r.take(32 * n))
        return tuple(flat[i : i + 4] for i in range(0, len(flat), 4))
    raise FormatError(f"cannot decode field type {ftype}")


class _Decoder:
    def __init__(self, r: _Reader):
        self.r = r
        self.strings: list[str] = []
        self.kinds: list[NodeKind] = []
        self.defs: dict[str, Node] = {}
        self.open_defs: set[str] = set()

    def string_at(self, idx: int) -> str:
        if idx >= len(self.strings):
            raise FormatError(f"string index {idx} out of range")
        return self.strings[idx]

    def read_tables(self):
        r = self.r
        n = r.bounded_count(1)
        for _ in range(n):
            length = r.varint()
            raw = r.take(length)
            try:
                self.strings.append(raw.decode("utf-8"))
            except UnicodeDecodeError as exc:
                raise FormatError(f"string table entry is not UTF-8: {exc}") from exc
        n = r.bounded_count(1)
        for _ in range(n):
            name = self.string_at(r.varint())
            try:
                self.kinds.append(NodeKind(name))
            except ValueError as exc:
                raise FormatError(f"unknown node-kind token {name!r}") from exc

    def read_node(self, depth: int):
        if depth > _MAX_DEPTH:
            raise FormatError("node nesting exceeds decoder limit")
        r = self.r
        tag = r.varint()
        if tag == 0:
            name = self.string_at(r.varint())
            if name not in self.defs:
                raise FormatError(f"USE {name!r} precedes or lacks its DEF")
            if name in self.open_defs:
                raise FormatError(f"USE {name!r} inside its own DEF subtree")
            return UseRef(name)
        if tag - 1 >= len(self.kinds):
            raise FormatError(f"unknown node-kind token {tag - 1}")
        kind = self.kinds[tag - 1]
        def_idx = r.varint()
        def_name = None
        if def_idx:
            def_name = self.string_at(def_idx - 1)
            if def_name in self.defs:
                raise FormatError(f"duplicate DEF {def_name!r}")
        specs = field_specs(kind)
        fields: dict = {}
        children: tuple = ()
        placeholder = Node(kind=kind, def_name=def_name)
        if def_name is not None:
            self.defs[def_name] = placeholder
            self.open_defs.add(def_name)
        nfields = r.bounded_count(1)
        last_fid = -1
        for _ in range(nfields):
            fid = r.take(1)[0]
            if fid >= len(specs):
                raise FormatError(f"{kind.value}: field id {fid} out of range")
            if fid <= last_fid:
                raise FormatError(f"{kind.value}: field ids must ascend")
            last_fid = fid
            spec = specs[fid]
            if spec.access not in (Access.INIT, Access.IN_OUT):
                raise FormatError(f"{kind.value}.{spec.name} is event-only")
            if spec.ftype is FieldType.MFNODE:
                n = r.bounded_count(1)
                children = tuple(self.read_node(depth + 1) for _ in range(n))
            elif spec.ftype is FieldType.SFNODE:
                value = self.read_node(depth + 1)
                if isinstance(value, UseRef):
                    target = self.defs[value.name]
                    if spec.child_kinds and target.kind not in spec.child_kinds:
                        raise FormatError(
                            f"USE {value.name!r} kind {target.kind.value} not allowed "
                            f"in {kind.value}.{spec.name}"
                        )
                fields[spec.name] = value
            else:
                fields[spec.name] = _read_value(self.r, spec.ftype, self.strings)
        if def_name is not None:
            self.open_defs.discard(def_name)
        try:
            built = build_node(kind, def_name=def_name, children=children, **fields)
        except (SchemaError, ValueError) as exc:
            raise FormatError(f"{kind.value}: {exc}") from exc
        placeholder.fields = built.fields
        placeholder.children = built.children
        return placeholder


def decode_binary(data: bytes) -> SceneGraph:
    """Decode S3DB1 bytes; every failure raises a BinaryDecodeError subtype
    and never reads past the declared body length."""
    if len(data) < 4 or data[:4] != MAGIC:
        raise BadMagicError(f"bad magic {data[:4]!r}; expected {MAGIC!r}")
    if len(data) < 14:
        raise TruncatedError("header truncated")
    version, flags, body_len, checksum = struct.unpack("<BBII", data[4:14])
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported version {version}")
    if flags & ~FLAG_COMPRESSED:
        raise FormatError(f"unknown flag bits 0x{flags:02x}")
    body = data[14:]
    if len(body) != body_len:
        raise TruncatedError(f"declared body length {body_len}, found {len(body)}")
    if zlib.crc32(body) != checksum:
        raise ChecksumError("body checksum mismatch")
    if flags & FLAG_COMPRESSED:
        d = zlib.decompressobj(-15)
        try:
            body = d.decompress(body, _MAX_BODY)
        except zlib.error as exc:
            raise FormatError(f"body decompression failed: {exc}") from exc
        if d.unconsumed_tail:
            raise FormatError("decompressed body exceeds size limit")
        if not d.eof:
            raise TruncatedError("compressed body ends prematurely")
        if d.unused_data:
            raise FormatError("trailing bytes after compressed body")

    r = _Reader(body)
    dec = _Decoder(r)
    dec.read_tables()
    n = r.bounded_count(1)
    meta: dict[str, str] = {}
    for _ in range(n):
        k = dec.string_at(r.varint())
        v = dec.string_at(r.varint())
        meta[k] = v
    n = r.bounded_count(1)
    roots = tuple(dec.read_node(0) for _ in range(n))
    n = r.bounded_count(1)
    routes = []
    for _ in range(n):
        parts = [dec.string_at(r.varint()) for _ in range(4)]
        route = Route(*parts)
        src = dec.defs.get(route.from_node)
        dst = dec.defs.get(route.to_node)
        if src is None or dst is None:
            raise FormatError(
                f"route endpoint {route.from_node if src is None else route.to_node!r} not DEF'd"
            )
        out = resolve_route_field(src.kind, route.from_field, "out")
        into = resolve_route_field(dst.kind, route.to_field, "in")
        if out is None or into is None or out[1] != into[1]:
            raise FormatError(
                f"route {route.from_node}.{route.from_field} -> "
                f"{route.to_node}.{route.to_field} does not type-check"
            )
        routes.append(route)
    if not r.done():
        raise FormatError(f"{len(body) - r.pos} trailing bytes after route table")
    return SceneGraph(roots=roots, routes=tuple(routes), meta=meta)
