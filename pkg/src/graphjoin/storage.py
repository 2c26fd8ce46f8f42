"""Hash-sorted secondary-memory graph layout.

A graph directory holds four files::

    schema.gjn       text, one ``name:type`` per line plus ``#`` headers
    va.gjn           variable-size vertex records sorted by (hash, id)
    hash.gjn         16-byte records (hash, va offset), strictly increasing
    vertexindex.gjn  16-byte records (va offset, hash), record i = vertex i

Binary files start with a 16-byte header: ``GJN1``, a kind byte, three zero
bytes and a little-endian u64 record count. All integers are little-endian
and all offsets are absolute byte positions inside ``va.gjn``.

A VA record is the attribute values in schema order (Int64 as 8 bytes,
Text as a u32 length plus UTF-8 bytes), then a u32 count and u64 ids of
in-neighbours, then the same for out-neighbours. Records carry no id: a
hash group lists its vertices in ascending id order, so ids are recovered
from the VertexIndex.
"""
from __future__ import annotations

import mmap
import os
import struct
from pathlib import Path

import numpy as np

from .exceptions import (
    BadMagic,
    IdOutOfRange,
    OversizeValue,
    SchemaError,
    TruncatedFile,
    VersionMismatch,
)
from .model import AttrType, Graph, Schema, VertexTuple
from .predicates import NO_HASH, HashSpec, LEFT

MAGIC = b"GJN"
VERSION = b"1"
HEADER = struct.Struct("<4sc3sQ")
HEADER_SIZE = HEADER.size
KIND_VA = b"V"
KIND_HASH = b"H"
KIND_INDEX = b"I"

SCHEMA_FILE = "schema.gjn"
VA_FILE = "va.gjn"
HASH_FILE = "hash.gjn"
INDEX_FILE = "vertexindex.gjn"
GRAPH_FILES = (SCHEMA_FILE, VA_FILE, HASH_FILE, INDEX_FILE)

DIR_DTYPE = np.dtype([("hash", "<u8"), ("offset", "<u8")])
INDEX_DTYPE = np.dtype([("offset", "<u8"), ("hash", "<u8")])

_I64 = struct.Struct("<q")
_U32 = struct.Struct("<I")
_U32_MAX = 0xFFFFFFFF


def _header(kind: bytes, count: int) -> bytes:
    return HEADER.pack(MAGIC + VERSION, kind, b"\0\0\0", count)


def encode_record(schema: Schema, values, in_ids, out_ids) -> bytes:
    parts = []
    for attr, value in zip(schema.attributes, values):
        if attr.type is AttrType.INT64:
            parts.append(_I64.pack(value))
        else:
            raw = value.encode("utf-8")
            if len(raw) > _U32_MAX:
                raise OversizeValue(f"{attr.name}: text of {len(raw)} bytes")
            parts.append(_U32.pack(len(raw)))
            parts.append(raw)
    for ids in (in_ids, out_ids):
        parts.append(_U32.pack(len(ids)))
        parts.append(struct.pack(f"<{len(ids)}Q", *ids))
    return b"".join(parts)


def write_schema(path: Path, schema: Schema, spec: HashSpec, side: str) -> None:
    lines = [
        "#gjn-schema 1",
        f"#hash {spec.fingerprint(side)}",
        f"#side {side}",
    ]
    lines += [f"{a.name}:{a.type.value}" for a in schema.attributes]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_schema(path: Path):
    """Return ``(schema, fingerprint, side)`` from a schema file."""
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise BadMagic(f"missing {path.name}") from None
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#gjn-schema"):
        raise BadMagic(f"{path}: not a graph schema file")
    if lines[0].split()[-1] != "1":
        raise VersionMismatch(f"{path}: unsupported schema version {lines[0]!r}")
    fingerprint, side, attrs = "none:", LEFT, []
    for line in lines[1:]:
        if not line.strip():
            continue
        if line.startswith("#hash "):
            fingerprint = line[6:].strip()
        elif line.startswith("#side "):
            side = line[6:].strip()
        elif line.startswith("#"):
            continue
        else:
            name, sep, kind = line.rpartition(":")
            if not sep:
                raise SchemaError(f"{path}: bad attribute line {line!r}")
            attrs.append((name, kind))
    return Schema(attrs), fingerprint, side


def build_index(g: Graph, spec: HashSpec = NO_HASH, side: str = LEFT, out_dir=None):
    """Write ``g`` hash-sorted under ``spec`` into ``out_dir`` and open it."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    hasher = spec.hasher(g.schema, side)
    n = g.n_vertices
    hashes = [hasher(values) for values in g.values]
    order = sorted(range(n), key=lambda i: (hashes[i], i))

    in_lists = [[] for _ in range(n)]
    for s, d in sorted(g.edges):
        in_lists[d].append(s)

    va = bytearray(_header(KIND_VA, n))
    offsets = [0] * n
    directory = []
    for i in order:
        offsets[i] = len(va)
        if not directory or directory[-1][0] != hashes[i]:
            directory.append((hashes[i], len(va)))
        va += encode_record(g.schema, g.values[i], in_lists[i], g.out[i])

    index = np.empty(n, dtype=INDEX_DTYPE)
    index["offset"] = offsets
    index["hash"] = hashes
    hash_dir = np.array(directory, dtype=DIR_DTYPE) if directory else np.empty(0, DIR_DTYPE)

    write_schema(out / SCHEMA_FILE, g.schema, spec, side)
    (out / VA_FILE).write_bytes(bytes(va))
    (out / HASH_FILE).write_bytes(_header(KIND_HASH, len(directory)) + hash_dir.tobytes())
    (out / INDEX_FILE).write_bytes(_header(KIND_INDEX, n) + index.tobytes())
    return IndexedGraph(out)


def open_graph(path) -> "IndexedGraph":
    return IndexedGraph(path)


class _Mapped:
    """Read-only mapping of one binary file with a validated header."""

    def __init__(self, path: Path, kind: bytes):
        self.path = path
        with open(path, "rb") as fh:
            size = os.fstat(fh.fileno()).st_size
            if size < HEADER_SIZE:
                raise TruncatedFile(f"{path.name}: {size} bytes, header needs {HEADER_SIZE}")
            self.mm = mmap.mmap(fh.fileno(), 0, access=mmap.ACCESS_READ)
        magic, got_kind, pad, count = HEADER.unpack_from(self.mm, 0)
        if magic[:3] != MAGIC or got_kind != kind or pad != b"\0\0\0":
            self.mm.close()
            raise BadMagic(f"{path.name}: bad magic {magic + got_kind + pad!r}")
        if magic[3:] != VERSION:
            self.mm.close()
            raise VersionMismatch(f"{path.name}: format version {magic[3:]!r}")
        self.count = count
        self.size = size

    def table(self, dtype):
        need = HEADER_SIZE + self.count * dtype.itemsize
        if self.size < need:
            raise TruncatedFile(f"{self.path.name}: {self.size} bytes, records need {need}")
        return np.frombuffer(self.mm, dtype=dtype, count=self.count, offset=HEADER_SIZE)

    def close(self):
        self.mm.close()


class IndexedGraph:
    """Read-only view over a graph directory written by :func:`build_index`.

    Opening reads only the file headers and the schema. VA records are
    decoded on demand with explicit bounds checks, so a truncated VA file
    surfaces as :class:`TruncatedFile` at the first read past its end.
    """

    def __init__(self, path):
        self.path = Path(path)
        self.schema, self.fingerprint, self.side = read_schema(self.path / SCHEMA_FILE)
        self._files = []
        try:
            self._va = self._map(VA_FILE, KIND_VA)
            self._dir_file = self._map(HASH_FILE, KIND_HASH)
            self._index_file = self._map(INDEX_FILE, KIND_INDEX)
            self._dir = self._dir_file.table(DIR_DTYPE)
            self._index = self._index_file.table(INDEX_DTYPE)
        except Exception:
            self.close()
            raise
        if self._va.count != self._index_file.count:
            self.close()
            raise TruncatedFile(
                f"VA holds {self._va.count} records, VertexIndex {self._index_file.count}"
            )
        self._types = [a.type for a in self.schema.attributes]
        self._va_ids = None
        self._va_offsets = None
        self._hash_list = None

    def _map(self, name, kind):
        mapped = _Mapped(self.path / name, kind)
        self._files.append(mapped)
        return mapped

    def close(self):
        self._dir = self._index = None
        self._va_ids = self._va_offsets = None
        for f in self._files:
            f.close()
        self._files = []

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __len__(self):
        return self._va.count

    @property
    def n_vertices(self) -> int:
        return self._va.count

    @property
    def n_hashes(self) -> int:
        return self._dir_file.count

    # ------------------------------------------------------------ decoding

    def read_record(self, offset: int):
        """Decode the VA record at ``offset``.

        Returns ``(values, in_ids, out_ids, next_offset)``.
        """
        mm = self._va.mm
        end = self._va.size
        pos = offset
        values = []
        try:
            for kind in self._types:
                if kind is AttrType.INT64:
                    if pos + 8 > end:
                        raise TruncatedFile
                    values.append(_I64.unpack_from(mm, pos)[0])
                    pos += 8
                else:
                    if pos + 4 > end:
                        raise TruncatedFile
                    (length,) = _U32.unpack_from(mm, pos)
                    pos += 4
                    if pos + length > end:
                        raise TruncatedFile
                    values.append(mm[pos : pos + length].decode("utf-8"))
                    pos += length
            lists = []
            for _ in range(2):
                if pos + 4 > end:
                    raise TruncatedFile
                (count,) = _U32.unpack_from(mm, pos)
                pos += 4
                if pos + 8 * count > end:
                    raise TruncatedFile
                lists.append(struct.unpack_from(f"<{count}Q", mm, pos))
                pos += 8 * count
        except TruncatedFile:
            raise TruncatedFile(
                f"{VA_FILE}: record at offset {offset} runs past end of file ({end} bytes)"
            ) from None
        return tuple(values), lists[0], lists[1], pos

    def _ids_in_va_order(self):
        if self._va_ids is None:
            offsets = self._index["offset"]
            order = np.argsort(offsets, kind="stable")
            self._va_ids = order
            self._va_offsets = offsets[order]
        return self._va_ids, self._va_offsets

    # ------------------------------------------------------------ access

    def _group_bounds(self, pos: int):
        start = int(self._dir["offset"][pos])
        if pos + 1 < self._dir_file.count:
            stop = int(self._dir["offset"][pos + 1])
        else:
            stop = self._va.size
        return start, stop

    def vertices_by_hash(self, h: int):
        """Yield ``(id, VertexTuple, out_ids)`` for every vertex with hash ``h``."""
        hashes = self._dir["hash"]
        pos = int(np.searchsorted(hashes, np.uint64(h)))
        if pos >= len(hashes) or int(hashes[pos]) != h:
            return
        start, stop = self._group_bounds(pos)
        ids, va_offsets = self._ids_in_va_order()
        rank = int(np.searchsorted(va_offsets, np.uint64(start)))
        offset = start
        while offset < stop:
            vid = int(ids[rank])
            values, _, out_ids, offset = self.read_record(offset)
            yield vid, VertexTuple(vid, values), out_ids
            rank += 1

    def vertex_by_id(self, vid: int):
        """Return ``(VertexTuple, out_ids, hash)`` for vertex ``vid``."""
        if not 0 <= vid < self._va.count:
            raise IdOutOfRange(f"vertex id {vid} outside [0, {self._va.count})")
        offset, h = self._index[vid]
        values, _, out_ids, _ = self.read_record(int(offset))
        return VertexTuple(vid, values), out_ids, int(h)

    def in_neighbors(self, vid: int):
        if not 0 <= vid < self._va.count:
            raise IdOutOfRange(f"vertex id {vid} outside [0, {self._va.count})")
        return self.read_record(int(self._index["offset"][vid]))[1]

    def hash_of(self, vid: int) -> int:
        if not 0 <= vid < self._va.count:
            raise IdOutOfRange(f"vertex id {vid} outside [0, {self._va.count})")
        return int(self._index["hash"][vid])

    def vertex_hashes(self) -> list:
        """Hash of every vertex, indexed by id."""
        if self._hash_list is None:
            self._hash_list = self._index["hash"].tolist()
        return self._hash_list

    def hash_values(self, descending: bool = False):
        column = self._dir["hash"]
        if descending:
            column = column[::-1]
        for h in column.tolist():
            yield h

    def hash_array(self) -> np.ndarray:
        return np.array(self._dir["hash"])

    def scan(self):
        """Yield ``(id, VertexTuple, out_ids, hash)`` in VA order, without the directory."""
        ids, _ = self._ids_in_va_order()
        offset = HEADER_SIZE
        for rank in range(self._va.count):
            vid = int(ids[rank])
            values, _, out_ids, offset = self.read_record(offset)
            yield vid, VertexTuple(vid, values), out_ids, int(self._index["hash"][vid])

    def to_graph(self) -> Graph:
        """Materialize the stored graph back into memory."""
        values = [None] * self._va.count
        edges = []
        for vid, vertex, out_ids, _ in self.scan():
            values[vid] = vertex.values
            edges.extend((vid, d) for d in out_ids)
        return Graph(self.schema, values, edges)

    def __repr__(self):
        return (
            f"IndexedGraph({str(self.path)!r}, |V|={self.n_vertices}, "
            f"hashes={self.n_hashes}, spec={self.fingerprint!r})"
        )


def save_graph(g: Graph, out_dir) -> None:
    """Store ``g`` without a join hash (every vertex hashes to 0)."""
    build_index(g, NO_HASH, LEFT, out_dir).close()


def load_graph(path) -> Graph:
    with IndexedGraph(path) as ig:
        return ig.to_graph()


def block_size_kb(path, block: int = 4096) -> float:
    """Disk footprint of a graph directory, each file rounded up to ``block`` bytes."""
    total = 0
    for entry in Path(path).iterdir():
        if entry.is_file():
            size = entry.stat().st_size
            total += -(-size // block) * block
    return total / 1024
