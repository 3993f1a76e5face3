"""Partition index construction, serialization and size accounting.

Skyline data is held in flat arrays:

* one label tree per entry (``tree_vertex``/``tree_parent``, sliced by
  ``tree_start``), vertex ids in the full graph;
* one row per (entry, exit) pair in ``pair_exit`` with its skyline paths at
  ``path_label[pair_start[q]:pair_start[q+1]]`` (label ids local to the
  entry's tree) and costs in ``path_cost``;
* ``path_group`` assigns every path to a contour group of its pair, whose
  contour points sit at ``cp_cost[cp_start[q]:cp_start[q+1]]``.

On disk, offsets are written as counts and everything the partition
already determines (entry lists, pair lists) is rebuilt on load.
"""

from __future__ import annotations

import io
import json
import os
import struct
import time
import zlib
from dataclasses import dataclass, field
from typing import IO, Union

import numpy as np

from .contour import ContourGroup, ContourSkylineSet, compute_contour
from .graph import MultiCostGraph, Path, induced_subgraph
from .lbop import InterIndex, LbopEngine, LbopInnerIndex, build_lbop_indexes
from .partition import PartitionLayout, compute_borders, partition_graph
from .skyline import SkylinePathSet, skyline_fan

MAGIC = b"MCRIDX\x00\x02"
VERSION = 2


class IndexFormatError(ValueError):
    pass


@dataclass
class SkylineStore:
    entries: np.ndarray
    tree_start: np.ndarray
    tree_vertex: np.ndarray
    tree_parent: np.ndarray
    entry_pair_start: np.ndarray
    pair_exit: np.ndarray
    pair_start: np.ndarray
    path_label: np.ndarray
    path_cost: np.ndarray
    path_group: np.ndarray
    cp_start: np.ndarray
    cp_cost: np.ndarray

    ARRAYS = (
        "entries", "tree_start", "tree_vertex", "tree_parent", "entry_pair_start",
        "pair_exit", "pair_start", "path_label", "path_cost", "path_group",
        "cp_start", "cp_cost",
    )

    def __post_init__(self):
        self.entry_pos = {int(v): i for i, v in enumerate(self.entries)}
        self._pair_pos: dict[tuple[int, int], int] = {}
        for i, v in enumerate(self.entries.tolist()):
            for q in range(int(self.entry_pair_start[i]), int(self.entry_pair_start[i + 1])):
                self._pair_pos[(v, int(self.pair_exit[q]))] = q

    @property
    def pair_count(self) -> int:
        return len(self.pair_exit)

    def pairs(self):
        for (i, j), q in self._pair_pos.items():
            yield i, j, q

    def pair_index(self, entry: int, exit: int) -> int:
        return self._pair_pos[(entry, exit)]

    def path_vertices(self, entry: int, label: int) -> tuple[int, ...]:
        base = int(self.tree_start[self.entry_pos[entry]])
        out = []
        while label >= 0:
            out.append(int(self.tree_vertex[base + label]))
            label = int(self.tree_parent[base + label])
        return tuple(reversed(out))

    def costs(self, q: int) -> np.ndarray:
        return self.path_cost[self.pair_start[q]:self.pair_start[q + 1]]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SkylineStore):
            return NotImplemented
        return all(np.array_equal(getattr(self, a), getattr(other, a)) for a in self.ARRAYS)


def _cost_tuple(row, integral: bool) -> tuple:
    return tuple(int(x) for x in row) if integral else tuple(float(x) for x in row)


@dataclass
class ExpansionGroups:
    """Contour groups reachable from one entry. Group ``t`` leads to
    ``exit[t]``; its contour point is ``cp[:, t]`` (also ``cp_list[t]`` as
    a tuple) and ``items[t]`` lists its ``(cost, label)`` members."""

    exit: np.ndarray
    cp: np.ndarray
    cp_list: list
    items: list
    size: np.ndarray


@dataclass
class PartitionIndex:
    layout: PartitionLayout
    inter: InterIndex
    inner_lbop: LbopInnerIndex
    skyline: SkylineStore
    k: int
    r: int
    seed: int
    d: int
    integral: bool
    graph_hash: str
    build_meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._expansions: dict[int, list] = {}
        self._groups: dict[int, ExpansionGroups | None] = {}
        self._engine: LbopEngine | None = None

    def engine(self, g: MultiCostGraph) -> LbopEngine:
        if self._engine is None or self._engine.g is not g:
            self._engine = LbopEngine(g, self.layout, self.inter, self.inner_lbop)
        return self._engine

    # -- per-pair views ---------------------------------------------------
    def skyline_set(self, entry: int, exit: int) -> SkylinePathSet:
        sk = self.skyline
        q = sk.pair_index(entry, exit)
        lo, hi = int(sk.pair_start[q]), int(sk.pair_start[q + 1])
        paths = tuple(
            Path(sk.path_vertices(entry, int(sk.path_label[t])), _cost_tuple(sk.path_cost[t], self.integral))
            for t in range(lo, hi)
        )
        return SkylinePathSet((entry, exit), paths)

    def contour_set(self, entry: int, exit: int) -> ContourSkylineSet:
        sk = self.skyline
        q = sk.pair_index(entry, exit)
        lo, hi = int(sk.pair_start[q]), int(sk.pair_start[q + 1])
        grp = sk.path_group[lo:hi]
        cps = sk.cp_cost[sk.cp_start[q]:sk.cp_start[q + 1]]
        groups = tuple(
            ContourGroup(tuple(int(x) for x in np.flatnonzero(grp == gid)), _cost_tuple(cp, self.integral))
            for gid, cp in enumerate(cps)
        )
        return ContourSkylineSet(groups, self.r, float("nan"))

    def expansion(self, entry: int) -> list:
        """Query-time view of everything reachable across ``entry``'s subset:
        a list of ``(exit, groups)`` with ``groups`` a list of
        ``(contour_point, [(cost, label), ...])``. Cached per entry."""
        hit = self._expansions.get(entry)
        if hit is not None:
            return hit
        sk = self.skyline
        out = []
        pos = sk.entry_pos.get(entry)
        if pos is not None:
            integral = self.integral
            for q in range(int(sk.entry_pair_start[pos]), int(sk.entry_pair_start[pos + 1])):
                lo, hi = int(sk.pair_start[q]), int(sk.pair_start[q + 1])
                if lo == hi:
                    continue
                costs = sk.path_cost[lo:hi].tolist()
                labels = sk.path_label[lo:hi].tolist()
                grp = sk.path_group[lo:hi].tolist()
                cps = sk.cp_cost[sk.cp_start[q]:sk.cp_start[q + 1]].tolist()
                groups = [(tuple(cp) if integral else tuple(map(float, cp)), []) for cp in cps]
                for c, lab, gid in zip(costs, labels, grp):
                    groups[gid][1].append((tuple(c), lab))
                out.append((int(sk.pair_exit[q]), groups))
        self._expansions[entry] = out
        return out

    def expansion_groups(self, entry: int) -> ExpansionGroups | None:
        """``expansion(entry)`` flattened to one row per contour group, with
        numpy arrays for vectorised bounds. None when ``entry`` has no
        stored pairs. Cached per entry."""
        hit = self._groups.get(entry)
        if hit is not None or entry in self._groups:
            return hit
        exits, cps, items = [], [], []
        for exit, groups in self.expansion(entry):
            for cp, members in groups:
                exits.append(exit)
                cps.append(cp)
                items.append(members)
        out = None
        if exits:
            out = ExpansionGroups(
                np.asarray(exits, dtype=np.int64),
                np.asarray(cps, dtype=np.float64).T.copy(),
                cps,
                items,
                np.asarray([len(m) for m in items], dtype=np.int64),
            )
        self._groups[entry] = out
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, PartitionIndex):
            return NotImplemented
        return (
            (self.k, self.r, self.seed, self.d, self.integral, self.graph_hash)
            == (other.k, other.r, other.seed, other.d, other.integral, other.graph_hash)
            and np.array_equal(self.layout.assignment, other.layout.assignment)
            and np.array_equal(self.inter.phi, other.inter.phi, equal_nan=True)
            and all(np.array_equal(a, b) for a, b in zip(self.inner_lbop.entry_rows, other.inner_lbop.entry_rows))
            and all(np.array_equal(a, b) for a, b in zip(self.inner_lbop.exit_cols, other.inner_lbop.exit_cols))
            and all(np.array_equal(a, b) for a, b in zip(self.inner_lbop.returns, other.inner_lbop.returns))
            and self.skyline == other.skyline
        )


# --- construction -------------------------------------------------------------


def build_skyline_store(
    g: MultiCostGraph, layout: PartitionLayout, r: int, seed: int = 0, *, max_skyline: int | None = None
) -> tuple[SkylineStore, float]:
    """Skyline sets of every entry-exit pair of every subset plus their
    contour sets. Returns the store and the seconds spent on contours."""
    dtype = np.int64 if g.integral else np.float64
    entries, tree_start, tree_v, tree_p = [], [0], [], []
    entry_pair_start, pair_exit, pair_start = [0], [], [0]
    labels, costs, groups, cp_start, cps = [], [], [], [0], []
    contour_time = 0.0
    subgraphs = {}
    for v in layout.all_entries:
        p = layout.subset_of(v)
        if p not in subgraphs:
            subgraphs[p] = induced_subgraph(g, layout.members[p])
        gp = subgraphs[p]
        members = layout.members[p]
        local = lambda x: int(np.searchsorted(members, x))  # noqa: E731
        targets = [x for x in layout.exits[p] if x != v]
        fan = skyline_fan(gp, local(v), [local(x) for x in targets], max_size=max_skyline)
        entries.append(v)
        tree_v.append(fan.tree.vertex)
        tree_p.append(fan.tree.parent)
        tree_start.append(tree_start[-1] + len(fan.tree))
        for x in targets:
            t = local(x)
            lab, cst = fan.labels[t], fan.costs[t]
            pair_exit.append(x)
            labels.append(lab)
            costs.append(cst)
            pair_start.append(pair_start[-1] + len(lab))
            t0 = time.perf_counter()
            if len(lab) <= r:
                # each path is its own group and its own contour point
                gid = np.arange(len(lab), dtype=np.int64)
                cp = cst
            else:
                cs = compute_contour([tuple(c) for c in cst.tolist()], r, seed)
                gid = cs.labels(len(lab))
                cp = np.asarray(cs.points, dtype=dtype).reshape(len(cs.groups), g.d)
            contour_time += time.perf_counter() - t0
            groups.append(gid)
            cps.append(cp)
            cp_start.append(cp_start[-1] + len(cp))
        entry_pair_start.append(len(pair_exit))

    def cat(parts, dt, width=None):
        if parts:
            return np.concatenate(parts).astype(dt)
        return np.zeros((0, width) if width else 0, dtype=dt)

    store = SkylineStore(
        entries=np.asarray(entries, dtype=np.int64),
        tree_start=np.asarray(tree_start, dtype=np.int64),
        tree_vertex=cat(tree_v, np.int64),
        tree_parent=cat(tree_p, np.int64),
        entry_pair_start=np.asarray(entry_pair_start, dtype=np.int64),
        pair_exit=np.asarray(pair_exit, dtype=np.int64),
        pair_start=np.asarray(pair_start, dtype=np.int64),
        path_label=cat(labels, np.int64),
        path_cost=cat(costs, dtype, g.d),
        path_group=cat(groups, np.int64),
        cp_start=np.asarray(cp_start, dtype=np.int64),
        cp_cost=cat(cps, dtype, g.d),
    )
    return store, contour_time


def build_index(
    g: MultiCostGraph,
    k: int = 50,
    r: int = 8,
    seed: int = 0,
    *,
    layout: PartitionLayout | None = None,
    max_skyline: int | None = None,
) -> PartitionIndex:
    """Partition, then build the LBOP indexes, skyline sets and contours."""
    if r < 1:
        raise ValueError("r must be >= 1")
    timings = {}
    t0 = time.perf_counter()
    if layout is None:
        layout = partition_graph(g, k, seed)
    k = layout.k
    timings["partition"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    inter, inner = build_lbop_indexes(g, layout)
    timings["lbop"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    store, contour_time = build_skyline_store(g, layout, r, seed, max_skyline=max_skyline)
    timings["skyline"] = time.perf_counter() - t0 - contour_time
    timings["contour"] = contour_time
    index = PartitionIndex(
        layout, inter, inner, store, k, r, seed, g.d, g.integral, g.content_hash(),
        build_meta={"timings": timings},
    )
    return index


# --- serialization ------------------------------------------------------------


def _int_dtype(lo: int, hi: int) -> np.dtype:
    for dt in (np.int8, np.int16, np.int32, np.int64):
        info = np.iinfo(dt)
        if info.min <= lo and hi <= info.max:
            return np.dtype(dt).newbyteorder("<")
    raise IndexFormatError("integer out of int64 range")


# on-disk element types, addressed by their position in the low bits of
# the code byte; bit 7 marks the inf/nan sentinel encoding and bit 6 a
# masked array (see ``_encode``)
DTYPES = ("<i1", "<i2", "<i4", "<i8", "<f8")
TYPE_BITS = 0x07
MASKED = 0x40
SENTINEL = 0x80


def _code(dt: np.dtype) -> int:
    return DTYPES.index(f"<{dt.kind}{dt.itemsize}")


def _encode(arr: np.ndarray, integral: bool) -> tuple[bytes, int]:
    """Smallest little-endian encoding and its type code.

    A float array of rank >= 2 whose ``inf`` cells repeat along the first
    axis (unreachable pairs are unreachable in every dimension) is written
    as a bitmask of finite cells followed by only those values. Otherwise,
    in integral mode, ``inf`` becomes -1 and ``nan`` -2.
    """
    arr = np.asarray(arr)
    if arr.dtype.kind == "f" and arr.ndim >= 2 and arr.size:
        inf = np.isinf(arr)
        if inf.any() and not np.isnan(arr).any() and (inf == inf[:1]).all():
            keep = ~inf[0]
            bits = np.packbits(keep.ravel(), bitorder="little").tobytes()
            raw, code = _encode(arr[:, keep], integral)
            return bits + raw, code | MASKED
    flag = 0
    if arr.dtype.kind == "f" and integral:
        out = np.where(np.isnan(arr), -2, np.where(np.isinf(arr), -1, arr))
        arr = out.astype(np.int64)
        flag = SENTINEL
    if arr.dtype.kind in "iu":
        lo = int(arr.min()) if arr.size else 0
        hi = int(arr.max()) if arr.size else 0
        dt = _int_dtype(lo, hi)
    else:
        dt = np.dtype("<f8")
    return np.ascontiguousarray(arr, dtype=dt).tobytes(), _code(dt) | flag


def _decode(raw: bytes, code: int, shape: tuple) -> np.ndarray:
    arr = np.frombuffer(raw, dtype=np.dtype(DTYPES[code & TYPE_BITS])).reshape(shape)
    if code & SENTINEL:
        out = arr.astype(np.float64)
        out[arr == -1] = np.inf
        out[arr == -2] = np.nan
        return out
    return arr.astype(np.int64 if arr.dtype.kind in "iu" else np.float64)


def _read_section(blob: bytes, pos: int, name: str, code: int, shape: tuple) -> tuple[np.ndarray, int]:
    """Decode one section starting at ``pos``; returns it and the next offset."""
    itemsize = np.dtype(DTYPES[code & TYPE_BITS]).itemsize
    if not code & MASKED:
        length = int(np.prod(shape, dtype=np.int64)) * itemsize
        raw = blob[pos:pos + length]
        if len(raw) != length:
            raise IndexFormatError(f"truncated section {name}")
        return _decode(raw, code, shape), pos + length
    cells = int(np.prod(shape[1:], dtype=np.int64))
    nbits = (cells + 7) // 8
    if pos + nbits > len(blob):
        raise IndexFormatError(f"truncated section {name}")
    keep = np.unpackbits(np.frombuffer(blob[pos:pos + nbits], dtype=np.uint8), bitorder="little")
    keep = keep[:cells].astype(bool).reshape(shape[1:])
    inner = (shape[0], int(keep.sum()))
    values, end = _read_section(blob, pos + nbits, name, code & ~MASKED, inner)
    out = np.full(shape, np.inf)
    out[:, keep] = values
    return out, end


def _varint(x: int) -> bytes:
    out = bytearray()
    while True:
        byte = x & 0x7F
        x >>= 7
        if x:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def _read_varint(blob: bytes, pos: int) -> tuple[int, int]:
    x = shift = 0
    while True:
        if pos >= len(blob):
            raise IndexFormatError("truncated section table")
        byte = blob[pos]
        pos += 1
        x |= (byte & 0x7F) << shift
        shift += 7
        if not byte & 0x80:
            return x, pos


# section names per container kind, in file order; names are implied by
# the kind and never written
SCHEMAS = {
    "partition-index": (
        "assignment", "inter_phi", "entry_rows", "exit_cols", "returns",
        "tree_size", "tree_vertex", "tree_parent", "pair_size", "path_label",
        "path_cost", "path_group", "cp_size", "cp_cost",
    ),
    "all-pairs-skyline": (
        "tree_size", "tree_vertex", "tree_parent", "source_pairs",
        "pair_target", "pair_size", "path_label", "path_cost",
    ),
}


def write_container(sink: IO[bytes], meta: dict, sections: list[tuple[str, str, np.ndarray]], integral: bool) -> dict:
    """Write ``MAGIC | u32 meta length | JSON meta | section table | payload | u32 crc32``.

    ``sections`` holds ``(component, name, array)`` in the order that
    ``SCHEMAS[meta["kind"]]`` lists. The section table gives each array's
    type code, rank and shape as varints; the trailing checksum covers every
    byte before it. Returns bytes per component (everything that is not
    array payload counts as ``"header"``).
    """
    names = tuple(name for _, name, _ in sections)
    if SCHEMAS.get(meta.get("kind")) != names:
        raise IndexFormatError(f"sections do not match the {meta.get('kind')!r} schema")
    payload = io.BytesIO()
    table = bytearray()
    sizes: dict[str, int] = {}
    for component, _, arr in sections:
        raw, code = _encode(arr, integral)
        table.append(code)
        table.append(len(np.shape(arr)))
        for dim in np.shape(arr):
            table += _varint(int(dim))
        payload.write(raw)
        sizes[component] = sizes.get(component, 0) + len(raw)
    head = json.dumps(dict(meta, version=VERSION), sort_keys=True, separators=(",", ":")).encode()
    blob = MAGIC + struct.pack("<I", len(head)) + head + bytes(table) + payload.getvalue()
    sink.write(blob)
    sink.write(struct.pack("<I", zlib.crc32(blob)))
    sizes["header"] = len(MAGIC) + 4 + len(head) + len(table) + 4
    return sizes


def read_container(source: IO[bytes]) -> tuple[dict, dict[str, np.ndarray]]:
    blob = source.read()
    start = len(MAGIC) + 4
    if len(blob) < start or blob[:len(MAGIC)] != MAGIC:
        raise IndexFormatError("not an index file (bad magic)")
    if len(blob) < start + 4 or zlib.crc32(blob[:-4]) != struct.unpack("<I", blob[-4:])[0]:
        raise IndexFormatError("checksum mismatch (truncated or corrupt file)")
    blob = blob[:-4]
    (hlen,) = struct.unpack("<I", blob[len(MAGIC):start])
    try:
        header = json.loads(blob[start:start + hlen])
    except ValueError:
        raise IndexFormatError("corrupt header") from None
    if header.get("version") != VERSION:
        raise IndexFormatError(f"unsupported index version {header.get('version')}")
    names = SCHEMAS.get(header.get("kind"))
    if names is None:
        raise IndexFormatError(f"unknown container kind {header.get('kind')!r}")
    pos = start + hlen
    layout = []
    for name in names:
        if pos + 2 > len(blob):
            raise IndexFormatError("truncated section table")
        code, ndim = blob[pos], blob[pos + 1]
        pos += 2
        if code & TYPE_BITS >= len(DTYPES) or (code & MASKED and ndim < 2):
            raise IndexFormatError(f"bad type code in section {name}")
        shape = []
        for _ in range(ndim):
            dim, pos = _read_varint(blob, pos)
            shape.append(dim)
        layout.append((name, code, tuple(shape)))
    arrays = {}
    for name, code, shape in layout:
        arrays[name], pos = _read_section(blob, pos, name, code, shape)
    if pos != len(blob):
        raise IndexFormatError("trailing bytes after last section")
    return header, arrays


def _cross_mask(index: PartitionIndex) -> np.ndarray:
    a = index.layout.assignment
    return a[index.inter.rows][:, None] != a[index.inter.cols][None, :]


def _starts(sizes: np.ndarray) -> np.ndarray:
    return np.concatenate(([0], np.cumsum(sizes, dtype=np.int64)))


def _inner_slots(layout: PartitionLayout, p: int):
    """Member rows of the entries and exit rows that are not entries; the
    values of the other rows are already in ``entry_rows``."""
    at = {int(v): i for i, v in enumerate(layout.members[p])}
    is_entry = {int(v): i for i, v in enumerate(layout.entries[p])}
    plain_members = [i for i, v in enumerate(layout.members[p]) if int(v) not in is_entry]
    plain_exits = [j for j, x in enumerate(layout.exits[p]) if int(x) not in is_entry]
    return at, is_entry, plain_members, plain_exits


def _sections(index: PartitionIndex):
    """Arrays to store, in schema order. Anything that follows from the
    partition (entry lists, entry-exit pair lists, entry -> exit LBOPs kept
    twice in memory) is left out, and offset arrays become counts."""
    mask = _cross_mask(index)
    lay = index.layout
    inner = index.inner_lbop
    d = index.d
    rows, cols, back = [], [], []
    for p in range(lay.k):
        _, _, plain_members, plain_exits = _inner_slots(lay, p)
        rows.append(inner.entry_rows[p].reshape(d, -1))
        cols.append(inner.exit_cols[p][:, plain_members, :].reshape(d, -1))
        back.append(inner.returns[p][:, plain_exits, :].reshape(d, -1))
    cat = lambda parts: (np.concatenate(parts, axis=1) if parts else np.zeros((d, 0)))  # noqa: E731
    sk = index.skyline
    return [
        ("layout", "assignment", lay.assignment),
        ("inter", "inter_phi", index.inter.phi[:, mask]),
        ("inner_lbop", "entry_rows", cat(rows)),
        ("inner_lbop", "exit_cols", cat(cols)),
        ("inner_lbop", "returns", cat(back)),
        ("skyline", "tree_size", np.diff(sk.tree_start)),
        ("skyline", "tree_vertex", sk.tree_vertex),
        ("skyline", "tree_parent", sk.tree_parent),
        ("skyline", "pair_size", np.diff(sk.pair_start)),
        ("skyline", "path_label", sk.path_label),
        ("skyline", "path_cost", sk.path_cost),
        ("contour", "path_group", sk.path_group),
        ("contour", "cp_size", np.diff(sk.cp_start)),
        ("contour", "cp_cost", sk.cp_cost),
    ]


def _meta(index: PartitionIndex) -> dict:
    lay = index.layout
    return {
        "kind": "partition-index",
        "k": index.k, "r": index.r, "seed": index.seed, "d": index.d,
        "n": int(len(lay.assignment)), "integral": index.integral,
        "graph_hash": index.graph_hash,
    }


def save_index(index: PartitionIndex, sink: Union[str, os.PathLike, IO[bytes]]) -> dict:
    """Serialize; returns the byte size of each component."""
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "wb") as fh:
            return save_index(index, fh)
    return write_container(sink, _meta(index), _sections(index), index.integral)


def serialize_index(index: PartitionIndex) -> bytes:
    buf = io.BytesIO()
    save_index(index, buf)
    return buf.getvalue()


def index_sizes(index: PartitionIndex) -> dict:
    """Byte counts per serialized component, plus ``total``."""
    sizes = write_container(io.BytesIO(), _meta(index), _sections(index), index.integral)
    sizes["total"] = sum(sizes.values())
    return sizes


def load_index(source: Union[str, os.PathLike, IO[bytes]], g: MultiCostGraph) -> PartitionIndex:
    """Inverse of ``save_index``; refuses an index built for another graph."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as fh:
            return load_index(fh, g)
    header, arrays = read_container(source)
    if header.get("kind") != "partition-index":
        raise IndexFormatError("file is not a partition index")
    if header["graph_hash"] != g.content_hash():
        raise IndexFormatError("index was built for a different graph (hash mismatch)")
    d = header["d"]
    layout = compute_borders(g, arrays["assignment"])
    layout.stats.update(cut_edges=layout.cut_edges, borders=len(layout.borders))
    rows = np.asarray(layout.borders, dtype=np.int64)
    cols = np.asarray(layout.all_entries, dtype=np.int64)
    a = layout.assignment
    mask = a[rows][:, None] != a[cols][None, :]
    phi = np.full((d, len(rows), len(cols)), np.nan)
    cells = arrays["inter_phi"].astype(np.float64)
    if cells.size != d * int(mask.sum()):
        raise IndexFormatError("inter-index does not match the partition")
    phi[:, mask] = cells.reshape(d, -1)
    inter = InterIndex(rows, cols, phi)
    entry_rows, exit_cols, returns = [], [], []
    er = arrays["entry_rows"].astype(np.float64).reshape(d, -1)
    ec = arrays["exit_cols"].astype(np.float64).reshape(d, -1)
    rt = arrays["returns"].astype(np.float64).reshape(d, -1)
    pr = pc = pt = 0
    for p in range(layout.k):
        at, is_entry, plain_members, plain_exits = _inner_slots(layout, p)
        entries, exits = layout.entries[p], layout.exits[p]
        size, ne, nx = len(layout.members[p]), len(entries), len(exits)
        er_p = er[:, pr:pr + ne * size].reshape(d, ne, size)
        pr += ne * size
        ec_p = np.empty((d, size, nx))
        ec_p[:, plain_members, :] = ec[:, pc:pc + len(plain_members) * nx].reshape(d, len(plain_members), nx)
        pc += len(plain_members) * nx
        exit_at = [at[int(x)] for x in exits]
        for i, v in enumerate(entries):
            ec_p[:, at[int(v)], :] = er_p[:, i, exit_at]
        rt_p = np.empty((d, nx, ne))
        rt_p[:, plain_exits, :] = rt[:, pt:pt + len(plain_exits) * ne].reshape(d, len(plain_exits), ne)
        pt += len(plain_exits) * ne
        entry_at = [at[int(v)] for v in entries]
        for j, x in enumerate(exits):
            if int(x) in is_entry:
                rt_p[:, j, :] = er_p[:, is_entry[int(x)], entry_at]
        entry_rows.append(er_p)
        exit_cols.append(ec_p)
        returns.append(rt_p)
    if pr != er.shape[1] or pc != ec.shape[1] or pt != rt.shape[1]:
        raise IndexFormatError("inner LBOP index does not match the partition")
    dtype = np.int64 if header["integral"] else np.float64
    entries = np.asarray(layout.all_entries, dtype=np.int64)
    pair_exit, entry_pair_start = [], [0]
    for v in layout.all_entries:
        pair_exit.extend(x for x in layout.exits[layout.subset_of(v)] if x != v)
        entry_pair_start.append(len(pair_exit))
    parts = dict(
        entries=entries,
        tree_start=_starts(arrays["tree_size"]),
        tree_vertex=arrays["tree_vertex"],
        tree_parent=arrays["tree_parent"],
        entry_pair_start=np.asarray(entry_pair_start, dtype=np.int64),
        pair_exit=np.asarray(pair_exit, dtype=np.int64),
        pair_start=_starts(arrays["pair_size"]),
        path_label=arrays["path_label"],
        path_cost=arrays["path_cost"].astype(dtype).reshape(-1, d),
        path_group=arrays["path_group"],
        cp_start=_starts(arrays["cp_size"]),
        cp_cost=arrays["cp_cost"].astype(dtype).reshape(-1, d),
    )
    if len(parts["tree_start"]) != len(entries) + 1 or len(parts["pair_start"]) != len(pair_exit) + 1:
        raise IndexFormatError("skyline store does not match the partition")
    store = SkylineStore(**parts)
    return PartitionIndex(
        layout, inter, LbopInnerIndex(entry_rows, exit_cols, returns), store,
        header["k"], header["r"], header["seed"], d, header["integral"], header["graph_hash"],
    )


# --- all-pairs skyline baseline -----------------------------------------------


def serialize_all_pairs_skyline(g: MultiCostGraph, *, max_skyline: int | None = None) -> bytes:
    """Skyline sets between every ordered vertex pair of ``g``, stored in the
    same container and array encoding as the partition index. This is the
    naive index a no-partition search would precompute; its size is the
    comparison point for the partition index."""
    full = induced_subgraph(g, range(g.n))
    tree_start, tree_v, tree_p = [0], [], []
    source_pair_start, pair_target, pair_start = [0], [], [0]
    labels, costs = [], []
    for s in range(g.n):
        fan = skyline_fan(full, s, [t for t in range(g.n) if t != s], max_size=max_skyline)
        tree_v.append(fan.tree.vertex)
        tree_p.append(fan.tree.parent)
        tree_start.append(tree_start[-1] + len(fan.tree))
        for t in sorted(fan.labels):
            if not len(fan.labels[t]):
                continue
            pair_target.append(t)
            labels.append(fan.labels[t])
            costs.append(fan.costs[t])
            pair_start.append(pair_start[-1] + len(fan.labels[t]))
        source_pair_start.append(len(pair_target))
    dtype = np.int64 if g.integral else np.float64
    cat = lambda parts, dt, w=None: (  # noqa: E731
        np.concatenate(parts).astype(dt) if parts else np.zeros((0, w) if w else 0, dt)
    )
    sections = [
        ("skyline", "tree_size", np.diff(tree_start)),
        ("skyline", "tree_vertex", cat(tree_v, np.int64)),
        ("skyline", "tree_parent", cat(tree_p, np.int64)),
        ("skyline", "source_pairs", np.diff(source_pair_start)),
        ("skyline", "pair_target", np.asarray(pair_target, dtype=np.int64)),
        ("skyline", "pair_size", np.diff(pair_start)),
        ("skyline", "path_label", cat(labels, np.int64)),
        ("skyline", "path_cost", cat(costs, dtype, g.d)),
    ]
    meta = {"kind": "all-pairs-skyline", "d": g.d, "n": g.n, "integral": g.integral,
            "graph_hash": g.content_hash()}
    buf = io.BytesIO()
    write_container(buf, meta, sections, g.integral)
    return buf.getvalue()
