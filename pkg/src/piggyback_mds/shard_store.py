"""
Shard files: one per node, plus a manifest.

Every file starts with the same 31-byte big-endian header::

    magic "PBKC" | version u8 | variant u8 | n u16 | k u16 | m u16 | L u16
    | s u16 | theta u8 | node_index u16 | stripe_count u32 | payload_length u64

A shard's payload is its node's m symbols for each stripe in turn. The
manifest (node_index 0) carries the original length (u64) and its CRC-32 (u32).
"""

from __future__ import annotations

import os
import struct
import tempfile
import zlib
from dataclasses import dataclass, replace
from pathlib import Path
from typing import TYPE_CHECKING, Self

import numpy as np

from .analysis import SweepParams, build_code
from .const import (
    LOGGER,
    MANIFEST_SUFFIX,
    SHARD_FORMAT_VERSION,
    SHARD_MAGIC,
    SHARD_SUFFIX,
    VARIANT_C1,
    VARIANT_C2,
)
from .errors import (
    BadMagic,
    ChecksumMismatch,
    HeaderSpecMismatch,
    InsufficientShards,
    ParamError,
    TruncatedPayload,
    VersionMismatch,
)
from .field import GF256
from .repair_plan import execute

if TYPE_CHECKING:
    from collections.abc import Sequence

    from galois import FieldArray

    from .array_code import PiggybackCode

HEADER = struct.Struct(">4sBBHHHHHBHIQ")
MANIFEST_TAIL = struct.Struct(">QI")


@dataclass(frozen=True)
class ShardHeader:
    """Code parameters and position of one shard (or of the manifest)."""

    variant: int
    n: int
    k: int
    m: int
    L: int
    s: int
    theta: int
    node_index: int
    stripe_count: int
    payload_length: int

    @classmethod
    def for_code(
        cls, code: PiggybackCode, node_index: int, stripe_count: int
    ) -> Self:
        """Header of node ``node_index`` (0 for the manifest) of ``code``."""
        return cls(
            variant=code.variant,
            n=code.n,
            k=code.k,
            m=code.m,
            L=code.L,
            s=getattr(code, "s", 0),
            theta=getattr(code, "theta", 0),
            node_index=node_index,
            stripe_count=stripe_count,
            payload_length=stripe_count * code.m,
        )

    def pack(self) -> bytes:
        """Serialize to the 31-byte wire form."""
        return HEADER.pack(
            SHARD_MAGIC,
            SHARD_FORMAT_VERSION,
            self.variant,
            self.n,
            self.k,
            self.m,
            self.L,
            self.s,
            self.theta,
            self.node_index,
            self.stripe_count,
            self.payload_length,
        )

    @classmethod
    def unpack(cls, raw: bytes) -> Self:
        """Parse the header at the start of ``raw``."""
        if len(raw) < HEADER.size:
            msg = f"header needs {HEADER.size} bytes, got {len(raw)}"
            raise TruncatedPayload(msg)
        magic, version, *fields = HEADER.unpack_from(raw)
        if magic != SHARD_MAGIC:
            msg = f"bad magic {magic!r}, expected {SHARD_MAGIC!r}"
            raise BadMagic(msg)
        if version != SHARD_FORMAT_VERSION:
            msg = f"format version {version}, expected {SHARD_FORMAT_VERSION}"
            raise VersionMismatch(msg)
        return cls(*fields)

    def code(self) -> PiggybackCode:
        """Rebuild the code this header describes."""
        if self.variant == VARIANT_C1 and (self.s or self.theta):
            msg = f"C1 header carries s = {self.s}, theta = {self.theta}"
            raise HeaderSpecMismatch(msg)
        if self.variant == VARIANT_C2 and self.m != self.s * (self.n - self.k):
            msg = f"C2 header has m = {self.m} but s·r = {self.s * (self.n - self.k)}"
            raise HeaderSpecMismatch(msg)
        if self.node_index > self.n:
            msg = f"node {self.node_index} outside 1..{self.n}"
            raise HeaderSpecMismatch(msg)
        try:
            return build_code(
                SweepParams(self.variant, self.n, self.k, self.m, self.L), self.theta
            )
        except ParamError as exception:
            msg = f"header does not describe a valid code: {exception}"
            raise HeaderSpecMismatch(msg) from exception

    def same_stripes(self, other: ShardHeader) -> bool:
        """Whether both headers describe the same code and stripe count."""
        return replace(self, node_index=0, payload_length=0) == replace(
            other, node_index=0, payload_length=0
        )


@dataclass(frozen=True)
class Manifest:
    """The shared header plus what is needed to trim and verify the output."""

    header: ShardHeader
    original_length: int
    checksum: int

    def pack(self) -> bytes:
        """Serialize header and tail."""
        return self.header.pack() + MANIFEST_TAIL.pack(
            self.original_length, self.checksum
        )

    @classmethod
    def unpack(cls, raw: bytes) -> Self:
        """Parse a manifest file's contents."""
        header = ShardHeader.unpack(raw)
        if header.node_index != 0:
            msg = f"manifest header names node {header.node_index}, expected 0"
            raise HeaderSpecMismatch(msg)
        tail = raw[HEADER.size :]
        if len(tail) < MANIFEST_TAIL.size:
            msg = f"manifest tail needs {MANIFEST_TAIL.size} bytes, got {len(tail)}"
            raise TruncatedPayload(msg)
        original_length, checksum = MANIFEST_TAIL.unpack_from(tail)
        return cls(header=header, original_length=original_length, checksum=checksum)


@dataclass(frozen=True)
class RepairReport:
    """What a shard repair read and wrote."""

    node: int
    symbols_per_stripe: int
    stripe_count: int
    nodes_read: tuple[int, ...]
    ratio: float


def stripe_split(data: bytes, k: int, m: int) -> FieldArray:
    """
    Cut ``data`` into k×m grids, returned stacked as shape (k, m, stripes).

    Each k·m-byte block fills its grid column by column; the last block is
    zero-padded.
    """
    block = k * m
    count = -(-len(data) // block)
    padded = np.zeros(count * block, dtype=np.uint8)
    padded[: len(data)] = np.frombuffer(data, dtype=np.uint8)
    grids = padded.reshape(count, m, k).transpose(2, 1, 0)
    return GF256(np.ascontiguousarray(grids))


def stripe_join(grids: FieldArray, length: int) -> bytes:
    """Inverse of stripe_split, trimmed to ``length`` bytes."""
    flat = np.ascontiguousarray(grids.view(np.ndarray).transpose(2, 1, 0))
    return flat.tobytes()[:length]


def shard_path(directory: Path, stem: str, node: int) -> Path:
    """Path of node ``node``'s shard."""
    return directory / f"{stem}{SHARD_SUFFIX}{node}"


def manifest_path(directory: Path, stem: str) -> Path:
    """Path of the manifest."""
    return directory / f"{stem}{MANIFEST_SUFFIX}"


def _atomic_write(path: Path, payload: bytes) -> None:
    descriptor, temporary = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(descriptor, "wb") as handle:
            handle.write(payload)
            handle.flush()
            os.fsync(handle.fileno())
        Path(temporary).replace(path)
    except BaseException:
        Path(temporary).unlink(missing_ok=True)
        raise


def write_shard(path: Path, header: ShardHeader, rows: FieldArray) -> None:
    """Write one node's (m, stripes) rows under ``header``."""
    if rows.shape != (header.m, header.stripe_count):
        msg = f"rows of shape {rows.shape} do not match header {header}"
        raise HeaderSpecMismatch(msg)
    payload = np.ascontiguousarray(rows.view(np.ndarray).T).tobytes()
    _atomic_write(path, header.pack() + payload)


def read_shard(
    path: Path, expected: ShardHeader | None = None, node: int | None = None
) -> tuple[ShardHeader, FieldArray]:
    """
    Read a shard, returning its header and its rows as (m, stripes).

    With ``expected`` the header must describe the same code and stripe count;
    with ``node`` it must also carry that node index.
    """
    raw = path.read_bytes()
    header = ShardHeader.unpack(raw)
    if expected is not None and not header.same_stripes(expected):
        msg = f"{path.name} does not belong to {expected}"
        raise HeaderSpecMismatch(msg)
    if node is not None and header.node_index != node:
        msg = f"{path.name} holds node {header.node_index}, expected node {node}"
        raise HeaderSpecMismatch(msg)
    if header.payload_length != header.stripe_count * header.m:
        msg = f"{path.name} announces {header.payload_length} payload bytes"
        raise HeaderSpecMismatch(msg)
    payload = raw[HEADER.size :]
    if len(payload) < header.payload_length:
        msg = f"{path.name} holds {len(payload)} of {header.payload_length} bytes"
        raise TruncatedPayload(msg)
    symbols = np.frombuffer(payload[: header.payload_length], dtype=np.uint8)
    rows = symbols.reshape(header.stripe_count, header.m).T
    return header, GF256(np.ascontiguousarray(rows))


def read_manifest(directory: Path, stem: str) -> Manifest:
    """Read and parse the manifest of ``stem``."""
    return Manifest.unpack(manifest_path(directory, stem).read_bytes())


def encode_file(source: Path, directory: Path, code: PiggybackCode) -> Manifest:
    """Encode ``source`` into n shard files and a manifest under ``directory``."""
    data = source.read_bytes()
    grids = stripe_split(data, code.k, code.m)
    stripe_count = grids.shape[2]
    if stripe_count:
        stripes = code.encode(grids)
    else:
        stripes = GF256.Zeros((code.n, code.m, 0))

    directory.mkdir(parents=True, exist_ok=True)
    stem = source.name
    for node in range(1, code.n + 1):
        header = ShardHeader.for_code(code, node, stripe_count)
        write_shard(shard_path(directory, stem, node), header, stripes[node - 1])

    manifest = Manifest(
        header=replace(
            ShardHeader.for_code(code, 0, stripe_count),
            payload_length=MANIFEST_TAIL.size,
        ),
        original_length=len(data),
        checksum=zlib.crc32(data),
    )
    _atomic_write(manifest_path(directory, stem), manifest.pack())
    LOGGER.info(
        "Encoded %s bytes of %s into %s stripes of %s", len(data), stem, stripe_count, code
    )
    return manifest


def decode_files(
    directory: Path, stem: str, nodes: Sequence[int] | None = None
) -> bytes:
    """
    Restore the original bytes of ``stem`` from k shard files.

    Without ``nodes`` the first k shards present on disk are used.
    """
    manifest = read_manifest(directory, stem)
    code = manifest.header.code()
    if nodes is None:
        nodes = [
            node
            for node in range(1, code.n + 1)
            if shard_path(directory, stem, node).exists()
        ][: code.k]
    nodes = tuple(nodes)
    if len(set(nodes)) != len(nodes) or len(nodes) > code.k:
        msg = f"{stem}: decode needs k = {code.k} distinct nodes, got {nodes}"
        raise ParamError(msg)
    if any(not 1 <= node <= code.n for node in nodes):
        msg = f"{stem}: nodes {nodes} outside 1..{code.n}"
        raise ParamError(msg)
    if len(nodes) < code.k:
        msg = f"{stem}: need {code.k} shards, found {len(nodes)}"
        raise InsufficientShards(msg)

    stripe_count = manifest.header.stripe_count
    if stripe_count == 0:
        data = b""
    else:
        rows = GF256.Zeros((code.k, code.m, stripe_count))
        for position, node in enumerate(nodes):
            _, shard_rows = read_shard(
                shard_path(directory, stem, node), manifest.header, node
            )
            rows[position] = shard_rows
        grids = code.decode_any_k(nodes, rows)
        data = stripe_join(grids, manifest.original_length)

    if zlib.crc32(data) != manifest.checksum:
        msg = f"{stem}: CRC-32 of decoded data does not match the manifest"
        raise ChecksumMismatch(msg)
    LOGGER.info("Decoded %s from nodes %s", stem, nodes)
    return data


def repair_shard(directory: Path, stem: str, failed: int) -> RepairReport:
    """
    Rebuild the shard of node ``failed`` from the cells its repair plan names.

    Only shards that hold at least one planned cell are opened.
    """
    manifest = read_manifest(directory, stem)
    code = manifest.header.code()
    plan = code.plan_repair(failed)
    nodes = tuple(sorted({cell.node for cell in plan.reads}))
    stripe_count = manifest.header.stripe_count

    rows: dict[int, FieldArray] = {}
    for node in nodes:
        path = shard_path(directory, stem, node)
        if not path.exists():
            msg = f"{stem}: repair of node {failed} needs missing shard {node}"
            raise InsufficientShards(msg)
        _, rows[node] = read_shard(path, manifest.header, node)

    if stripe_count:
        cells = {cell: rows[cell.node][cell.column - 1] for cell in plan.reads}
        rebuilt = execute(plan, cells)
    else:
        rebuilt = GF256.Zeros((code.m, 0))
    header = ShardHeader.for_code(code, failed, stripe_count)
    write_shard(shard_path(directory, stem, failed), header, rebuilt)

    LOGGER.info(
        "Repaired node %s of %s reading %s symbols per stripe from nodes %s",
        failed,
        stem,
        plan.bandwidth,
        nodes,
    )
    return RepairReport(
        node=failed,
        symbols_per_stripe=plan.bandwidth,
        stripe_count=stripe_count,
        nodes_read=nodes,
        ratio=plan.bandwidth / (code.k * code.m),
    )
