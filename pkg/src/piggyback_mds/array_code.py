"""Machinery shared by both piggybacking code families."""

from __future__ import annotations

import itertools
import math
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np

from .const import LOGGER, MDS_EXHAUSTIVE_LIMIT, MDS_SAMPLE_COUNT, MDS_SAMPLE_SEED
from .errors import (
    DuplicateRow,
    NotDataNode,
    NotParityNode,
    ParamError,
    ShapeError,
    SingularSystem,
)
from .field import GF256

if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence

    from galois import FieldArray

    from .base_mds import ParityMatrix
    from .data import Cell, Stripe
    from .repair_plan import RepairPlan


def partition(count: int, parts: int) -> tuple[tuple[int, ...], ...]:
    """
    Split nodes 1..count into ``parts`` consecutive subsets.

    The first count - (count // parts) * parts subsets get one extra node.
    """
    base, extra = divmod(count, parts)
    subsets = []
    start = 1
    for index in range(parts):
        size = base + (1 if index < extra else 0)
        subsets.append(tuple(range(start, start + size)))
        start += size
    return tuple(subsets)


def cell_sum(grid: FieldArray, cells: Sequence[Cell]) -> FieldArray:
    """Return the field sum of ``cells`` of ``grid`` (batch axes preserved)."""
    total = grid[cells[0].index()].copy()
    for cell in cells[1:]:
        total = total + grid[cell.index()]
    return total


@dataclass(frozen=True)
class MdsReport:
    """Outcome of an any-k decodability check."""

    passed: bool
    checked: int
    exhaustive: bool
    witness: tuple[int, ...] | None = None


@dataclass(frozen=True)
class PiggybackCode(ABC):
    """
    Base class for an (n, k, m) piggybacking array code.

    Subclasses describe their layout and implement the encoder and the two
    single-node repair planners; decoding and MDS verification work on the
    composed generator matrix and are shared.
    """

    variant: int
    n: int
    k: int
    m: int
    L: int
    base: ParityMatrix

    @property
    def r(self) -> int:
        """Number of parity nodes."""
        return self.n - self.k

    def __str__(self) -> str:
        return f"C{self.variant}({self.n},{self.k},{self.m},{self.L})"

    @abstractmethod
    def _encode(self, data: FieldArray) -> Stripe:
        """Encode a validated k×m(×batch) data grid."""

    @abstractmethod
    def plan_repair_data(self, t: int) -> RepairPlan:
        """Plan the repair of data node ``t``."""

    @abstractmethod
    def plan_repair_parity(self, t: int) -> RepairPlan:
        """Plan the repair of parity node ``t``."""

    def encode(self, data: FieldArray) -> Stripe:
        """
        Encode a k×m data grid into an n×m stripe.

        Any trailing axes are treated as independent stripes, so a
        (k, m, S) array encodes S stripes at once.
        """
        if data.ndim < 2 or data.shape[:2] != (self.k, self.m):
            msg = f"expected data of shape ({self.k}, {self.m}, ...), got {data.shape}"
            raise ShapeError(msg)
        return self._encode(data)

    def plan_repair(self, t: int) -> RepairPlan:
        """Plan the repair of node ``t``, data or parity."""
        if 1 <= t <= self.k:
            return self.plan_repair_data(t)
        return self.plan_repair_parity(t)

    def _require_data_node(self, t: int) -> None:
        if not 1 <= t <= self.k:
            msg = f"node {t} is not a data node of a code with k = {self.k}"
            raise NotDataNode(msg)

    def _require_parity_node(self, t: int) -> None:
        if not self.k < t <= self.n:
            msg = f"node {t} is not a parity node (expected {self.k + 1}..{self.n})"
            raise NotParityNode(msg)

    @cached_property
    def generator(self) -> FieldArray:
        """
        The (n·m)×(k·m) generator of the composed linear map.

        Row (v-1)·m + (c-1) gives cell (v, c); column (i-1)·m + (j-1) is data
        cell (i, j). Built by encoding the k·m unit data grids in one batch.
        """
        size = self.k * self.m
        units = GF256.Identity(size).reshape(self.k, self.m, size)
        return self.encode(units).reshape(self.n * self.m, size)

    def _restricted(self, nodes: Sequence[int]) -> FieldArray:
        rows = [(v - 1) * self.m + c for v in nodes for c in range(self.m)]
        return self.generator[rows]

    def decode_any_k(self, nodes: Sequence[int], rows: FieldArray) -> FieldArray:
        """
        Recover the k×m data grid from the rows stored on any k nodes.

        ``rows`` has shape (k, m, ...) in the order of ``nodes``.
        """
        nodes = tuple(nodes)
        if len(nodes) != self.k:
            msg = f"need exactly {self.k} nodes, got {len(nodes)}"
            raise ParamError(msg)
        if len(set(nodes)) != len(nodes):
            msg = f"nodes {nodes} contain duplicates"
            raise DuplicateRow(msg)
        if not all(1 <= v <= self.n for v in nodes):
            msg = f"nodes {nodes} outside 1..{self.n}"
            raise ParamError(msg)
        if rows.shape[:2] != (self.k, self.m):
            msg = f"expected rows of shape ({self.k}, {self.m}, ...), got {rows.shape}"
            raise ShapeError(msg)

        if nodes == tuple(range(1, self.k + 1)):
            return rows.copy()

        tail = rows.shape[2:]
        try:
            inverse = np.linalg.inv(self._restricted(nodes))
        except np.linalg.LinAlgError as exception:
            msg = f"nodes {nodes} do not determine the data: {exception}"
            raise SingularSystem(msg) from exception
        data = inverse @ rows.reshape(self.k * self.m, -1)
        return data.reshape(self.k, self.m, *tail)

    def _subsets(self) -> tuple[Iterator[tuple[int, ...]], bool]:
        total = math.comb(self.n, self.k)
        nodes = range(1, self.n + 1)
        if total <= MDS_EXHAUSTIVE_LIMIT:
            return itertools.combinations(nodes, self.k), True
        rng = random.Random(MDS_SAMPLE_SEED)
        sampled = (
            tuple(sorted(rng.sample(nodes, self.k))) for _ in range(MDS_SAMPLE_COUNT)
        )
        return sampled, False

    def verify_mds(self) -> MdsReport:
        """Check that every k-subset of nodes (or a large sample) is decodable."""
        subsets, exhaustive = self._subsets()
        full_rank = self.k * self.m
        checked = 0
        for subset in subsets:
            checked += 1
            if np.linalg.matrix_rank(self._restricted(subset)) != full_rank:
                LOGGER.warning("%s is not MDS: nodes %s are dependent", self, subset)
                return MdsReport(
                    passed=False, checked=checked, exhaustive=exhaustive, witness=subset
                )
        LOGGER.debug("%s passed the MDS check on %s subsets", self, checked)
        return MdsReport(passed=True, checked=checked, exhaustive=exhaustive)
