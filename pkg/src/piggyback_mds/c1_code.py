"""
The first piggybacking family C1(n, k, m, L).

All n nodes are split into L subsets. The first m - i symbols of every node in
subset i are protect symbols; they are dealt round-robin into r - 1 piggyback
functions per subset, which ride on parity rows 2..r of column m + 1 - i. The
last subset also holds the parity nodes, whose first m - L symbols are dealt
into the same functions so parity nodes repair cheaply too.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache, cached_property
from typing import TYPE_CHECKING, NamedTuple

from .array_code import PiggybackCode, cell_sum, partition
from .base_mds import make_base_code
from .const import FIELD_ORDER, LOGGER, VARIANT_C1
from .data import Cell
from .errors import ParamError
from .repair_plan import Base, PlanBuilder

if TYPE_CHECKING:
    from galois import FieldArray

    from .data import Stripe
    from .repair_plan import Operand, RepairPlan

MIN_PARITY = 4


class PiggybackFn(NamedTuple):
    """One piggyback function g(alpha, beta) and the cell it is added to."""

    alpha: int
    beta: int
    target: Cell
    terms: tuple[Cell, ...]

    def __str__(self) -> str:
        terms = " + ".join(str(cell) for cell in self.terms)
        return f"g({self.alpha},{self.beta}) -> {self.target}: {terms}"


def check_c1_params(n: int, k: int, m: int, L: int) -> None:
    """Raise ParamError unless (n, k, m, L) describes a valid C1 code."""
    r = n - k
    if k < 1 or n > FIELD_ORDER:
        msg = f"need 1 <= k and n <= {FIELD_ORDER}, got n = {n}, k = {k}"
        raise ParamError(msg)
    if r < MIN_PARITY:
        msg = f"C1 needs r = n - k >= {MIN_PARITY}, got r = {r}"
        raise ParamError(msg)
    if not 2 <= m <= r:
        msg = f"C1 needs 2 <= m <= r = {r}, got m = {m}"
        raise ParamError(msg)
    if not 1 <= L < m:
        msg = f"C1 needs 1 <= L < m = {m}, got L = {L}"
        raise ParamError(msg)
    if m - L > r - 2:
        msg = f"C1 needs m - L <= r - 2, got m = {m}, L = {L}, r = {r}"
        raise ParamError(msg)
    if n // L < r:
        msg = f"C1 needs floor(n / L) >= r, got floor({n} / {L}) = {n // L} < {r}"
        raise ParamError(msg)


def parity_alpha(x: int, y: int, r: int) -> int:
    """Index alpha of the last-subset piggyback holding parity cell (k + x, y)."""
    return x + y - 1 if x + y <= r else x + y - r


@dataclass(frozen=True)
class C1Spec(PiggybackCode):
    """A validated C1 layout."""

    partition: tuple[tuple[int, ...], ...]
    piggybacks: tuple[PiggybackFn, ...]

    def subset_of(self, node: int) -> int:
        """Return the 1-based subset index containing ``node``."""
        for index, members in enumerate(self.partition, 1):
            if node in members:
                return index
        msg = f"node {node} outside 1..{self.n}"
        raise ParamError(msg)

    def protect_count(self, i: int) -> int:
        """Number of protect symbols held by subset ``i``."""
        return len(self.partition[i - 1]) * (self.m - i)

    @cached_property
    def _by_term(self) -> dict[Cell, PiggybackFn]:
        return {cell: fn for fn in self.piggybacks for cell in fn.terms}

    @cached_property
    def _by_id(self) -> dict[tuple[int, int], PiggybackFn]:
        return {(fn.alpha, fn.beta): fn for fn in self.piggybacks}

    def piggyback(self, alpha: int, beta: int) -> PiggybackFn | None:
        """Return g(alpha, beta), or None when it has no terms."""
        return self._by_id.get((alpha, beta))

    def piggyback_of(self, cell: Cell) -> PiggybackFn:
        """Return the piggyback function that ``cell`` is a term of."""
        try:
            return self._by_term[cell]
        except KeyError as exception:
            msg = f"{cell} is not a protect symbol of {self}"
            raise ParamError(msg) from exception

    def _encode(self, data: FieldArray) -> Stripe:
        codewords = self.base.encode_columns(data)
        stripe = codewords.copy()
        for fn in self.piggybacks:
            index = fn.target.index()
            stripe[index] = stripe[index] + cell_sum(codewords, fn.terms)
        return stripe

    def plan_repair_data(self, t: int) -> RepairPlan:
        """
        Plan the repair of data node ``t`` in subset i.

        The last i columns are decoded from rows 1..k+1; each remaining symbol
        is peeled out of the piggyback that protects it.
        """
        self._require_data_node(t)
        i = self.subset_of(t)
        plan = PlanBuilder(self, t)
        decoded = range(self.m - i + 1, self.m + 1)
        for column in decoded:
            plan.decode_column(
                column,
                [
                    (row, plan.read(Cell(row, column)))
                    for row in range(1, self.k + 2)
                    if row != t
                ],
            )

        outputs: dict[int, Operand] = {column: Base(t, column) for column in decoded}
        for column in range(1, self.m - i + 1):
            fn = self.piggyback_of(Cell(t, column))
            outputs[column] = plan.combine(
                f"a{Cell(t, column)}", self._peel(plan, fn, Cell(t, column))
            )
        return plan.build([outputs[column] for column in range(1, self.m + 1)])

    def plan_repair_parity(self, t: int) -> RepairPlan:
        """
        Plan the repair of parity node ``t``.

        The last L columns are decoded from the data rows. The first m - L
        symbols are peeled out of the last-subset piggybacks; the piggybacked
        symbols of row t are rebuilt by recomputing g(t - k - 1, beta).
        """
        self._require_parity_node(t)
        x = t - self.k
        plan = PlanBuilder(self, t)
        tail = range(self.m - self.L + 1, self.m + 1)
        for column in tail:
            plan.decode_column(
                column,
                [(row, plan.read(Cell(row, column))) for row in range(1, self.k + 1)],
            )

        outputs: dict[int, Operand] = {}
        for y in range(1, self.m - self.L + 1):
            erased = Cell(t, y)
            fn = self.piggyback_of(erased)
            outputs[y] = plan.combine(f"f{x}[{y}]", self._peel(plan, fn, erased))

        for column in tail:
            fn = self.piggyback(x - 1, self.m + 1 - column)
            if fn is None:
                outputs[column] = Base(t, column)
                continue
            outputs[column] = plan.combine(
                f"f{x}[{column}]+g",
                [(1, Base(t, column))] + [(1, plan.read(cell)) for cell in fn.terms],
            )
        return plan.build([outputs[column] for column in range(1, self.m + 1)])

    @staticmethod
    def _peel(
        plan: PlanBuilder, fn: PiggybackFn, erased: Cell
    ) -> list[tuple[int, Operand]]:
        """Terms whose sum is the erased term of ``fn``."""
        target = fn.target
        terms: list[tuple[int, Operand]] = [
            (1, plan.read(target)),
            (1, Base(target.node, target.column)),
        ]
        terms.extend((1, plan.read(cell)) for cell in fn.terms if cell != erased)
        return terms


def _deal(
    protect: list[Cell], r: int, offset: int = 0
) -> dict[int, list[Cell]]:
    """Deal protect symbols round-robin onto alpha = 1..r-1, shifted by ``offset``."""
    dealt: dict[int, list[Cell]] = {alpha: [] for alpha in range(1, r)}
    for position, cell in enumerate(protect):
        dealt[(position + offset) % (r - 1) + 1].append(cell)
    return dealt


@cache
def c1_spec(n: int, k: int, m: int, L: int) -> C1Spec:
    """Build and validate the C1(n, k, m, L) layout."""
    check_c1_params(n, k, m, L)
    r = n - k
    subsets = partition(n, L)
    piggybacks = []
    for beta, members in enumerate(subsets, 1):
        width = m - beta
        data_nodes = members[: len(members) - r] if beta == L else members
        protect = [
            Cell(node, column) for node in data_nodes for column in range(1, width + 1)
        ]
        offset = (width * r) % (r - 1) if beta == L else 0
        dealt = _deal(protect, r, offset)
        if beta == L:
            for x in range(1, r + 1):
                for y in range(1, width + 1):
                    dealt[parity_alpha(x, y, r)].append(Cell(k + x, y))
        piggybacks.extend(
            PiggybackFn(
                alpha=alpha,
                beta=beta,
                target=Cell(k + 1 + alpha, m + 1 - beta),
                terms=tuple(terms),
            )
            for alpha, terms in dealt.items()
            if terms
        )
    LOGGER.debug("C1(%s,%s,%s,%s): %s piggybacks", n, k, m, L, len(piggybacks))
    return C1Spec(
        variant=VARIANT_C1,
        n=n,
        k=k,
        m=m,
        L=L,
        base=make_base_code(n, k),
        partition=subsets,
        piggybacks=tuple(piggybacks),
    )
