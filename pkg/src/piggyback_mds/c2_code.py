"""
The second piggybacking family C2(n, k, m = s·r, L).

Columns come in s groups of r. Inside a group, column i rotates its parities
down by i - 1 so the diagonal always holds f_1. Protect symbols of data subset
i are dealt into r(r - 1) slots on the off-diagonal parity cells of group
s - i + 1, and every off-diagonal pair of cells (x, i) / (i, x) of a group is
then mixed by [[1, 1], [theta, 1]] so a parity node can be rebuilt from its
partners.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache, cached_property
from typing import TYPE_CHECKING, NamedTuple

from .array_code import PiggybackCode, cell_sum, partition
from .base_mds import make_base_code
from .const import DEFAULT_THETA, FIELD_ORDER, LOGGER, VARIANT_C2
from .data import Cell
from .errors import MdsViolation, ParamError
from .field import GF256, add, inv
from .repair_plan import Base, PlanBuilder

if TYPE_CHECKING:
    from galois import FieldArray

    from .array_code import MdsReport
    from .data import Stripe
    from .repair_plan import Operand, RepairPlan, Temp


class PiggybackSlot(NamedTuple):
    """Slot j of data subset i and the parity cell it rides on."""

    subset: int
    slot: int
    target: Cell
    terms: tuple[Cell, ...]

    def __str__(self) -> str:
        terms = " + ".join(str(cell) for cell in self.terms)
        return f"g[{self.subset},{self.slot}] -> {self.target}: {terms}"


class TransformPair(NamedTuple):
    """
    Two coupled parity cells of one column group.

    With A the pre-transform value of ``cell_high`` and B that of
    ``cell_low``, the stored values are A + B and theta·A + B.
    """

    group: int
    first: int
    second: int
    cell_high: Cell
    cell_low: Cell


def check_c2_params(n: int, k: int, s: int, L: int, theta: int) -> None:
    """Raise ParamError unless the parameters describe a valid C2 code."""
    r = n - k
    if k < 1 or n > FIELD_ORDER:
        msg = f"need 1 <= k and n <= {FIELD_ORDER}, got n = {n}, k = {k}"
        raise ParamError(msg)
    if not 2 <= s <= r:
        msg = f"C2 needs 2 <= s <= r = {r}, got s = {s}"
        raise ParamError(msg)
    if not 1 <= L < s:
        msg = f"C2 needs 1 <= L < s = {s}, got L = {L}"
        raise ParamError(msg)
    if L > k:
        msg = f"C2 cannot split k = {k} data nodes into L = {L} subsets"
        raise ParamError(msg)
    if not 2 <= theta < FIELD_ORDER:
        msg = f"theta must be a field element other than 0 and 1, got {theta:#x}"
        raise ParamError(msg)


def slot_position(j: int, r: int) -> tuple[int, int]:
    """Return (parity row x, column within group) of slot ``j``."""
    x = (j - 1) // (r - 1) + 1
    offset = j - (x - 1) * (r - 1)
    return x, offset if offset < x else offset + 1


@dataclass(frozen=True)
class C2Spec(PiggybackCode):
    """A validated C2 layout."""

    s: int
    theta: int
    partition: tuple[tuple[int, ...], ...]
    slots: tuple[PiggybackSlot, ...]
    pairs: tuple[TransformPair, ...]

    def __str__(self) -> str:
        return f"{super().__str__()}[theta={self.theta:#04x}]"

    def subset_of(self, node: int) -> int:
        """Return the 1-based subset index of data node ``node``."""
        for index, members in enumerate(self.partition, 1):
            if node in members:
                return index
        msg = f"node {node} is not a data node of {self}"
        raise ParamError(msg)

    def group_columns(self, group: int) -> range:
        """Columns of group ``group``."""
        return range((group - 1) * self.r + 1, group * self.r + 1)

    def shifted_row(self, row: int, column: int) -> int:
        """Base codeword row whose raw parity is stored at (row, column)."""
        x = row - self.k
        i = (column - 1) % self.r + 1
        return self.k + (x - i) % self.r + 1

    def diagonal(self, column: int) -> Cell:
        """The parity cell of ``column`` that stores plain f_1."""
        return Cell(self.k + (column - 1) % self.r + 1, column)

    @cached_property
    def _slot_by_term(self) -> dict[Cell, PiggybackSlot]:
        return {cell: slot for slot in self.slots for cell in slot.terms}

    @cached_property
    def _slot_at(self) -> dict[Cell, PiggybackSlot]:
        return {slot.target: slot for slot in self.slots}

    @cached_property
    def _pair_at(self) -> dict[Cell, TransformPair]:
        return {
            cell: pair for pair in self.pairs for cell in (pair.cell_high, pair.cell_low)
        }

    def slot_of(self, cell: Cell) -> PiggybackSlot:
        """Return the slot that protect symbol ``cell`` belongs to."""
        try:
            return self._slot_by_term[cell]
        except KeyError as exception:
            msg = f"{cell} is not a protect symbol of {self}"
            raise ParamError(msg) from exception

    def slot_at(self, cell: Cell) -> PiggybackSlot | None:
        """Return the slot riding on parity cell ``cell``, if any."""
        return self._slot_at.get(cell)

    def pair_at(self, cell: Cell) -> TransformPair:
        """Return the transform pair containing ``cell``."""
        return self._pair_at[cell]

    def _encode(self, data: FieldArray) -> Stripe:
        codewords = self.base.encode_columns(data)
        stripe = codewords.copy()
        # rotate
        for column in range(1, self.m + 1):
            rows = [
                self.shifted_row(row, column) - 1
                for row in range(self.k + 1, self.n + 1)
            ]
            stripe[self.k :, column - 1] = codewords[rows, column - 1]

        # piggyback
        for slot in self.slots:
            index = slot.target.index()
            stripe[index] = stripe[index] + cell_sum(codewords, slot.terms)

        # mix each off-diagonal pair
        theta = GF256(self.theta)
        for pair in self.pairs:
            high, low = pair.cell_high.index(), pair.cell_low.index()
            a, b = stripe[high].copy(), stripe[low].copy()
            stripe[high] = a + b
            stripe[low] = theta * a + b
        return stripe

    def plan_repair_data(self, t: int) -> RepairPlan:
        """
        Plan the repair of data node ``t`` in subset u.

        The last u·r columns are decoded from the other data rows and their
        diagonal parities. Each transform pair holding a needed slot is solved
        once, and the slot sum is peeled down to node t's protect symbol.
        """
        self._require_data_node(t)
        u = self.subset_of(t)
        plan = PlanBuilder(self, t)
        first = (self.s - u) * self.r + 1
        decoded = range(first, self.m + 1)
        for column in decoded:
            sources: list[tuple[int, Operand]] = [
                (row, plan.read(Cell(row, column)))
                for row in range(1, self.k + 1)
                if row != t
            ]
            sources.append((self.k + 1, plan.read(self.diagonal(column))))
            plan.decode_column(column, sources)

        outputs: dict[int, Operand] = {column: Base(t, column) for column in decoded}
        solved: dict[Cell, Temp] = {}
        for column in range(1, first):
            erased = Cell(t, column)
            slot = self.slot_of(erased)
            if slot.target not in solved:
                pair = self.pair_at(slot.target)
                high, low = pair.cell_high, pair.cell_low
                solved[high], solved[low] = plan.pair_solve(
                    (f"f'{high}", f"f'{low}"),
                    (plan.read(high), plan.read(low)),
                    self.theta,
                )
            terms: list[tuple[int, Operand]] = [
                (1, solved[slot.target]),
                (1, Base(self.shifted_row(*slot.target), slot.target.column)),
            ]
            terms.extend((1, plan.read(cell)) for cell in slot.terms if cell != erased)
            outputs[column] = plan.combine(f"a{erased}", terms)
        return plan.build([outputs[column] for column in range(1, self.m + 1)])

    def plan_repair_parity(self, t: int) -> RepairPlan:
        """
        Plan the repair of parity node ``t`` = k + x.

        Column x of every group is decoded from the data rows, which gives the
        raw value of every partner cell (k + i, x). Adding the partner's slot
        sum yields its pre-transform value, and the stored partner then fixes
        node t's own cell (k + x, i).
        """
        self._require_parity_node(t)
        x = t - self.k
        plan = PlanBuilder(self, t)
        for group in range(1, self.s + 1):
            column = self.group_columns(group)[x - 1]
            plan.decode_column(
                column,
                [(row, plan.read(Cell(row, column))) for row in range(1, self.k + 1)],
            )

        theta_inv = inv(self.theta)
        outputs: list[Operand] = []
        for group in range(1, self.s + 1):
            columns = self.group_columns(group)
            for i, column in enumerate(columns, 1):
                if i == x:
                    outputs.append(Base(self.k + 1, column))
                    continue
                partner = Cell(self.k + i, columns[x - 1])
                known = self._pre_transform(plan, partner)
                stored = plan.read(partner)
                if x < i:
                    terms = [(theta_inv, stored), (add(theta_inv, 1), known)]
                else:
                    terms = [(1, stored), (add(self.theta, 1), known)]
                outputs.append(plan.combine(f"f''{Cell(t, column)}", terms))
        return plan.build(outputs)

    def _pre_transform(self, plan: PlanBuilder, cell: Cell) -> Operand:
        """Pre-transform value of parity ``cell`` from its raw parity and slot."""
        raw = Base(self.shifted_row(*cell), cell.column)
        slot = self.slot_at(cell)
        if slot is None:
            return raw
        return plan.combine(
            f"f'{cell}", [(1, raw)] + [(1, plan.read(term)) for term in slot.terms]
        )


def c2_verify_mds(spec: C2Spec) -> MdsReport:
    """Check the any-k property of ``spec``."""
    return spec.verify_mds()


@cache
def _build_c2(n: int, k: int, s: int, L: int, theta: int) -> C2Spec:
    check_c2_params(n, k, s, L, theta)
    r = n - k
    m = s * r
    subsets = partition(k, L)
    stride = r * (r - 1)

    slots = []
    for i, members in enumerate(subsets, 1):
        width = (s - i) * r
        dealt: dict[int, list[Cell]] = {j: [] for j in range(1, stride + 1)}
        protect = [Cell(node, column) for node in members for column in range(1, width + 1)]
        for position, cell in enumerate(protect):
            dealt[position % stride + 1].append(cell)
        group_start = (s - i) * r
        for j, terms in dealt.items():
            if not terms:
                continue
            x, within = slot_position(j, r)
            slots.append(
                PiggybackSlot(
                    subset=i,
                    slot=j,
                    target=Cell(k + x, group_start + within),
                    terms=tuple(terms),
                )
            )

    pairs = tuple(
        TransformPair(
            group=group,
            first=x,
            second=i,
            cell_high=Cell(k + x, (group - 1) * r + i),
            cell_low=Cell(k + i, (group - 1) * r + x),
        )
        for group in range(1, s + 1)
        for x in range(1, r + 1)
        for i in range(x + 1, r + 1)
    )
    LOGGER.debug(
        "C2(%s,%s,%s,%s): %s slots, %s transform pairs", n, k, m, L, len(slots), len(pairs)
    )
    return C2Spec(
        variant=VARIANT_C2,
        n=n,
        k=k,
        m=m,
        L=L,
        base=make_base_code(n, k),
        s=s,
        theta=theta,
        partition=subsets,
        slots=tuple(slots),
        pairs=pairs,
    )


def c2_spec(
    n: int,
    k: int,
    s: int,
    L: int,
    theta: int = DEFAULT_THETA,
    *,
    verify: bool = False,
) -> C2Spec:
    """
    Build and validate the C2(n, k, s·(n - k), L) layout.

    With ``verify`` the any-k property is checked, and if ``theta`` fails the
    remaining coefficients 2..255 are tried in order.
    """
    spec = _build_c2(n, k, s, L, theta)
    if not verify:
        return spec

    report = c2_verify_mds(spec)
    if report.passed:
        return spec
    for candidate in range(2, FIELD_ORDER):
        if candidate == theta:
            continue
        fallback = _build_c2(n, k, s, L, candidate)
        if c2_verify_mds(fallback).passed:
            LOGGER.warning(
                "%s is not MDS (nodes %s); falling back to theta = %#04x",
                spec,
                report.witness,
                candidate,
            )
            return fallback
    msg = f"no theta makes {spec} MDS"
    raise MdsViolation(msg, witness=report.witness)
