"""Repair plans: what a single-node repair reads and how it recombines it."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING

from .const import LOGGER
from .data import Cell
from .errors import MissingCell, ProgramFault
from .field import GF256, linear_combination

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from galois import FieldArray

    from .array_code import PiggybackCode
    from .base_mds import ParityMatrix
    from .data import FieldElement, Stripe


@dataclass(frozen=True)
class Base:
    """Value of codeword row ``row`` of the base instance in ``column``."""

    row: int
    column: int

    def __str__(self) -> str:
        return f"base[{self.row},{self.column}]"


@dataclass(frozen=True)
class Temp:
    """A named intermediate produced by an earlier step."""

    name: str

    def __str__(self) -> str:
        return self.name


type Operand = Cell | Base | Temp


@dataclass(frozen=True)
class DecodeColumn:
    """
    Rebuild the base codeword of ``column`` from k known codeword rows.

    Produces ``Base(row, column)`` for every row 1..n.
    """

    column: int
    sources: tuple[tuple[int, Operand], ...]

    def describe(self) -> str:
        """Return a one-line description."""
        rows = ", ".join(f"{row}:{operand}" for row, operand in self.sources)
        return f"decode column {self.column} from {rows}"


@dataclass(frozen=True)
class Combine:
    """target = sum of coefficient * operand."""

    target: Temp
    terms: tuple[tuple[FieldElement, Operand], ...]

    def describe(self) -> str:
        """Return a one-line description."""
        parts = [
            str(operand) if coefficient == 1 else f"{coefficient:#04x}*{operand}"
            for coefficient, operand in self.terms
        ]
        return f"{self.target} = {' + '.join(parts)}"


@dataclass(frozen=True)
class PairSolve:
    """
    Undo one pairwise transform.

    Given inputs (A + B, theta*A + B) produce targets (A, B).
    """

    targets: tuple[Temp, Temp]
    inputs: tuple[Operand, Operand]
    theta: FieldElement

    def describe(self) -> str:
        """Return a one-line description."""
        first, second = self.targets
        high, low = self.inputs
        return (
            f"({first}, {second}) = solve [1 1; {self.theta:#04x} 1] "
            f"against ({high}, {low})"
        )


type Step = DecodeColumn | Combine | PairSolve


@dataclass(frozen=True)
class RepairPlan:
    """Everything needed to rebuild one failed node of one stripe."""

    failed: int
    reads: tuple[Cell, ...]
    steps: tuple[Step, ...]
    outputs: tuple[Operand, ...]
    base: ParityMatrix = field(repr=False, compare=False)

    @property
    def bandwidth(self) -> int:
        """Number of symbols downloaded from surviving nodes."""
        return len(self.reads)

    def gather(self, stripe: Stripe) -> dict[Cell, FieldArray]:
        """Pick the planned cells out of a stripe whose failed row is erased."""
        cells = {}
        for cell in self.reads:
            if cell.node == self.failed:
                msg = f"plan for node {self.failed} reads its own cell {cell}"
                raise MissingCell(msg)
            cells[cell] = stripe[cell.index()]
        return cells


class PlanBuilder:
    """Accumulates reads and steps while a planner walks its procedure."""

    def __init__(self, code: PiggybackCode, failed: int) -> None:
        """Initialize."""
        self.code = code
        self.failed = failed
        self._reads: dict[Cell, None] = {}
        self._steps: list[Step] = []

    def read(self, cell: Cell) -> Cell:
        """Add ``cell`` to the read set (once) and return it as an operand."""
        if cell.node == self.failed:
            msg = f"repair of node {self.failed} cannot read {cell}"
            raise ProgramFault(msg)
        self._reads.setdefault(cell)
        return cell

    def decode_column(
        self, column: int, sources: Iterable[tuple[int, Operand]]
    ) -> None:
        """Emit a base-code decode of ``column``."""
        self._steps.append(DecodeColumn(column=column, sources=tuple(sources)))

    def combine(
        self, name: str, terms: Iterable[tuple[FieldElement, Operand]]
    ) -> Temp:
        """Emit a linear combination and return its target."""
        target = Temp(name)
        self._steps.append(Combine(target=target, terms=tuple(terms)))
        return target

    def pair_solve(
        self, names: tuple[str, str], inputs: tuple[Operand, Operand], theta: int
    ) -> tuple[Temp, Temp]:
        """Emit a 2×2 transform inversion and return its two targets."""
        targets = (Temp(names[0]), Temp(names[1]))
        self._steps.append(PairSolve(targets=targets, inputs=inputs, theta=theta))
        return targets

    def build(self, outputs: Sequence[Operand]) -> RepairPlan:
        """Freeze the plan after checking that every reference is defined."""
        plan = RepairPlan(
            failed=self.failed,
            reads=tuple(sorted(self._reads)),
            steps=tuple(self._steps),
            outputs=tuple(outputs),
            base=self.code.base,
        )
        _check_program(plan)
        LOGGER.debug(
            "%s: node %s repairs with %s reads in %s steps",
            self.code,
            self.failed,
            plan.bandwidth,
            len(plan.steps),
        )
        return plan


def _produced(step: Step, n: int) -> Iterable[Operand]:
    match step:
        case DecodeColumn(column=column):
            return (Base(row, column) for row in range(1, n + 1))
        case Combine(target=target):
            return (target,)
        case PairSolve(targets=targets):
            return targets


def _consumed(step: Step) -> Iterable[Operand]:
    match step:
        case DecodeColumn(sources=sources):
            return (operand for _, operand in sources)
        case Combine(terms=terms):
            return (operand for _, operand in terms)
        case PairSolve(inputs=inputs):
            return inputs


def _check_program(plan: RepairPlan) -> None:
    reads = set(plan.reads)
    known: set[Operand] = set()
    used: set[Cell] = {operand for operand in plan.outputs if isinstance(operand, Cell)}
    for step in plan.steps:
        for operand in _consumed(step):
            if isinstance(operand, Cell):
                if operand not in reads:
                    msg = f"step '{step.describe()}' uses unplanned cell {operand}"
                    raise ProgramFault(msg)
                used.add(operand)
            elif operand not in known:
                msg = f"step '{step.describe()}' uses undefined {operand}"
                raise ProgramFault(msg)
        known.update(_produced(step, plan.base.n))
    for operand in plan.outputs:
        if not isinstance(operand, Cell) and operand not in known:
            msg = f"output {operand} is never produced"
            raise ProgramFault(msg)
    if unused := reads - used:
        msg = f"planned reads {sorted(unused)} are never used"
        raise ProgramFault(msg)


def _stack(values: Sequence[FieldArray]) -> FieldArray:
    stacked = GF256.Zeros((len(values), *values[0].shape))
    for index, value in enumerate(values):
        stacked[index] = value
    return stacked


def execute(plan: RepairPlan, source: Stripe | Mapping[Cell, FieldArray]) -> FieldArray:
    """
    Run ``plan`` and return the failed node's m symbols.

    ``source`` is either a stripe (the failed row is never looked at) or a
    mapping holding exactly the planned cells. Every value may carry trailing
    batch axes; the result then has shape (m, ...).
    """
    cells = source if isinstance(source, Mapping) else plan.gather(source)
    env: dict[Operand, FieldArray] = {}

    def value(operand: Operand) -> FieldArray:
        if isinstance(operand, Cell):
            try:
                return cells[operand]
            except KeyError as exception:
                msg = f"cell {operand} was not supplied"
                raise MissingCell(msg) from exception
        try:
            return env[operand]
        except KeyError as exception:
            msg = f"{operand} referenced before it was produced"
            raise ProgramFault(msg) from exception

    for step in plan.steps:
        match step:
            case DecodeColumn(column=column, sources=sources):
                rows = tuple(row for row, _ in sources)
                observed = _stack([value(operand) for _, operand in sources])
                codeword = plan.base.reconstruct(rows, observed)
                for row in range(1, plan.base.n + 1):
                    env[Base(row, column)] = codeword[row - 1]
            case Combine(target=target, terms=terms):
                env[target] = linear_combination(
                    (coefficient, value(operand)) for coefficient, operand in terms
                )
            case PairSolve(targets=(first, second), inputs=(high, low), theta=theta):
                high_value, low_value = value(high), value(low)
                first_value = (high_value - low_value) / (GF256(1) - GF256(theta))
                env[first] = first_value
                env[second] = high_value - first_value
            case _:
                msg = f"unknown step {step!r}"
                raise ProgramFault(msg)

    return _stack([value(operand) for operand in plan.outputs])


def render(plan: RepairPlan) -> str:
    """Return a human-readable listing of ``plan``."""
    lines = [
        f"repair plan for node {plan.failed}: {plan.bandwidth} symbols read",
        "reads:",
        "  " + " ".join(str(cell) for cell in plan.reads),
        "steps:",
    ]
    lines.extend(
        f"  {number}. {step.describe()}" for number, step in enumerate(plan.steps, 1)
    )
    lines.append("outputs:")
    lines.extend(
        f"  column {column} <- {operand}"
        for column, operand in enumerate(plan.outputs, 1)
    )
    return "\n".join(lines)


@dataclass(frozen=True)
class BandwidthTable:
    """Per-node repair bandwidth of one code and the derived ratios."""

    n: int
    k: int
    m: int
    bandwidths: tuple[int, ...]

    @property
    def r(self) -> int:
        """Number of parity nodes."""
        return self.n - self.k

    @property
    def data(self) -> tuple[int, ...]:
        """Bandwidths of the data nodes."""
        return self.bandwidths[: self.k]

    @property
    def parity(self) -> tuple[int, ...]:
        """Bandwidths of the parity nodes."""
        return self.bandwidths[self.k :]

    @property
    def data_average(self) -> Fraction:
        """Average bandwidth over data nodes."""
        return Fraction(sum(self.data), self.k)

    @property
    def parity_average(self) -> Fraction:
        """Average bandwidth over parity nodes."""
        return Fraction(sum(self.parity), self.r)

    @property
    def gamma_all(self) -> Fraction:
        """Average ratio over all nodes, relative to the k·m data symbols."""
        return Fraction(sum(self.bandwidths), self.n * self.k * self.m)

    @property
    def gamma_sys(self) -> Fraction:
        """Average ratio over data nodes."""
        return Fraction(sum(self.data), self.k * self.k * self.m)

    @property
    def gamma_parity(self) -> Fraction:
        """Average ratio over parity nodes."""
        return Fraction(sum(self.parity), self.r * self.k * self.m)


def bandwidth_table(code: PiggybackCode) -> BandwidthTable:
    """Plan the repair of every node of ``code`` and tabulate the bandwidths."""
    bandwidths = tuple(
        code.plan_repair(node).bandwidth for node in range(1, code.n + 1)
    )
    return BandwidthTable(n=code.n, k=code.k, m=code.m, bandwidths=bandwidths)
