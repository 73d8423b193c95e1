"""Custom types for piggyback_mds."""

from __future__ import annotations

from typing import TYPE_CHECKING, NamedTuple

if TYPE_CHECKING:
    from galois import FieldArray


type FieldElement = int
type Stripe = FieldArray
"""An n×m grid of symbols, optionally with trailing batch axes (one per stripe)."""


class Cell(NamedTuple):
    """One symbol position in a stripe, both coordinates 1-based."""

    node: int
    column: int

    def __str__(self) -> str:
        return f"({self.node},{self.column})"

    def index(self) -> tuple[int, int]:
        """Return the 0-based numpy index of this cell."""
        return self.node - 1, self.column - 1
