"""Systematic (n, k) MDS base code built from a Cauchy matrix."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache, cached_property
from typing import TYPE_CHECKING

import numpy as np

from .const import FIELD_ORDER, LOGGER
from .errors import DuplicateRow, LengthMismatch, ParamError, SingularSystem
from .field import GF256, inv

if TYPE_CHECKING:
    from collections.abc import Sequence

    from galois import FieldArray

    from .data import FieldElement


@dataclass(frozen=True)
class ParityMatrix:
    """
    The r×k coefficient matrix of the parity maps f_1..f_r.

    Entry (j, i) is the coefficient of data symbol i in parity j. Stacked under
    the k×k identity it forms the n×k generator of one column instance, and
    every k×k submatrix of that stack is invertible.
    """

    n: int
    k: int
    coefficients: tuple[tuple[FieldElement, ...], ...]

    @property
    def r(self) -> int:
        """Number of parity rows."""
        return self.n - self.k

    @cached_property
    def matrix(self) -> FieldArray:
        """The parity matrix as an r×k field array."""
        return GF256(np.array(self.coefficients, dtype=np.uint8))

    @cached_property
    def generator(self) -> FieldArray:
        """The n×k stacked generator [I_k; P]."""
        stacked = GF256.Zeros((self.n, self.k))
        stacked[: self.k] = GF256.Identity(self.k)
        stacked[self.k :] = self.matrix
        return stacked

    def encode_column(self, data: Sequence[FieldElement]) -> list[FieldElement]:
        """Return the r parities of one column of k data symbols."""
        if len(data) != self.k:
            msg = f"expected {self.k} data symbols, got {len(data)}"
            raise LengthMismatch(msg)
        parities = self.matrix @ GF256(np.array(data, dtype=np.uint8))
        return [int(value) for value in parities]

    def encode_columns(self, data: FieldArray) -> FieldArray:
        """
        Encode every column of a k×m grid (trailing batch axes allowed).

        Returns the n×m grid whose column i is the base codeword of data
        column i.
        """
        if data.shape[0] != self.k:
            msg = f"expected {self.k} data rows, got {data.shape[0]}"
            raise LengthMismatch(msg)
        tail = data.shape[1:]
        parities = self.matrix @ data.reshape(self.k, -1)
        codewords = GF256.Zeros((self.n, *tail))
        codewords[: self.k] = data
        codewords[self.k :] = parities.reshape(self.r, *tail)
        return codewords

    def decode_any_k(
        self, cells: Sequence[tuple[int, FieldElement]]
    ) -> list[FieldElement]:
        """Solve for the k data symbols from k (codeword row, value) pairs."""
        rows = tuple(row for row, _ in cells)
        values = GF256(np.array([value for _, value in cells], dtype=np.uint8))
        data = self.recovery_matrix(rows)[: self.k] @ values
        return [int(value) for value in data]

    def recovery_matrix(self, rows: tuple[int, ...]) -> FieldArray:
        """
        Return the n×k map from the values of ``rows`` to the whole codeword.

        Rows are 1-based codeword indices; the result is cached per row tuple.
        """
        return _recovery_matrix(self, rows)

    def reconstruct(self, rows: tuple[int, ...], values: FieldArray) -> FieldArray:
        """Rebuild all n codeword values from the k observed ``values`` rows."""
        tail = values.shape[1:]
        flat = self.recovery_matrix(rows) @ values.reshape(self.k, -1)
        return flat.reshape(self.n, *tail)


@cache
def _recovery_matrix(pm: ParityMatrix, rows: tuple[int, ...]) -> FieldArray:
    if len(rows) != pm.k:
        msg = f"expected {pm.k} rows, got {len(rows)}"
        raise LengthMismatch(msg)
    if len(set(rows)) != len(rows):
        msg = f"rows {rows} contain duplicates"
        raise DuplicateRow(msg)
    if not all(1 <= row <= pm.n for row in rows):
        msg = f"rows {rows} outside 1..{pm.n}"
        raise ParamError(msg)
    selected = pm.generator[[row - 1 for row in rows]]
    try:
        inverse = np.linalg.inv(selected)
    except np.linalg.LinAlgError as exception:
        raise SingularSystem(str(exception)) from exception
    return pm.generator @ inverse


@cache
def make_base_code(n: int, k: int) -> ParityMatrix:
    """
    Build the Cauchy-derived systematic parity matrix for an (n, k) code.

    C(j, i) = 1 / (x_j + y_i) with x_j = j - 1 and y_i = r + i - 1, so all
    evaluation points are distinct bytes as long as n <= 256.
    """
    if n > FIELD_ORDER:
        msg = f"n = {n} exceeds the field size {FIELD_ORDER}"
        raise ParamError(msg)
    if not 1 <= k < n:
        msg = f"need 1 <= k < n, got n = {n}, k = {k}"
        raise ParamError(msg)
    r = n - k
    coefficients = tuple(
        tuple(inv((j - 1) ^ (r + i - 1)) for i in range(1, k + 1))
        for j in range(1, r + 1)
    )
    LOGGER.debug("Built Cauchy base code (%s, %s)", n, k)
    return ParityMatrix(n=n, k=k, coefficients=coefficients)
