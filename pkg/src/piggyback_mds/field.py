"""
Arithmetic in GF(2^8), the symbol alphabet of every code in this package.

Symbols are bytes. The field is defined by the reduction polynomial
x^8 + x^4 + x^3 + x^2 + 1 (0x11D). Scalar helpers work on plain ``int`` values;
bulk work uses ``GF256`` arrays directly.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import galois

from .const import FIELD_ORDER, REDUCTION_POLY
from .errors import ZeroInverse

if TYPE_CHECKING:
    from collections.abc import Iterable

    from .data import FieldElement

GF256 = galois.GF(FIELD_ORDER, irreducible_poly=REDUCTION_POLY)


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    """Return a + b (bitwise XOR)."""
    return int(GF256(a) + GF256(b))


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    """Return the carry-less product of a and b reduced by 0x11D."""
    return int(GF256(a) * GF256(b))


def inv(a: FieldElement) -> FieldElement:
    """Return the multiplicative inverse of a."""
    if a == 0:
        msg = "0 has no multiplicative inverse in GF(2^8)"
        raise ZeroInverse(msg)
    return int(GF256(a) ** -1)


def div(a: FieldElement, b: FieldElement) -> FieldElement:
    """Return a / b."""
    return mul(a, inv(b))


def linear_combination(
    terms: Iterable[tuple[FieldElement, galois.FieldArray]],
) -> galois.FieldArray:
    """
    Return the sum of coefficient * value over ``terms``.

    Coefficients are field elements. They are lifted into GF256 before
    multiplying, since a FieldArray times a plain int is repeated addition.
    """
    total = None
    for coefficient, value in terms:
        if coefficient == 0:
            continue
        term = value if coefficient == 1 else GF256(coefficient) * value
        total = term if total is None else total + term
    if total is None:
        msg = "linear combination needs at least one non-zero term"
        raise ValueError(msg)
    return total
