"""Tests for GF(2^8) arithmetic."""

import numpy as np
import pytest

from piggyback_mds.errors import ZeroInverse
from piggyback_mds.field import GF256, add, div, inv, linear_combination, mul


def _shift_and_reduce(a: int, b: int) -> int:
    product = 0
    while b:
        if b & 1:
            product ^= a
        a <<= 1
        if a & 0x100:
            a ^= 0x11D
        b >>= 1
    return product


@pytest.mark.parametrize(
    ("a", "b", "expected"),
    [(0x00, 0x5A, 0x5A), (0x5A, 0x5A, 0x00), (0x0F, 0xF0, 0xFF)],
)
def test_add(a: int, b: int, expected: int) -> None:
    """Addition is XOR."""
    assert add(a, b) == expected


def test_mul_known_values() -> None:
    """Identity and one reduction step."""
    assert mul(0x01, 0xAB) == 0xAB
    assert mul(0x02, 0x80) == 0x1D


def test_mul_matches_bitwise_reference() -> None:
    """The whole table agrees with a shift-and-reduce multiplier."""
    values = GF256(np.arange(256, dtype=np.uint8))
    table = values[:, np.newaxis] * values[np.newaxis, :]
    expected = np.array(
        [[_shift_and_reduce(a, b) for b in range(256)] for a in range(256)],
        dtype=np.uint8,
    )
    assert np.array_equal(table.view(np.ndarray), expected)


def test_inverse() -> None:
    """Known inverses and the involution property."""
    assert inv(0x01) == 0x01
    assert inv(0x02) == 0x8E
    for a in range(1, 256):
        assert mul(a, inv(a)) == 1
        assert inv(inv(a)) == a


def test_inverse_of_zero() -> None:
    """Zero has no inverse."""
    with pytest.raises(ZeroInverse):
        inv(0)
    with pytest.raises(ZeroDivisionError):
        div(5, 0)


def test_distributivity_sample() -> None:
    """a(b + c) = ab + ac over a large random sample."""
    rng = np.random.default_rng(7)
    a, b, c = (GF256(rng.integers(0, 256, 1_000_000, dtype=np.uint8)) for _ in range(3))
    assert np.array_equal(a * (b + c), a * b + a * c)


def test_linear_combination() -> None:
    """Coefficients are field elements, not repeat counts."""
    x = GF256([1, 2, 3])
    y = GF256([4, 5, 6])
    result = linear_combination([(2, x), (0, y), (1, y)])
    assert np.array_equal(result, GF256(2) * x + y)
    with pytest.raises(ValueError, match="non-zero"):
        linear_combination([(0, x)])
