"""Tests for the Cauchy base code."""

import itertools

import numpy as np
import pytest

from piggyback_mds.base_mds import make_base_code
from piggyback_mds.errors import DuplicateRow, LengthMismatch, ParamError
from piggyback_mds.field import GF256


def test_every_square_submatrix_is_invertible() -> None:
    """Each k-row subset of the stacked (4, 2) generator has full rank."""
    pm = make_base_code(4, 2)
    for rows in itertools.combinations(range(4), 2):
        assert np.linalg.matrix_rank(pm.generator[list(rows)]) == 2


def test_parameter_bounds() -> None:
    """n is bounded by the field size and k must be below n."""
    with pytest.raises(ParamError):
        make_base_code(257, 2)
    with pytest.raises(ParamError):
        make_base_code(4, 4)


def test_encode_column() -> None:
    """Zero maps to zero and unit vectors pick out matrix columns."""
    pm = make_base_code(11, 6)
    assert pm.encode_column([0] * 6) == [0] * 5
    for i in range(6):
        unit = [0] * 6
        unit[i] = 1
        assert pm.encode_column(unit) == [int(v) for v in pm.matrix[:, i]]
    with pytest.raises(LengthMismatch):
        pm.encode_column([1, 2, 3])


def test_decode_any_k_round_trip() -> None:
    """Any k rows of a codeword give back the data."""
    pm = make_base_code(12, 8)
    rng = np.random.default_rng(3)
    for _ in range(50):
        data = [int(v) for v in rng.integers(0, 256, 8)]
        codeword = data + pm.encode_column(data)
        rows = sorted(rng.choice(12, 8, replace=False) + 1)
        cells = [(int(row), codeword[row - 1]) for row in rows]
        decoded = pm.decode_any_k(cells)
        assert decoded == data
        assert pm.encode_column(decoded) == codeword[8:]


def test_decode_systematic_and_zero() -> None:
    """Rows 1..k decode to themselves; zero decodes to zero."""
    pm = make_base_code(6, 3)
    assert pm.decode_any_k([(1, 7), (2, 8), (3, 9)]) == [7, 8, 9]
    assert pm.decode_any_k([(4, 0), (5, 0), (6, 0)]) == [0, 0, 0]


def test_decode_rejects_duplicates() -> None:
    """A row may only be given once."""
    pm = make_base_code(6, 3)
    with pytest.raises(DuplicateRow):
        pm.decode_any_k([(1, 1), (1, 1), (4, 2)])


def test_decode_is_linear() -> None:
    """decode(alpha·x + y) = alpha·decode(x) + decode(y)."""
    pm = make_base_code(9, 5)
    rows = (2, 4, 6, 8, 9)
    x = GF256.Random(5, seed=1)
    y = GF256.Random(5, seed=2)
    alpha = GF256(0x53)

    def decode(values):
        return GF256(pm.decode_any_k(list(zip(rows, (int(v) for v in values)))))

    assert np.array_equal(decode(alpha * x + y), alpha * decode(x) + decode(y))


def test_reconstruct_batch() -> None:
    """Batch reconstruction rebuilds every codeword row."""
    pm = make_base_code(7, 4)
    data = GF256.Random((4, 10), seed=5)
    codewords = pm.encode_columns(data)
    rows = (2, 5, 6, 7)
    rebuilt = pm.reconstruct(rows, codewords[[row - 1 for row in rows]])
    assert np.array_equal(rebuilt, codewords)
