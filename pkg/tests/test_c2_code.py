"""Tests for the C2 construction, encoder and decoder."""

import itertools

import numpy as np
import pytest

from piggyback_mds.c2_code import C2Spec, c2_spec, c2_verify_mds, slot_position
from piggyback_mds.data import Cell
from piggyback_mds.errors import NotDataNode, ParamError, ShapeError
from piggyback_mds.field import GF256


def _slot(spec: C2Spec, subset: int, j: int):
    return next(slot for slot in spec.slots if (slot.subset, slot.slot) == (subset, j))


def _undo_transforms(spec: C2Spec, stripe):
    stage_c = stripe.copy()
    theta = GF256(spec.theta)
    for pair in spec.pairs:
        high, low = stripe[pair.cell_high.index()], stripe[pair.cell_low.index()]
        a = (high - low) / (GF256(1) + theta)
        stage_c[pair.cell_high.index()] = a
        stage_c[pair.cell_low.index()] = high - a
    return stage_c


def test_partition_and_groups(c2_golden: C2Spec) -> None:
    """Data nodes split in halves; groups are blocks of four columns."""
    assert c2_golden.partition == ((1, 2, 3, 4), (5, 6, 7, 8))
    assert c2_golden.m == 16
    assert list(c2_golden.group_columns(3)) == [9, 10, 11, 12]


def test_slot_positions() -> None:
    """Slots skip the diagonal of each parity row."""
    r = 4
    assert [slot_position(j, r) for j in range(1, 13)] == [
        (1, 2), (1, 3), (1, 4),
        (2, 1), (2, 3), (2, 4),
        (3, 1), (3, 2), (3, 4),
        (4, 1), (4, 2), (4, 3),
    ]  # fmt: skip


def test_golden_slots(c2_golden: C2Spec) -> None:
    """Slots of the second subset follow the worked example."""
    slot = _slot(c2_golden, 2, 1)
    assert slot.terms == (Cell(5, 1), Cell(6, 5), Cell(8, 1))
    assert slot.target == Cell(9, 10)
    for j in range(1, 13):
        slot = _slot(c2_golden, 2, j)
        x, within = slot_position(j, 4)
        assert slot.target == Cell(8 + x, 8 + within)
        assert len(slot.terms) == (3 if j <= 8 else 2)
        assert all((cell.column - j) % 4 == 0 for cell in slot.terms)
    for j in range(1, 13):
        slot = _slot(c2_golden, 1, j)
        assert slot.target.column in range(13, 17)
        assert len(slot.terms) == 4


def test_golden_shift(c2_golden: C2Spec) -> None:
    """Column 2 of any group stores f_4 in row k + 1 and f_1 on the diagonal."""
    for group in range(1, 5):
        column = (group - 1) * 4 + 2
        assert c2_golden.shifted_row(9, column) == 12
        assert c2_golden.diagonal(column) == Cell(10, column)
        assert c2_golden.shifted_row(10, column) == 9


def test_golden_transform(c2_golden: C2Spec, random_data) -> None:
    """Row k + 2 of column 1 holds theta·f'_1(a_2) + f'_2(a_1) in a piggyback-free group."""
    data = random_data(8, 16, 3, seed=31)
    stripe = c2_golden.encode(data)
    codewords = c2_golden.base.encode_columns(data)
    f1_of_col2 = codewords[c2_golden.shifted_row(9, 2) - 1, 1]
    f2_of_col1 = codewords[c2_golden.shifted_row(10, 1) - 1, 0]
    assert np.array_equal(stripe[9, 0], GF256(2) * f1_of_col2 + f2_of_col1)
    assert np.array_equal(stripe[8, 1], f1_of_col2 + f2_of_col1)
    assert len(c2_golden.pairs) == 4 * 6


def test_encode_zero(c2_golden: C2Spec) -> None:
    """Zero data encodes to the zero stripe."""
    assert not c2_golden.encode(GF256.Zeros((8, 16))).any()


def test_encode_unit(c2_golden: C2Spec) -> None:
    """A unit symbol touches column 1 parities, their partners and slot (1, 1)."""
    data = GF256.Zeros((8, 16))
    data[0, 0] = 1
    stripe = c2_golden.encode(data)
    slot = _slot(c2_golden, 1, 1)
    assert Cell(1, 1) in slot.terms
    pair = c2_golden.pair_at(slot.target)
    changed = {Cell(int(v) + 1, int(c) + 1) for v, c in zip(*np.nonzero(stripe))}
    expected = {Cell(1, 1)} | {Cell(row, 1) for row in range(9, 13)}
    # the column 1 parities are mixed into row k + 1 of the other group 1 columns
    expected |= {Cell(9, 2), Cell(9, 3), Cell(9, 4)}
    expected |= {pair.cell_high, pair.cell_low}
    assert changed == expected


def test_stage_inversion(c2_golden: C2Spec, random_data) -> None:
    """Undoing transforms, slots and shifts gives back base codewords."""
    data = random_data(8, 16, 5, seed=37)
    stripe = c2_golden.encode(data)
    codewords = c2_golden.base.encode_columns(data)
    stage_c = _undo_transforms(c2_golden, stripe)
    for slot in c2_golden.slots:
        for cell in slot.terms:
            stage_c[slot.target.index()] -= codewords[cell.index()]
    for column in range(1, 17):
        for row in range(9, 13):
            original = c2_golden.shifted_row(row, column)
            assert np.array_equal(
                stage_c[row - 1, column - 1], codewords[original - 1, column - 1]
            )


def test_encode_shape_checked(c2_golden: C2Spec) -> None:
    """The data grid must be k×m."""
    with pytest.raises(ShapeError):
        c2_golden.encode(GF256.Zeros((8, 12)))


@pytest.mark.parametrize(
    ("n", "k", "s", "L", "theta"),
    [
        (8, 6, 3, 1, 2),
        (12, 8, 5, 2, 2),  # s > r
        (12, 8, 4, 4, 2),  # L >= s
        (12, 8, 4, 2, 1),
        (12, 8, 4, 2, 0),
    ],
)
def test_invalid_parameters(n: int, k: int, s: int, L: int, theta: int) -> None:
    """Construction constraints are enforced."""
    with pytest.raises(ParamError):
        c2_spec(n, k, s, L, theta)


def test_str_mentions_theta(c2_golden: C2Spec) -> None:
    """The printable name carries the parameters and theta."""
    assert str(c2_golden) == "C2(12,8,16,2)[theta=0x02]"


def test_decode_every_k_subset(c2_mds: C2Spec, random_data) -> None:
    """All 495 node subsets recover ten random stripes."""
    data = random_data(8, 16, 10, seed=41)
    stripe = c2_mds.encode(data)
    subsets = list(itertools.combinations(range(1, 13), 8))
    assert len(subsets) == 495
    for nodes in subsets:
        rows = stripe[[node - 1 for node in nodes]]
        assert np.array_equal(c2_mds.decode_any_k(nodes, rows), data)


def test_verify_mds_golden(c2_mds: C2Spec) -> None:
    """Every 8-subset of C2(12,8,16,2) determines the data."""
    report = c2_verify_mds(c2_mds)
    assert report.passed, report.witness
    assert report.checked == 495
    assert report.exhaustive


def test_verify_on_construction() -> None:
    """Opting into verification yields a code that passes the check."""
    spec = c2_spec(8, 4, 2, 1, verify=True)
    assert spec.theta not in (0, 1)
    report = spec.verify_mds()
    assert report.passed
    assert report.checked == 70


def test_data_planner_refuses_parity(c2_golden: C2Spec) -> None:
    """Parity nodes are not data nodes."""
    with pytest.raises(NotDataNode):
        c2_golden.plan_repair_data(9)
