"""Tests for validating command-line input."""

from fractions import Fraction
from pathlib import Path

import pytest
import voluptuous as vol

from piggyback_mds.config import (
    BenchConfig,
    CodeConfig,
    command_config,
    parse_int,
    parse_range,
    parse_rate,
    parse_width,
)
from piggyback_mds.const import VARIANT_C1, VARIANT_C2
from piggyback_mds.errors import ParamError


def test_parse_int() -> None:
    """Decimal and hex strings are accepted."""
    assert parse_int("12") == 12
    assert parse_int("0x1d") == 0x1D
    assert parse_int(7) == 7
    with pytest.raises(vol.Invalid):
        parse_int("seven")
    with pytest.raises(vol.Invalid):
        parse_int(True)


def test_parse_range() -> None:
    """Ranges, lists, single values and empty input."""
    assert parse_range("3..6") == (3, 4, 5, 6)
    assert parse_range("4,6,8") == (4, 6, 8)
    assert parse_range("7") == (7,)
    assert parse_range("") == ()
    assert parse_range("1..2,9") == (1, 2, 9)
    with pytest.raises(vol.Invalid):
        parse_range("3..x")


def test_parse_rate_and_width() -> None:
    """Rates lie strictly inside (0, 1); 'r' means s = r."""
    assert parse_rate("0.8") == Fraction(4, 5)
    assert parse_rate("3/4") == Fraction(3, 4)
    with pytest.raises(vol.Invalid):
        parse_rate("1.5")
    assert parse_width("r") is None
    assert parse_width("3") == 3


def test_code_config_defaults_L() -> None:
    """Omitted L resolves to the optimum."""
    config = command_config(
        {"command": "plan", "variant": "1", "n": "12", "k": "7", "m": "4"}
    )
    assert config.code == CodeConfig(VARIANT_C1, 12, 7, 4, None, None, 0x02)
    assert config.code.build().L == 2
    assert config.output_format == "text"


def test_code_config_c2_group_count() -> None:
    """C2 takes s directly or derives it from m."""
    from_s = CodeConfig(VARIANT_C2, 12, 8, None, 2, 4, 2)
    from_m = CodeConfig(VARIANT_C2, 12, 8, 16, 2, None, 2)
    assert from_s.build() == from_m.build()
    with pytest.raises(ParamError):
        CodeConfig(VARIANT_C2, 12, 8, 15, 2, None, 2).build()
    with pytest.raises(ParamError):
        CodeConfig(VARIANT_C2, 12, 8, 12, 2, 4, 2).build()
    with pytest.raises(ParamError):
        CodeConfig(VARIANT_C2, 12, 8, None, 2, None, 2).build()


def test_c1_needs_m() -> None:
    """C1 cannot guess its sub-packetization."""
    with pytest.raises(ParamError):
        CodeConfig(VARIANT_C1, 11, 6, None, 2, None, 2).build()
    with pytest.raises(ParamError):
        CodeConfig(VARIANT_C1, 11, 6, 4, 2, 2, 2).build()


@pytest.mark.parametrize(
    "arguments",
    [
        {"command": "plan", "variant": "3", "n": "11", "k": "6", "m": "4"},
        {"command": "plan", "variant": "1", "n": "300", "k": "6", "m": "4"},
        {"command": "plan", "variant": "1", "k": "6", "m": "4"},
        {"command": "verify-mds", "variant": "2", "n": "12", "k": "8", "theta": "0x100"},
        {"command": "teleport"},
    ],
)
def test_schema_rejects(arguments: dict) -> None:
    """Schema failures become ParamError."""
    with pytest.raises(ParamError):
        command_config(arguments)


def test_file_commands() -> None:
    """Paths and node lists are coerced."""
    config = command_config(
        {"command": "decode", "manifest": "out/a.pbkm", "out": "a", "nodes": "2..7"}
    )
    assert config.manifest == Path("out/a.pbkm")
    assert config.nodes == (2, 3, 4, 5, 6, 7)
    assert config.code is None
    repair = command_config({"command": "repair", "manifest": "a.pbkm", "node": "3"})
    assert repair.node == 3


def test_bench_config() -> None:
    """Bench ranges expand into sweep grids."""
    config = command_config(
        {"command": "bench", "variant": "1", "r": "8", "m": "6", "k": "30..100"}
    )
    assert config.bench.ks == tuple(range(30, 101))
    assert len(config.bench.grid()) == 71
    c2 = command_config(
        {"command": "bench", "variant": "2", "rate": "0.8", "r": "4..6", "s": "r"}
    )
    assert c2.bench.s is None
    assert len(c2.bench.grid()) == 3
    with pytest.raises(ParamError):
        BenchConfig(VARIANT_C2, (4,), (), None, None, None, None).grid()
