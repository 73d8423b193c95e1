"""Validation of command-line input into immutable configuration objects."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import TYPE_CHECKING, Any

import voluptuous as vol

from .analysis import (
    SweepParams,
    c1_optimal_L,
    c1_sweep_params,
    c2_optimal_L,
    c2_sweep_params,
)
from .c1_code import c1_spec
from .c2_code import c2_spec
from .const import (
    CONF_K,
    CONF_L,
    CONF_M,
    CONF_N,
    CONF_S,
    CONF_THETA,
    CONF_VARIANT,
    DEFAULT_THETA,
    FIELD_ORDER,
    VARIANT_C1,
    VARIANT_C2,
)
from .errors import ParamError

if TYPE_CHECKING:
    from collections.abc import Mapping

    from .array_code import PiggybackCode

OUTPUT_FORMATS = ("text", "csv")
WIDTH_OF_R = "r"


def parse_int(value: Any) -> int:
    """Accept an int, or a decimal or 0x-prefixed string."""
    if isinstance(value, bool):
        msg = f"not an integer: {value!r}"
        raise vol.Invalid(msg)
    if isinstance(value, int):
        return value
    try:
        return int(str(value).strip(), 0)
    except ValueError as exception:
        msg = f"not an integer: {value!r}"
        raise vol.Invalid(msg) from exception


def parse_range(value: Any) -> tuple[int, ...]:
    """Parse '30..100', '4,6,8', '7' or an empty string."""
    if isinstance(value, int):
        return (value,)
    values: list[int] = []
    for part in str(value).split(","):
        if not part.strip():
            continue
        low, separator, high = part.partition("..")
        if separator:
            values.extend(range(parse_int(low), parse_int(high) + 1))
        else:
            values.append(parse_int(part))
    return tuple(values)


def parse_rate(value: Any) -> Fraction:
    """Parse a code rate such as '0.8' or '4/5'."""
    try:
        rate = Fraction(str(value).strip())
    except ValueError as exception:
        msg = f"not a code rate: {value!r}"
        raise vol.Invalid(msg) from exception
    if not 0 < rate < 1:
        msg = f"code rate must lie strictly between 0 and 1, got {value}"
        raise vol.Invalid(msg)
    return rate


def parse_width(value: Any) -> int | None:
    """Parse the C2 group count; 'r' means s = r for every r."""
    if str(value).strip().lower() == WIDTH_OF_R:
        return None
    return parse_int(value)


def _bounded(low: int, high: int) -> vol.All:
    return vol.All(parse_int, vol.Range(min=low, max=high))


def _optional(validator: Any) -> vol.Any:
    return vol.Any(None, validator)


CODE_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_VARIANT): vol.All(parse_int, vol.In((VARIANT_C1, VARIANT_C2))),
        vol.Required(CONF_N): _bounded(2, FIELD_ORDER),
        vol.Required(CONF_K): _bounded(1, FIELD_ORDER - 1),
        vol.Optional(CONF_M, default=None): _optional(_bounded(2, FIELD_ORDER**2)),
        vol.Optional(CONF_L, default=None): _optional(_bounded(1, FIELD_ORDER)),
        vol.Optional(CONF_S, default=None): _optional(_bounded(2, FIELD_ORDER)),
        vol.Optional(CONF_THETA, default=DEFAULT_THETA): _bounded(0, FIELD_ORDER - 1),
    },
    extra=vol.REMOVE_EXTRA,
)

BENCH_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_VARIANT): vol.All(parse_int, vol.In((VARIANT_C1, VARIANT_C2))),
        vol.Required("r"): parse_range,
        vol.Optional(CONF_K, default=""): parse_range,
        vol.Optional(CONF_M, default=None): _optional(_bounded(2, FIELD_ORDER)),
        vol.Optional(CONF_S, default=WIDTH_OF_R): parse_width,
        vol.Optional("rate", default=None): _optional(parse_rate),
        vol.Optional(CONF_L, default=None): _optional(_bounded(1, FIELD_ORDER)),
    },
    extra=vol.REMOVE_EXTRA,
)

_COMMON = {
    vol.Optional("seed", default=0): parse_int,
    vol.Optional("verbose", default=0): parse_int,
    vol.Optional("format", default="text"): vol.In(OUTPUT_FORMATS),
}

COMMAND_SCHEMAS: dict[str, vol.Schema] = {
    "encode": vol.Schema(
        {vol.Required("file"): vol.Coerce(Path), vol.Required("out"): vol.Coerce(Path)},
        extra=vol.REMOVE_EXTRA,
    ),
    "decode": vol.Schema(
        {
            vol.Required("manifest"): vol.Coerce(Path),
            vol.Required("out"): vol.Coerce(Path),
            vol.Optional("nodes", default=None): _optional(parse_range),
        },
        extra=vol.REMOVE_EXTRA,
    ),
    "repair": vol.Schema(
        {vol.Required("manifest"): vol.Coerce(Path), vol.Required("node"): parse_int},
        extra=vol.REMOVE_EXTRA,
    ),
    "plan": vol.Schema(
        {
            vol.Optional("node", default=None): _optional(parse_int),
            vol.Optional("check", default=0): _bounded(0, 1 << 20),
        },
        extra=vol.REMOVE_EXTRA,
    ),
    "verify-mds": vol.Schema({}, extra=vol.REMOVE_EXTRA),
    "bench": vol.Schema({}, extra=vol.REMOVE_EXTRA),
}
COMMANDS_WITH_CODE = frozenset({"encode", "plan", "verify-mds"})


@dataclass(frozen=True)
class CodeConfig:
    """Code parameters as given; L, and s or m, may still be open."""

    variant: int
    n: int
    k: int
    m: int | None
    L: int | None
    s: int | None
    theta: int

    @property
    def r(self) -> int:
        """Number of parity nodes."""
        return self.n - self.k

    def group_count(self) -> int:
        """Resolve s for C2 from --s and/or --m."""
        s, m, r = self.s, self.m, self.r
        if s is None and m is not None:
            if r < 1 or m % r:
                msg = f"C2 needs m to be a multiple of r = {r}, got m = {m}"
                raise ParamError(msg)
            s = m // r
        elif s is not None and m is not None and m != s * r:
            msg = f"m = {m} disagrees with s·r = {s * r}"
            raise ParamError(msg)
        if s is None:
            msg = "C2 needs --s or --m"
            raise ParamError(msg)
        return s

    def build(self, *, verify: bool = False) -> PiggybackCode:
        """Instantiate the code, picking the optimal L when none was given."""
        if self.variant == VARIANT_C1:
            if self.m is None:
                msg = "C1 needs --m"
                raise ParamError(msg)
            if self.s is not None:
                msg = "--s only applies to C2"
                raise ParamError(msg)
            L = self.L
            if L is None:
                _, L = c1_optimal_L(self.m, self.r, self.n)
            return c1_spec(self.n, self.k, self.m, L)

        s = self.group_count()
        L = self.L
        if L is None:
            _, L = c2_optimal_L(s, self.r, self.k)
        return c2_spec(self.n, self.k, s, L, self.theta, verify=verify)


@dataclass(frozen=True)
class BenchConfig:
    """Parameter grid of a bench run."""

    variant: int
    rs: tuple[int, ...]
    ks: tuple[int, ...]
    m: int | None
    s: int | None
    rate: Fraction | None
    L: int | None

    def grid(self) -> list[SweepParams]:
        """Expand into the codes to measure."""
        grid: list[SweepParams] = []
        if self.variant == VARIANT_C1:
            if self.m is None:
                msg = "C1 bench needs --m"
                raise ParamError(msg)
            for r in self.rs:
                grid.extend(c1_sweep_params(r, self.m, self.ks, self.L))
            return grid
        if self.rate is None:
            msg = "C2 bench needs --rate"
            raise ParamError(msg)
        return c2_sweep_params(self.rate, self.rs, self.s, self.L)


@dataclass(frozen=True)
class CommandConfig:
    """One validated CLI invocation."""

    command: str
    code: CodeConfig | None = None
    bench: BenchConfig | None = None
    file: Path | None = None
    out: Path | None = None
    manifest: Path | None = None
    node: int | None = None
    nodes: tuple[int, ...] | None = None
    check: int = 0
    seed: int = 0
    verbose: int = 0
    output_format: str = "text"


def _validate(schema: vol.Schema, arguments: Mapping[str, Any]) -> dict[str, Any]:
    present = {key: value for key, value in arguments.items() if value is not None}
    try:
        return schema(present)
    except vol.Invalid as exception:
        raise ParamError(str(exception)) from exception


def command_config(arguments: Mapping[str, Any]) -> CommandConfig:
    """Validate parsed CLI ``arguments`` into a CommandConfig."""
    command = arguments.get("command")
    if command not in COMMAND_SCHEMAS:
        msg = f"unknown command {command!r}"
        raise ParamError(msg)

    common = _validate(vol.Schema(_COMMON, extra=vol.REMOVE_EXTRA), arguments)
    specific = _validate(COMMAND_SCHEMAS[command], arguments)
    code = None
    if command in COMMANDS_WITH_CODE:
        code = CodeConfig(**_validate(CODE_SCHEMA, arguments))
    bench = None
    if command == "bench":
        bench_fields = _validate(BENCH_SCHEMA, arguments)
        bench = BenchConfig(
            variant=bench_fields[CONF_VARIANT],
            rs=bench_fields["r"],
            ks=bench_fields[CONF_K],
            m=bench_fields[CONF_M],
            s=bench_fields[CONF_S],
            rate=bench_fields["rate"],
            L=bench_fields[CONF_L],
        )

    return CommandConfig(
        command=command,
        code=code,
        bench=bench,
        file=specific.get("file"),
        out=specific.get("out"),
        manifest=specific.get("manifest"),
        node=specific.get("node"),
        nodes=specific.get("nodes"),
        check=specific.get("check", 0),
        seed=common["seed"],
        verbose=common["verbose"],
        output_format=common["format"],
    )
