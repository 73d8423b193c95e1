"""Closed-form repair ratios, optimal subset counts, and measured sweeps."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, NamedTuple

from .c1_code import MIN_PARITY, c1_spec, check_c1_params
from .c2_code import c2_spec, check_c2_params
from .const import CSV_HEADER, DEFAULT_THETA, LOGGER, VARIANT_C1, VARIANT_C2
from .errors import ParamError
from .repair_plan import bandwidth_table

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Sequence

    from .array_code import PiggybackCode


@dataclass(frozen=True)
class GammaBounds:
    """Lower and upper bound of an average repair ratio."""

    gamma_min: Fraction
    gamma_max: Fraction

    @property
    def gap(self) -> Fraction:
        """gamma_max - gamma_min."""
        return self.gamma_max - self.gamma_min

    def __str__(self) -> str:
        return f"[{float(self.gamma_min):.6f}, {float(self.gamma_max):.6f}]"


def _staircase(width: int, L: int) -> Fraction:
    """width² - width·(L+1) + (L+1)(2L+1)/6, shared by both families."""
    return width * width - width * (L + 1) + Fraction((L + 1) * (2 * L + 1), 6)


def _c1_gamma_min(n: int, k: int, m: int, L: int) -> Fraction:
    r = n - k
    return (
        Fraction(L + 1, 2 * m)
        + n * _staircase(m, L) / (L * m * k * (r - 1))
        + Fraction(m - L, k * m)
    )


def _c2_gamma_min(n: int, k: int, s: int, L: int) -> Fraction:
    r = n - k
    return (
        Fraction(L + 1, 2 * s)
        + _staircase(s, L) / (L * s * (r - 1))
        + Fraction((r - 1) * (L - 3), 2 * k * s * r)
    )


def c1_gamma_bounds(n: int, k: int, m: int, L: int) -> GammaBounds:
    """Bounds on the all-node average ratio of C1(n, k, m, L); needs L | n."""
    check_c1_params(n, k, m, L)
    if n % L:
        msg = f"C1 ratio bounds need L | n, got n = {n}, L = {L}"
        raise ParamError(msg)
    r = n - k
    gamma_min = _c1_gamma_min(n, k, m, L)
    return GammaBounds(
        gamma_min=gamma_min,
        gamma_max=gamma_min + Fraction(L * (r - 1) ** 2, 4 * n * m * k),
    )


def _optimal(
    width: int,
    r: int,
    upper: int,
    feasible: Iterable[int],
    cost: Callable[[int], Fraction],
) -> tuple[float, int]:
    """Pick floor or ceil of the stationary point, whichever costs less."""
    if r < 2 or width < 2:
        msg = f"no subset count to optimize for width {width}, r {r}"
        raise ParamError(msg)
    real = math.sqrt((6 * width * width - 6 * width + 1) / (3 * r - 1))
    allowed = set(feasible)
    if not allowed:
        msg = f"no feasible subset count for width {width}, r {r}"
        raise ParamError(msg)
    candidates = sorted(
        {
            min(max(candidate, 1), upper)
            for candidate in (math.floor(real), math.ceil(real))
        }
        & allowed
    )
    if not candidates:
        candidates = [min(allowed, key=lambda L: (abs(L - real), L))]
    return real, min(candidates, key=lambda L: (cost(L), L))


def c1_optimal_L(m: int, r: int, n: int) -> tuple[float, int]:
    """
    Return the real minimizer of the C1 ratio and the integer L to use.

    Both neighbours of sqrt((6m² - 6m + 1) / (3r - 1)) are clamped to
    [1, m - 1] and kept only if floor(n / L) >= r and m - L <= r - 2; the one
    with the smaller lower bound wins, ties going to the smaller L.
    """
    if m > r or r < MIN_PARITY:
        msg = f"C1 needs r >= {MIN_PARITY} and m <= r, got m = {m}, r = {r}"
        raise ParamError(msg)
    k = n - r
    return _optimal(
        m,
        r,
        m - 1,
        (L for L in range(1, m) if n // L >= r and m - L <= r - 2),
        lambda L: _c1_gamma_min(n, k, m, L),
    )


def c2_gamma_sys_bounds(n: int, k: int, s: int, L: int) -> GammaBounds:
    """Bounds on the data-node average ratio of C2(n, k, s·r, L); needs L | k."""
    check_c2_params(n, k, s, L, DEFAULT_THETA)
    if k % L:
        msg = f"C2 ratio bounds need L | k, got k = {k}, L = {L}"
        raise ParamError(msg)
    r = n - k
    gamma_min = _c2_gamma_min(n, k, s, L)
    return GammaBounds(
        gamma_min=gamma_min,
        gamma_max=gamma_min + Fraction(L * (r - 1), 4 * s * k * k),
    )


def c2_gamma_parity(n: int, k: int, s: int, L: int) -> Fraction:
    """Exact parity-node average ratio of C2(n, k, s·r, L); needs L | k."""
    check_c2_params(n, k, s, L, DEFAULT_THETA)
    if k % L:
        msg = f"C2 parity ratio needs L | k, got k = {k}, L = {L}"
        raise ParamError(msg)
    r = n - k
    return (
        Fraction(2, r)
        + Fraction(1, k)
        - Fraction(1, k * r)
        - Fraction(L + 1, 2 * s * r)
    )


def c2_optimal_L(s: int, r: int, k: int) -> tuple[float, int]:
    """C2 counterpart of c1_optimal_L, with s in place of m and L <= k."""
    if not 2 <= s <= r:
        msg = f"C2 needs 2 <= s <= r, got s = {s}, r = {r}"
        raise ParamError(msg)
    return _optimal(
        s,
        r,
        s - 1,
        range(1, min(s - 1, k) + 1),
        lambda L: _c2_gamma_min(k + r, k, s, L),
    )


class SweepParams(NamedTuple):
    """One code to measure; for C2, m must be a multiple of r = n - k."""

    variant: int
    n: int
    k: int
    m: int
    L: int


@dataclass(frozen=True)
class SweepRow:
    """Measured ratios of one code next to the closed-form values."""

    params: SweepParams
    gamma_all: Fraction
    gamma_sys: Fraction
    gamma_parity: Fraction
    bounds: GammaBounds | None
    parity_formula: Fraction | None

    @property
    def r(self) -> int:
        """Number of parity nodes."""
        return self.params.n - self.params.k


def build_code(params: SweepParams, theta: int = DEFAULT_THETA) -> PiggybackCode:
    """Instantiate the code described by ``params``."""
    variant, n, k, m, L = params
    if variant == VARIANT_C1:
        return c1_spec(n, k, m, L)
    if variant == VARIANT_C2:
        r = n - k
        if r < 1 or m % r:
            msg = f"C2 needs m to be a multiple of r = {r}, got m = {m}"
            raise ParamError(msg)
        return c2_spec(n, k, m // r, L, theta)
    msg = f"unknown variant {variant}"
    raise ParamError(msg)


def measure(params: SweepParams) -> SweepRow:
    """Plan every repair of one code and compare with the formulas."""
    code = build_code(params)
    table = bandwidth_table(code)
    variant, n, k, m, L = params
    bounds = None
    parity_formula = None
    if variant == VARIANT_C1 and n % L == 0:
        bounds = c1_gamma_bounds(n, k, m, L)
    elif variant == VARIANT_C2 and k % L == 0:
        s = m // (n - k)
        bounds = c2_gamma_sys_bounds(n, k, s, L)
        parity_formula = c2_gamma_parity(n, k, s, L)
    return SweepRow(
        params=params,
        gamma_all=table.gamma_all,
        gamma_sys=table.gamma_sys,
        gamma_parity=table.gamma_parity,
        bounds=bounds,
        parity_formula=parity_formula,
    )


def sweep(params: Iterable[SweepParams]) -> list[SweepRow]:
    """Measure every code in ``params``, skipping (and logging) invalid ones."""
    rows = []
    for entry in params:
        try:
            rows.append(measure(entry))
        except ParamError as exception:
            LOGGER.warning("Skipping %s: %s", entry, exception)
    return rows


def _cell(value: Fraction | None) -> str:
    return "" if value is None else f"{float(value):.6f}"


def to_csv(rows: Sequence[SweepRow]) -> str:
    """Render sweep rows as CSV, floats to six decimals."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for row in rows:
        variant, n, k, m, L = row.params
        writer.writerow(
            [
                variant,
                n,
                k,
                row.r,
                m,
                L,
                _cell(row.gamma_all),
                _cell(row.gamma_sys),
                _cell(row.gamma_parity),
                _cell(row.bounds.gamma_min if row.bounds else None),
                _cell(row.bounds.gamma_max if row.bounds else None),
                _cell(row.parity_formula),
            ]
        )
    return buffer.getvalue()


def c1_sweep_params(
    r: int, m: int, ks: Iterable[int], L: int | None = None
) -> list[SweepParams]:
    """C1 grid with fixed r and m over ``ks``; L defaults to the optimum per n."""
    grid = []
    for k in ks:
        n = k + r
        chosen = L
        if chosen is None:
            try:
                _, chosen = c1_optimal_L(m, r, n)
            except ParamError as exception:
                LOGGER.warning("Skipping C1 k = %s: %s", k, exception)
                continue
        grid.append(SweepParams(VARIANT_C1, n, k, m, chosen))
    return grid


def c2_sweep_params(
    rate: Fraction | str,
    rs: Iterable[int],
    s: int | None = None,
    L: int | None = None,
) -> list[SweepParams]:
    """
    C2 grid at code rate k/n = ``rate`` over ``rs``.

    ``s`` defaults to r (so m = r²); r values for which n = r / (1 - rate) is
    not an integer are skipped.
    """
    grid = []
    rate = Fraction(rate).limit_denominator(1000)
    if not 0 < rate < 1:
        msg = f"code rate must lie strictly between 0 and 1, got {rate}"
        raise ParamError(msg)
    for r in rs:
        n = r / (1 - rate)
        if n.denominator != 1:
            LOGGER.warning("Skipping r = %s: rate %s gives non-integer n", r, rate)
            continue
        n = int(n)
        k = n - r
        width = r if s is None else s
        chosen = L
        if chosen is None:
            try:
                _, chosen = c2_optimal_L(width, r, k)
            except ParamError as exception:
                LOGGER.warning("Skipping C2 r = %s: %s", r, exception)
                continue
        grid.append(SweepParams(VARIANT_C2, n, k, width * r, chosen))
    return grid
