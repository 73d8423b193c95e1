"""
Piggybacking MDS array codes with low single-node repair bandwidth.

Two code families are provided: C1 (sub-packetization m <= n - k) and C2
(m = s·(n - k), with cyclic shifts and paired parity transforms). Both encode
over GF(2^8) on top of a Cauchy MDS base code, decode from any k nodes and
plan single-node repairs whose download is counted symbol by symbol.
"""

from __future__ import annotations

from .analysis import (
    c1_gamma_bounds,
    c1_optimal_L,
    c2_gamma_parity,
    c2_gamma_sys_bounds,
    c2_optimal_L,
    sweep,
    to_csv,
)
from .c1_code import C1Spec, c1_spec
from .c2_code import C2Spec, c2_spec, c2_verify_mds
from .const import VERSION
from .data import Cell
from .errors import PiggybackError
from .field import GF256
from .repair_plan import RepairPlan, bandwidth_table, execute, render
from .shard_store import decode_files, encode_file, repair_shard

__version__ = VERSION

__all__ = [
    "C1Spec",
    "C2Spec",
    "Cell",
    "GF256",
    "PiggybackError",
    "RepairPlan",
    "bandwidth_table",
    "c1_gamma_bounds",
    "c1_optimal_L",
    "c1_spec",
    "c2_gamma_parity",
    "c2_gamma_sys_bounds",
    "c2_optimal_L",
    "c2_spec",
    "c2_verify_mds",
    "decode_files",
    "encode_file",
    "execute",
    "render",
    "repair_shard",
    "sweep",
    "to_csv",
]
