"""Constants for piggyback_mds."""

from logging import Logger, getLogger
from typing import Final

LOGGER: Logger = getLogger(__package__)

VERSION: Final = "0.1.0"

REDUCTION_POLY: Final = 0x11D
FIELD_ORDER: Final = 256

VARIANT_C1: Final = 1
VARIANT_C2: Final = 2

DEFAULT_THETA: Final = 0x02

# Above this many k-subsets the MDS check samples instead of enumerating.
MDS_EXHAUSTIVE_LIMIT: Final = 100_000
MDS_SAMPLE_COUNT: Final = 10_000
MDS_SAMPLE_SEED: Final = 0x5EED

SHARD_MAGIC: Final = b"PBKC"
SHARD_FORMAT_VERSION: Final = 1
SHARD_SUFFIX: Final = ".pbk"
MANIFEST_SUFFIX: Final = ".pbkm"

CSV_HEADER: Final = (
    "variant,n,k,r,m,L,gamma_all,gamma_sys,gamma_parity,gamma_min,gamma_max,lemma7"
)

EXIT_OK: Final = 0
EXIT_PARAM_ERROR: Final = 2
EXIT_IO_ERROR: Final = 3
EXIT_REPAIR_FAILED: Final = 4
EXIT_MDS_FAILURE: Final = 5

CONF_VARIANT: Final = "variant"
CONF_N: Final = "n"
CONF_K: Final = "k"
CONF_M: Final = "m"
CONF_L: Final = "L"
CONF_S: Final = "s"
CONF_THETA: Final = "theta"
