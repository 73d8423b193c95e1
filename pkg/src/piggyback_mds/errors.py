"""Exceptions raised by piggyback_mds."""

from __future__ import annotations


class PiggybackError(Exception):
    """Base class for all errors raised by this package."""


class ParamError(PiggybackError, ValueError):
    """Code parameters violate a construction constraint."""


class ZeroInverse(PiggybackError, ZeroDivisionError):
    """The zero element has no multiplicative inverse."""


class LengthMismatch(PiggybackError, ValueError):
    """A vector does not have the length the code expects."""


class ShapeError(PiggybackError, ValueError):
    """A symbol grid does not have the shape the code expects."""


class DuplicateRow(PiggybackError, ValueError):
    """The same codeword row (or node) was supplied twice."""


class SingularSystem(PiggybackError):
    """A linear system that must be invertible turned out singular."""


class NotDataNode(PiggybackError, ValueError):
    """The node index does not refer to a data node."""


class NotParityNode(PiggybackError, ValueError):
    """The node index does not refer to a parity node."""


class MissingCell(PiggybackError, KeyError):
    """A repair program needed a cell that was not supplied."""


class ProgramFault(PiggybackError):
    """A repair program is internally inconsistent."""


class MdsViolation(PiggybackError):
    """Some k-subset of nodes cannot reconstruct the data."""

    def __init__(self, msg: str, witness: tuple[int, ...] | None = None) -> None:
        """Initialize."""
        super().__init__(msg)
        self.witness = witness


class ShardFormatError(PiggybackError):
    """A shard or manifest file cannot be parsed."""


class BadMagic(ShardFormatError):
    """The file does not start with the shard magic."""


class VersionMismatch(ShardFormatError):
    """The file was written by an unsupported format version."""


class TruncatedPayload(ShardFormatError):
    """The file is shorter than its header announces."""


class HeaderSpecMismatch(ShardFormatError):
    """The header does not describe the expected code or node."""


class ChecksumMismatch(ShardFormatError):
    """Decoded content does not match the manifest checksum."""


class InsufficientShards(PiggybackError):
    """Fewer shard files survive than the operation needs."""
