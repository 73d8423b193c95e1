"""Command-line front end: encode, decode, repair, plan, verify-mds, bench."""

from __future__ import annotations

import argparse
import logging
import sys
from typing import TYPE_CHECKING

import numpy as np

from .analysis import sweep, to_csv
from .config import OUTPUT_FORMATS, command_config
from .const import (
    EXIT_IO_ERROR,
    EXIT_MDS_FAILURE,
    EXIT_OK,
    EXIT_PARAM_ERROR,
    EXIT_REPAIR_FAILED,
    LOGGER,
    MANIFEST_SUFFIX,
    VARIANT_C2,
    VERSION,
)
from .errors import (
    DuplicateRow,
    InsufficientShards,
    MdsViolation,
    NotDataNode,
    NotParityNode,
    ParamError,
    PiggybackError,
    ShardFormatError,
    SingularSystem,
)
from .field import GF256
from .repair_plan import bandwidth_table, execute, render
from .shard_store import decode_files, encode_file, repair_shard

if TYPE_CHECKING:
    from collections.abc import Sequence
    from pathlib import Path

    from .array_code import PiggybackCode
    from .config import CommandConfig


def _add_code_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("code parameters")
    group.add_argument("--variant", required=True, help="1 for C1, 2 for C2")
    group.add_argument("--n", required=True, help="number of nodes")
    group.add_argument("--k", required=True, help="number of data nodes")
    group.add_argument("--m", help="symbols per node per stripe")
    group.add_argument("--L", help="number of subsets (default: optimal)")
    group.add_argument("--s", help="C2 column groups, m = s·(n - k)")
    group.add_argument("--theta", help="C2 transform coefficient, e.g. 0x02")


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser for all subcommands."""
    parser = argparse.ArgumentParser(
        prog="piggyback-mds",
        description="Piggybacking MDS array codes with low repair bandwidth.",
    )
    parser.add_argument("--version", action="version", version=VERSION)
    parser.add_argument(
        "-v", "--verbose", action="count", default=0, help="log at DEBUG level"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    encode = commands.add_parser("encode", help="encode a file into shard files")
    encode.add_argument("file", help="file to encode")
    encode.add_argument("--out", required=True, help="directory for the shards")
    _add_code_arguments(encode)

    decode = commands.add_parser("decode", help="restore a file from k shards")
    decode.add_argument("manifest", help=f"the {MANIFEST_SUFFIX} manifest file")
    decode.add_argument("--out", required=True, help="file to write")
    decode.add_argument("--nodes", help="nodes to decode from, e.g. 3..10")

    repair = commands.add_parser("repair", help="rebuild one lost shard")
    repair.add_argument("manifest", help=f"the {MANIFEST_SUFFIX} manifest file")
    repair.add_argument("--node", required=True, help="node to rebuild")

    plan = commands.add_parser("plan", help="print repair plans and bandwidths")
    _add_code_arguments(plan)
    plan.add_argument("--node", help="only this node (default: all)")
    plan.add_argument("--format", choices=OUTPUT_FORMATS, default="text")
    plan.add_argument(
        "--check", default="0", help="execute each plan on this many random stripes"
    )
    plan.add_argument("--seed", default="0", help="seed for --check stripes")

    verify = commands.add_parser("verify-mds", help="check any-k decodability")
    _add_code_arguments(verify)

    bench = commands.add_parser("bench", help="repair ratio sweep as CSV")
    bench.add_argument("--variant", required=True, help="1 for C1, 2 for C2")
    bench.add_argument("--r", required=True, help="parity count or range, e.g. 4..20")
    bench.add_argument("--k", default="", help="C1: data node range, e.g. 30..100")
    bench.add_argument("--m", help="C1: symbols per node")
    bench.add_argument("--rate", help="C2: code rate k/n, e.g. 0.8")
    bench.add_argument("--s", default="r", help="C2: column groups, or 'r' for s = r")
    bench.add_argument("--L", help="number of subsets (default: optimal)")
    return parser


def _split_manifest(path: Path) -> tuple[Path, str]:
    if path.suffix != MANIFEST_SUFFIX:
        msg = f"{path} is not a {MANIFEST_SUFFIX} manifest"
        raise ParamError(msg)
    return path.parent, path.name.removesuffix(MANIFEST_SUFFIX)


def _describe(config: CommandConfig, code: PiggybackCode) -> str:
    chosen = " (optimal)" if config.code is not None and config.code.L is None else ""
    return f"{code}, L = {code.L}{chosen}"


def cmd_encode(config: CommandConfig) -> int:
    """Encode a file into n shards and a manifest."""
    code = config.code.build()
    manifest = encode_file(config.file, config.out, code)
    print(_describe(config, code))
    print(
        f"wrote {code.n} shards of {manifest.header.stripe_count} stripes "
        f"to {config.out}"
    )
    return EXIT_OK


def cmd_decode(config: CommandConfig) -> int:
    """Restore the original file from k shards."""
    directory, stem = _split_manifest(config.manifest)
    data = decode_files(directory, stem, config.nodes)
    config.out.write_bytes(data)
    print(f"restored {len(data)} bytes to {config.out}")
    return EXIT_OK


def cmd_repair(config: CommandConfig) -> int:
    """Rebuild one shard and report what was read."""
    directory, stem = _split_manifest(config.manifest)
    report = repair_shard(directory, stem, config.node)
    nodes = ",".join(str(node) for node in report.nodes_read)
    print(f"repaired node {report.node}: {report.symbols_per_stripe} symbols per stripe")
    print(f"ratio {report.ratio:.6f} over {report.stripe_count} stripes from nodes {nodes}")
    return EXIT_OK


def _check_plan(code: PiggybackCode, node: int, count: int, seed: int) -> bool:
    data = GF256.Random((code.k, code.m, count), seed=seed)
    stripe = code.encode(data)
    plan = code.plan_repair(node)
    rebuilt = execute(plan, plan.gather(stripe))
    return bool(np.array_equal(rebuilt, stripe[node - 1]))


def cmd_plan(config: CommandConfig) -> int:
    """Print repair plans, optionally executing them on random stripes."""
    code = config.code.build()
    nodes = range(1, code.n + 1) if config.node is None else (config.node,)
    failures = []
    if config.output_format == "csv":
        print("node,kind,bandwidth,ratio")
    else:
        print(_describe(config, code))
    for node in nodes:
        plan = code.plan_repair(node)
        ratio = plan.bandwidth / (code.k * code.m)
        kind = "data" if node <= code.k else "parity"
        if config.output_format == "csv":
            print(f"{node},{kind},{plan.bandwidth},{ratio:.6f}")
        else:
            print(render(plan))
            print(f"ratio {ratio:.6f}\n")
        if config.check and not _check_plan(code, node, config.check, config.seed):
            failures.append(node)

    if config.output_format == "text" and config.node is None:
        table = bandwidth_table(code)
        print(f"gamma_all {float(table.gamma_all):.6f}")
        print(f"gamma_sys {float(table.gamma_sys):.6f}")
        print(f"gamma_parity {float(table.gamma_parity):.6f}")
    if failures:
        print(f"plans failed for nodes {failures}", file=sys.stderr)
        return EXIT_REPAIR_FAILED
    return EXIT_OK


def cmd_verify_mds(config: CommandConfig) -> int:
    """Check the any-k property, falling back on theta for C2."""
    code = config.code.build()
    report = code.verify_mds()
    if not report.passed and code.variant == VARIANT_C2:
        code = config.code.build(verify=True)
        print(f"theta {config.code.theta:#04x} failed, using {code.theta:#04x}")
        report = code.verify_mds()
    mode = "exhaustive" if report.exhaustive else "sampled"
    print(_describe(config, code))
    if not report.passed:
        print(
            f"FAIL after {report.checked} subsets ({mode}); "
            f"nodes {report.witness} do not determine the data",
            file=sys.stderr,
        )
        return EXIT_MDS_FAILURE
    print(f"pass, {report.checked} subsets ({mode})")
    return EXIT_OK


def cmd_bench(config: CommandConfig) -> int:
    """Measure the repair ratios of a parameter grid and print CSV."""
    rows = sweep(config.bench.grid())
    sys.stdout.write(to_csv(rows))
    return EXIT_OK


COMMANDS = {
    "encode": cmd_encode,
    "decode": cmd_decode,
    "repair": cmd_repair,
    "plan": cmd_plan,
    "verify-mds": cmd_verify_mds,
    "bench": cmd_bench,
}


def run(config: CommandConfig) -> int:
    """Run one validated command, mapping errors to exit codes."""
    try:
        return COMMANDS[config.command](config)
    except (ParamError, NotDataNode, NotParityNode, DuplicateRow) as exception:
        print(f"error: {exception}", file=sys.stderr)
        return EXIT_PARAM_ERROR
    except MdsViolation as exception:
        print(f"error: {exception} (nodes {exception.witness})", file=sys.stderr)
        return EXIT_MDS_FAILURE
    except (ShardFormatError, InsufficientShards, SingularSystem) as exception:
        print(f"error: {exception}", file=sys.stderr)
        return EXIT_REPAIR_FAILED
    except PiggybackError as exception:
        LOGGER.exception(exception)
        return EXIT_REPAIR_FAILED
    except FileNotFoundError as exception:
        print(f"error: {exception}", file=sys.stderr)
        if config.command in {"decode", "repair"}:
            return EXIT_REPAIR_FAILED
        return EXIT_IO_ERROR
    except OSError as exception:
        print(f"error: {exception}", file=sys.stderr)
        return EXIT_IO_ERROR


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``piggyback-mds`` script."""
    parser = build_parser()
    try:
        arguments = parser.parse_args(argv)
    except SystemExit as exit_:
        return exit_.code if isinstance(exit_.code, int) else EXIT_PARAM_ERROR

    logging.basicConfig(
        level=logging.DEBUG if arguments.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = command_config(vars(arguments))
    except ParamError as exception:
        print(f"error: {exception}", file=sys.stderr)
        return EXIT_PARAM_ERROR
    LOGGER.debug("Running %s", config)
    return run(config)
