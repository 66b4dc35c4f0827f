"""
Command line interface: ``flatcensus census|classify|predict|compare|dt-count``.

Exit codes: 0 on success, 2 on invalid configuration, input or domain,
3 when a resource cap stops a census.
"""

import argparse
import contextlib
import csv
import json
import logging
import sys
from typing import Iterator, Optional, Sequence, TextIO

from . import __version__
from .asymptotics import compare_report, predictions
from .census.models import CensusFilter
from .census.runner import CensusRunner
from .census.storage import counts_to_json, read_counts_csv, write_counts_rows, write_manifest
from .config import Command, OutputFormat, ResourceLimits, RunConfig, load_config
from .curve_type import classify
from .dt_lattice import count_IL, leb_A1, semigroup_index
from .exceptions import (
    ConfigurationError,
    DisconnectedTableError,
    DomainError,
    FlatCensusError,
    InvalidPantsError,
    InvalidTableError,
    ResourceLimitExceeded,
)
from .foliation import Direction, cylinder_report
from .helpers import configure_logging, format_ratio, fraction_fields, load_marked_tiling, load_pants
from .tiling import automorphisms, mark_assignments, stratum

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_RESOURCE = 3


@contextlib.contextmanager
def _output(path) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            yield handle


def cmd_census(cfg: RunConfig) -> int:
    runner = CensusRunner(
        cfg.g,
        cfg.n,
        mode=cfg.mode,
        filters=cfg.filters,
        workers=cfg.workers,
        limits=cfg.limits,
        checkpoint_dir=cfg.checkpoint_dir,
        checkpoint=cfg.checkpoint,
    )
    ct = runner.run(cfg.max_area)
    with _output(cfg.output_path) as handle:
        if cfg.output_format == OutputFormat.JSON:
            json.dump(counts_to_json(ct), handle, indent=2)
            handle.write("\n")
        else:
            write_counts_rows(ct, handle)
    if cfg.manifest_path is not None:
        write_manifest(cfg.manifest_path, ct, cfg.mode.value, cfg.filters, runner.checksums)
    return EXIT_OK


def cmd_classify(cfg: RunConfig) -> int:
    mt = load_marked_tiling(cfg.input_path)
    cone = mt.cone
    report = {
        "n_squares": mt.n_squares,
        "genus": mt.genus,
        "marked": sorted(mt.marked),
        "cone_angles": {str(v): k for v, k in sorted(cone.angle_of.items())},
        "stratum": list(stratum(mt)),
        "marking_options": len(mark_assignments(mt.table, mt.n_marked)),
        "cylinders": cylinder_report(mt),
        "h_type": classify(mt, Direction.HORIZONTAL).key,
        "v_type": classify(mt, Direction.VERTICAL).key,
        "aut_order": automorphisms(mt).order,
    }
    with _output(cfg.output_path) as handle:
        json.dump(report, handle, indent=2)
        handle.write("\n")
    return EXIT_OK


def cmd_predict(cfg: RunConfig, names: Sequence[str]) -> int:
    available = predictions(cfg.g, cfg.n)
    unknown = [name for name in names if name not in available]
    if unknown:
        raise DomainError(f"Unknown predictions {unknown} for (g={cfg.g}, n={cfg.n})", g=cfg.g, n=cfg.n)
    selected = {name: available[name] for name in (names or available)}
    with _output(cfg.output_path) as handle:
        if cfg.output_format == OutputFormat.JSON:
            json.dump([c.to_dict(name) for name, c in selected.items()], handle, indent=2)
            handle.write("\n")
        else:
            writer = csv.writer(handle)
            writer.writerow(("name", "rational_num", "rational_den", "pi_power", "b_power", "provenance", "value"))
            for name, c in selected.items():
                value = format_ratio(float(c)) if not c.b_power else ""
                writer.writerow((
                    name, c.rational.numerator, c.rational.denominator, c.pi_power, c.b_power, c.provenance.value, value,
                ))
    return EXIT_OK


def cmd_compare(cfg: RunConfig, complete_area: Optional[int] = None) -> int:
    ct = read_counts_csv(cfg.input_path, cfg.g, cfg.n, complete_area=complete_area)
    rows = compare_report(ct)
    with _output(cfg.output_path) as handle:
        writer = csv.writer(handle)
        writer.writerow(("L", "name", "empirical_num", "empirical_den", "predicted", "ratio"))
        for row in rows:
            writer.writerow((
                row.L, row.name, *fraction_fields(row.empirical), str(row.predicted.as_sympy()), format_ratio(row.ratio),
            ))
    return EXIT_OK


def cmd_dt_count(cfg: RunConfig, lengths: Sequence[int]) -> int:
    pd = load_pants(cfg.input_path)
    limit = leb_A1(pd.n_curves) / semigroup_index(pd)
    with _output(cfg.output_path) as handle:
        writer = csv.writer(handle)
        writer.writerow(("L", "count", "ratio", "limit"))
        for L in lengths:
            if L < 0:
                raise DomainError(f"L must be non-negative, got {L}")
            count = count_IL(pd, L)
            ratio = count / L ** (2 * pd.n_curves) if L else None
            writer.writerow((L, count, format_ratio(ratio), str(limit)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flatcensus", description=__doc__.strip().splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR (env FLATCENSUS_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    def surface(p: argparse.ArgumentParser) -> None:
        p.add_argument("--g", type=int, required=True, help="genus")
        p.add_argument("--n", type=int, required=True, help="number of marked points")

    def output(p: argparse.ArgumentParser) -> None:
        p.add_argument("--output", default=None, help="output file (default: stdout)")
        p.add_argument("--format", default="csv", choices=[f.value for f in OutputFormat])

    p = sub.add_parser(Command.CENSUS.value, help="weighted census of square-tiled surfaces")
    surface(p)
    output(p)
    p.add_argument("--max-area", type=int, required=True)
    p.add_argument("--mode", default="pruned", help="naive or pruned")
    p.add_argument("--workers", type=int, default=None, help="process count (env FLATCENSUS_WORKERS overrides)")
    p.add_argument("--single-cylinder", action="store_true")
    p.add_argument("--unit-height", action="store_true")
    p.add_argument("--h-type", action="append", default=[], help="allowed horizontal type key (repeatable)")
    p.add_argument("--manifest", default=None)
    p.add_argument("--checkpoint-dir", default=None)
    p.add_argument("--max-tables", type=int, default=None)

    p = sub.add_parser(Command.CLASSIFY.value, help="cylinders and curve types of one table")
    p.add_argument("table", help="table JSON file")
    p.add_argument("--output", default=None)

    p = sub.add_parser(Command.PREDICT.value, help="closed-form asymptotic constants")
    surface(p)
    output(p)
    p.add_argument("names", nargs="*", help="prediction names (default: all)")

    p = sub.add_parser(Command.COMPARE.value, help="census values next to predicted limits")
    surface(p)
    p.add_argument("--census", required=True, help="census CSV file")
    p.add_argument("--complete-area", type=int, default=None)
    p.add_argument("--output", default=None)

    p = sub.add_parser(Command.DT_COUNT.value, help="Dehn-Thurston lattice point counts")
    p.add_argument("--pants", required=True, help="pants decomposition JSON file")
    p.add_argument("--L", dest="lengths", type=int, action="append", required=True)
    p.add_argument("--output", default=None)
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    command = Command(args.command)
    if command == Command.CENSUS:
        limits = ResourceLimits(max_tables=args.max_tables) if args.max_tables is not None else None
        return load_config(
            command,
            g=args.g,
            n=args.n,
            max_area=args.max_area,
            mode=args.mode,
            workers=args.workers,
            filters=CensusFilter(
                single_cylinder=args.single_cylinder,
                unit_height=args.unit_height,
                h_types=frozenset(args.h_type),
            ),
            limits=limits,
            checkpoint_dir=args.checkpoint_dir,
            output_path=args.output,
            manifest_path=args.manifest,
            output_format=args.format,
        )
    if command == Command.CLASSIFY:
        return load_config(command, input_path=args.table, output_path=args.output, output_format="json")
    if command == Command.PREDICT:
        return load_config(command, g=args.g, n=args.n, output_path=args.output, output_format=args.format)
    if command == Command.COMPARE:
        return load_config(command, g=args.g, n=args.n, input_path=args.census, output_path=args.output)
    return load_config(command, input_path=args.pants, output_path=args.output)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INVALID

    try:
        configure_logging(args.log_level)
        cfg = _config_from_args(args)
        if cfg.command == Command.CENSUS:
            return cmd_census(cfg)
        if cfg.command == Command.CLASSIFY:
            return cmd_classify(cfg)
        if cfg.command == Command.PREDICT:
            return cmd_predict(cfg, args.names)
        if cfg.command == Command.COMPARE:
            return cmd_compare(cfg, args.complete_area)
        return cmd_dt_count(cfg, args.lengths)
    except ResourceLimitExceeded as e:
        print(f"flatcensus: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (
        ConfigurationError, DomainError, InvalidTableError, DisconnectedTableError, InvalidPantsError, ValueError,
    ) as e:
        print(f"flatcensus: {e}", file=sys.stderr)
        return EXIT_INVALID
    except FlatCensusError as e:
        logger.error(f"Command failed: {e}")
        print(f"flatcensus: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
