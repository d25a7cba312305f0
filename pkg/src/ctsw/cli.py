"""Command-line interface: ``ctsw compress | decompress | bench | selftest``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from pathlib import Path

from . import bench
from .codec import FormatError, compress, decompress
from .model import ModelConfig, Variant

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_INTEGRITY = 4
EXIT_TOLERANCE = 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write_atomic(path: Path, data: bytes) -> None:
    """Write to a temporary file in the target directory, then rename."""
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _variant(text: str) -> Variant:
    try:
        return Variant.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _depth(text: str) -> int:
    try:
        d = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"depth must be an integer, got {text!r}") from None
    if not 0 <= d < 1 << 16:
        raise argparse.ArgumentTypeError("depth must lie in 0..65535")
    return d


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ctsw", description="Context tree switching compressor.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("compress", help="compress a file")
    c.add_argument("-i", "--input", required=True, type=Path)
    c.add_argument("-o", "--output", required=True, type=Path)
    c.add_argument("--variant", type=_variant, default=Variant.CTS,
                   help="ctw, cts or cts-star (default cts)")
    c.add_argument("--depth", type=_depth, default=48, help="context depth in bits (default 48)")

    d = sub.add_parser("decompress", help="restore a compressed file")
    d.add_argument("-i", "--input", required=True, type=Path)
    d.add_argument("-o", "--output", required=True, type=Path)

    b = sub.add_parser("bench", help="benchmark a corpus directory")
    b.add_argument("--dir", type=Path, default=None, help="corpus directory (default $CALGARY_DIR)")
    b.add_argument("--configs", default="ctw:48,cts:48,cts-star:48",
                   help="comma-separated variant:depth list")
    b.add_argument("--files", default=None, help="comma-separated subset of file names")
    b.add_argument("--check", action="store_true", help="compare against the baseline table")
    b.add_argument("--baseline", type=Path, default=None, help="baseline CSV (default: published Calgary figures)")
    b.add_argument("--tolerance", type=float, default=0.05)
    b.add_argument("--out", type=Path, default=Path("bench-out"), help="directory for CSV and figure")
    b.add_argument("--workers", type=int, default=1)

    sub.add_parser("selftest", help="run the brute-force oracle equivalence suite")
    return p


def _cmd_compress(args) -> int:
    try:
        data = args.input.read_bytes()
    except OSError as exc:
        print(f"ctsw: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_IO
    packed = compress(data, ModelConfig.for_variant(args.variant, args.depth))
    try:
        _write_atomic(args.output, packed)
    except OSError as exc:
        print(f"ctsw: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.verbose:
        bpb = 8 * len(packed) / len(data) if data else 0.0
        print(f"{len(data)} -> {len(packed)} bytes ({bpb:.3f} bpb)")
    return EXIT_OK


def _cmd_decompress(args) -> int:
    try:
        stream = args.input.read_bytes()
    except OSError as exc:
        print(f"ctsw: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        data = decompress(stream)
    except FormatError as exc:
        print(f"ctsw: {args.input}: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    try:
        _write_atomic(args.output, data)
    except OSError as exc:
        print(f"ctsw: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def _cmd_bench(args) -> int:
    try:
        configs = bench.parse_configs(args.configs)
    except ValueError as exc:
        print(f"ctsw: bad --configs: {exc}", file=sys.stderr)
        return EXIT_USAGE
    directory = args.dir or bench.default_corpus_dir()
    if not directory.is_dir():
        print(f"ctsw: corpus directory {directory} not found", file=sys.stderr)
        return EXIT_IO
    files = [f for f in args.files.split(",") if f] if args.files else None
    try:
        baseline = bench.load_baseline(args.baseline)
    except (OSError, KeyError, ValueError) as exc:
        print(f"ctsw: cannot load baseline: {exc}", file=sys.stderr)
        return EXIT_IO

    results = bench.run_corpus(directory, configs, files=files, workers=args.workers)
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        bench.write_csv(results, args.out / "results.csv")
        table = bench.format_table(results)
        (args.out / "results.txt").write_text(table + "\n")
        if results:
            bench.plot_results(results, args.out / "bpb.png", baseline)
    except OSError as exc:
        print(f"ctsw: cannot write results: {exc}", file=sys.stderr)
        return EXIT_IO
    print(table)
    print(f"results written to {args.out}")

    if any(not r.ok for r in results) and not args.check:
        return EXIT_INTEGRITY
    if args.check:
        report = bench.compare_baseline(results, baseline, args.tolerance)
        print(report.render())
        if not report.passed:
            return EXIT_TOLERANCE
    return EXIT_OK


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return EXIT_OK if run_selftest(print) else EXIT_INTEGRITY


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    handler = {
        "compress": _cmd_compress,
        "decompress": _cmd_decompress,
        "bench": _cmd_bench,
        "selftest": _cmd_selftest,
    }[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
