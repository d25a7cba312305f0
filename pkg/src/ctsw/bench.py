"""Corpus benchmark: per-file bits per byte, weighted averages and a
comparison against the published Calgary Corpus figures."""

from __future__ import annotations

import csv
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .codec import compress, decompress
from .model import ModelConfig, Variant

log = logging.getLogger(__name__)

CSV_COLUMNS = ("file", "variant", "depth", "input_bytes", "output_bytes", "bpb", "elapsed_s")

# The 18-file Calgary set, in the column order of the published table.
CALGARY_SIZES = {
    "bib": 111261,
    "book1": 768771,
    "book2": 610856,
    "geo": 102400,
    "news": 377109,
    "obj1": 21504,
    "obj2": 246814,
    "paper1": 53161,
    "paper2": 82199,
    "paper3": 46526,
    "paper4": 13286,
    "paper5": 11954,
    "paper6": 38105,
    "pic": 513216,
    "progc": 39611,
    "progl": 71646,
    "progp": 49379,
    "trans": 93695,
}
CALGARY_FILES = tuple(CALGARY_SIZES)


@dataclass(frozen=True)
class CorpusResult:
    file: str
    variant: str
    depth: int
    input_bytes: int
    output_bytes: int | None
    elapsed: float
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def bpb(self) -> float:
        if not self.ok or not self.input_bytes:
            return math.nan
        return 8.0 * self.output_bytes / self.input_bytes

    @property
    def key(self) -> tuple[str, int]:
        return (self.variant, self.depth)

    def csv_row(self) -> list:
        if not self.ok:
            return [self.file, self.variant, self.depth, self.input_bytes, "", "", f"{self.elapsed:.3f}"]
        return [self.file, self.variant, self.depth, self.input_bytes, self.output_bytes,
                f"{self.bpb:.4f}", f"{self.elapsed:.3f}"]


def list_corpus(directory: str | os.PathLike, names: Iterable[str] | None = None) -> list[Path]:
    """Regular files of ``directory`` (or just ``names``), sorted by name."""
    root = Path(directory)
    if names is not None:
        return [root / n for n in sorted(names)]
    return sorted((p for p in root.iterdir() if p.is_file()), key=lambda p: p.name)


def run_file(path: str | os.PathLike, config: ModelConfig) -> CorpusResult:
    """Compress one file, verify the round trip and time the compression."""
    path = Path(path)
    label, depth = config.variant.label, config.depth
    try:
        data = path.read_bytes()
    except OSError as exc:
        return CorpusResult(path.name, label, depth, 0, None, 0.0, f"unreadable: {exc}")
    start = time.perf_counter()
    try:
        packed = compress(data, config)
    except MemoryError:
        return CorpusResult(path.name, label, depth, len(data), None,
                            time.perf_counter() - start, "out of memory")
    elapsed = time.perf_counter() - start
    try:
        restored = decompress(packed)
    except MemoryError:
        return CorpusResult(path.name, label, depth, len(data), None, elapsed, "out of memory")
    if restored != data:
        return CorpusResult(path.name, label, depth, len(data), None, elapsed, "round trip mismatch")
    return CorpusResult(path.name, label, depth, len(data), len(packed), elapsed)


def _run_job(job):
    return run_file(*job)


def run_corpus(
    directory: str | os.PathLike,
    configs: Sequence[ModelConfig],
    *,
    files: Iterable[str] | None = None,
    workers: int | None = None,
) -> list[CorpusResult]:
    """One verified result per (file, config), sorted by file then config.

    Files are processed in parallel. Each D=48 model over a megabyte of text
    needs a few GB, so ``workers`` defaults to one per CPU but never more
    than the caller asks for.
    """
    paths = list_corpus(directory, files)
    jobs = [(p, c) for p in paths for c in configs]
    workers = workers or os.cpu_count() or 1
    if workers <= 1 or len(jobs) <= 1:
        results = []
        for job in jobs:
            results.append(_run_job(job))
            log.info("%s %s%d done", job[0].name, job[1].variant.label, job[1].depth)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_job, jobs))
    order = {c.variant.label + str(c.depth): i for i, c in enumerate(configs)}
    return sorted(results, key=lambda r: (r.file, order.get(r.variant + str(r.depth), 0)))


def weighted_average(results: Iterable[CorpusResult]) -> float:
    """Total output bits over total input bytes."""
    done = [r for r in results if r.ok]
    if not done:
        raise ValueError("no successful results to average")
    total_in = sum(r.input_bytes for r in done)
    if total_in == 0:
        raise ValueError("results cover no input bytes")
    return 8.0 * sum(r.output_bytes for r in done) / total_in


# ------------------------------------------------------------------ output


def write_csv(results: Iterable[CorpusResult], path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for r in results:
            w.writerow(r.csv_row())


def read_csv(path: str | os.PathLike) -> list[CorpusResult]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            failed = row["output_bytes"] == ""
            out.append(CorpusResult(
                row["file"], row["variant"], int(row["depth"]), int(row["input_bytes"]),
                None if failed else int(row["output_bytes"]), float(row["elapsed_s"]),
                "failed" if failed else None,
            ))
    return out


def format_table(results: Sequence[CorpusResult]) -> str:
    """Files down, configurations across, bpb in the cells."""
    keys = list(dict.fromkeys(r.key for r in results))
    files = list(dict.fromkeys(r.file for r in results))
    cell = {(r.file, r.key): r for r in results}
    heads = [f"{v}{d}" for v, d in keys]
    width = max([len(f) for f in files] + [7])
    lines = [f"{'file':<{width}}  " + "  ".join(f"{h:>10}" for h in heads)]
    for f in files:
        parts = []
        for k in keys:
            r = cell.get((f, k))
            parts.append(f"{'-':>10}" if r is None else
                         f"{'FAILED':>10}" if not r.ok else f"{r.bpb:>10.3f}")
        lines.append(f"{f:<{width}}  " + "  ".join(parts))
    avgs = []
    for k in keys:
        try:
            avgs.append(f"{weighted_average(r for r in results if r.key == k):>10.3f}")
        except ValueError:
            avgs.append(f"{'-':>10}")
    lines.append(f"{'weighted':<{width}}  " + "  ".join(avgs))
    for r in results:
        if not r.ok:
            lines.append(f"! {r.file} {r.variant}{r.depth}: {r.error}")
    return "\n".join(lines)


def plot_results(results: Sequence[CorpusResult], path: str | os.PathLike,
                 baseline: dict | None = None) -> None:
    """Grouped bar chart of bpb per file; published values drawn as ticks."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    keys = list(dict.fromkeys(r.key for r in results))
    files = list(dict.fromkeys(r.file for r in results))
    cell = {(r.file, r.key): r.bpb for r in results}
    fig, ax = plt.subplots(figsize=(max(6.0, 0.6 * len(files) * max(len(keys), 1)), 4.5))
    width = 0.8 / max(len(keys), 1)
    for j, key in enumerate(keys):
        xs = [i + (j - (len(keys) - 1) / 2) * width for i in range(len(files))]
        ys = [cell.get((f, key), math.nan) for f in files]
        ax.bar(xs, ys, width=width, label=f"{key[0]}{key[1]}")
        ref = (baseline or {}).get(key)
        if ref:
            ax.scatter(xs, [ref.get(f, math.nan) for f in files], marker="_", s=120,
                       color="black", zorder=3)
    ax.set_xticks(range(len(files)))
    ax.set_xticklabels(files, rotation=45, ha="right")
    ax.set_ylabel("bits per byte")
    ax.legend(fontsize="small")
    has_ref = any(k in (baseline or {}) for k in keys)
    ax.set_title("Compression by file" + (" (ticks: published)" if has_ref else ""))
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


# ------------------------------------------------------------------ baseline


def load_baseline(path: str | os.PathLike | None = None) -> dict[tuple[str, int], dict[str, float]]:
    """Published bpb keyed by (variant label, depth) then file name.

    Defaults to the checked-in published Calgary Corpus figures.
    """
    if path is None:
        text = resources.files("ctsw").joinpath("data/published_bpb.csv").read_text()
    else:
        text = Path(path).read_text()
    table: dict[tuple[str, int], dict[str, float]] = {}
    for row in csv.DictReader(text.splitlines()):
        key = (row["variant"].strip(), int(row["depth"]))
        table.setdefault(key, {})[row["file"].strip()] = float(row["bpb"])
    return table


@dataclass(frozen=True)
class Delta:
    file: str
    variant: str
    depth: int
    measured: float
    expected: float | None
    tolerance: float

    @property
    def delta(self) -> float:
        return math.nan if self.expected is None else self.measured - self.expected

    @property
    def missing(self) -> bool:
        return self.expected is None

    @property
    def within(self) -> bool:
        return not self.missing and abs(self.delta) <= self.tolerance + 1e-12


@dataclass
class BaselineReport:
    rows: list[Delta] = field(default_factory=list)
    failures: list[CorpusResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures and all(d.within for d in self.rows)

    @property
    def flagged(self) -> list[Delta]:
        return [d for d in self.rows if not d.within]

    def render(self) -> str:
        lines = []
        for d in self.rows:
            if d.missing:
                lines.append(f"MISSING {d.file} {d.variant}{d.depth}: no baseline row")
                continue
            mark = "ok  " if d.within else "FAIL"
            lines.append(f"{mark} {d.file:<8} {d.variant}{d.depth:<4} measured {d.measured:.3f} "
                         f"published {d.expected:.2f} delta {d.delta:+.3f} (tol {d.tolerance})")
        for r in self.failures:
            lines.append(f"FAIL {r.file} {r.variant}{r.depth}: {r.error}")
        return "\n".join(lines)


def compare_baseline(results: Iterable[CorpusResult], baseline: dict, tolerance: float | dict = 0.05) -> BaselineReport:
    """Per-file deltas against ``baseline``.

    ``tolerance`` is a single number or a mapping from (variant, depth) to a
    number. A result with no matching baseline row is flagged, not fatal.
    """
    report = BaselineReport()
    for r in results:
        if not r.ok:
            report.failures.append(r)
            continue
        tol = tolerance.get(r.key, 0.05) if isinstance(tolerance, dict) else tolerance
        expected = baseline.get(r.key, {}).get(r.file)
        report.rows.append(Delta(r.file, r.variant, r.depth, r.bpb, expected, tol))
    return report


def count_wins(results: Iterable[CorpusResult], better: tuple[str, int], worse: tuple[str, int]) -> tuple[int, int]:
    """(files where ``better`` is at most ``worse``, files with both results)."""
    by_key: dict[tuple[str, int], dict[str, float]] = {}
    for r in results:
        if r.ok:
            by_key.setdefault(r.key, {})[r.file] = r.bpb
    a, b = by_key.get(better, {}), by_key.get(worse, {})
    common = sorted(set(a) & set(b))
    return sum(1 for f in common if a[f] <= b[f]), len(common)


def check_calgary(directory: str | os.PathLike) -> list[str]:
    """Problems with a Calgary directory: missing files or unexpected sizes."""
    root = Path(directory)
    problems = []
    for name, size in CALGARY_SIZES.items():
        p = root / name
        if not p.is_file():
            problems.append(f"{name}: missing")
        elif p.stat().st_size != size:
            problems.append(f"{name}: {p.stat().st_size} bytes, expected {size}")
    return problems


def parse_configs(text: str) -> list[ModelConfig]:
    """``"ctw:48,cts:48,cts-star:160"`` -> standard configurations."""
    configs = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, _, depth = item.partition(":")
        configs.append(ModelConfig.for_variant(Variant.parse(name), int(depth) if depth else 48))
    if not configs:
        raise ValueError("no configurations given")
    return configs


def default_corpus_dir() -> Path:
    """``$CALGARY_DIR`` if set, else ``data/calgary`` under the working directory."""
    return Path(os.environ.get("CALGARY_DIR", "data/calgary"))
