#!/usr/bin/env python3
"""Download the 18-file Calgary Corpus and check every file's size.

    python scripts/fetch_calgary.py [DEST]        (default: data/calgary)

The archive is fetched from the Canterbury Corpus site. Pass --archive to
unpack a tarball you already have instead.
"""

from __future__ import annotations

import argparse
import io
import sys
import tarfile
import urllib.request
from pathlib import Path

URL = "https://corpus.canterbury.ac.nz/resources/calgary.tar.gz"

SIZES = {
    "bib": 111261, "book1": 768771, "book2": 610856, "geo": 102400,
    "news": 377109, "obj1": 21504, "obj2": 246814, "paper1": 53161,
    "paper2": 82199, "paper3": 46526, "paper4": 13286, "paper5": 11954,
    "paper6": 38105, "pic": 513216, "progc": 39611, "progl": 71646,
    "progp": 49379, "trans": 93695,
}


def extract(archive: bytes, dest: Path) -> None:
    dest.mkdir(parents=True, exist_ok=True)
    with tarfile.open(fileobj=io.BytesIO(archive)) as tar:
        for member in tar.getmembers():
            name = Path(member.name).name
            if member.isfile() and name in SIZES:
                data = tar.extractfile(member).read()
                (dest / name).write_bytes(data)


def verify(dest: Path) -> list[str]:
    problems = []
    for name, size in SIZES.items():
        p = dest / name
        if not p.is_file():
            problems.append(f"{name}: missing")
        elif p.stat().st_size != size:
            problems.append(f"{name}: {p.stat().st_size} bytes, expected {size}")
    return problems


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("dest", nargs="?", default="data/calgary", type=Path)
    ap.add_argument("--archive", type=Path, help="local calgary.tar.gz to unpack")
    ap.add_argument("--url", default=URL)
    args = ap.parse_args()

    if args.archive:
        blob = args.archive.read_bytes()
    else:
        print(f"fetching {args.url}")
        with urllib.request.urlopen(args.url, timeout=60) as resp:
            blob = resp.read()
    extract(blob, args.dest)
    problems = verify(args.dest)
    for p in problems:
        print(p, file=sys.stderr)
    if not problems:
        print(f"all {len(SIZES)} files present in {args.dest}")
    return 1 if problems else 0


if __name__ == "__main__":
    sys.exit(main())
