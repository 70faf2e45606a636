#!/usr/bin/env python3
"""Prepare data/mandible.csv from the Mandible data shipped with the R package lmtest.

Output columns:
    log_length   natural log of mandible length
    log_age      natural log of gestational age
    log_age_sq   log_age squared

Rows with age > 28 are dropped, which leaves the 158 fetuses of the original
study. Both variables are log transformed before the square is formed.

Sources, in order of preference:
    --csv FILE       a CSV exported from R, e.g. write.csv(lmtest::Mandible, "m.csv")
    --tarball FILE   a downloaded lmtest source tarball
    --url URL        download the tarball first (default: CRAN archive, lmtest 0.9-40)

Reading the .rda file inside the tarball needs the `rdata` package
(pip install rdata).

After writing the file the script prints its SHA-256. If EXPECTED_SHA256 below
is set, a mismatch is reported and the exit status is 1.
"""

import argparse
import csv
import hashlib
import io
import math
import sys
import tarfile
import urllib.request
from pathlib import Path

DEFAULT_URL = "https://cran.r-project.org/src/contrib/Archive/lmtest/lmtest_0.9-40.tar.gz"
EXPECTED_SHA256 = ""
MAX_AGE = 28.0


def rows_from_csv(path):
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        fields = {name.strip('"').lower(): name for name in reader.fieldnames or []}
        if "age" not in fields or "length" not in fields:
            sys.exit(f"{path}: expected columns 'age' and 'length', found {reader.fieldnames}")
        return [(float(r[fields["age"]]), float(r[fields["length"]])) for r in reader]


def rows_from_tarball(data):
    try:
        import rdata
    except ImportError:
        sys.exit("reading the tarball needs the 'rdata' package: pip install rdata")
    with tarfile.open(fileobj=io.BytesIO(data), mode="r:gz") as tar:
        member = next((m for m in tar.getmembers() if m.name.endswith("data/Mandible.rda")), None)
        if member is None:
            sys.exit("data/Mandible.rda not found in the tarball")
        raw = tar.extractfile(member).read()
    frame = rdata.conversion.convert(rdata.parser.parse_data(raw))["Mandible"]
    return list(zip(frame["age"].astype(float), frame["length"].astype(float)))


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--csv", type=Path)
    src.add_argument("--tarball", type=Path)
    src.add_argument("--url", default=DEFAULT_URL)
    ap.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "mandible.csv")
    args = ap.parse_args()

    if args.csv:
        rows = rows_from_csv(args.csv)
    elif args.tarball:
        rows = rows_from_tarball(args.tarball.read_bytes())
    else:
        with urllib.request.urlopen(args.url, timeout=60) as resp:
            rows = rows_from_tarball(resp.read())

    kept = [(a, l) for a, l in rows if a <= MAX_AGE]
    args.out.parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["log_length", "log_age", "log_age_sq"])
        for age, length in kept:
            la = math.log(age)
            w.writerow([repr(math.log(length)), repr(la), repr(la * la)])

    digest = hashlib.sha256(args.out.read_bytes()).hexdigest()
    print(f"wrote {args.out} ({len(kept)} of {len(rows)} rows)")
    print(f"sha256 {digest}")
    if len(kept) != 158:
        print(f"warning: expected 158 rows after the age filter, got {len(kept)}", file=sys.stderr)
    if EXPECTED_SHA256 and digest != EXPECTED_SHA256:
        print(f"checksum mismatch: expected {EXPECTED_SHA256}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
