#!/usr/bin/env python3
"""Fetch the StatLib body fat data and convert it to the CSV layout the
acceptance suite expects (see data/README.md). Needs network access."""

import sys
import urllib.request

URL = "http://lib.stat.cmu.edu/datasets/bodyfat"
HEADER = ("bodyfat,age,weight,height,neck,chest,abdomen,hip,thigh,knee,"
          "ankle,biceps,forearm,wrist")


def parse_rows(text):
    """Data lines carry 15 numeric fields: density, %fat (Siri), age,
    weight, height and ten circumferences. Some mirrors prepend a case
    number, giving 16 fields; accept both."""
    rows = []
    for line in text.splitlines():
        fields = line.split()
        if len(fields) not in (15, 16):
            continue
        try:
            values = [float(f) for f in fields]
        except ValueError:
            continue
        if len(values) == 16:
            values = values[1:]
        rows.append(values[1:])  # drop density, keep %fat + 13 measurements
    return rows


def main():
    out_path = sys.argv[1] if len(sys.argv) > 1 else "data/bodyfat.csv"
    with urllib.request.urlopen(URL, timeout=60) as resp:
        text = resp.read().decode("utf-8", errors="replace")
    rows = parse_rows(text)
    if len(rows) != 252:
        sys.exit(f"expected 252 data rows, parsed {len(rows)}; "
                 "source format may have changed")
    with open(out_path, "w") as f:
        f.write(HEADER + "\n")
        for row in rows:
            f.write(",".join(f"{v:g}" for v in row) + "\n")
    print(f"wrote {out_path} ({len(rows)} rows)")


if __name__ == "__main__":
    main()
