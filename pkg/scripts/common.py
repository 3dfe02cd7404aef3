"""Shared CSV output for the experiment scripts."""

import argparse
import csv
import sys


def parser(description: str) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--out", default=None, help="CSV path; default stdout")
    return ap


def write_csv(rows: list[dict], out: str | None) -> None:
    fh = open(out, "w", newline="", encoding="utf-8") if out else sys.stdout
    try:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    finally:
        if out:
            fh.close()
