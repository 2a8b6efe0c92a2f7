"""Shared fixtures: one figure-grid run per session plus brute-force oracles."""

import csv
import time
from pathlib import Path

import pytest

from markovcoding import cli


def segment_scan_oracle(z, phi):
    """Count (k, l) segment classes by testing every indicator directly.

    A segment of length k starts at i when z[i] = 1, the next k-1 entries are
    0, and z[i+k] = 1. Its offset l is the first j < k with phi[i+j] = 1, or
    k when no such j exists. Deliberately quadratic and index-by-index.
    """
    n = len(z)
    counters = {}
    for i in range(n):
        for k in range(1, n - i):
            if z[i] != 1 or z[i + k] != 1:
                continue
            if any(z[i + t] != 0 for t in range(1, k)):
                continue
            l = k
            for j in range(k):
                if phi[i + j] == 1:
                    l = j
                    break
            counters[(k, l)] = counters.get((k, l), 0) + 1
    return counters


def read_rows(path):
    with Path(path).open() as fh:
        return list(csv.DictReader(fh))


def final_trace_row(path):
    rows = read_rows(path)
    last = rows[-1]
    return float(last["value"]), float(last["gap"])


class FigureOutputs:
    """Parsed CSV rows, terminal optimizer certificates, and wall times."""

    def __init__(self, base: Path):
        self.base = base
        self.fig1_csv = base / "fig1.csv"
        self.fig2_csv = base / "fig2.csv"
        trace_dir = base / "trace"

        t0 = time.monotonic()
        assert cli.main(["--command", "fig2", "--out", str(self.fig2_csv),
                         "--trace", str(trace_dir), "--no-plot"]) == 0
        self.fig2_seconds = time.monotonic() - t0

        t0 = time.monotonic()
        assert cli.main(["--command", "fig1", "--out", str(self.fig1_csv),
                         "--trace", str(trace_dir), "--no-plot"]) == 0
        self.fig1_seconds = time.monotonic() - t0

        self.fig1_rows = read_rows(self.fig1_csv)
        self.fig2_rows = read_rows(self.fig2_csv)
        self.certificates = {
            path.stem.removeprefix("trace_"): final_trace_row(path)
            for path in sorted(trace_dir.glob("trace_*.csv"))
        }


@pytest.fixture(scope="session")
def figure_outputs(tmp_path_factory):
    return FigureOutputs(tmp_path_factory.mktemp("figures"))


@pytest.fixture(scope="session")
def golden_dir():
    return Path(__file__).parent / "golden"
