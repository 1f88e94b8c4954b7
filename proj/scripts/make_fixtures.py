#!/usr/bin/env python3
"""Regenerates the deterministic CSV fixtures under tests/fixtures."""
import csv
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"

FLOW_HEADER = ["source_sector", "source_country", "dest_sector", "dest_country", "value"]


def write_flows(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(FLOW_HEADER)
        for r in rows:
            w.writerow(r[:4] + [repr(float(r[4]))])


def synthetic_3x5():
    """3 countries x 5 sectors; domestic flows dominate, final demand weighs triple."""
    countries = ["AAA", "BBB", "CCC"]
    sectors = ["D", "F", "GtH", "I", "JtK"]
    rng = np.random.default_rng(42)
    rows = []
    for j, c in enumerate(countries):
        for s in sectors:
            for l, d in enumerate(countries):
                for k in ["FinD"] + sectors:
                    base = 1.0 if l == j else 0.08
                    if k == "FinD":
                        base *= 3.0
                    rows.append([s, c, k, d, base * rng.uniform(0.5, 1.5)])
    write_flows(OUT / "synthetic_3x5_flows.csv", rows)


def single_country_10():
    """One economy with ten sectors and a skewed flow structure."""
    sectors = [f"S{i:02d}" for i in range(10)]
    rng = np.random.default_rng(7)
    size = np.linspace(2.0, 0.5, 10)
    rows = []
    for i, s in enumerate(sectors):
        for k, d in enumerate(["FinD"] + sectors):
            scale = 2.0 if d == "FinD" else size[k - 1]
            rows.append([s, "USA", d, "USA", scale * size[i] * rng.uniform(0.5, 1.5)])
    write_flows(OUT / "single_country_10_flows.csv", rows)


def panel():
    """Two countries, three sectors, real value added 1970-2007 with a gap and a splice pair."""
    rng = np.random.default_rng(3)
    years = range(1970, 2008)
    with open(OUT / "panel_sample.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["country", "sector", "variable", "year", "value"])
        for c in ["AAA", "BBB"]:
            common = np.cumsum(rng.normal(0.02, 0.02, len(years)))
            for s in ["D", "F", "TOT"]:
                own = np.cumsum(rng.normal(0.0, 0.01, len(years)))
                cyc = 0.03 * np.sin(2 * np.pi * np.arange(len(years)) / 8.0 + rng.uniform(0, 1))
                v = 100.0 * np.exp(common + own + cyc)
                for t, y in enumerate(years):
                    if c == "BBB" and s == "F" and y in (1990, 1991):
                        continue
                    w.writerow([c, s, "VA", y, repr(float(v[t]))])
        for y in range(1970, 1996):
            w.writerow(["AAA", "TOT", "VA_OLD", y, repr(100.0 + 2.0 * (y - 1970))])


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    synthetic_3x5()
    single_country_10()
    panel()
