#!/usr/bin/env python3
"""Writes reference values from numpy/scipy/statsmodels into tests/oracles for the C++ tests."""
import csv
import pathlib

import numpy as np
from scipy.signal import find_peaks
from statsmodels.tsa.filters.cf_filter import cffilter

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "oracles"


def write(name, header, rows):
    with open(OUT / name, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])


def cf_cases():
    rows = []
    t = np.arange(40)
    series = {
        "mixed": 100 + 0.5 * t + 3 * np.sin(2 * np.pi * t / 8) + 1.5 * np.sin(2 * np.pi * t / 40),
        "noise": 50 + np.cumsum(np.random.default_rng(11).normal(0, 1, 40)),
    }
    for name, x in series.items():
        for low, high in [(2, 25), (3, 10)]:
            cyc, trend = cffilter(x, low, high, True)
            for i in range(len(x)):
                rows.append([name, low, high, i, x[i], cyc[i], trend[i]])
    write("cf_filter.csv", ["case", "p_low", "p_high", "t", "x", "cycle", "trend"], rows)


def peak_cases():
    rows = []
    rng = np.random.default_rng(5)
    for case in range(5):
        t = np.arange(400)
        x = np.sin(2 * np.pi * t / (20 + 5 * case)) + 0.3 * rng.normal(size=t.size)
        q75, q25 = np.percentile(x, [75, 25])
        prom = 0.3 * (q75 - q25)
        peaks, _ = find_peaks(x, distance=5, prominence=prom)
        rows.append([case, " ".join(repr(float(v)) for v in x), " ".join(str(p) for p in peaks)])
    write("peaks.csv", ["case", "series", "peaks"], rows)


def spectra():
    rows = []
    # two cliques {0,1,2} and {3,4,5} bridged by (2,3), uniform coupling eps
    adj = np.zeros((6, 6))
    for a in [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)]:
        adj[a] = adj[a[::-1]] = 1
    k = adj.sum(1)
    for eps in [0.3, 1.0]:
        w = (1 - eps) * np.eye(6) + eps * adj / k[:, None]
        lam = np.sort(np.linalg.eigvals(np.eye(6) - w).real)
        rows += [["two_clique_i_minus_w", eps, i, v] for i, v in enumerate(lam)]
    klk = np.eye(6) - adj / np.sqrt(np.outer(k, k))
    rows += [["two_clique_klk", 1.0, i, v] for i, v in enumerate(np.linalg.eigvalsh(klk))]
    write("spectra.csv", ["case", "eps", "index", "lambda"], rows)


def jacobian():
    rows = []
    fp = 0.8
    for a1, a2, d in [(-0.04, 0.4, 0.1), (-0.04, 0.3, 0.1), (-0.11, 0.4, 0.5), (-0.1, 0.4, 0.1)]:
        jac = np.array([[1 - d, 1.0], [a1, a2 + fp]])
        ev = np.linalg.eigvals(jac)
        psi = abs(np.angle(ev[0]))
        rows.append([a1, a2, d, np.trace(jac), np.linalg.det(jac), max(abs(ev)), psi])
    write("jacobian.csv", ["alpha1", "alpha2", "delta", "trace", "det", "max_modulus", "psi"], rows)


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    cf_cases()
    peak_cases()
    spectra()
    jacobian()
