"""Suite reports on disk: CSV tables, a JSON summary and PNG figures.

Figures are written without timestamps in their metadata so two runs with
the same seed produce identical files.
"""
from __future__ import annotations

import csv
from collections import defaultdict
from contextlib import contextmanager
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_PNG_META = {"Software": None}


@contextmanager
def _figure(path, figsize=(6.4, 4.0)):
    fig, ax = plt.subplots(figsize=figsize)
    try:
        yield fig, ax
        fig.tight_layout()
        fig.savefig(path, dpi=100, metadata=_PNG_META)
    finally:
        plt.close(fig)


def _write_csv(path, rows, fields):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(r)


def plot_pass_counts(counts, path):
    names = sorted(counts)
    passed = [counts[n]["passed"] for n in names]
    failed = [counts[n]["total"] - counts[n]["passed"] for n in names]
    with _figure(path) as (fig, ax):
        ax.barh(names, passed, color="tab:green", label="passed")
        ax.barh(names, failed, left=passed, color="tab:red", label="failed")
        ax.set_xlabel("cases")
        ax.set_title("property suite")
        ax.legend(loc="lower right", frameon=False)


def plot_stage_sizes(stage_sizes, path):
    """Largest and mean automaton size per pipeline stage and semantics."""
    groups = defaultdict(list)
    for r in stage_sizes:
        groups[(r["semantics"], r["stage"])].append(r["size"])
    keys = sorted(groups)
    labels = [f"{sem}:{stage}" for sem, stage in keys]
    largest = [max(groups[k]) for k in keys]
    mean = [sum(groups[k]) / len(groups[k]) for k in keys]
    with _figure(path, figsize=(7.0, max(3.0, 0.3 * len(keys) + 1))) as (fig, ax):
        y = range(len(keys))
        ax.barh(list(y), largest, color="tab:blue", alpha=0.4, label="max")
        ax.plot(mean, list(y), "o", color="tab:blue", label="mean")
        ax.set_yticks(list(y))
        ax.set_yticklabels(labels, fontsize=7)
        ax.set_xscale("symlog")
        ax.set_xlabel("states / positions")
        ax.set_title("automaton size per stage")
        ax.legend(loc="lower right", frameon=False)


def write_report(report, directory) -> list:
    """Write ``cases.csv``, ``stages.csv``, ``summary.json`` and two figures;
    returns the written paths."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    rows = [c.row() for c in report.cases]
    extra = sorted({k for r in rows for k in r} - {"property", "index", "formula", "ok"})
    paths = [out / "cases.csv", out / "stages.csv", out / "summary.json",
             out / "pass_counts.png", out / "stage_sizes.png"]
    _write_csv(paths[0], rows, ["property", "index", "formula", "ok"] + extra)
    _write_csv(paths[1], report.stage_sizes, ["formula", "semantics", "stage", "size"])
    paths[2].write_text(report.to_json() + "\n")
    plot_pass_counts(report.counts(), paths[3])
    plot_stage_sizes(report.stage_sizes, paths[4])
    return paths
