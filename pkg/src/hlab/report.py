"""Comparison tables: average accuracies, pairwise p-values, win counts.

The layout mirrors the usual pairwise grid: one average-accuracy row, then
for every method a p-value row (one-sided, row method better than column
method) and a greater-equal-less count row.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .errors import HlabError
from .stats import PairedResults, win_tie_loss, wilcoxon_signed_rank


def collect_accuracies(records, methods=None):
    """(methods, datasets, acc lookup) with full-coverage validation."""
    ok = [r for r in records if r.error is None]
    if methods is None:
        methods = []
        for rec in ok:
            if rec.method not in methods:
                methods.append(rec.method)
    datasets = []
    for rec in ok:
        if rec.dataset not in datasets:
            datasets.append(rec.dataset)
    acc = {}
    for rec in ok:
        acc[(rec.method, rec.dataset)] = rec.mean_accuracy
    missing = [
        (m, d) for m in methods for d in datasets if (m, d) not in acc
    ]
    if missing:
        rendered = ", ".join(f"{m}/{d}" for m, d in missing)
        raise HlabError(f"methods do not share dataset coverage; missing: {rendered}")
    if not methods or not datasets:
        raise HlabError("no successful records to report on")
    return methods, datasets, acc


def _cells(methods, datasets, acc, alternative, epsilon):
    averages = {
        m: float(np.mean([acc[(m, d)] for d in datasets])) for m in methods
    }
    p = {}
    wtl = {}
    for a in methods:
        for b in methods:
            if a == b:
                p[(a, b)] = 1.0
                wtl[(a, b)] = (0, len(datasets), 0)
                continue
            pairs = PairedResults(
                (a, b),
                np.array([[acc[(a, d)], acc[(b, d)]] for d in datasets]),
            )
            p[(a, b)] = wilcoxon_signed_rank(pairs, alternative).p_value
            wtl[(a, b)] = win_tie_loss(pairs, epsilon)
    return averages, p, wtl


def _fmt_p(value: float) -> str:
    return f"{value:.4g}"


def _fmt_acc(value: float) -> str:
    return f"{value:.4f}" if not math.isnan(value) else "nan"


def render_report_tsv(records, methods=None, alternative="greater", epsilon=0.0) -> str:
    methods, datasets, acc = collect_accuracies(records, methods)
    averages, p, wtl = _cells(methods, datasets, acc, alternative, epsilon)
    lines = ["method\trow\t" + "\t".join(methods)]
    lines.append(
        "average\tacc\t" + "\t".join(_fmt_acc(averages[m]) for m in methods)
    )
    for a in methods:
        lines.append(
            f"{a}\tp\t" + "\t".join(_fmt_p(p[(a, b)]) for b in methods)
        )
        lines.append(
            f"{a}\t>-=-<\t"
            + "\t".join("-".join(str(x) for x in wtl[(a, b)]) for b in methods)
        )
    return "\n".join(lines) + "\n"


def render_report_md(records, methods=None, alternative="greater", epsilon=0.0) -> str:
    methods, datasets, acc = collect_accuracies(records, methods)
    averages, p, wtl = _cells(methods, datasets, acc, alternative, epsilon)
    header = "| | " + " | ".join(methods) + " |"
    rule = "|---" * (len(methods) + 1) + "|"
    lines = [header, rule]
    lines.append(
        "| **average** | "
        + " | ".join(_fmt_acc(averages[m]) for m in methods)
        + " |"
    )
    for a in methods:
        lines.append(
            f"| **{a}** p | " + " | ".join(_fmt_p(p[(a, b)]) for b in methods) + " |"
        )
        lines.append(
            f"| **{a}** >-=-< | "
            + " | ".join("-".join(str(x) for x in wtl[(a, b)]) for b in methods)
            + " |"
        )
    return "\n".join(lines) + "\n"


def render_accuracy_table_tsv(records, methods=None) -> str:
    """Per-dataset mean accuracies, one dataset per row."""
    methods, datasets, acc = collect_accuracies(records, methods)
    lines = ["dataset\t" + "\t".join(methods)]
    for d in datasets:
        lines.append(
            d + "\t" + "\t".join(_fmt_acc(acc[(m, d)]) for m in methods)
        )
    return "\n".join(lines) + "\n"


def make_report(
    records,
    out_dir,
    methods=None,
    alternative="greater",
    epsilon=0.0,
) -> dict[str, str]:
    """Write the TSV and Markdown comparison tables; returns their paths."""
    os.makedirs(out_dir, exist_ok=True)
    outputs = {
        "report.tsv": render_report_tsv(records, methods, alternative, epsilon),
        "report.md": render_report_md(records, methods, alternative, epsilon),
        "accuracies.tsv": render_accuracy_table_tsv(records, methods),
    }
    paths = {}
    for name, payload in outputs.items():
        path = os.path.join(out_dir, name)
        with open(path, "w") as fh:
            fh.write(payload)
        paths[name] = path
    return paths
