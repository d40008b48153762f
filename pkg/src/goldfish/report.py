"""Benchmark report output: a summary text file, a tab-delimited per-item
table, and rendered figures (judge score histogram, ground-truth hit
ranks) written alongside.
"""
from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .benchmark import EvalReport

REPORT_FILE = "report.txt"
ITEMS_FILE = "items.tsv"
SCORE_FIGURE = "judge_scores.png"
RANK_FIGURE = "retrieval_ranks.png"

_ITEM_COLUMNS = [
    "item_id",
    "gt_ordinal",
    "gt_rank",
    "retrieved",
    "correct",
    "verdict",
    "score",
    "choice",
    "hits",
    "answer",
    "error",
]


def _item_rows(report: EvalReport):
    for item in report.per_item:
        yield {
            "item_id": item.item_id,
            "gt_ordinal": item.gt_ordinal if item.gt_ordinal is not None else "",
            "gt_rank": item.gt_rank if item.gt_rank is not None else "",
            "retrieved": "yes" if item.gt_rank is not None else "no",
            "correct": "yes" if item.correct else "no",
            "verdict": item.verdict.pred if item.verdict else "",
            "score": item.verdict.score if item.verdict else "",
            "choice": item.choice if item.choice is not None else "",
            "hits": ",".join(str(h) for h in item.hit_clip_ids),
            "answer": item.answer_text.replace("\t", " ").replace("\n", " "),
            "error": item.error,
        }


def summary_lines(report: EvalReport) -> list[str]:
    return [
        f"n_items: {report.n_items}",
        f"k: {report.k}",
        f"accuracy: {report.accuracy:.4f}",
        f"mean_score: {report.mean_score:.4f}",
        f"retrieval_accuracy: {report.retrieval_accuracy:.4f}",
        f"backends_unreachable: {report.backends_unreachable}",
    ]


def _render_score_figure(report: EvalReport, path: Path) -> None:
    scores = [i.verdict.score for i in report.per_item if i.verdict is not None]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.hist(scores, bins=[x - 0.5 for x in range(7)], edgecolor="black", color="#4878a8")
    ax.set_xticks(range(6))
    ax.set_xlabel("judge score")
    ax.set_ylabel("items")
    ax.set_title(f"Judge scores (mean {report.mean_score:.2f})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _render_rank_figure(report: EvalReport, path: Path) -> None:
    ranks = [i.gt_rank for i in report.per_item]
    counts = [sum(1 for r in ranks if r == rank) for rank in range(1, report.k + 1)]
    counts.append(sum(1 for r in ranks if r is None))
    labels = [str(r) for r in range(1, report.k + 1)] + ["miss"]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    colors = ["#5a9e6f"] * report.k + ["#b85450"]
    ax.bar(labels, counts, color=colors, edgecolor="black")
    ax.set_xlabel("ground-truth clip rank")
    ax.set_ylabel("items")
    ax.set_title(f"Retrieval (acc {report.retrieval_accuracy:.2f} @ k={report.k})")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(report: EvalReport, out_dir: str | Path) -> dict[str, Path]:
    """Write the report bundle; returns the paths that were written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    items_path = out / ITEMS_FILE
    with items_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_ITEM_COLUMNS, delimiter="\t")
        writer.writeheader()
        writer.writerows(_item_rows(report))

    report_path = out / REPORT_FILE
    lines = summary_lines(report) + ["", "per-item results: " + ITEMS_FILE]
    report_path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    score_path = out / SCORE_FIGURE
    rank_path = out / RANK_FIGURE
    _render_score_figure(report, score_path)
    _render_rank_figure(report, rank_path)
    return {
        "report": report_path,
        "items": items_path,
        "scores_figure": score_path,
        "ranks_figure": rank_path,
    }
