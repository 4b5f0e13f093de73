"""Evaluation report writers: JSON, text table, CSV, and a metrics figure.

All writers are deterministic: no timestamps, sorted keys, fixed float
formatting. The figure import is deferred so extraction paths never pay
the matplotlib startup cost.
"""

from __future__ import annotations

import json
from pathlib import Path

from .evaluation import MetricReport


def render_text_table(reports: dict[str, MetricReport]) -> str:
    """Fixed-width comparison table, one row per mode."""
    headers = ("model", "hard accuracy", "soft accuracy", "avg. w2v similarity")
    rows = [
        (
            mode,
            f"{rep.hard_accuracy * 100:.2f}%",
            f"{rep.soft_accuracy * 100:.2f}%",
            f"{rep.avg_similarity:.4f}",
        )
        for mode, rep in reports.items()
    ]
    widths = [max(len(h), *(len(r[i]) for r in rows)) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines) + "\n"


def render_csv(reports: dict[str, MetricReport]) -> str:
    lines = ["model,hard_accuracy,soft_accuracy,avg_w2v_similarity,n,failures"]
    for mode, rep in reports.items():
        lines.append(
            f"{mode},{rep.hard_accuracy!r},{rep.soft_accuracy!r},"
            f"{rep.avg_similarity!r},{rep.n},{rep.failures}"
        )
    return "\n".join(lines) + "\n"


def write_reports(reports: dict[str, MetricReport], out_dir: str | Path) -> list[Path]:
    """Write report.json / report.txt / report.csv / metrics.png under out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path = out / "report.json"
    payload = {mode: rep.to_dict() for mode, rep in reports.items()}
    json_path.write_text(
        json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    txt_path = out / "report.txt"
    txt_path.write_text(render_text_table(reports), encoding="utf-8")
    csv_path = out / "report.csv"
    csv_path.write_text(render_csv(reports), encoding="utf-8")
    png_path = out / "metrics.png"
    render_metrics_figure(reports, png_path)
    return [json_path, txt_path, csv_path, png_path]


def render_metrics_figure(reports: dict[str, MetricReport], path: str | Path) -> None:
    """Grouped bar chart of the three metrics per mode."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    modes = list(reports)
    x = range(len(modes))
    width = 0.27
    fig, ax = plt.subplots(figsize=(max(6, 1.8 * len(modes)), 4))
    ax.bar([i - width for i in x], [reports[m].hard_accuracy for m in modes], width, label="hard accuracy")
    ax.bar(list(x), [reports[m].soft_accuracy for m in modes], width, label="soft accuracy")
    ax.bar([i + width for i in x], [reports[m].avg_similarity for m in modes], width, label="avg. w2v similarity")
    ax.set_xticks(list(x))
    ax.set_xticklabels(modes, rotation=20, ha="right", fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("score")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
