"""Figure rendering for the report commands.

Figures are written next to the delimited output; the data of record is
always the CSV, the PNG is a convenience view of the same numbers.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def save_spectrum_figure(reports, path) -> None:
    """Semilog plot of normalized singular values, one line per report."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for report in reports:
        vals = report.normalized_singular_values
        label = report.subject or f"{len(vals)} values"
        ax.plot(range(1, len(vals) + 1), vals, marker=".", markersize=3, label=label)
    ax.set_xlabel("index")
    ax.set_ylabel("normalized singular value")
    ax.set_ylim(bottom=0)
    ax.grid(True, alpha=0.3)
    if len(reports) > 1 or any(r.subject for r in reports):
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_sweep_figure(rows, path) -> None:
    """Rate-distortion curve: compression ratio vs mean marker error."""
    rows = sorted(rows, key=lambda r: r["cr"])
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot([r["cr"] for r in rows], [r["distortion"] for r in rows], marker="o", markersize=4)
    for r in rows:
        ax.annotate(f"k={r['k']}", (r["cr"], r["distortion"]), fontsize=7,
                    textcoords="offset points", xytext=(4, 4))
    ax.set_xlabel("compression ratio")
    ax.set_ylabel("distortion (cm)")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
