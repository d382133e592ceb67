"""Static SVG line charts.

Every chart is written with a fixed hash salt and without a timestamp, so
identical input produces byte-identical files.  Each plotted series is
tagged with an SVG group id ``series-<n>``, and the plotted points are
written next to the chart as ``<stem>.points.csv``.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Mapping, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .dataio import atomic_write, render_table  # noqa: E402

RC = {
    "svg.hashsalt": "cashless-cti",
    "svg.fonttype": "none",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "figure.figsize": (6.4, 4.0),
    "lines.linewidth": 1.5,
}


def emit_plot(
    series: Mapping[str, Sequence[Tuple[float, float]]],
    destination,
    title: str = "",
    xlabel: str = "t (years)",
    ylabel: str = "",
) -> Tuple[Path, Path]:
    """Write ``destination`` (SVG) and a sibling ``.points.csv`` of the points.

    ``series`` maps a legend label to a list of (x, y) pairs.  Returns the
    two paths written.
    """
    if not series or any(len(pts) == 0 for pts in series.values()):
        raise ValueError("every plotted series needs at least one point")
    destination = Path(destination)
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        try:
            for i, (label, pts) in enumerate(series.items()):
                xs = [float(x) for x, _ in pts]
                ys = [float(y) for _, y in pts]
                (line,) = ax.plot(xs, ys, label=label, marker="o" if len(pts) == 1 else None)
                line.set_gid(f"series-{i}")
            ax.set_xlabel(xlabel)
            ax.set_ylabel(ylabel)
            if title:
                ax.set_title(title)
            if len(series) > 1:
                ax.legend()
            fig.tight_layout()
            buf = io.BytesIO()
            fig.savefig(buf, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    atomic_write(destination, buf.getvalue())
    csv_path = destination.with_suffix(".points.csv")
    rows = [(label, x, y) for label, pts in series.items() for x, y in pts]
    atomic_write(csv_path, render_table(rows, ("series", "x", "y")))
    return destination, csv_path
