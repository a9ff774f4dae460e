"""CSV and figure emission for reproduction runs.

CSV writes are atomic (temp file + rename) and byte-deterministic; the
optional figure is a pure function of the CSV rows.
"""

from __future__ import annotations

import math
import os
import tempfile
from typing import Sequence

from .calg import format_complex


def fmt_real(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    return repr(float(x))


def fmt_bool(b: bool) -> str:
    return "true" if b else "false"


fmt_complex = format_complex


def write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence[str]]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    data = "\n".join(lines) + "\n"
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_ratio_figure(
    path: str,
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    xlabel: str = "t",
    ylabel: str = "ratio",
    title: str = "",
) -> None:
    """Render one polyline per series against a log-scale t axis."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, xs, ys in series:
        ax.plot(xs, ys, marker="o", markersize=3, label=label)
    ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 0:
        ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
