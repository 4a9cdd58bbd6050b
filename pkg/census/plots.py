# census/plots.py
from __future__ import annotations

import matplotlib.pyplot as plt
import pandas as pd

from census.counting import Measure, TreeClass, asymptotic_prediction
from utils import BG_MAIN, GREEN, NEUTRAL, RED, TEXT_PRIMARY, style_dark_ax

_COLORS = {Measure.NODES.value: GREEN, Measure.EDGES.value: RED}


def plot_average_sizes(table: pd.DataFrame):
    """Average dag sizes of a census table against their leading-term predictions."""
    fig, ax = plt.subplots(figsize=(10, 4))
    fig.patch.set_facecolor(BG_MAIN)
    style_dark_ax(ax)

    for measure, rows in table.groupby("measure"):
        rows = rows.sort_values("n")
        color = _COLORS.get(measure, NEUTRAL)
        ax.plot(rows["n"], rows["average"].astype(float), color=color, linewidth=1.5, label=f"average {measure}")
        predicted = rows[rows["n"] >= 2]
        if predicted.empty:
            continue
        cls = TreeClass(predicted["class"].iloc[0])
        m = int(predicted["m"].iloc[0])
        ax.plot(
            predicted["n"],
            [asymptotic_prediction(cls, m, int(n), measure) for n in predicted["n"]],
            color=color,
            linestyle="--",
            alpha=0.6,
            label=f"leading term {measure}",
        )

    ax.set_xlabel("edges n")
    ax.set_ylabel("average dag size")
    ax.set_title("Average minimal dag size", color=TEXT_PRIMARY, pad=15)

    leg = ax.legend(frameon=False, loc="upper left")
    for t in leg.get_texts():
        t.set_color(TEXT_PRIMARY)
    return fig
