# utils.py
from __future__ import annotations

from fractions import Fraction
from typing import Optional

# --- UI Palette (dark mode, shared by charts and the dashboard) ---
BG_MAIN = "#0B0B0E"
BG_PANEL = "#16161A"
BORDER_SUBTLE = "#2A2A30"

TEXT_PRIMARY = "#F2F2F5"
TEXT_MUTED = "#A0A0A8"

GREEN = "#00E050"
RED = "#FF5555"
NEUTRAL = "#A1A1AA"


def style_dark_ax(ax) -> None:
    ax.set_facecolor(BG_MAIN)
    ax.grid(alpha=0.12)
    ax.tick_params(colors=TEXT_MUTED)

    ax.yaxis.label.set_color(TEXT_MUTED)
    ax.xaxis.label.set_color(TEXT_MUTED)

    for spine in ax.spines.values():
        spine.set_color(BORDER_SUBTLE)


def fmt_fraction(x: Fraction, decimals: int = 12) -> str:
    """`0.833333333333 (5/6)`; integers print without the fraction."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{float(x):.{decimals}f} ({x})"


def compression_ratio(compressed: int, original: int) -> Optional[float]:
    """Compressed size over original size, None for an empty original."""
    if original <= 0:
        return None
    return compressed / original


def fmt_ratio(compressed: int, original: int) -> str:
    r = compression_ratio(compressed, original)
    return "—" if r is None else f"{r * 100:.1f}%"
