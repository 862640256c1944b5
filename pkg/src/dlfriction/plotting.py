"""Matplotlib rendering of expected-gain curves.

Figures are written as self-contained SVG: glyphs become paths, the id
salt is pinned and the date stamp is dropped, so the same curves always
produce the same bytes.
"""

from __future__ import annotations

from typing import Dict, Optional

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .econ import GainCurve  # noqa: E402

DL_COLOR = "tab:blue"
FRICTION_COLORS = ("tab:red", "tab:orange", "tab:purple", "tab:brown", "tab:gray")

SVG_RC = {
    "svg.hashsalt": "dlfriction",
    "svg.fonttype": "path",
    "path.simplify": False,
    "font.family": "DejaVu Sans",
    "font.size": 10,
}


def curve_colors(curves: Dict[str, GainCurve]) -> Dict[str, str]:
    """Blue for frictionless (ledger-like) profiles, red and onward for the rest."""
    colors = {}
    others = iter(FRICTION_COLORS * (len(curves) // len(FRICTION_COLORS) + 1))
    for name, curve in curves.items():
        colors[name] = DL_COLOR if curve.friction.is_frictionless else next(others)
    return colors


def plot_gain_curves(
    curves: Dict[str, GainCurve],
    path,
    crossings: Optional[Dict[str, Optional[int]]] = None,
    title: str = "Expected net gain by number of tickets bought",
) -> Dict[str, str]:
    """Write one polyline per friction profile plus the zero-gain axis to ``path``.

    Returns the colour assigned to each profile.
    """
    crossings = crossings or {}
    colors = curve_colors(curves)
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(6.4, 4.2))
        try:
            ax.axhline(0.0, color="black", linewidth=0.8, zorder=1)
            for name, curve in curves.items():
                ax.plot(curve.ns, curve.gains, color=colors[name], linewidth=1.5, label=name, zorder=2)
                first = crossings.get(name)
                if first is not None:
                    ax.axvline(first, color=colors[name], linestyle=":", linewidth=0.8, zorder=1)
                    ax.annotate(
                        f"n = {first}",
                        xy=(first, 0.0),
                        xytext=(4, 6),
                        textcoords="offset points",
                        color=colors[name],
                        fontsize=8,
                    )
            ax.set_xlabel("tickets bought, n")
            ax.set_ylabel("expected gain")
            ax.set_title(title)
            ax.legend(loc="upper left", frameon=False)
            fig.tight_layout()
            fig.savefig(path, format="svg", metadata={"Date": None, "Creator": "dlfriction"})
        finally:
            plt.close(fig)
    return colors
