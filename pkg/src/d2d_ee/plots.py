"""Render the normalized EE-versus-iteration figures to files."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_STYLE = {
    "energy_efficient": dict(marker="o", linestyle="-", color="tab:blue",
                             label="Energy-efficient"),
    "spectral_efficient": dict(marker="s", linestyle="--", color="tab:red",
                               label="Spectral-efficient"),
    "random": dict(marker="^", linestyle=":", color="tab:green",
                   label="Random"),
}


def _plot_curves(rounds, curves, ylabel, path):
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for alg, values in curves.items():
        ax.plot(rounds, values, markersize=5,
                **_STYLE.get(alg, dict(label=alg)))
    ax.set_xlabel("Game iteration")
    ax.set_ylabel(ylabel)
    ax.set_xticks(rounds)
    ax.grid(True, alpha=0.4)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_figures(result, out_dir) -> list:
    """Write the D2D and cellular normalized-EE figures; returns the paths."""
    out = Path(out_dir)
    d2d_path = out / "d2d_ee.png"
    cell_path = out / "cellular_ee.png"
    _plot_curves(result.rounds, result.norm_d2d_ee,
                 "Normalized average EE of D2D links", d2d_path)
    _plot_curves(result.rounds, result.norm_cell_ee,
                 "Normalized average EE of cellular links", cell_path)
    return [d2d_path, cell_path]
