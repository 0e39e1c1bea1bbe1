"""SVG figures rendered from the CSV files they accompany.

Every figure is drawn only from data read back from disk, with a fixed
hash salt and no date metadata, so regenerating from the same CSV gives a
byte-identical SVG.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .csvio import read_complex_series, read_trajectory  # noqa: E402

_RC = {
    "svg.hashsalt": "hybridbath",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
}

# populations and coherence, in the line styles used for the sweep panels
_ELEMENT_STYLES = (((0, 0), "red", "-", r"$|\rho_{11}|$"),
                   ((1, 1), "green", "--", r"$|\rho_{22}|$"),
                   ((0, 1), "black", "-.", r"$|\rho_{12}|$"))


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_run(trajectory_csv, coefficients_csv, svg_path):
    """Two panels: density-matrix magnitudes and coefficient magnitudes."""
    with plt.rc_context(_RC):
        times, states = read_trajectory(trajectory_csv)
        ctimes, series = read_complex_series(coefficients_csv)
        fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.0, 6.0), sharex=True)
        d = states.shape[1]
        for i in range(d):
            for j in range(i, d):
                style = "-" if i == j else "--"
                ax1.plot(times, np.abs(states[:, i, j]), style,
                         label=rf"$|\rho_{{{i + 1}{j + 1}}}|$")
        ax1.set_ylabel("magnitude")
        ax1.legend(loc="best", ncol=2 if d > 2 else 1, fontsize=7)
        for name, s in series.items():
            ax2.plot(ctimes, np.abs(s), label=f"|{name}|")
        ax2.set_xlabel("t")
        ax2.set_ylabel("coefficient magnitude")
        ax2.legend(loc="best", ncol=2, fontsize=7)
        fig.tight_layout()
        _save(fig, svg_path)


def plot_sweep(knob, values, trajectory_csvs, svg_path):
    """One panel per knob value with the two populations and the coherence."""
    n = len(trajectory_csvs)
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(n, 1, figsize=(6.0, 2.2 * n), sharex=True, squeeze=False)
        for ax, value, path in zip(axes[:, 0], values, trajectory_csvs):
            times, states = read_trajectory(path)
            for (i, j), color, style, label in _ELEMENT_STYLES:
                ax.plot(times, np.abs(states[:, i, j]), color=color, linestyle=style,
                        label=label)
            ax.set_title(f"{knob} = {value:g}", fontsize=9)
            ax.set_ylim(-0.02, 1.02)
        axes[0, 0].legend(loc="best", fontsize=7)
        axes[-1, 0].set_xlabel("t")
        fig.tight_layout()
        _save(fig, svg_path)
