"""Matplotlib figures for the report commands (written to files, Agg backend)."""
from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .system import ConstraintSystem  # noqa: E402
from .torus import FomenkoGraph, TorusSpec, ellipse_points, resonance_line  # noqa: E402

STYLE = {
    "figure.dpi": 120,
    "font.size": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.bbox": "tight",
}


def plot_action_plane(ax, sys: ConstraintSystem, tori: list[TorusSpec], n: int = 400):
    """Energy curve, physical arc, resonance lines and maximal tori in the (s1, s2) plane."""
    arc = ellipse_points(sys, n, physical=True)
    lim = 1.25 * max(arc.max(), 1e-9)
    if not sys.is_unperturbed:
        full = ellipse_points(sys, n, physical=False)
        ax.plot(full[:, 0], full[:, 1], color="0.6", lw=1, label="H = E")
        lim = 1.1 * np.abs(full).max()
    ax.plot(arc[:, 0], arc[:, 1], color="k", lw=2, label="physical arc")
    for which, color in ((1, "tab:red"), (2, "tab:orange")):
        line = resonance_line(sys, which, (-lim, lim), 2)
        if len(line):
            ax.plot(line[:, 0], line[:, 1], color=color, lw=1, label=f"$\\Omega_{which}=0$")
    for t in tori:
        ax.plot(t.point.s1, t.point.s2, "o", color="k")
        ax.annotate(t.label, (t.point.s1, t.point.s2), xytext=(4, 4), textcoords="offset points")
    ax.axhline(0, color="0.8", lw=0.8)
    ax.axvline(0, color="0.8", lw=0.8)
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    ax.set_aspect("equal")
    ax.set_xlabel("$s_1$")
    ax.set_ylabel("$s_2$")
    ax.legend(loc="lower left", fontsize=8, frameon=False)


def plot_fomenko(ax, graph: FomenkoGraph):
    """Vertices placed at the value of the integral (vertical) in arc order (horizontal)."""
    xs = np.arange(len(graph.vertices), dtype=float)
    ys = [v.value for v in graph.vertices]
    for e in graph.edges:
        ax.plot([xs[e.source], xs[e.target]], [ys[e.source], ys[e.target]], color="k", lw=2)
    for x, v in zip(xs, graph.vertices):
        face = "k" if v.kind == "black" else "w"
        ax.plot(x, v.value, "o", ms=9, mfc=face, mec="k", mew=1.5, zorder=3)
        ax.annotate(v.label, (x, v.value), xytext=(6, -2), textcoords="offset points", fontsize=8)
    ax.set_xticks([])
    ax.set_ylabel(f"${graph.integral[0]}_{graph.integral[1]}$")
    ax.set_title(f"$\\Gamma({graph.integral[0]}_{graph.integral[1]}, \\Sigma)$")
    ax.margins(0.2)


def render_fomenko_figure(sys: ConstraintSystem, tori: list[TorusSpec], graph: FomenkoGraph,
                          path: str | Path) -> Path:
    with plt.rc_context(STYLE):
        fig, (left, right) = plt.subplots(1, 2, figsize=(9, 4), gridspec_kw={"width_ratios": [3, 2]})
        plot_action_plane(left, sys, tori)
        plot_fomenko(right, graph)
        fig.savefig(path)
        plt.close(fig)
    return Path(path)


def render_certificate_figure(reports: dict, path: str | Path) -> Path:
    """Imaginary and real parts of the orbit averages against the fixed angle."""
    with plt.rc_context(STYLE):
        n = max(len(reports), 1)
        fig, axes = plt.subplots(1, n, figsize=(4.5 * n, 3.5), squeeze=False)
        for ax, (label, rep) in zip(axes[0], sorted(reports.items())):
            for entry in rep["entries"]:
                phi = np.asarray(entry["phi_grid"])
                avg = np.asarray(entry["averages"])
                name = entry["torus"]["label"]
                ax.plot(phi, avg[:, 1], "o-", label=f"Im A, {name}")
                ax.plot(phi, avg[:, 0], "x--", label=f"Re A, {name}")
                if entry.get("prediction"):
                    pred = np.asarray(entry["prediction"])
                    fine = np.linspace(0, 2 * math.pi, 200)
                    if np.any(pred):
                        amp = pred[np.argmax(np.abs(pred[:, 1])), 1] / max(
                            abs(math.sin(2 * phi[np.argmax(np.abs(pred[:, 1]))])), 1e-300)
                        ax.plot(fine, amp * np.sin(2 * fine), color="0.6", lw=0.8)
            ax.axhline(0, color="0.8", lw=0.8)
            ax.set_xlabel("fixed angle $\\varphi$")
            ax.set_title(f"{label}: {rep['verdict']}")
            ax.legend(fontsize=7, frameon=False)
        fig.savefig(path)
        plt.close(fig)
    return Path(path)
