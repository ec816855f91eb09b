"""Figure rendering for diagrams and trajectories.

Thin matplotlib emitters: a diagram plot with the diagonal and, when a margin
is supplied, the L1 boxes and near-diagonal strip of the induced
neighborhood; and a trajectory plot of state coordinates with the membership
track.  Output is written to a file (SVG by extension, else whatever
matplotlib infers) with deterministic content for identical inputs.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Polygon

from .diagrams import PersistenceDiagram, is_inf
from .dynamics import DiagramNeighborhood, TrajectoryObservation

plt.rcParams["svg.hashsalt"] = "persfiber"

__all__ = ["plot_diagram", "plot_trajectory"]

_SAVE_KW = {"metadata": {"Date": None}}


def _save(fig, out: str) -> None:
    if str(out).endswith(".svg"):
        fig.savefig(out, **_SAVE_KW)
    else:
        fig.savefig(out)
    plt.close(fig)


def plot_diagram(diagram: PersistenceDiagram, out: str, mu: float | None = None) -> None:
    """Render a persistence diagram; with ``mu``, overlay its neighborhood."""
    finite = [(p.birth, p.death) for p in diagram.finite_points()]
    essential = [p.birth for p in diagram.infinite_points()]
    births = [p.birth for p in diagram.points]
    deaths = [d for _, d in finite]
    lo = min(births) - 1.0
    hi = max(births + deaths + [b + 1.0 for b in essential]) + 1.0
    inf_level = hi + 0.5

    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot([lo, inf_level], [lo, inf_level], color="gray", linewidth=0.8)
    if essential:
        ax.axhline(inf_level, color="gray", linewidth=0.6, linestyle=":")
        ax.scatter(essential, [inf_level] * len(essential), color="black", zorder=3)
    if finite:
        ax.scatter([b for b, _ in finite], [d for _, d in finite], color="black", zorder=3)

    if mu is not None:
        nbhd = DiagramNeighborhood(diagram, mu)
        for p in diagram.points:
            if is_inf(p.death):
                ax.plot([p.birth - mu, p.birth + mu], [inf_level, inf_level],
                        color="tab:blue", linewidth=2.0)
                continue
            b, d = p.birth, p.death
            diamond = Polygon([(b - mu, d), (b, d + mu), (b + mu, d), (b, d - mu)],
                              closed=True, fill=False, edgecolor="tab:blue")
            ax.add_patch(diamond)
        strip_x = [nbhd.strip_lo, nbhd.strip_hi, nbhd.strip_hi, nbhd.strip_lo]
        strip_y = [nbhd.strip_lo, nbhd.strip_hi, nbhd.strip_hi + mu, nbhd.strip_lo + mu]
        ax.add_patch(Polygon(list(zip(strip_x, strip_y)), closed=True,
                             facecolor="tab:blue", alpha=0.15, edgecolor="none"))

    ax.set_xlabel("birth")
    ax.set_ylabel("death")
    ax.set_xlim(lo, inf_level + 0.5)
    ax.set_ylim(lo, inf_level + 0.5)
    fig.tight_layout()
    _save(fig, out)


def plot_trajectory(obs: TrajectoryObservation, out: str) -> None:
    """Render state coordinates over time, plus membership/distance if tracked."""
    has_track = obs.in_np is not None or obs.component_distance is not None
    nrows = 2 if has_track else 1
    fig, axes = plt.subplots(nrows, 1, figsize=(7, 3 * nrows), sharex=True, squeeze=False)
    ax = axes[0][0]
    for j in range(obs.states.shape[1]):
        ax.plot(obs.times, obs.states[:, j], label=f"z{j + 1}", linewidth=0.9)
    ax.set_ylabel("state")
    ax.legend(loc="upper right", fontsize=8)
    if has_track:
        ax2 = axes[1][0]
        if obs.component_distance is not None:
            ax2.plot(obs.times, obs.component_distance, color="black",
                     linewidth=0.9, label="component distance")
        if obs.in_np is not None:
            inside = [1 if flag else 0 for flag in obs.in_np]
            ax2.fill_between(obs.times, 0, inside, step="mid", alpha=0.2,
                             color="tab:green", label="in neighborhood")
        ax2.set_ylabel("observation")
        ax2.legend(loc="upper right", fontsize=8)
        ax2.set_xlabel("t")
    else:
        ax.set_xlabel("t")
    fig.tight_layout()
    _save(fig, out)
