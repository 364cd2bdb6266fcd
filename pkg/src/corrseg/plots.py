"""Figure rendering for profile and dominance curves.

Imported lazily by the CLI so that plain detection runs never touch
matplotlib.  Uses the Agg backend; every function writes a file.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .cusum import CusumProfile
from .simulate import DominanceProfile


def save_profile_figure(
    prof: CusumProfile,
    path: str,
    critical_value: float | None = None,
    title: str | None = None,
) -> None:
    """Plot the absolute target function over the data index range."""
    n = prof.end - prof.start + 1
    T = round(len(prof.grid) / max(prof.grid[-1] - prof.grid[0], 1e-12)) if len(prof.grid) > 1 else n
    idx = prof.grid * T
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(idx, prof.values, lw=1.0, color="C0")
    ax.axvline(prof.argmax_fraction * T, color="C3", lw=0.8, ls="--",
               label=f"maximizer (index {round(prof.argmax_fraction * T)})")
    if critical_value is not None:
        ax.axhline(critical_value / math.sqrt(n), color="C1", lw=0.8, ls=":",
                   label=f"critical value {critical_value:.4g} / sqrt(n)")
    ax.set_xlabel("observation index")
    ax.set_ylabel("|target function|")
    ax.set_title(title or f"Interval [{prof.start}, {prof.end}], statistic {prof.statistic:.6g}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_dominance_figure(prof: DominanceProfile, path: str, title: str | None = None) -> None:
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(prof.grid, prof.values, lw=1.2, color="C0")
    for z in prof.maximizers:
        ax.axvline(z, color="C3", lw=0.8, ls="--")
    ax.set_xlabel("time fraction")
    ax.set_ylabel("|drift|")
    if title is None:
        if prof.constant:
            title = "Dominance profile (constant)"
        else:
            mx = ", ".join(f"{z:g}" for z in prof.maximizers)
            title = f"Dominance profile, maximizer(s) at {mx}"
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
