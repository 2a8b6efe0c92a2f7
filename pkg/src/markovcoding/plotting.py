"""Figure rendering for the CLI report paths.

matplotlib is imported lazily with the Agg backend so headless runs and
plot-free library use never touch a display.
"""

from __future__ import annotations


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_fig1(rows: list[dict], path) -> None:
    """Normalized achievable rates against the crossover probability."""
    plt = _pyplot()
    eps = [r["eps"] for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(eps, [r["R0_norm"] for r in rows], "k--", label="simulate-and-forward")
    ax.plot(eps, [r["R1_ell_norm"] for r in rows], "o-", ms=3,
            label="noisy run, optimized bound")
    ax.plot(eps, [r["R1_ellcheck_norm"] for r in rows], "s-", ms=3,
            label="noisy run, series bound")
    ax.plot(eps, [r["R1_h_norm"] for r in rows], "^-", ms=3,
            label="noisy run, entropy bound")
    ax.set_xlabel("crossover probability")
    ax.set_ylabel("rate / (1 - h)")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_fig2(rows: list[dict], path) -> None:
    """Compression-length bounds against the combined error rate."""
    plt = _pyplot()
    p = [r["p"] for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(p, [r["h"] for r in rows], "k--", label="binary entropy")
    ax.plot(p, [r["Lcheck"] for r in rows], "s-", ms=3, label="series bound")
    ax.plot(p, [r["Ltilde"] for r in rows], "o-", ms=3, label="optimized bound")
    ax.set_xlabel("error rate")
    ax.set_ylabel("bits per position")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_simulate(rows: list[dict], path) -> None:
    """Measured per-run rates of both schemes against the crossover probability."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    styles = {1: ("tab:orange", "simulate-and-forward"),
              2: ("tab:blue", "noisy run + repair")}
    for scheme, (color, label) in styles.items():
        pts = [(r["eps"], r["rate"]) for r in rows
               if r["scheme"] == scheme and r["rate"] != ""]
        if not pts:
            continue
        ax.scatter([q[0] for q in pts], [q[1] for q in pts], s=8, alpha=0.4,
                   color=color, label=label)
    ax.set_xlabel("crossover probability")
    ax.set_ylabel("clean bits per channel use")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_montecarlo(rows: list[dict], path) -> None:
    """Excess of measured description length over its expectation, by n."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ns = sorted({r["n"] for r in rows})
    for n in ns:
        ex = [r["excess"] for r in rows if r["n"] == n]
        ax.scatter([n] * len(ex), ex, s=8, alpha=0.4, color="tab:blue")
    medians = [sorted(r["excess"] for r in rows if r["n"] == n)[
        sum(1 for r in rows if r["n"] == n) // 2] for n in ns]
    ax.plot(ns, medians, "ro-", label="median excess")
    ax.set_xscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("measured - expected length (bits per position)")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
