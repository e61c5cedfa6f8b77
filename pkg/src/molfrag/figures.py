"""Optional matplotlib renderings of the report CSVs.

The delimited output stays the canonical artifact; figures are written to
files next to it when a figure directory is requested.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def render_fragment_histogram(stats_by_scheme, path):
    """Bar chart of decomposition-size distributions, one series per scheme."""
    fig, ax = plt.subplots(figsize=(7, 4))
    all_sizes = sorted(
        {s for st in stats_by_scheme.values() for s in st.fragment_histogram}
    )
    width = 0.8 / max(1, len(stats_by_scheme))
    for i, (scheme, st) in enumerate(sorted(stats_by_scheme.items())):
        xs = [s + i * width for s in all_sizes]
        ys = [st.fragment_histogram.get(s, 0) for s in all_sizes]
        ax.bar(xs, ys, width=width, label=scheme)
    ax.set_xlabel("fragments per molecule")
    ax.set_ylabel("molecules")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_ring_histogram(hist, path):
    fig, ax = plt.subplots(figsize=(7, 4))
    sizes = sorted(hist.means)
    ax.bar(sizes, [hist.means[s] for s in sizes], color="#4878d0")
    if hist.overflow_mean > 0:
        ax.bar([max(sizes) + 1], [hist.overflow_mean], color="#d65f5f")
    ax.set_xlabel("ring size")
    ax.set_ylabel("mean rings per molecule")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_vocab_composition(comp, path):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.bar(
        ["ring-based", "chain-like"],
        [comp.ring_motif_fraction, 1.0 - comp.ring_motif_fraction],
        color=["#4878d0", "#d65f5f"],
    )
    ax1.set_ylabel("fraction of vocabulary")
    ax1.set_ylim(0, 1)
    sizes = sorted(comp.size_histogram)
    ax2.bar(sizes, [comp.size_histogram[s] for s in sizes], color="#6acc64")
    ax2.set_xlabel("motif size (heavy atoms)")
    ax2.set_ylabel("entries")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def figure_path(directory, name):
    os.makedirs(directory, exist_ok=True)
    return os.path.join(directory, name)
