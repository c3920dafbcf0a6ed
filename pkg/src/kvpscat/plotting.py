"""Figure rendering for run outputs.

Each run writes delimited data first; these helpers turn the collected
rows into PNG companions saved next to the CSVs.  Kept deliberately
plain: one figure per concern, no styling beyond what reads well.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "scan_figure",
    "probability_figure",
    "convergence_figure",
    "fidelity_figure",
    "scaling_figure",
]


def scan_figure(rows, path, energy_label):
    """Re/Im of S per channel pair: solver symbols over reference lines."""
    pairs = sorted({(r["channel_from"], r["channel_to"]) for r in rows})
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
    for pair in pairs:
        sel = [r for r in rows if (r["channel_from"], r["channel_to"]) == pair]
        e = np.array([r["energy"] for r in sel])
        label = f"S({pair[1]}<-{pair[0]})"
        axes[0].plot(e, [r["re_s_cc"] for r in sel], "-", lw=1)
        axes[0].plot(e, [r["re_s_kvp"] for r in sel], "o", ms=3, label=label)
        axes[1].plot(e, [r["im_s_cc"] for r in sel], "-", lw=1)
        axes[1].plot(e, [r["im_s_kvp"] for r in sel], "o", ms=3, label=label)
    axes[0].set_ylabel("Re S")
    axes[1].set_ylabel("Im S")
    for ax in axes:
        ax.set_xlabel(energy_label)
    axes[0].legend(fontsize=8)
    fig.suptitle("S-matrix: variational (symbols) vs coupled-channel (lines)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def probability_figure(rows, path, energy_label):
    pairs = sorted({(r["channel_from"], r["channel_to"]) for r in rows})
    fig, ax = plt.subplots(figsize=(6, 4))
    for pair in pairs:
        sel = [r for r in rows if (r["channel_from"], r["channel_to"]) == pair]
        e = [r["energy"] for r in sel]
        ax.semilogy(e, [max(r["prob_cc"], 1e-300) for r in sel], "-", lw=1)
        ax.semilogy(
            e,
            [max(r["prob_kvp"], 1e-300) for r in sel],
            "o",
            ms=3,
            label=f"P({pair[1]}<-{pair[0]})",
        )
    ax.set_xlabel(energy_label)
    ax.set_ylabel("transition probability")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def convergence_figure(rows, path):
    gammas = sorted({r["gamma"] for r in rows})
    fig, ax = plt.subplots(figsize=(6, 4))
    for g in gammas:
        sel = sorted(
            (r for r in rows if r["gamma"] == g), key=lambda r: r["n_basis"]
        )
        ax.semilogy(
            [r["n_basis"] for r in sel],
            [max(r["abs_frac_err"], 1e-300) for r in sel],
            "o-",
            label=f"gamma={g}",
        )
    ax.set_xlabel("number of square-integrable basis functions")
    ax.set_ylabel("|fractional error| vs coupled-channel")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def fidelity_figure(rows, path):
    depths = sorted({r["depth"] for r in rows})
    fig, ax = plt.subplots(figsize=(6, 4))
    width = 0.8 / max(1, len(depths))
    for i, d in enumerate(depths):
        sel = sorted(
            (r for r in rows if r["depth"] == d), key=lambda r: r["column"]
        )
        cols = np.array([r["column"] for r in sel], dtype=float)
        ax.bar(
            cols + (i - (len(depths) - 1) / 2) * width,
            [r["fidelity"] for r in sel],
            width=width,
            label=f"depth {d}",
        )
    ax.set_xlabel("column of the inverse")
    ax.set_ylabel("fidelity vs classical solution")
    ax.set_ylim(0, 1.05)
    ax.axhline(0.999, color="k", lw=0.5, ls="--")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def scaling_figure(rows, path):
    fig, axes = plt.subplots(1, 2, figsize=(9, 4))
    names = [r["name"] for r in rows]
    axes[0].bar(names, [r["qubits"] for r in rows])
    axes[0].set_ylabel("qubits")
    axes[1].bar(names, [r["pauli_terms"] for r in rows])
    axes[1].set_ylabel("Pauli terms")
    axes[1].set_yscale("log")
    for ax in axes:
        ax.tick_params(axis="x", rotation=20)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
