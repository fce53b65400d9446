"""Figures for CLI runs (matplotlib, Agg backend). Floats appear only here, never in certificates."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_META = {"Software": None}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, metadata=_META)
    plt.close(fig)


def plot_expansion(stream, path):
    """Digit values and certified remainder bounds of a base expansion."""
    n = stream.blocks()
    fig, (a, b) = plt.subplots(1, 2, figsize=(9, 3.5))
    a.plot(range(len(stream.digits)), stream.digits, "o-", ms=3)
    a.set_xlabel("digit index")
    a.set_title("digits")
    b.semilogy(range(n), [float(stream.remainder_bound(k)) or 1e-300 for k in range(n)], "s-", ms=3)
    b.set_xlabel("blocks n")
    b.set_title("remainder bound")
    _save(fig, path)


def plot_evidence(evidence_list, path):
    """(a1) lower and (a2) upper log bounds per N, one panel per probe."""
    k = max(1, len(evidence_list))
    fig, axes = plt.subplots(1, k, figsize=(4.5 * k, 3.5), squeeze=False)
    for ax, ev in zip(axes[0], evidence_list):
        Ns = [r.N for r in ev.rows]
        ax.plot(Ns, [float(r.a1_lower) for r in ev.rows], "o-", label="(a1) lower, log")
        ax.plot(Ns, [float(r.a2_upper) for r in ev.rows], "s-", label="(a2) upper, log")
        if ev.witness is not None:
            ax.axvline(ev.witness, color="grey", ls=":")
        ax.set_yscale("symlog")
        ax.set_xlabel("N")
        ax.set_title(f"probe {ev.j}")
        ax.legend(fontsize=7)
    _save(fig, path)


def plot_dims(profile, path):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    Ns = [N for N, _ in profile.dims]
    ax.step(Ns, [d for _, d in profile.dims], where="post")
    ax.axhline((profile.n + 1) * (profile.n + 2) / 2, color="grey", ls="--", label="(n+1)(n+2)/2")
    ax.set_xlabel("N")
    ax.set_ylabel("dim E_N")
    ax.legend(fontsize=7)
    _save(fig, path)


def plot_schedule(schedule, path):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.semilogy(range(1, len(schedule.s) + 1), [float(s) for s in schedule.s], "o-")
    ax.set_xlabel("n")
    ax.set_ylabel("s_n")
    _save(fig, path)
