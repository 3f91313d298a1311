"""Figure rendering for the CLI report path (Agg backend, files only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import numpy as np
import matplotlib.pyplot as plt


def plot_resonances(search, re_range, im_range, path):
    fig, ax = plt.subplots(figsize=(6, 4))
    for r in search.resonances:
        mk = "o" if r.parity == "even" else "s"
        ax.plot(r.s.real, r.s.imag, mk, ms=8)
        ax.annotate(f"{r.s.real:.6f}", (r.s.real, r.s.imag),
                    textcoords="offset points", xytext=(5, 5), fontsize=8)
    ax.axvline(0.5, color="gray", lw=0.5, ls="--")
    ax.set_xlim(*re_range)
    ax.set_ylim(*im_range)
    ax.set_xlabel("Re s")
    ax.set_ylabel("Im s")
    ax.set_title("determinant zeros")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_det_profile(lam, N, path, s_lo=1.5, s_hi=3.0, npts=60):
    from .zeta import fredholm_det

    ss = np.linspace(s_lo, s_hi, npts)
    vals = [abs(fredholm_det(float(s), lam, N)) for s in ss]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ss, vals)
    ax.set_xlabel("s")
    ax.set_ylabel("|det(1 - M(s))|")
    ax.set_title(f"determinant profile, lam={lam}")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_delta(lam, N, delta_value, path, width=0.15, npts=40):
    from .zeta import leading_eigenvalue

    ss = np.linspace(delta_value - width, delta_value + width, npts)
    ev = [leading_eigenvalue(float(s), lam, N) for s in ss]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ss, ev)
    ax.axhline(1.0, color="gray", lw=0.7)
    ax.axvline(delta_value, color="crimson", lw=0.7, ls="--",
               label=f"delta = {delta_value:.8f}")
    ax.set_xlabel("s")
    ax.set_ylabel("leading eigenvalue")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_length_spectrum(classes, path):
    ls = sorted(c.length for c in classes if c.primitive)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(ls, np.arange(1, len(ls) + 1), where="post")
    ax.set_xlabel("geodesic length")
    ax.set_ylabel("count up to length")
    ax.set_title("primitive length spectrum (enumerated)")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def plot_period_function(xs1, f1_vals, xs2, f2_vals, path):
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6), sharey=True)
    axes[0].plot(xs1, np.real(f1_vals), label="Re f1")
    axes[0].plot(xs1, np.imag(f1_vals), "--", label="Im f1")
    axes[0].set_xlabel("x")
    axes[0].legend()
    axes[1].plot(xs2, np.real(f2_vals), label="Re f2")
    axes[1].plot(xs2, np.imag(f2_vals), "--", label="Im f2")
    axes[1].set_xlabel("x")
    axes[1].legend()
    fig.suptitle("reconstructed period function")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
