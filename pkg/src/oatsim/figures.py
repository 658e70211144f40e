"""Render sweep results to figure files.

Companion to the CLI: every scan subcommand can drop a rendered figure next
to its delimited output.  Uses the non-interactive Agg backend so the
functions work headless.
"""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import SweepResult

__all__ = [
    "save_alpha_figure",
    "save_sigma_figure",
    "save_dalpha_figure",
    "save_fidelity_figure",
    "save_figure",
]


def _finalize(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_alpha_figure(result: SweepResult, path: str) -> None:
    """Information and squeezing curves across the twisting strength."""
    n = result.records[0].context["n_particles"]
    alpha = np.array(result.column("alpha"))
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(alpha, np.array(result.column("qfi_opt")) / n, "k--", label="QFI optimized / N")
    ax.plot(alpha, np.array(result.column("qfi_bs")) / n, "b-", label="QFI beam splitter / N")
    ax.plot(alpha, np.array(result.column("qfi_mzi")) / n, "r-", label="QFI Mach-Zehnder / N")
    inv_xi2 = np.array(result.column("inv_xi2_opt"))
    ax.plot(alpha, inv_xi2, "g:", label=r"$1/\xi^2$ optimized")
    ax.set_xlabel(r"twisting strength $\alpha$ (rad)")
    ax.set_ylabel("information per particle")
    ax.set_yscale("log")
    ax.set_title(f"N = {n}")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize="small")
    _finalize(fig, path)


def save_sigma_figure(result: SweepResult, path: str) -> None:
    """Resolution sweep on log-log axes with fit and shot-noise references."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    thetas = sorted({rec.metrics["theta"] for rec in result.records})
    for theta in thetas:
        pts = [(rec.grid_value, rec.metrics["fi_ratio"])
               for rec in result.records if rec.metrics["theta"] == theta]
        sig, ratio = zip(*pts)
        ax.loglog(sig, ratio, "o-", label=rf"$\theta = {theta / math.pi:.2f}\pi$")
    if result.fit is not None:
        prefactor, exponent = result.fit
        sig = np.array(sorted({rec.grid_value for rec in result.records}))
        ax.loglog(sig, prefactor * sig**exponent, "k--",
                  label=rf"fit ${prefactor:.3f}\,\sigma^{{{exponent:.2f}}}$")
    for n_ref, ratio in result.metadata.get("snl_reference", {}).items():
        ax.axhline(ratio, color="grey", ls="--", lw=0.8)
        ax.annotate(f"SNL N={n_ref}", (ax.get_xlim()[0], ratio),
                    fontsize=7, color="grey", va="bottom")
    ax.set_xlabel(r"detector resolution $\sigma$ (atoms)")
    ax.set_ylabel("information ratio")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize="small")
    _finalize(fig, path)


def save_dalpha_figure(result: SweepResult, path: str) -> None:
    """Simulated mixture information against the closed-form estimate."""
    dalpha = np.array(result.column("dalpha"))
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(dalpha, result.column("fi_simulated"), "o-", label="simulated")
    ax.plot(dalpha, result.column("fi_predicted"), "k--", label="closed form")
    if dalpha[0] > 0:
        ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"twist-strength spread $\delta\alpha$")
    ax.set_ylabel("Fisher information")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize="small")
    _finalize(fig, path)


def save_fidelity_figure(result: SweepResult, path: str) -> None:
    """Distribution overlap decay against the phase increment."""
    dtheta = np.array(result.column("dtheta"))
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(dtheta, result.column("fidelity"), "o-")
    ax.set_xlabel(r"phase increment $\delta\theta$ (rad)")
    ax.set_ylabel("distribution overlap")
    ax.grid(True, alpha=0.3)
    _finalize(fig, path)


_SAVERS = {
    "alpha": save_alpha_figure,
    "sigma": save_sigma_figure,
    "dalpha": save_dalpha_figure,
    "dtheta": save_fidelity_figure,
}


def save_figure(result: SweepResult, path: str) -> None:
    """Dispatch on the sweep's grid to the matching renderer."""
    _SAVERS[result.grid_name](result, path)
