"""Figure rendering for the report path.

Matplotlib is imported lazily and forced onto the Agg backend so the CLI
works headless; nothing here touches the numerical results.
"""

from __future__ import annotations

import numpy as np


def render_report_figure(path, curve, eigenvalues=None, *, gamma=None,
                         selected_n=None) -> None:
    """Render the error curve (and, if given, the per-fiber eigenvalue
    profile) to an image file.

    curve[k] is the exact error of the best order-k model; ``eigenvalues`` is
    the (P, m) stack of fiber spectra.  With ``gamma`` the penalized cost is
    drawn too and ``selected_n`` marks the winning order.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    curve = np.asarray(curve, dtype=np.float64)
    orders = np.arange(curve.shape[0])
    panels = 2 if eigenvalues is not None else 1
    fig, axes = plt.subplots(1, panels, figsize=(5.0 * panels, 3.6))
    ax = axes[0] if panels == 2 else axes

    ax.plot(orders, curve, "o-", label="error")
    if gamma is not None:
        ax.plot(orders, curve + gamma * orders, "s--", label=f"cost (gamma={gamma:g})")
    if selected_n is not None:
        ax.axvline(selected_n, color="tab:red", lw=0.8, ls=":",
                   label=f"selected n={selected_n}")
    ax.set_xlabel("model order n")
    ax.set_ylabel("approximation error")
    ax.set_title("error vs. model order")
    ax.legend(fontsize="small")
    ax.grid(True, alpha=0.3)

    if eigenvalues is not None:
        lam = np.asarray(eigenvalues, dtype=np.float64)
        ax2 = axes[1]
        for i in range(lam.shape[1]):
            ax2.plot(np.arange(lam.shape[0]), lam[:, i], ".", ms=3,
                     label=f"order {i + 1}" if lam.shape[1] <= 6 else None)
        ax2.set_xlabel("fiber index")
        ax2.set_ylabel("eigenvalue")
        ax2.set_title("fiber spectra")
        if lam.shape[1] <= 6:
            ax2.legend(fontsize="small")
        ax2.grid(True, alpha=0.3)

    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
