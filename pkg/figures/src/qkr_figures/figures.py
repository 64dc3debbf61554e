"""Figure builders for the three qkr CSV schemas."""

from __future__ import annotations

from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import style
from .io import SchemaError, read_table, require_columns

KINDS = ("distribution", "p0_sequence", "fwhm_sweep")

REQUIRED = {
    "distribution": ("p_recoils", "density_raw", "density_Wp", "density_convolved"),
    "p0_sequence": ("kick_index", "p0_fraction"),
    "fwhm_sweep": ("epsilon", "fwhm_convolved", "fwhm_unconvolved", "p0_fraction"),
}


@dataclass
class FigureSpec:
    csv_path: str
    kind: str
    output_path: str
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")


def build_figure(spec: FigureSpec) -> plt.Figure:
    meta, data = read_table(spec.csv_path)
    require_columns(spec.csv_path, data, REQUIRED[spec.kind])
    fig, ax = plt.subplots(figsize=style.FIGSIZE)
    if spec.kind == "distribution":
        _distribution(fig, ax, data)
    elif spec.kind == "p0_sequence":
        _p0_sequence(ax, data)
    else:
        _fwhm_sweep(ax, data)
    if spec.xlim is not None:
        ax.set_xlim(*spec.xlim)
    if spec.ylim is not None:
        ax.set_ylim(*spec.ylim)
    return fig


def plot(spec: FigureSpec) -> str:
    """Render the figure and write it to spec.output_path."""
    fig = build_figure(spec)
    try:
        fig.savefig(spec.output_path, dpi=style.DPI)
    finally:
        plt.close(fig)
    return spec.output_path


def _distribution(fig, ax, data):
    p = data["p_recoils"]
    ax.plot(p, data["density_raw"], label="after kick sequence", **style.FINAL_LINE)
    ax.plot(p, data["density_convolved"], label="resolution convolved", **style.SMOOTH_LINE)
    ax.set_xlabel("momentum (recoils)")
    ax.set_ylabel("density (1/recoil)")
    ax.set_xlim(-12, 12)
    ax.legend(loc="upper right", fontsize=8)
    # magnified view of the region around p = 0
    inset = fig.add_axes([0.17, 0.5, 0.26, 0.36])
    sel = np.abs(p) <= 0.5
    inset.plot(p[sel], data["density_raw"][sel], **style.FINAL_LINE)
    inset.set_xlim(-0.5, 0.5)
    inset.set_xlabel("p (recoils)", fontsize=7)
    inset.tick_params(labelsize=6)


def _p0_sequence(ax, data):
    ax.plot(data["kick_index"], data["p0_fraction"], label="simulation", **style.SIM_MARKER)
    ax.set_xlabel("kick number")
    ax.set_ylabel("P(0)")
    ax.set_ylim(0.0, 1.05)
    ax.set_xticks(data["kick_index"].astype(int))


def _fwhm_sweep(ax, data):
    order = np.argsort(data["epsilon"], kind="stable")
    eps = data["epsilon"][order]
    ax.plot(eps, data["fwhm_convolved"][order], label="convolved", **style.SIM_MARKER)
    ax.plot(eps, data["fwhm_unconvolved"][order], label="unconvolved", **style.ALT_MARKER)
    ax.set_xlabel("epsilon")
    ax.set_ylabel("FWHM (recoils)")
    ax.legend(loc="best", fontsize=8)
