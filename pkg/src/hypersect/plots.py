"""Figure rendering for the CLI report paths (matplotlib, file output only)."""

from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def _save(fig, plot_dir: str, name: str) -> str:
    os.makedirs(plot_dir, exist_ok=True)
    path = os.path.join(plot_dir, name)
    fig.savefig(path, dpi=130, bbox_inches="tight")
    plt.close(fig)
    return path


def section_boundary(region, plot_dir: str, name: str = "section_boundary.png"):
    """Polar plot of the section boundary r(theta); n = 2 only."""
    if region.n != 2:
        return None
    from .region import boundary_radii

    theta = np.linspace(0.0, 2.0 * math.pi, 361)
    dirs = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    radii = boundary_radii(region, dirs)
    fig, ax = plt.subplots(subplot_kw={"projection": "polar"}, figsize=(5, 5))
    ax.plot(theta, radii)
    ax.set_title(f"section boundary, level k = {region.level:.4g}")
    return _save(fig, plot_dir, name)


def limit_ladder(estimates, plot_dir: str, name: str = "limit_ladder.png"):
    """Normalized functional vs offset with the predicted limit line."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for est in estimates:
        ts = [t for t, _ in est.ladder]
        ys = [y for _, y in est.ladder]
        ax.semilogx(ts, ys, "o-", label=f"{est.quantity} (extrap {est.extrapolated:.6g})")
        ax.axhline(est.predicted, ls="--", lw=0.8, color="gray")
    ax.set_xlabel("offset t")
    ax.set_ylabel("normalized value")
    ax.legend()
    ax.set_title("small-offset limit ladder")
    return _save(fig, plot_dir, name)


def scan_spread(report, plot_dir: str, name: str = "scan_spread.png"):
    """Relative spread per offset (or per point for scaling-law scans)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    x = np.arange(len(report.spread))
    ax.bar(x, np.maximum(report.spread, 1e-18))
    ax.set_yscale("log")
    ax.axhline(report.threshold, color="green", ls="--", label="holds threshold")
    ax.axhline(10 * report.threshold, color="red", ls="--", label="fails threshold")
    ax.set_xlabel("offset index" if len(report.spread) == len(report.offsets)
                  else "point index")
    ax.set_ylabel("relative spread")
    ax.set_title(f"condition ({report.condition}): {report.verdict}")
    ax.legend()
    return _save(fig, plot_dir, name)


def mean_value_ratios(report, plot_dir: str, name: str = "mean_value_ratios.png"):
    fig, ax = plt.subplots(figsize=(6, 4))
    for i, q in enumerate(report.centers):
        ax.plot(report.radii, report.ratios[i], "o-",
                label="q = " + ",".join(f"{c:g}" for c in q))
    ax.axhline(1.0, color="gray", ls="--", lw=0.8)
    ax.set_xlabel("ball radius r")
    ax.set_ylabel("ball average / center value")
    ax.set_title(f"mean-value ratios ({report.test_fn})")
    ax.legend()
    return _save(fig, plot_dir, name)


def classification_values(result, plot_dir: str, name: str = "classification.png"):
    fig, ax = plt.subplots(figsize=(6, 4))
    idx = np.arange(len(result["k_values"]))
    ax.plot(idx, result["k_values"], "o-", label="Gauss-Kronecker K")
    ax.plot(idx, result["det_values"], "s-", label="Hessian determinant")
    ax.set_xlabel("sample point index")
    ax.set_title(f"classification: {result['verdict']}")
    ax.legend()
    return _save(fig, plot_dir, name)


def suite_summary(summary, plot_dir: str, name: str = "suite_summary.png"):
    names = [c["name"] for c in summary["criteria"]]
    passed = [c["passed"] for c in summary["criteria"]]
    fig, ax = plt.subplots(figsize=(7, 4))
    colors = ["tab:green" if p else "tab:red" for p in passed]
    ax.barh(np.arange(len(names)), np.ones(len(names)), color=colors)
    ax.set_yticks(np.arange(len(names)), labels=names)
    ax.set_xticks([])
    ax.invert_yaxis()
    ax.set_title(f"acceptance battery: {summary['n_passed']}/{summary['n_total']} passed")
    return _save(fig, plot_dir, name)
