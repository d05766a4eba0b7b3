"""Deterministic matplotlib renderers for the pcrit CSV artifacts.

Every renderer returns a small result dict (region grids, fitted slopes) so
callers and tests can assert on what was drawn without parsing the image.
Rendering is deterministic: fixed figure geometry, Agg backend, and fixed PNG
metadata (no embedded timestamps), so repeated runs are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import matplotlib
matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schema import load_csv, sibling_summary

PNG_METADATA = {"Software": "pcrit-plots"}

VERDICT_COLORS = {
    "nonexistence-global": "#c1440e",
    "global-possible": "#2a6f97",
    "outside-theory": "#9d9d9d",
}
OBSERVED_MARKERS = {
    "blow-up": ("x", "#7a1010"),
    "global-bounded": ("o", "#0b3c5d"),
    "inconclusive": (".", "#666666"),
}


@dataclass
class PlotJob:
    input_csv: str
    kind: str                       # phase_diagram | scaling | barrier_profile
    output_image: str
    alpha_cr: Optional[float] = None
    beta_cr: Optional[float] = None
    ref_slope: Optional[float] = None
    x_loglnT: bool = False
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    extra: dict = field(default_factory=dict)


def _save(fig, job: PlotJob):
    fig.savefig(job.output_image, dpi=120, metadata=PNG_METADATA)
    plt.close(fig)


def render_phase_diagram(job: PlotJob) -> dict:
    """(alpha, beta) plane colored by prediction, observed markers, dashed thresholds."""
    rows = load_csv(job.input_csv, "phase_diagram")
    alphas = np.array(sorted({row["alpha"] for row in rows}))
    betas = np.array(sorted({row["beta"] for row in rows}))
    verdicts = {}
    observed = {}
    for row in rows:
        key = (row["alpha"], row["beta"])
        verdicts[key] = row["predicted"]
        observed[key] = row.get("observed") or ""

    codes = {"nonexistence-global": 0, "global-possible": 1, "outside-theory": 2}
    grid = np.full((betas.size, alphas.size), 2, dtype=int)
    for (a, b), verdict in verdicts.items():
        grid[np.searchsorted(betas, b), np.searchsorted(alphas, a)] = codes.get(verdict, 2)

    def edges(vals):
        if vals.size == 1:
            return np.array([vals[0] - 0.5, vals[0] + 0.5])
        mid = 0.5 * (vals[1:] + vals[:-1])
        return np.concatenate([[vals[0] - (mid[0] - vals[0])], mid,
                               [vals[-1] + (vals[-1] - mid[-1])]])

    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    cmap = matplotlib.colors.ListedColormap(
        [VERDICT_COLORS["nonexistence-global"], VERDICT_COLORS["global-possible"],
         VERDICT_COLORS["outside-theory"]])
    ax.pcolormesh(edges(alphas), edges(betas), grid, cmap=cmap, vmin=-0.5, vmax=2.5,
                  alpha=0.55, shading="flat")

    have_observed = any(observed.values())
    handles = [plt.Rectangle((0, 0), 1, 1, fc=VERDICT_COLORS[v], alpha=0.55,
                             label=f"predicted {v}")
               for v in ("nonexistence-global", "global-possible")
               if any(verdict == v for verdict in verdicts.values())]
    if have_observed:
        seen = []
        for (a, b), out in observed.items():
            if out in ("", "inconclusive") and out != "inconclusive":
                continue
            marker, color = OBSERVED_MARKERS.get(out, (".", "#666666"))
            ax.scatter([a], [b], marker=marker, color=color, s=42, zorder=3)
            if out not in seen and out:
                seen.append(out)
        handles += [plt.Line2D([], [], linestyle="", marker=OBSERVED_MARKERS[o][0],
                               color=OBSERVED_MARKERS[o][1], label=f"observed {o}")
                    for o in seen]
    else:
        handles.append(plt.Line2D([], [], linestyle="",
                                  label="prediction-only (no observations)"))

    summary = sibling_summary(job.input_csv)
    alpha_cr = job.alpha_cr if job.alpha_cr is not None else summary.get("alpha_cr")
    beta_cr = job.beta_cr if job.beta_cr is not None else summary.get("beta_cr")
    dashed = []
    if alpha_cr is not None:
        ax.axvline(alpha_cr, linestyle="--", color="black", linewidth=1.2)
        dashed.append(("alpha_cr", float(alpha_cr)))
    if beta_cr is not None:
        ax.axhline(beta_cr, linestyle="--", color="black", linewidth=1.2)
        dashed.append(("beta_cr", float(beta_cr)))

    ax.set_xlabel(job.xlabel or "alpha")
    ax.set_ylabel(job.ylabel or "beta")
    ax.set_title(job.title or "predicted regimes")
    ax.legend(handles=handles, loc="upper left", fontsize=8, framealpha=0.9)
    _save(fig, job)
    return {"alphas": alphas.tolist(), "betas": betas.tolist(),
            "region_grid": grid.tolist(), "dashed_lines": dashed,
            "have_observed": have_observed}


def _fit_loglog(x, y):
    mask = (np.asarray(x) > 0) & (np.asarray(y) > 0)
    lx, ly = np.log(np.asarray(x)[mask]), np.log(np.asarray(y)[mask])
    slope, intercept = np.polyfit(lx, ly, 1)
    return float(slope), float(intercept), int(mask.size - mask.sum())


def render_scaling(job: PlotJob) -> dict:
    """log-log I1, I2 against T (or ln T) with fitted-slope annotations."""
    rows = load_csv(job.input_csv, "scaling")
    T = np.array([row["T"] for row in rows])
    x = np.log(T) if job.x_loglnT else T
    xlabel = job.xlabel or ("ln T" if job.x_loglnT else "T")

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    result = {"slopes": {}, "excluded": 0}
    for name, style in (("I1", "o-"), ("I2", "s--")):
        y = np.array([row[name] for row in rows])
        good = y > 0
        result["excluded"] += int((~good).sum())
        if good.sum() >= 2:
            slope, _, _ = _fit_loglog(x[good], y[good])
            result["slopes"][name] = slope
            ax.loglog(x[good], y[good], style, label=f"{name} (slope {slope:.3f})")
    if job.ref_slope is not None and result["slopes"]:
        anchor = np.array([row["I1"] for row in rows])
        ref = anchor[0] * (x / x[0]) ** job.ref_slope
        ax.loglog(x, ref, ":", color="black",
                  label=f"reference slope {job.ref_slope:.3f}")
        result["ref_slope"] = float(job.ref_slope)
    if result["excluded"]:
        ax.text(0.02, 0.02, f"{result['excluded']} nonpositive value(s) excluded",
                transform=ax.transAxes, fontsize=7)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(job.ylabel or "integral value")
    ax.set_title(job.title or "rescaled test-function integrals")
    ax.legend(fontsize=8)
    _save(fig, job)
    return result


def render_barrier_profile(job: PlotJob) -> dict:
    rows = load_csv(job.input_csv, "barrier_profile")
    r = np.array([row["radius"] for row in rows])
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for name, style in (("v", "-"), ("grad_norm", "--"), ("residual", ":")):
        y = np.array([row[name] for row in rows])
        pos = (r > 0) & (y > 0)
        ax.loglog(r[pos], y[pos], style, label=name)
    ax.set_xlabel(job.xlabel or "radius")
    ax.set_ylabel(job.ylabel or "value")
    ax.set_title(job.title or "stationary barrier profile")
    ax.legend(fontsize=8)
    _save(fig, job)
    return {"points": int(r.size)}


RENDERERS = {
    "phase_diagram": render_phase_diagram,
    "scaling": render_scaling,
    "barrier_profile": render_barrier_profile,
}


def render(job: PlotJob) -> dict:
    try:
        renderer = RENDERERS[job.kind]
    except KeyError:
        raise ValueError(f"unknown plot kind {job.kind!r}") from None
    return renderer(job)
