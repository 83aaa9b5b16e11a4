"""Matplotlib figures: cuboid/vanishing-point overlays and refinement-study plots."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .cuboid import EDGES, Cuboid2D, Direction  # noqa: E402
from .errors import GeometryError  # noqa: E402
from .projective import line_through, lines_intersection  # noqa: E402

COLORS = {Direction.F: "#d62728", Direction.S: "#1f77b4", Direction.R: "#2ca02c"}

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "vpgeo",
    "svg.fonttype": "none",
}

# keeps repeated renders byte-identical
_NO_DATE = {"svg": {"Date": None}, "png": {"Software": None}}


def _save(fig, path) -> Path:
    path = Path(path)
    fmt = path.suffix.lstrip(".").lower() or "png"
    fig.savefig(path, format=fmt, metadata=_NO_DATE.get(fmt))
    plt.close(fig)
    return path


def estimated_vanishing_points(c: Cuboid2D) -> dict[Direction, np.ndarray | None]:
    """Per direction, where the first and third edge lines meet (None if parallel)."""
    out = {}
    v = c.vertices
    for d, edges in EDGES.items():
        (a, b), _, (p, q), _ = edges
        try:
            out[d] = np.array(lines_intersection(line_through(v[a], v[b]), line_through(v[p], v[q])))
        except GeometryError:
            out[d] = None
    return out


def _view_limits(v, vps, background, reach: float = 4.0):
    """Frame the cuboid, the raster and any vanishing point within ``reach`` cuboid sizes."""
    pts = [v]
    if background is not None:
        pts.append(np.array([[0.0, 0.0], [background.shape[1], background.shape[0]]]))
    center = v.mean(axis=0)
    scale = max(np.ptp(v[:, 0]), np.ptp(v[:, 1]), 1e-9)
    for vp in vps.values():
        if vp is not None and np.hypot(*(vp - center)) <= reach * scale:
            pts.append(vp[None, :])
    allpts = np.concatenate(pts)
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    pad = 0.05 * max(hi - lo)
    return lo - pad, hi + pad


def render_overlay(c: Cuboid2D, path, background: np.ndarray | None = None, title: str | None = None) -> Path:
    """Draw the cuboid edges by direction group plus rays to their vanishing points."""
    v = c.vertices
    vps = estimated_vanishing_points(c)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 5))
        if background is not None:
            ax.imshow(background, extent=(0, background.shape[1], background.shape[0], 0), interpolation="nearest")
        for d, edges in EDGES.items():
            col = COLORS[d]
            for i, j in edges:
                ax.plot(v[[i, j], 0], v[[i, j], 1], color=col, lw=1.6)
            vp = vps[d]
            if vp is None:
                continue
            for i, j in edges:
                near = v[i] if np.hypot(*(v[i] - vp)) < np.hypot(*(v[j] - vp)) else v[j]
                ax.plot([near[0], vp[0]], [near[1], vp[1]], color=col, lw=0.6, ls="--")
            ax.plot(*vp, marker="x", color=col, ms=8, mew=2, label=f"VP {d.value}")
        for k, (x, y) in enumerate(v):
            ax.annotate(str(k), (x, y), textcoords="offset points", xytext=(3, 3), fontsize=7)
        ax.set_aspect("equal")
        lo, hi = _view_limits(v, vps, background)
        ax.set_xlim(lo[0], hi[0])
        ax.set_ylim(hi[1], lo[1])
        if any(vp is not None for vp in vps.values()):
            ax.legend(loc="best")
        if title:
            ax.set_title(title)
        return _save(fig, path)


def study_figures(report: dict, outdir, fmt: str = "png") -> list[Path]:
    """CQ histogram, per-scene CQ scatter and vertex-error boxes for a study report dict."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    rows = report["rows"]
    cq = {arm: np.array([r[f"{arm}_cq"] for r in rows]) for arm in ("vp", "no_vp")}
    err = {arm: np.array([r[f"{arm}_vertex_error"] for r in rows]) for arm in ("vp", "no_vp")}
    labels = {"vp": f"VP (lambda={report['arms']['vp']['lambda_vp']:g})", "no_vp": "no VP"}
    paths = []
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 3))
        bins = np.linspace(min(c.min() for c in cq.values()), max(c.max() for c in cq.values()), 30)
        for arm in cq:
            ax.hist(cq[arm], bins=bins, alpha=0.6, label=labels[arm])
        ax.set_xlabel("cuboid quality  -ln(vp loss)")
        ax.set_ylabel("scenes")
        ax.legend()
        fig.tight_layout()
        paths.append(_save(fig, outdir / f"cq_hist.{fmt}"))

        fig, ax = plt.subplots(figsize=(3.5, 3.5))
        ax.scatter(cq["no_vp"], cq["vp"], s=6)
        lo = min(cq["no_vp"].min(), cq["vp"].min())
        hi = max(cq["no_vp"].max(), cq["vp"].max())
        ax.plot([lo, hi], [lo, hi], color="0.5", lw=0.8, ls=":")
        ax.set_xlabel("CQ, no VP")
        ax.set_ylabel("CQ, VP")
        fig.tight_layout()
        paths.append(_save(fig, outdir / f"cq_scatter.{fmt}"))

        fig, ax = plt.subplots(figsize=(3.5, 3))
        ax.boxplot([err["vp"], err["no_vp"]], tick_labels=[labels["vp"], labels["no_vp"]])
        ax.set_ylabel("mean vertex error (RoI units)")
        fig.tight_layout()
        paths.append(_save(fig, outdir / f"vertex_error.{fmt}"))
    return paths
