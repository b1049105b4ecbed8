"""Serialization of analysis results: JSON reports, point CSVs, SVG plots."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict

from . import __version__
from .blif import write_blif
from .netlist import Netlist
from .rent import WEIGHTING, DensityReport, Region, RentFit

CSV_HEADER = ("region", "depth", "B", "T", "weight")
REGION_STYLE = {
    Region.PREPACK: ("tab:blue", "o"),
    Region.INTRA_CLB: ("tab:purple", "s"),
    Region.INTER_CLB: ("tab:green", "^"),
}


def netlist_digest(netlist: Netlist) -> str:
    return hashlib.sha256(write_blif(netlist)).hexdigest()


def _fit_dict(fit: RentFit | None):
    if fit is None:
        return None
    return {"t": fit.t, "r": fit.r, "rss": fit.rss, "n_points": fit.n_points}


def _points_list(points):
    return [{"depth": p.depth, "B": p.B, "T": p.T, "weight": p.weight} for p in points]


def build_document(netlist: Netlist, config: dict, fits: dict, points: dict,
                   report: DensityReport | None = None, inputs: dict | None = None,
                   t: float | None = None) -> dict:
    """Assemble the report as a plain dict with a fixed key order.

    Without a density report the metrics hold only ``t`` (given, or the
    pre-packing fit intercept) and ``r_prepack``.
    """
    doc = {
        "tool": "rentlens",
        "version": __version__,
        "design": netlist.name,
        "prepack_digest": netlist_digest(netlist),
        "inputs": inputs or {},
        "config": config,
        "metadata": {
            "weighting": WEIGHTING,
            "t_source": "mean external terminals per pre-packing primitive",
            "inter_clb_abscissa": "primitives",
        },
    }
    pre = fits[Region.PREPACK]
    metrics = {"t": pre.t if t is None else t, "r_prepack": pre.r}
    if report is not None:
        metrics = {
            "t": report.t,
            "r_prepack": report.r_prepack,
            "r_intra": report.r_intra,
            "r_inter": report.r_inter,
            "B_avg": report.B_avg,
            "T_avg": report.T_avg,
            "B_star": report.B_star,
            "D_R": report.D_R,
            "D_B": report.D_B,
            "D_T": report.D_T,
            "classification": report.classification.value,
            "tol": report.tol,
            "breakpoint": list(report.breakpoint) if report.breakpoint else None,
            "n_clusters": report.n_clusters,
        }
    doc["metrics"] = metrics
    doc["fits"] = {r.value: _fit_dict(fits.get(r)) for r in Region if r in fits}
    doc["points"] = {r.value: _points_list(points.get(r, ())) for r in Region if r in points}
    return doc


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_points_csv(points: dict, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for region in Region:
        for p in points.get(region, ()):
            w.writerow((region.value, p.depth, repr(float(p.B)), repr(float(p.T)), repr(float(p.weight))))


def points_csv(points: dict) -> str:
    buf = io.StringIO()
    write_points_csv(points, buf)
    return buf.getvalue()


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "rentlens"
    plt.rcParams["svg.fonttype"] = "path"
    return plt


def _svg_bytes(fig) -> bytes:
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def rent_plot_svg(points: dict, fits: dict, title: str = "") -> bytes:
    """Log-log Rent plot: one scatter series and one fit line per region."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for region in Region:
        pts = points.get(region) or []
        if not pts:
            continue
        color, marker = REGION_STYLE[region]
        ax.scatter([p.B for p in pts], [p.T for p in pts], color=color, marker=marker,
                   label=region.value, gid=f"series-{region.value}")
        fit = fits.get(region)
        if fit is not None:
            lo = min(p.B for p in pts)
            hi = max(p.B for p in pts)
            xs = [lo * (hi / lo) ** (k / 50) for k in range(51)] if hi > lo else [lo]
            ax.plot(xs, [fit.predict(x) for x in xs], color=color, linestyle="--",
                    label=f"{region.value} r={fit.r:.3f}", gid=f"fit-{region.value}")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("B (primitives)")
    ax.set_ylabel("T (terminals)")
    if title:
        ax.set_title(title)
    ax.legend(fontsize="small")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    data = _svg_bytes(fig)
    plt.close(fig)
    return data


COMPARE_FIELDS = ("B_avg", "T_avg", "r_inter", "r_intra", "D_R")


def compare_rows(doc_a: dict, doc_b: dict):
    rows = []
    for key in COMPARE_FIELDS:
        a = doc_a["metrics"].get(key)
        b = doc_b["metrics"].get(key)
        delta = b - a if a is not None and b is not None else None
        rows.append((key, a, b, delta))
    return rows


def format_compare(rows, labels=("A", "B")) -> str:
    def cell(v):
        return "-" if v is None else f"{v:.4f}"

    lines = [f"{'metric':<8} {labels[0]:>12} {labels[1]:>12} {'delta':>12}"]
    for key, a, b, d in rows:
        lines.append(f"{key:<8} {cell(a):>12} {cell(b):>12} {cell(d):>12}")
    return "\n".join(lines) + "\n"


def compare_svg(doc_a: dict, doc_b: dict, labels=("A", "B")) -> bytes:
    """Grouped bars of D_R and the two post-packing exponents for two designs."""
    plt = _pyplot()
    keys = ("D_R", "r_intra", "r_inter")
    fig, ax = plt.subplots(figsize=(6, 3.5))
    width = 0.38
    for k, (doc, label, color) in enumerate(zip((doc_a, doc_b), labels, ("tab:blue", "tab:red"))):
        vals = [doc["metrics"].get(key) or 0.0 for key in keys]
        xs = [i + (k - 0.5) * width for i in range(len(keys))]
        bars = ax.bar(xs, vals, width, label=label, color=color, alpha=0.6, gid=f"bars-{k}")
        ax.bar_label(bars, fmt="%.4f", fontsize="x-small")
    ax.set_xticks(range(len(keys)), keys)
    ax.set_ylabel("value")
    ax.legend(fontsize="small")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    data = _svg_bytes(fig)
    plt.close(fig)
    return data


def config_dict(cfg, arch=None, **extra) -> dict:
    out = {"partition": asdict(cfg)}
    if arch is not None:
        out["arch"] = asdict(arch)
    out.update(extra)
    return out
