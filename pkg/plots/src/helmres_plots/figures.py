"""Figure construction: one renderer per figure kind.

Every renderer returns the plotted series verbatim (a JSON-serializable
dict) alongside writing the image, so golden-file tests can assert that
rendering did not alter a single number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "helmres-plots"

import matplotlib.pyplot as plt

from helmres_plots import data as D

KINDS = ("sweep", "residual", "hr-trajectory", "spectrum", "pseudospectrum")


@dataclass
class FigureSpec:
    """What to draw and from which artifact files.

    ``kind`` picks the renderer; ``inputs`` maps roles to file paths
    (e.g. {"summary": ..., "traces": [...], "hr": ..., "eigs": ...});
    ``options`` carries axis and annotation toggles (log_y, y_field,
    resonance_verticals, markers, title, formats).
    """

    kind: str
    inputs: dict
    options: dict = field(default_factory=dict)
    name: str = "figure"

    @classmethod
    def from_dict(cls, d: dict) -> "FigureSpec":
        if d.get("kind") not in KINDS:
            raise ValueError(f"unknown figure kind {d.get('kind')!r}")
        return cls(kind=d["kind"], inputs=d.get("inputs", {}),
                   options=d.get("options", {}), name=d.get("name", "figure"))


def _save(fig, out_dir: Path, name: str, options: dict) -> list[str]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for ext in options.get("formats", ("png", "svg")):
        path = out_dir / f"{name}.{ext}"
        fig.savefig(path, dpi=options.get("dpi", 150),
                    metadata={"Date": None} if ext == "svg" else None)
        written.append(str(path))
    plt.close(fig)
    return written


def _render_sweep(spec: FigureSpec, out_dir: Path):
    rows = D.load_summary(spec.inputs["summary"])
    y_field = spec.options.get("y_field", "iterations")
    methods = sorted({r["method"] for r in rows})
    series = {}
    fig, ax = plt.subplots(figsize=(7, 4))
    for m in methods:
        pts = [(r["k"], r[y_field]) for r in rows
               if r["method"] == m and y_field in r]
        pts.sort()
        series[m] = {"k": [p[0] for p in pts], y_field: [p[1] for p in pts]}
        ax.plot(series[m]["k"], series[m][y_field], marker=".", label=m)
    for kv in spec.options.get("resonance_verticals", []):
        ax.axvline(kv, color="0.4", linestyle="--", linewidth=0.8)
    if spec.options.get("log_y", y_field == "l2_error"):
        ax.set_yscale("log")
    ax.set_xlabel("wavenumber k")
    ax.set_ylabel(y_field)
    ax.legend()
    ax.set_title(spec.options.get("title", f"{y_field} sweep"))
    files = _save(fig, out_dir, spec.name, spec.options)
    return {"series": series,
            "verticals": list(spec.options.get("resonance_verticals", [])),
            "files": files}


def _render_residual(spec: FigureSpec, out_dir: Path):
    traces = spec.inputs.get("traces") or [spec.inputs["trace"]]
    labels = spec.options.get("labels") or [Path(t).stem for t in traces]
    series = {}
    fig, ax = plt.subplots(figsize=(7, 4))
    for label, tpath in zip(labels, traces):
        tr = D.load_trace(tpath)
        series[label] = tr
        ax.semilogy(tr["iter"], tr["relres"], label=label)
        for rm in tr["restarts"]:
            ax.axvline(rm, color="0.85", linewidth=0.5, zorder=0)
    for it in spec.options.get("markers", []):
        ax.axvline(it, color="k", linestyle=":", linewidth=0.8)
    ax.set_xlabel("iteration")
    ax.set_ylabel("relative residual")
    ax.legend()
    ax.set_title(spec.options.get("title", "residual history"))
    files = _save(fig, out_dir, spec.name, spec.options)
    return {"series": series,
            "markers": list(spec.options.get("markers", [])), "files": files}


def _render_hr_trajectory(spec: FigureSpec, out_dir: Path):
    hr = D.load_hr(spec.inputs["hr"])
    eigs = D.load_eigs(spec.inputs["eigs"]) if "eigs" in spec.inputs else []
    window = spec.options.get("window")
    pts = [r for r in hr if window is None
           or (window[0] <= r["re"] <= window[1])]
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot([r["iter"] for r in pts], [r["re"] for r in pts], ".",
            markersize=3, label="harmonic Ritz values")
    for e in eigs:
        ax.axhline(e["re"], color="green", linewidth=0.8)
    if window:
        ax.set_ylim(window)
    ax.set_xlabel("iteration")
    ax.set_ylabel("Re(value)")
    ax.legend()
    ax.set_title(spec.options.get("title", "harmonic Ritz trajectories"))
    files = _save(fig, out_dir, spec.name, spec.options)
    return {"hr": pts, "eig_lines": [e["re"] for e in eigs], "files": files}


def _render_spectrum(spec: FigureSpec, out_dir: Path):
    eigs = D.load_eigs(spec.inputs["eigs"])
    series = {"eigs": eigs}
    fig, ax = plt.subplots(figsize=(5.5, 5))
    ax.plot([e["re"] for e in eigs], [e["im"] for e in eigs], "g.",
            label="eigenvalues")
    if "hr" in spec.inputs:
        hr = D.load_hr(spec.inputs["hr"])
        at = spec.options.get("at_iteration")
        pts = [r for r in hr if at is None or r["iter"] == at]
        series["hr"] = pts
        ax.plot([r["re"] for r in pts], [r["im"] for r in pts], "rx",
                label=f"HR values{f' @ {at}' if at else ''}")
    ax.axhline(0, color="0.8", linewidth=0.5)
    ax.axvline(0, color="0.8", linewidth=0.5)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.legend()
    ax.set_title(spec.options.get("title", "spectrum"))
    files = _save(fig, out_dir, spec.name, spec.options)
    series["files"] = files
    return series


def _render_pseudospectrum(spec: FigureSpec, out_dir: Path):
    grid = D.load_grid(spec.inputs["grid"])
    res = sorted(set(grid["re"]))
    ims = sorted(set(grid["im"]))
    import numpy as np
    field2d = np.full((len(ims), len(res)), np.nan)
    ri = {v: i for i, v in enumerate(res)}
    ii = {v: i for i, v in enumerate(ims)}
    for re, im, s in zip(grid["re"], grid["im"], grid["smin"]):
        field2d[ii[im], ri[re]] = s
    fig, ax = plt.subplots(figsize=(6, 5))
    levels = spec.options.get("levels")
    cs = ax.contour(res, ims, np.log10(np.maximum(field2d, 1e-300)),
                    levels=levels)
    ax.clabel(cs, inline=True, fontsize=7)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title(spec.options.get("title", "log10 resolvent level sets"))
    files = _save(fig, out_dir, spec.name, spec.options)
    return {"grid": grid, "files": files}


_RENDERERS = {
    "sweep": _render_sweep,
    "residual": _render_residual,
    "hr-trajectory": _render_hr_trajectory,
    "spectrum": _render_spectrum,
    "pseudospectrum": _render_pseudospectrum,
}


def render(spec: FigureSpec, out_dir: str | Path) -> dict:
    """Render one figure; returns the exact series that were drawn."""
    for role, path in spec.inputs.items():
        paths = path if isinstance(path, list) else [path]
        for p in paths:
            if not Path(p).exists():
                raise FileNotFoundError(f"input {role}: {p} does not exist")
    return _RENDERERS[spec.kind](spec, Path(out_dir))
