"""Serialization of run records: CSV series, grid snapshots, manifest, optional PNGs.

Numbers are written with ``format(x, '.9g')``, which is locale independent,
so identical records give byte-identical files.
"""
from __future__ import annotations

import logging
import os
from pathlib import Path

import numpy as np

from .config import to_ini
from .harness import Comparison, RunRecord

log = logging.getLogger(__name__)

METRICS_HEADER = "t,rmse_normalized,ergodic_metric,lyapunov_v"
TRAJECTORY_HEADER = "t,robot_id,x,y,ux,uy,sampled"
MANIFEST = "manifest.txt"


def fmt(x) -> str:
    return format(float(x), ".9g")


class OutputError(OSError):
    """An artifact could not be written; the message carries the path."""


def _write(path: Path, text: str) -> Path:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def metrics_csv(record: RunRecord) -> str:
    lines = [METRICS_HEADER]
    lyap = record.lyapunov
    for i, t in enumerate(record.sample_times):
        v = "" if lyap is None or lyap.size == 0 else fmt(lyap[i])
        lines.append(f"{fmt(t)},{fmt(record.rmse[i])},{fmt(record.ergodic[i])},{v}")
    return "\n".join(lines) + "\n"


def trajectories_csv(record: RunRecord) -> str:
    lines = [TRAJECTORY_HEADER]
    for s, t in enumerate(record.step_times):
        ts = fmt(t)
        flag = "1" if record.sampled[s] else "0"
        for i in range(record.n_robots):
            x, y = record.positions[s, i]
            ux, uy = record.controls[s, i]
            lines.append(f"{ts},{i},{fmt(x)},{fmt(y)},{fmt(ux)},{fmt(uy)},{flag}")
    return "\n".join(lines) + "\n"


def grid_csv(values, grid) -> str:
    """Row-major snapshot: one line per y row, x increasing along the line."""
    img = grid.as_image(values)
    lo, hi = grid.domain.lower, grid.domain.upper
    head = [
        f"# resolution {grid.resolution[0]} {grid.resolution[1]}",
        f"# extents {fmt(lo[0])} {fmt(hi[0])} {fmt(lo[1])} {fmt(hi[1])}",
    ]
    rows = [",".join(fmt(v) for v in row) for row in img]
    return "\n".join(head + rows) + "\n"


def read_grid_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", comments="#", ndmin=2)


def _manifest(out: Path, files: list[str], notes: list[str]) -> None:
    names = sorted(set(files) | {MANIFEST})
    _write(out / MANIFEST, "\n".join(names + notes) + "\n")


def read_manifest(path) -> tuple[list[str], list[str]]:
    """Split a manifest into file names and ``key: value`` notes."""
    files, notes = [], []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        (notes if ": " in line else files).append(line)
    return files, notes


def _prepare(dir_) -> Path:
    out = Path(dir_)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    return out


def write_outputs(record: RunRecord, dir_, images: bool = False) -> list[str]:
    """Write every artifact of one run into ``dir_`` and return the file names."""
    out = _prepare(dir_)
    files = {
        "config.ini": to_ini(record.config),
        "metrics.csv": metrics_csv(record),
        "trajectories.csv": trajectories_csv(record),
        "phi_hat_grid.csv": grid_csv(record.phi_hat_grid, record.metric_grid),
        "truth_grid.csv": grid_csv(record.truth_grid, record.metric_grid),
    }
    for name, text in files.items():
        _write(out / name, text)
    names = list(files)
    notes = [f"seed: {record.seed}", f"lyapunov: {record.lyapunov_kind}"]
    if record.aborted:
        notes.append(f"aborted: {record.aborted}")
    if images:
        made = render_images(record, out)
        names += made
        notes.append("images: rendered" if made else "images: failed")
    else:
        notes.append("images: skipped")
    _manifest(out, names, notes)
    return sorted(set(names) | {MANIFEST})


def render_images(record: RunRecord, dir_) -> list[str]:
    """Heatmaps of truth and estimate plus a trajectory overlay.

    Any failure is logged as a warning and yields an empty list; the CSVs
    stay the authoritative output.
    """
    out = Path(dir_)
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except Exception as exc:  # noqa: BLE001 - any import problem just disables images
        log.warning("images skipped: matplotlib unavailable (%s)", exc)
        return []

    grid = record.metric_grid
    lo, hi = grid.domain.lower, grid.domain.upper
    extent = (lo[0], hi[0], lo[1], hi[1])
    made, scale = [], []
    try:
        for name, values in [("truth", record.truth_grid), ("phi_hat", record.phi_hat_grid)]:
            img = grid.as_image(values)
            vmin, vmax = float(img.min()), float(img.max())
            fig, ax = plt.subplots(figsize=(5, 4.5))
            im = ax.imshow(img, origin="lower", extent=extent, vmin=vmin, vmax=vmax, cmap="viridis")
            fig.colorbar(im, ax=ax)
            ax.set_title(name)
            fig.savefig(out / f"{name}.png", dpi=100)
            plt.close(fig)
            made.append(f"{name}.png")
            scale.append(f"{name}.png vmin={fmt(vmin)} vmax={fmt(vmax)}")

        fig, ax = plt.subplots(figsize=(5, 5))
        ax.imshow(grid.as_image(record.truth_grid), origin="lower", extent=extent, cmap="Greys", alpha=0.5)
        for i in range(record.n_robots):
            path = np.vstack([record.initial_positions[i], record.positions[:, i]])
            ax.plot(path[:, 0], path[:, 1], lw=0.8)
            pts = record.positions[record.sampled, i]
            ax.plot(pts[:, 0], pts[:, 1], ".", color="red", ms=2)
        ax.set_xlim(lo[0], hi[0])
        ax.set_ylim(lo[1], hi[1])
        ax.set_aspect("equal")
        fig.savefig(out / "trajectories.png", dpi=100)
        plt.close(fig)
        made.append("trajectories.png")
        _write(out / "image_scale.txt", "\n".join(scale) + "\n")
        made.append("image_scale.txt")
    except Exception as exc:  # noqa: BLE001
        log.warning("image rendering failed: %s", exc)
        plt.close("all")
        for name in made:
            try:
                os.remove(out / name)
            except OSError:
                pass
        return []
    return made


def comparison_csv(cmp: Comparison) -> str:
    lines = ["t,rmse_a,rmse_b,delta"]
    n = cmp.delta.size
    for i in range(n):
        lines.append(
            f"{fmt(cmp.a.sample_times[i])},{fmt(cmp.a.rmse[i])},{fmt(cmp.b.rmse[i])},{fmt(cmp.delta[i])}"
        )
    return "\n".join(lines) + "\n"


def write_comparison(cmp: Comparison, dir_, images: bool = False) -> list[str]:
    """Both runs in ``a/`` and ``b/`` plus the paired delta series and a summary."""
    out = _prepare(dir_)
    write_outputs(cmp.a, out / "a", images)
    write_outputs(cmp.b, out / "b", images)
    _write(out / "comparison.csv", comparison_csv(cmp))
    summary = (
        f"mode_a: {cmp.a.config.controller.mode}\n"
        f"mode_b: {cmp.b.config.controller.mode}\n"
        f"final_rmse_a: {fmt(cmp.a.final_rmse)}\n"
        f"final_rmse_b: {fmt(cmp.b.final_rmse)}\n"
        f"final_ratio: {fmt(cmp.final_ratio)}\n"
        f"final_quarter_fraction: {fmt(cmp.final_quarter_fraction)}\n"
    )
    _write(out / "summary.txt", summary)
    names = ["comparison.csv", "summary.txt", "a/" + MANIFEST, "b/" + MANIFEST]
    _manifest(out, names, [])
    return sorted(set(names) | {MANIFEST})
