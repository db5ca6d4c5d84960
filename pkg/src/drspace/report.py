"""Report writers (text / csv / json-lines) and figure rendering.

Check reports are one row per named check; sweep subcommands emit CSV
tables, and the same paths can render matplotlib figures next to the
delimited output when asked to.
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np


def format_check_rows(results, fmt="text"):
    """Render CheckResult rows; fmt is text, csv or json-lines."""
    if fmt == "text":
        out = io.StringIO()
        width = max((len(r.check_id) for r in results), default=10) + 2
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            out.write(
                f"{r.check_id:<{width}} {r.detail:<40} "
                f"residual={r.residual:11.4e}  tol={r.tol:9.2e}  {status}\n"
            )
        return out.getvalue()
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["check_id", "detail", "residual", "tol", "status"])
        for r in results:
            writer.writerow(
                [r.check_id, r.detail, f"{r.residual:.17g}", f"{r.tol:.17g}",
                 "PASS" if r.passed else "FAIL"]
            )
        return out.getvalue()
    if fmt == "json-lines":
        out = io.StringIO()
        for r in results:
            out.write(json.dumps({
                "check_id": r.check_id,
                "detail": r.detail,
                "residual": r.residual,
                "tol": r.tol,
                "status": "PASS" if r.passed else "FAIL",
            }) + "\n")
        return out.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in row])


def csv_string(header, rows):
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in row])
    return out.getvalue()


def _agg():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_check_figure(results, path):
    """Residual-vs-tolerance bar chart for a check report."""
    plt = _agg()
    ids = [r.check_id for r in results]
    residuals = np.array([max(r.residual, 1e-18) for r in results])
    tols = np.array([r.tol for r in results])
    colors = ["tab:blue" if r.passed else "tab:red" for r in results]
    fig, ax = plt.subplots(figsize=(max(6, 0.45 * len(ids)), 4.5))
    xs = np.arange(len(ids))
    ax.bar(xs, residuals, color=colors)
    ax.plot(xs, tols, "k_", markersize=14, label="tolerance")
    ax.set_yscale("log")
    ax.set_xticks(xs)
    ax.set_xticklabels(ids, rotation=60, ha="right", fontsize=7)
    ax.set_ylabel("residual")
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_volume_figure(rs, ratio, sigma, Q, path):
    plt = _agg()
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6))
    axes[0].plot(rs, ratio)
    axes[0].set_xlabel("r")
    axes[0].set_ylabel("density / exp(Q r)")
    axes[0].set_title("normalized volume growth")
    axes[1].plot(rs, sigma)
    axes[1].axhline(Q, color="k", ls="--", lw=0.8, label="Q")
    axes[1].set_xlabel("r")
    axes[1].set_ylabel("sphere mean curvature")
    axes[1].legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_visibility_figure(ts, q, qp, qdd, path):
    plt = _agg()
    fig, axes = plt.subplots(3, 1, figsize=(7, 7), sharex=True)
    for ax, series, label in zip(axes, (q, qp, qdd), ("q", "q'", "q''")):
        ax.plot(ts, series)
        ax.set_ylabel(label)
    axes[2].set_xlabel("t")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_riccati_figure(times, residuals, path):
    plt = _agg()
    fig, ax = plt.subplots(figsize=(6, 3.6))
    ax.plot(times, residuals)
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("Riccati residual")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
