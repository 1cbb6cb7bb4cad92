//! The plot script emitted by `--emit-plot`.
//!
//! The script is self-contained: dropped next to the CSV outputs, it renders
//! whichever tables exist into PNGs with matplotlib. Keeping it generated
//! (rather than shipped separately) means every output directory carries a
//! renderer that matches the column layout that produced it.

pub const SCRIPT: &str = r#"#!/usr/bin/env python3
"""Render the sshchain CSV outputs sitting next to this script.

Reads whichever of sweep.csv, spectrum.csv, fss.csv, snapshot.csv exist in
this directory and writes one PNG per table. Requires matplotlib.
"""
import csv
import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def rows(name):
    path = os.path.join(HERE, name)
    if not os.path.exists(path):
        return None
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def col(table, key, cast=float):
    out = []
    for r in table:
        try:
            out.append(cast(r[key]))
        except (KeyError, TypeError, ValueError):
            out.append(math.nan)
    return out


def save(fig, name):
    path = os.path.join(HERE, name)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    print("wrote", path)


def plot_sweep(table):
    x = col(table, "axis")
    fig, axes = plt.subplots(4, 1, figsize=(7, 11), sharex=True)
    axes[0].plot(x, col(table, "mu_calibrated"), color="tab:purple")
    axes[0].set_ylabel("winding mu")
    axes[1].semilogy(x, col(table, "absE_edge"), color="tab:red")
    axes[1].set_ylabel("|E| edge pair")
    axes[2].plot(x, col(table, "ipr_bulk"), label="IPR bulk")
    axes[2].plot(x, col(table, "npr_bulk"), label="NPR bulk")
    axes[2].plot(x, col(table, "ipr_edge"), "--", label="IPR edge")
    axes[2].plot(x, col(table, "npr_edge"), "--", label="NPR edge")
    axes[2].set_ylabel("participation")
    axes[2].legend(fontsize=8)
    axes[3].plot(x, col(table, "dnpr_edge"), color="tab:gray")
    axes[3].set_ylabel("d(NPR edge)/dx")
    axes[3].set_xlabel("sweep axis")
    save(fig, "sweep.png")


def plot_spectrum(table):
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.5))
    sc = ax1.scatter(
        col(table, "re_E"), col(table, "im_E"), c=col(table, "ipr"), s=12, cmap="viridis"
    )
    fig.colorbar(sc, ax=ax1, label="IPR")
    ax1.set_xlabel("Re E")
    ax1.set_ylabel("Im E")
    idx = col(table, "index")
    ax2.plot(idx, col(table, "ipr"), ".", ms=3, label="IPR")
    ax2.plot(idx, col(table, "npr"), ".", ms=3, label="NPR")
    for i, r in enumerate(table):
        if r.get("is_edge") == "true":
            ax2.axvline(idx[i], color="tab:red", alpha=0.3)
    ax2.set_xlabel("state (by Re E)")
    ax2.legend(fontsize=8)
    save(fig, "spectrum.png")


def plot_fss(table):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    sites = col(table, "sites")
    ax.loglog(sites, col(table, "ipr_bulk"), "o-", label="IPR bulk")
    ax.loglog(sites, col(table, "npr_bulk"), "s-", label="NPR bulk")
    ax.set_xlabel("sites L")
    ax.set_ylabel("bulk average")
    ax.legend()
    save(fig, "fss.png")


def plot_snapshot(table):
    by_state = {}
    for r in table:
        by_state.setdefault(int(r["state"]), []).append((int(r["site"]), float(r["weight"])))
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for k, (_, pts) in enumerate(sorted(by_state.items())):
        if k >= 40:  # keep dense snapshots readable
            break
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], lw=0.8, alpha=0.7)
    ax.set_xlabel("site")
    ax.set_ylabel("|psi|^2")
    save(fig, "snapshot.png")


def main():
    made = False
    for name, fn in [
        ("sweep.csv", plot_sweep),
        ("spectrum.csv", plot_spectrum),
        ("fss.csv", plot_fss),
        ("snapshot.csv", plot_snapshot),
    ]:
        table = rows(name)
        if table:
            fn(table)
            made = True
    if not made:
        print("no CSV outputs found next to this script")


if __name__ == "__main__":
    main()
"#;
