"""Render figures/*.toml from the committed result CSVs.

Usage: python plots/render.py [--out figures/png] [spec.toml ...]
"""

import argparse
import sys
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

ROOT = Path(__file__).resolve().parent.parent


def render(spec_path: Path, out_dir: Path) -> Path:
    spec = tomllib.loads(spec_path.read_text())
    df = pd.read_csv(ROOT / spec["csv"])
    series = spec.get("series")
    groups = df.groupby(series, sort=False) if series else [(None, df)]

    fig, ax = plt.subplots(figsize=(5.5, 4))
    for key, g in groups:
        for col in spec["y"]:
            d = g[[spec["x"], col]].dropna()
            if spec.get("drop_zero"):
                d = d[d[col] > 0]
            label = col if key is None else f"{col}, {series}={key}"
            ax.plot(d[spec["x"]], d[col], marker="o", ms=3, label=label)
    if spec.get("xlog"):
        ax.set_xscale("log")
    if spec.get("ylog"):
        ax.set_yscale("log")
    ax.set_xlabel(spec.get("xlabel", spec["x"]))
    ax.set_ylabel(spec.get("ylabel", ""))
    ax.set_title(spec.get("title", spec_path.stem), fontsize=9)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()

    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / f"{spec_path.stem}.png"
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("specs", nargs="*", type=Path)
    ap.add_argument("--out", type=Path, default=ROOT / "figures" / "png")
    args = ap.parse_args(argv)
    specs = args.specs or sorted((ROOT / "figures").glob("*.toml"))
    for s in specs:
        print(render(s, args.out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
