"""Render figure analogs from forkaudit sweep CSVs.

Rendering is a pure function of CSV content plus a FigureSpec: fork-success
series with their confidence bands from the fsr_ci_* columns (never
recomputed), an optional acceptance overlay, and an optional analytic
reference curve. Invoked as `render_all <results_dir> <out_dir>`.
"""

from __future__ import annotations

import csv
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

log = logging.getLogger("figrender")

REFERENCES = ("none", "2^-W", "(3/4)^W")


class RenderInputError(ValueError):
    """The input CSV cannot back the requested figure."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure: which CSV, which columns, scale, reference, output path."""

    csv_path: Path
    x_column: str = "axis_value"
    series_columns: tuple[str, ...] = ("protocol", "attacker")
    y_scale: str = "linear"  # "linear" | "log2"
    reference: str = "none"  # "none" | "2^-W" | "(3/4)^W"
    output_path: Path = field(default=Path("figure.png"))
    include_apr: bool = False
    title: str = ""


def _read_rows(spec: FigureSpec) -> list[dict]:
    with open(spec.csv_path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        if header is None:
            raise RenderInputError(f"{spec.csv_path}: empty CSV")
        needed = [spec.x_column, *spec.series_columns, "fsr", "fsr_ci_low", "fsr_ci_high"]
        if spec.include_apr:
            needed.append("apr")
        for column in needed:
            if column not in header:
                raise RenderInputError(f"{spec.csv_path}: missing column {column!r}")
        rows = list(reader)
    if not rows:
        raise RenderInputError(f"{spec.csv_path}: no data rows")
    return rows


def _series_key(row: dict, spec: FigureSpec) -> str:
    return " / ".join(row[col] for col in spec.series_columns)


def build_figure(spec: FigureSpec) -> plt.Figure:
    """Build the matplotlib figure for a spec without writing it."""
    rows = _read_rows(spec)
    series: dict[str, list[dict]] = {}
    for row in rows:
        series.setdefault(_series_key(row, spec), []).append(row)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name, group in series.items():
        group.sort(key=lambda r: float(r[spec.x_column]))
        x = [float(r[spec.x_column]) for r in group]
        fsr = [float(r["fsr"]) for r in group]
        low = [float(r["fsr_ci_low"]) for r in group]
        high = [float(r["fsr_ci_high"]) for r in group]
        (line,) = ax.plot(x, fsr, marker="o", label=f"fsr {name}")
        ax.fill_between(x, low, high, alpha=0.2, color=line.get_color())
        if spec.include_apr:
            apr = [float(r["apr"]) for r in group]
            ax.plot(x, apr, marker="s", linestyle="--", label=f"apr {name}")

    if spec.reference != "none":
        xs = sorted({float(r[spec.x_column]) for r in rows})
        base = 0.5 if spec.reference == "2^-W" else 0.75
        ax.plot(
            xs,
            [base**x for x in xs],
            color="black",
            linestyle=":",
            label=f"{spec.reference} reference",
        )

    if spec.y_scale == "log2":
        ax.set_yscale("log", base=2)
    ax.set_xlabel(spec.x_column if not rows else rows[0].get("axis", spec.x_column))
    ax.set_ylabel("rate")
    ax.set_title(spec.title or spec.csv_path.stem)
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def render_figure(spec: FigureSpec) -> Path:
    """Render one figure to spec.output_path; returns the written path."""
    fig = build_figure(spec)
    spec.output_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(spec.output_path, dpi=120)
    plt.close(fig)
    return spec.output_path


def figure_specs(results_dir: Path, out_dir: Path) -> tuple[FigureSpec, ...]:
    """The eight figure analogs over the suite's CSV outputs."""

    def spec(stem: str, **kw) -> FigureSpec:
        return FigureSpec(
            csv_path=results_dir / f"{stem}.csv",
            output_path=out_dir / f"{stem}.png",
            **kw,
        )

    return (
        spec("attacker_k", title="fork success vs attacker coherence horizon"),
        spec("n_qubits", include_apr=True, title="acceptance and fork success vs qubit count"),
        spec("shots", include_apr=True, title="acceptance and fork success vs shots"),
        spec("tau_x", include_apr=True, title="acceptance/suppression tradeoff vs tau_x"),
        spec(
            "window_fixed_x",
            y_scale="log2",
            reference="2^-W",
            title="fork suppression vs audit window (fixed-X)",
        ),
        spec(
            "window_models",
            y_scale="log2",
            reference="2^-W",
            title="fork success vs window across attacker models",
        ),
        spec(
            "noise_protocols",
            include_apr=True,
            title="stateless vs temporal under depolarizing noise",
        ),
        spec("noise_models", title="fork success vs noise across attacker models"),
    )


def render_all(results_dir: str | Path, out_dir: str | Path) -> tuple[list[Path], list[Path]]:
    """Render every figure whose CSV exists; returns (written, missing CSVs)."""
    results_dir, out_dir = Path(results_dir), Path(out_dir)
    written: list[Path] = []
    missing: list[Path] = []
    for spec in figure_specs(results_dir, out_dir):
        if not spec.csv_path.is_file():
            log.warning("missing CSV, skipping figure: %s", spec.csv_path)
            missing.append(spec.csv_path)
            continue
        written.append(render_figure(spec))
    return written, missing


def main(argv: list[str] | None = None) -> int:
    args = sys.argv[1:] if argv is None else argv
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    if len(args) != 2:
        print("usage: render_all <results_dir> <out_dir>", file=sys.stderr)
        return 2
    results_dir, out_dir = args
    if not Path(results_dir).is_dir():
        print(f"error: results directory not found: {results_dir}", file=sys.stderr)
        return 2
    try:
        written, missing = render_all(results_dir, out_dir)
    except RenderInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(f"wrote {path}")
    if missing:
        print(f"error: {len(missing)} figure CSV(s) missing", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
