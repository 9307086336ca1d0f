"""Structure-size benchmarks with CSV output and a rendered figure.

Each row generates one seeded instance, runs the standard verifier, and
records the instance size next to the size of the structure the verifier
built.  Rows are emitted in increasing n regardless of how long each
takes.  When the CSV is written to a file, a log-scale figure of the
constructed sizes against the 2^n and n*2^n + 2^n reference curves is
rendered next to it.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import verify
from .generate import GenParams, random_instance

CSV_HEADER = "n,ell,m,constructed_states,constructed_transitions,wall_time_ms"


@dataclass(frozen=True)
class BenchRow:
    n: int
    ell: int
    m: Optional[int]
    constructed_states: int
    constructed_transitions: int
    wall_time_ms: float

    def to_csv(self) -> str:
        m = "" if self.m is None else str(self.m)
        return (f"{self.n},{self.ell},{m},{self.constructed_states},"
                f"{self.constructed_transitions},{self.wall_time_ms:.3f}")


def run_bench(notion: str, n_values, seed: int, ell: int = 2, uo: int = 1,
              density: float = 0.3, k: Optional[int] = None) -> list[BenchRow]:
    rows = []
    for n in n_values:
        params = GenParams(n=n, ell=ell, uo=uo, density=density,
                           seed=seed + n, k=k)
        inst = random_instance(notion, params)
        started = time.perf_counter()
        _, metrics = verify.verify(inst)
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        rows.append(BenchRow(
            n=n,
            ell=metrics.ell,
            m=metrics.m,
            constructed_states=metrics.constructed_states,
            constructed_transitions=metrics.constructed_transitions,
            wall_time_ms=elapsed_ms,
        ))
    return rows


def rows_to_csv(rows) -> str:
    return "\n".join([CSV_HEADER] + [r.to_csv() for r in rows]) + "\n"


def render_figure(rows, path, notion: str = ""):
    """Constructed sizes against the observer and split-structure bounds."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ns = [r.n for r in rows]
    fig, (left, right) = plt.subplots(1, 2, figsize=(9, 3.5))
    left.plot(ns, [r.constructed_states for r in rows], "o-", label="constructed states")
    left.plot(ns, [2 ** n for n in ns], "--", label="2^n")
    left.plot(ns, [n * 2 ** n + 2 ** n for n in ns], ":", label="n*2^n + 2^n")
    left.set_yscale("log")
    left.set_xlabel("n")
    left.set_ylabel("states")
    left.legend(fontsize=8)
    title = f"{notion} verification structure" if notion else "verification structure"
    left.set_title(title, fontsize=10)
    right.plot(ns, [r.wall_time_ms for r in rows], "o-", color="#777777")
    right.set_xlabel("n")
    right.set_ylabel("wall time [ms]")
    right.set_title("verification time", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def run_and_save(notion: str, n_values, seed: int, out_csv: Optional[Path] = None,
                 **kwargs) -> tuple[str, Optional[Path]]:
    """Run the bench; with an output path, write the CSV and render the
    figure next to it."""
    rows = run_bench(notion, n_values, seed, **kwargs)
    csv_text = rows_to_csv(rows)
    figure_path = None
    if out_csv is not None:
        out_csv = Path(out_csv)
        out_csv.parent.mkdir(parents=True, exist_ok=True)
        out_csv.write_text(csv_text, encoding="utf-8")
        figure_path = out_csv.with_suffix(".png")
        render_figure(rows, figure_path, notion)
    return csv_text, figure_path
