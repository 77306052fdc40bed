# coding=utf-8
# Copyright 2026 The risnoma Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""CSV emission of experiment results and optional static plots."""

import csv
import importlib.util
from pathlib import Path
from typing import Iterable, List, Mapping, Sequence, Union

from .altopt import EETrace
from .experiments import ConvergenceTable, SweepResult, TrialResult
from ..utils import logging


logger = logging.get_logger(__name__)  # pylint: disable=invalid-name

CONVERGENCE_COLUMNS = ("M", "iteration", "mean_ee", "ci95")
SWEEP_COLUMNS = ("param_value", "framework", "mean_ee", "ci95", "infeasible_frac", "trials")
TRACE_COLUMNS = ("iteration", "ee", "phi", "eta", "rho_i", "rho_j", "rate_i", "rate_j", "feasible")
TRIAL_COLUMNS = ("seed", "framework", "ee", "rate_i", "rate_j", "iterations", "feasible")

_AXIS_LABELS = {
    "p_t_dbm": "Maximum transmit power P_T (dBm)",
    "qos_rate_mbps": "QoS rate requirement (Mbps)",
}

Result = Union[SweepResult, ConvergenceTable, EETrace]


def is_matplotlib_available() -> bool:
    return importlib.util.find_spec("matplotlib") is not None


def format_value(value) -> str:
    """Numbers with 12 significant digits, booleans as `true`/`false`, everything else as `str`."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _rows(result: Result) -> (Sequence[str], Iterable[Sequence]):
    if isinstance(result, SweepResult):
        rows = (
            (p.param_value, p.framework, p.mean_ee, p.ci95, p.infeasible_frac, p.trials) for p in result.points
        )
        return SWEEP_COLUMNS, rows
    if isinstance(result, ConvergenceTable):
        return CONVERGENCE_COLUMNS, ((r.M, r.iteration, r.mean_ee, r.ci95) for r in result.rows)
    if isinstance(result, EETrace):
        rows = (
            (r.iteration, r.ee, r.phi, r.eta, r.rho_i, r.rho_j, r.rate_i, r.rate_j, r.feasible) for r in result
        )
        return TRACE_COLUMNS, rows
    raise ValueError(f"Cannot emit a {type(result).__name__} as CSV")


def _write(path: Union[str, Path], columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_value(v) for v in row])
    except OSError as e:
        raise OSError(f"Could not write {path}: {e}") from e
    logger.info(f"Wrote {path}")
    return path


def emit_csv(result: Result, path: Union[str, Path]) -> Path:
    """
    Write a sweep, a convergence table or a single trace as CSV.

    Sweeps have one row per (operating point, framework) with columns `param_value, framework, mean_ee, ci95,
    infeasible_frac, trials`; convergence tables one row per (M, iteration) with columns `M, iteration, mean_ee,
    ci95`; traces one row per accepted iteration. Timings are never written, so identical inputs give identical
    bytes.
    """
    columns, rows = _rows(result)
    return _write(path, columns, rows)


def emit_trial_csv(results: Sequence[TrialResult], path: Union[str, Path]) -> Path:
    """Per-trial outcomes, one row per trial."""
    rows = ((r.seed, r.framework, r.ee, r.rate_i, r.rate_j, r.iterations, r.feasible) for r in results)
    return _write(path, TRIAL_COLUMNS, rows)


def render_plots(results: Mapping[str, Union[SweepResult, ConvergenceTable]], out_dir: Union[str, Path]) -> List[Path]:
    """
    Render one static line chart per result as `<out_dir>/<name>.png`.

    Args:
        results (`Mapping[str, Union[SweepResult, ConvergenceTable]]`):
            Results keyed by file stem, e.g. `{"sweep_power": sweep}`.
        out_dir (`str` or `Path`):
            Directory receiving the images.

    Returns:
        `List[Path]`: the written images.
    """
    if not is_matplotlib_available():
        raise ValueError("--emit-plots needs matplotlib, install it with `pip install risnoma[plots]`")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, result in results.items():
        fig, ax = plt.subplots(figsize=(6, 4))
        if isinstance(result, ConvergenceTable):
            for m in sorted({row.M for row in result.rows}):
                series = result.series(m)
                ax.plot(range(1, len(series) + 1), series, marker="o", label=f"M = {m}")
            ax.set_xlabel("Iteration")
        elif isinstance(result, SweepResult):
            for framework in result.frameworks:
                points = result.series(framework)
                ax.errorbar(
                    [p.param_value for p in points],
                    [p.mean_ee for p in points],
                    yerr=[p.ci95 for p in points],
                    marker="o",
                    capsize=3,
                    label=framework,
                )
            ax.set_xlabel(_AXIS_LABELS.get(result.parameter, result.parameter))
        else:
            plt.close(fig)
            raise ValueError(f"Cannot plot a {type(result).__name__}")
        ax.set_ylabel("Energy efficiency (bits/s/Hz/W)")
        ax.grid(True, alpha=0.3)
        ax.legend()
        fig.tight_layout()
        path = out_dir / f"{name}.png"
        try:
            fig.savefig(path, dpi=150)
        except OSError as e:
            raise OSError(f"Could not write {path}: {e}") from e
        finally:
            plt.close(fig)
        logger.info(f"Wrote {path}")
        written.append(path)
    return written
