"""CSV, JSON and SVG emission.

CSV: '.' decimal separator, no grouping, 12 significant digits, minimal quoting.
"""

import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import pandas as pd
from jinja2 import Environment, PackageLoader, select_autoescape

from career_lab.models.results import CalibrationReport, SimStats

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"
SIM_STATS_COLUMNS = ["t", "mean_resid", "se_resid", "var_eta_minus_m", "theory_var", "flag"]


def _fmt(value: float) -> str:
    return format(value, ".4g")


class ResultExporter:
    """Render result rows and reports for stdout or files."""

    def __init__(self, float_format: str = FLOAT_FORMAT):
        self.float_format = float_format
        self._env = Environment(
            loader=PackageLoader("career_lab", "templates"),
            autoescape=select_autoescape(disabled_extensions=("j2",), default=False),
            keep_trailing_newline=True,
        )

    def to_csv(self, rows: Iterable[Mapping[str, Any]], columns: Sequence[str]) -> str:
        """Render rows (dicts) as CSV text with a fixed column order."""
        frame = pd.DataFrame(list(rows), columns=list(columns))
        return frame.to_csv(index=False, float_format=self.float_format, lineterminator="\n")

    @staticmethod
    def to_json(payload: Any) -> str:
        return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @staticmethod
    def sim_stats_rows(stats: SimStats, calibration: Optional[CalibrationReport] = None) -> List[Dict[str, Any]]:
        """One row per period; flag is 1 where the filter calibration flagged the period."""
        flagged = set(calibration.flagged_periods) if calibration is not None else set()
        return [
            {
                "t": t,
                "mean_resid": stats.mean_resid[t - 1],
                "se_resid": stats.se_resid[t - 1],
                "var_eta_minus_m": stats.var_eta_minus_m[t - 1],
                "theory_var": stats.theory_var[t - 1],
                "flag": int(t in flagged),
            }
            for t in range(1, stats.T + 1)
        ]

    def sim_stats_csv(self, stats: SimStats, calibration: Optional[CalibrationReport] = None) -> str:
        return self.to_csv(self.sim_stats_rows(stats, calibration), SIM_STATS_COLUMNS)

    @staticmethod
    def emit(text: str, output: Optional[Path]) -> None:
        """Write text to a file, or to stdout when no path is given."""
        if output is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        Path(output).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {output}")

    def render_line_chart(
        self,
        xs: Sequence[float],
        ys: Sequence[float],
        x_label: str,
        y_label: str,
        title: str = "",
        width: int = 640,
        height: int = 400,
    ) -> str:
        """Single-polyline SVG 1.1 chart; non-finite points are dropped."""
        points: List[tuple] = [
            (float(x), float(y)) for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y)
        ]
        left, right, top, bottom = 60, width - 20, 20, height - 40
        if points:
            x_min, x_max = min(p[0] for p in points), max(p[0] for p in points)
            y_min, y_max = min(p[1] for p in points), max(p[1] for p in points)
        else:
            x_min = x_max = y_min = y_max = 0.0
        x_span = (x_max - x_min) or 1.0
        y_span = (y_max - y_min) or 1.0

        coords = " ".join(
            f"{left + (x - x_min) / x_span * (right - left):.2f},"
            f"{bottom - (y - y_min) / y_span * (bottom - top):.2f}"
            for x, y in points
        )
        template = self._env.get_template("line_chart.svg.j2")
        return template.render(
            width=width,
            height=height,
            left=left,
            right=right,
            top=top,
            bottom=bottom,
            title=title or f"{y_label} vs {x_label}",
            x_label=x_label,
            y_label=y_label,
            x_min=_fmt(x_min),
            x_max=_fmt(x_max),
            y_min=_fmt(y_min),
            y_max=_fmt(y_max),
            points=coords,
        )


exporter = ResultExporter()
