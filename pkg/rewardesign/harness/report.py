"""
report.py

Report Markdown di un esperimento:
- input: RunRecord (già completo di percorsi, certificati, stime, metriche)
- per ogni seed: tabella degli stage, stime t_c / τ, metriche finali smussate,
  profilo di g(x) dello stage 1
- in fondo l'esito dei controlli di accettazione
"""

import logging
from pathlib import Path

from jinja2 import Environment, FileSystemLoader, StrictUndefined

logger = logging.getLogger(__name__)

REAL_TEMPLATES_FOLDER = Path(__file__).resolve().parent / "templates"
REPORT_TEMPLATE = "run_report.md.j2"

templates = Environment(
    loader=FileSystemLoader(str(REAL_TEMPLATES_FOLDER)),
    undefined=StrictUndefined,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


def _fmt(value, digits: int = 4) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.{digits}g}"
    return str(value)


templates.filters["fmt"] = _fmt


def render_report(record) -> str:
    tmpl = templates.get_template(REPORT_TEMPLATE)
    return tmpl.render(record=record, runs=record.runs, acceptance=record.acceptance)


def write_report(record, out_dir: Path) -> Path:
    path = Path(out_dir) / "report.md"
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        f.write(render_report(record))
    logger.info(f"Report written to {path}")
    return path
