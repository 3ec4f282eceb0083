"""
Report Formatter Module

Renders experiment documents as text, CSV or JSON.

A document is a plain dict built by the experiment runner:

    {
        "command": "bounds",
        "params": {...},
        "columns": ["k", "f", "f_p"],
        "rows": [{"k": 0, "f": <number>, "f_p": <number>}, ...],
        "summary": {"name": <number or plain value>, ...},
    }

Numbers are dicts {"exact": str, "float": float | None, "sci": str}. Text and JSON keep
the exact strings; CSV writes the float approximation only. Rendering never looks at
clocks. The worker count is a text footer only, so CSV and JSON give equal bytes for
any number of workers.
"""

import csv
import io
import json
import math
from decimal import Decimal
from fractions import Fraction
from typing import Any, Dict, List, Optional, Union

from core.numbers import to_decimal_string, to_float, to_scientific

FORMAT_TEXT = "text"
FORMAT_CSV = "csv"
FORMAT_JSON = "json"

FRACTION_PLACES = 6
SCI_DIGITS = 3
DECIMAL_DIGITS = 12


def number(value: Union[int, Fraction, Decimal]) -> Dict[str, Any]:
    """Exact string, float and scientific renderings of one value."""
    if isinstance(value, Decimal):
        if not value.is_finite():
            text = "inf" if value > 0 else "-inf"
            return {"exact": text, "float": None, "sci": text}
        exact_value = Fraction(value)
        exact = to_scientific(abs(exact_value), DECIMAL_DIGITS)
        if exact_value < 0:
            exact = "-" + exact
    else:
        exact_value = value
        exact = to_decimal_string(value, FRACTION_PLACES)
    sci = to_scientific(abs(exact_value), SCI_DIGITS)
    if exact_value < 0:
        sci = "-" + sci
    return {"exact": exact, "float": to_float(exact_value), "sci": sci}


def _is_number(value: Any) -> bool:
    return isinstance(value, dict) and "exact" in value


# === TEXT ===

def _text_cell(value: Any) -> str:
    if _is_number(value):
        return value["exact"]
    if isinstance(value, float):
        return f"{value:.4f}"
    if value is None:
        return "-"
    return str(value)


def _text_summary_value(value: Any) -> str:
    if _is_number(value):
        exact, sci = value["exact"], value["sci"]
        return exact if exact == sci or len(exact) <= 6 else f"{exact}  (~{sci})"
    return _text_cell(value)


def _params_line(params: Dict[str, Any]) -> str:
    trump = "none" if params.get("trump") is None else str(params["trump"])
    return (f"R={params['hands']} K={params['cards_per_hand']} "
            f"NS={params['num_suits']} NR={params['ranks_per_suit']} trump={trump}")


def render_text(document: Dict[str, Any], workers: Optional[int] = None) -> str:
    lines: List[str] = [f"# {document['command']}  {_params_line(document['params'])}"]

    columns = document.get("columns") or []
    rows = document.get("rows") or []
    if columns and rows:
        table = [[_text_cell(row.get(col)) for col in columns] for row in rows]
        widths = [max(len(col), *(len(r[i]) for r in table)) for i, col in enumerate(columns)]
        lines.append("  ".join(col.rjust(w) for col, w in zip(columns, widths)))
        for row in table:
            lines.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)))

    summary = document.get("summary") or {}
    if summary:
        if columns and rows:
            lines.append("")
        width = max(len(name) for name in summary)
        for name, value in summary.items():
            lines.append(f"{name.ljust(width)}  {_text_summary_value(value)}")
    if workers is not None:
        lines.append(f"# workers={workers}")
    return "\n".join(lines) + "\n"


# === CSV ===

def _csv_cell(value: Any) -> Any:
    if _is_number(value):
        value = value["float"]
    if value is None:
        return ""
    if isinstance(value, float) and not math.isfinite(value):
        return ""
    return value


def render_csv(document: Dict[str, Any]) -> str:
    """Table rows as CSV; a document without a table writes its summary as name,value."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    columns = document.get("columns") or []
    rows = document.get("rows") or []
    if columns and rows:
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_csv_cell(row.get(col)) for col in columns])
    else:
        writer.writerow(["name", "value"])
        for name, value in (document.get("summary") or {}).items():
            writer.writerow([name, _csv_cell(value)])
    return buffer.getvalue()


# === JSON ===

def render_json(document: Dict[str, Any]) -> str:
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


RENDERERS = {
    FORMAT_TEXT: render_text,
    FORMAT_CSV: render_csv,
    FORMAT_JSON: render_json,
}


def render(document: Dict[str, Any], output_format: str, workers: Optional[int] = None) -> str:
    """Render a document; `workers` is shown in text output only."""
    try:
        renderer = RENDERERS[output_format]
    except KeyError:
        raise ValueError(f"unknown output format '{output_format}'") from None
    if renderer is render_text:
        return render_text(document, workers)
    return renderer(document)
