"""Report models and their serialization to text, JSON and CSV."""

import csv
import io
import logging
from typing import List, Optional, Sequence, Tuple

from jinja2 import Environment, PackageLoader, StrictUndefined
from pydantic import BaseModel, ConfigDict, Field

from .config import OutputFormat, RunConfig
from .errors import ReportError

logger = logging.getLogger(__name__)

_env = Environment(
    loader=PackageLoader("krtrace", "templates"),
    undefined=StrictUndefined,
    keep_trailing_newline=True,
    trim_blocks=True,
    lstrip_blocks=True,
)


class Params(BaseModel):
    p: int
    r: int
    q: int


class StratumResult(BaseModel):
    """Per-stratum row: points seen, and how many passed or failed."""

    model_config = ConfigDict(populate_by_name=True)

    label: str
    count: int
    passed: int = Field(alias="pass")
    failed: int = Field(alias="fail")

    @classmethod
    def of(cls, label: str, count: int, passed: int, failed: int) -> "StratumResult":
        return cls.model_validate(
            {"label": label, "count": count, "pass": passed, "fail": failed}
        )


class TabularReport(BaseModel):
    """A report that renders as one table plus a few summary lines."""

    model_config = ConfigDict(populate_by_name=True)

    def title(self) -> str:
        return type(self).__name__

    def summary(self) -> List[str]:
        return []

    def table(self) -> Tuple[List[str], List[List[str]]]:
        raise NotImplementedError

    def failed(self) -> bool:
        return False


def _widths(header: Sequence[str], rows: Sequence[Sequence[str]]) -> List[int]:
    return [max(len(str(cell)) for cell in column) for column in zip(header, *rows)]


def render_text(report: TabularReport) -> str:
    header, rows = report.table()
    widths = _widths(header, rows)
    return _env.get_template("report.txt.j2").render(
        title=report.title(),
        summary=report.summary(),
        header=header,
        rows=[[str(cell) for cell in row] for row in rows],
        widths=widths,
        dashes=["-" * w for w in widths],
    )


def render_csv(report: TabularReport) -> str:
    header, rows = report.table()
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def render_json(report: TabularReport) -> str:
    return report.model_dump_json(by_alias=True, exclude_none=True, indent=2) + "\n"


def emit_report(report: TabularReport, config: RunConfig) -> str:
    """Serialize report in the configured format and write it to the output path.

    Returns:
        The serialized report

    Raises:
        ReportError: If the output path cannot be written
    """
    if config.output_format == OutputFormat.JSON:
        text = render_json(report)
    elif config.output_format == OutputFormat.CSV:
        text = render_csv(report)
    else:
        text = render_text(report)

    path: Optional[str] = str(config.output_path) if config.output_path else None
    if path is not None:
        try:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as e:
            raise ReportError(f"Failed to write report to {path}: {e}")
        logger.info("Wrote %s report to %s", config.output_format.value, path)
    return text
