"""Terminal output for replicability-audit: rich on stderr, result tables on stdout."""

from __future__ import annotations

import logging
from collections.abc import Iterable, Iterator, Sequence
from typing import TypeVar

from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table
from rich.text import Text

console = Console(stderr=True)

APP_TITLE = "replicability-audit"
APP_SUBTITLE = "selection-adjusted analysis of original/replication study pairs"

STYLES = {
    "title": "bold #48C9B0",
    "rule": "#48C9B0",
    "info": "#85C1E9",
    "ok": "bold #58D68D",
    "warn": "bold #F4D03F",
    "fail": "bold #E74C3C",
    "dim": "#909497",
    "number": "#FDFEFE",
}

MARKERS = {"info": "·", "ok": "ok", "warn": "!", "fail": "x"}

T = TypeVar("T")

_quiet = False


def configure_logging(quiet: bool = False, verbose: bool = False) -> None:
    """Send ``replicability.*`` log records to the stderr console."""
    global _quiet
    _quiet = quiet
    if quiet:
        level = logging.ERROR
    elif verbose:
        level = logging.DEBUG
    else:
        level = logging.WARNING
    logger = logging.getLogger("replicability")
    logger.handlers = [RichHandler(console=console, show_time=False, show_path=verbose, markup=False)]
    logger.setLevel(level)
    logger.propagate = False


def _status(kind: str, message: str, *, always: bool = False) -> None:
    if _quiet and not always:
        return
    marker = Text(f"[{MARKERS[kind]}] ", style=STYLES[kind])
    console.print(marker + Text(message), highlight=False)


def print_app_header(subtitle: str | None = None) -> None:
    if _quiet:
        return
    console.print(Text(APP_TITLE, style=STYLES["title"]), Text(subtitle or APP_SUBTITLE, style=STYLES["dim"]))


def print_section(title: str) -> None:
    if _quiet:
        return
    console.rule(Text(title, style=STYLES["title"]), style=STYLES["rule"])


def print_info(message: str) -> None:
    _status("info", message)


def print_success(message: str) -> None:
    _status("ok", message)


def print_warning(message: str) -> None:
    _status("warn", message)


def print_error(message: str) -> None:
    """Errors are printed even with --quiet."""
    _status("fail", message, always=True)


def print_error_panel(title: str, details: Iterable[str]) -> None:
    """Row-level problems, one per line; printed even with --quiet."""
    body = Text("\n".join(details))
    console.print(Panel(body, title=Text(title, style=STYLES["fail"]), title_align="left", border_style=STYLES["fail"]))


def print_key_value_table(title: str, rows: Sequence[tuple[str, str]]) -> None:
    """Headline numbers of a command, e.g. ('Estimate', '22 / 68 = 32%')."""
    if _quiet:
        return
    table = Table(title=title, title_style=STYLES["title"], title_justify="left", box=None, show_header=False)
    table.add_column(style=STYLES["dim"], no_wrap=True)
    table.add_column(style=STYLES["number"], justify="right")
    for quantity, value in rows:
        table.add_row(quantity, value)
    console.print(table)


def track_progress(items: Sequence[T], *, description: str, total: int | None = None) -> Iterator[T]:
    """Yield ``items`` while showing a study counter; silent with --quiet."""
    progress = Progress(
        TextColumn("{task.description}", style=STYLES["info"]),
        BarColumn(bar_width=None, complete_style=STYLES["rule"]),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=console,
        transient=True,
        disable=_quiet,
    )
    with progress:
        task_id = progress.add_task(description, total=len(items) if total is None else total)
        for item in items:
            yield item
            progress.advance(task_id)
