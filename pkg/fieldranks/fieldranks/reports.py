# Copyright (c) 2024 Contributors
# All rights reserved.

import csv
import hashlib
import io
import logging
import pathlib
import sys
from dataclasses import dataclass, field
from typing import Any, TextIO

import msgspec

from .stages import Stage

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv")


class Report(msgspec.Struct, kw_only=True):
    """The outcome of one command.

    `exact` holds integers as decimal strings and everything that must be
    identical across worker counts; `approx` holds 12-digit decimal views.
    `timing` and `workers` are the only fields allowed to vary between runs.
    """
    command: str
    arguments: dict[str, Any]
    digest: str
    exact: dict[str, Any] = {}
    approx: dict[str, str] = {}
    certificates: list[dict[str, Any]] = []
    annotations: list[str] = []
    generator: str | None = None
    seed: int | None = None
    timing: float = 0.0
    workers: int = 1

    @property
    def filename(self) -> str:
        return f"{self.command}-{self.digest[:12]}"

    def exact_fields(self) -> bytes:
        """Canonical bytes of everything that must not depend on parallelism."""
        return msgspec.json.encode({"command": self.command, "arguments": self.arguments, "digest": self.digest,
                                    "exact": self.exact, "certificates": self.certificates,
                                    "generator": self.generator, "seed": self.seed}, order="sorted")


def decimal(value: float | None) -> str:
    """12 significant digits, the rendering used for every real-valued view."""
    if value is None:
        return "undefined"
    return f"{float(value):.12g}"


def input_digest(arguments: dict[str, Any], *payloads: bytes) -> str:
    """sha256 over the canonical JSON of the arguments and the raw input files."""
    h = hashlib.sha256(msgspec.json.encode(arguments, order="sorted"))
    for payload in payloads:
        h.update(payload)
    return h.hexdigest()


def to_json(report: Report) -> bytes:
    return msgspec.json.format(msgspec.json.encode(report, order="sorted"), indent=2)


def _flatten(prefix: str, value: Any, rows: list[dict[str, str]], section: str) -> None:
    if isinstance(value, dict):
        for key, inner in value.items():
            _flatten(f"{prefix}.{key}" if prefix else str(key), inner, rows, section)
    elif isinstance(value, list) and value and isinstance(value[0], dict):
        for index, inner in enumerate(value):
            _flatten(f"{prefix}[{index}]", inner, rows, section)
    elif isinstance(value, list):
        rows.append({"section": section, "key": prefix, "value": msgspec.json.encode(value).decode("utf-8")})
    else:
        rows.append({"section": section, "key": prefix, "value": str(value)})


def to_csv(report: Report) -> str:
    """One row per leaf of the exact and approximate results; certificates stay in JSON."""
    rows = [{"section": "report", "key": "command", "value": report.command},
            {"section": "report", "key": "digest", "value": report.digest}]
    _flatten("", report.exact, rows, "exact")
    _flatten("", report.approx, rows, "approx")
    for note in report.annotations:
        rows.append({"section": "annotation", "key": "", "value": note})
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=["section", "key", "value"], lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def render(report: Report, fmt: str) -> str:
    match fmt:
        case "json":
            return to_json(report).decode("utf-8")
        case "csv":
            return to_csv(report)
    raise ValueError(f"unknown report format {fmt!r}, expected one of {FORMATS}")


@dataclass
class PrintReport(Stage[Report, Report]):
    """Prints each report to a stream (stdout by default) in the chosen format."""
    fmt: str = "json"
    stream: TextIO | None = None

    def consume(self, report: Report) -> None:
        print(render(report, self.fmt), file=self.stream or sys.stdout)


@dataclass
class WriteReport(Stage[Report, Report]):
    """Writes each report to `<target_directory>/<report.filename>.<fmt>`."""
    target_directory: str
    fmt: str = "json"
    written: list[pathlib.Path] = field(default_factory=list)

    def __post_init__(self):
        pathlib.Path(self.target_directory).mkdir(parents=True, exist_ok=True)

    def get_filename(self, report: Report) -> str:
        return getattr(report, "filename", None) or report.command

    def consume(self, report: Report) -> None:
        path = pathlib.Path(self.target_directory) / f"{self.get_filename(report)}.{self.fmt}"
        path.write_text(render(report, self.fmt), encoding="utf-8")
        logger.info("wrote %s", path)
        self.written.append(path)
