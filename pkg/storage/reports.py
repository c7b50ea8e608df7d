"""
CSV and structured-text report writers.

Every file carries the RunConfig that produced it as leading '# key=value'
comment lines. Files are written to a temporary sibling and renamed into place so
a failed run never leaves a partial output behind.
"""
import csv
import io
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from modules.errors import GraphFormatError, ParameterError


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one CLI run"""
    command: str
    spec: str = ""
    radius: Optional[int] = None
    params: Tuple[Tuple[str, str], ...] = ()
    output_dir: str = ""
    seed: Optional[int] = None
    budget: Optional[int] = None

    # Keys with a dedicated field; everything else round-trips through params
    _FIELDS = ("command", "spec", "radius", "output_dir", "seed", "budget")

    def to_lines(self) -> List[str]:
        """Serialized form: one '# key=value' line per field, params prefixed 'param.'"""
        lines = []
        for key in self._FIELDS:
            value = getattr(self, key)
            lines.append(f"# {key}={'' if value is None else value}")
        for key, value in self.params:
            lines.append(f"# param.{key}={value}")
        return lines

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> "RunConfig":
        """Inverse of to_lines(); non-config comment lines are ignored"""
        values = {}
        params = []
        for line in lines:
            line = line.strip()
            if not line.startswith("#") or "=" not in line:
                continue
            key, _, value = line[1:].strip().partition("=")
            if key.startswith("param."):
                params.append((key[len("param."):], value))
            elif key in cls._FIELDS:
                values[key] = value
        if "command" not in values:
            raise ParameterError("No RunConfig found: missing '# command=' line")
        return cls(
            command=values["command"],
            spec=values.get("spec", ""),
            radius=_optional_int(values.get("radius")),
            params=tuple(params),
            output_dir=values.get("output_dir", ""),
            seed=_optional_int(values.get("seed")),
            budget=_optional_int(values.get("budget")),
        )

    def param(self, key: str, default=None):
        for name, value in self.params:
            if name == key:
                return value
        return default


def _optional_int(value):
    if value is None or value == "":
        return None
    return int(value)


def format_value(value: Any) -> str:
    """Deterministic text form of a report value"""
    if value is None:
        return "undefined"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        if math.isnan(value):
            return "nan"
        return repr(value)
    if isinstance(value, (list, tuple)):
        return " ".join(format_value(v) for v in value)
    return str(value)


# ======= Atomic writes =======

def atomic_write_text(path: str, text: str):
    """Write text to path via a temporary file in the same directory and os.replace()"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    handle, temp_path = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(temp_path, path)
    except BaseException:
        try:
            os.unlink(temp_path)
        except OSError:
            pass
        raise
    logging.debug(f"Wrote {len(text)} bytes to {path}")


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]],
              run_config: Optional[RunConfig] = None):
    """
    Write a CSV report

    Parameters:
    - header: column names
    - rows: row values, formatted with format_value()
    - run_config: emitted first as comment lines
    """
    buffer = io.StringIO()
    if run_config is not None:
        for line in run_config.to_lines():
            buffer.write(line + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    count = 0
    for row in rows:
        writer.writerow([format_value(v) for v in row])
        count += 1
    atomic_write_text(path, buffer.getvalue())
    logging.info(f"Wrote {count} rows to {path}")


def read_csv(path: str) -> Tuple[Optional[RunConfig], List[str], List[Dict[str, str]]]:
    """
    Read a CSV written by write_csv()

    Returns (RunConfig or None, header, rows as dicts). An empty file gives an empty header.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise GraphFormatError(f"Cannot read {path}: {e}", path=path)

    comments = [line for line in lines if line.startswith("#")]
    body = [line for line in lines if line and not line.startswith("#")]
    run_config = None
    if comments:
        try:
            run_config = RunConfig.from_lines(comments)
        except (ParameterError, ValueError):
            run_config = None

    if not body:
        return run_config, [], []
    reader = csv.reader(body)
    header = next(reader)
    rows = []
    for line_number, values in enumerate(reader, start=2):
        if len(values) != len(header):
            raise GraphFormatError(f"Row has {len(values)} fields, header has {len(header)}",
                                   path=path, line_number=line_number)
        rows.append(dict(zip(header, values)))
    return run_config, header, rows


@dataclass
class TextReport:
    """Structured-text summary: titled sections of 'key: value' lines"""
    title: str
    run_config: Optional[RunConfig] = None
    sections: List[Tuple[str, List[Tuple[str, Any]]]] = field(default_factory=list)

    def add_section(self, name: str, items: Iterable[Tuple[str, Any]]):
        self.sections.append((name, list(items)))

    def render(self) -> str:
        lines = [f"# isogrowth report: {self.title}"]
        if self.run_config is not None:
            lines.extend(self.run_config.to_lines())
        for name, items in self.sections:
            lines.append("")
            lines.append(f"[{name}]")
            for key, value in items:
                lines.append(f"{key}: {format_value(value)}")
        return "\n".join(lines) + "\n"

    def write(self, path: str):
        atomic_write_text(path, self.render())
        logging.info(f"Wrote {self.title} report to {path}")
