"""Tabular sweep results with a metadata preamble, written as CSV or JSON."""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence

import config
from ..errors import InvalidArgumentError
from .config_loader import ExperimentConfig


def format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        if math.isnan(value):
            return 'nan'
        return format(value, '.17g')
    return str(value)


def _json_cell(value: Any):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


@dataclass
class SweepResult:
    """Rows in sweep order under a fixed header."""
    config: ExperimentConfig
    columns: List[str]
    rows: List[tuple] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    records: Dict[str, str] = field(default_factory=dict)
    stagnated: bool = False

    def add_row(self, values: Sequence[Any]):
        if len(values) != len(self.columns):
            raise InvalidArgumentError(f"row has {len(values)} cells, header has {len(self.columns)}")
        self.rows.append(tuple(values))

    def column(self, name: str) -> List[Any]:
        index = self.columns.index(name)
        return [row[index] for row in self.rows]

    def metadata(self, reproducible: bool = False) -> Dict[str, Any]:
        meta = {
            'tool': config.TOOL_NAME,
            'version': config.TOOL_VERSION,
            'config': self.config.to_dict(),
            'config_sha256': self.config.sha256(),
        }
        if not reproducible:
            meta['generated'] = datetime.now(timezone.utc).isoformat(timespec='seconds')
        return meta

    def preamble(self, reproducible: bool = False) -> List[str]:
        meta = self.metadata(reproducible)
        lines = [
            f"# tool: {meta['tool']} {meta['version']}",
            f"# config: {self.config.canonical_json()}",
            f"# config_sha256: {meta['config_sha256']}",
        ]
        if 'generated' in meta:
            lines.append(f"# generated: {meta['generated']}")
        if self.summary:
            lines.append(f"# summary: {json.dumps(self.summary, sort_keys=True, default=format_cell)}")
        return lines

    def to_csv(self, reproducible: bool = False) -> str:
        buffer = io.StringIO()
        for line in self.preamble(reproducible):
            buffer.write(line + '\n')
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_cell(value) for value in row])
        return buffer.getvalue()

    def to_json(self, reproducible: bool = False) -> str:
        document = {
            'metadata': self.metadata(reproducible),
            'columns': {
                name: [_json_cell(row[i]) for row in self.rows]
                for i, name in enumerate(self.columns)
            },
            'column_order': list(self.columns),
            'summary': {key: _json_cell(value) for key, value in self.summary.items()},
            'records': dict(self.records),
        }
        return json.dumps(document, indent=2, sort_keys=True) + '\n'

    def render(self, fmt: Optional[str] = None, reproducible: bool = False) -> str:
        fmt = fmt or self.config.output['format']
        if fmt == 'csv':
            return self.to_csv(reproducible)
        if fmt == 'json':
            return self.to_json(reproducible)
        raise InvalidArgumentError(f"unknown output format {fmt!r}")

    def write(self, path: Optional[str] = None, fmt: Optional[str] = None,
              reproducible: bool = False) -> Optional[str]:
        """Write to path (or return the text when no path is set); records go to sidecar files."""
        path = path or self.config.output['path']
        text = self.render(fmt, reproducible)
        if path is None:
            return text
        with open(path, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
        for name, record in self.records.items():
            with open(f"{path}.{name}.txt", 'w', encoding='utf-8') as handle:
                handle.write(record)
        return None


def config_from_preamble(text: str) -> ExperimentConfig:
    """Re-parse the configuration embedded in an emitted CSV preamble."""
    for line in text.splitlines():
        if line.startswith('# config: '):
            return ExperimentConfig.from_dict(json.loads(line[len('# config: '):]))
    raise InvalidArgumentError("no config line in preamble")
